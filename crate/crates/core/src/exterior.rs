//! The exterior algebra `Λ^{*,*}V` of an `n`-dimensional complex vector space.
//!
//! A basis element of `Λ^{p,q}V` is `dz^I ∧ dz̄^J` with `I`, `J` ascending,
//! all holomorphic factors written before the antiholomorphic ones. Multi-indices
//! are stored as bitmasks and enumerated in lexicographic order; the position
//! of `(I, J)` in `Λ^{p,q}` is `rank(I) * C(n, q) + rank(J)`.
//!
//! In the Rust API indices are 0-based (`dz^0, ..., dz^{n-1}`). The JSON
//! encoding uses 1-based indices.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{self, CMatrix, TolPolicy, C64, I, ONE, ZERO};

/// Largest supported complex dimension.
pub const MAX_DIM: usize = 8;

/// Relative tolerance of [`is_real`].
pub const REALITY_TOL: f64 = 1e-12;

/// Multi-index tables for a fixed dimension `n`.
#[derive(Debug)]
pub struct ExteriorContext {
    n: usize,
    subsets: Vec<Vec<u32>>,
    rank: Vec<usize>,
}

/// All `k`-subsets of `{0..n}` as bitmasks, lexicographic in ascending-index order.
pub fn subsets_lex(n: usize, k: usize) -> Vec<u32> {
    fn rec(start: usize, n: usize, k: usize, acc: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..=n - k {
            rec(i + 1, n, k - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, 0, &mut out);
    }
    out
}

pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask & (1 << i) != 0).collect()
}

fn mask_from_indices(idx: &[usize]) -> u32 {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}

/// `(-1)^{#{(a, b) : a ∈ A, b ∈ B, a > b}}`, the sign of merging `A` then `B`.
fn merge_sign(a: u32, b: u32) -> f64 {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> (j + 1)).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign of `(dz^{I1} dz̄^{J1}) ∧ (dz^{I2} dz̄^{J2})` in the basis, or `None` if it vanishes.
pub fn wedge_sign(i1: u32, j1: u32, i2: u32, j2: u32) -> Option<f64> {
    if i1 & i2 != 0 || j1 & j2 != 0 {
        return None;
    }
    let cross = if (j1.count_ones() * i2.count_ones()).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Some(cross * merge_sign(i1, i2) * merge_sign(j1, j2))
}

impl ExteriorContext {
    pub fn new(n: usize) -> Result<Arc<Self>> {
        if n > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "dimension {n} exceeds the supported maximum {MAX_DIM}"
            )));
        }
        let subsets: Vec<Vec<u32>> = (0..=n).map(|k| subsets_lex(n, k)).collect();
        let mut rank = vec![usize::MAX; 1 << n];
        for level in &subsets {
            for (r, &m) in level.iter().enumerate() {
                rank[m as usize] = r;
            }
        }
        Ok(Arc::new(Self { n, subsets, rank }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `C(n, k)`, zero for `k > n`.
    pub fn binom(&self, k: usize) -> usize {
        self.subsets.get(k).map_or(0, Vec::len)
    }

    /// `dim Λ^{p,q}`, zero when out of range.
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.binom(p) * self.binom(q)
    }

    pub fn subsets(&self, k: usize) -> &[u32] {
        &self.subsets[k]
    }

    pub fn rank_of(&self, mask: u32) -> usize {
        self.rank[mask as usize]
    }

    /// Position of `dz^I ∧ dz̄^J` in `Λ^{|I|,|J|}`.
    pub fn index(&self, i: u32, j: u32) -> usize {
        self.rank_of(i) * self.binom(j.count_ones() as usize) + self.rank_of(j)
    }

    /// Inverse of [`Self::index`].
    pub fn pair_at(&self, p: usize, q: usize, pos: usize) -> (u32, u32) {
        let dq = self.binom(q);
        (self.subsets[p][pos / dq], self.subsets[q][pos % dq])
    }

    /// Matrix of `x ↦ x ∧ g` from `Λ^{p,q}` to `Λ^{p+g.p, q+g.q}`.
    ///
    /// When the target bidegree exceeds `n` the matrix has zero rows.
    pub fn mul_matrix(&self, g: &Form, p: usize, q: usize) -> CMatrix {
        self.mul_matrix_coeffs(g.p, g.q, &g.coeffs, p, q)
    }

    /// [`Self::mul_matrix`] for `g` given by bidegree and coefficients.
    pub fn mul_matrix_coeffs(&self, gp: usize, gq: usize, g: &[C64], p: usize, q: usize) -> CMatrix {
        let (tp, tq) = (p + gp, q + gq);
        let rows = self.dim(tp, tq);
        let cols = self.dim(p, q);
        let mut m = CMatrix::zeros(rows, cols);
        if rows == 0 {
            return m;
        }
        let g_terms: Vec<(u32, u32, C64)> = g
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(pos, &c)| {
                let (i, j) = self.pair_at(gp, gq, pos);
                (i, j, c)
            })
            .collect();
        for col in 0..cols {
            let (i1, j1) = self.pair_at(p, q, col);
            for &(i2, j2, c) in &g_terms {
                if let Some(s) = wedge_sign(i1, j1, i2, j2) {
                    let row = self.index(i1 | i2, j1 | j2);
                    m[(row, col)] += c * s;
                }
            }
        }
        m
    }

    /// Matrix `C` with `coords(conj x) = C · conj(coords x)`, from `Λ^{p,q}` to `Λ^{q,p}`.
    pub fn conj_matrix(&self, p: usize, q: usize) -> CMatrix {
        let d = self.dim(p, q);
        let mut m = CMatrix::zeros(d, d);
        let s = if (p * q).is_multiple_of(2) { 1.0 } else { -1.0 };
        for col in 0..d {
            let (i, j) = self.pair_at(p, q, col);
            m[(self.index(j, i), col)] = C64::new(s, 0.0);
        }
        m
    }
}

/// An element of `Λ^{p,q}V`.
#[derive(Debug, Clone)]
pub struct Form {
    ctx: Arc<ExteriorContext>,
    p: usize,
    q: usize,
    coeffs: Vec<C64>,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.n == other.ctx.n && self.p == other.p && self.q == other.q && self.coeffs == other.coeffs
    }
}

fn check_same(a: &Form, b: &Form) -> Result<()> {
    if a.ctx.n != b.ctx.n {
        return Err(Error::ContextMismatch {
            left: a.ctx.n,
            right: b.ctx.n,
        });
    }
    Ok(())
}

impl Form {
    pub fn zero(ctx: &Arc<ExteriorContext>, p: usize, q: usize) -> Result<Form> {
        if p > ctx.n || q > ctx.n {
            return Err(Error::Bidegree(format!("({p},{q}) exceeds n = {}", ctx.n)));
        }
        Ok(Form {
            ctx: ctx.clone(),
            p,
            q,
            coeffs: vec![ZERO; ctx.dim(p, q)],
        })
    }

    pub fn one(ctx: &Arc<ExteriorContext>) -> Form {
        Form {
            ctx: ctx.clone(),
            p: 0,
            q: 0,
            coeffs: vec![ONE],
        }
    }

    pub fn from_coeffs(ctx: &Arc<ExteriorContext>, p: usize, q: usize, coeffs: Vec<C64>) -> Result<Form> {
        let mut f = Form::zero(ctx, p, q)?;
        if coeffs.len() != f.coeffs.len() {
            return Err(Error::DimensionMismatch(format!(
                "Λ^{{{p},{q}}} has dimension {}, got {} coefficients",
                f.coeffs.len(),
                coeffs.len()
            )));
        }
        if !coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(numkernel::NumError::NonFinite.into());
        }
        f.coeffs = coeffs;
        Ok(f)
    }

    /// `c · dz^I ∧ dz̄^J` for strictly ascending 0-based index lists.
    pub fn monomial(ctx: &Arc<ExteriorContext>, i: &[usize], j: &[usize], c: C64) -> Result<Form> {
        for idx in [i, j] {
            if idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&x| x >= ctx.n) {
                return Err(Error::InvalidInput(format!(
                    "multi-index {idx:?} must be strictly ascending and below {}",
                    ctx.n
                )));
            }
        }
        let mut f = Form::zero(ctx, i.len(), j.len())?;
        let pos = ctx.index(mask_from_indices(i), mask_from_indices(j));
        f.coeffs[pos] = c;
        Ok(f)
    }

    /// Standard complex Gaussian coefficients.
    pub fn random<R: Rng + ?Sized>(ctx: &Arc<ExteriorContext>, p: usize, q: usize, rng: &mut R) -> Result<Form> {
        let d = ctx.dim(p, q);
        let coeffs = (0..d)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Form::from_coeffs(ctx, p, q, coeffs)
    }

    pub fn ctx(&self) -> &Arc<ExteriorContext> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.ctx.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of `dz^I ∧ dz̄^J` (0-based ascending indices).
    pub fn coeff(&self, i: &[usize], j: &[usize]) -> C64 {
        if i.len() != self.p || j.len() != self.q {
            return ZERO;
        }
        self.coeffs[self.ctx.index(mask_from_indices(i), mask_from_indices(j))]
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        numkernel::vec_norm(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn scale(&self, s: C64) -> Form {
        Form {
            ctx: self.ctx.clone(),
            p: self.p,
            q: self.q,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        check_same(self, other)?;
        if self.bidegree() != other.bidegree() {
            return Err(Error::Bidegree(format!(
                "cannot add {:?} and {:?}",
                self.bidegree(),
                other.bidegree()
            )));
        }
        Ok(Form {
            ctx: self.ctx.clone(),
            p: self.p,
            q: self.q,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn to_json(&self) -> FormJson {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(pos, c)| {
                let (i, j) = self.ctx.pair_at(self.p, self.q, pos);
                CoeffJson {
                    i: mask_indices(i).iter().map(|x| x + 1).collect(),
                    j: mask_indices(j).iter().map(|x| x + 1).collect(),
                    re: c.re,
                    im: c.im,
                }
            })
            .collect();
        FormJson {
            n: self.ctx.n,
            p: self.p,
            q: self.q,
            coeffs,
        }
    }

    /// Decodes the JSON encoding; the context is created for `json.n`.
    pub fn from_json(json: &FormJson) -> Result<Form> {
        let ctx = ExteriorContext::new(json.n)?;
        let mut f = Form::zero(&ctx, json.p, json.q)?;
        let mut seen = vec![false; f.coeffs.len()];
        for (t, c) in json.coeffs.iter().enumerate() {
            if c.i.len() != json.p || c.j.len() != json.q {
                return Err(Error::Parse(format!(
                    "term {t}: index lengths ({}, {}) do not match bidegree ({}, {})",
                    c.i.len(),
                    c.j.len(),
                    json.p,
                    json.q
                )));
            }
            for idx in [&c.i, &c.j] {
                if idx.iter().any(|&x| x == 0 || x > json.n) {
                    return Err(Error::Parse(format!("term {t}: indices must lie in 1..={}", json.n)));
                }
                if idx.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Parse(format!(
                        "term {t}: multi-index {idx:?} is not strictly ascending"
                    )));
                }
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Parse(format!("term {t}: non-finite coefficient")));
            }
            let i: Vec<usize> = c.i.iter().map(|x| x - 1).collect();
            let j: Vec<usize> = c.j.iter().map(|x| x - 1).collect();
            let pos = ctx.index(mask_from_indices(&i), mask_from_indices(&j));
            if seen[pos] {
                return Err(Error::Parse(format!("term {t}: duplicate multi-index pair")));
            }
            seen[pos] = true;
            f.coeffs[pos] = C64::new(c.re, c.im);
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    #[serde(rename = "I")]
    pub i: Vec<usize>,
    #[serde(rename = "J")]
    pub j: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub coeffs: Vec<CoeffJson>,
}

/// `α ∧ β`. Out-of-range products give the zero form of bidegree clamped to `n`.
pub fn wedge(a: &Form, b: &Form) -> Result<Form> {
    check_same(a, b)?;
    let ctx = &a.ctx;
    let (tp, tq) = (a.p + b.p, a.q + b.q);
    if tp > ctx.n || tq > ctx.n {
        return Form::zero(ctx, tp.min(ctx.n), tq.min(ctx.n));
    }
    let m = ctx.mul_matrix(b, a.p, a.q);
    Form::from_coeffs(ctx, tp, tq, m.mul_vec(&a.coeffs))
}

/// Wedge of a list of forms; the empty product is `1`.
pub fn wedge_all(ctx: &Arc<ExteriorContext>, forms: &[Form]) -> Result<Form> {
    forms.iter().try_fold(Form::one(ctx), |acc, f| wedge(&acc, f))
}

/// `g^k` (with `g^0 = 1`).
pub fn wedge_power(g: &Form, k: usize) -> Result<Form> {
    let mut acc = Form::one(&g.ctx);
    for _ in 0..k {
        acc = wedge(&acc, g)?;
    }
    Ok(acc)
}

/// Complex conjugate, of bidegree `(q, p)`.
pub fn conjugate(a: &Form) -> Form {
    let c = a.ctx.conj_matrix(a.p, a.q);
    let conj_coeffs: Vec<C64> = a.coeffs.iter().map(|z| z.conj()).collect();
    Form {
        ctx: a.ctx.clone(),
        p: a.q,
        q: a.p,
        coeffs: c.mul_vec(&conj_coeffs),
    }
}

/// Whether a `(p, p)`-form equals its conjugate up to [`REALITY_TOL`].
pub fn is_real(a: &Form) -> Result<bool> {
    if a.p != a.q {
        return Err(Error::Bidegree(format!(
            "reality is defined for (p,p)-forms, got ({},{})",
            a.p, a.q
        )));
    }
    let diff = conjugate(a).sub(a)?;
    Ok(diff.coeff_norm() <= REALITY_TOL * a.coeff_norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityKind {
    Strict,
    SemidefinitePullback,
}

/// A real (1,1)-form `i Σ H_{jk} dz^j ∧ dz̄^k` with Hermitian `H ⪰ 0`.
#[derive(Debug, Clone)]
pub struct PositiveForm {
    ctx: Arc<ExteriorContext>,
    h: CMatrix,
    kind: PositivityKind,
    lambda_min: f64,
}

impl PositiveForm {
    /// Strictly positive form; rejects `H` that is not positive definite.
    pub fn new(ctx: &Arc<ExteriorContext>, h: CMatrix) -> Result<PositiveForm> {
        Self::with_kind(ctx, h, PositivityKind::Strict)
    }

    /// Positive semidefinite form, as produced by pullbacks.
    pub fn semidefinite(ctx: &Arc<ExteriorContext>, h: CMatrix) -> Result<PositiveForm> {
        Self::with_kind(ctx, h, PositivityKind::SemidefinitePullback)
    }

    pub fn standard(ctx: &Arc<ExteriorContext>) -> PositiveForm {
        Self::new(ctx, CMatrix::identity(ctx.n)).expect("identity is positive definite")
    }

    pub fn with_kind(ctx: &Arc<ExteriorContext>, h: CMatrix, kind: PositivityKind) -> Result<PositiveForm> {
        let n = ctx.n;
        if h.rows() != n || h.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "coefficient matrix must be {n}x{n}, got {}x{}",
                h.rows(),
                h.cols()
            )));
        }
        let eig = numkernel::hermitian_eigen(&h)?;
        let lambda_min = eig.values.first().copied().unwrap_or(0.0);
        let scale = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tau = TolPolicy::Default.tau(n, n);
        match kind {
            PositivityKind::Strict if n > 0 && lambda_min <= tau * scale => {
                return Err(Error::NotStrictlyPositive { lambda_min });
            }
            PositivityKind::SemidefinitePullback if lambda_min < -tau * scale => {
                return Err(Error::NotStrictlyPositive { lambda_min });
            }
            _ => {}
        }
        Ok(PositiveForm {
            ctx: ctx.clone(),
            h: h.hermitian_part(),
            kind,
            lambda_min,
        })
    }

    /// Reads a real (1,1)-form, `H = -i · coefficients`.
    pub fn from_form(form: &Form, kind: PositivityKind) -> Result<PositiveForm> {
        if form.bidegree() != (1, 1) {
            return Err(Error::Bidegree(format!(
                "positive forms have bidegree (1,1), got {:?}",
                form.bidegree()
            )));
        }
        if !is_real(form)? {
            return Err(Error::InvalidInput("positive form must be real".into()));
        }
        let n = form.n();
        let h = CMatrix::from_fn(n, n, |j, k| -I * form.coeffs[form.ctx.index(1 << j, 1 << k)]);
        Self::with_kind(&form.ctx, h, kind)
    }

    pub fn ctx(&self) -> &Arc<ExteriorContext> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.ctx.n
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn kind(&self) -> PositivityKind {
        self.kind
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn is_strict(&self) -> bool {
        self.kind == PositivityKind::Strict
    }

    pub fn scaled(&self, lambda: f64) -> Result<PositiveForm> {
        Self::with_kind(&self.ctx, self.h.scale(C64::new(lambda, 0.0)), self.kind)
    }

    /// `self + t · other`; strict when the sum is positive definite.
    pub fn add_scaled(&self, other: &PositiveForm, t: f64) -> Result<PositiveForm> {
        if self.n() != other.n() {
            return Err(Error::ContextMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        let h = self.h.add(&other.h.scale(C64::new(t, 0.0)));
        Self::new(&self.ctx, h.clone()).or_else(|_| Self::semidefinite(&self.ctx, h))
    }

    pub fn to_form(&self) -> Form {
        positive_form_to_form(self)
    }
}

/// `i Σ H_{jk} dz^j ∧ dz̄^k` as a (1,1)-form.
pub fn positive_form_to_form(omega: &PositiveForm) -> Form {
    let ctx = &omega.ctx;
    let n = ctx.n;
    let mut f = Form::zero(ctx, 1, 1).expect("(1,1) is in range");
    for j in 0..n {
        for k in 0..n {
            f.coeffs[ctx.index(1 << j, 1 << k)] = I * omega.h[(j, k)];
        }
    }
    f
}

/// Compound matrix `C[R, S] = det M[R, S]` over `k`-subsets of rows and columns.
pub fn compound(m: &CMatrix, k: usize) -> CMatrix {
    let rows = subsets_lex(m.rows(), k);
    let cols = subsets_lex(m.cols(), k);
    CMatrix::from_fn(rows.len(), cols.len(), |a, b| {
        let ri = mask_indices(rows[a]);
        let ci = mask_indices(cols[b]);
        numkernel::det(&CMatrix::from_fn(k, k, |x, y| m[(ri[x], ci[y])]))
    })
}

/// Coefficients after the substitution `dz = T dζ`: `Cp(T)^T X conj(Cq(T))`,
/// with `X` the `C(n,p) × C(n,q)` coefficient array.
fn change_coframe(coeffs: &[C64], cp: &CMatrix, cq: &CMatrix) -> Vec<C64> {
    let x = CMatrix::from_row_major(cp.rows(), cq.rows(), coeffs.to_vec()).expect("finite coefficients");
    cp.transpose().matmul(&x).matmul(&cq.conj()).as_slice().to_vec()
}

fn check_pullback_shape(pi: &CMatrix, m: usize, ctx_v: &ExteriorContext) -> Result<()> {
    if pi.rows() != m || pi.cols() != ctx_v.n {
        return Err(Error::DimensionMismatch(format!(
            "linear map must be {m}x{}, got {}x{}",
            ctx_v.n,
            pi.rows(),
            pi.cols()
        )));
    }
    Ok(())
}

/// Pullback of a positive form on `W` along `w = P z`: `H = Pᵀ H' P̄`.
pub fn pullback(pi: &CMatrix, omega_w: &PositiveForm, ctx_v: &Arc<ExteriorContext>) -> Result<PositiveForm> {
    check_pullback_shape(pi, omega_w.n(), ctx_v)?;
    let h = pi.transpose().matmul(&omega_w.h).matmul(&pi.conj());
    PositiveForm::semidefinite(ctx_v, h)
}

/// Pullback of an arbitrary form on `W` along `w = P z`.
pub fn pullback_form(pi: &CMatrix, alpha: &Form, ctx_v: &Arc<ExteriorContext>) -> Result<Form> {
    check_pullback_shape(pi, alpha.n(), ctx_v)?;
    if alpha.p > ctx_v.n || alpha.q > ctx_v.n {
        return Form::zero(ctx_v, alpha.p.min(ctx_v.n), alpha.q.min(ctx_v.n));
    }
    let cp = compound(pi, alpha.p);
    let cq = compound(pi, alpha.q);
    Form::from_coeffs(ctx_v, alpha.p, alpha.q, change_coframe(&alpha.coeffs, &cp, &cq))
}

fn require_strict(omega: &PositiveForm) -> Result<()> {
    if !omega.is_strict() {
        return Err(Error::NotStrictlyPositive {
            lambda_min: omega.lambda_min,
        });
    }
    Ok(())
}

/// `T` with `dz = T dζ` for an `ω`-unitary coframe `dζ` (`ω = i Σ dζ^a ∧ dζ̄^a`).
fn unitary_coframe(omega: &PositiveForm) -> Result<CMatrix> {
    require_strict(omega)?;
    let eig = numkernel::hermitian_eigen(&omega.h.conj())?;
    let n = omega.n();
    Ok(CMatrix::from_fn(n, n, |i, j| {
        eig.vectors[(i, j)] / eig.values[j].sqrt()
    }))
}

/// Matrix `K` on `Λ^{p,q}` with `|α|_ω = ‖K α‖`.
pub fn norm_matrix(omega: &PositiveForm, p: usize, q: usize) -> Result<CMatrix> {
    let t = unitary_coframe(omega)?;
    let cp = compound(&t, p);
    let cq = compound(&t, q);
    let (dp, dq) = (cp.rows(), cq.rows());
    // column (I, J) holds the image of the basis element dz^I dz̄^J
    let mut k = CMatrix::zeros(dp * dq, dp * dq);
    for i in 0..dp {
        for j in 0..dq {
            let col = i * dq + j;
            for a in 0..dp {
                for b in 0..dq {
                    k[(a * dq + b, col)] = cp[(i, a)] * cq[(j, b)].conj();
                }
            }
        }
    }
    Ok(k)
}

/// Pointwise norm `|α|_ω`: Euclidean norm of the coefficients in an `ω`-unitary coframe.
pub fn norm_omega(alpha: &Form, omega: &PositiveForm) -> Result<f64> {
    if alpha.n() != omega.n() {
        return Err(Error::ContextMismatch {
            left: alpha.n(),
            right: omega.n(),
        });
    }
    let t = unitary_coframe(omega)?;
    let cp = compound(&t, alpha.p);
    let cq = compound(&t, alpha.q);
    Ok(numkernel::vec_norm(&change_coframe(&alpha.coeffs, &cp, &cq)))
}

/// Coefficient of `dz^{1..n} ∧ dz̄^{1..n}` in `ω^n / n!`: `i^n (-1)^{n(n-1)/2} det H`.
pub fn volume_coefficient(omega: &PositiveForm) -> C64 {
    let n = omega.n();
    let sign = if (n * n.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    I.powu(n as u32) * sign * numkernel::det(&omega.h)
}

/// `c` with `γ = c · ω^n / n!`.
pub fn integrate(gamma: &Form, omega: &PositiveForm) -> Result<C64> {
    if gamma.n() != omega.n() {
        return Err(Error::ContextMismatch {
            left: gamma.n(),
            right: omega.n(),
        });
    }
    let n = gamma.n();
    if gamma.bidegree() != (n, n) {
        return Err(Error::Bidegree(format!(
            "integrand must have bidegree ({n},{n}), got {:?}",
            gamma.bidegree()
        )));
    }
    require_strict(omega)?;
    Ok(gamma.coeffs[0] / volume_coefficient(omega))
}

/// Smallest `N ≥ 1` with `ω_i ≤ N ω` for all `i`.
pub fn comparability_constant(forms: &[PositiveForm], omega: &PositiveForm) -> Result<f64> {
    require_strict(omega)?;
    let mut n_const = 1.0_f64;
    for f in forms {
        if f.n() != omega.n() {
            return Err(Error::ContextMismatch {
                left: f.n(),
                right: omega.n(),
            });
        }
        let (_, hi) = numkernel::generalized_eigen_range(&f.h, &omega.h)?;
        n_const = n_const.max(hi);
    }
    Ok(n_const)
}
