//! Hodge-Riemann pairs over an arbitrary bigraded algebra with an integral.
//!
//! The same algorithms serve the exterior algebra of a vector space and
//! abstract cohomology rings; each supplies a [`BigradedAlgebra`]
//! implementation. Elements are handled as coordinate vectors in a fixed basis
//! of each bidegree component ([`Homog`]).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{self, CMatrix, NumError, TolPolicy, C64, I, ONE, ZERO};

/// Relative positivity margin for restricted Gram matrices.
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Relative residual admitted for primitive decompositions.
pub const DECOMPOSITION_TOL: f64 = 1e-9;

/// Thresholds used when certifying a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyTolerance {
    /// Relative singular-value threshold for rank decisions; `None` means `1e-10 · max(rows, cols)`.
    pub rank: Option<f64>,
    /// Primitive Gram matrices must have `λ_min > positivity · ‖Gram‖`.
    pub positivity: f64,
    /// Largest relative residual accepted from a Lefschetz decomposition.
    pub decomposition: f64,
}

impl Default for VerifyTolerance {
    fn default() -> Self {
        Self {
            rank: None,
            positivity: POSITIVITY_TOL,
            decomposition: DECOMPOSITION_TOL,
        }
    }
}

impl VerifyTolerance {
    fn rank_policy(&self) -> TolPolicy {
        self.rank.map_or(TolPolicy::Default, TolPolicy::Relative)
    }
}

/// A homogeneous element of bidegree `(p, q)`.
///
/// Components beyond the top degree are zero-dimensional, so `coords` is
/// empty there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Homog {
    pub p: usize,
    pub q: usize,
    pub coords: Vec<C64>,
}

impl Homog {
    pub fn new(p: usize, q: usize, coords: Vec<C64>) -> Self {
        Self { p, q, coords }
    }

    pub fn zero<A: BigradedAlgebra + ?Sized>(alg: &A, p: usize, q: usize) -> Self {
        Self::new(p, q, vec![ZERO; alg.dim(p, q)])
    }

    pub fn norm(&self) -> f64 {
        numkernel::vec_norm(&self.coords)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.p, self.q, self.coords.iter().map(|c| c * s).collect())
    }

    /// Sum of two elements of the same bidegree.
    pub fn add(&self, other: &Homog) -> Self {
        assert_eq!((self.p, self.q), (other.p, other.q), "bidegree mismatch");
        Self::new(
            self.p,
            self.q,
            self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn sub(&self, other: &Homog) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }
}

/// A finite-dimensional bigraded, graded-commutative algebra with conjugation
/// and an integral on its top component `(n, n)`.
pub trait BigradedAlgebra {
    fn top(&self) -> usize;

    /// Dimension of the `(p, q)` component (zero when out of range).
    fn dim(&self, p: usize, q: usize) -> usize;

    /// Matrix of `x ↦ x · g` from `(p, q)` into `(p + g.p, q + g.q)`.
    fn mul_matrix(&self, g: &Homog, p: usize, q: usize) -> CMatrix;

    /// `C` with `coords(conj x) = C · conj(coords x)`, mapping `(p, q)` to `(q, p)`.
    fn conj_matrix(&self, p: usize, q: usize) -> CMatrix;

    /// Integral of a top-degree element given by its coordinates.
    fn integral(&self, top: &[C64]) -> C64;

    fn unit(&self) -> Homog;

    fn mul(&self, a: &Homog, b: &Homog) -> Homog {
        let m = self.mul_matrix(b, a.p, a.q);
        Homog::new(a.p + b.p, a.q + b.q, m.mul_vec(&a.coords))
    }

    fn conj(&self, a: &Homog) -> Homog {
        let c = self.conj_matrix(a.p, a.q);
        let z: Vec<C64> = a.coords.iter().map(|x| x.conj()).collect();
        Homog::new(a.q, a.p, c.mul_vec(&z))
    }

    /// `Π[u, v] = ∫ e_u · f_v` for bases of `(p, q)` and `(n - p, n - q)`.
    fn pairing_matrix(&self, p: usize, q: usize) -> CMatrix {
        let n = self.top();
        let (dp, dc) = (self.dim(p, q), self.dim(n - p, n - q));
        let mut m = CMatrix::zeros(dp, dc);
        for v in 0..dc {
            let mut f = vec![ZERO; dc];
            f[v] = ONE;
            let mv = self.mul_matrix(&Homog::new(n - p, n - q, f), p, q);
            for u in 0..dp {
                m[(u, v)] = self.integral(&mv.column(u));
            }
        }
        m
    }

    fn integrate(&self, a: &Homog) -> C64 {
        let n = self.top();
        if (a.p, a.q) != (n, n) {
            return ZERO;
        }
        self.integral(&a.coords)
    }

    fn power(&self, g: &Homog, k: usize) -> Homog {
        let mut acc = self.unit();
        for _ in 0..k {
            acc = self.mul(&acc, g);
        }
        acc
    }
}

impl<T: BigradedAlgebra + ?Sized> BigradedAlgebra for Arc<T> {
    fn top(&self) -> usize {
        (**self).top()
    }
    fn dim(&self, p: usize, q: usize) -> usize {
        (**self).dim(p, q)
    }
    fn mul_matrix(&self, g: &Homog, p: usize, q: usize) -> CMatrix {
        (**self).mul_matrix(g, p, q)
    }
    fn conj_matrix(&self, p: usize, q: usize) -> CMatrix {
        (**self).conj_matrix(p, q)
    }
    fn integral(&self, top: &[C64]) -> C64 {
        (**self).integral(top)
    }
    fn unit(&self) -> Homog {
        (**self).unit()
    }
    fn mul(&self, a: &Homog, b: &Homog) -> Homog {
        (**self).mul(a, b)
    }
    fn pairing_matrix(&self, p: usize, q: usize) -> CMatrix {
        (**self).pairing_matrix(p, q)
    }
}

/// `(-1)^q · i^{(p+q)^2}`.
pub fn hr_sign(p: usize, q: usize) -> C64 {
    let base = if (p + q).is_multiple_of(2) { ONE } else { I };
    if q.is_multiple_of(2) {
        base
    } else {
        -base
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `p + q ≤ n - r`.
    Low,
    /// `p + q ≥ n + r`.
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    HardLefschetz,
    HodgeRiemann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    /// Numerical rank of `-∧νω^k` on `(p, q)`.
    pub rank: usize,
    pub full: bool,
    /// Smallest singular value of `-∧νω^k` (`null` for an empty component).
    pub sigma_min: Option<f64>,
    pub sigma_max: Option<f64>,
    pub primitive_dim: usize,
    /// Smallest eigenvalue of the restricted Gram matrix (`null` when the primitive space is empty).
    pub lambda_min_primitive: Option<f64>,
    pub gram_norm: Option<f64>,
    /// Largest relative non-Hermitian part of the Gram matrix before symmetrizing.
    pub gram_hermitian_defect: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub kind: FailureKind,
    /// `sigma_min / sigma_max` or `lambda_min / ‖Gram‖`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub r: usize,
    pub verified: bool,
    pub entries: Vec<CertificateEntry>,
    pub first_failure: Option<Failure>,
    /// Smallest `lambda_min / ‖Gram‖` over nonempty primitive spaces.
    pub min_positivity_margin: Option<f64>,
    /// Smallest `sigma_min / sigma_max` over all Lefschetz maps.
    pub min_lefschetz_margin: Option<f64>,
    pub tolerance: VerifyTolerance,
}

#[derive(Debug, Clone)]
struct Primitive {
    basis: CMatrix,
    gram: CMatrix,
}

/// Lefschetz decomposition `Σ ω^i α_i` (low side) or `Σ νω^{k+i} α_i` (high side).
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub p: usize,
    pub q: usize,
    pub side: Side,
    /// `n - r - p' - q'` where `(p', q')` is the low-side degree (`(p, q)` itself on the low side).
    pub k: usize,
    /// `components[i]` is primitive of bidegree `(p' - i, q' - i)`.
    pub components: Vec<Homog>,
    /// Relative reconstruction residual.
    pub residual: f64,
}

struct System {
    side: Side,
    low: (usize, usize),
    k: usize,
    s: CMatrix,
    blocks: Vec<(usize, usize)>,
}

/// A pair `(ν, ω)` with `ν` of bidegree `(r, r)` and `ω` of bidegree `(1, 1)`,
/// together with its verification certificate.
#[derive(Debug, Clone)]
pub struct HodgeRiemannPair<A> {
    alg: A,
    n: usize,
    r: usize,
    nu: Homog,
    omega: Homog,
    omega_pows: Vec<Homog>,
    nu_omega_pows: Vec<Homog>,
    certificate: Certificate,
    primitive: BTreeMap<(usize, usize), Primitive>,
}

impl<A: BigradedAlgebra> HodgeRiemannPair<A> {
    /// Checks hard Lefschetz and Hodge-Riemann at every `(p, q, k)` with
    /// `p + q + k + r = n`. A failed check is recorded, not raised.
    pub fn verify(alg: A, nu: Homog, omega: Homog) -> Result<Self> {
        Self::verify_with(alg, nu, omega, VerifyTolerance::default())
    }

    pub fn verify_with(alg: A, nu: Homog, omega: Homog, tol: VerifyTolerance) -> Result<Self> {
        let n = alg.top();
        let r = nu.p;
        if nu.q != r || r > n {
            return Err(Error::Bidegree(format!(
                "ν must have bidegree (r,r) with r ≤ {n}, got ({},{})",
                nu.p, nu.q
            )));
        }
        if (omega.p, omega.q) != (1, 1) {
            return Err(Error::Bidegree(format!(
                "ω must have bidegree (1,1), got ({},{})",
                omega.p, omega.q
            )));
        }
        if nu.coords.len() != alg.dim(r, r) || omega.coords.len() != alg.dim(1, 1) {
            return Err(Error::DimensionMismatch(
                "coordinate length does not match component".into(),
            ));
        }
        let mut omega_pows = vec![alg.unit()];
        for j in 1..=n + 1 {
            let next = alg.mul(&omega_pows[j - 1], &omega);
            omega_pows.push(next);
        }
        let nu_omega_pows: Vec<Homog> = omega_pows.iter().map(|w| alg.mul(&nu, w)).collect();

        let mut entries = Vec::new();
        let mut first_failure = None;
        let mut primitive = BTreeMap::new();
        let mut min_pos: Option<f64> = None;
        let mut min_lef: Option<f64> = None;
        for p in 0..=n - r {
            for q in 0..=n - r - p {
                let k = n - r - p - q;
                let (entry, prim, failure) = check_degree(&alg, &nu_omega_pows, n, p, q, k, &tol)?;
                if let (Some(lo), Some(hi)) = (entry.sigma_min, entry.sigma_max) {
                    let m = if hi > 0.0 { lo / hi } else { 0.0 };
                    min_lef = Some(min_lef.map_or(m, |x: f64| x.min(m)));
                }
                if let (Some(l), Some(g)) = (entry.lambda_min_primitive, entry.gram_norm) {
                    let m = if g > 0.0 { l / g } else { f64::NEG_INFINITY };
                    min_pos = Some(min_pos.map_or(m, |x: f64| x.min(m)));
                }
                if first_failure.is_none() {
                    first_failure = failure;
                }
                entries.push(entry);
                primitive.insert((p, q), prim);
            }
        }
        let certificate = Certificate {
            n,
            r,
            verified: first_failure.is_none(),
            entries,
            first_failure,
            min_positivity_margin: min_pos,
            min_lefschetz_margin: min_lef,
            tolerance: tol,
        };
        Ok(Self {
            alg,
            n,
            r,
            nu,
            omega,
            omega_pows,
            nu_omega_pows,
            certificate,
            primitive,
        })
    }

    pub fn algebra(&self) -> &A {
        &self.alg
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn nu(&self) -> &Homog {
        &self.nu
    }

    pub fn omega(&self) -> &Homog {
        &self.omega
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn is_verified(&self) -> bool {
        self.certificate.verified
    }

    fn require_verified(&self) -> Result<()> {
        if self.certificate.verified {
            return Ok(());
        }
        let detail = match &self.certificate.first_failure {
            Some(f) => format!(
                "{:?} fails at (p,q,k) = ({},{},{}) with margin {:.3e}",
                f.kind, f.p, f.q, f.k, f.margin
            ),
            None => "unverified".into(),
        };
        Err(Error::PairNotVerified(detail))
    }

    fn check_element(&self, x: &Homog) -> Result<()> {
        if x.p > self.n || x.q > self.n {
            return Err(Error::Bidegree(format!("({},{}) exceeds n = {}", x.p, x.q, self.n)));
        }
        if x.coords.len() != self.alg.dim(x.p, x.q) {
            return Err(Error::DimensionMismatch(format!(
                "component ({},{}) has dimension {}, got {} coordinates",
                x.p,
                x.q,
                self.alg.dim(x.p, x.q),
                x.coords.len()
            )));
        }
        Ok(())
    }

    /// Which formula applies at `(p, q)`; the band `n - r < p + q < n + r` is rejected.
    pub fn side(&self, p: usize, q: usize) -> Result<Side> {
        let (n, r) = (self.n, self.r);
        if p > n || q > n {
            return Err(Error::Bidegree(format!("({p},{q}) exceeds n = {n}")));
        }
        if p + q + r <= n {
            Ok(Side::Low)
        } else if p + q >= n + r {
            Ok(Side::High)
        } else {
            Err(Error::DegreeOutOfRange(format!(
                "p + q = {} lies strictly between n - r = {} and n + r = {}",
                p + q,
                n - r,
                n + r
            )))
        }
    }

    /// `ω^j`.
    pub fn omega_power(&self, j: usize) -> Homog {
        self.omega_pows
            .get(j)
            .cloned()
            .unwrap_or_else(|| self.alg.power(&self.omega, j))
    }

    /// `ν ω^j`.
    pub fn nu_omega_power(&self, j: usize) -> Homog {
        self.nu_omega_pows
            .get(j)
            .cloned()
            .unwrap_or_else(|| self.alg.mul(&self.nu, &self.alg.power(&self.omega, j)))
    }

    /// Orthonormal basis (columns) of `P^{p,q} = ker(-∧νω^{k+1})`, `p + q ≤ n - r`.
    pub fn primitive_basis(&self, p: usize, q: usize) -> Result<&CMatrix> {
        self.primitive
            .get(&(p, q))
            .map(|x| &x.basis)
            .ok_or_else(|| Error::DegreeOutOfRange(format!("primitive spaces need p + q ≤ n - r, got ({p},{q})")))
    }

    /// Restricted Gram matrix of `⟨·,·⟩_{νω^k}` on the primitive basis.
    pub fn primitive_gram(&self, p: usize, q: usize) -> Result<&CMatrix> {
        self.primitive
            .get(&(p, q))
            .map(|x| &x.gram)
            .ok_or_else(|| Error::DegreeOutOfRange(format!("primitive spaces need p + q ≤ n - r, got ({p},{q})")))
    }

    /// `⟨x, y⟩_{νω^k} = (-1)^q i^{(p+q)^2} ∫ x · ȳ · νω^k` with `p + q + k + r = n`.
    pub fn hermitian_form(&self, x: &Homog, y: &Homog, k: usize) -> Result<C64> {
        self.check_element(x)?;
        self.check_element(y)?;
        if (x.p, x.q) != (y.p, y.q) {
            return Err(Error::Bidegree("arguments must share a bidegree".into()));
        }
        if x.p + x.q + k + self.r != self.n {
            return Err(Error::DegreeOutOfRange(format!(
                "p + q + k + r = {} must equal n = {}",
                x.p + x.q + k + self.r,
                self.n
            )));
        }
        let prod = self
            .alg
            .mul(&self.alg.mul(x, &self.alg.conj(y)), &self.nu_omega_power(k));
        Ok(hr_sign(x.p, x.q) * self.alg.integrate(&prod))
    }

    /// `L x = x · ω`.
    pub fn lefschetz(&self, x: &Homog) -> Homog {
        self.alg.mul(x, &self.omega)
    }

    fn system(&self, p: usize, q: usize) -> Result<System> {
        let side = self.side(p, q)?;
        let (n, r) = (self.n, self.r);
        let low = match side {
            Side::Low => (p, q),
            Side::High => (n - q, n - p),
        };
        let k = n - r - low.0 - low.1;
        let mut blocks = Vec::new();
        let mut cols = Vec::new();
        let mut offset = 0;
        for i in 0..=low.0.min(low.1) {
            let (pi, qi) = (low.0 - i, low.1 - i);
            let basis = self.primitive_basis(pi, qi)?;
            let g = match side {
                Side::Low => self.omega_power(i),
                Side::High => self.nu_omega_power(k + i),
            };
            let lifted = self.alg.mul_matrix(&g, pi, qi).matmul(basis);
            blocks.push((offset, basis.cols()));
            offset += basis.cols();
            cols.push(lifted);
        }
        let rows = self.alg.dim(p, q);
        let s = CMatrix::hstack(rows, &cols);
        if s.rows() != s.cols() {
            return Err(Error::CertificateInconsistency(format!(
                "Lefschetz block system at ({p},{q}) is {}x{}",
                s.rows(),
                s.cols()
            )));
        }
        Ok(System {
            side,
            low,
            k,
            s,
            blocks,
        })
    }

    fn metric_weights(&self, sys: &System) -> Vec<f64> {
        (0..sys.blocks.len())
            .map(|i| match sys.side {
                Side::Low => factorial(i) / factorial(sys.k + i),
                Side::High => factorial(sys.k + i) / factorial(i),
            })
            .collect()
    }

    /// Lefschetz decomposition by one block solve over all components.
    pub fn decompose(&self, x: &Homog) -> Result<Decomposition> {
        self.require_verified()?;
        self.check_element(x)?;
        let sys = self.system(x.p, x.q)?;
        let rhs = CMatrix::from_columns(x.coords.len(), std::slice::from_ref(&x.coords));
        let y = numkernel::solve_many_with(&sys.s, &rhs, self.certificate.tolerance.rank_policy())
            .map(|m| m.column(0))
            .map_err(|e| match e {
                NumError::SingularSystem { ratio } => {
                    Error::CertificateInconsistency(format!("Lefschetz block system is singular (ratio {ratio:.3e})"))
                }
                other => other.into(),
            })?;
        let rebuilt = sys.s.mul_vec(&y);
        let scale = numkernel::vec_norm(&x.coords);
        let residual = if scale == 0.0 {
            numkernel::vec_norm(&rebuilt)
        } else {
            numkernel::vec_norm(&numkernel::vec_sub(&rebuilt, &x.coords)) / scale
        };
        let limit = self.certificate.tolerance.decomposition;
        if residual > limit {
            return Err(Error::CertificateInconsistency(format!(
                "decomposition residual {residual:.3e} exceeds {limit:.0e}"
            )));
        }
        let components = sys
            .blocks
            .iter()
            .enumerate()
            .map(|(i, &(off, m))| {
                let (pi, qi) = (sys.low.0 - i, sys.low.1 - i);
                let basis = self.primitive_basis(pi, qi).expect("cached");
                Homog::new(pi, qi, basis.mul_vec(&y[off..off + m]))
            })
            .collect();
        Ok(Decomposition {
            p: x.p,
            q: x.q,
            side: sys.side,
            k: sys.k,
            components,
            residual,
        })
    }

    /// Rebuilds the element from its components.
    pub fn recompose(&self, d: &Decomposition) -> Homog {
        let mut acc = Homog::zero(&self.alg, d.p, d.q);
        for (i, a) in d.components.iter().enumerate() {
            let g = match d.side {
                Side::Low => self.omega_power(i),
                Side::High => self.nu_omega_power(d.k + i),
            };
            acc = acc.add(&self.alg.mul(a, &g));
        }
        acc
    }

    /// Star coefficient `i^{-(p+q)^2} (-1)^{q-i} i!/(k+i)!` at a low-side degree.
    fn star_coefficient(p: usize, q: usize, k: usize, i: usize) -> C64 {
        let unit = if (p + q).is_multiple_of(2) { ONE } else { -I };
        let sign = if (q - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        unit * sign * (factorial(i) / factorial(k + i))
    }

    /// Generalized Hodge star, `(p, q) → (n - q, n - p)`, with `** = (-1)^{p+q}`.
    pub fn star(&self, x: &Homog) -> Result<Homog> {
        let d = self.decompose(x)?;
        let (lp, lq) = match d.side {
            Side::Low => (x.p, x.q),
            Side::High => (self.n - x.q, self.n - x.p),
        };
        let (tp, tq) = (self.n - x.q, self.n - x.p);
        let mut acc = Homog::zero(&self.alg, tp, tq);
        for (i, a) in d.components.iter().enumerate() {
            let c = Self::star_coefficient(lp, lq, d.k, i);
            let term = match d.side {
                Side::Low => self.alg.mul(a, &self.nu_omega_power(d.k + i)).scale(c),
                Side::High => {
                    let sign = if (lp + lq) % 2 == 0 { 1.0 } else { -1.0 };
                    self.alg.mul(a, &self.omega_power(i)).scale(C64::new(sign, 0.0) / c)
                }
            };
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// `Λ(Σ ω^i α_i) = Σ_{i≥1} i(k+i+1) ω^{i-1} α_i` on `p + q ≤ n - r`.
    pub fn lambda(&self, x: &Homog) -> Result<Homog> {
        self.require_verified()?;
        self.check_element(x)?;
        if x.p + x.q + self.r > self.n {
            return Err(Error::DegreeOutOfRange(format!(
                "Λ is defined for p + q ≤ n - r, got ({},{})",
                x.p, x.q
            )));
        }
        if x.p == 0 || x.q == 0 {
            let (tp, tq) = (x.p.saturating_sub(1), x.q.saturating_sub(1));
            return Ok(Homog::zero(&self.alg, tp, tq));
        }
        let d = self.decompose(x)?;
        let mut acc = Homog::zero(&self.alg, x.p - 1, x.q - 1);
        for (i, a) in d.components.iter().enumerate().skip(1) {
            let c = (i * (d.k + i + 1)) as f64;
            acc = acc.add(&self.alg.mul(a, &self.omega_power(i - 1)).scale(C64::new(c, 0.0)));
        }
        Ok(acc)
    }

    /// `[Λ, L] x = Λ L x - L Λ x` on `p + q ≤ n - r - 2`.
    pub fn commutator(&self, x: &Homog) -> Result<Homog> {
        if x.p + x.q + self.r + 2 > self.n {
            return Err(Error::DegreeOutOfRange(format!(
                "[Λ, L] needs p + q ≤ n - r - 2, got ({},{})",
                x.p, x.q
            )));
        }
        let lam_l = self.lambda(&self.lefschetz(x))?;
        if x.p == 0 || x.q == 0 {
            return Ok(lam_l);
        }
        let l_lam = self.lefschetz(&self.lambda(x)?);
        Ok(lam_l.sub(&l_lam))
    }

    /// `|x|^2` from the decomposition: weighted sum of primitive Hermitian forms.
    pub fn metric_sq(&self, x: &Homog) -> Result<f64> {
        let d = self.decompose(x)?;
        let sys_weights: Vec<f64> = (0..d.components.len())
            .map(|i| match d.side {
                Side::Low => factorial(i) / factorial(d.k + i),
                Side::High => factorial(d.k + i) / factorial(i),
            })
            .collect();
        let mut total = 0.0;
        for (i, a) in d.components.iter().enumerate() {
            total += sys_weights[i] * self.hermitian_form(a, a, d.k + 2 * i)?.re;
        }
        Ok(total)
    }

    pub fn metric(&self, x: &Homog) -> Result<f64> {
        Ok(self.metric_sq(x)?.max(0.0).sqrt())
    }

    /// Hermitian matrix `M` on `(p, q)` with `|x|^2 = x* M x`.
    pub fn metric_matrix(&self, p: usize, q: usize) -> Result<CMatrix> {
        self.require_verified()?;
        let sys = self.system(p, q)?;
        let weights = self.metric_weights(&sys);
        let blocks: Vec<CMatrix> = (0..sys.blocks.len())
            .map(|i| {
                let g = self.primitive_gram(sys.low.0 - i, sys.low.1 - i).expect("cached");
                g.scale(C64::new(weights[i], 0.0))
            })
            .collect();
        let d = CMatrix::block_diag(&blocks);
        let dim = sys.s.rows();
        let s_inv = numkernel::solve_many_with(
            &sys.s,
            &CMatrix::identity(dim),
            self.certificate.tolerance.rank_policy(),
        )
        .map_err(|e| match e {
            NumError::SingularSystem { ratio } => {
                Error::CertificateInconsistency(format!("Lefschetz block system is singular (ratio {ratio:.3e})"))
            }
            other => other.into(),
        })?;
        Ok(s_inv.adjoint().matmul(&d).matmul(&s_inv).hermitian_part())
    }

    /// `∫ x · *ȳ`.
    pub fn star_inner(&self, x: &Homog, y: &Homog) -> Result<C64> {
        let s = self.star(&self.alg.conj(y))?;
        Ok(self.alg.integrate(&self.alg.mul(x, &s)))
    }
}

type DegreeCheck = (CertificateEntry, Primitive, Option<Failure>);

fn check_degree<A: BigradedAlgebra>(
    alg: &A,
    nu_omega_pows: &[Homog],
    n: usize,
    p: usize,
    q: usize,
    k: usize,
    tol: &VerifyTolerance,
) -> Result<DegreeCheck> {
    let mut failure = None;
    let dim = alg.dim(p, q);

    // hard Lefschetz: -∧νω^k : (p,q) → (n-q, n-p)
    let lef = alg.mul_matrix(&nu_omega_pows[k], p, q);
    let sv = numkernel::singular_values(&lef);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = if sv.len() < dim {
        0.0
    } else {
        sv.last().copied().unwrap_or(0.0)
    };
    let tau = tol.rank_policy().tau(lef.rows(), lef.cols());
    let rank = if smax == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > tau * smax).count()
    };
    let full = lef.rows() == dim && rank == dim;
    if !full {
        failure = Some(Failure {
            p,
            q,
            k,
            kind: FailureKind::HardLefschetz,
            margin: if smax > 0.0 { smin / smax } else { 0.0 },
        });
    }

    // primitive space and restricted Hodge-Riemann form
    let basis = numkernel::nullspace(&alg.mul_matrix(&nu_omega_pows[k + 1], p, q), tol.rank_policy())?;
    let h = hermitian_form_matrix(alg, &nu_omega_pows[k], n, p, q);
    let raw = basis.adjoint().matmul(&h).matmul(&basis);
    let defect = raw.hermitian_defect();
    let gram = raw.hermitian_part();
    let (lambda_min, gram_norm) = if basis.cols() == 0 {
        (None, None)
    } else {
        let eig = numkernel::hermitian_eigen(&gram)?;
        let lmin = eig.values[0];
        let norm = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if failure.is_none() && !(lmin > tol.positivity * norm && norm > 0.0) {
            failure = Some(Failure {
                p,
                q,
                k,
                kind: FailureKind::HodgeRiemann,
                margin: if norm > 0.0 { lmin / norm } else { f64::NEG_INFINITY },
            });
        }
        (Some(lmin), Some(norm))
    };
    let entry = CertificateEntry {
        p,
        q,
        k,
        rank,
        full,
        sigma_min: (dim > 0).then_some(smin),
        sigma_max: (dim > 0).then_some(smax),
        primitive_dim: basis.cols(),
        lambda_min_primitive: lambda_min,
        gram_norm,
        gram_hermitian_defect: (basis.cols() > 0).then_some(defect),
    };
    Ok((entry, Primitive { basis, gram }, failure))
}

/// `H` with `⟨x, y⟩_g = y* H x` for `⟨x, y⟩_g = (-1)^q i^{(p+q)^2} ∫ x · ȳ · g`.
pub fn hermitian_form_matrix<A: BigradedAlgebra + ?Sized>(alg: &A, g: &Homog, n: usize, p: usize, q: usize) -> CMatrix {
    debug_assert_eq!(p + g.p, n - q);
    let pi = alg.pairing_matrix(p, q);
    let w = alg.mul_matrix(g, q, p);
    let c = alg.conj_matrix(p, q);
    pi.matmul(&w).matmul(&c).scale(hr_sign(p, q)).transpose()
}
