//! Hodge-Riemann pairs `(ν, ω)` on a complex vector space.
//!
//! `ν` is a real `(r, r)`-form and `ω` a strictly positive (1,1)-form. The
//! integral `∫_V γ` of a top form is the constant `c` with `γ = c · ω^n/n!`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{self, mask_indices, wedge_sign, ExteriorContext, Form, PositiveForm};
use crate::hodge::{BigradedAlgebra, Certificate, HodgeRiemannPair, Homog, Side, VerifyTolerance};
use crate::numkernel::{CMatrix, C64, ONE};

/// `Λ^{*,*}V` with the integral normalized by a fixed volume coefficient.
#[derive(Debug, Clone)]
pub struct LocalAlgebra {
    ctx: Arc<ExteriorContext>,
    volume: C64,
}

impl LocalAlgebra {
    /// Integral normalized so that `∫ ω^n/n! = 1`.
    pub fn new(omega: &PositiveForm) -> Result<Self> {
        if !omega.is_strict() {
            return Err(Error::NotStrictlyPositive {
                lambda_min: omega.lambda_min(),
            });
        }
        Ok(Self {
            ctx: omega.ctx().clone(),
            volume: exterior::volume_coefficient(omega),
        })
    }

    pub fn ctx(&self) -> &Arc<ExteriorContext> {
        &self.ctx
    }

    pub fn to_homog(&self, f: &Form) -> Result<Homog> {
        if f.n() != self.ctx.n() {
            return Err(Error::ContextMismatch {
                left: f.n(),
                right: self.ctx.n(),
            });
        }
        Ok(Homog::new(f.p(), f.q(), f.coeffs().to_vec()))
    }

    pub fn to_form(&self, h: Homog) -> Result<Form> {
        Form::from_coeffs(&self.ctx, h.p, h.q, h.coords)
    }
}

impl BigradedAlgebra for LocalAlgebra {
    fn top(&self) -> usize {
        self.ctx.n()
    }

    fn dim(&self, p: usize, q: usize) -> usize {
        self.ctx.dim(p, q)
    }

    fn mul_matrix(&self, g: &Homog, p: usize, q: usize) -> CMatrix {
        if g.coords.is_empty() {
            return CMatrix::zeros(self.ctx.dim(p + g.p, q + g.q), self.ctx.dim(p, q));
        }
        self.ctx.mul_matrix_coeffs(g.p, g.q, &g.coords, p, q)
    }

    fn conj_matrix(&self, p: usize, q: usize) -> CMatrix {
        self.ctx.conj_matrix(p, q)
    }

    fn integral(&self, top: &[C64]) -> C64 {
        top[0] / self.volume
    }

    fn unit(&self) -> Homog {
        Homog::new(0, 0, vec![ONE])
    }

    fn pairing_matrix(&self, p: usize, q: usize) -> CMatrix {
        let n = self.ctx.n();
        let full = (1u32 << n) - 1;
        let d = self.ctx.dim(p, q);
        let mut m = CMatrix::zeros(d, self.ctx.dim(n - p, n - q));
        for u in 0..d {
            let (i, j) = self.ctx.pair_at(p, q, u);
            let (ic, jc) = (full & !i, full & !j);
            let s = wedge_sign(i, j, ic, jc).expect("complementary indices");
            m[(u, self.ctx.index(ic, jc))] = C64::new(s, 0.0) / self.volume;
        }
        m
    }
}

/// A local Hodge-Riemann pair with its verification certificate.
#[derive(Debug, Clone)]
pub struct HRPairLocal {
    nu: Form,
    omega: PositiveForm,
    engine: HodgeRiemannPair<LocalAlgebra>,
}

/// Lefschetz decomposition of a form.
#[derive(Debug, Clone)]
pub struct PrimitiveDecomposition {
    pub p: usize,
    pub q: usize,
    pub side: Side,
    pub k: usize,
    /// `components[i]` lies in `P^{p'-i, q'-i}`, `(p', q')` the low-side degree.
    pub components: Vec<Form>,
    pub residual: f64,
}

/// Verifies `(ν, ω)`. Failure is reported in the certificate, not as an error.
pub fn verify_hr_pair(nu: &Form, omega: &PositiveForm) -> Result<HRPairLocal> {
    verify_hr_pair_with(nu, omega, VerifyTolerance::default())
}

/// [`verify_hr_pair`] with explicit thresholds, recorded in the certificate.
pub fn verify_hr_pair_with(nu: &Form, omega: &PositiveForm, tol: VerifyTolerance) -> Result<HRPairLocal> {
    let alg = LocalAlgebra::new(omega)?;
    verify_with_algebra(nu, omega, alg, tol)
}

fn verify_with_algebra(
    nu: &Form,
    omega: &PositiveForm,
    alg: LocalAlgebra,
    tol: VerifyTolerance,
) -> Result<HRPairLocal> {
    if nu.n() != omega.n() {
        return Err(Error::ContextMismatch {
            left: nu.n(),
            right: omega.n(),
        });
    }
    if !exterior::is_real(nu)? {
        return Err(Error::InvalidInput("ν must be a real (r,r)-form".into()));
    }
    let nu_h = alg.to_homog(nu)?;
    let omega_h = alg.to_homog(&omega.to_form())?;
    let engine = HodgeRiemannPair::verify_with(alg, nu_h, omega_h, tol)?;
    Ok(HRPairLocal {
        nu: nu.clone(),
        omega: omega.clone(),
        engine,
    })
}

/// `ν = ω_1 ∧ ... ∧ ω_r` (the unit form for an empty list).
pub fn product_form(ctx: &Arc<ExteriorContext>, forms: &[PositiveForm]) -> Result<Form> {
    let fs: Vec<Form> = forms.iter().map(PositiveForm::to_form).collect();
    exterior::wedge_all(ctx, &fs)
}

/// `L α = α ∧ ω`.
pub fn lefschetz(alpha: &Form, omega: &PositiveForm) -> Result<Form> {
    exterior::wedge(alpha, &omega.to_form())
}

impl HRPairLocal {
    pub fn certificate(&self) -> &Certificate {
        self.engine.certificate()
    }

    pub fn is_verified(&self) -> bool {
        self.engine.is_verified()
    }

    pub fn n(&self) -> usize {
        self.engine.n()
    }

    pub fn r(&self) -> usize {
        self.engine.r()
    }

    pub fn nu(&self) -> &Form {
        &self.nu
    }

    pub fn omega(&self) -> &PositiveForm {
        &self.omega
    }

    pub fn engine(&self) -> &HodgeRiemannPair<LocalAlgebra> {
        &self.engine
    }

    fn alg(&self) -> &LocalAlgebra {
        self.engine.algebra()
    }

    fn h(&self, f: &Form) -> Result<Homog> {
        self.alg().to_homog(f)
    }

    fn f(&self, h: Homog) -> Result<Form> {
        self.alg().to_form(h)
    }

    pub fn side(&self, p: usize, q: usize) -> Result<Side> {
        self.engine.side(p, q)
    }

    /// `L α = α ∧ ω`.
    pub fn lefschetz(&self, alpha: &Form) -> Result<Form> {
        lefschetz(alpha, &self.omega)
    }

    /// `Λ α`, defined for `p + q ≤ n - r`.
    pub fn lambda(&self, alpha: &Form) -> Result<Form> {
        let out = self.engine.lambda(&self.h(alpha)?)?;
        self.f(out)
    }

    /// `[Λ, L] α`, defined for `p + q ≤ n - r - 2`.
    pub fn commutator(&self, alpha: &Form) -> Result<Form> {
        let out = self.engine.commutator(&self.h(alpha)?)?;
        self.f(out)
    }

    /// `⟨α, β⟩_{νω^k}`, requires `p + q + k + r = n`.
    pub fn hermitian_form(&self, alpha: &Form, beta: &Form, k: usize) -> Result<C64> {
        self.engine.hermitian_form(&self.h(alpha)?, &self.h(beta)?, k)
    }

    /// Orthonormal basis of `P^{p,q}` as forms.
    pub fn primitive_subspace(&self, p: usize, q: usize) -> Result<Vec<Form>> {
        let b = self.engine.primitive_basis(p, q)?;
        (0..b.cols())
            .map(|j| Form::from_coeffs(self.nu.ctx(), p, q, b.column(j)))
            .collect()
    }

    pub fn decompose(&self, alpha: &Form) -> Result<PrimitiveDecomposition> {
        let d = self.engine.decompose(&self.h(alpha)?)?;
        Ok(PrimitiveDecomposition {
            p: d.p,
            q: d.q,
            side: d.side,
            k: d.k,
            components: d.components.into_iter().map(|c| self.f(c)).collect::<Result<_>>()?,
            residual: d.residual,
        })
    }

    /// `Σ ω^i α_i` or `Σ νω^{k+i} α_i`.
    pub fn recompose(&self, d: &PrimitiveDecomposition) -> Result<Form> {
        let mut acc = Form::zero(self.nu.ctx(), d.p, d.q)?;
        let omega = self.omega.to_form();
        for (i, a) in d.components.iter().enumerate() {
            let g = match d.side {
                Side::Low => exterior::wedge_power(&omega, i)?,
                Side::High => exterior::wedge(&self.nu, &exterior::wedge_power(&omega, d.k + i)?)?,
            };
            acc = acc.add(&exterior::wedge(a, &g)?)?;
        }
        Ok(acc)
    }

    pub fn hodge_star(&self, alpha: &Form) -> Result<Form> {
        let out = self.engine.star(&self.h(alpha)?)?;
        self.f(out)
    }

    /// `|α|_{(ν,ω)}` from the weighted primitive Hermitian forms.
    pub fn local_metric(&self, alpha: &Form) -> Result<f64> {
        self.engine.metric(&self.h(alpha)?)
    }

    /// `(α, β) = ∫ α ∧ *β̄`.
    pub fn star_inner(&self, alpha: &Form, beta: &Form) -> Result<C64> {
        self.engine.star_inner(&self.h(alpha)?, &self.h(beta)?)
    }

    /// `|α|_{(ν,ω)}` evaluated as `sqrt(∫ α ∧ *ᾱ)`.
    pub fn star_metric(&self, alpha: &Form) -> Result<f64> {
        Ok(self.star_inner(alpha, alpha)?.re.max(0.0).sqrt())
    }

    /// Hermitian `M` with `|α|^2 = α* M α` on `Λ^{p,q}`.
    pub fn metric_matrix(&self, p: usize, q: usize) -> Result<CMatrix> {
        self.engine.metric_matrix(p, q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescalingReport {
    pub lambda: f64,
    pub p: usize,
    pub q: usize,
    pub side: Side,
    /// `|α|²_{(λν,ω)} / |α|²_{(ν,ω)}`.
    pub ratio_nu: f64,
    pub expected_nu: f64,
    /// `|α|²_{(λ^r ν, λω)} / |α|²_{(ν,ω)}` with the integral of `ω` held fixed.
    pub ratio_both: f64,
    pub expected_both: f64,
    pub rel_err_nu: f64,
    pub rel_err_both: f64,
    pub pass: bool,
}

/// Relative tolerance of [`metric_rescaling_check`].
pub const RESCALING_TOL: f64 = 1e-10;

/// Checks `|α|²_{(λν,ω)} = λ^{±1}|α|²` and `|α|²_{(λ^r ν,λω)} = λ^{n-p-q}|α|²`.
///
/// The second law compares metrics against one fixed volume form (that of
/// `ω`); measuring `λω` against its own volume would add a factor `λ^{-n}`.
pub fn metric_rescaling_check(pair: &HRPairLocal, lambda: f64, alpha: &Form) -> Result<RescalingReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("λ must be positive, got {lambda}")));
    }
    let (n, r) = (pair.n(), pair.r());
    let (p, q) = alpha.bidegree();
    let side = pair.side(p, q)?;
    let base = pair.local_metric(alpha)?.powi(2);
    if base == 0.0 {
        return Err(Error::InvalidInput("rescaling check needs a nonzero form".into()));
    }
    let l = C64::new(lambda, 0.0);

    let scaled_nu = pair.nu.scale(l);
    let p1 = verify_hr_pair(&scaled_nu, &pair.omega)?;
    let ratio_nu = p1.local_metric(alpha)?.powi(2) / base;
    let expected_nu = match side {
        Side::Low => lambda,
        Side::High => 1.0 / lambda,
    };

    let nu2 = pair.nu.scale(C64::new(lambda.powi(r as i32), 0.0));
    let omega2 = pair.omega.scaled(lambda)?;
    let fixed_volume = LocalAlgebra::new(&pair.omega)?;
    let p2 = verify_with_algebra(&nu2, &omega2, fixed_volume, VerifyTolerance::default())?;
    let ratio_both = p2.local_metric(alpha)?.powi(2) / base;
    let expected_both = lambda.powi(n as i32 - (p + q) as i32);

    let rel_err_nu = (ratio_nu - expected_nu).abs() / expected_nu;
    let rel_err_both = (ratio_both - expected_both).abs() / expected_both;
    Ok(RescalingReport {
        lambda,
        p,
        q,
        side,
        ratio_nu,
        expected_nu,
        ratio_both,
        expected_both,
        rel_err_nu,
        rel_err_both,
        pass: rel_err_nu <= RESCALING_TOL && rel_err_both <= RESCALING_TOL,
    })
}

/// Mask helper used by tests and sweeps: the form `dz^I ∧ dz̄^J` with coefficient `c`.
pub fn basis_form(ctx: &Arc<ExteriorContext>, i: u32, j: u32, c: C64) -> Result<Form> {
    Form::monomial(ctx, &mask_indices(i), &mask_indices(j), c)
}

/// The zero form of bidegree `(p, q)`.
pub fn zero_form(ctx: &Arc<ExteriorContext>, p: usize, q: usize) -> Result<Form> {
    Form::zero(ctx, p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{conjugate, wedge_power};
    use crate::hodge::FailureKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn ctx(n: usize) -> Arc<ExteriorContext> {
        ExteriorContext::new(n).unwrap()
    }

    fn random_positive(cx: &Arc<ExteriorContext>, rng: &mut ChaCha8Rng) -> PositiveForm {
        let n = cx.n();
        let a = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let h = a
            .adjoint()
            .matmul(&a)
            .add(&CMatrix::identity(n).scale(C64::new(0.2, 0.0)));
        PositiveForm::new(cx, h).unwrap()
    }

    fn random_pair(n: usize, r: usize, rng: &mut ChaCha8Rng) -> HRPairLocal {
        let cx = ctx(n);
        let forms: Vec<PositiveForm> = (0..r).map(|_| random_positive(&cx, rng)).collect();
        let nu = product_form(&cx, &forms).unwrap();
        let omega = random_positive(&cx, rng);
        verify_hr_pair(&nu, &omega).unwrap()
    }

    fn rel(a: &Form, b: &Form) -> f64 {
        a.sub(b).unwrap().coeff_norm() / b.coeff_norm().max(1e-300)
    }

    #[test]
    fn classical_pair_verifies() {
        for n in 1..=4 {
            let cx = ctx(n);
            let pair = verify_hr_pair(&Form::one(&cx), &PositiveForm::standard(&cx)).unwrap();
            assert!(pair.is_verified(), "n = {n}: {:?}", pair.certificate().first_failure);
        }
    }

    #[test]
    fn degenerate_nu_fails_hard_lefschetz() {
        let cx = ctx(2);
        let nu = Form::monomial(&cx, &[0], &[0], C64::new(0.0, 1.0)).unwrap();
        let pair = verify_hr_pair(&nu, &PositiveForm::standard(&cx)).unwrap();
        assert!(!pair.is_verified());
        let f = pair.certificate().first_failure.clone().unwrap();
        assert_eq!(f.kind, FailureKind::HardLefschetz);
        assert_eq!((f.p, f.q, f.k), (0, 1, 0));
        assert!(matches!(
            pair.local_metric(&Form::one(&cx)),
            Err(Error::PairNotVerified(_))
        ));
    }

    #[test]
    fn hermitian_form_examples() {
        for n in 1..=3 {
            let cx = ctx(n);
            let pair = verify_hr_pair(&Form::one(&cx), &PositiveForm::standard(&cx)).unwrap();
            let one = Form::one(&cx);
            let fact: f64 = (1..=n).map(|x| x as f64).product();
            assert!((pair.hermitian_form(&one, &one, n).unwrap() - C64::new(fact, 0.0)).norm() < 1e-12);
        }
        let cx = ctx(1);
        let pair = verify_hr_pair(&Form::one(&cx), &PositiveForm::standard(&cx)).unwrap();
        let dz = Form::monomial(&cx, &[0], &[], ONE).unwrap();
        assert!((pair.hermitian_form(&dz, &dz, 0).unwrap() - ONE).norm() < 1e-14);
        assert!(matches!(
            pair.hermitian_form(&dz, &dz, 1),
            Err(Error::DegreeOutOfRange(_))
        ));
    }

    #[test]
    fn hermitian_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pair = random_pair(3, 1, &mut rng);
        let cx = pair.nu().ctx().clone();
        let a = Form::random(&cx, 1, 0, &mut rng).unwrap();
        let b = Form::random(&cx, 1, 0, &mut rng).unwrap();
        let ab = pair.hermitian_form(&a, &b, 1).unwrap();
        let ba = pair.hermitian_form(&b, &a, 1).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12 * ab.norm().max(1.0));
    }

    #[test]
    fn primitive_examples() {
        let cx = ctx(2);
        let pair = verify_hr_pair(&Form::one(&cx), &PositiveForm::standard(&cx)).unwrap();
        assert_eq!(pair.primitive_subspace(0, 0).unwrap().len(), 1);
        assert_eq!(pair.primitive_subspace(1, 1).unwrap().len(), 3);
        let a = Form::monomial(&cx, &[0], &[0], ONE)
            .unwrap()
            .sub(&Form::monomial(&cx, &[1], &[1], ONE).unwrap())
            .unwrap();
        assert!(pair.lefschetz(&a).unwrap().is_zero());
        let d = pair.decompose(&a).unwrap();
        assert!(d.components[1].coeff_norm() < 1e-12);
        assert!(rel(&d.components[0], &a) < 1e-12);
        assert!(matches!(pair.primitive_subspace(2, 1), Err(Error::DegreeOutOfRange(_))));
        for n in 2..=4 {
            let cx = ctx(n);
            let pair = verify_hr_pair(&Form::one(&cx), &PositiveForm::standard(&cx)).unwrap();
            assert_eq!(pair.primitive_subspace(1, 1).unwrap().len(), n * n - 1);
        }
    }

    #[test]
    fn decompose_omega() {
        let cx = ctx(2);
        let om = PositiveForm::standard(&cx);
        let pair = verify_hr_pair(&Form::one(&cx), &om).unwrap();
        let d = pair.decompose(&om.to_form()).unwrap();
        assert_eq!(d.side, Side::Low);
        assert!(d.components[0].coeff_norm() < 1e-12);
        assert!((d.components[1].coeffs()[0] - ONE).norm() < 1e-12);
    }

    #[test]
    fn lambda_examples() {
        let cx = ctx(2);
        let om = PositiveForm::standard(&cx);
        let pair = verify_hr_pair(&Form::one(&cx), &om).unwrap();
        let l1 = pair.lambda(&Form::one(&cx)).unwrap();
        assert!(l1.is_zero());
        let lw = pair.lambda(&om.to_form()).unwrap();
        assert!((lw.coeffs()[0] - C64::new(2.0, 0.0)).norm() < 1e-12);
        let top = wedge_power(&om.to_form(), 2).unwrap();
        assert!(matches!(pair.lambda(&top), Err(Error::DegreeOutOfRange(_))));
    }

    #[test]
    fn star_examples() {
        for n in 1..=3 {
            let cx = ctx(n);
            let om = PositiveForm::standard(&cx);
            let pair = verify_hr_pair(&Form::one(&cx), &om).unwrap();
            let s = pair.hodge_star(&Form::one(&cx)).unwrap();
            let fact: f64 = (1..=n).map(|x| x as f64).product();
            let vol = wedge_power(&om.to_form(), n).unwrap().scale(C64::new(1.0 / fact, 0.0));
            assert!(rel(&s, &vol) < 1e-12);
        }
        let cx = ctx(1);
        let pair = verify_hr_pair(&Form::one(&cx), &PositiveForm::standard(&cx)).unwrap();
        let dz = Form::monomial(&cx, &[0], &[], ONE).unwrap();
        let s = pair.hodge_star(&dz).unwrap();
        assert!(rel(&s, &dz.scale(C64::new(0.0, -1.0))) < 1e-14);
    }

    #[test]
    fn operator_identities_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for (n, r) in [(2, 0), (3, 1), (3, 0), (4, 1), (4, 2)] {
            let pair = random_pair(n, r, &mut rng);
            assert!(pair.is_verified());
            let cx = pair.nu().ctx().clone();
            for p in 0..=n {
                for q in 0..=n {
                    if pair.side(p, q).is_err() {
                        continue;
                    }
                    let a = Form::random(&cx, p, q, &mut rng).unwrap();
                    let ss = pair.hodge_star(&pair.hodge_star(&a).unwrap()).unwrap();
                    let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                    assert!(rel(&ss, &a.scale(C64::new(sign, 0.0))) < 1e-10, "** at ({p},{q})");
                    let m = pair.local_metric(&a).unwrap();
                    let ms = pair.star_metric(&a).unwrap();
                    assert!((m - ms).abs() < 1e-9 * m, "metric at ({p},{q}): {m} vs {ms}");
                    let sm = pair.local_metric(&pair.hodge_star(&a).unwrap()).unwrap();
                    assert!((sm - m).abs() < 1e-9 * m, "isometry at ({p},{q})");
                    let d = pair.decompose(&a).unwrap();
                    assert!(rel(&pair.recompose(&d).unwrap(), &a) < 1e-9);
                    if p + q + r + 2 <= n {
                        let c = pair.commutator(&a).unwrap();
                        let k = (n - r - p - q) as f64;
                        assert!(rel(&c, &a.scale(C64::new(k, 0.0))) < 1e-10, "[Λ,L] at ({p},{q})");
                    }
                }
            }
        }
    }

    #[test]
    fn classical_metric_matches_pointwise_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for n in 1..=4 {
            let pair = random_pair(n, 0, &mut rng);
            let cx = pair.nu().ctx().clone();
            for p in 0..=n {
                for q in 0..=n {
                    let a = Form::random(&cx, p, q, &mut rng).unwrap();
                    let m = pair.local_metric(&a).unwrap();
                    let pw = exterior::norm_omega(&a, pair.omega()).unwrap();
                    assert!((m - pw).abs() < 1e-9 * pw, "n={n} ({p},{q}): {m} vs {pw}");
                }
            }
        }
    }

    #[test]
    fn metric_of_one_is_one() {
        let cx = ctx(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let om = random_positive(&cx, &mut rng);
        let pair = verify_hr_pair(&Form::one(&cx), &om).unwrap();
        assert!((pair.local_metric(&Form::one(&cx)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rescaling_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let pair = random_pair(3, 1, &mut rng);
        let cx = pair.nu().ctx().clone();
        for (p, q) in [(1, 0), (1, 1), (2, 2), (3, 1)] {
            let a = Form::random(&cx, p, q, &mut rng).unwrap();
            for lambda in [1.0, 0.5, 2.0, 3.0] {
                let rep = metric_rescaling_check(&pair, lambda, &a).unwrap();
                assert!(rep.pass, "{rep:?}");
            }
        }
    }

    #[test]
    fn conjugation_commutes_with_star() {
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        let pair = random_pair(3, 1, &mut rng);
        let cx = pair.nu().ctx().clone();
        let a = Form::random(&cx, 1, 0, &mut rng).unwrap();
        let lhs = conjugate(&pair.hodge_star(&a).unwrap());
        let rhs = pair.hodge_star(&conjugate(&a)).unwrap();
        // ν and ω are real, so * commutes with conjugation
        assert!(rel(&lhs, &rhs) < 1e-10);
    }
}
