//! Seeded sweeps probing the local comparison inequalities between metrics.
//!
//! Every sample draws its randomness from a seed derived from the sweep seed
//! and the sample index, so samples run in parallel and the report is
//! identical for identical configurations.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{self, ExteriorContext, Form, PositiveForm};
use crate::hodge::VerifyTolerance;
use crate::lefschetz::{self, HRPairLocal};
use crate::numkernel::{self, CMatrix, TolPolicy, C64};

/// Largest dimension a sweep accepts.
pub const MAX_SWEEP_DIM: usize = 6;

/// Slack admitted by the triangle sweep.
pub const TRIANGLE_SLACK: f64 = 1e-9;

/// Minimal log-log slope of `|ν_ε α|²` against `ε` near the bottom of the grid.
pub const MIN_SLOPE: f64 = 0.9;

/// Number of smallest grid points used in the slope fit.
pub const SLOPE_POINTS: usize = 3;

/// `ρ` over the lower half of the grid may exceed its upper-half maximum by at most this factor.
pub const BOUNDEDNESS_FACTOR: f64 = 2.0;

/// Thresholds for certifying `ν_ε`.
///
/// The Lefschetz and primitive-Gram margins of `ν_ε` shrink like `ε²`, so the
/// default thresholds reject the bottom of the grid. These stay three orders
/// above double-precision round-off.
pub const PERTURBED_TOL: VerifyTolerance = VerifyTolerance {
    rank: Some(1e-13),
    positivity: 1e-13,
    decomposition: 1e-6,
};

/// Geometric grid from `1e-1` down to `1e-6`, 11 points, strictly decreasing.
pub fn default_eps_grid() -> Vec<f64> {
    (0..11).map(|i| 10f64.powf(-1.0 - 0.5 * i as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    /// Target dimension of the linear map in the kernel sweep.
    pub m: usize,
    pub seed: u64,
    pub samples: usize,
    pub eps_grid: Vec<f64>,
    /// Bound on `λ_max / λ_min` of random positive forms.
    pub conditioning: f64,
}

impl SweepConfig {
    pub fn new(n: usize, r: usize, seed: u64, samples: usize) -> Self {
        Self {
            n,
            r,
            s: 0,
            m: 1,
            seed,
            samples,
            eps_grid: default_eps_grid(),
            conditioning: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_SWEEP_DIM {
            return Err(Error::InvalidInput(format!(
                "sweep dimension must lie in 1..={MAX_SWEEP_DIM}, got {}",
                self.n
            )));
        }
        if self.r > self.n {
            return Err(Error::InvalidInput(format!("r = {} exceeds n = {}", self.r, self.n)));
        }
        if self.s > self.r {
            return Err(Error::InvalidInput(format!("s = {} exceeds r = {}", self.s, self.r)));
        }
        if self.samples == 0 {
            return Err(Error::InvalidInput("sample count must be positive".into()));
        }
        if !(self.conditioning >= 1.0 && self.conditioning.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "conditioning must be a finite number ≥ 1, got {}",
                self.conditioning
            )));
        }
        let g = &self.eps_grid;
        if g.len() < SLOPE_POINTS
            || g.iter().any(|&e| !(e > 0.0 && e.is_finite()))
            || g.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::InvalidInput(format!(
                "ε grid must hold at least {SLOPE_POINTS} positive, strictly decreasing values"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Local1,
    Local2,
    Eliminate,
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    /// Comparability constant.
    #[serde(rename = "N")]
    pub n_const: f64,
    pub ratio: f64,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norms_sq: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounded: Option<bool>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedSample {
    pub index: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub max_ratio: f64,
    pub median_ratio: f64,
    /// Empirical constant (definition depends on the sweep).
    pub c_emp: Option<f64>,
    /// The same constant over the first half of the samples.
    pub c_emp_half: Option<f64>,
    /// `|c_emp - c_emp_half| / c_emp`.
    pub stability: Option<f64>,
    pub violations: usize,
    pub min_slope: Option<f64>,
    pub eps_floor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub kind: SweepKind,
    pub config: SweepConfig,
    pub records: Vec<SampleRecord>,
    pub skipped: Vec<SkippedSample>,
    pub summary: Summary,
    pub pass: bool,
    pub verdict: String,
}

impl SweepReport {
    /// One row per sample: `seed,n,r,s,N,ratio,margin`.
    pub fn to_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row {
            seed: u64,
            n: usize,
            r: usize,
            s: usize,
            #[serde(rename = "N")]
            n_const: f64,
            ratio: f64,
            margin: f64,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for rec in &self.records {
            w.serialize(Row {
                seed: rec.seed,
                n: rec.n,
                r: rec.r,
                s: rec.s,
                n_const: rec.n_const,
                ratio: rec.ratio,
                margin: rec.margin,
            })
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based seed splitting: independent stream `stream` of `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

/// A random surjection `V → W` with orthonormal rows.
pub fn gen_partial_isometry(seed: u64, m: usize, n: usize) -> Result<CMatrix> {
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("need 1 ≤ m ≤ n, got m = {m}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(&mut rng));
    Ok(numkernel::qr_unitary(&g)?.adjoint().rows_range(0..m))
}

/// `H = U diag(λ) U*` with a seeded unitary `U` and `λ` log-uniform in `[1/conditioning, 1]`.
pub fn gen_positive_form(seed: u64, ctx: &Arc<ExteriorContext>, conditioning: f64) -> Result<PositiveForm> {
    if !(conditioning >= 1.0 && conditioning.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "conditioning must be ≥ 1, got {conditioning}"
        )));
    }
    let n = ctx.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(&mut rng));
    let u = numkernel::qr_unitary(&g)?;
    let log_c = conditioning.ln();
    let lambdas: Vec<f64> = (0..n).map(|_| (-rng.random::<f64>() * log_c).exp()).collect();
    let h = u.matmul(&CMatrix::diag_real(&lambdas)).matmul(&u.adjoint());
    PositiveForm::new(ctx, h.hermitian_part())
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn choose_degree<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    admissible: impl Fn(usize, usize) -> bool,
) -> Option<(usize, usize)> {
    let all: Vec<(usize, usize)> = (0..=n)
        .flat_map(|p| (0..=n).map(move |q| (p, q)))
        .filter(|&(p, q)| admissible(p, q))
        .collect();
    if all.is_empty() {
        None
    } else {
        Some(all[rng.random_range(0..all.len())])
    }
}

enum Outcome {
    Record(Box<SampleRecord>),
    Skip(String),
}

struct SampleSeed {
    index: usize,
    seed: u64,
}

fn run_samples<F>(config: &SweepConfig, f: F) -> (Vec<SampleRecord>, Vec<SkippedSample>)
where
    F: Fn(&SampleSeed) -> Result<Outcome> + Sync,
{
    let outcomes: Vec<(usize, u64, Result<Outcome>)> = (0..config.samples)
        .into_par_iter()
        .map(|index| {
            let seed = derive_seed(config.seed, index as u64);
            (index, seed, f(&SampleSeed { index, seed }))
        })
        .collect();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (index, seed, out) in outcomes {
        match out {
            Ok(Outcome::Record(r)) => records.push(*r),
            Ok(Outcome::Skip(reason)) => skipped.push(SkippedSample { index, seed, reason }),
            Err(e) => skipped.push(SkippedSample {
                index,
                seed,
                reason: e.to_string(),
            }),
        }
    }
    (records, skipped)
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

fn base_summary(records: &[SampleRecord]) -> Summary {
    let mut ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    Summary {
        max_ratio: ratios.iter().copied().fold(f64::NAN, f64::max),
        median_ratio: median(&mut ratios),
        c_emp: None,
        c_emp_half: None,
        stability: None,
        violations: records.iter().filter(|r| !r.pass).count(),
        min_slope: None,
        eps_floor: None,
    }
}

/// Maximum of a per-record constant over all records and over the first half of the sample indices.
fn constant_with_half(
    records: &[SampleRecord],
    samples: usize,
    c: impl Fn(&SampleRecord) -> f64,
) -> (Option<f64>, Option<f64>, Option<f64>) {
    let full = records
        .iter()
        .map(&c)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let half = records
        .iter()
        .filter(|r| r.index < samples.div_ceil(2))
        .map(&c)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let stability = match (full, half) {
        (Some(f), Some(h)) if f > 0.0 => Some((f - h).abs() / f),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    (full, half, stability)
}

fn local_ctx(n: usize) -> Result<Arc<ExteriorContext>> {
    ExteriorContext::new(n)
}

fn random_forms(
    ctx: &Arc<ExteriorContext>,
    seed: u64,
    first_stream: u64,
    count: usize,
    cond: f64,
) -> Result<Vec<PositiveForm>> {
    (0..count)
        .map(|i| gen_positive_form(derive_seed(seed, first_stream + i as u64), ctx, cond))
        .collect()
}

fn unverified(pair: &HRPairLocal) -> Option<Outcome> {
    if pair.is_verified() {
        return None;
    }
    let detail = pair
        .certificate()
        .first_failure
        .as_ref()
        .map(|f| format!("{:?} at ({},{},{}) margin {:.3e}", f.kind, f.p, f.q, f.k, f.margin))
        .unwrap_or_default();
    Some(Outcome::Skip(format!("pair not verified: {detail}")))
}

/// Largest value of `|να|_ω / |α|_{(ν,ω)}` over `α ∈ Λ^{p,q}` (`p + q ≤ n - r`).
pub fn local1_sup_ratio(pair: &HRPairLocal, p: usize, q: usize) -> Result<f64> {
    let r = pair.r();
    let omega = pair.omega();
    let ctx = omega.ctx();
    let mul = ctx.mul_matrix(pair.nu(), p, q);
    let k = exterior::norm_matrix(omega, p + r, q + r)?.matmul(&mul);
    let a = k.adjoint().matmul(&k);
    let m = pair.metric_matrix(p, q)?;
    let (_, hi) = numkernel::generalized_eigen_range(&a.hermitian_part(), &m)?;
    Ok(hi.max(0.0).sqrt())
}

/// Sweep of `|να|_ω ≲ N^{r/2} |α|_{(ν,ω)}` for `ν = ω_1 ⋯ ω_r`, `ω_i ≤ Nω`.
///
/// Each sample records the exact supremum of the ratio over `α` at a random
/// admissible bidegree. The reported constant is `max ratio / N^{r/2}`.
pub fn sweep_local_1(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let (n, r) = (config.n, config.r);
    let ctx = local_ctx(n)?;
    let (records, skipped) = run_samples(config, |ss| {
        let omega = gen_positive_form(derive_seed(ss.seed, 0), &ctx, config.conditioning)?;
        let forms = random_forms(&ctx, ss.seed, 1, r, config.conditioning)?;
        let nu = lefschetz::product_form(&ctx, &forms)?;
        let pair = lefschetz::verify_hr_pair(&nu, &omega)?;
        if let Some(skip) = unverified(&pair) {
            return Ok(skip);
        }
        let n_const = exterior::comparability_constant(&forms, &omega)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(ss.seed, 1000));
        let (p, q) = choose_degree(n, &mut rng, |p, q| p + q + r <= n).expect("p = q = 0 is admissible");
        let ratio = local1_sup_ratio(&pair, p, q)?;
        Ok(Outcome::Record(Box::new(SampleRecord {
            index: ss.index,
            seed: ss.seed,
            n,
            r,
            s: config.s,
            m: config.m,
            p,
            q,
            n_const,
            ratio,
            margin: pair.certificate().min_positivity_margin.unwrap_or(f64::INFINITY),
            ratio_min: None,
            rho: None,
            norms_sq: None,
            slope: None,
            bounded: None,
            pass: ratio.is_finite(),
        })))
    });
    let mut summary = base_summary(&records);
    let (c, ch, st) = constant_with_half(&records, config.samples, |rec| {
        rec.ratio / rec.n_const.powf(r as f64 / 2.0)
    });
    summary.c_emp = c;
    summary.c_emp_half = ch;
    summary.stability = st;
    let pass = !records.is_empty() && records.iter().all(|r| r.pass);
    let verdict = match c {
        Some(c) => format!(
            "{} samples, ratio ≤ C·N^(r/2) with C = {c:.6} (first half {:.6}), {} skipped",
            records.len(),
            ch.unwrap_or(f64::NAN),
            skipped.len()
        ),
        None => "no samples measured".into(),
    };
    Ok(SweepReport {
        kind: SweepKind::Local1,
        config: config.clone(),
        records,
        skipped,
        summary,
        pass,
        verdict,
    })
}

/// Measurements of `|ν_ε α|²_{(ν_ε,ω)}` along an `ε` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Local2Profile {
    pub eps: Vec<f64>,
    pub norms_sq: Vec<f64>,
    /// `norms_sq / (ε |α|²_ω)`; zero for `α = 0`.
    pub rho: Vec<f64>,
    /// Least-squares slope of `ln norms_sq` against `ln ε` over the smallest grid points.
    pub slope: Option<f64>,
    pub bounded: bool,
    pub decreasing: bool,
    /// Smallest positivity margin among the perturbed pairs.
    pub margin: f64,
    /// `‖ν α‖ / ‖α‖` in coefficients, the hypothesis residual.
    pub kernel_residual: f64,
}

impl Local2Profile {
    pub fn pass(&self) -> bool {
        self.bounded && self.decreasing && self.slope.is_none_or(|s| s >= MIN_SLOPE)
    }
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let len = x.len() as f64;
    let mx = x.iter().sum::<f64>() / len;
    let my = y.iter().sum::<f64>() / len;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Evaluates `ρ(ε)` for `ν_ε = Π(π*ω_i + εω)` and a form `α` with `να = 0`.
///
/// `pullbacks` are the forms `π*ω_i` on `V`. Every perturbed pair is verified
/// before its metric is used.
pub fn local2_profile(
    pullbacks: &[PositiveForm],
    omega: &PositiveForm,
    alpha: &Form,
    eps_grid: &[f64],
) -> Result<Local2Profile> {
    let ctx = omega.ctx();
    let r = pullbacks.len();
    let nu = exterior::wedge_all(ctx, &pullbacks.iter().map(PositiveForm::to_form).collect::<Vec<_>>())?;
    let alpha_norm_sq = exterior::norm_omega(alpha, omega)?.powi(2);
    let kernel_residual = if alpha.is_zero() {
        0.0
    } else {
        exterior::wedge(&nu, alpha)?.coeff_norm() / alpha.coeff_norm()
    };
    let (p, q) = alpha.bidegree();
    if p + r > ctx.n() || q + r > ctx.n() {
        return Err(Error::DegreeOutOfRange(format!(
            "ν α leaves the algebra at ({p},{q}) with r = {r}"
        )));
    }
    let mut norms_sq = Vec::with_capacity(eps_grid.len());
    let mut rho = Vec::with_capacity(eps_grid.len());
    let mut margin = f64::INFINITY;
    for &eps in eps_grid {
        let perturbed: Vec<PositiveForm> = pullbacks
            .iter()
            .map(|f| f.add_scaled(omega, eps))
            .collect::<Result<_>>()?;
        let nu_eps = lefschetz::product_form(ctx, &perturbed)?;
        let pair = lefschetz::verify_hr_pair_with(&nu_eps, omega, PERTURBED_TOL)?;
        if !pair.is_verified() {
            let f = pair.certificate().first_failure.clone();
            return Err(Error::PairNotVerified(format!("ν_ε at ε = {eps:.1e}: {f:?}")));
        }
        margin = margin.min(pair.certificate().min_positivity_margin.unwrap_or(f64::INFINITY));
        let beta = exterior::wedge(&nu_eps, alpha)?;
        let v = pair.local_metric(&beta)?.powi(2);
        norms_sq.push(v);
        rho.push(if alpha_norm_sq > 0.0 {
            v / (eps * alpha_norm_sq)
        } else {
            0.0
        });
    }
    let len = eps_grid.len();
    let tail = len.saturating_sub(SLOPE_POINTS)..len;
    let slope = if norms_sq[tail.clone()].iter().all(|&v| v > 0.0) {
        let x: Vec<f64> = eps_grid[tail.clone()].iter().map(|e| e.ln()).collect();
        let y: Vec<f64> = norms_sq[tail].iter().map(|v| v.ln()).collect();
        Some(least_squares_slope(&x, &y))
    } else {
        None
    };
    let split = len.div_ceil(2);
    let upper = rho[..split].iter().copied().fold(0.0, f64::max);
    let lower = rho[split..].iter().copied().fold(0.0, f64::max);
    let bounded = rho.iter().all(|x| x.is_finite()) && lower <= BOUNDEDNESS_FACTOR * upper;
    let decreasing = norms_sq.last() <= norms_sq.first();
    Ok(Local2Profile {
        eps: eps_grid.to_vec(),
        norms_sq,
        rho,
        slope,
        bounded,
        decreasing,
        margin,
        kernel_residual,
    })
}

/// Sweep of `|ν_ε α|²_{(ν_ε,ω)} ≲ ε |α|²_ω` for `να = 0`, `ν = π*ω_1 ⋯ π*ω_r`.
pub fn sweep_local_2(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let (n, r, m) = (config.n, config.r, config.m);
    if m == 0 || m >= n {
        return Err(Error::InvalidInput(format!(
            "target dimension m must satisfy 1 ≤ m < n, got m = {m}"
        )));
    }
    let ctx = local_ctx(n)?;
    let ctx_w = local_ctx(m)?;
    const ATTEMPTS: u64 = 8;
    let (records, skipped) = run_samples(config, |ss| {
        let omega = gen_positive_form(derive_seed(ss.seed, 0), &ctx, config.conditioning)?;
        for attempt in 0..ATTEMPTS {
            let aseed = derive_seed(ss.seed, 100 + attempt);
            let mut rng = ChaCha8Rng::seed_from_u64(aseed);
            let pi = gen_partial_isometry(derive_seed(aseed, 0), m, n)?;
            let targets = random_forms(&ctx_w, aseed, 1, r, config.conditioning)?;
            let pullbacks: Vec<PositiveForm> = targets
                .iter()
                .map(|t| exterior::pullback(&pi, t, &ctx))
                .collect::<Result<_>>()?;
            let nu = exterior::wedge_all(&ctx, &pullbacks.iter().map(PositiveForm::to_form).collect::<Vec<_>>())?;
            let candidates: Vec<((usize, usize), CMatrix)> = (0..=n)
                .flat_map(|p| (0..=n).map(move |q| (p, q)))
                .filter(|&(p, q)| p + q + r >= n && p + r <= n && q + r <= n)
                .map(|(p, q)| {
                    let k = numkernel::nullspace(&ctx.mul_matrix(&nu, p, q), TolPolicy::Default)?;
                    Ok(((p, q), k))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|(_, k)| k.cols() > 0)
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let ((p, q), kernel) = &candidates[rng.random_range(0..candidates.len())];
            let g: Vec<C64> = (0..kernel.cols()).map(|_| gaussian(&mut rng)).collect();
            let mut coeffs = kernel.mul_vec(&g);
            let norm = numkernel::vec_norm(&coeffs);
            coeffs.iter_mut().for_each(|c| *c /= norm);
            let alpha = Form::from_coeffs(&ctx, *p, *q, coeffs)?;
            let prof = local2_profile(&pullbacks, &omega, &alpha, &config.eps_grid)?;
            let n_const = exterior::comparability_constant(&pullbacks, &omega)?;
            let pass = prof.pass();
            return Ok(Outcome::Record(Box::new(SampleRecord {
                index: ss.index,
                seed: ss.seed,
                n,
                r,
                s: config.s,
                m,
                p: *p,
                q: *q,
                n_const,
                ratio: prof.rho.iter().copied().fold(0.0, f64::max),
                margin: prof.margin,
                ratio_min: None,
                rho: Some(prof.rho),
                norms_sq: Some(prof.norms_sq),
                slope: prof.slope,
                bounded: Some(prof.bounded),
                pass,
            })));
        }
        Ok(Outcome::Skip(format!(
            "kernel of -∧ν empty at every admissible degree after {ATTEMPTS} draws"
        )))
    });
    let mut summary = base_summary(&records);
    summary.min_slope = records
        .iter()
        .filter_map(|r| r.slope)
        .fold(None, |m: Option<f64>, s| Some(m.map_or(s, |m| m.min(s))));
    summary.eps_floor = config.eps_grid.last().copied();
    let (c, ch, st) = constant_with_half(&records, config.samples, |rec| rec.ratio);
    summary.c_emp = c;
    summary.c_emp_half = ch;
    summary.stability = st;
    let pass = !records.is_empty() && summary.violations == 0;
    let verdict = format!(
        "{} kernel samples, {} violations, max ρ = {:.4e}, min slope = {:.4}, ε floor {:.0e}",
        records.len(),
        summary.violations,
        summary.max_ratio,
        summary.min_slope.unwrap_or(f64::NAN),
        summary.eps_floor.unwrap_or(f64::NAN)
    );
    Ok(SweepReport {
        kind: SweepKind::Local2,
        config: config.clone(),
        records,
        skipped,
        summary,
        pass,
        verdict,
    })
}

fn hermitian_sqrt(h: &CMatrix) -> Result<CMatrix> {
    let eig = numkernel::hermitian_eigen(h)?;
    let roots: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok(eig
        .vectors
        .matmul(&CMatrix::diag_real(&roots))
        .matmul(&eig.vectors.adjoint())
        .hermitian_part())
}

/// Range `(min, max)` of `|α|_{(ν,ω)} / |α|_{(μ,ω)}` over `α ∈ Λ^{p,q}`.
pub fn metric_ratio_range(nu_pair: &HRPairLocal, mu_pair: &HRPairLocal, p: usize, q: usize) -> Result<(f64, f64)> {
    let a = nu_pair.metric_matrix(p, q)?;
    let b = mu_pair.metric_matrix(p, q)?;
    let (lo, hi) = numkernel::generalized_eigen_range(&a, &b)?;
    Ok((lo.max(0.0).sqrt(), hi.max(0.0).sqrt()))
}

/// Sweep comparing `|α|_{(ν,ω)}` and `|α|_{(μ,ω)}` for `ν = ω_1⋯ω_s`,
/// `μ = ω_1⋯ω_r`, with `ω_{s+1..r}` comparable to `ω`.
///
/// The reported constant is the smallest `C` with every ratio in
/// `[(eN)^{-C}, (eN)^{C}]`; the factor `e` keeps it finite when `N = 1`.
pub fn sweep_eliminate_equivalent(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let (n, r, s) = (config.n, config.r, config.s);
    let ctx = local_ctx(n)?;
    let (records, skipped) = run_samples(config, |ss| {
        let omega = gen_positive_form(derive_seed(ss.seed, 0), &ctx, config.conditioning)?;
        let free = random_forms(&ctx, ss.seed, 1, s, config.conditioning)?;
        let root = hermitian_sqrt(omega.h())?;
        let mut tied = Vec::with_capacity(r - s);
        for j in 0..r - s {
            let g = gen_positive_form(derive_seed(ss.seed, 500 + j as u64), &ctx, config.conditioning)?;
            tied.push(PositiveForm::new(
                &ctx,
                root.matmul(g.h()).matmul(&root).hermitian_part(),
            )?);
        }
        let mut n_const: f64 = 1.0;
        for t in &tied {
            n_const = n_const
                .max(exterior::comparability_constant(std::slice::from_ref(t), &omega)?)
                .max(exterior::comparability_constant(std::slice::from_ref(&omega), t)?);
        }
        let all: Vec<PositiveForm> = free.iter().chain(&tied).cloned().collect();
        let nu_pair = lefschetz::verify_hr_pair(&lefschetz::product_form(&ctx, &free)?, &omega)?;
        let mu_pair = lefschetz::verify_hr_pair(&lefschetz::product_form(&ctx, &all)?, &omega)?;
        for pair in [&nu_pair, &mu_pair] {
            if let Some(skip) = unverified(pair) {
                return Ok(skip);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(ss.seed, 1000));
        let (p, q) = choose_degree(n, &mut rng, |p, q| p + q + r <= n || p + q >= n + r).expect("(0,0) is admissible");
        let (lo, hi) = metric_ratio_range(&nu_pair, &mu_pair, p, q)?;
        let margin = nu_pair
            .certificate()
            .min_positivity_margin
            .unwrap_or(f64::INFINITY)
            .min(mu_pair.certificate().min_positivity_margin.unwrap_or(f64::INFINITY));
        Ok(Outcome::Record(Box::new(SampleRecord {
            index: ss.index,
            seed: ss.seed,
            n,
            r,
            s,
            m: config.m,
            p,
            q,
            n_const,
            ratio: hi,
            margin,
            ratio_min: Some(lo),
            rho: None,
            norms_sq: None,
            slope: None,
            bounded: None,
            pass: lo > 0.0 && hi.is_finite(),
        })))
    });
    let mut summary = base_summary(&records);
    let (c, ch, st) = constant_with_half(&records, config.samples, eliminate_constant);
    summary.c_emp = c;
    summary.c_emp_half = ch;
    summary.stability = st;
    let pass = !records.is_empty() && summary.violations == 0;
    let verdict = format!(
        "{} samples, ratios within (eN)^(±C) with C = {:.6}, {} skipped",
        records.len(),
        c.unwrap_or(f64::NAN),
        skipped.len()
    );
    Ok(SweepReport {
        kind: SweepKind::Eliminate,
        config: config.clone(),
        records,
        skipped,
        summary,
        pass,
        verdict,
    })
}

/// `max(|ln lo|, |ln hi|) / ln(e N)` for an eliminate record.
pub fn eliminate_constant(rec: &SampleRecord) -> f64 {
    let lo = rec.ratio_min.unwrap_or(rec.ratio);
    lo.ln().abs().max(rec.ratio.ln().abs()) / (1.0 + rec.n_const.ln())
}

/// Largest value of `|α|²_{(ω_1+ω_2,ω)} / (|α|²_{(ω_1,ω)} + |α|²_{(ω_2,ω)})` on `Λ^{p,q}`.
pub fn triangle_worst_ratio(
    w1: &PositiveForm,
    w2: &PositiveForm,
    omega: &PositiveForm,
    p: usize,
    q: usize,
) -> Result<f64> {
    let sum = w1.add_scaled(w2, 1.0)?;
    let pairs = [w1, w2, &sum]
        .iter()
        .map(|w| lefschetz::verify_hr_pair(&w.to_form(), omega))
        .collect::<Result<Vec<_>>>()?;
    if let Some(bad) = pairs.iter().find(|p| !p.is_verified()) {
        return Err(Error::PairNotVerified(format!("{:?}", bad.certificate().first_failure)));
    }
    let m1 = pairs[0].metric_matrix(p, q)?;
    let m2 = pairs[1].metric_matrix(p, q)?;
    let m12 = pairs[2].metric_matrix(p, q)?;
    let (_, hi) = numkernel::generalized_eigen_range(&m12, &m1.add(&m2))?;
    Ok(hi)
}

/// Sweep of `|α|²_{(ω_1+ω_2,ω)} ≤ |α|²_{(ω_1,ω)} + |α|²_{(ω_2,ω)}` (worst case over `α`).
pub fn sweep_triangle(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    if config.r != 1 {
        return Err(Error::InvalidInput(format!(
            "the triangle sweep needs r = 1, got {}",
            config.r
        )));
    }
    let n = config.n;
    let ctx = local_ctx(n)?;
    let (records, skipped) = run_samples(config, |ss| {
        let omega = gen_positive_form(derive_seed(ss.seed, 0), &ctx, config.conditioning)?;
        let w = random_forms(&ctx, ss.seed, 1, 2, config.conditioning)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(ss.seed, 1000));
        let (p, q) = choose_degree(n, &mut rng, |p, q| p + q < n).expect("(0,0) is admissible");
        let worst = triangle_worst_ratio(&w[0], &w[1], &omega, p, q)?;
        Ok(Outcome::Record(Box::new(SampleRecord {
            index: ss.index,
            seed: ss.seed,
            n,
            r: 1,
            s: config.s,
            m: config.m,
            p,
            q,
            n_const: exterior::comparability_constant(&w, &omega)?,
            ratio: worst,
            margin: 1.0 - worst,
            ratio_min: None,
            rho: None,
            norms_sq: None,
            slope: None,
            bounded: None,
            pass: worst <= 1.0 + TRIANGLE_SLACK,
        })))
    });
    let summary = base_summary(&records);
    let pass = !records.is_empty() && summary.violations == 0;
    let verdict = format!(
        "{} samples, {} violations, worst ratio {:.12}",
        records.len(),
        summary.violations,
        summary.max_ratio
    );
    Ok(SweepReport {
        kind: SweepKind::Triangle,
        config: config.clone(),
        records,
        skipped,
        summary,
        pass,
        verdict,
    })
}

pub fn run_sweep(kind: SweepKind, config: &SweepConfig) -> Result<SweepReport> {
    match kind {
        SweepKind::Local1 => sweep_local_1(config),
        SweepKind::Local2 => sweep_local_2(config),
        SweepKind::Eliminate => sweep_eliminate_equivalent(config),
        SweepKind::Triangle => sweep_triangle(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ONE;

    fn ctx(n: usize) -> Arc<ExteriorContext> {
        ExteriorContext::new(n).unwrap()
    }

    #[test]
    fn gen_positive_form_examples() {
        let cx = ctx(3);
        let a = gen_positive_form(42, &cx, 1.0).unwrap();
        assert!(a.h().sub(&CMatrix::identity(3)).frobenius_norm() < 1e-12);
        let b = gen_positive_form(7, &cx, 50.0).unwrap();
        let c = gen_positive_form(7, &cx, 50.0).unwrap();
        assert_eq!(b.h(), c.h());
        for seed in 0..1000 {
            let f = gen_positive_form(seed, &cx, 50.0).unwrap();
            let e = numkernel::hermitian_eigen(f.h()).unwrap();
            let (lo, hi) = (e.values[0], e.values[2]);
            assert!(lo > 0.0 && hi / lo <= 50.0 * (1.0 + 1e-9), "seed {seed}: {lo} {hi}");
            assert!(hi <= 1.0 + 1e-12 && lo >= 1.0 / 50.0 - 1e-12);
        }
    }

    #[test]
    fn eps_grid_shape() {
        let g = default_eps_grid();
        assert_eq!(g.len(), 11);
        assert!((g[0] - 1e-1).abs() < 1e-15 && (g[10] - 1e-6).abs() < 1e-18);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn config_guards() {
        let mut c = SweepConfig::new(7, 1, 0, 10);
        assert!(c.validate().is_err());
        c.n = 3;
        assert!(c.validate().is_ok());
        c.eps_grid = vec![1e-3, 1e-2, 1e-4];
        assert!(c.validate().is_err());
    }

    #[test]
    fn local1_r0_ratio_is_one() {
        let c = SweepConfig::new(2, 0, 3, 20);
        let rep = sweep_local_1(&c).unwrap();
        assert!(rep.pass);
        for r in &rep.records {
            assert!((r.ratio - 1.0).abs() < 1e-9, "{}", r.ratio);
        }
    }

    #[test]
    fn local1_nu_equal_omega() {
        // ν = ω, so N = 1 and the ratio is a finite constant of the degree
        let cx = ctx(3);
        for seed in 0..5 {
            let om = gen_positive_form(seed, &cx, 10.0).unwrap();
            let pair = lefschetz::verify_hr_pair(&om.to_form(), &om).unwrap();
            assert!((exterior::comparability_constant(std::slice::from_ref(&om), &om).unwrap() - 1.0).abs() < 1e-12);
            for (p, q) in [(0, 0), (1, 0), (1, 1), (2, 0)] {
                let r = local1_sup_ratio(&pair, p, q).unwrap();
                assert!(r.is_finite() && r > 0.0);
            }
        }
    }

    #[test]
    fn local2_explicit_kernel_element() {
        let v = ctx(3);
        let w = ctx(1);
        let pi = CMatrix::from_real_rows(&[vec![1.0, 0.0, 0.0]]).unwrap();
        let pb = exterior::pullback(&pi, &PositiveForm::standard(&w), &v).unwrap();
        let omega = PositiveForm::standard(&v);
        let alpha = Form::monomial(&v, &[0], &[1], ONE).unwrap();
        let prof = local2_profile(std::slice::from_ref(&pb), &omega, &alpha, &default_eps_grid()).unwrap();
        assert!(prof.kernel_residual == 0.0);
        assert!(prof.bounded, "{:?}", prof.rho);
        assert!(prof.slope.unwrap() >= MIN_SLOPE);
        assert!(prof.pass());

        let zero = Form::zero(&v, 1, 1).unwrap();
        let prof = local2_profile(&[pb], &omega, &zero, &default_eps_grid()).unwrap();
        assert!(prof.norms_sq.iter().all(|&x| x == 0.0));
        assert!(prof.pass());
    }

    #[test]
    fn local2_halving_eps_halves_norm() {
        let v = ctx(3);
        let w = ctx(1);
        let pi = CMatrix::from_real_rows(&[vec![1.0, 0.0, 0.0]]).unwrap();
        let pb = exterior::pullback(&pi, &PositiveForm::standard(&w), &v).unwrap();
        let alpha = Form::monomial(&v, &[0], &[1], ONE).unwrap();
        let grid = [2e-6, 1e-6];
        let prof = local2_profile(&[pb], &PositiveForm::standard(&v), &alpha, &[4e-6, grid[0], grid[1]]).unwrap();
        let factor = prof.norms_sq[2] / prof.norms_sq[1];
        assert!((factor - 0.5).abs() < 0.05, "{factor}");
    }

    #[test]
    fn eliminate_s_equals_r_gives_one() {
        let mut c = SweepConfig::new(3, 2, 9, 10);
        c.s = 2;
        let rep = sweep_eliminate_equivalent(&c).unwrap();
        for r in &rep.records {
            assert!((r.ratio - 1.0).abs() < 1e-9 && (r.ratio_min.unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn triangle_equality_case() {
        let cx = ctx(3);
        let w = gen_positive_form(1, &cx, 10.0).unwrap();
        let om = gen_positive_form(2, &cx, 10.0).unwrap();
        for (p, q) in [(0, 0), (1, 0), (1, 1)] {
            let worst = triangle_worst_ratio(&w, &w, &om, p, q).unwrap();
            assert!((worst - 1.0).abs() < 1e-9, "{worst}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let c = SweepConfig::new(3, 1, 17, 12);
        let a = serde_json::to_string(&sweep_triangle(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&sweep_triangle(&c).unwrap()).unwrap();
        assert_eq!(a, b);
        let csv = sweep_triangle(&c).unwrap().to_csv().unwrap();
        assert!(csv.starts_with("seed,n,r,s,N,ratio,margin\n"));
        assert_eq!(csv.lines().count(), 13);
    }
}
