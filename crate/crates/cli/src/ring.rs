use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Subcommand};
use hrlab::exterior::{ExteriorContext, PositiveForm};
use hrlab::hodge::{BigradedAlgebra, Certificate, Homog};
use hrlab::ineqlab::{derive_seed, gen_positive_form, MAX_SWEEP_DIM};
use hrlab::ring::{self as hr, GradedRing, Provenance, RingJson, RING_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{self, Run, RunManifest};
use crate::{CliError, Outcome};

#[derive(Subcommand)]
pub enum RingCommand {
    /// Check ring axioms and Poincaré duality of a ring file.
    Validate(ValidateArgs),
    /// H*(T^n) with a seeded (or the standard) Kähler form.
    Torus(TorusArgs),
    /// Künneth product of two ring files.
    Kunneth(KunnethArgs),
    /// Projective bundle P(E) over a base ring with given Chern classes.
    Projbundle(ProjbundleArgs),
    /// Kernel containment ker(-∧u) ⊂ ker(-∧v) on a product ring.
    Theorem2(Theorem2Args),
    /// Bundle identity behind the rank statement for c_e(E)·w_1⋯w_k.
    Theorem3(Theorem3Args),
    /// Global metric of a class for a pair (v, w).
    Metric(MetricArgs),
}

#[derive(Args, Serialize)]
pub struct ValidateArgs {
    pub file: PathBuf,
    /// Diagnostics path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct TorusArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10.0)]
    pub conditioning: f64,
    /// Use the standard form i Σ dz_j ∧ dz̄_j instead of a seeded one.
    #[arg(long)]
    pub standard: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct KunnethArgs {
    #[arg(long)]
    pub left: PathBuf,
    #[arg(long)]
    pub right: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct ProjbundleArgs {
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub rank: usize,
    /// JSON list of classes c_1, …, c_rank; seeded random real classes when absent.
    #[arg(long)]
    pub chern: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ring path; the residual report goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct Theorem2Args {
    /// Product ring Y = X × F (a Künneth product or projective bundle).
    #[arg(long)]
    pub y: PathBuf,
    /// Number of classes pulled back from the base.
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub r: usize,
    /// Holomorphic degree; all p with p + q = dim Y - r when absent.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5.0)]
    pub conditioning: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct Theorem3Args {
    #[arg(long)]
    pub base: PathBuf,
    /// JSON list of classes c_1, …, c_e.
    #[arg(long)]
    pub chern: PathBuf,
    /// Number of Kähler classes w_1, …, w_k.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 5.0)]
    pub conditioning: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct MetricArgs {
    #[arg(long)]
    pub ring: PathBuf,
    /// The class to measure; seeded random of bidegree (p, q) when absent.
    #[arg(long)]
    pub class_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    /// v as a class; the product of r seeded Kähler classes when absent.
    #[arg(long)]
    pub v_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub r: usize,
    /// w as a class; a seeded Kähler class when absent.
    #[arg(long)]
    pub w_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5.0)]
    pub conditioning: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn load_ring(path: &Path) -> Result<Arc<GradedRing>, CliError> {
    let json: RingJson = output::read_json(path)?;
    let ring = GradedRing::from_json(&json).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(Arc::new(ring))
}

/// The ring rebuilt from its provenance when the tables agree, which restores
/// factor embeddings and known Kähler classes; otherwise the ring as loaded.
fn with_structure(ring: Arc<GradedRing>) -> Arc<GradedRing> {
    if matches!(ring.provenance(), Provenance::Loaded) || !ring.embeddings().is_empty() {
        return ring;
    }
    match hr::rebuild(ring.provenance()) {
        Ok(rebuilt) if rebuilt.table_distance(&ring).is_some_and(|d| d <= RING_TOL) => Arc::new(rebuilt),
        _ => ring,
    }
}

fn load_classes(path: &Path) -> Result<Vec<Homog>, CliError> {
    output::read_json(path)
}

fn write_ring(path: &Path, ring: &GradedRing, manifest: &RunManifest) -> Result<(), CliError> {
    let mut json = ring.to_json();
    json.manifest = Some(serde_json::to_value(manifest).map_err(|e| CliError::Io(e.to_string()))?);
    let mut text = serde_json::to_string_pretty(&json).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    output::write_text(path, &text)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn print_diagnostics(d: &hr::RingDiagnostics) {
    println!(
        "ring of dimension {} with {} basis elements: {}",
        d.n,
        d.dim,
        verdict(d.pass)
    );
    println!(
        "residuals: unit {:.1e}, commutativity {:.1e}, associativity {:.1e}, conjugation {:.1e}/{:.1e}",
        d.unit_residual,
        d.commutativity_residual,
        d.associativity_residual,
        d.conj_involution_residual,
        d.conj_multiplicative_residual
    );
    for f in &d.failures {
        println!("failure: {f}");
    }
}

pub fn run(cmd: RingCommand) -> Result<Outcome, CliError> {
    match cmd {
        RingCommand::Validate(a) => validate(&a),
        RingCommand::Torus(a) => torus(&a),
        RingCommand::Kunneth(a) => kunneth(&a),
        RingCommand::Projbundle(a) => projbundle(&a),
        RingCommand::Theorem2(a) => theorem2(&a),
        RingCommand::Theorem3(a) => theorem3(&a),
        RingCommand::Metric(a) => metric(&a),
    }
}

fn validate(a: &ValidateArgs) -> Result<Outcome, CliError> {
    let run = Run::start("ring validate", a, None);
    let ring = load_ring(&a.file)?;
    let d = hr::ring_validate(&ring);
    print_diagnostics(&d);
    let path = output::output_path(a.out.as_deref(), "ring_validate.json");
    output::write_json(&path, &run.finish(verdict(d.pass)), &d)?;
    Ok(Outcome { pass: d.pass })
}

/// Writes a constructed ring and reports its validation.
fn emit_ring(run: &Run, ring: &GradedRing, out: Option<&Path>, default_name: &str) -> Result<Outcome, CliError> {
    let d = hr::ring_validate(ring);
    print_diagnostics(&d);
    let path = output::output_path(out, default_name);
    write_ring(&path, ring, &run.finish(verdict(d.pass)))?;
    println!("ring written to {}", path.display());
    Ok(Outcome { pass: d.pass })
}

fn torus(a: &TorusArgs) -> Result<Outcome, CliError> {
    if a.n == 0 || a.n > MAX_SWEEP_DIM {
        return Err(CliError::Input(format!(
            "n must lie in 1..={MAX_SWEEP_DIM}, got {}",
            a.n
        )));
    }
    let run = Run::start("ring torus", a, Some(a.seed));
    let ctx = ExteriorContext::new(a.n)?;
    let omega = if a.standard {
        PositiveForm::standard(&ctx)
    } else {
        gen_positive_form(a.seed, &ctx, a.conditioning)?
    };
    emit_ring(&run, &hr::torus_ring(&omega)?, a.out.as_deref(), "torus.json")
}

fn kunneth(a: &KunnethArgs) -> Result<Outcome, CliError> {
    let run = Run::start("ring kunneth", a, None);
    let left = load_ring(&a.left)?;
    let right = load_ring(&a.right)?;
    emit_ring(
        &run,
        &hr::kunneth_product(&left, &right)?,
        a.out.as_deref(),
        "kunneth.json",
    )
}

#[derive(Serialize)]
struct BundleReport {
    rank: usize,
    chern: Vec<Homog>,
    grothendieck_residual: f64,
    integral_residual: f64,
    pass: bool,
}

fn random_chern(base: &GradedRing, rank: usize, seed: u64) -> Vec<Homog> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=rank)
        .map(|l| {
            if l <= base.n() {
                hr::random_real_class(base, l, &mut rng)
            } else {
                Homog::new(l, l, vec![])
            }
        })
        .collect()
}

fn projbundle(a: &ProjbundleArgs) -> Result<Outcome, CliError> {
    let run = Run::start("ring projbundle", a, Some(a.seed));
    let base = load_ring(&a.base)?;
    if a.rank == 0 {
        return Err(CliError::Input("bundle rank must be positive".into()));
    }
    let chern = match &a.chern {
        Some(p) => load_classes(p)?,
        None => random_chern(&base, a.rank, a.seed),
    };
    let bundle = hr::projective_bundle_ring(&base, &chern, a.rank)?;
    let relation = hr::grothendieck_residual(&bundle, &chern)?;
    let integral = hr::bundle_integral_residual(&bundle, &chern)?;
    println!("Grothendieck relation residual {relation:.3e}");
    println!("fibre integral residual {integral:.3e}");
    let d = hr::ring_validate(&bundle.ring);
    print_diagnostics(&d);
    let pass = d.pass && relation <= hr::IDENTITY_TOL && integral <= hr::IDENTITY_TOL;
    let manifest = run.finish(verdict(pass));
    let path = output::output_path(a.out.as_deref(), "projbundle.json");
    write_ring(&path, &bundle.ring, &manifest)?;
    let report_path = output::sibling(&path, "report.json");
    let report = BundleReport {
        rank: a.rank,
        chern,
        grothendieck_residual: relation,
        integral_residual: integral,
        pass,
    };
    output::write_json(&report_path, &manifest, &report)?;
    println!(
        "ring written to {}, report to {}",
        path.display(),
        report_path.display()
    );
    Ok(Outcome { pass })
}

#[derive(Serialize)]
struct Theorem2Output {
    reports: Vec<hr::Theorem2Report>,
    pass: bool,
}

fn kahler_classes(
    ring: &GradedRing,
    count: usize,
    seed: u64,
    stream: u64,
    conditioning: f64,
) -> Result<Vec<Homog>, CliError> {
    (0..count)
        .map(|i| hr::random_kahler_class(ring, derive_seed(derive_seed(seed, stream), i as u64), conditioning))
        .collect::<hrlab::Result<_>>()
        .map_err(Into::into)
}

fn theorem2(a: &Theorem2Args) -> Result<Outcome, CliError> {
    let run = Run::start("ring theorem2", a, Some(a.seed));
    if a.s > a.r {
        return Err(CliError::Input(format!("s = {} exceeds r = {}", a.s, a.r)));
    }
    let y = hr::free_base(&with_structure(load_ring(&a.y)?))?;
    let n = y.n();
    if a.r > n {
        return Err(CliError::Input(format!("r = {} exceeds dim Y = {n}", a.r)));
    }
    let x = y
        .base_embedding()
        .expect("free_base certifies the base")
        .source()
        .clone();
    let pulled = kahler_classes(&x, a.s, a.seed, 0, a.conditioning)?;
    let own = kahler_classes(&y, a.r - a.s, a.seed, 1, a.conditioning)?;
    let degrees: Vec<usize> = match a.p {
        Some(p) if p > n - a.r => return Err(CliError::Input(format!("p = {p} exceeds dim Y - r = {}", n - a.r))),
        Some(p) => vec![p],
        None => (0..=n - a.r).collect(),
    };
    let mut reports = Vec::new();
    for p in degrees {
        let rep = hr::theorem2_check(&y, &pulled, &own, p, n - a.r - p)?;
        println!(
            "(p,q) = ({},{}): dim {}, dim ker u = {}, dim ker v = {}, angle {:.3e}: {}",
            rep.p,
            rep.q,
            rep.component_dim,
            rep.kernel_u_dim,
            rep.kernel_v_dim,
            rep.angle,
            if rep.contained { "contained" } else { "NOT contained" }
        );
        reports.push(rep);
    }
    let pass = reports.iter().all(|r| r.contained);
    let path = output::output_path(a.out.as_deref(), "theorem2.json");
    output::write_json(&path, &run.finish(verdict(pass)), &Theorem2Output { reports, pass })?;
    println!("report written to {}", path.display());
    Ok(Outcome { pass })
}

fn theorem3(a: &Theorem3Args) -> Result<Outcome, CliError> {
    let run = Run::start("ring theorem3", a, Some(a.seed));
    let x = with_structure(load_ring(&a.base)?);
    let chern = load_classes(&a.chern)?;
    let classes = kahler_classes(&x, a.k, a.seed, 0, a.conditioning)?;
    let rep = hr::theorem3_check(&x, &chern, &classes, a.p, a.q, derive_seed(a.seed, 1), a.samples)?;
    println!(
        "e = {}, k = {}, (p,q) = ({},{}): identity {:.3e}, relation {:.3e}, integral {:.3e}",
        rep.e, rep.k, rep.p, rep.q, rep.identity_residual, rep.relation_residual, rep.integral_residual
    );
    println!(
        "rank of c_e·w_1⋯w_k on H^({},{}): {} of {}",
        rep.p, rep.q, rep.rank, rep.component_dim
    );
    let path = output::output_path(a.out.as_deref(), "theorem3.json");
    output::write_json(&path, &run.finish(verdict(rep.pass)), &rep)?;
    println!("verdict: {}; report written to {}", verdict(rep.pass), path.display());
    Ok(Outcome { pass: rep.pass })
}

#[derive(Serialize)]
struct MetricOutput {
    class: Homog,
    v: Homog,
    w: Homog,
    metric: Option<f64>,
    certificate: Certificate,
}

fn metric(a: &MetricArgs) -> Result<Outcome, CliError> {
    let run = Run::start("ring metric", a, Some(a.seed));
    let ring = with_structure(load_ring(&a.ring)?);
    let w = match &a.w_file {
        Some(p) => output::read_json(p)?,
        None => kahler_classes(&ring, 1, a.seed, 0, a.conditioning)?.remove(0),
    };
    let v = match &a.v_file {
        Some(p) => output::read_json(p)?,
        None => kahler_classes(&ring, a.r, a.seed, 1, a.conditioning)?
            .iter()
            .fold(ring.unit(), |acc, c| ring.mul(&acc, c)),
    };
    let class = match &a.class_file {
        Some(p) => output::read_json(p)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(a.seed, 2));
            hr::random_homog(&ring, a.p, a.q, &mut rng)
        }
    };
    let pair = hr::verify_hr_pair_global(&ring, &v, &w)?;
    let certificate = pair.certificate().clone();
    let metric = if certificate.verified {
        Some(hr::global_metric(&class, &pair)?)
    } else {
        None
    };
    match metric {
        Some(m) => println!("|a|_(v,w) = {m:.12e} for a of bidegree ({},{})", class.p, class.q),
        None => println!("(v, w) is not a Hodge-Riemann pair; no metric"),
    }
    let pass = metric.is_some_and(f64::is_finite);
    let path = output::output_path(a.out.as_deref(), "metric.json");
    let body = MetricOutput {
        class,
        v,
        w,
        metric,
        certificate,
    };
    output::write_json(&path, &run.finish(verdict(pass)), &body)?;
    println!("report written to {}", path.display());
    Ok(Outcome { pass })
}
