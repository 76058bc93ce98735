use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use hrlab::exterior::{ExteriorContext, Form, FormJson, PositiveForm, PositivityKind};
use hrlab::hodge::{BigradedAlgebra, Certificate, Homog};
use hrlab::ineqlab::{derive_seed, gen_positive_form, MAX_SWEEP_DIM};
use hrlab::lefschetz;
use serde::Serialize;

use crate::output::{self, Run};
use crate::ring::load_ring;
use crate::{CliError, Outcome};

#[derive(Args, Serialize)]
pub struct VerifyArgs {
    /// Dimension of a random instance ν = ω_1 ∧ ⋯ ∧ ω_r.
    #[arg(long, conflicts_with_all = ["nu_file", "omega_file", "ring"])]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub r: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10.0)]
    pub conditioning: f64,
    /// ν as Form JSON; defaults to the unit form.
    #[arg(long, requires = "omega_file")]
    pub nu_file: Option<PathBuf>,
    /// ω as Form JSON (a real, strictly positive (1,1)-form).
    #[arg(long)]
    pub omega_file: Option<PathBuf>,
    /// Ring JSON; verifies the classes given by --v-file and --w-file.
    #[arg(long, conflicts_with_all = ["nu_file", "omega_file"], requires = "w_file")]
    pub ring: Option<PathBuf>,
    /// Class v (ring mode); defaults to the unit.
    #[arg(long, requires = "ring")]
    pub v_file: Option<PathBuf>,
    #[arg(long, requires = "ring")]
    pub w_file: Option<PathBuf>,
    /// Certificate path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct LocalCertificate {
    nu: FormJson,
    omega: FormJson,
    certificate: Certificate,
}

#[derive(Serialize)]
struct RingCertificate {
    v: Homog,
    w: Homog,
    certificate: Certificate,
}

fn load_form(path: &Path) -> Result<Form, CliError> {
    let json: FormJson = output::read_json(path)?;
    Form::from_json(&json).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn random_instance(n: usize, r: usize, seed: u64, conditioning: f64) -> Result<(Form, PositiveForm), CliError> {
    if n == 0 || n > MAX_SWEEP_DIM {
        return Err(CliError::Input(format!("n must lie in 1..={MAX_SWEEP_DIM}, got {n}")));
    }
    if r > n {
        return Err(CliError::Input(format!("r = {r} exceeds n = {n}")));
    }
    let ctx: Arc<ExteriorContext> = ExteriorContext::new(n)?;
    let omega = gen_positive_form(derive_seed(seed, 0), &ctx, conditioning)?;
    let forms = (0..r)
        .map(|i| gen_positive_form(derive_seed(seed, i as u64 + 1), &ctx, conditioning))
        .collect::<hrlab::Result<Vec<_>>>()?;
    Ok((lefschetz::product_form(&ctx, &forms)?, omega))
}

fn report(cert: &Certificate) {
    println!(
        "n = {}, r = {}: {}",
        cert.n,
        cert.r,
        if cert.verified {
            "verified Hodge-Riemann pair"
        } else {
            "NOT a Hodge-Riemann pair"
        }
    );
    if let Some(f) = &cert.first_failure {
        println!(
            "first failure: {:?} at (p,q,k) = ({},{},{}), margin {:.3e}",
            f.kind, f.p, f.q, f.k, f.margin
        );
    }
    if let Some(m) = cert.min_positivity_margin {
        println!("min positivity margin {m:.3e}");
    }
    if let Some(m) = cert.min_lefschetz_margin {
        println!("min Lefschetz margin {m:.3e}");
    }
}

fn outcome(verified: bool) -> &'static str {
    if verified {
        "verified"
    } else {
        "not verified"
    }
}

pub fn run(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let run = Run::start("verify", args, Some(args.seed));
    let path = output::output_path(args.out.as_deref(), "certificate.json");
    let verified = if let Some(ring_path) = &args.ring {
        let ring = load_ring(ring_path)?;
        let v = match &args.v_file {
            Some(p) => output::read_json::<Homog>(p)?,
            None => ring.unit(),
        };
        let w_path = args.w_file.as_ref().expect("clap requires --w-file with --ring");
        let w: Homog = output::read_json(w_path)?;
        let pair = hrlab::ring::verify_hr_pair_global(&ring, &v, &w)?;
        let cert = pair.certificate().clone();
        report(&cert);
        let ok = cert.verified;
        output::write_json(
            &path,
            &run.finish(outcome(ok)),
            &RingCertificate {
                v,
                w,
                certificate: cert,
            },
        )?;
        ok
    } else {
        let (nu, omega) = match (&args.omega_file, args.n) {
            (Some(om), _) => {
                let omega = PositiveForm::from_form(&load_form(om)?, PositivityKind::Strict)?;
                let nu = match &args.nu_file {
                    Some(p) => load_form(p)?,
                    None => Form::one(omega.ctx()),
                };
                (nu, omega)
            }
            (None, Some(n)) => random_instance(n, args.r, args.seed, args.conditioning)?,
            (None, None) => {
                return Err(CliError::Input(
                    "give --n for a random instance, --omega-file, or --ring".into(),
                ))
            }
        };
        let pair = lefschetz::verify_hr_pair(&nu, &omega)?;
        let cert = pair.certificate().clone();
        report(&cert);
        let ok = cert.verified;
        let body = LocalCertificate {
            nu: nu.to_json(),
            omega: omega.to_form().to_json(),
            certificate: cert,
        };
        output::write_json(&path, &run.finish(outcome(ok)), &body)?;
        ok
    };
    println!("certificate written to {}", path.display());
    Ok(Outcome { pass: verified })
}
