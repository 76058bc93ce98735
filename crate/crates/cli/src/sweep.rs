use hrlab::ineqlab::{self, SweepConfig, SweepKind};

use crate::output::{self, Run};
use crate::{CliError, Outcome, SweepArgs};

fn name(kind: SweepKind) -> &'static str {
    match kind {
        SweepKind::Local1 => "local1",
        SweepKind::Local2 => "local2",
        SweepKind::Eliminate => "eliminate",
        SweepKind::Triangle => "triangle",
    }
}

pub fn run(kind: SweepKind, args: &SweepArgs) -> Result<Outcome, CliError> {
    let mut config = SweepConfig::new(args.n, args.r, args.seed, args.samples);
    config.s = args.s;
    config.m = args.m;
    config.conditioning = args.conditioning;
    if let Some(grid) = &args.eps_grid {
        config.eps_grid = grid.clone();
    }
    config.validate()?;

    let run = Run::start(&format!("sweep {}", name(kind)), &config, Some(config.seed));
    let report = ineqlab::run_sweep(kind, &config)?;
    let manifest = run.finish(report.verdict.clone());

    let json = output::output_path(args.out.as_deref(), &format!("sweep_{}.json", name(kind)));
    let csv = json.with_extension("csv");
    output::write_json(&json, &manifest, &report)?;
    output::write_csv(&csv, &manifest, &report.to_csv()?)?;

    let s = &report.summary;
    println!(
        "sweep {} n={} r={} s={} m={} seed={}: {} samples, {} skipped",
        name(kind),
        config.n,
        config.r,
        config.s,
        config.m,
        config.seed,
        report.records.len(),
        report.skipped.len()
    );
    println!("max ratio {:.6}, median ratio {:.6}", s.max_ratio, s.median_ratio);
    if let Some(c) = s.c_emp {
        println!("empirical constant {c:.6}");
    }
    if let Some(st) = s.stability {
        println!("stability (full vs half sample) {st:.4}");
    }
    println!("violations {}", s.violations);
    if let Some(m) = s.min_slope {
        println!("min slope {m:.4}");
    }
    println!("verdict: {}", report.verdict);
    println!("reports written to {} and {}", json.display(), csv.display());
    Ok(Outcome { pass: report.pass })
}
