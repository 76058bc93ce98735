//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hrlab::exterior::{self, ExteriorContext, Form, PositiveForm};
use hrlab::hodge::Homog;
use hrlab::ineqlab::{self, gen_positive_form, SweepConfig};
use hrlab::lefschetz::{self, HRPairLocal};
use hrlab::ring::{self, GradedRing};
use hrlab::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CLASSICAL_MARGIN: f64 = 1e-8;
const CLASSICAL_BUDGET: Duration = Duration::from_secs(10);
const DN_BUDGET: Duration = Duration::from_secs(60);
const STAR_SQUARE_TOL: f64 = 1e-10;
const ISOMETRY_TOL: f64 = 1e-9;
const COMMUTATOR_TOL: f64 = 1e-10;
const DECOMPOSITION_TOL: f64 = 1e-9;
const METRIC_TOL: f64 = 1e-9;
const RESCALING_TOL: f64 = 1e-10;
const STABILITY_TOL: f64 = 0.10;
const MIN_SLOPE: f64 = 0.9;
const TRIANGLE_SLACK: f64 = 1e-9;
const BRIDGE_TOL: f64 = 1e-9;
const BUNDLE_TOL: f64 = 1e-10;
const ANGLE_TOL: f64 = 1e-8;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn ctx(n: usize) -> Arc<ExteriorContext> {
    ExteriorContext::new(n).unwrap()
}

fn random_pair(n: usize, r: usize, rng: &mut ChaCha8Rng) -> HRPairLocal {
    let cx = ctx(n);
    let omega = gen_positive_form(rng.random(), &cx, 10.0).unwrap();
    let forms: Vec<PositiveForm> = (0..r)
        .map(|_| gen_positive_form(rng.random(), &cx, 10.0).unwrap())
        .collect();
    lefschetz::verify_hr_pair(&lefschetz::product_form(&cx, &forms).unwrap(), &omega).unwrap()
}

fn admissible(n: usize, r: usize) -> Vec<(usize, usize)> {
    (0..=n)
        .flat_map(|p| (0..=n).map(move |q| (p, q)))
        .filter(|&(p, q)| p + q + r <= n || p + q >= n + r)
        .collect()
}

fn rel(a: &Form, b: &Form) -> f64 {
    a.sub(b).unwrap().coeff_norm() / b.coeff_norm().max(f64::MIN_POSITIVE)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn classical_hodge() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for n in 1..=4 {
        let cx = ctx(n);
        for seed in 0..100 {
            let om = gen_positive_form(1000 * n as u64 + seed, &cx, 10.0).unwrap();
            let pair = lefschetz::verify_hr_pair(&Form::one(&cx), &om).unwrap();
            let margin = pair.certificate().min_positivity_margin.unwrap_or(f64::INFINITY);
            worst = worst.min(margin);
            if !pair.is_verified() || margin <= CLASSICAL_MARGIN {
                failures += 1;
            }
        }
    }
    let t = start.elapsed();
    Outcome {
        pass: failures == 0 && t < CLASSICAL_BUDGET,
        detail: format!(
            "400 pairs, {failures} failures, min margin {worst:.3e}, {:.2}s",
            t.as_secs_f64()
        ),
    }
}

fn mixed_products() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    let mut verified = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 1..=4 {
        for r in 0..=n {
            for _ in 0..200 {
                total += 1;
                if random_pair(n, r, &mut rng).is_verified() {
                    verified += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    Outcome {
        pass: verified == total && t < DN_BUDGET,
        detail: format!(
            "{verified}/{total} verified over all (n,r), n ≤ 4, {:.2}s",
            t.as_secs_f64()
        ),
    }
}

fn operator_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut star_sq, mut iso, mut comm, mut dec, mut orth) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut n_star, mut n_comm, mut n_dec) = (0, 0, 0);
    while n_star < 100 || n_comm < 100 || n_dec < 100 {
        let n = rng.random_range(2..=4);
        let r = rng.random_range(0..n);
        let pair = random_pair(n, r, &mut rng);
        let cx = pair.nu().ctx().clone();
        let degrees = admissible(n, r);
        let (p, q) = degrees[rng.random_range(0..degrees.len())];
        let a = Form::random(&cx, p, q, &mut rng).unwrap();

        let star = pair.hodge_star(&a).unwrap();
        let ss = pair.hodge_star(&star).unwrap();
        let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
        star_sq = star_sq.max(rel(&ss, &a.scale(real(sign))));
        let m = pair.local_metric(&a).unwrap();
        iso = iso.max((pair.local_metric(&star).unwrap() - m).abs() / m);
        n_star += 1;

        let d = pair.decompose(&a).unwrap();
        dec = dec.max(rel(&pair.recompose(&d).unwrap(), &a));
        let pieces: Vec<Form> = (0..d.components.len())
            .map(|i| {
                let mut only = d.clone();
                for (j, c) in only.components.iter_mut().enumerate() {
                    if j != i {
                        *c = c.scale(real(0.0));
                    }
                }
                pair.recompose(&only).unwrap()
            })
            .collect();
        for i in 0..pieces.len() {
            for j in 0..i {
                orth = orth.max(pair.star_inner(&pieces[i], &pieces[j]).unwrap().norm() / (m * m));
            }
        }
        n_dec += 1;

        if p + q + r + 2 <= n {
            let c = pair.commutator(&a).unwrap();
            comm = comm.max(rel(&c, &a.scale(real((n - r - p - q) as f64))));
            n_comm += 1;
        }
    }
    Outcome {
        pass: star_sq <= STAR_SQUARE_TOL
            && iso <= ISOMETRY_TOL
            && comm <= COMMUTATOR_TOL
            && dec <= DECOMPOSITION_TOL
            && orth <= DECOMPOSITION_TOL,
        detail: format!(
            "**: {star_sq:.1e}, isometry {iso:.1e} ({n_star} samples); [Λ,L]: {comm:.1e} ({n_comm}); \
             reconstruction {dec:.1e}, orthogonality {orth:.1e} ({n_dec})"
        ),
    }
}

fn metric_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut star_gap, mut classical_gap) = (0.0f64, 0.0f64);
    let (mut samples, mut classical) = (0, 0);
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let r = rng.random_range(0..=n);
        let pair = random_pair(n, r, &mut rng);
        let degrees = admissible(n, r);
        let (p, q) = degrees[rng.random_range(0..degrees.len())];
        let a = Form::random(pair.nu().ctx(), p, q, &mut rng).unwrap();
        let m = pair.local_metric(&a).unwrap();
        star_gap = star_gap.max((m - pair.star_metric(&a).unwrap()).abs() / m);
        samples += 1;
        if r == 0 {
            let pointwise = exterior::norm_omega(&a, pair.omega()).unwrap();
            classical_gap = classical_gap.max((m - pointwise).abs() / pointwise);
            classical += 1;
        }
    }
    Outcome {
        pass: star_gap <= METRIC_TOL && classical_gap <= METRIC_TOL && classical > 0,
        detail: format!(
            "formula vs ∫α∧*ᾱ: {star_gap:.1e} over {samples}; r = 0 vs |α|_ω: {classical_gap:.1e} over {classical}"
        ),
    }
}

fn rescaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut local, mut global) = (0.0f64, 0.0f64);
    let mut count = 0;
    for lambda in [0.5, 2.0, 3.0] {
        for _ in 0..50 {
            let n = rng.random_range(1..=4);
            let r = rng.random_range(0..=n);
            let pair = random_pair(n, r, &mut rng);
            let degrees = admissible(n, r);
            let (p, q) = degrees[rng.random_range(0..degrees.len())];
            let a = Form::random(pair.nu().ctx(), p, q, &mut rng).unwrap();
            let rep = lefschetz::metric_rescaling_check(&pair, lambda, &a).unwrap();
            local = local.max(rep.rel_err_nu).max(rep.rel_err_both);

            let t = Arc::new(ring::torus_ring(pair.omega()).unwrap());
            let w = ring::form_to_class(&t, &pair.omega().to_form()).unwrap();
            let (gp, gq) = (rng.random_range(0..=n), rng.random_range(0..=n));
            let x = ring::random_homog(&t, gp, gq, &mut rng);
            let base = ring::classical_metric(&t, &x, &w).unwrap();
            let scaled = ring::classical_metric(&t, &x, &w.scale(real(lambda))).unwrap();
            let expected = lambda.powf((n as f64 - (gp + gq) as f64) / 2.0) * base;
            global = global.max((scaled - expected).abs() / expected);
            count += 1;
        }
    }
    Outcome {
        pass: local <= RESCALING_TOL && global <= RESCALING_TOL,
        detail: format!("local laws {local:.1e}, ring law {global:.1e}, {count} samples per check"),
    }
}

fn local_one() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (n, r) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2)] {
        let rep = ineqlab::sweep_local_1(&SweepConfig::new(n, r, 6, 600)).unwrap();
        let stab = rep.summary.stability.unwrap_or(f64::INFINITY);
        let bounded = rep.records.iter().all(|x| x.ratio.is_finite());
        pass &= rep.pass && bounded && stab < STABILITY_TOL && rep.records.len() >= 300;
        lines.push(format!(
            "(n={n},r={r}) C_emp {:.4} (300: {:.4}, Δ {:.1}%)",
            rep.summary.c_emp.unwrap_or(f64::NAN),
            rep.summary.c_emp_half.unwrap_or(f64::NAN),
            100.0 * stab
        ));
    }
    Outcome {
        pass,
        detail: lines.join("; "),
    }
}

fn local_two() -> Outcome {
    let mut recorded = 0;
    let mut skipped = 0;
    let mut failing = 0;
    let mut min_slope = f64::INFINITY;
    let mut max_rho: f64 = 0.0;
    for (n, m, r, samples) in [
        (3, 1, 1, 40),
        (3, 2, 1, 40),
        (4, 2, 1, 30),
        (4, 3, 1, 20),
        (3, 1, 2, 20),
    ] {
        let mut cfg = SweepConfig::new(n, r, 7, samples);
        cfg.m = m;
        let rep = ineqlab::sweep_local_2(&cfg).unwrap();
        recorded += rep.records.len();
        skipped += rep.skipped.len();
        for rec in &rep.records {
            let slope_ok = rec.slope.is_none_or(|s| s >= MIN_SLOPE);
            if !(rec.bounded == Some(true) && slope_ok && rec.pass) {
                failing += 1;
            }
            if let Some(s) = rec.slope {
                min_slope = min_slope.min(s);
            }
            max_rho = max_rho.max(rec.ratio);
        }
    }
    Outcome {
        pass: recorded >= 100 && failing == 0,
        detail: format!(
            "{recorded} kernel samples ({skipped} skipped as unverifiable), {failing} failing, max ρ {max_rho:.3e}, min slope {min_slope:.4}"
        ),
    }
}

fn triangle() -> Outcome {
    let mut total = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        let rep = ineqlab::sweep_triangle(&SweepConfig::new(n, 1, 8, 200)).unwrap();
        total += rep.records.len();
        violations += rep.records.iter().filter(|x| x.ratio > 1.0 + TRIANGLE_SLACK).count();
        worst = worst.max(rep.summary.max_ratio);
    }
    Outcome {
        pass: total >= 500 && violations == 0,
        detail: format!("{total} samples, {violations} violations, worst ratio {worst:.12}"),
    }
}

fn torus_bridge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 100 {
        let n = rng.random_range(1..=3);
        let r = rng.random_range(0..=n);
        let pair = random_pair(n, r, &mut rng);
        let t = Arc::new(ring::torus_ring(pair.omega()).unwrap());
        let global = ring::verify_hr_pair_global(
            &t,
            &ring::form_to_class(&t, pair.nu()).unwrap(),
            &ring::form_to_class(&t, &pair.omega().to_form()).unwrap(),
        )
        .unwrap();
        let degrees = admissible(n, r);
        let (p, q) = degrees[rng.random_range(0..degrees.len())];
        let x = ring::random_homog(&t, p, q, &mut rng);
        let g = ring::global_metric(&x, &global).unwrap();
        let l = pair
            .local_metric(&ring::class_to_form(&t, pair.nu().ctx(), &x).unwrap())
            .unwrap();
        worst = worst.max((g - l).abs() / l);
        count += 1;
    }
    Outcome {
        pass: worst <= BRIDGE_TOL,
        detail: format!("{count} classes, n ≤ 3, max relative gap {worst:.1e}"),
    }
}

fn torus(n: usize, seed: u64) -> Arc<GradedRing> {
    Arc::new(ring::torus_ring(&gen_positive_form(seed, &ctx(n), 5.0).unwrap()).unwrap())
}

fn bundles() -> Outcome {
    let t2 = torus(2, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut relation, mut integral, mut identity) = (0.0f64, 0.0f64, 0.0f64);
    let mut valid = true;
    let mut count = 0;
    for e in 1..=3 {
        for _ in 0..5 {
            let chern: Vec<Homog> = (1..=e)
                .map(|l| {
                    if l <= 2 {
                        ring::random_real_class(&t2, l, &mut rng)
                    } else {
                        Homog::new(l, l, vec![])
                    }
                })
                .collect();
            let b = ring::projective_bundle_ring(&t2, &chern, e).unwrap();
            valid &= ring::ring_validate(&b.ring).pass;
            relation = relation.max(ring::grothendieck_residual(&b, &chern).unwrap());
            integral = integral.max(ring::bundle_integral_residual(&b, &chern).unwrap());
            for k in 0..=1 {
                let classes: Vec<Homog> = (0..k).map(|_| ring::random_real_class(&t2, 1, &mut rng)).collect();
                for (p, q) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)] {
                    let a = ring::random_homog(&t2, p, q, &mut rng);
                    identity = identity.max(ring::bundle_identity_residual(&b, &chern, &classes, &a).unwrap());
                    count += 1;
                }
            }
        }
    }
    Outcome {
        pass: valid && relation <= BUNDLE_TOL && integral <= BUNDLE_TOL && identity <= BUNDLE_TOL,
        detail: format!(
            "e ≤ 3 over torus(2): relation {relation:.1e}, ∫-consistency {integral:.1e}, identity {identity:.1e} ({count} classes), rings valid: {valid}"
        ),
    }
}

fn theorem_two() -> Outcome {
    let pairs: Vec<(Arc<GradedRing>, Arc<GradedRing>)> = vec![
        (torus(1, 1), torus(1, 2)),
        (torus(2, 3), torus(1, 4)),
        (torus(1, 5), torus(2, 6)),
        (torus(2, 7), torus(2, 8)),
        (Arc::new(ring::projective_space_ring(1)), torus(2, 9)),
        (torus(2, 10), Arc::new(ring::projective_space_ring(1))),
    ];
    let mut seed = 0u64;
    let (mut configs, mut contained, mut positive, mut positive_trivial) = (0, 0, 0, 0);
    let mut worst: f64 = 0.0;
    for (x, f) in &pairs {
        let y = Arc::new(ring::kunneth_product(x, f).unwrap());
        let n = y.n();
        for r in 1..=n {
            for s in 0..r {
                for p in 0..=n - r {
                    let q = n - r - p;
                    seed += 1;
                    let pulled: Vec<Homog> = (0..s)
                        .map(|i| ring::random_kahler_class(x, seed * 31 + i as u64, 5.0).unwrap())
                        .collect();
                    let own: Vec<Homog> = (0..r - s)
                        .map(|i| ring::random_kahler_class(&y, seed * 37 + i as u64, 5.0).unwrap())
                        .collect();
                    let rep = ring::theorem2_check(&y, &pulled, &own, p, q).unwrap();
                    configs += 1;
                    worst = worst.max(rep.angle);
                    if rep.angle <= ANGLE_TOL {
                        contained += 1;
                    }
                    if s == 0 {
                        positive += 1;
                        if rep.kernel_u_dim == 0 {
                            positive_trivial += 1;
                        }
                    }
                }
            }
        }
    }
    Outcome {
        pass: configs >= 20 && contained == configs && positive_trivial == positive && positive > 0,
        detail: format!(
            "{contained}/{configs} configurations contained (max angle {worst:.1e}); K_u = 0 in {positive_trivial}/{positive} all-positive cases"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("classical Hodge theory (r = 0)", classical_hodge),
        ("random products are Hodge-Riemann pairs", mixed_products),
        ("operator identities", operator_identities),
        ("metric consistency", metric_consistency),
        ("rescaling laws", rescaling),
        ("comparison sweep |να| vs |α|_(ν,ω)", local_one),
        ("kernel sweep ρ(ε)", local_two),
        ("triangle inequality sweep", triangle),
        ("torus bridge", torus_bridge),
        ("projective-bundle ring", bundles),
        ("kernel containment on product rings", theorem_two),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        all &= out.pass;
        println!(
            "{} criterion {:>2} {name}: {} [{:.2}s]",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failures present");
        ExitCode::FAILURE
    }
}
