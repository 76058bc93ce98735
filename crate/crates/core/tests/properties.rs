use std::sync::Arc;

use hrlab::exterior::{self, ExteriorContext, Form, PositiveForm};
use hrlab::ineqlab::gen_positive_form;
use hrlab::lefschetz;
use hrlab::numkernel::{self, CMatrix, TolPolicy, C64};
use hrlab::ring;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ctx(n: usize) -> Arc<ExteriorContext> {
    ExteriorContext::new(n).unwrap()
}

fn bidegree(n: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.random_range(0..=n), rng.random_range(0..=n))
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hermitian_eigen_reconstructs(size in 1usize..=100, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(size, size, |_, _| gaussian(&mut rng));
        let m = g.add(&g.adjoint()).hermitian_part();
        let e = numkernel::hermitian_eigen(&m).unwrap();
        let rebuilt = e.vectors.matmul(&CMatrix::diag_real(&e.values)).matmul(&e.vectors.adjoint());
        prop_assert!(rebuilt.sub(&m).frobenius_norm() <= 1e-10 * m.frobenius_norm());
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rank_plus_nullity_is_column_count(rows in 1usize..=30, cols in 1usize..=30, rank in 0usize..=30, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rank.min(rows).min(cols);
        let a = CMatrix::from_fn(rows, k, |_, _| gaussian(&mut rng));
        let b = CMatrix::from_fn(k, cols, |_, _| gaussian(&mut rng));
        let m = if k == 0 { CMatrix::zeros(rows, cols) } else { a.matmul(&b) };
        let r = numkernel::numerical_rank(&m, TolPolicy::Default);
        let ns = numkernel::nullspace(&m, TolPolicy::Default).unwrap();
        prop_assert_eq!(r + ns.cols(), cols);
        prop_assert_eq!(r, k);
        prop_assert!(m.matmul(&ns).frobenius_norm() <= 1e-9 * m.frobenius_norm().max(1.0));
    }

    #[test]
    fn wedge_is_graded_commutative_and_associative(n in 1usize..=4, seed in any::<u64>()) {
        let cx = ctx(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p1, q1) = bidegree(n, &mut rng);
        let (p2, q2) = bidegree(n, &mut rng);
        let (p3, q3) = bidegree(n, &mut rng);
        let a = Form::random(&cx, p1, q1, &mut rng).unwrap();
        let b = Form::random(&cx, p2, q2, &mut rng).unwrap();
        let c = Form::random(&cx, p3, q3, &mut rng).unwrap();
        let ab = exterior::wedge(&a, &b).unwrap();
        let ba = exterior::wedge(&b, &a).unwrap();
        let s = sign((p1 + q1) * (p2 + q2));
        prop_assert!(ab.sub(&ba.scale(C64::new(s, 0.0))).unwrap().coeff_norm() <= 1e-12 * (1.0 + ab.coeff_norm()));
        let left = exterior::wedge(&ab, &c).unwrap();
        let right = exterior::wedge(&a, &exterior::wedge(&b, &c).unwrap()).unwrap();
        prop_assert!(left.sub(&right).unwrap().coeff_norm() <= 1e-12 * (1.0 + left.coeff_norm()));
    }

    #[test]
    fn conjugation_is_an_antilinear_multiplicative_involution(n in 1usize..=4, seed in any::<u64>()) {
        let cx = ctx(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p1, q1) = bidegree(n, &mut rng);
        let (p2, q2) = bidegree(n, &mut rng);
        let a = Form::random(&cx, p1, q1, &mut rng).unwrap();
        let b = Form::random(&cx, p2, q2, &mut rng).unwrap();
        prop_assert_eq!(exterior::conjugate(&exterior::conjugate(&a)), a.clone());
        let lhs = exterior::conjugate(&exterior::wedge(&a, &b).unwrap());
        let rhs = exterior::wedge(&exterior::conjugate(&a), &exterior::conjugate(&b)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().coeff_norm() <= 1e-12 * (1.0 + lhs.coeff_norm()));
        let z = C64::new(0.3, -1.7);
        prop_assert_eq!(exterior::conjugate(&a.scale(z)), exterior::conjugate(&a).scale(z.conj()));
    }

    #[test]
    fn pointwise_comparison(n in 1usize..=4, seed in any::<u64>()) {
        let cx = ctx(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w1 = gen_positive_form(rng.random(), &cx, 20.0).unwrap();
        let w2 = gen_positive_form(rng.random(), &cx, 20.0).unwrap();
        // N^{-1} H1 ≤ H2
        let big_n = exterior::comparability_constant(std::slice::from_ref(&w1), &w2).unwrap();
        let (p, q) = bidegree(n, &mut rng);
        let a = Form::random(&cx, p, q, &mut rng).unwrap();
        let n2 = exterior::norm_omega(&a, &w2).unwrap().powi(2);
        let n1 = exterior::norm_omega(&a, &w1).unwrap().powi(2);
        prop_assert!(n2 <= big_n.powi((p + q) as i32) * n1 * (1.0 + 1e-9));
    }

    #[test]
    fn pairing_constant_is_independent_of_omega(n in 1usize..=4, seed in any::<u64>()) {
        // sup |∫ α∧β| / (|α|_ω |β|_ω) is intrinsic to ω, so the standard form computes it
        let cx = ctx(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = bidegree(n, &mut rng);
        let std = PositiveForm::standard(&cx);
        let alg = lefschetz::LocalAlgebra::new(&std).unwrap();
        let pi = hrlab::hodge::BigradedAlgebra::pairing_matrix(&alg, p, q);
        let k1 = exterior::norm_matrix(&std, p, q).unwrap();
        let k2 = exterior::norm_matrix(&std, n - p, n - q).unwrap();
        let k1_inv = numkernel::solve_many(&k1, &CMatrix::identity(k1.rows())).unwrap();
        let k2_inv = numkernel::solve_many(&k2, &CMatrix::identity(k2.rows())).unwrap();
        let c_n = k1_inv.transpose().matmul(&pi).matmul(&k2_inv).spectral_norm();
        prop_assert!(c_n.is_finite() && c_n > 0.0);

        let om = gen_positive_form(rng.random(), &cx, 20.0).unwrap();
        let a = Form::random(&cx, p, q, &mut rng).unwrap();
        let b = Form::random(&cx, n - p, n - q, &mut rng).unwrap();
        let lhs = exterior::integrate(&exterior::wedge(&a, &b).unwrap(), &om).unwrap().norm();
        let rhs = exterior::norm_omega(&a, &om).unwrap() * exterior::norm_omega(&b, &om).unwrap();
        prop_assert!(lhs <= c_n * rhs * (1.0 + 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_products_are_hodge_riemann_pairs(n in 1usize..=4, r_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let cx = ctx(n);
        let r = ((n + 1) as f64 * r_frac) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let om = gen_positive_form(rng.random(), &cx, 10.0).unwrap();
        let forms: Vec<PositiveForm> = (0..r).map(|_| gen_positive_form(rng.random(), &cx, 10.0).unwrap()).collect();
        let pair = lefschetz::verify_hr_pair(&lefschetz::product_form(&cx, &forms).unwrap(), &om).unwrap();
        prop_assert!(pair.is_verified(), "{:?}", pair.certificate().first_failure);
    }

    #[test]
    fn decomposition_is_orthogonal_and_metrics_agree(n in 2usize..=4, seed in any::<u64>()) {
        let cx = ctx(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rng.random_range(0..n);
        let om = gen_positive_form(rng.random(), &cx, 10.0).unwrap();
        let forms: Vec<PositiveForm> = (0..r).map(|_| gen_positive_form(rng.random(), &cx, 10.0).unwrap()).collect();
        let pair = lefschetz::verify_hr_pair(&lefschetz::product_form(&cx, &forms).unwrap(), &om).unwrap();
        let degrees: Vec<(usize, usize)> = (0..=n)
            .flat_map(|p| (0..=n).map(move |q| (p, q)))
            .filter(|&(p, q)| p + q + r <= n || p + q >= n + r)
            .collect();
        let (p, q) = degrees[rng.random_range(0..degrees.len())];
        let a = Form::random(&cx, p, q, &mut rng).unwrap();
        let d = pair.decompose(&a).unwrap();
        let back = pair.recompose(&d).unwrap();
        prop_assert!(back.sub(&a).unwrap().coeff_norm() <= 1e-9 * a.coeff_norm());
        let terms: Vec<Form> = (0..d.components.len())
            .map(|i| {
                let mut only = d.clone();
                for (j, c) in only.components.iter_mut().enumerate() {
                    if j != i {
                        *c = c.scale(C64::new(0.0, 0.0));
                    }
                }
                pair.recompose(&only).unwrap()
            })
            .collect();
        let total = pair.star_inner(&a, &a).unwrap().norm();
        for i in 0..terms.len() {
            for j in 0..terms.len() {
                if i != j {
                    let ip = pair.star_inner(&terms[i], &terms[j]).unwrap().norm();
                    prop_assert!(ip <= 1e-9 * total, "({i},{j}) {ip} vs {total}");
                }
            }
        }
        let m = pair.local_metric(&a).unwrap();
        let s = pair.star_metric(&a).unwrap();
        prop_assert!((m - s).abs() <= 1e-9 * m);
        prop_assert!(m > 0.0);
    }

    #[test]
    fn lefschetz_quasi_isometry_constants_are_intrinsic(n in 1usize..=4, seed in any::<u64>()) {
        // for r = 0 the range of |ω^k α|_ω / |α|_ω does not depend on ω
        let cx = ctx(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.random_range(0..=n);
        let q = rng.random_range(0..=n - p);
        let k = n - p - q;
        let range = |om: &PositiveForm| {
            let wk = exterior::wedge_power(&om.to_form(), k).unwrap();
            let lk = cx.mul_matrix(&wk, p, q);
            let src = exterior::norm_matrix(om, p, q).unwrap();
            let dst = exterior::norm_matrix(om, n - q, n - p).unwrap();
            let src_inv = numkernel::solve_many(&src, &CMatrix::identity(src.rows())).unwrap();
            let sv = numkernel::singular_values(&dst.matmul(&lk).matmul(&src_inv));
            (*sv.last().unwrap(), sv[0])
        };
        let (lo0, hi0) = range(&PositiveForm::standard(&cx));
        let (lo, hi) = range(&gen_positive_form(rng.random(), &cx, 20.0).unwrap());
        prop_assert!(lo0 > 0.0);
        prop_assert!((lo - lo0).abs() <= 1e-8 * lo0 && (hi - hi0).abs() <= 1e-8 * hi0);
    }

    #[test]
    fn constructed_rings_validate(seed in any::<u64>(), e in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cx = ctx(1);
        let t1 = Arc::new(ring::torus_ring(&gen_positive_form(rng.random(), &cx, 5.0).unwrap()).unwrap());
        let p1 = Arc::new(ring::projective_space_ring(1));
        let y = Arc::new(ring::kunneth_product(&t1, &p1).unwrap());
        prop_assert!(ring::ring_validate(&y).pass);
        let chern: Vec<_> = (1..=e)
            .map(|l| if l <= y.n() { ring::random_real_class(&y, l, &mut rng) } else { hrlab::hodge::Homog::new(l, l, vec![]) })
            .collect();
        let b = ring::projective_bundle_ring(&y, &chern, e).unwrap();
        let d = ring::ring_validate(&b.ring);
        prop_assert!(d.pass, "{:?}", d.failures);
    }
}
