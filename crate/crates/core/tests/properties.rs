use num_rational::BigRational;
use proptest::prelude::*;

use ricci_core::curvature::{lagrange_residual, ricci, scalar, trace_ricci, trace_t};
use ricci_core::optimizer::Reduced;
use ricci_core::oracle::{build_algebra, ricci_numeric};
use ricci_core::scalar::rat;
use ricci_core::scaled::{
    classify_m0, cubic_coefficients, m0_critical_metric, simple_k_count, solve_scaled_all,
};
use ricci_core::{
    builtin_pair, catalog, lookup, solve_exact, validate_pair, BuiltinFamily, ClassicalFamily,
    M0Classification, Metric, PrescribedTensor, ScanOptions, SymmetricPairSpec, Target,
};

fn pairs() -> Vec<SymmetricPairSpec> {
    catalog()
        .into_iter()
        .map(|f| builtin_pair(f).unwrap())
        .collect()
}

fn pair_index() -> impl Strategy<Value = usize> {
    0..catalog().len()
}

fn log_values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, len)
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (1i64..80, 1i64..80).prop_map(|(p, q)| rat(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn g2_counts_agree(t1 in 0.01f64..2.0, tp in 0.2f64..5.0) {
        let spec = lookup("G2C_over_G2").unwrap();
        let t = PrescribedTensor::new(tp, vec![t1 * tp]).unwrap();
        let k = simple_k_count(&spec, &t).unwrap();
        let roots = solve_scaled_all(&spec, &t, &ScanOptions::default()).unwrap();
        prop_assert_eq!(usize::from(k.count), roots.solutions.len(), "E = {}", k.e);
    }

    #[test]
    fn exact_round_trip(idx in pair_index(), lb in -3.0f64..3.0, la in log_values(3)) {
        let spec = &pairs()[idx];
        let alphas = la[..spec.ideal_count()].iter().map(|x| x.exp()).collect();
        let g = Metric::new(lb.exp(), alphas).unwrap();
        let t = ricci(spec, &g).unwrap().as_tensor().unwrap();
        let sol = solve_exact(spec, &t, 1e-9).unwrap().solution.unwrap();
        for (a, b) in sol.alphas().iter().zip(g.alphas()) {
            let want = b / g.beta();
            prop_assert!((a / sol.beta() - want).abs() <= 1e-9 * want.max(1.0));
        }
    }

    #[test]
    fn exact_identities_are_exact(
        idx in pair_index(),
        beta in small_rational(),
        alphas in prop::collection::vec(small_rational(), 3),
        tau in small_rational(),
    ) {
        let spec = &pairs()[idx];
        let g = Metric::new(beta, alphas[..spec.ideal_count()].to_vec()).unwrap();
        let s = scalar(spec, &g).unwrap();
        prop_assert_eq!(&s, &trace_ricci(spec, &g).unwrap());
        let gs = g.scaled(&tau);
        prop_assert_eq!(ricci(spec, &gs).unwrap(), ricci(spec, &g).unwrap());
        prop_assert_eq!(scalar(spec, &gs).unwrap(), s / tau);
    }

    #[test]
    fn ricci_p_is_negative(idx in pair_index(), lb in -3.0f64..3.0, la in log_values(3)) {
        let spec = &pairs()[idx];
        let alphas = la[..spec.ideal_count()].iter().map(|x| x.exp()).collect();
        let g = Metric::new(lb.exp(), alphas).unwrap();
        let r = ricci(spec, &g).unwrap();
        prop_assert!(r.ric_p < 0.0);
        prop_assert!(r.ric_k.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn scaled_roots_are_scale_equivariant(
        t1 in 0.05f64..1.0,
        t2 in 0.2f64..6.0,
        tau in 0.1f64..10.0,
    ) {
        let spec = lookup("SO2q_10").unwrap();
        let t = PrescribedTensor::new(1.0, vec![t1, t2]).unwrap();
        let ts = t.scaled(&tau);
        let a = solve_scaled_all(&spec, &t, &ScanOptions::default()).unwrap();
        let b = solve_scaled_all(&spec, &ts, &ScanOptions::default()).unwrap();
        prop_assert_eq!(a.solutions.len(), b.solutions.len());
        for (x, y) in a.solutions.iter().zip(&b.solutions) {
            prop_assert!((x.c / tau - y.c).abs() <= 1e-7 * y.c);
        }
    }

    #[test]
    fn sufficiency_implies_solutions(t1 in 0.05f64..1.5, t2 in 0.1f64..14.0) {
        let spec = lookup("SO2q_10").unwrap();
        let t = PrescribedTensor::new(1.0, vec![t1, t2]).unwrap();
        let suff = ricci_core::sufficient_conditions(&spec, &t).unwrap();
        let roots = solve_scaled_all(&spec, &t, &ScanOptions::default()).unwrap();
        // A maximiser on tr_g T = 1 needs both conditions, not cond_inf alone.
        let expected = if suff.both() { 2 } else { usize::from(suff.cond_zero) };
        prop_assert!(roots.solutions.len() >= expected,
            "{} roots, conditions {} {}", roots.solutions.len(), suff.cond_zero, suff.cond_inf);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m0_metric_is_critical(t1 in 0.05f64..3.0, t2 in 0.05f64..20.0) {
        let spec = lookup("SO2q_5").unwrap();
        let t = PrescribedTensor::new(1.0, vec![t1, t2]).unwrap();
        let an = classify_m0(&spec, &t).unwrap();
        if let Some(g) = m0_critical_metric(&spec, &t, &an).unwrap() {
            prop_assert!(trace_t(&spec, &g, &t).unwrap().abs() < 1e-8);
            let fit = lagrange_residual(&spec, &g, &t).unwrap();
            let scale = ricci(&spec, &g).unwrap().ric_p.abs();
            prop_assert!(fit.residual <= 1e-7 * scale, "residual {}", fit.residual);
        }
    }

    #[test]
    fn double_root_maxima_dominate_samples(t1 in 0.05f64..0.6, seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let spec = lookup("SO2q_5").unwrap();
        let disc = |t2: f64| {
            let t = PrescribedTensor::new(1.0, vec![t1, t2]).unwrap();
            cubic_coefficients(&spec, &t).unwrap().disc
        };
        // Discriminant zeros along T2, located by bisection.
        let grid: Vec<f64> = (0..=400).map(|i| 0.05 * 1.02f64.powi(i)).collect();
        let mut found = 0;
        for w in grid.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            if disc(lo).signum() == disc(hi).signum() {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if disc(mid).signum() == disc(lo).signum() { lo = mid } else { hi = mid }
            }
            let t = PrescribedTensor::new(1.0, vec![t1, 0.5 * (lo + hi)]).unwrap();
            let an = classify_m0(&spec, &t).unwrap();
            if an.classification != Some(M0Classification::GlobalMax) {
                continue;
            }
            found += 1;
            let best = m0_critical_metric(&spec, &t, &an).unwrap().unwrap();
            let reduced = Reduced::new(&spec, &t, Target::Zero).unwrap();
            let u: Vec<f64> = best.alphas().iter().map(|a| a.ln()).collect();
            let (s_best, _) = reduced.eval(&u).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..500 {
                let v: Vec<f64> = u.iter().map(|x| x + rng.gen_range(-6.0..6.0)).collect();
                if let Some((s, _)) = reduced.eval(&v) {
                    prop_assert!(s <= s_best + 1e-9 * s_best.abs().max(1.0), "{s} > {s_best}");
                }
            }
        }
        prop_assume!(found > 0);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for spec in pairs() {
        let t = PrescribedTensor::new(1.0, vec![0.7; spec.ideal_count()]).unwrap();
        for target in [Target::Minus, Target::Zero, Target::Plus] {
            let p = Reduced::new(&spec, &t, target).unwrap();
            let mut checked = 0;
            while checked < 100 {
                let u: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let Some((_, grad)) = p.eval(&u) else {
                    continue;
                };
                let h = 1e-6;
                let mut ok = true;
                let mut fd = Vec::new();
                for j in 0..p.dim() {
                    let mut up = u.clone();
                    let mut dn = u.clone();
                    up[j] += h;
                    dn[j] -= h;
                    match (p.eval(&up), p.eval(&dn)) {
                        (Some((a, _)), Some((b, _))) => fd.push((a - b) / (2.0 * h)),
                        _ => ok = false,
                    }
                }
                if !ok {
                    continue;
                }
                for (g, f) in grad.iter().zip(&fd) {
                    assert!(
                        (g - f).abs() <= 1e-5 * g.abs().max(1.0),
                        "{} {target:?} u={u:?}: {g} vs {f}",
                        spec.name
                    );
                }
                checked += 1;
            }
        }
    }
}

#[test]
fn oracle_matches_closed_form_on_random_metrics() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for family in [
        BuiltinFamily::Supq { p: 2, q: 2 },
        BuiltinFamily::So2q { q: 5 },
        BuiltinFamily::Sl2r,
    ] {
        let spec = builtin_pair(family).unwrap();
        let (fam, p, q) = family.matrix_model().unwrap();
        let alg = build_algebra(fam, p, q).unwrap();
        for _ in 0..10 {
            let g = Metric::new(
                rng.gen_range(-4.0f64..4.0).exp(),
                (0..spec.ideal_count())
                    .map(|_| rng.gen_range(-4.0f64..4.0).exp())
                    .collect(),
            )
            .unwrap();
            let a = ricci_numeric(&alg, &g).unwrap();
            let b = ricci(&spec, &g).unwrap();
            assert!((a.ric_p - b.ric_p).abs() <= 1e-8 * b.ric_p.abs().max(1.0));
            for (x, y) in a.ric_k.iter().zip(&b.ric_k) {
                assert!((x - y).abs() <= 1e-8 * y.abs().max(1.0));
            }
        }
    }
}

#[test]
fn catalog_validates_and_is_idempotent() {
    for spec in pairs() {
        let once = validate_pair(spec.clone()).unwrap();
        assert_eq!(once, spec);
        assert_eq!(validate_pair(once.clone()).unwrap(), once);
    }
}

#[test]
fn so_3_4_constant_from_trace_identity() {
    // so(3,4): k = so(3) + so(4) is not simple, so the (14, 21) entry
    // corresponds to no single ideal of this algebra.
    assert_eq!(
        ricci_core::kappa_from_trace_identity(14, 21).unwrap(),
        rat(2, 3)
    );
    assert!(build_algebra(ClassicalFamily::So, 3, 4).is_err());
}
