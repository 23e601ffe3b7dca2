use proptest::prelude::*;

use fredreg_core::eigensystem::{analytic_eigensystem, project_all, reconstruct_dense};
use fredreg_core::infoselect::{
    autocorr_estimate, build_selection_with, combinatorial_bound_ok, detect_n0, reconstruct_bhat,
    SelectionParams,
};
use fredreg_core::spectral_cutoff::{cumulative_profile, k0_cutoff};
use fredreg_core::synthesis::{add_coefficient_noise, NoisyDataset};
use fredreg_core::variational::{
    best_linear_estimate, classify_components, information_content, k_alpha, tikhonov_full,
    tikhonov_identity, ConstraintSpec, VarianceProfile,
};

fn record(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, len)
        .prop_filter("non-constant", |v| v.iter().any(|x| *x != v[0]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(c in prop::collection::vec(-10f64..10.0, 1..48)) {
        let es = analytic_eigensystem(48).unwrap();
        let f = reconstruct_dense(&c, &es).unwrap();
        let lhs = es.grid().inner(&f, &f);
        let rhs: f64 = c.iter().map(|v| v * v).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
        let back = project_all(&f, &es, c.len()).unwrap();
        for (a, b) in back.iter().zip(&c) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn correlogram_bounds(g in record(8..200)) {
        let s = autocorr_estimate(&g).unwrap();
        prop_assert_eq!(s.get(0), Some(1.0));
        prop_assert_eq!(s.delta.len(), g.len());
        for d in s.delta.iter().flatten() {
            prop_assert!(d.abs() <= 1.0);
        }
    }

    #[test]
    fn selection_scale_invariance(g in record(16..160), c in 1e-6f64..1e6) {
        let params = SelectionParams::default();
        let (a, _) = build_selection_with(&g, &params).unwrap();
        let scaled: Vec<f64> = g.iter().map(|v| v * c).collect();
        let (b, _) = build_selection_with(&scaled, &params).unwrap();
        prop_assert_eq!(a.n0, b.n0);
        prop_assert_eq!(&a.q, &b.q);
        prop_assert_eq!(&a.pairs, &b.pairs);
        prop_assert_eq!(&a.i_k, &b.i_k);

        let es = analytic_eigensystem(g.len()).unwrap();
        let da = NoisyDataset::from_coefficients(g.clone(), 1.0).unwrap();
        let db = NoisyDataset::from_coefficients(scaled, 1.0).unwrap();
        let sa = reconstruct_bhat(&da, &es, &a).unwrap();
        let sb = reconstruct_bhat(&db, &es, &b).unwrap();
        for ((_, x), (_, y)) in sa.coeffs.iter().zip(&sb.coeffs) {
            prop_assert!((x * c - y).abs() <= 1e-9 * y.abs().max(1e-300));
        }
    }

    #[test]
    fn selection_structure(g in record(16..160)) {
        let (r, s) = build_selection_with(&g, &SelectionParams::default()).unwrap();
        prop_assert!(r.q.iter().all(|&n| n > 0 && n <= r.n0));
        prop_assert_eq!(r.nc, r.q.len());
        prop_assert_eq!(r.bound_ok, combinatorial_bound_ok(r.nc, r.i_k.len()));
        let mut members: Vec<usize> = r.pairs.iter().flat_map(|p| [p.k, p.partner]).collect();
        members.sort_unstable();
        members.dedup();
        prop_assert_eq!(&members, &r.i_k);
        for p in &r.pairs {
            prop_assert_eq!(p.partner - p.k, p.lag);
            let best = (0..g.len() - p.lag).map(|i| (g[i] * g[i + p.lag]).abs()).fold(0.0, f64::max);
            prop_assert_eq!((g[p.k - 1] * g[p.partner - 1]).abs(), best);
        }
        for &(a, b) in &r.compat_violations {
            prop_assert!(!r.q.contains(&(b - a)));
        }
        prop_assert!(detect_n0(&s, &SelectionParams::default()) <= g.len());
    }

    #[test]
    fn combinatorial_bound_accepts_distinct_difference_sets(
        set in prop::collection::btree_set(1usize..500, 1..=6)
    ) {
        let v: Vec<usize> = set.into_iter().collect();
        let mut diffs = Vec::new();
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                diffs.push(b - a);
            }
        }
        let total = diffs.len();
        diffs.sort_unstable();
        diffs.dedup();
        prop_assume!(diffs.len() == total);
        prop_assert!(combinatorial_bound_ok(diffs.len(), v.len()));
    }

    #[test]
    fn profile_monotone_and_k0_monotone_in_budget(
        g in prop::collection::vec(-1e-2f64..1e-2, 8..64),
        c1 in 1e-3f64..1e6,
        scale in 1.0f64..100.0,
    ) {
        let es = analytic_eigensystem(g.len()).unwrap();
        let d = NoisyDataset::from_coefficients(g, 0.0).unwrap();
        let p = cumulative_profile(&d, &es).unwrap();
        prop_assert!(p.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(k0_cutoff(&d, &es, c1).unwrap() <= k0_cutoff(&d, &es, c1 * scale).unwrap());
    }

    #[test]
    fn filter_factors_in_unit_interval(
        g in prop::collection::vec(-1f64..1.0, 8..48),
        eps in 1e-8f64..1.0,
        bound in 1e-3f64..1e3,
        rho in 1e-4f64..10.0,
    ) {
        let n = g.len();
        let es = analytic_eigensystem(n).unwrap();
        let d = NoisyDataset::from_coefficients(g, eps).unwrap();
        let cs = ConstraintSpec::linear(n, bound, eps).unwrap();
        let vp = VarianceProfile::constant(n, rho, 1.0, eps).unwrap();
        for sol in [
            tikhonov_full(&d, &es, &cs).unwrap(),
            tikhonov_identity(&d, &es, bound, eps).unwrap(),
            best_linear_estimate(&d, &es, &vp).unwrap(),
        ] {
            for &(k, c) in &sol.coeffs {
                let gk = d.coeff(k);
                if gk != 0.0 {
                    let phi = c * es.eigenvalues()[k - 1] / gk;
                    prop_assert!(phi > 0.0 && phi <= 1.0, "{} k={} phi={}", sol.method, k, phi);
                }
            }
        }
        // truncation index is the last k passing the threshold
        let ka = k_alpha(&es, &cs, n);
        for k in 1..=n {
            let passes = es.eigenvalues()[k - 1] >= cs.alpha() * k as f64;
            prop_assert_eq!(passes, k <= ka);
        }
    }

    #[test]
    fn information_is_monotone_and_partition_consistent(
        lambda in 1e-6f64..1.0,
        rho in 1e-3f64..10.0,
        eps in 1e-6f64..1.0,
    ) {
        let a = information_content(lambda, rho, 1.0, eps).unwrap();
        let b = information_content(lambda * 2.0, rho, 1.0, eps).unwrap();
        prop_assert!(a.nats >= 0.0 && a.nats <= b.nats);
        prop_assert!((0.0..=1.0).contains(&a.r2));
        // r² = 1 - e^{-2J}
        prop_assert!((a.r2 - (1.0 - (-2.0 * a.nats).exp())).abs() < 1e-12);

        let es = analytic_eigensystem(32).unwrap();
        let vp = VarianceProfile::constant(32, rho, 1.0, eps).unwrap();
        let part = classify_components(&es, &vp).unwrap();
        for &k in &part.informative {
            prop_assert!(information_content(es.eigenvalues()[k - 1], rho, 1.0, eps).unwrap().r2 >= 0.5);
        }
        for &k in &part.noise {
            prop_assert!(information_content(es.eigenvalues()[k - 1], rho, 1.0, eps).unwrap().r2 < 0.5);
        }
    }

    #[test]
    fn coefficient_noise_is_bounded(eps in 0f64..1.0, seed in any::<u64>()) {
        let es = analytic_eigensystem(16).unwrap();
        let g = vec![0.25; 16];
        let d = add_coefficient_noise(&g, &es, eps, seed).unwrap();
        for (a, b) in d.coeffs.iter().zip(&g) {
            prop_assert!((a - b).abs() <= eps);
        }
    }
}
