use proptest::prelude::*;

use renyi_bounds::maxent::gaussian_renyi;
use renyi_bounds::report::{report_from_json, report_to_json, BoundReport};
use renyi_bounds::{
    bd_lambda, correlation_diagonal, empirical_covariance, entropy_loss, hydrogen_state, kl_loss, oscillator_state,
    renyi_radial, verify, Method, PointCloud, QuadratureSpec, QuantumNumberChain, RenyiOrder,
};

fn any_chain() -> impl Strategy<Value = QuantumNumberChain> {
    (2usize..=7, 0i64..=5)
        .prop_flat_map(|(d, l)| {
            let chains = QuantumNumberChain::enumerate(d, l).unwrap();
            let n = chains.len();
            (Just(chains), 0..n, any::<bool>())
        })
        .prop_map(|(chains, i, flip)| {
            let c = &chains[i];
            let mut mu = c.mu().to_vec();
            if flip {
                let last = mu.len() - 1;
                mu[last] = -mu[last];
            }
            QuantumNumberChain::new(c.d(), mu).unwrap()
        })
}

fn order_in_window() -> impl Strategy<Value = RenyiOrder> {
    (1usize..=8, 0.001f64..0.999, prop::bool::ANY).prop_map(|(d, u, above)| {
        let lo = d as f64 / (d as f64 + 2.0);
        let lambda = if above { 1.0 + 4.0 * u } else { lo + (1.0 - lo) * u };
        RenyiOrder::new(lambda, d).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn correlation_diagonal_has_unit_trace(chain in any_chain()) {
        let diag = correlation_diagonal(&chain).unwrap();
        let sum: f64 = diag.entries().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12, "trace {sum}");
        prop_assert!(diag.entries().iter().all(|c| *c > 0.0 && *c < 1.0));
    }

    #[test]
    fn loss_is_nonpositive_and_matches_kl(chain in any_chain()) {
        let loss = entropy_loss(&chain).unwrap();
        prop_assert!(loss <= 0.0, "loss {loss}");
        let diag = correlation_diagonal(&chain).unwrap();
        let d = chain.d() as f64;
        let det_form = 0.5 * diag.entries().iter().map(|c| c.ln()).sum::<f64>() + 0.5 * d * d.ln();
        prop_assert!((kl_loss(&diag).unwrap() - det_form).abs() <= 1e-12);
        prop_assert!((loss - det_form).abs() <= 1e-12);
    }

    #[test]
    fn isotropic_chain_has_zero_loss(d in 2usize..=9) {
        let chain = QuantumNumberChain::new(d, vec![0; d - 1]).unwrap();
        prop_assert!(entropy_loss(&chain).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn bound_constant_dominates_gaussian(order in order_in_window()) {
        let bd = bd_lambda(order).unwrap();
        prop_assert!(bd >= gaussian_renyi(order) - 1e-12, "{order:?}: {bd}");
    }

    #[test]
    fn bound_constant_is_nonincreasing(order in order_in_window(), step in 1e-3f64..0.5) {
        let next = RenyiOrder::new(order.lambda + step, order.d).unwrap();
        prop_assert!(bd_lambda(next).unwrap() <= bd_lambda(order).unwrap() + 1e-12);
    }

    #[test]
    fn json_round_trip_is_byte_identical(
        vals in prop::array::uniform8(-1e6f64..1e6),
        err in 0.0f64..1e-6,
        d in 2usize..6,
        holds in any::<bool>(),
    ) {
        let report = BoundReport {
            system: "hydrogen(n=2,l=1)".into(),
            d,
            mu: vec![1; d - 1],
            lambda: vals[0].abs() + 0.5,
            r2: vals[1].abs(),
            h: vals[2],
            h_method: Method::Quadrature1d,
            h_est_error: err,
            bound_baseline: vals[3],
            bound_improved: vals[4],
            loss: -vals[5].abs(),
            slack_baseline: vals[6],
            slack_improved: vals[7],
            holds,
            paper_exact: None,
        };
        let text = report_to_json(&report);
        let again = report_to_json(&report_from_json(&text).unwrap());
        prop_assert_eq!(text, again);
    }

    #[test]
    fn trace_normalization_survives_scaling(
        pts in prop::collection::vec(-5.0f64..5.0, 3 * 4..3 * 40),
        scale in prop::array::uniform3(0.1f64..10.0),
    ) {
        let n = pts.len() / 3 * 3;
        let scaled: Vec<f64> = pts[..n].iter().enumerate().map(|(i, x)| x * scale[i % 3]).collect();
        let cloud = PointCloud::new(3, scaled).unwrap();
        if let Ok(cov) = empirical_covariance(&cloud) {
            let tr: f64 = cov.diagonal().iter().sum();
            prop_assert!((tr - 1.0).abs() <= 1e-12);
        }
    }
}

fn catalog_case() -> impl Strategy<Value = (bool, u32, u32, usize)> {
    (any::<bool>(), 0u32..=2, 0u32..=2, 2usize..=5).prop_map(|(hyd, a, b, d)| {
        if hyd {
            let n = a + 1;
            (true, n, b.min(n - 1), d)
        } else {
            (false, a, b, d)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn improved_bound_is_tighter_and_holds(case in catalog_case(), u in 0.01f64..0.99, pick in any::<prop::sample::Index>()) {
        let (hyd, a, b, d) = case;
        let state = if hyd { hydrogen_state(a, b, d) } else { oscillator_state(a, b, d) }.unwrap();
        let chains = QuantumNumberChain::enumerate(d, b as i64).unwrap();
        let chain = &chains[pick.index(chains.len())];
        let lo = d as f64 / (d as f64 + 2.0);
        let lambda = lo + (3.0 - lo) * u;
        let r = verify(&state, chain, lambda, &QuadratureSpec::default()).unwrap();
        prop_assert!((r.bound_improved - (r.bound_baseline + r.loss)).abs() <= 1e-12);
        prop_assert!(r.loss <= 0.0);
        prop_assert!(r.slack_improved <= r.slack_baseline);
        prop_assert_eq!(r.slack_improved == r.slack_baseline, r.loss == 0.0);
        prop_assert!(r.holds, "{} {chain} λ={lambda}: {}", r.system, r.slack_improved);
        let text = report_to_json(&r);
        prop_assert_eq!(report_to_json(&report_from_json(&text).unwrap()), text);
    }
}

#[test]
fn doubling_base_order_stays_within_estimate() {
    let coarse = QuadratureSpec::default();
    let fine = QuadratureSpec { base_order: 2 * coarse.base_order, ..coarse };
    let cases = [
        (hydrogen_state(1, 0, 3).unwrap(), 1.0),
        (hydrogen_state(1, 0, 3).unwrap(), 2.0),
        (oscillator_state(0, 0, 3).unwrap(), 1.0),
        (hydrogen_state(3, 1, 3).unwrap(), 0.8),
        (oscillator_state(2, 1, 5).unwrap(), 1.5),
    ];
    for (state, lambda) in cases {
        let a = renyi_radial(&state, lambda, &coarse).unwrap();
        let b = renyi_radial(&state, lambda, &fine).unwrap();
        let change = (a.value - b.value).abs();
        let roundoff = 4.0 * f64::EPSILON * a.value.abs();
        assert!(
            change <= a.est_error.max(b.est_error) + roundoff,
            "{} λ={lambda}: change {change:e}, estimates {:e} {:e}",
            state.label(),
            a.est_error,
            b.est_error
        );
    }
}
