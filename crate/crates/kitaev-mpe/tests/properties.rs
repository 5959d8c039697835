//! Randomized invariants of the model and correlator machinery.

use kitaev_mpe::analysis::fidelity;
use kitaev_mpe::correlators::{self, OperatorKind};
use kitaev_mpe::model::{self, ModelParams};
use proptest::prelude::*;

fn arb_params(max_l: usize) -> impl Strategy<Value = ModelParams> {
    (
        -3.0f64..3.0,
        -3.0f64..3.0,
        0.0f64..5.0,
        2usize..=max_l / 2,
    )
        .prop_map(|(mu, delta, alpha, half_l)| {
            ModelParams::new(1.0, mu, delta, alpha, 2 * half_l).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quasiparticle_energies_are_nonnegative(p in arb_params(64)) {
        let sol = model::solve(&p).unwrap();
        prop_assert!(sol.epsilon().iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn pairing_function_is_odd_about_pi(
        k in 1e-3f64..std::f64::consts::PI,
        alpha in 0.0f64..5.0,
        half_l in 2usize..64,
    ) {
        let l = 2 * half_l;
        let sum = model::f_alpha(2.0 * std::f64::consts::PI - k, alpha, l)
            + model::f_alpha(k, alpha, l);
        prop_assert!(sum.abs() < 1e-10, "violation {sum}");
    }

    #[test]
    fn pairing_derivative_matches_finite_difference(
        k in 1e-2f64..3.1f64,
        alpha in 0.1f64..4.0,
        half_l in 2usize..32,
    ) {
        let l = 2 * half_l;
        let h = 1e-5;
        let fd = (model::f_alpha(k, alpha + h, l) - model::f_alpha(k, alpha - h, l)) / (2.0 * h);
        let analytic = model::f_alpha_dalpha(k, alpha, l);
        let scale = analytic.abs().max(1.0);
        prop_assert!((analytic - fd).abs() / scale < 1e-6, "{analytic} vs {fd}");
    }

    #[test]
    fn string_correlations_are_bounded(p in arb_params(32)) {
        let sol = model::solve(&p).unwrap();
        let kernel = correlators::contraction_kernel(&sol);
        for kind in OperatorKind::ALL {
            for l in 1..p.l {
                let c = correlators::correlation(&kernel, kind, l).unwrap();
                prop_assert!(c.abs() <= 1.0 + 1e-9, "{kind} C({l}) = {c}");
            }
        }
    }

    #[test]
    fn fisher_density_respects_variance_and_heisenberg_bounds(p in arb_params(32)) {
        let sol = model::solve(&p).unwrap();
        let kernel = correlators::contraction_kernel(&sol);
        for kind in OperatorKind::ALL {
            // f_Q is a variance per site: nonnegative, and at most L
            let q = correlators::fisher_density(&kernel, kind).unwrap();
            prop_assert!(q.fisher_density >= -1e-9);
            prop_assert!(q.fisher_density <= p.l as f64 + 1e-6);
        }
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(
        p in arb_params(24),
        mu2 in -3.0f64..3.0,
        delta2 in -3.0f64..3.0,
    ) {
        let q = ModelParams { mu: mu2, delta: delta2, ..p };
        let fab = fidelity(&p, &q).unwrap();
        let fba = fidelity(&q, &p).unwrap();
        prop_assert!((fab - fba).abs() < 1e-12);
        prop_assert!(fab.abs() <= 1.0 + 1e-12);
        prop_assert!((fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-15);
    }
}
