mod common;

use common::{c, chi, two_by_two};
use ddeuc::acs::{auto_omega_max, sample_branches, DEFAULT_SAMPLES};
use ddeuc::delays::{all_sequences, critical_delays, unstable_dimension_scalar};
use ddeuc::error::DdeError;
use ddeuc::spectrum::{count_unstable, newton_refine};
use ddeuc::system::LinearDde;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn scalar_class_one() -> impl Strategy<Value = (f64, f64)> {
    (-2.0..2.0f64, 0.05..2.0f64, any::<bool>()).prop_map(|(a, gap, neg)| {
        let m = a.abs() + gap;
        (a, if neg { -m } else { m })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn critical_delays_are_roots(sys in two_by_two(3.0, 3.0)) {
        let seqs = match all_sequences(&sys, 8) {
            Ok((_, s)) => s,
            Err(e @ DdeError::ResidualTooLarge { .. }) => return Err(TestCaseError::fail(e.to_string())),
            Err(_) => return Ok(()),
        };
        let limit = 1e-8 * (1.0 + sys.norms().0 + sys.norms().1);
        for s in &seqs {
            for &tau in &s.taus {
                let r = chi(&sys, tau, c(0.0, s.omega_h)).norm();
                prop_assert!(r <= limit, "omega {} tau {tau}: |chi| = {r:e}", s.omega_h);
            }
        }
    }

    #[test]
    fn delays_form_a_lattice(sys in two_by_two(3.0, 3.0)) {
        let Ok((_, seqs)) = all_sequences(&sys, 12) else { return Ok(()) };
        for s in &seqs {
            for w in s.taus.windows(2) {
                let gap = w[1] - w[0];
                let want = TAU / s.omega_h;
                prop_assert!((gap - want).abs() <= 8.0 * f64::EPSILON * w[1], "gap {gap} vs {want}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn crossing_direction_matches_tracked_roots((a, b) in scalar_class_one()) {
        let sys = LinearDde::scalar(a, b);
        let acs = sample_branches(&sys, auto_omega_max(&sys), DEFAULT_SAMPLES).unwrap();
        let crossing = acs
            .find_crossings()
            .unwrap()
            .into_iter()
            .find(|c| c.omega_h > 0.0)
            .expect("class I scalar system has a crossing");
        let seq = critical_delays(&sys, &crossing, 3).unwrap();
        for &tau_k in &seq.taus {
            let eps = 1e-3 * tau_k;
            let start = c(0.0, crossing.omega_h);
            let before = newton_refine(&sys, tau_k - eps, start).unwrap().lambda;
            let after = newton_refine(&sys, tau_k + eps, start).unwrap().lambda;
            prop_assert!((before - start).norm() < 0.1 && (after - start).norm() < 0.1);
            let moved = (after.re - before.re).signum();
            prop_assert_eq!(moved, -crossing.dgamma.signum(), "tau_k = {}: Re lambda {} -> {}", tau_k, before.re, after.re);
        }
    }
}

/// `tau_k` for `lambda = a + b e^{-lambda tau}` at `lambda = i omega`.
fn scalar_lattice(a: f64, b: f64, k: u32) -> f64 {
    let w = (b * b - a * a).sqrt();
    let theta = (-w / b).atan2(-a / b).rem_euclid(TAU);
    (theta + 2.0 * PI * k as f64) / w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scalar_dimension_matches_argument_principle((a, b) in scalar_class_one(), tau in 1e-3..50.0f64) {
        let near = (0..200).map(|k| scalar_lattice(a, b, k)).any(|t| (t - tau).abs() < 1e-2);
        prop_assume!(!near);
        let closed = unstable_dimension_scalar(a, b, tau).unwrap();
        let counted = count_unstable(&LinearDde::scalar(a, b), tau).unwrap();
        prop_assert_eq!(closed, counted, "a = {}, b = {}, tau = {}", a, b, tau);
    }
}
