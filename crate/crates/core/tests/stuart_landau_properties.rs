mod common;

use common::{c, wrap};
use ddeuc::classify::{classify_auto, ClassTag};
use ddeuc::delays::class_two_sequences;
use ddeuc::stuart_landau::{sl_branches, sl_hopf_sequence, BranchEnd, SlParams};
use ddeuc::system::presets;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = SlParams> {
    (-0.95..0.95f64, -3.0..3.0f64).prop_map(|(a, b)| SlParams::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn branch_ends_at_zero_amplitude_are_hopf_delays(p in params()) {
        let k_max = 4;
        let hopf = sl_hopf_sequence(p, k_max + 2);
        let lattice: Vec<f64> = [&hopf.destabilizing, &hopf.stabilizing]
            .into_iter()
            .flatten()
            .flat_map(|s| s.taus.clone())
            .collect();
        let mut hopf_ends = 0;
        for branch in sl_branches(p, k_max, 720) {
            for end in [branch.start, branch.end] {
                if let BranchEnd::Hopf { tau, .. } = end {
                    hopf_ends += 1;
                    let d = lattice.iter().map(|t| (t - tau).abs()).fold(f64::INFINITY, f64::min);
                    prop_assert!(d <= 1e-6, "branch k = {} ends at tau = {tau}, {d:e} from the Hopf lattice", branch.k);
                }
            }
        }
        prop_assert!(hopf_ends > 0);
    }

    #[test]
    fn branch_samples_solve_the_rotating_wave_equations(p in params()) {
        for branch in sl_branches(p, 3, 720) {
            for s in &branch.samples {
                // i omega = alpha + i beta - a^2 + e^{-i omega tau}
                let lhs = c(0.0, s.omega);
                let rhs = c(p.alpha - s.a * s.a, p.beta) + c(0.0, -s.omega * s.tau).exp();
                let r = (lhs - rhs).norm();
                prop_assert!(r <= 1e-10, "k = {} phi = {}: residual {r:e}", branch.k, s.phi);
            }
        }
    }

    #[test]
    fn linearization_through_the_generic_pipeline(alpha in -0.95..0.95f64, beta in 0.05..4.0f64) {
        prop_assume!(alpha * alpha + beta * beta > 1.0 + 1e-3);
        let sys = presets::stuart_landau_linear(alpha, beta);
        prop_assert_eq!(classify_auto(&sys).unwrap().tag, ClassTag::II);
        let (outer, inner) = class_two_sequences(&sys, 2).unwrap();
        let s = (1.0 - alpha * alpha).sqrt();
        let closed = [(beta + s, -c(-alpha, s).arg()), (beta - s, -c(-alpha, -s).arg())];
        for (seq, (omega, phi)) in [&outer, &inner].into_iter().zip(closed) {
            prop_assert!((seq.omega_h - omega).abs() <= 1e-8, "omega {} vs {omega}", seq.omega_h);
            prop_assert!(wrap(seq.phi_h - phi).abs() <= 1e-8, "phi {} vs {phi}", seq.phi_h);
        }
    }
}
