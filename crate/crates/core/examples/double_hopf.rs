//! Delays where both Hopf pairs of the rotational family are critical at once.

use ddeuc::delays::{class_two_sequences, double_hopf_scan};
use ddeuc::system::presets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (alpha, beta) = (0.5, 3.5);
    let family = |mu: f64| class_two_sequences(&presets::rotational(alpha, beta, mu), 12);
    for p in double_hopf_scan(family, 1.9, 2.5, 61, 12, 1e-6)? {
        println!(
            "mu = {:.8}: tau_{}^(1) = tau_{}^(2) = {:.6}, omega = {:.5} / {:.5}, gap {:.1e}",
            p.mu, p.k, p.l, p.tau, p.omega_1, p.omega_2, p.gap
        );
    }
    Ok(())
}
