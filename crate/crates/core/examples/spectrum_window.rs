//! Characteristic roots in a window and their distance to the ACS.
//!
//! cargo run --example spectrum_window -- examples/systems/class1_rank_one.json

use ddeuc::acs::{auto_omega_max, sample_branches, DEFAULT_SAMPLES};
use ddeuc::spectrum::{count_unstable_detailed, spectrum_vs_acs_distance, spectrum_window, Region};
use ddeuc::system::LinearDde;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "examples/systems/class1_rank_one.json".into());
    let (sys, tau) = LinearDde::from_json(&std::fs::read_to_string(&path)?)?;
    let tau = tau.unwrap_or(10.0);
    let region = Region { re_min: -0.3, re_max: 1.0, im_min: -4.0, im_max: 4.0 };

    let w = spectrum_window(&sys, tau, region, None)?;
    println!("tau = {tau}, collocation order {}", w.order);
    for r in &w.roots {
        println!("  {:+.8} {:+.8}i   |chi| = {:.1e}", r.re, r.im, r.residual);
    }
    let count = count_unstable_detailed(&sys, tau)?;
    println!("unstable roots: {} (winding {:.6}, {} panels)", count.count, count.raw, count.panels);

    let acs = sample_branches(&sys, auto_omega_max(&sys), DEFAULT_SAMPLES)?;
    let roots: Vec<_> = w.roots.iter().map(|r| r.lambda()).collect();
    println!("distance to the scaled ACS: {:.5}", spectrum_vs_acs_distance(&roots, tau, &acs));
    Ok(())
}
