//! The scaled spectrum `tau Re lambda` approaches `gamma(Im lambda)` as the delay grows.

use ddeuc::acs::{auto_omega_max, sample_branches, DEFAULT_SAMPLES};
use ddeuc::spectrum::{spectrum_vs_acs_distance, spectrum_window, Region};
use ddeuc::system::LinearDde;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = LinearDde::scalar(-0.5, -1.0);
    let acs = sample_branches(&sys, auto_omega_max(&sys), DEFAULT_SAMPLES)?;
    let region = Region { re_min: -1.0, re_max: 0.5, im_min: -2.5, im_max: 2.5 };
    let mut last: Option<f64> = None;
    for tau in [10.0, 20.0, 40.0, 80.0] {
        let w = spectrum_window(&sys, tau, region, None)?;
        let roots: Vec<_> = w.roots.iter().map(|r| r.lambda()).collect();
        let d = spectrum_vs_acs_distance(&roots, tau, &acs);
        let ratio = last.map(|l| format!("ratio {:.3}", l / d)).unwrap_or_default();
        println!("tau = {tau:>4}: {:>3} roots, distance {d:.5} {ratio}", roots.len());
        last = Some(d);
    }
    Ok(())
}
