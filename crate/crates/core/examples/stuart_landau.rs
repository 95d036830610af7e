//! Hopf delays, rotating-wave branches and a simulated trajectory of
//! `z' = (alpha + i beta) z - z|z|^2 + z(t - tau)`.
//!
//! cargo run --example stuart_landau -- 0.8 1.0

use ddeuc::stuart_landau::{branches_disconnected, sl_branches, sl_growth_rate, sl_hopf_sequence, SlParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let alpha: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.8);
    let beta: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1.0);
    let p = SlParams::new(alpha, beta)?;

    let hopf = sl_hopf_sequence(p, 6);
    for (name, seq) in [("destabilizing", &hopf.destabilizing), ("stabilizing", &hopf.stabilizing)] {
        if let Some(s) = seq {
            let taus: Vec<String> = s.taus.iter().map(|t| format!("{t:.4}")).collect();
            println!("{name}: omega = {:.6}, tau = {}", s.omega_h, taus.join(", "));
        }
    }
    for note in &hopf.notes {
        println!("note: {note}");
    }

    let branches = sl_branches(p, 4, 720);
    for b in &branches {
        let (lo, hi) = b.samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.tau), hi.max(s.tau)));
        println!(
            "branch k = {} component {}: tau in [{lo:.3}, {hi:.3}], {:?} -> {:?}",
            b.k, b.component_id, b.start, b.end
        );
    }
    println!("components disconnected: {}", branches_disconnected(&branches));

    if let Some(first) = hopf.destabilizing.as_ref().and_then(|s| s.taus.first().copied()) {
        for factor in [0.9, 1.1] {
            let tau = factor * first;
            let g = sl_growth_rate(p, tau, 400.0_f64.max(40.0 * tau), tau / 50.0)?;
            println!("tau = {tau:.4}: growth rate {:+.4}, plateau {:?}", g.rate, g.plateau);
        }
    }
    Ok(())
}
