//! Critical delay lattices and the unstable dimension at a given delay.
//!
//! cargo run --example critical_delays -- examples/systems/scalar.json 30

use ddeuc::delays::{all_sequences, unstable_dimension_at_zero, unstable_dimension_from};
use ddeuc::spectrum::count_unstable;
use ddeuc::system::LinearDde;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "examples/systems/scalar.json".into());
    let (sys, file_tau) = LinearDde::from_json(&std::fs::read_to_string(&path)?)?;
    let tau = match args.next() {
        Some(t) => t.parse()?,
        None => file_tau.unwrap_or(10.0),
    };

    let (tag, seqs) = all_sequences(&sys, 8)?;
    println!("class {tag}, D_u(0) = {}", unstable_dimension_at_zero(&sys));
    for s in &seqs {
        println!(
            "omega_H = {:.6} ({:?}): tau_k = ({:+.6} + 2 pi k) / {:.6}",
            s.omega_h, s.direction, s.phi_h, s.omega_h
        );
        let taus: Vec<String> = s.indexed().map(|(k, t)| format!("{k}:{t:.4}")).collect();
        println!("  {}", taus.join("  "));
    }
    let du = unstable_dimension_from(&sys, &seqs, tau)?;
    println!("tau = {tau}: D_u = {du}, argument principle = {}", count_unstable(&sys, tau)?);
    Ok(())
}
