//! Samples the ACS branches, lists their zeros and writes the branches as CSV.
//!
//! cargo run --example acs_branches -- examples/systems/class2_rotational.json > branches.csv

use ddeuc::acs::{auto_omega_max, sample_branches, DEFAULT_SAMPLES};
use ddeuc::system::LinearDde;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "examples/systems/class2_rotational.json".into());
    let (sys, _) = LinearDde::from_json(&std::fs::read_to_string(&path)?)?;
    let omega_max = auto_omega_max(&sys);
    let acs = sample_branches(&sys, omega_max, DEFAULT_SAMPLES)?;

    eprintln!("{} branches on [-{omega_max:.3}, {omega_max:.3}]", acs.branches().len());
    for b in acs.branches() {
        eprintln!("  branch {}: max gamma {:+.6}", b.branch_id, b.max_gamma());
    }
    for c in acs.find_crossings()? {
        eprintln!(
            "  zero at omega_H = {:.8}, phi_H = {:+.8}, d gamma/d omega = {:+.4e} ({:?})",
            c.omega_h, c.phi_h, c.dgamma, c.direction
        );
    }
    acs.write_csv(std::io::stdout().lock())?;
    Ok(())
}
