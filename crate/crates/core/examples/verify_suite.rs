//! Seeded cross-checks of the closed-form lemmas against the classifier and
//! of the unstable dimension against the argument principle.
//!
//! cargo run --release --example verify_suite -- 7 100

use ddeuc::verify::{run_verification, VerifyConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let instances = args.next().map(|s| s.parse()).transpose()?.unwrap_or(40);
    let report = run_verification(&VerifyConfig { seed, instances });
    print!("{report}");
    if !report.all_passed() {
        std::process::exit(1);
    }
    Ok(())
}
