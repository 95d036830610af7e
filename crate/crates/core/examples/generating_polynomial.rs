//! Coefficients and roots of `p_omega(Y) = det(i omega I - A - B Y)`.
//!
//! cargo run --example generating_polynomial -- examples/systems/class1_rank_one.json 0.8

use ddeuc::charfn::{generating_polynomial, generating_roots};
use ddeuc::system::LinearDde;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "examples/systems/class1_rank_one.json".into());
    let omega: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.8);
    let (sys, _) = LinearDde::from_json(&std::fs::read_to_string(&path)?)?;

    let p = generating_polynomial(&sys, omega);
    println!("{path}, omega = {omega}");
    for (k, c) in p.coeffs().iter().enumerate() {
        println!("  c_{k} = {:+.6} {:+.6}i", c.re, c.im);
    }
    for y in generating_roots(&sys, omega)? {
        println!("  Y = {:+.6} {:+.6}i   |Y| = {:.6}   gamma = {:+.6}", y.re, y.im, y.norm(), -y.norm().ln());
    }
    Ok(())
}
