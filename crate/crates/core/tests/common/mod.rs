#![allow(dead_code)]

use ddeuc::system::LinearDde;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::collection::vec;
use proptest::prelude::*;

pub fn dde(n: usize, a: &[f64], b: &[f64]) -> LinearDde {
    LinearDde::new(DMatrix::from_row_slice(n, n, a), DMatrix::from_row_slice(n, n, b)).unwrap()
}

/// Random `(A, B)` with `n` in `1..=max_n`, entries of `A` in `(-ra, ra)` and of `B` in `(-rb, rb)`.
pub fn systems(max_n: usize, ra: f64, rb: f64) -> impl Strategy<Value = LinearDde> {
    (1..=max_n)
        .prop_flat_map(move |n| (Just(n), vec(-ra..ra, n * n), vec(-rb..rb, n * n)))
        .prop_map(|(n, a, b)| dde(n, &a, &b))
}

pub fn two_by_two(ra: f64, rb: f64) -> impl Strategy<Value = LinearDde> {
    (vec(-ra..ra, 4), vec(-rb..rb, 4)).prop_map(|(a, b)| dde(2, &a, &b))
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `det(lambda I - A - B e^{-lambda tau})` by LU on the complex matrix.
pub fn chi(sys: &LinearDde, tau: f64, lambda: Complex64) -> Complex64 {
    let n = sys.dim();
    let e = (-lambda * tau).exp();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { lambda } else { c(0.0, 0.0) };
        d - c(sys.a()[(i, j)], 0.0) - e * sys.b()[(i, j)]
    });
    m.determinant()
}

/// Closest distance from `z` to any point of `set`.
pub fn dist_to(set: &[Complex64], z: Complex64) -> f64 {
    set.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min)
}

pub fn wrap(phi: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let r = phi.rem_euclid(t);
    if r > std::f64::consts::PI { r - t } else { r }
}
