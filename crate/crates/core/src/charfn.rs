//! The characteristic quasipolynomial `chi(lambda) = det[lambda I - A - B e^{-lambda tau}]`
//! and the generating polynomial `p_omega(Y) = det[i omega I - A - B Y]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{DdeError, Result};
use crate::poly::ComplexPolynomial;
use crate::system::LinearDde;

/// Relative cutoff below which interpolated coefficients are treated as zero.
pub const COEFF_TRUNCATION: f64 = 1e-12;
/// Radius of the interpolation circle in the `Y` plane.
pub const SAMPLE_RADIUS: f64 = 2.0;

/// A trial characteristic root with its residual `|chi(lambda)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharRootProbe {
    pub lambda: Complex64,
    pub tau: f64,
    pub residual: f64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| c(v, 0.0))
}

/// `z I - A - B y` as a complex matrix.
pub(crate) fn pencil(sys: &LinearDde, z: Complex64, y: Complex64) -> DMatrix<Complex64> {
    let n = sys.dim();
    DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { z } else { c(0.0, 0.0) };
        diag - sys.a()[(i, j)] - sys.b()[(i, j)] * y
    })
}

pub(crate) fn det(m: DMatrix<Complex64>) -> Complex64 {
    match m.nrows() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.lu().determinant(),
    }
}

/// `chi(lambda)` at delay `tau`.
pub fn eval_char(sys: &LinearDde, tau: f64, lambda: Complex64) -> Complex64 {
    det(pencil(sys, lambda, (-lambda * tau).exp()))
}

/// `chi(lambda)` together with `chi'(lambda)/chi(lambda) = tr(M^{-1} M')`,
/// where `M' = I + tau B e^{-lambda tau}`. The log-derivative is `None` when
/// `M` is numerically singular.
pub fn eval_char_log_derivative(
    sys: &LinearDde,
    tau: f64,
    lambda: Complex64,
) -> (Complex64, Option<Complex64>) {
    let n = sys.dim();
    let e = (-lambda * tau).exp();
    let m = pencil(sys, lambda, e);
    let dm = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
        diag + sys.b()[(i, j)] * tau * e
    });
    let lu = m.lu();
    let chi = lu.determinant();
    let logd = lu.solve(&dm).map(|x| x.trace()).filter(|v| v.is_finite());
    (chi, logd)
}

/// Residual scale for `chi` near `lambda`: `(1 + |lambda| + |A| + |B| |e^{-lambda tau}|)^n`.
pub fn char_scale(sys: &LinearDde, tau: f64, lambda: Complex64) -> f64 {
    let (na, nb) = sys.norms();
    let e = (-lambda * tau).exp().norm();
    (1.0 + lambda.norm() + na + nb * e).powi(sys.dim() as i32)
}

/// Coefficients of `p_omega(Y)` recovered by interpolation on the circle
/// `|Y| = 2` at the `n + 1` roots of unity.
pub fn generating_polynomial(sys: &LinearDde, omega: f64) -> ComplexPolynomial {
    let n = sys.dim();
    let m = n + 1;
    let z = c(0.0, omega);
    let nodes: Vec<Complex64> = (0..m)
        .map(|s| Complex64::from_polar(SAMPLE_RADIUS, 2.0 * std::f64::consts::PI * s as f64 / m as f64))
        .collect();
    let values: Vec<Complex64> = nodes.iter().map(|y| det(pencil(sys, z, *y))).collect();
    let mut coeffs: Vec<Complex64> = (0..m)
        .map(|k| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(s, v)| {
                    v * Complex64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * (k * s % m) as f64 / m as f64,
                    )
                })
                .sum();
            sum / (m as f64 * SAMPLE_RADIUS.powi(k as i32))
        })
        .collect();
    let max = coeffs.iter().fold(0.0, |acc: f64, v| acc.max(v.norm()));
    for v in coeffs.iter_mut() {
        if v.norm() < COEFF_TRUNCATION * max {
            *v = c(0.0, 0.0);
        }
    }
    ComplexPolynomial::new(coeffs)
}

/// Roots `Y_j(omega)` of the generating polynomial.
pub fn generating_roots(sys: &LinearDde, omega: f64) -> Result<Vec<Complex64>> {
    let p = generating_polynomial(sys, omega);
    if p.is_degenerate() {
        return Err(DdeError::DegenerateFrequency { omega });
    }
    let c0_nonzero = p.coeffs()[0].norm() > 0.0;
    let roots = p
        .roots()
        .into_iter()
        .filter(|y| !(c0_nonzero && y.norm() == 0.0))
        .collect();
    Ok(roots)
}

/// Purely imaginary eigenvalues `i omega` of `A` with an eigenvector in `ker B`.
/// These are characteristic roots for every delay and never bifurcate.
pub fn delay_independent_roots(sys: &LinearDde) -> Vec<Complex64> {
    let n = sys.dim();
    let (na, nb) = sys.norms();
    let scale = 1.0 + na;
    let eig = sys.a().clone().complex_eigenvalues();
    let mut found: Vec<Complex64> = Vec::new();
    for lam in eig.iter() {
        if lam.re.abs() > 1e-10 * scale {
            continue;
        }
        let omega = lam.im;
        if found.iter().any(|f| (f.im - omega).abs() < 1e-8 * scale) {
            continue;
        }
        // Null space of (A - i omega I), then the smallest gain of B on it.
        let shifted = DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { c(0.0, omega) } else { c(0.0, 0.0) };
            c(sys.a()[(i, j)], 0.0) - d
        });
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let null_rows: Vec<usize> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s <= 1e-8 * scale)
            .map(|(i, _)| i)
            .collect();
        if null_rows.is_empty() {
            continue;
        }
        let basis = DMatrix::from_fn(n, null_rows.len(), |i, k| v_t[(null_rows[k], i)].conj());
        let gain = if nb == 0.0 {
            0.0
        } else {
            (complexify(sys.b()) * basis)
                .svd(false, false)
                .singular_values
                .iter()
                .fold(f64::INFINITY, |m, s| m.min(*s))
        };
        if gain <= 1e-10 {
            found.push(c(0.0, omega));
        }
    }
    found.sort_by(|a, b| a.im.total_cmp(&b.im));
    found
}
