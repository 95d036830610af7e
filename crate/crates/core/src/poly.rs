//! Dense complex polynomials and a simultaneous (Aberth-Ehrlich) root finder.

use num_complex::Complex64;
use serde::Serialize;

/// `c[0] + c[1] Y + ... + c[d] Y^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
    degenerate: bool,
}

impl ComplexPolynomial {
    /// Drops trailing zero coefficients. A polynomial whose only surviving
    /// coefficient is the constant term is flagged degenerate.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        let degenerate = coeffs.len() == 1;
        Self { coeffs, degenerate }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m: f64, c| m.max(c.norm()))
    }

    pub fn eval(&self, y: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * y + c)
    }

    /// Value and first derivative by Horner.
    pub fn eval_with_derivative(&self, y: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for c in self.coeffs.iter().rev() {
            dp = dp * y + p;
            p = p * y + c;
        }
        (p, dp)
    }

    /// All `degree()` roots. Empty for constants.
    pub fn roots(&self) -> Vec<Complex64> {
        aberth_roots(&self.coeffs)
    }
}

const MAX_ITERATIONS: usize = 500;

/// Aberth-Ehrlich iteration with a Newton polish.
///
/// Starting points lie on a circle whose radius is the geometric mean of the
/// root moduli (from the Vieta product), slightly rotated off the real axis.
pub fn aberth_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Vec::new();
    }
    let lead = coeffs[d];
    if d == 1 {
        return vec![-coeffs[0] / lead];
    }
    let poly = ComplexPolynomial {
        coeffs: coeffs.to_vec(),
        degenerate: false,
    };
    let zero_roots = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let mut roots: Vec<Complex64> = Vec::with_capacity(d);
    roots.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zero_roots));
    let reduced = &coeffs[zero_roots..];
    let m = reduced.len() - 1;
    if m == 0 {
        return roots;
    }
    if m == 1 {
        roots.push(-reduced[0] / reduced[1]);
        return roots;
    }

    let radius = (reduced[0].norm() / reduced[m].norm()).powf(1.0 / m as f64);
    let radius = if radius.is_finite() && radius > 0.0 { radius } else { 1.0 };
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let red_poly = ComplexPolynomial {
        coeffs: reduced.to_vec(),
        degenerate: false,
    };

    for _ in 0..MAX_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for i in 0..m {
            let (p, dp) = red_poly.eval_with_derivative(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..m)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        1.0 / diff
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !dp.is_finite() || dp.norm() == 0.0 {
                ratio
            } else {
                ratio / denom
            };
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        polish(&poly, zi);
    }
    roots.extend(z);
    roots
}

fn polish(poly: &ComplexPolynomial, z: &mut Complex64) {
    let mut best = *z;
    let mut best_res = poly.eval(best).norm();
    let mut cur = *z;
    for _ in 0..3 {
        let (p, dp) = poly.eval_with_derivative(cur);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        cur -= p / dp;
        let res = poly.eval(cur).norm();
        if res < best_res {
            best = cur;
            best_res = res;
        }
    }
    *z = best;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, ck) in coeffs.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            coeffs = next;
        }
        coeffs
    }

    fn assert_same_roots(mut got: Vec<Complex64>, want: &[Complex64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for w in want {
            let (idx, dist) = got
                .iter()
                .enumerate()
                .map(|(i, g)| (i, (g - w).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(dist < tol, "root {w} missed by {dist}");
            got.remove(idx);
        }
    }

    #[test]
    fn linear_and_constant() {
        assert!(aberth_roots(&[c(3.0, 0.0)]).is_empty());
        let r = aberth_roots(&[c(1.0, 1.0), c(2.0, 0.0)]);
        assert_eq!(r, vec![c(-0.5, -0.5)]);
    }

    #[test]
    fn known_roots_recovered() {
        let want = [c(1.0, 0.0), c(-2.0, 0.5), c(0.1, -3.0), c(0.0, 1e-3)];
        let got = aberth_roots(&from_roots(&want));
        assert_same_roots(got, &want, 1e-10);
    }

    #[test]
    fn zero_roots_are_exact() {
        let want = [c(0.0, 0.0), c(2.0, 1.0)];
        let got = aberth_roots(&from_roots(&want));
        assert!(got.contains(&c(0.0, 0.0)));
        assert_same_roots(got, &want, 1e-12);
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = ComplexPolynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), 1);
        assert!(!p.is_degenerate());
        let q = ComplexPolynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(q.is_degenerate());
        assert!(q.roots().is_empty());
    }

    #[test]
    fn derivative_matches_difference() {
        let p = ComplexPolynomial::new(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(2.0, 0.0)]);
        let y = c(0.3, -0.7);
        let h = 1e-6;
        let (_, dp) = p.eval_with_derivative(y);
        let fd = (p.eval(y + h) - p.eval(y - h)) / (2.0 * h);
        assert!((dp - fd).norm() < 1e-8);
    }

    proptest::proptest! {
        #[test]
        fn residuals_are_small(re in proptest::collection::vec(-3.0f64..3.0, 6),
                               im in proptest::collection::vec(-3.0f64..3.0, 6)) {
            let coeffs: Vec<Complex64> = re.iter().zip(&im).map(|(a, b)| c(*a, *b)).collect();
            proptest::prop_assume!(coeffs[5].norm() > 0.1);
            let p = ComplexPolynomial::new(coeffs);
            let scale = p.max_coeff();
            for r in p.roots() {
                let bound = scale * (1.0 + r.norm()).powi(5);
                proptest::prop_assert!(p.eval(r).norm() <= 1e-10 * bound,
                    "residual {} at {}", p.eval(r).norm(), r);
            }
        }
    }
}
