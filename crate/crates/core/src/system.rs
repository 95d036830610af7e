//! The linear delay system `x'(t) = A x(t) + B x(t - tau)` and its JSON form.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{DdeError, Result};

/// Real `n x n` coefficient pair of a single-delay linear DDE.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDde {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    norm_a: f64,
    norm_b: f64,
}

/// On-disk form: `{"A": [[..],[..]], "B": [[..],[..]], "tau": optional}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SystemDocument {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl LinearDde {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() || a.nrows() == 0 {
            return Err(DdeError::InvalidSystem(format!(
                "A must be square and nonempty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.shape() != b.shape() {
            return Err(DdeError::InvalidSystem(format!(
                "A is {}x{} but B is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(DdeError::InvalidSystem("non-finite matrix entry".into()));
        }
        let (norm_a, norm_b) = (spectral_norm(&a), spectral_norm(&b));
        Ok(Self { a, b, norm_a, norm_b })
    }

    /// Builds from row-major nested rows.
    pub fn from_rows(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows_to_matrix(a, "A")?, rows_to_matrix(b, "B")?)
    }

    pub fn scalar(a: f64, b: f64) -> Self {
        Self::new(DMatrix::from_element(1, 1, a), DMatrix::from_element(1, 1, b))
            .expect("finite scalar coefficients")
    }

    /// Two-variable system from row-major entries.
    pub fn two_by_two(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(
            DMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]]),
            DMatrix::from_row_slice(2, 2, &[b[0][0], b[0][1], b[1][0], b[1][1]]),
        )
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Spectral norms `(|A|_2, |B|_2)`.
    pub fn norms(&self) -> (f64, f64) {
        (self.norm_a, self.norm_b)
    }

    /// `1 + |A|_2 + |B|_2`, the size scale used by residual tolerances.
    pub fn scale(&self) -> f64 {
        let (na, nb) = self.norms();
        1.0 + na + nb
    }

    pub fn to_document(&self, tau: Option<f64>) -> SystemDocument {
        SystemDocument {
            a: matrix_to_rows(&self.a),
            b: matrix_to_rows(&self.b),
            tau,
        }
    }

    pub fn from_json(text: &str) -> Result<(Self, Option<f64>)> {
        let doc: SystemDocument =
            serde_json::from_str(text).map_err(|e| DdeError::Input(e.to_string()))?;
        let sys = Self::from_rows(&doc.a, &doc.b)?;
        if let Some(t) = doc.tau {
            if !(t.is_finite() && t >= 0.0) {
                return Err(DdeError::Input(format!("tau must be finite and >= 0, got {t}")));
            }
        }
        Ok((sys, doc.tau))
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(DdeError::InvalidSystem(format!("{name} has no rows")));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(DdeError::InvalidSystem(format!(
            "{name} row {bad} has {} entries, expected {n}",
            rows[bad].len()
        )));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(n, n, &flat))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |acc: f64, s| acc.max(*s))
}

/// Systems that appear throughout the examples and tests.
pub mod presets {
    use super::LinearDde;

    /// `x' = -0.5 x - x(t - tau)`: one destabilizing crossing family.
    pub fn scalar_negative_feedback() -> LinearDde {
        LinearDde::scalar(-0.5, -1.0)
    }

    /// Rank-one delayed coupling with a single crossing pair.
    pub fn rank_one_class_one() -> LinearDde {
        LinearDde::two_by_two([[-0.6, 0.2], [0.2, -2.0]], [[1.0, -1.0], [-1.0, 1.0]]).unwrap()
    }

    /// Invertible delayed coupling, negative `C`.
    pub fn class_one_negative_c() -> LinearDde {
        LinearDde::two_by_two([[1.0, -2.0], [4.0, -3.0]], [[-3.0, 4.0], [-2.0, 1.55]]).unwrap()
    }

    /// Invertible delayed coupling, positive `C`.
    pub fn class_one_positive_c() -> LinearDde {
        LinearDde::two_by_two([[2.0, 1.0], [3.0, 1.0]], [[2.0, -1.0], [1.0, 1.0]]).unwrap()
    }

    /// Damped oscillator with delayed feedback on both components.
    pub fn oscillator_class_two(alpha: f64, beta: f64, phi: f64) -> LinearDde {
        LinearDde::two_by_two([[-alpha, beta], [-phi, 0.0]], [[-alpha, -beta], [0.0, -phi]])
            .unwrap()
    }

    /// Rotation `[[alpha, beta], [-beta, alpha]]` with isotropic delayed gain `mu`.
    pub fn rotational(alpha: f64, beta: f64, mu: f64) -> LinearDde {
        LinearDde::two_by_two([[alpha, beta], [-beta, alpha]], [[mu, 0.0], [0.0, mu]]).unwrap()
    }

    /// Rank-one delayed coupling with `|det A| = |C|`.
    pub fn rank_one_class_three() -> LinearDde {
        LinearDde::two_by_two([[1.0, -2.0], [4.0, -3.0]], [[2.0, -1.0], [-2.0, 1.0]]).unwrap()
    }

    /// Invertible delayed coupling with `det(A + B) = 0`.
    pub fn class_three_sum_singular() -> LinearDde {
        LinearDde::two_by_two([[1.0, -2.0], [4.0, -2.2]], [[-1.0, -0.2], [-4.0, 3.0]]).unwrap()
    }

    /// Invertible delayed coupling with `det(A - B) = 0`.
    pub fn class_three_diff_singular() -> LinearDde {
        LinearDde::two_by_two([[1.0, -2.0], [4.0, -3.0]], [[1.0, -0.5], [4.0, -3.0]]).unwrap()
    }

    /// Real form of the linearized Stuart-Landau oscillator with delayed feedback,
    /// `z' = (alpha + i beta) z + z(t - tau)` written in `(Re z, Im z)`.
    pub fn stuart_landau_linear(alpha: f64, beta: f64) -> LinearDde {
        LinearDde::two_by_two([[alpha, -beta], [beta, alpha]], [[1.0, 0.0], [0.0, 1.0]]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{"A": [[-0.6, 0.2], [0.2, -2]], "B": [[1, -1], [-1, 1]], "tau": 3.5}"#;
        let (sys, tau) = LinearDde::from_json(text).unwrap();
        assert_eq!(sys.dim(), 2);
        assert_eq!(tau, Some(3.5));
        assert_eq!(sys, presets::rank_one_class_one());
        let back = serde_json::to_string(&sys.to_document(tau)).unwrap();
        let (again, _) = LinearDde::from_json(&back).unwrap();
        assert_eq!(again, sys);
    }

    #[test]
    fn rejects_shape_mismatch() {
        let text = r#"{"A": [[1, 0], [0, 1]], "B": [[1]]}"#;
        assert!(matches!(LinearDde::from_json(text), Err(DdeError::InvalidSystem(_))));
        let ragged = r#"{"A": [[1, 0], [0]], "B": [[1, 0], [0, 1]]}"#;
        assert!(matches!(LinearDde::from_json(ragged), Err(DdeError::InvalidSystem(_))));
    }

    #[test]
    fn rejects_garbage_and_bad_tau() {
        assert!(matches!(LinearDde::from_json("{"), Err(DdeError::Input(_))));
        let neg = r#"{"A": [[1]], "B": [[1]], "tau": -1}"#;
        assert!(matches!(LinearDde::from_json(neg), Err(DdeError::Input(_))));
    }

    #[test]
    fn norms_of_rotation() {
        let sys = presets::rotational(0.5, 3.5, 2.2);
        let (na, nb) = sys.norms();
        assert!((na - (0.25f64 + 12.25).sqrt()).abs() < 1e-12);
        assert!((nb - 2.2).abs() < 1e-12);
    }
}
