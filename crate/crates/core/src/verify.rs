//! Seeded cross-check suite: closed-form criteria against the numerical
//! classifier, `D_u` bookkeeping against the contour count, and residuals of
//! the critical delays.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charfn::eval_char;
use crate::classify::{
    class1_2var_detb0_check, class1_2var_necessary, class3_detb0_check, class3_necessary_diff, class3_necessary_sum,
    classify_auto, ClassTag,
};
use crate::delays::{all_sequences, unstable_dimension_from, unstable_dimension_scalar, DELAY_RESIDUAL};
use crate::error::{DdeError, Result};
use crate::spectrum::count_unstable;
use crate::system::LinearDde;
use num_complex::Complex64;

pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Instances per check.
    pub instances: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 0, instances: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub checked: usize,
    /// Instances the numerics declined (inconclusive, degenerate, near a bifurcation).
    pub skipped: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl CheckRow {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            checked: 0,
            skipped: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < 5 {
                self.failures.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:>7} {:>7} {:>7}  result", "check", "checked", "skipped", "failed")?;
        for r in &self.rows {
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{:<28} {:>7} {:>7} {:>7}  {verdict}", r.name, r.checked, r.skipped, r.failed)?;
            for m in &r.failures {
                writeln!(f, "    {m}")?;
            }
        }
        Ok(())
    }
}

pub fn random_mat2<R: Rng>(rng: &mut R, r: f64) -> Mat2 {
    [[rng.random_range(-r..r), rng.random_range(-r..r)], [rng.random_range(-r..r), rng.random_range(-r..r)]]
}

fn outer(u: [f64; 2], v: [f64; 2]) -> Mat2 {
    [[u[0] * v[0], u[0] * v[1]], [u[1] * v[0], u[1] * v[1]]]
}

fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Rank-one `B`, so `det B = 0`.
pub fn random_det_b_zero<R: Rng>(rng: &mut R) -> (Mat2, Mat2) {
    let a = random_mat2(rng, 3.0);
    let u = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
    let v = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
    (a, outer(u, v))
}

/// Rank-one `B = s u v^T` scaled so that `|C| = |det A|`, using
/// `C = det(A + u v^T) - det A = v^T adj(A) u`.
pub fn random_det_b_zero_equality<R: Rng>(rng: &mut R) -> Option<(Mat2, Mat2)> {
    let a = random_mat2(rng, 3.0);
    let u = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
    let v = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
    let adj_u = [a[1][1] * u[0] - a[0][1] * u[1], -a[1][0] * u[0] + a[0][0] * u[1]];
    let c = v[0] * adj_u[0] + v[1] * adj_u[1];
    let da = det2(&a);
    if c.abs() < 1e-3 || da.abs() < 1e-3 {
        return None;
    }
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let s = sign * da / c;
    Some((a, outer([s * u[0], s * u[1]], v)))
}

/// `det(A + sign B) = 0` with `det B != 0`: `A = p q^T - sign B`.
pub fn random_singular_combination<R: Rng>(rng: &mut R, sign: f64) -> (Mat2, Mat2) {
    let b = loop {
        let b = random_mat2(rng, 2.0);
        if det2(&b).abs() > 0.1 {
            break b;
        }
    };
    let p = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
    let q = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
    let m = outer(p, q);
    let a = [
        [m[0][0] - sign * b[0][0], m[0][1] - sign * b[0][1]],
        [m[1][0] - sign * b[1][0], m[1][1] - sign * b[1][1]],
    ];
    (a, b)
}

fn classify_tag(sys: &LinearDde) -> Option<ClassTag> {
    classify_auto(sys).ok().map(|v| v.tag)
}

fn lemmas_det_b_zero(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckRow {
    let mut row = CheckRow::new("class1_detB0_vs_classifier");
    for _ in 0..cfg.instances {
        let (a, b) = random_det_b_zero(rng);
        let Ok(sys) = LinearDde::two_by_two(a, b) else { continue };
        let (Ok(lemma), Some(tag)) = (class1_2var_detb0_check(&sys), classify_tag(&sys)) else {
            row.skipped += 1;
            continue;
        };
        row.record(lemma == (tag == ClassTag::I), || format!("A={a:?} B={b:?}: lemma {lemma}, classifier {tag}"));
    }
    row
}

fn lemmas_det_b_zero_equality(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckRow {
    let mut row = CheckRow::new("class3_detB0_vs_classifier");
    let mut made = 0;
    while made < cfg.instances {
        let Some((a, b)) = random_det_b_zero_equality(rng) else { continue };
        made += 1;
        let Ok(sys) = LinearDde::two_by_two(a, b) else { continue };
        let (Ok(lemma), Some(tag)) = (class3_detb0_check(&sys), classify_tag(&sys)) else {
            row.skipped += 1;
            continue;
        };
        row.record(lemma == (tag == ClassTag::III), || format!("A={a:?} B={b:?}: lemma {lemma}, classifier {tag}"));
    }
    row
}

fn necessary_conditions(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckRow {
    let mut row = CheckRow::new("necessary_conditions");
    for i in 0..3 * cfg.instances {
        let (a, b, check): (Mat2, Mat2, fn(&LinearDde) -> Result<bool>) = match i % 3 {
            0 => {
                let (a, b) = (random_mat2(rng, 3.0), random_mat2(rng, 2.0));
                (a, b, class1_2var_necessary)
            }
            1 => {
                let (a, b) = random_singular_combination(rng, 1.0);
                (a, b, class3_necessary_sum)
            }
            _ => {
                let (a, b) = random_singular_combination(rng, -1.0);
                (a, b, class3_necessary_diff)
            }
        };
        let Ok(sys) = LinearDde::two_by_two(a, b) else { continue };
        let Some(tag) = classify_tag(&sys) else {
            row.skipped += 1;
            continue;
        };
        let positive = if i % 3 == 0 { tag == ClassTag::I } else { tag == ClassTag::III };
        if !positive {
            continue;
        }
        match check(&sys) {
            Ok(ok) => row.record(ok, || format!("A={a:?} B={b:?} classified {tag} but necessary condition fails")),
            Err(_) => row.skipped += 1,
        }
    }
    row
}

fn unstable_dimension_vs_count(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckRow {
    let mut row = CheckRow::new("unstable_dimension_vs_count");
    for i in 0..cfg.instances {
        let sys = if i % 2 == 0 {
            let a: f64 = rng.random_range(-2.0..2.0);
            let mag = a.abs() + rng.random_range(0.1..2.0);
            LinearDde::scalar(a, if rng.random_bool(0.5) { mag } else { -mag })
        } else {
            match LinearDde::two_by_two(random_mat2(rng, 2.0), random_mat2(rng, 2.0)) {
                Ok(s) => s,
                Err(_) => continue,
            }
        };
        let tau = rng.random_range(0.01..20.0);
        let Ok((tag, seqs)) = all_sequences(&sys, 0) else {
            row.skipped += 1;
            continue;
        };
        if tag == ClassTag::Other {
            row.skipped += 1;
            continue;
        }
        let near = seqs.iter().any(|s| (s.tau(s.nearest(tau).0) - tau).abs() < 1e-2);
        let (Ok(du), Ok(count)) = (unstable_dimension_from(&sys, &seqs, tau), count_unstable(&sys, tau)) else {
            row.skipped += 1;
            continue;
        };
        if near {
            row.skipped += 1;
            continue;
        }
        row.record(du == count, || format!("A={:?} B={:?} tau={tau}: D_u {du}, contour {count}", sys.a(), sys.b()));
        if sys.dim() == 1 && sys.b()[(0, 0)].abs() > sys.a()[(0, 0)].abs() {
            if let Ok(closed) = unstable_dimension_scalar(sys.a()[(0, 0)], sys.b()[(0, 0)], tau) {
                row.record(closed == count, || format!("scalar tau={tau}: closed form {closed}, contour {count}"));
            }
        }
    }
    row
}

fn delay_residuals(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckRow {
    let mut row = CheckRow::new("critical_delay_residuals");
    for _ in 0..cfg.instances {
        let Ok(sys) = LinearDde::two_by_two(random_mat2(rng, 3.0), random_mat2(rng, 3.0)) else { continue };
        let seqs = match all_sequences(&sys, 5) {
            Ok((_, s)) => s,
            Err(DdeError::ResidualTooLarge { tau, residual, limit }) => {
                row.record(false, || format!("tau {tau}: residual {residual:e} > {limit:e}"));
                continue;
            }
            Err(_) => {
                row.skipped += 1;
                continue;
            }
        };
        for s in &seqs {
            for &tau in &s.taus {
                let r = eval_char(&sys, tau, Complex64::new(0.0, s.omega_h)).norm();
                let limit = DELAY_RESIDUAL * sys.scale();
                row.record(r <= limit, || format!("omega {} tau {tau}: residual {r:e}", s.omega_h));
            }
        }
    }
    row
}

/// Runs every check with independent streams derived from `cfg.seed`.
pub fn run_verification(cfg: &VerifyConfig) -> VerifyReport {
    type Check = fn(&VerifyConfig, &mut ChaCha8Rng) -> CheckRow;
    let checks: [Check; 5] = [
        lemmas_det_b_zero,
        lemmas_det_b_zero_equality,
        necessary_conditions,
        unstable_dimension_vs_count,
        delay_residuals,
    ];
    let rows = checks
        .iter()
        .enumerate()
        .map(|(i, check)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
            check(cfg, &mut rng)
        })
        .collect();
    VerifyReport { seed: cfg.seed, rows }
}
