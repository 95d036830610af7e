//! Universality classes 0/I/II/III from the ACS crossing pattern, plus the
//! closed-form criteria available for scalar and two-variable systems.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::acs::{auto_omega_max, sample_branches, AcsSpectrum, Crossing, Direction, DEFAULT_SAMPLES};
use crate::charfn::delay_independent_roots;
use crate::error::{DdeError, Result};
use crate::system::LinearDde;

/// `|gamma|` below this on a whole interval makes the verdict inconclusive.
pub const FLAT_TOL: f64 = 1e-8;
/// Relative tolerance for the exact identities the lemmas assume.
pub const IDENTITY_REL: f64 = 1e-9;
/// `|det B| <= DET_B_ZERO_REL * scale^2` counts as `det B = 0`.
pub const DET_B_ZERO_REL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassTag {
    #[serde(rename = "0")]
    Zero,
    I,
    II,
    III,
    Other,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassTag::Zero => "0",
            ClassTag::I => "I",
            ClassTag::II => "II",
            ClassTag::III => "III",
            ClassTag::Other => "Other",
        })
    }
}

/// Result of one closed-form check; `NotApplicable` when its preconditions fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaOutcome {
    Holds(bool),
    NotApplicable,
}

impl Serialize for LemmaOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LemmaOutcome::Holds(b) => s.serialize_bool(*b),
            LemmaOutcome::NotApplicable => s.serialize_str("not_applicable"),
        }
    }
}

impl<'de> Deserialize<'de> for LemmaOutcome {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            B(bool),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::B(b) => Ok(LemmaOutcome::Holds(b)),
            Raw::S(s) if s == "not_applicable" => Ok(LemmaOutcome::NotApplicable),
            Raw::S(s) => Err(serde::de::Error::custom(format!("unknown lemma outcome {s:?}"))),
        }
    }
}

impl From<Result<bool>> for LemmaOutcome {
    fn from(r: Result<bool>) -> Self {
        match r {
            Ok(b) => LemmaOutcome::Holds(b),
            Err(_) => LemmaOutcome::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityClass {
    #[serde(rename = "class")]
    pub tag: ClassTag,
    pub crossings: Vec<Crossing>,
    /// `(omega_H, direction)` in increasing frequency.
    pub pattern: Vec<(f64, Direction)>,
    pub lemma_checks: BTreeMap<String, LemmaOutcome>,
    pub notes: Vec<String>,
}

/// Classifies with the automatic frequency window and default resolution.
pub fn classify_auto(sys: &LinearDde) -> Result<UniversalityClass> {
    classify(sys, auto_omega_max(sys), DEFAULT_SAMPLES)
}

pub fn classify(sys: &LinearDde, omega_max: f64, n_samples: usize) -> Result<UniversalityClass> {
    let acs = sample_branches(sys, omega_max, n_samples)?;
    classify_spectrum(&acs)
}

/// Pattern-matches an already sampled spectrum.
pub fn classify_spectrum(acs: &AcsSpectrum) -> Result<UniversalityClass> {
    let sys = acs.system();
    let mut notes = Vec::new();
    for r in delay_independent_roots(sys) {
        if r.im >= 0.0 {
            notes.push(format!(
                "delay-independent root {:+.6}i on the imaginary axis for every tau (eigenvector in ker B)",
                r.im
            ));
        }
    }
    let lemma_checks = lemma_checks(sys);

    if acs.is_empty() {
        notes.push("generating polynomial is degenerate for every omega; the delay has no effect".into());
        return Ok(UniversalityClass {
            tag: ClassTag::Zero,
            crossings: Vec::new(),
            pattern: Vec::new(),
            lemma_checks,
            notes,
        });
    }

    check_flat(acs)?;
    let crossings = acs.find_crossings()?;
    let pattern: Vec<(f64, Direction)> = crossings.iter().map(|c| (c.omega_h, c.direction)).collect();
    let steady: Vec<&Crossing> = crossings.iter().filter(|c| c.direction == Direction::SteadyState).collect();
    let positive: Vec<&Crossing> = crossings.iter().filter(|c| c.omega_h > 0.0).collect();

    if crossings.iter().any(|c| c.direction == Direction::NonTransverse) {
        notes.push("tangential zero of the ACS; the transversality hypothesis fails".into());
    }

    let tag = if crossings.iter().any(|c| c.direction == Direction::NonTransverse) {
        ClassTag::Other
    } else {
        match (steady.len(), positive.as_slice()) {
            (0, []) if complement_ok(acs, &[], |_| 0) => ClassTag::Zero,
            (0, [c]) if c.direction == Direction::Destabilizing
                && complement_ok(acs, &[c.omega_h], |w| (w < c.omega_h) as usize) =>
            {
                ClassTag::I
            }
            (0, [inner, outer])
                if inner.direction == Direction::Stabilizing
                    && outer.direction == Direction::Destabilizing
                    && complement_ok(acs, &[inner.omega_h, outer.omega_h], |w| {
                        (w > inner.omega_h && w < outer.omega_h) as usize
                    }) =>
            {
                ClassTag::II
            }
            (1, [c]) if c.direction == Direction::Destabilizing
                && none_positive_at_zero(acs)
                && complement_ok(acs, &[0.0, c.omega_h], |w| (w < c.omega_h) as usize) =>
            {
                ClassTag::III
            }
            _ => ClassTag::Other,
        }
    };
    if tag == ClassTag::Other && !steady.is_empty() {
        notes.push("gamma(0) = 0 without the class III pattern".into());
    }
    if tag == ClassTag::Other && crossings.is_empty() {
        notes.push("ACS positive without zeros inside the window; omega_max may be too small".into());
    }
    Ok(UniversalityClass {
        tag,
        crossings,
        pattern,
        lemma_checks,
        notes,
    })
}

/// Compares the number of positive branches at every sample (away from the
/// zeros) against `expected(|omega|)`.
fn complement_ok(acs: &AcsSpectrum, zeros: &[f64], expected: impl Fn(f64) -> usize) -> bool {
    let guard = 10.0 * acs.min_step();
    acs.positive_counts().iter().all(|pc| {
        let w = acs.omegas()[pc.omega_index].abs();
        zeros.iter().any(|z| (w - z).abs() <= guard) || pc.count == expected(w)
    })
}

/// No branch is positive at `omega = 0`, so the branch positive on
/// `(0, omega_H)` is the one through `gamma(0) = 0`.
fn none_positive_at_zero(acs: &AcsSpectrum) -> bool {
    let omegas = acs.omegas();
    let Some(i0) = (0..omegas.len()).min_by(|&i, &j| omegas[i].abs().total_cmp(&omegas[j].abs())) else {
        return false;
    };
    acs.branches().iter().all(|b| b.samples[i0].gamma <= 10.0 * FLAT_TOL)
}

/// Errors with `Inconclusive` when some branch stays within `FLAT_TOL` of zero
/// over more than one initial grid step.
fn check_flat(acs: &AcsSpectrum) -> Result<()> {
    let omegas = acs.omegas();
    let coarse = 2.0 * acs.omega_max() / (crate::acs::DEFAULT_SAMPLES as f64 - 1.0);
    for b in acs.branches() {
        let mut start: Option<usize> = None;
        for (k, s) in b.samples.iter().enumerate() {
            if s.gamma.abs() < FLAT_TOL {
                let st = *start.get_or_insert(k);
                if omegas[k] - omegas[st] > coarse {
                    return Err(DdeError::Inconclusive { omega: omegas[st] });
                }
            } else {
                start = None;
            }
        }
    }
    Ok(())
}

/// Invariants of a 2x2 pair used by all two-variable criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoVarInvariants {
    pub det_a: f64,
    pub det_b: f64,
    pub tr_a: f64,
    pub tr_b: f64,
    pub det_sum: f64,
    pub det_diff: f64,
    /// `det(A+B) - det A - det B`.
    pub c: f64,
    /// Size scale `(1 + |A| + |B|)^2` for determinant tolerances.
    pub scale2: f64,
}

impl TwoVarInvariants {
    pub fn of(sys: &LinearDde) -> Result<Self> {
        if sys.dim() != 2 {
            return Err(DdeError::PreconditionViolated(format!(
                "two-variable criterion needs n = 2, got n = {}",
                sys.dim()
            )));
        }
        let (a, b) = (sys.a(), sys.b());
        let d = |m: [[f64; 2]; 2]| m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let at = [[a[(0, 0)], a[(0, 1)]], [a[(1, 0)], a[(1, 1)]]];
        let bt = [[b[(0, 0)], b[(0, 1)]], [b[(1, 0)], b[(1, 1)]]];
        let sum = [[at[0][0] + bt[0][0], at[0][1] + bt[0][1]], [at[1][0] + bt[1][0], at[1][1] + bt[1][1]]];
        let diff = [[at[0][0] - bt[0][0], at[0][1] - bt[0][1]], [at[1][0] - bt[1][0], at[1][1] - bt[1][1]]];
        let (det_a, det_b, det_sum) = (d(at), d(bt), d(sum));
        Ok(Self {
            det_a,
            det_b,
            tr_a: at[0][0] + at[1][1],
            tr_b: bt[0][0] + bt[1][1],
            det_sum,
            det_diff: d(diff),
            c: det_sum - det_a - det_b,
            scale2: sys.scale().powi(2),
        })
    }

    pub fn det_b_vanishes(&self) -> bool {
        self.det_b.abs() <= DET_B_ZERO_REL * self.scale2
    }

    fn vanishes(&self, x: f64) -> bool {
        x.abs() <= IDENTITY_REL * self.scale2
    }

    fn delay_is_inert(&self) -> bool {
        self.vanishes(self.c) && self.vanishes(self.tr_b) && self.det_b_vanishes()
    }

    /// `nu_1 = Tr A + Tr B`, `nu_2 = det B - det A`.
    pub fn nu12(&self) -> (f64, f64) {
        (self.tr_a + self.tr_b, self.det_b - self.det_a)
    }

    /// `nu_3 = Tr A - Tr B`, `nu_4 = det(A+B) - det A - 3 det B`.
    pub fn nu34(&self) -> (f64, f64) {
        (self.tr_a - self.tr_b, self.det_sum - self.det_a - 3.0 * self.det_b)
    }
}

/// Scalar class I: `|b| > |a|`.
pub fn class1_scalar_check(a: f64, b: f64) -> Result<bool> {
    if b == 0.0 {
        return Err(DdeError::ZeroDelayCoupling);
    }
    Ok(b.abs() > a.abs())
}

/// Two-variable, `det B = 0`: class I iff `|det A| < |C|`.
pub fn class1_2var_detb0_check(sys: &LinearDde) -> Result<bool> {
    let v = TwoVarInvariants::of(sys)?;
    if !v.det_b_vanishes() {
        return Err(DdeError::PreconditionViolated(format!("det B = {} is not zero", v.det_b)));
    }
    if v.delay_is_inert() {
        return Err(DdeError::Degenerate("C, Tr B and det B all vanish; the delay has no effect".into()));
    }
    Ok(v.det_a.abs() < v.c.abs())
}

/// Necessary for class I with `n = 2`: `det B != 0` and `|C| > |det A + det B|`.
pub fn class1_2var_necessary(sys: &LinearDde) -> Result<bool> {
    let v = TwoVarInvariants::of(sys)?;
    Ok(!v.det_b_vanishes() && v.c.abs() > (v.det_a + v.det_b).abs())
}

/// Rotation `[[alpha, beta], [-beta, alpha]]` with `B = mu I`:
/// class II iff `|alpha| < |mu|` and `alpha^2 + beta^2 > mu^2`.
pub fn class2_rotational_check(alpha: f64, beta: f64, mu: f64) -> Result<bool> {
    if !(beta > 0.0) || mu == 0.0 {
        return Err(DdeError::PreconditionViolated(format!(
            "needs beta > 0 and mu != 0, got beta = {beta}, mu = {mu}"
        )));
    }
    Ok(alpha.abs() < mu.abs() && alpha * alpha + beta * beta > mu * mu)
}

/// Recognizes the rotational form and returns `(alpha, beta, mu)`.
pub fn rotational_parameters(sys: &LinearDde) -> Option<(f64, f64, f64)> {
    if sys.dim() != 2 {
        return None;
    }
    let (a, b) = (sys.a(), sys.b());
    let rotational = a[(0, 0)] == a[(1, 1)] && a[(0, 1)] == -a[(1, 0)];
    let isotropic = b[(0, 0)] == b[(1, 1)] && b[(0, 1)] == 0.0 && b[(1, 0)] == 0.0;
    (rotational && isotropic).then(|| (a[(0, 0)], a[(0, 1)], b[(0, 0)]))
}

/// Two-variable, `det B = 0`: class III iff `|det A| = |C|` and
/// `(Tr A)^2 - (Tr B)^2 < 2 det A`.
pub fn class3_detb0_check(sys: &LinearDde) -> Result<bool> {
    let v = TwoVarInvariants::of(sys)?;
    if !v.det_b_vanishes() {
        return Err(DdeError::PreconditionViolated(format!("det B = {} is not zero", v.det_b)));
    }
    let (da, c) = (v.det_a.abs(), v.c.abs());
    let equal = (da - c).abs() <= IDENTITY_REL * da.max(c).max(f64::MIN_POSITIVE);
    Ok(equal && v.tr_a * v.tr_a - v.tr_b * v.tr_b < 2.0 * v.det_a)
}

fn det_b_nonzero_and(v: &TwoVarInvariants, det: f64, what: &str) -> Result<()> {
    if v.det_b_vanishes() {
        return Err(DdeError::PreconditionViolated("det B = 0".into()));
    }
    if !v.vanishes(det) {
        return Err(DdeError::PreconditionViolated(format!("{what} = {det} is not zero")));
    }
    Ok(())
}

/// Necessary for class III when `det B != 0`, `det(A+B) = 0`:
/// `|det A| > |det B|` and `nu_1^2 + 2 [nu_2 - nu_1 Tr B + nu_1^2 det B / nu_2] < 0`.
///
/// The second inequality is `gamma_2''(0) > 0` written out; see
/// [`class3_necessary_sum_printed`] for the variant with `(nu_1/nu_2)^2 det B`.
pub fn class3_necessary_sum(sys: &LinearDde) -> Result<bool> {
    let v = TwoVarInvariants::of(sys)?;
    det_b_nonzero_and(&v, v.det_sum, "det(A+B)")?;
    let (n1, n2) = v.nu12();
    let cond1 = v.det_a.abs() > v.det_b.abs();
    let cond2 = n1 * n1 + 2.0 * (n2 - n1 * v.tr_b + n1 * n1 * v.det_b / n2) < 0.0;
    Ok(cond1 && cond2)
}

/// The `det(A+B) = 0` conditions with the second inequality in its
/// `2 [nu_2 - nu_1 Tr B + (nu_1/nu_2)^2 det B] + nu_1^2 < 0` form.
pub fn class3_necessary_sum_printed(sys: &LinearDde) -> Result<bool> {
    let v = TwoVarInvariants::of(sys)?;
    det_b_nonzero_and(&v, v.det_sum, "det(A+B)")?;
    let (n1, n2) = v.nu12();
    let r = n1 / n2;
    Ok(v.det_a.abs() > v.det_b.abs() && 2.0 * (n2 - n1 * v.tr_b + r * r * v.det_b) + n1 * n1 < 0.0)
}

/// Necessary for class III when `det B != 0`, `det(A-B) = 0`:
/// `C^2 > max(4 det A det B, 2 det A det B + 2 det B^2)` and
/// `2 [nu_4 - nu_3 Tr B + nu_3^2 det B / nu_4] - nu_3^2 > 0`.
pub fn class3_necessary_diff(sys: &LinearDde) -> Result<bool> {
    let v = TwoVarInvariants::of(sys)?;
    det_b_nonzero_and(&v, v.det_diff, "det(A-B)")?;
    let (n3, n4) = v.nu34();
    let cond3 = diff_condition3(&v);
    let cond4 = 2.0 * (n4 - n3 * v.tr_b + n3 * n3 * v.det_b / n4) - n3 * n3 > 0.0;
    Ok(cond3 && cond4)
}

/// The `det(A-B) = 0` conditions with the second inequality in its
/// `2 [nu_4 + nu_3 Tr B + (nu_3/nu_4)^2 det B] - nu_3^2 > 0` form.
pub fn class3_necessary_diff_printed(sys: &LinearDde) -> Result<bool> {
    let v = TwoVarInvariants::of(sys)?;
    det_b_nonzero_and(&v, v.det_diff, "det(A-B)")?;
    let (n3, n4) = v.nu34();
    let r = n3 / n4;
    Ok(diff_condition3(&v) && 2.0 * (n4 + n3 * v.tr_b + r * r * v.det_b) - n3 * n3 > 0.0)
}

fn diff_condition3(v: &TwoVarInvariants) -> bool {
    let ab = v.det_a * v.det_b;
    v.c * v.c > (4.0 * ab).max(2.0 * ab + 2.0 * v.det_b * v.det_b)
}

/// Every closed-form check evaluated on `sys`, keyed by name.
pub fn lemma_checks(sys: &LinearDde) -> BTreeMap<String, LemmaOutcome> {
    let mut out = BTreeMap::new();
    let scalar = if sys.dim() == 1 {
        class1_scalar_check(sys.a()[(0, 0)], sys.b()[(0, 0)]).into()
    } else {
        LemmaOutcome::NotApplicable
    };
    out.insert("class1_scalar".to_string(), scalar);
    out.insert("class1_2var_detB0".into(), class1_2var_detb0_check(sys).into());
    out.insert("class1_2var_necessary".into(), class1_2var_necessary(sys).into());
    let rot = rotational_parameters(sys)
        .map(|(a, b, m)| class2_rotational_check(a, b, m).into())
        .unwrap_or(LemmaOutcome::NotApplicable);
    out.insert("class2_rotational".into(), rot);
    out.insert("class3_detB0".into(), class3_detb0_check(sys).into());
    out.insert("class3_necessary_sum".into(), class3_necessary_sum(sys).into());
    out.insert("class3_necessary_diff".into(), class3_necessary_diff(sys).into());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::presets;

    fn tag(sys: &LinearDde) -> ClassTag {
        classify_auto(sys).unwrap().tag
    }

    #[test]
    fn worked_systems() {
        assert_eq!(tag(&presets::scalar_negative_feedback()), ClassTag::I);
        assert_eq!(tag(&LinearDde::scalar(-2.0, 1.0)), ClassTag::Zero);
        assert_eq!(tag(&presets::rank_one_class_one()), ClassTag::I);
        assert_eq!(tag(&presets::class_one_negative_c()), ClassTag::I);
        assert_eq!(tag(&presets::class_one_positive_c()), ClassTag::I);
        assert_eq!(tag(&presets::oscillator_class_two(0.5, 4.5, 1.5)), ClassTag::II);
        assert_eq!(tag(&presets::rotational(0.5, 3.5, 2.2)), ClassTag::II);
        assert_eq!(tag(&presets::rank_one_class_three()), ClassTag::III);
        assert_eq!(tag(&presets::class_three_sum_singular()), ClassTag::III);
        assert_eq!(tag(&presets::class_three_diff_singular()), ClassTag::III);
    }

    #[test]
    fn zero_coupling_is_class_zero_with_note() {
        let sys = LinearDde::two_by_two([[0.0, 1.0], [-1.0, 0.0]], [[0.0; 2]; 2]).unwrap();
        let v = classify_auto(&sys).unwrap();
        assert_eq!(v.tag, ClassTag::Zero);
        assert!(v.notes.iter().any(|n| n.contains("degenerate")));
        assert!(v.notes.iter().any(|n| n.contains("delay-independent")));
    }

    #[test]
    fn scalar_check() {
        assert!(class1_scalar_check(-0.5, -1.0).unwrap());
        assert!(!class1_scalar_check(-2.0, 1.0).unwrap());
        assert!(!class1_scalar_check(1.0, 1.0).unwrap());
        assert_eq!(class1_scalar_check(1.0, 0.0), Err(DdeError::ZeroDelayCoupling));
    }

    #[test]
    fn two_variable_class_one_checks() {
        assert!(class1_2var_detb0_check(&presets::rank_one_class_one()).unwrap());
        assert!(class1_2var_necessary(&presets::class_one_negative_c()).unwrap());
        assert!(class1_2var_necessary(&presets::class_one_positive_c()).unwrap());
        assert!(!class1_2var_necessary(&presets::rank_one_class_one()).unwrap());
        // A = I with rank-one B and C = 0
        let sys = LinearDde::two_by_two([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 0.0]]).unwrap();
        let v = TwoVarInvariants::of(&sys).unwrap();
        assert_eq!(v.c, 1.0);
        // with A = I, C = Tr B, so C = 0 and det B = 0 leave the delay inert
        let sys = LinearDde::two_by_two([[1.0, 0.0], [0.0, 1.0]], [[1.0, 1.0], [-1.0, -1.0]]).unwrap();
        assert_eq!(TwoVarInvariants::of(&sys).unwrap().c, 0.0);
        assert!(matches!(class1_2var_detb0_check(&sys), Err(DdeError::Degenerate(_))));
        let sys = LinearDde::two_by_two([[1.0, 0.0], [0.0, 2.0]], [[1.0, 1.0], [-2.0, -2.0]]).unwrap();
        assert_eq!(TwoVarInvariants::of(&sys).unwrap().c, 0.0);
        assert!(!class1_2var_detb0_check(&sys).unwrap());
        assert_ne!(tag(&sys), ClassTag::I);
        let inert = LinearDde::two_by_two([[1.0, 0.0], [0.0, 1.0]], [[0.0; 2]; 2]).unwrap();
        assert!(matches!(class1_2var_detb0_check(&inert), Err(DdeError::Degenerate(_))));
        assert!(matches!(
            class1_2var_detb0_check(&presets::class_one_negative_c()),
            Err(DdeError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn rotational_check() {
        assert!(class2_rotational_check(0.5, 3.5, 2.2).unwrap());
        assert!(!class2_rotational_check(0.5, 0.5, 2.2).unwrap());
        assert!(!class2_rotational_check(3.0, 1.0, 2.0).unwrap());
        assert!(class2_rotational_check(0.5, -1.0, 2.0).is_err());
        assert_eq!(
            rotational_parameters(&presets::rotational(0.5, 3.5, 2.2)),
            Some((0.5, 3.5, 2.2))
        );
    }

    #[test]
    fn class_three_checks() {
        assert!(class3_detb0_check(&presets::rank_one_class_three()).unwrap());
        assert!(!class3_detb0_check(&presets::rank_one_class_one()).unwrap());

        let sum = presets::class_three_sum_singular();
        let v = TwoVarInvariants::of(&sum).unwrap();
        assert!((v.det_a - 5.8).abs() < 1e-12 && (v.det_b + 3.8).abs() < 1e-12);
        let (n1, n2) = v.nu12();
        assert!((n1 - 0.8).abs() < 1e-12 && (n2 + 9.6).abs() < 1e-12);
        assert!(class3_necessary_sum(&sum).unwrap());
        assert!(class3_necessary_sum_printed(&sum).unwrap());
        assert!(matches!(class3_necessary_diff(&sum), Err(DdeError::PreconditionViolated(_))));

        let diff = presets::class_three_diff_singular();
        assert!(class3_necessary_diff(&diff).unwrap());
        assert!(class3_necessary_diff_printed(&diff).unwrap());
    }

    #[test]
    fn printed_second_conditions_reject_class_three_systems() {
        let sum = LinearDde::two_by_two([[-3.0, -1.0], [1.0, -4.0]], [[3.0, 1.0], [1.0, 3.0]]).unwrap();
        assert_eq!(TwoVarInvariants::of(&sum).unwrap().det_sum, 0.0);
        assert_eq!(tag(&sum), ClassTag::III);
        assert!(class3_necessary_sum(&sum).unwrap());
        assert!(!class3_necessary_sum_printed(&sum).unwrap());

        let diff = LinearDde::two_by_two([[2.0, 2.0], [3.0, -4.0]], [[3.0, 1.0], [2.0, -3.0]]).unwrap();
        assert_eq!(TwoVarInvariants::of(&diff).unwrap().det_diff, 0.0);
        assert_eq!(tag(&diff), ClassTag::III);
        assert!(class3_necessary_diff(&diff).unwrap());
        assert!(!class3_necessary_diff_printed(&diff).unwrap());
    }

    #[test]
    fn verdict_json_round_trip() {
        let v = classify_auto(&presets::rotational(0.5, 3.5, 2.2)).unwrap();
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("\"class\":\"II\""));
        assert!(text.contains("\"class2_rotational\":true"));
        assert!(text.contains("\"class1_scalar\":\"not_applicable\""));
        let back: UniversalityClass = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
