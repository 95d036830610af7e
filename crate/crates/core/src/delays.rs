//! Critical delays `tau_k = (phi_H + 2 pi k) / omega_H`, crossing speeds and
//! unstable-dimension bookkeeping.
//!
//! Delay indices follow the affine form `tau_k` with the raw phase
//! `phi_H in (-pi, pi]`: when `phi_H <= 0` the first positive delay is `tau_1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acs::{Crossing, Direction};
use crate::charfn::eval_char;
use crate::classify::{classify_auto, ClassTag};
use crate::error::{DdeError, Result};
use crate::system::LinearDde;

/// Relative distance below which `tau` counts as sitting on a critical delay.
pub const ON_BIFURCATION_REL: f64 = 1e-9;
/// `|chi(i omega_H; tau_k)| <= DELAY_RESIDUAL * (1 + |A| + |B|)`.
pub const DELAY_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaySequence {
    #[serde(rename = "omega_H")]
    pub omega_h: f64,
    /// Raw phase in `(-pi, pi]`.
    #[serde(rename = "phi_H")]
    pub phi_h: f64,
    pub direction: Direction,
    /// Index `k` of `taus[0]` in the affine form.
    pub first_index: u32,
    pub taus: Vec<f64>,
}

impl DelaySequence {
    /// `k_max + 1` positive delays of the lattice through `phi / omega`.
    pub fn from_phase(omega_h: f64, phi_h: f64, direction: Direction, k_max: u32) -> Self {
        let phi_h = crate::acs::wrap_phase(phi_h);
        let first_index = if phi_h > 0.0 { 0 } else { 1 };
        let taus = (first_index..=first_index + k_max)
            .map(|k| (phi_h + 2.0 * PI * k as f64) / omega_h)
            .collect();
        Self {
            omega_h,
            phi_h,
            direction,
            first_index,
            taus,
        }
    }

    /// `phi_H / omega_H`; may be negative.
    pub fn intercept(&self) -> f64 {
        self.phi_h / self.omega_h
    }

    /// `2 pi / omega_H`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega_h
    }

    /// `tau_k` for any lattice index.
    pub fn tau(&self, k: i64) -> f64 {
        (self.phi_h + 2.0 * PI * k as f64) / self.omega_h
    }

    /// `(k, tau_k)` pairs of the emitted delays.
    pub fn indexed(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.taus.iter().enumerate().map(|(i, t)| (self.first_index + i as u32, *t))
    }

    /// Number of positive lattice delays strictly below `tau` (not limited to `taus`).
    pub fn count_below(&self, tau: f64) -> u64 {
        let x = (tau * self.omega_h - self.phi_h) / (2.0 * PI);
        let below = x.ceil() as i64 - self.first_index as i64;
        below.max(0) as u64
    }

    /// The lattice delay nearest to `tau`.
    pub fn nearest(&self, tau: f64) -> (i64, f64) {
        let k = ((tau * self.omega_h - self.phi_h) / (2.0 * PI)).round() as i64;
        let k = k.max(self.first_index as i64);
        (k, self.tau(k))
    }
}

fn on_lattice(tau: f64, tau_k: f64) -> bool {
    (tau - tau_k).abs() <= ON_BIFURCATION_REL * tau.abs().max(1.0)
}

/// Critical delays of one crossing, each checked against the characteristic function.
pub fn critical_delays(sys: &LinearDde, crossing: &Crossing, k_max: u32) -> Result<DelaySequence> {
    match crossing.direction {
        Direction::NonTransverse => {
            return Err(DdeError::NonTransverseCrossing { omega: crossing.omega_h })
        }
        Direction::SteadyState => {
            return Err(DdeError::PreconditionViolated(
                "a zero at omega = 0 has no critical-delay lattice".into(),
            ))
        }
        _ => {}
    }
    let seq = DelaySequence::from_phase(crossing.omega_h, crossing.phi_h, crossing.direction, k_max);
    let limit = DELAY_RESIDUAL * sys.scale();
    let lambda = Complex64::new(0.0, crossing.omega_h);
    for &tau in &seq.taus {
        let residual = eval_char(sys, tau, lambda).norm();
        if residual > limit {
            return Err(DdeError::ResidualTooLarge { tau, residual, limit });
        }
    }
    Ok(seq)
}

/// `d Re(lambda) / d tau` at `tau_H` for the crossing root:
/// `-omega_H gamma' / ((tau_H - phi')^2 + gamma'^2)`.
pub fn crossing_direction_rate(crossing: &Crossing, tau_h: f64) -> Result<f64> {
    if crossing.direction == Direction::NonTransverse {
        return Err(DdeError::NonTransverseCrossing { omega: crossing.omega_h });
    }
    if crossing.omega_h <= 0.0 {
        return Err(DdeError::PreconditionViolated("crossing rate needs omega_H > 0".into()));
    }
    let seq = DelaySequence::from_phase(crossing.omega_h, crossing.phi_h, crossing.direction, 0);
    let (_, nearest) = seq.nearest(tau_h);
    if (tau_h - nearest).abs() > 1e-6 * tau_h.abs().max(1.0) {
        return Err(DdeError::PreconditionViolated(format!(
            "tau = {tau_h} is not a critical delay of omega_H = {}",
            crossing.omega_h
        )));
    }
    let (g, p) = (crossing.dgamma, crossing.dphi);
    Ok(-crossing.omega_h * g / ((tau_h - p).powi(2) + g * g))
}

/// Unstable dimension of `x' = a x + b x(t - tau)`.
pub fn unstable_dimension_scalar(a: f64, b: f64, tau: f64) -> Result<u64> {
    if a + b == 0.0 {
        return Err(DdeError::Degenerate("a + b = 0 puts a root at lambda = 0 for every tau".into()));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(DdeError::PreconditionViolated(format!("tau must be finite and >= 0, got {tau}")));
    }
    let nu = u64::from(a + b > 0.0);
    if b.abs() <= a.abs() {
        return Ok(nu);
    }
    let omega = (b * b - a * a).sqrt();
    // minimal positive argument of 1 / Y(omega_H)
    let phi = (-(Complex64::new(-a, omega) / b).arg()).rem_euclid(2.0 * PI);
    let x = (tau * omega - phi) / (2.0 * PI);
    let k = x.round();
    if k >= 0.0 {
        let tau_k = (phi + 2.0 * PI * k) / omega;
        if on_lattice(tau, tau_k) {
            return Err(DdeError::OnBifurcation { tau, tau_k });
        }
    }
    Ok(2 * x.ceil().max(0.0) as u64 + nu)
}

/// Real root count at `tau = 0`: eigenvalues of `A + B` with `Re > 1e-10`.
pub fn unstable_dimension_at_zero(sys: &LinearDde) -> u64 {
    let m = sys.a() + sys.b();
    m.complex_eigenvalues().iter().filter(|l| l.re > 1e-10).count() as u64
}

/// Exchange of the persistent root `lambda = 0` (present when `det(A+B) = 0`)
/// with a real root: `chi'(0; tau)` is affine in `tau` and vanishes at `tau_star`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateExchange {
    pub tau_star: f64,
    /// `+1` when the real root enters the right half-plane for `tau > tau_star`.
    pub delta: i64,
}

fn char_derivative_at_zero(sys: &LinearDde, tau: f64, h: f64) -> Complex64 {
    (eval_char(sys, tau, Complex64::new(h, 0.0)) - eval_char(sys, tau, Complex64::new(-h, 0.0))) / (2.0 * h)
}

/// `None` unless `det(A+B) = 0` and the exchange happens at a positive delay.
pub fn steady_state_exchange(sys: &LinearDde) -> Option<SteadyStateExchange> {
    let scale = sys.scale();
    let chi0 = eval_char(sys, 0.0, Complex64::new(0.0, 0.0)).norm();
    if chi0 > 1e-9 * scale.powi(sys.dim() as i32) {
        return None;
    }
    let h = 1e-4 / scale;
    let c0 = char_derivative_at_zero(sys, 0.0, h).re;
    let c1 = char_derivative_at_zero(sys, 1.0, h).re - c0;
    if c1 == 0.0 {
        return None;
    }
    let tau_star = -c0 / c1;
    if !(tau_star > 0.0) {
        return None;
    }
    let chi = |l: f64| eval_char(sys, tau_star, Complex64::new(l, 0.0)).re;
    let second = (chi(h) - 2.0 * chi(0.0) + chi(-h)) / (h * h);
    // the second real root is about -2 chi'(0) / chi''(0) = -2 c1 (tau - tau_star) / chi''
    let delta = if c1 * second < 0.0 { 1 } else { -1 };
    Some(SteadyStateExchange { tau_star, delta })
}

/// Delay sequences of every transverse crossing of a classified system.
pub fn all_sequences(sys: &LinearDde, k_max: u32) -> Result<(ClassTag, Vec<DelaySequence>)> {
    let verdict = classify_auto(sys)?;
    let seqs = verdict
        .crossings
        .iter()
        .filter(|c| c.omega_h > 0.0)
        .map(|c| critical_delays(sys, c, k_max))
        .collect::<Result<Vec<_>>>()?;
    Ok((verdict.tag, seqs))
}

/// `D_u(0) + 2 #(destabilizing tau_k < tau) - 2 #(stabilizing tau_k < tau)`,
/// plus the steady-state exchange when `lambda = 0` is a root for all delays.
pub fn unstable_dimension(sys: &LinearDde, tau: f64) -> Result<u64> {
    let (tag, seqs) = all_sequences(sys, 0)?;
    if tag == ClassTag::Other {
        return Err(DdeError::Unclassified);
    }
    unstable_dimension_from(sys, &seqs, tau)
}

/// As [`unstable_dimension`] with precomputed sequences.
pub fn unstable_dimension_from(sys: &LinearDde, seqs: &[DelaySequence], tau: f64) -> Result<u64> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(DdeError::PreconditionViolated(format!("tau must be finite and >= 0, got {tau}")));
    }
    let mut du = unstable_dimension_at_zero(sys) as i64;
    for s in seqs {
        let (_, tk) = s.nearest(tau);
        if on_lattice(tau, tk) {
            return Err(DdeError::OnBifurcation { tau, tau_k: tk });
        }
        let n = s.count_below(tau) as i64;
        match s.direction {
            Direction::Destabilizing => du += 2 * n,
            Direction::Stabilizing => du -= 2 * n,
            _ => {}
        }
    }
    if let Some(ex) = steady_state_exchange(sys) {
        if on_lattice(tau, ex.tau_star) {
            return Err(DdeError::OnBifurcation { tau, tau_k: ex.tau_star });
        }
        if tau > ex.tau_star {
            du += ex.delta;
        }
    }
    if du < 0 {
        return Err(DdeError::Degenerate(format!("crossing bookkeeping gave D_u = {du}")));
    }
    Ok(du as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coincidence {
    pub k: u32,
    pub l: u32,
    pub tau_k: f64,
    pub tau_l: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DoubleHopfReport {
    pub hits: Vec<Coincidence>,
    pub near_misses: Vec<Coincidence>,
}

pub const NEAR_MISS: f64 = 1e-2;

/// Pairs `(k, l)` with `|tau_k^(1) - tau_l^(2)| <= tol`, indices up to `k_max`.
pub fn double_hopf_search(s1: &DelaySequence, s2: &DelaySequence, k_max: u32, tol: f64) -> DoubleHopfReport {
    let mut report = DoubleHopfReport::default();
    for k in s1.first_index..=k_max {
        let t1 = s1.tau(k as i64);
        for l in s2.first_index..=k_max {
            let t2 = s2.tau(l as i64);
            let c = Coincidence { k, l, tau_k: t1, tau_l: t2 };
            let gap = (t1 - t2).abs();
            if gap <= tol {
                report.hits.push(c);
            } else if gap <= NEAR_MISS {
                report.near_misses.push(c);
            }
        }
    }
    report
}

/// A double-Hopf point located along a one-parameter family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleHopfPoint {
    pub mu: f64,
    pub k: u32,
    pub l: u32,
    pub tau: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub gap: f64,
}

/// Scans `mu` over `[lo, hi]` on `n_grid` points and bisects every sign change
/// of `tau_k^(1)(mu) - tau_l^(2)(mu)`. `family` returns the outer and inner
/// sequences at `mu`. Candidates whose final gap exceeds `tol` (phase wraps)
/// are dropped.
pub fn double_hopf_scan<F>(family: F, lo: f64, hi: f64, n_grid: usize, k_max: u32, tol: f64) -> Result<Vec<DoubleHopfPoint>>
where
    F: Fn(f64) -> Result<(DelaySequence, DelaySequence)> + Sync,
{
    let grid: Vec<f64> = (0..n_grid)
        .map(|i| lo + (hi - lo) * i as f64 / (n_grid - 1) as f64)
        .collect();
    let seqs: Vec<(DelaySequence, DelaySequence)> = grid.par_iter().map(|&m| family(m)).collect::<Result<_>>()?;
    let gap = |s: &(DelaySequence, DelaySequence), k: u32, l: u32| s.0.tau(k as i64) - s.1.tau(l as i64);

    let mut jobs = Vec::new();
    for i in 0..n_grid - 1 {
        for k in 0..=k_max {
            for l in 0..=k_max {
                let (g0, g1) = (gap(&seqs[i], k, l), gap(&seqs[i + 1], k, l));
                if g0 == 0.0 || g0.signum() != g1.signum() {
                    jobs.push((grid[i], grid[i + 1], k, l, g0));
                }
            }
        }
    }
    let found: Vec<Option<DoubleHopfPoint>> = jobs
        .par_iter()
        .map(|&(mut a, mut b, k, l, mut ga)| -> Result<Option<DoubleHopfPoint>> {
            for _ in 0..80 {
                if ga == 0.0 || b - a <= 1e-15 * b.abs().max(1.0) {
                    break;
                }
                let m = 0.5 * (a + b);
                let gm = gap(&family(m)?, k, l);
                if gm.signum() == ga.signum() {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            let mu = 0.5 * (a + b);
            let s = family(mu)?;
            let g = gap(&s, k, l);
            let tau = s.0.tau(k as i64);
            let ok = g.abs() <= tol && tau > 0.0 && k >= s.0.first_index && l >= s.1.first_index;
            Ok(ok.then_some(DoubleHopfPoint {
                mu,
                k,
                l,
                tau,
                omega_1: s.0.omega_h,
                omega_2: s.1.omega_h,
                gap: g,
            }))
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<DoubleHopfPoint> = found.into_iter().flatten().collect();
    out.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    Ok(out)
}

/// Outer (destabilizing) and inner (stabilizing) sequences of a class II system.
pub fn class_two_sequences(sys: &LinearDde, k_max: u32) -> Result<(DelaySequence, DelaySequence)> {
    let (tag, mut seqs) = all_sequences(sys, k_max)?;
    if tag != ClassTag::II || seqs.len() != 2 {
        return Err(DdeError::PreconditionViolated(format!("expected a class II system, got {tag}")));
    }
    seqs.sort_by(|a, b| b.omega_h.total_cmp(&a.omega_h));
    let inner = seqs.pop().expect("two sequences");
    let outer = seqs.pop().expect("two sequences");
    Ok((outer, inner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acs::{auto_omega_max, sample_branches, DEFAULT_SAMPLES};
    use crate::system::presets;

    fn crossings(sys: &LinearDde) -> Vec<Crossing> {
        sample_branches(sys, auto_omega_max(sys), DEFAULT_SAMPLES)
            .unwrap()
            .find_crossings()
            .unwrap()
    }

    #[test]
    fn scalar_lattice() {
        let sys = presets::scalar_negative_feedback();
        let c = crossings(&sys)[0];
        let seq = critical_delays(&sys, &c, 8).unwrap();
        assert_eq!(seq.first_index, 0);
        assert!((seq.taus[0] - 2.4184).abs() < 1e-3);
        assert!((seq.taus[1] - 9.6736).abs() < 1e-3);
        assert!((seq.taus[8] - 60.4600).abs() < 1e-3);
        let gap = 2.0 * PI / seq.omega_h;
        for w in seq.taus.windows(2) {
            assert!((w[1] - w[0] - gap).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_delay_lattice() {
        let sys = LinearDde::scalar(0.0, -1.0);
        let seq = critical_delays(&sys, &crossings(&sys)[0], 3).unwrap();
        for (k, t) in seq.indexed() {
            assert!((t - (PI / 2.0 + 2.0 * PI * k as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn negative_phase_starts_at_one() {
        let seq = DelaySequence::from_phase(1.2893, -0.856, Direction::Destabilizing, 6);
        assert_eq!(seq.first_index, 1);
        assert!(seq.taus.iter().all(|t| *t > 0.0));
        assert_eq!(seq.indexed().last().unwrap().0, 7);
        assert!(seq.intercept() < 0.0);
    }

    #[test]
    fn rejects_tangential_crossing() {
        let sys = presets::scalar_negative_feedback();
        let mut c = crossings(&sys)[0];
        c.direction = Direction::NonTransverse;
        assert!(matches!(critical_delays(&sys, &c, 3), Err(DdeError::NonTransverseCrossing { .. })));
        assert!(matches!(crossing_direction_rate(&c, 2.4184), Err(DdeError::NonTransverseCrossing { .. })));
    }

    #[test]
    fn scalar_rate_closed_form() {
        // a = -0.5, b = -1: rate = 0.75 / (tau^2 + tau + 1)
        let sys = presets::scalar_negative_feedback();
        let c = crossings(&sys)[0];
        let seq = critical_delays(&sys, &c, 4).unwrap();
        let mut last = f64::INFINITY;
        for &t in &seq.taus {
            let r = crossing_direction_rate(&c, t).unwrap();
            assert!((r - 0.75 / (t * t + t + 1.0)).abs() < 1e-6 * r.abs());
            assert!(r > 0.0 && r < last);
            last = r;
        }
        assert!(crossing_direction_rate(&c, 5.0).is_err());
    }

    #[test]
    fn scalar_dimension_formula() {
        assert_eq!(unstable_dimension_scalar(-0.5, -1.0, 30.0).unwrap(), 8);
        assert_eq!(unstable_dimension_scalar(-0.5, -1.0, 1.0).unwrap(), 0);
        assert_eq!(unstable_dimension_scalar(-2.0, 1.0, 17.0).unwrap(), 0);
        assert_eq!(unstable_dimension_scalar(1.0, 0.5, 3.0).unwrap(), 1);
        assert_eq!(unstable_dimension_scalar(-0.5, 1.0, 0.0).unwrap(), 1);
        assert!(matches!(unstable_dimension_scalar(1.0, -1.0, 2.0), Err(DdeError::Degenerate(_))));
        let tau0 = (2.0 * PI / 3.0) / 0.75f64.sqrt();
        assert!(matches!(
            unstable_dimension_scalar(-0.5, -1.0, tau0),
            Err(DdeError::OnBifurcation { .. })
        ));
    }

    #[test]
    fn generic_dimension_matches_scalar() {
        for &(a, b) in &[(-0.5, -1.0), (-0.5, 1.0), (0.3, -2.0), (-2.0, 1.0)] {
            let sys = LinearDde::scalar(a, b);
            let (_, seqs) = all_sequences(&sys, 0).unwrap();
            for tau in [0.0, 0.7, 3.3, 12.9, 41.0] {
                assert_eq!(
                    unstable_dimension_from(&sys, &seqs, tau).unwrap(),
                    unstable_dimension_scalar(a, b, tau).unwrap(),
                    "a={a} b={b} tau={tau}"
                );
            }
        }
    }

    #[test]
    fn two_k_minus_one_law() {
        let sys = presets::rank_one_class_one();
        let (tag, seqs) = all_sequences(&sys, 0).unwrap();
        assert_eq!(tag, ClassTag::I);
        let s = &seqs[0];
        for k in 1..=6 {
            let mid = 0.5 * (s.tau(k - 1).max(0.0) + s.tau(k));
            assert_eq!(unstable_dimension_from(&sys, std::slice::from_ref(s), mid).unwrap(), (2 * k - 1) as u64);
        }
    }

    #[test]
    fn dimension_at_zero_counts_sum_matrix() {
        let sys = presets::rank_one_class_one();
        assert_eq!(unstable_dimension_at_zero(&sys), 1);
        assert_eq!(unstable_dimension(&sys, 0.0).unwrap(), 1);
    }

    #[test]
    fn steady_state_exchange_sum_singular() {
        let sys = presets::class_three_sum_singular();
        let ex = steady_state_exchange(&sys);
        assert!(steady_state_exchange(&presets::rank_one_class_one()).is_none());
        // chi'(0; tau) from the closed form tr(adj(-A-B)(I + tau B))
        let m = -(sys.a() + sys.b());
        let adj = nalgebra::Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]);
        let b = nalgebra::Matrix2::new(sys.b()[(0, 0)], sys.b()[(0, 1)], sys.b()[(1, 0)], sys.b()[(1, 1)]);
        let c0 = adj.trace();
        let c1 = (adj * b).trace();
        match ex {
            Some(e) => assert!((e.tau_star + c0 / c1).abs() < 1e-6),
            None => assert!(-c0 / c1 <= 0.0),
        }
    }

    #[test]
    fn self_coincidence_and_irrational_ratio() {
        let s = DelaySequence::from_phase(1.3, 0.4, Direction::Destabilizing, 5);
        let r = double_hopf_search(&s, &s, 5, 1e-6);
        assert_eq!(r.hits.len(), 6);
        assert!(r.hits.iter().all(|c| c.k == c.l));

        let sys = presets::oscillator_class_two(0.5, 4.5, 1.5);
        let (outer, inner) = class_two_sequences(&sys, 10).unwrap();
        assert!(double_hopf_search(&outer, &inner, 10, 1e-6).hits.is_empty());
    }

}
