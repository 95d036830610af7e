//! Delayed Stuart-Landau oscillator
//! `z' = (alpha + i beta) z - z |z|^2 + z(t - tau)`:
//! Hopf delays of `z = 0`, rotating-wave branches `z = a e^{i omega t}`, and a
//! method-of-steps integrator.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::acs::Direction;
use crate::delays::DelaySequence;
use crate::error::{DdeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlParams {
    pub alpha: f64,
    pub beta: f64,
}

impl SlParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(DdeError::Input(format!("non-finite parameters ({alpha}, {beta})")));
        }
        Ok(Self { alpha, beta })
    }

    fn rotation(&self) -> Complex64 {
        Complex64::new(self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlHopf {
    /// Crossings at `omega_H1 = beta + sqrt(1 - alpha^2)`.
    pub destabilizing: Option<DelaySequence>,
    /// Crossings at `omega_H2 = beta - sqrt(1 - alpha^2)`, reported at `|omega|`.
    pub stabilizing: Option<DelaySequence>,
    pub notes: Vec<String>,
}

/// Hopf delays of the trivial solution. Empty for `|alpha| >= 1`.
pub fn sl_hopf_sequence(p: SlParams, k_max: u32) -> SlHopf {
    let mut out = SlHopf {
        destabilizing: None,
        stabilizing: None,
        notes: Vec::new(),
    };
    if p.alpha.abs() >= 1.0 {
        out.notes.push(format!(
            "class 0: |alpha| = {} >= 1, no Hopf bifurcations of z = 0",
            p.alpha.abs()
        ));
        return out;
    }
    let s = (1.0 - p.alpha * p.alpha).sqrt();
    let seq = |sign: f64, dir: Direction| -> Option<DelaySequence> {
        let omega = p.beta + sign * s;
        let phi = -Complex64::new(-p.alpha, sign * s).arg();
        if omega > 0.0 {
            Some(DelaySequence::from_phase(omega, phi, dir, k_max))
        } else if omega < 0.0 {
            // the real pair crosses at -omega with the conjugate phase
            Some(DelaySequence::from_phase(-omega, -phi, dir, k_max))
        } else {
            None
        }
    };
    out.destabilizing = seq(1.0, Direction::Destabilizing);
    out.stabilizing = seq(-1.0, Direction::Stabilizing);
    if out.stabilizing.is_none() {
        out.notes.push("omega_H2 = 0: stabilizing crossing is a steady state, no delays".into());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub phi: f64,
    pub a: f64,
    pub tau: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchEnd {
    /// `a = 0`: the branch is born from `z = 0` at this Hopf delay.
    Hopf { tau: f64, omega: f64 },
    /// `beta - sin phi = 0`: `tau` diverges.
    Pole,
    /// `tau` reaches 0.
    ZeroDelay,
    /// End of the sampled phase interval; continues into branch `k + 1`.
    Wrap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicBranch {
    pub k: u32,
    pub component_id: usize,
    pub samples: Vec<BranchSample>,
    pub start: BranchEnd,
    pub end: BranchEnd,
}

impl PeriodicBranch {
    /// Both ends are Hopf points: a bridge between two Hopf delays.
    pub fn is_bridge(&self) -> bool {
        matches!(self.start, BranchEnd::Hopf { .. }) && matches!(self.end, BranchEnd::Hopf { .. })
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.start, BranchEnd::Pole) && !matches!(self.end, BranchEnd::Pole)
    }
}

/// Rotating wave at phase `phi = omega tau - 2 pi k`.
pub fn branch_sample(p: SlParams, k: u32, phi: f64) -> BranchSample {
    let a = (p.alpha + phi.cos()).max(0.0).sqrt();
    let omega = p.beta - phi.sin();
    BranchSample {
        phi,
        a,
        tau: (phi + 2.0 * PI * k as f64) / omega,
        omega,
    }
}

/// `|i omega - (alpha + i beta) + a^2 - e^{-i omega tau}|`.
pub fn rotating_wave_residual(p: SlParams, s: &BranchSample) -> f64 {
    let lhs = Complex64::new(0.0, s.omega);
    let rhs = p.rotation() - s.a * s.a + Complex64::from_polar(1.0, -s.omega * s.tau);
    (lhs - rhs).norm()
}

/// Rotating-wave branches for `k = 0..=k_max`, sampled over `phi in [-pi, pi]`
/// and split into components at `a = 0`, at poles `sin phi = beta` and where
/// `tau` leaves `(0, inf)`.
pub fn sl_branches(p: SlParams, k_max: u32, n_phi: usize) -> Vec<PeriodicBranch> {
    let n_phi = n_phi.max(8);
    let mut cuts: Vec<(f64, BranchEnd)> = Vec::new();
    if p.alpha.abs() < 1.0 {
        let phi_star = (-p.alpha).acos();
        for ph in [phi_star, -phi_star] {
            cuts.push((ph, BranchEnd::Hopf { tau: 0.0, omega: p.beta - ph.sin() }));
        }
    }
    if p.beta.abs() <= 1.0 {
        let s = p.beta.asin();
        for ph in [s, PI - s, -PI - s] {
            if (-PI..=PI).contains(&ph) {
                cuts.push((ph, BranchEnd::Pole));
            }
        }
    }

    let mut out = Vec::new();
    let mut component_id = 0;
    for k in 0..=k_max {
        let mut breaks = cuts.clone();
        if k == 0 {
            breaks.push((0.0, BranchEnd::ZeroDelay));
        }
        breaks.push((-PI, BranchEnd::Wrap));
        breaks.push((PI, BranchEnd::Wrap));
        breaks.sort_by(|a, b| a.0.total_cmp(&b.0));
        breaks.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15);

        for w in breaks.windows(2) {
            let ((lo, lo_kind), (hi, hi_kind)) = (w[0], w[1]);
            if hi - lo < 1e-12 {
                continue;
            }
            let mid = branch_sample(p, k, 0.5 * (lo + hi));
            if p.alpha + mid.phi.cos() <= 0.0 || !(mid.tau > 0.0) {
                continue;
            }
            let m = ((n_phi as f64) * (hi - lo) / (2.0 * PI)).ceil().max(4.0) as usize;
            let mut samples = Vec::with_capacity(m + 1);
            for i in 0..=m {
                let phi = lo + (hi - lo) * i as f64 / m as f64;
                let at_pole = |kind: BranchEnd| matches!(kind, BranchEnd::Pole);
                if (i == 0 && at_pole(lo_kind)) || (i == m && at_pole(hi_kind)) {
                    continue;
                }
                let mut s = branch_sample(p, k, phi);
                if (i == 0 && matches!(lo_kind, BranchEnd::Hopf { .. })) || (i == m && matches!(hi_kind, BranchEnd::Hopf { .. })) {
                    s.a = 0.0;
                }
                samples.push(s);
            }
            let tag = |kind: BranchEnd, phi: f64| match kind {
                BranchEnd::Hopf { .. } => {
                    let s = branch_sample(p, k, phi);
                    BranchEnd::Hopf { tau: s.tau, omega: s.omega }
                }
                other => other,
            };
            out.push(PeriodicBranch {
                k,
                component_id,
                samples,
                start: tag(lo_kind, lo),
                end: tag(hi_kind, hi),
            });
            component_id += 1;
        }
    }
    out
}

/// Branches disconnect when `tau(phi)` has a pole inside the existence region.
pub fn branches_disconnected(branches: &[PeriodicBranch]) -> bool {
    branches.iter().any(|b| !b.is_bounded())
}

/// CSV columns `k, phi, a, tau, omega, component_id`.
pub fn write_branches_csv<W: Write>(branches: &[PeriodicBranch], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "phi", "a", "tau", "omega", "component_id"])
        .map_err(|e| DdeError::Input(e.to_string()))?;
    for b in branches {
        for s in &b.samples {
            w.write_record(&[
                b.k.to_string(),
                s.phi.to_string(),
                s.a.to_string(),
                s.tau.to_string(),
                s.omega.to_string(),
                b.component_id.to_string(),
            ])
            .map_err(|e| DdeError::Input(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| DdeError::Input(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub re_z: f64,
    pub im_z: f64,
    pub abs_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: SlParams,
    pub tau: f64,
    pub dt: f64,
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(p).map_err(|e| DdeError::Input(e.to_string()))?;
        }
        w.flush().map_err(|e| DdeError::Input(e.to_string()))
    }
}

/// RK4 by the method of steps; delayed values come from cubic Hermite
/// interpolation of the stored solution and its derivative.
pub fn sl_simulate(p: SlParams, tau: f64, z_history: Complex64, t_end: f64, dt: f64) -> Result<Trajectory> {
    if !(tau > 0.0) || !(dt > 0.0) {
        return Err(DdeError::PreconditionViolated(format!("need tau > 0 and dt > 0, got tau {tau}, dt {dt}")));
    }
    let limit = tau / 20.0;
    if dt > limit {
        return Err(DdeError::StepTooLarge { dt, limit });
    }
    if t_end < 20.0 * tau {
        return Err(DdeError::PreconditionViolated(format!("t_end {t_end} < 20 tau = {}", 20.0 * tau)));
    }
    let rot = p.rotation();
    let rhs = |z: Complex64, zd: Complex64| rot * z - z * z.norm_sqr() + zd;
    let steps = (t_end / dt).ceil() as usize;
    let mut zs: Vec<Complex64> = Vec::with_capacity(steps + 1);
    let mut fs: Vec<Complex64> = Vec::with_capacity(steps + 1);

    let delayed = |s: f64, zs: &[Complex64], fs: &[Complex64]| -> Complex64 {
        if s <= 0.0 {
            return z_history;
        }
        let x = s / dt;
        let i = (x.floor() as usize).min(zs.len() - 2);
        let th = x - i as f64;
        let (h00, h10) = ((1.0 + 2.0 * th) * (1.0 - th).powi(2), th * (1.0 - th).powi(2));
        let (h01, h11) = (th * th * (3.0 - 2.0 * th), th * th * (th - 1.0));
        zs[i] * h00 + fs[i] * (h10 * dt) + zs[i + 1] * h01 + fs[i + 1] * (h11 * dt)
    };

    zs.push(z_history);
    fs.push(rhs(z_history, z_history));
    for n in 0..steps {
        let t = n as f64 * dt;
        let z = zs[n];
        // stage delays never reach beyond t_n because dt <= tau / 20
        let d0 = delayed(t - tau, &zs, &fs);
        let dh = delayed(t + 0.5 * dt - tau, &zs, &fs);
        let d1 = delayed(t + dt - tau, &zs, &fs);
        let k1 = rhs(z, d0);
        let k2 = rhs(z + k1 * (0.5 * dt), dh);
        let k3 = rhs(z + k2 * (0.5 * dt), dh);
        let k4 = rhs(z + k3 * dt, d1);
        let next = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        zs.push(next);
        fs.push(rhs(next, d1));
    }
    let points = zs
        .iter()
        .enumerate()
        .map(|(n, z)| TrajectoryPoint {
            t: n as f64 * dt,
            re_z: z.re,
            im_z: z.im,
            abs_z: z.norm(),
        })
        .collect();
    Ok(Trajectory { params: p, tau, dt, points })
}

pub const PROBE_AMPLITUDE: f64 = 1e-6;
/// The linear regime ends once `|z|` exceeds this.
pub const LINEAR_CEILING: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthProbe {
    /// Least-squares slope of `ln|z|` over the last quarter of the linear regime.
    pub rate: f64,
    pub saturated: bool,
    /// Mean `|z|` over the last quarter of the run, when saturated.
    pub plateau: Option<f64>,
}

fn slope(ts: &[f64], ys: &[f64]) -> f64 {
    let n = ts.len() as f64;
    let (mt, my) = (ts.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = ts.iter().zip(ys).map(|(t, y)| (t - mt) * (y - my)).sum();
    let den: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
    num / den
}

/// Growth rate of a `1e-6` perturbation of `z = 0`.
pub fn sl_growth_rate(p: SlParams, tau: f64, t_end: f64, dt: f64) -> Result<GrowthProbe> {
    let traj = sl_simulate(p, tau, Complex64::new(PROBE_AMPLITUDE, 0.0), t_end, dt)?;
    let pts = &traj.points;
    let linear_end = pts.iter().position(|q| q.abs_z > LINEAR_CEILING).unwrap_or(pts.len());
    let saturated = linear_end < pts.len();
    let start = linear_end - linear_end / 4;
    let window = &pts[start.min(linear_end.saturating_sub(2))..linear_end];
    let ts: Vec<f64> = window.iter().map(|q| q.t).collect();
    let ys: Vec<f64> = window.iter().map(|q| q.abs_z.max(f64::MIN_POSITIVE).ln()).collect();
    let plateau = saturated.then(|| {
        let tail = &pts[pts.len() - pts.len() / 4..];
        tail.iter().map(|q| q.abs_z).sum::<f64>() / tail.len() as f64
    });
    Ok(GrowthProbe {
        rate: slope(&ts, &ys),
        saturated,
        plateau,
    })
}
