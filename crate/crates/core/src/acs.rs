//! Asymptotic continuous spectrum: the curves `gamma_j(omega) = -ln|Y_j(omega)|`
//! and their zeros.
//!
//! Sampling proceeds in three passes. Roots of the generating polynomial are
//! computed on a uniform symmetric grid, intervals whose endpoints disagree by
//! more than [`GAMMA_JUMP`] (or whose root pairing is ambiguous) are bisected
//! down to `omega_max * 1e-6`, and finally roots are chained into branches by
//! nearest-neighbour assignment between adjacent grid points.
//!
//! Every zero of a branch satisfies `|Y| = 1`, so `i omega` is an eigenvalue of
//! `A + B Y` and `|omega| <= |A|_2 + |B|_2`. The automatic `omega_max` is four
//! times that bound, which also guarantees that every branch is negative at the
//! edges of the sampled window.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfn::generating_polynomial;
use crate::error::{DdeError, Result};
use crate::system::LinearDde;

/// Refinement trigger on `|Delta gamma|` between neighbouring samples.
pub const GAMMA_JUMP: f64 = 0.05;
/// Smallest grid step, relative to `omega_max`.
pub const MIN_STEP_REL: f64 = 1e-6;
/// Finite-difference step for `d gamma / d omega`, relative to `omega_max`.
pub const DIFF_STEP_REL: f64 = 1e-7;
/// Target `|gamma(omega_H)|` after refinement.
pub const ZERO_TOL: f64 = 1e-10;
/// `|gamma(0)|` below this counts as a zero at the origin.
pub const STEADY_ZERO_TOL: f64 = 1e-8;
/// Relative slope below which a zero is tangential.
pub const TANGENCY_REL: f64 = 1e-6;
/// Two roots closer than this (relative) at a sample are a collision.
pub const COLLISION_TOL: f64 = 1e-10;

pub const DEFAULT_SAMPLES: usize = 2001;
const MAX_SAMPLES: usize = 400_000;

/// `4 (1 + |A|_2 + |B|_2)`.
pub fn auto_omega_max(sys: &LinearDde) -> f64 {
    4.0 * sys.scale()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcsSample {
    pub omega: f64,
    pub y: Complex64,
    pub gamma: f64,
}

/// One continuously matched curve `omega -> (Y_j, gamma_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcsBranch {
    pub branch_id: usize,
    pub samples: Vec<AcsSample>,
}

impl AcsBranch {
    pub fn max_gamma(&self) -> f64 {
        self.samples.iter().fold(f64::NEG_INFINITY, |m, s| m.max(s.gamma))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `d gamma/d omega < 0`: the crossing root moves into the right half-plane.
    Destabilizing,
    /// `d gamma/d omega > 0`.
    Stabilizing,
    /// Tangential zero; the transversality hypothesis fails.
    NonTransverse,
    /// Zero of a branch at `omega = 0` (a real root at `lambda = 0`).
    SteadyState,
}

/// A zero of an ACS branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    #[serde(rename = "omega_H")]
    pub omega_h: f64,
    /// `-arg Y(omega_H)` in `(-pi, pi]`.
    #[serde(rename = "phi_H")]
    pub phi_h: f64,
    pub dgamma: f64,
    /// `d phi / d omega` with `phi(omega) = -arg Y(omega)` continued along the branch.
    pub dphi: f64,
    pub direction: Direction,
    pub branch_id: usize,
    #[serde(skip)]
    pub y: Complex64,
}

/// Sampled branches together with the system they belong to.
#[derive(Debug, Clone)]
pub struct AcsSpectrum {
    system: LinearDde,
    omega_max: f64,
    degree: usize,
    omegas: Vec<f64>,
    branches: Vec<AcsBranch>,
}

enum SampleIssue {
    Degenerate,
    Collision,
}

fn solve_at(sys: &LinearDde, omega: f64, degree: usize) -> std::result::Result<Vec<Complex64>, SampleIssue> {
    let p = generating_polynomial(sys, omega);
    if p.degree() != degree || p.is_degenerate() {
        return Err(SampleIssue::Degenerate);
    }
    let roots = p.roots();
    if roots.iter().any(|y| !y.is_finite() || y.norm() == 0.0) {
        return Err(SampleIssue::Degenerate);
    }
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            let scale = 1.0f64.max(roots[i].norm()).max(roots[j].norm());
            if (roots[i] - roots[j]).norm() <= COLLISION_TOL * scale {
                return Err(SampleIssue::Collision);
            }
        }
    }
    Ok(roots)
}

/// Roots at `omega`, nudged by `delta` when `omega` is degenerate or a collision point.
fn sample_point(sys: &LinearDde, omega: f64, degree: usize, delta: f64) -> Result<(f64, Vec<Complex64>)> {
    let mut collided = false;
    for w in [omega, omega + delta, omega - delta, omega + 2.0 * delta, omega - 2.0 * delta] {
        match solve_at(sys, w, degree) {
            Ok(r) => return Ok((w, r)),
            Err(SampleIssue::Collision) => collided = true,
            Err(SampleIssue::Degenerate) => {}
        }
    }
    if collided {
        Err(DdeError::BranchCollision { omega })
    } else {
        Err(DdeError::DegenerateFrequency { omega })
    }
}

fn gamma_of(y: Complex64) -> f64 {
    -y.norm().ln()
}

/// Optimal assignment `from[i] -> to[perm[i]]` minimizing the summed distance.
/// Exhaustive for small degree, greedy otherwise.
pub(crate) fn optimal_assignment(from: &[Complex64], to: &[Complex64]) -> Vec<usize> {
    let d = from.len();
    if d > 7 {
        return greedy_assignment(from, to);
    }
    let mut perm: Vec<usize> = (0..d).collect();
    let mut best = perm.clone();
    let mut best_cost = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let cost: f64 = p.iter().enumerate().map(|(i, &j)| (from[i] - to[j]).norm()).sum();
        if cost < best_cost {
            best_cost = cost;
            best = p.to_vec();
        }
    });
    best
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

pub(crate) fn greedy_assignment(from: &[Complex64], to: &[Complex64]) -> Vec<usize> {
    let d = from.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for (i, a) in from.iter().enumerate() {
        for (j, b) in to.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = vec![usize::MAX; d];
    let mut used = vec![false; d];
    for (_, i, j) in pairs {
        if out[i] == usize::MAX && !used[j] {
            out[i] = j;
            used[j] = true;
        }
    }
    out
}

fn min_separation(roots: &[Complex64]) -> f64 {
    let mut sep = f64::INFINITY;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            sep = sep.min((roots[i] - roots[j]).norm());
        }
    }
    sep
}

fn needs_refinement(a: &[Complex64], b: &[Complex64]) -> bool {
    let perm = optimal_assignment(a, b);
    let mut max_jump: f64 = 0.0;
    let mut max_move: f64 = 0.0;
    for (i, &j) in perm.iter().enumerate() {
        max_jump = max_jump.max((gamma_of(a[i]) - gamma_of(b[j])).abs());
        max_move = max_move.max((a[i] - b[j]).norm());
    }
    let sep = min_separation(a).min(min_separation(b));
    max_jump > GAMMA_JUMP || max_move > 0.5 * sep
}

/// Samples and matches all ACS branches on `[-omega_max, omega_max]`.
pub fn sample_branches(sys: &LinearDde, omega_max: f64, n_samples: usize) -> Result<AcsSpectrum> {
    if !(omega_max.is_finite() && omega_max > 0.0) {
        return Err(DdeError::PreconditionViolated(format!("omega_max must be > 0, got {omega_max}")));
    }
    if n_samples < 64 {
        return Err(DdeError::PreconditionViolated(format!("n_samples must be >= 64, got {n_samples}")));
    }
    let probes = [0.313_717, -0.721_139, 0.051_793, 0.917_3];
    let degree = probes
        .iter()
        .map(|p| generating_polynomial(sys, p * omega_max).degree())
        .max()
        .unwrap_or(0);
    let empty = AcsSpectrum {
        system: sys.clone(),
        omega_max,
        degree,
        omegas: Vec::new(),
        branches: Vec::new(),
    };
    if degree == 0 {
        return Ok(empty);
    }

    let min_step = omega_max * MIN_STEP_REL;
    let mut grid: Vec<f64> = (0..n_samples)
        .map(|i| omega_max * (2.0 * i as f64 - (n_samples - 1) as f64) / (n_samples - 1) as f64)
        .collect();
    if n_samples % 2 == 0 {
        grid.push(0.0);
        grid.sort_by(f64::total_cmp);
    }
    let mut points: Vec<(f64, Vec<Complex64>)> = grid
        .par_iter()
        .map(|&w| sample_point(sys, w, degree, min_step))
        .collect::<Result<_>>()?;

    loop {
        let mids: Vec<(f64, f64)> = points
            .windows(2)
            .filter(|w| w[1].0 - w[0].0 > 2.0 * min_step && needs_refinement(&w[0].1, &w[1].1))
            .map(|w| (0.5 * (w[0].0 + w[1].0), 0.25 * (w[1].0 - w[0].0)))
            .collect();
        if mids.is_empty() || points.len() + mids.len() > MAX_SAMPLES {
            break;
        }
        let fresh: Vec<(f64, Vec<Complex64>)> = mids
            .par_iter()
            .map(|&(w, room)| sample_point(sys, w, degree, min_step.min(room)))
            .collect::<Result<_>>()?;
        points.extend(fresh);
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        points.dedup_by(|a, b| a.0 == b.0);
    }

    // Chain roots into branches: greedy first, exhaustive where a step looks off.
    let mut steps: Vec<Vec<usize>> = points
        .windows(2)
        .map(|w| greedy_assignment(&w[0].1, &w[1].1))
        .collect();
    let step_moves: Vec<f64> = points
        .windows(2)
        .zip(&steps)
        .map(|(w, perm)| {
            perm.iter()
                .enumerate()
                .map(|(i, &j)| (w[0].1[i] - w[1].1[j]).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let mut sorted = step_moves.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or(0.0);
    for (k, mv) in step_moves.iter().enumerate() {
        if *mv > 10.0 * median {
            steps[k] = optimal_assignment(&points[k].1, &points[k + 1].1);
        }
    }

    let mut branches: Vec<AcsBranch> = (0..degree)
        .map(|j| AcsBranch {
            branch_id: j,
            samples: Vec::with_capacity(points.len()),
        })
        .collect();
    let mut slot: Vec<usize> = (0..degree).collect();
    for (k, (w, roots)) in points.iter().enumerate() {
        if k > 0 {
            slot = slot.iter().map(|&s| steps[k - 1][s]).collect();
        }
        for (j, br) in branches.iter_mut().enumerate() {
            let y = roots[slot[j]];
            br.samples.push(AcsSample {
                omega: *w,
                y,
                gamma: gamma_of(y),
            });
        }
    }
    Ok(AcsSpectrum {
        omegas: points.iter().map(|p| p.0).collect(),
        branches,
        ..empty
    })
}

pub(crate) fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Result of sign checks on the refined grid, used by the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PositiveCount {
    pub omega_index: usize,
    pub count: usize,
}

impl AcsSpectrum {
    pub fn system(&self) -> &LinearDde {
        &self.system
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn min_step(&self) -> f64 {
        self.omega_max * MIN_STEP_REL
    }

    /// Generic degree of the generating polynomial; 0 when it is degenerate everywhere.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn branches(&self) -> &[AcsBranch] {
        &self.branches
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// The root at `omega` closest to `hint`.
    pub fn track(&self, omega: f64, hint: Complex64) -> Result<Complex64> {
        let (_, roots) = sample_point(&self.system, omega, self.degree, self.min_step() * 1e-3)?;
        Ok(*roots
            .iter()
            .min_by(|a, b| (*a - hint).norm().total_cmp(&(*b - hint).norm()))
            .expect("degree >= 1"))
    }

    fn gamma_scale(&self, branch: &AcsBranch) -> f64 {
        let mut g: Vec<f64> = branch.samples.iter().map(|s| s.gamma.abs()).collect();
        g.sort_by(f64::total_cmp);
        g.get(g.len() / 2).copied().unwrap_or(1.0).max(1.0)
    }

    fn derivatives(&self, omega: f64, y: Complex64) -> Result<(f64, f64)> {
        let h = self.omega_max * DIFF_STEP_REL;
        let yp = self.track(omega + h, y)?;
        let ym = self.track(omega - h, y)?;
        let dgamma = (gamma_of(yp) - gamma_of(ym)) / (2.0 * h);
        let dphi = -(yp / ym).arg() / (2.0 * h);
        Ok((dgamma, dphi))
    }

    /// Refines a sign change of one branch between two samples.
    fn refine_zero(&self, lo: AcsSample, hi: AcsSample) -> Result<AcsSample> {
        let (mut a, mut b) = (lo, hi);
        let mut side = 0i8;
        let mut best = if a.gamma.abs() < b.gamma.abs() { a } else { b };
        for _ in 0..200 {
            if best.gamma.abs() <= ZERO_TOL || (b.omega - a.omega) <= 1e-15 * self.omega_max {
                break;
            }
            // Illinois-modified regula falsi, falling back to bisection near the ends.
            let mut w = (a.omega * b.gamma - b.omega * a.gamma) / (b.gamma - a.gamma);
            let width = b.omega - a.omega;
            if !w.is_finite() || w <= a.omega + 0.01 * width || w >= b.omega - 0.01 * width {
                w = 0.5 * (a.omega + b.omega);
            }
            let t = (w - a.omega) / width;
            let hint = a.y + (b.y - a.y) * t;
            let y = self.track(w, hint)?;
            let s = AcsSample { omega: w, y, gamma: gamma_of(y) };
            if s.gamma.abs() < best.gamma.abs() {
                best = s;
            }
            if (s.gamma > 0.0) == (a.gamma > 0.0) {
                a = s;
                if side == -1 {
                    b.gamma *= 0.5;
                }
                side = -1;
            } else {
                b = s;
                if side == 1 {
                    a.gamma *= 0.5;
                }
                side = 1;
            }
        }
        Ok(best)
    }

    fn make_crossing(&self, branch: &AcsBranch, at: AcsSample) -> Result<Crossing> {
        let (dgamma, dphi) = self.derivatives(at.omega, at.y)?;
        let direction = if dgamma.abs() < TANGENCY_REL * self.gamma_scale(branch) {
            Direction::NonTransverse
        } else if dgamma < 0.0 {
            Direction::Destabilizing
        } else {
            Direction::Stabilizing
        };
        Ok(Crossing {
            omega_h: at.omega,
            phi_h: wrap_phase(-at.y.arg()),
            dgamma,
            dphi,
            direction,
            branch_id: branch.branch_id,
            y: at.y,
        })
    }

    /// Zeros at `omega = 0`, one per branch with `|gamma(0)| < 1e-8`.
    fn steady_state_zeros(&self) -> Result<Vec<Crossing>> {
        let p = generating_polynomial(&self.system, 0.0);
        if p.is_degenerate() || p.degree() != self.degree {
            return Ok(Vec::new());
        }
        let roots = p.roots();
        let mut out = Vec::new();
        for y in roots {
            if gamma_of(y).abs() >= STEADY_ZERO_TOL {
                continue;
            }
            let branch = self.branch_nearest(0.0, y);
            let (dgamma, dphi) = self.derivatives(0.0, y)?;
            out.push(Crossing {
                omega_h: 0.0,
                phi_h: if y.re >= 0.0 { 0.0 } else { PI },
                dgamma,
                dphi,
                direction: Direction::SteadyState,
                branch_id: branch.branch_id,
                y,
            });
        }
        Ok(out)
    }

    fn branch_nearest(&self, omega: f64, y: Complex64) -> &AcsBranch {
        let k = self
            .omegas
            .partition_point(|w| *w < omega)
            .min(self.omegas.len() - 1);
        self.branches
            .iter()
            .min_by(|a, b| (a.samples[k].y - y).norm().total_cmp(&(b.samples[k].y - y).norm()))
            .expect("nonempty")
    }

    /// All zeros with `omega_H >= 0`, sorted by frequency. Negative
    /// frequencies mirror these by conjugation.
    pub fn find_crossings(&self) -> Result<Vec<Crossing>> {
        if self.is_empty() {
            return Ok(Vec::new());
        }
        let mut out = self.steady_state_zeros()?;
        let guard = 10.0 * self.min_step();
        for branch in &self.branches {
            let has_origin_zero = out.iter().any(|c| c.branch_id == branch.branch_id && c.omega_h == 0.0);
            let s = &branch.samples;
            for i in 0..s.len().saturating_sub(1) {
                let (lo, hi) = (s[i], s[i + 1]);
                if hi.omega <= 0.0 {
                    continue;
                }
                let change = (lo.gamma > 0.0 && hi.gamma <= 0.0) || (lo.gamma < 0.0 && hi.gamma >= 0.0);
                if !change {
                    continue;
                }
                let z = if hi.gamma == 0.0 { hi } else { self.refine_zero(lo, hi)? };
                if z.omega <= guard && (has_origin_zero || z.omega <= 0.0) {
                    continue;
                }
                if z.omega <= 0.0 {
                    continue;
                }
                out.push(self.make_crossing(branch, z)?);
            }
            // Touching zeros: local extrema of gamma that come within reach of zero.
            for i in 1..s.len().saturating_sub(1) {
                let (l, m, r) = (s[i - 1], s[i], s[i + 1]);
                if m.omega <= guard {
                    continue;
                }
                let is_max = m.gamma >= l.gamma && m.gamma >= r.gamma && m.gamma < 0.0;
                let is_min = m.gamma <= l.gamma && m.gamma <= r.gamma && m.gamma > 0.0;
                if !(is_max || is_min) || m.gamma.abs() > 1e-6 {
                    continue;
                }
                let ext = self.refine_extremum(l, m, r, is_max)?;
                if ext.gamma.abs() < STEADY_ZERO_TOL
                    && !out.iter().any(|c| (c.omega_h - ext.omega).abs() < guard)
                {
                    let mut c = self.make_crossing(branch, ext)?;
                    c.direction = Direction::NonTransverse;
                    out.push(c);
                }
            }
        }
        out.sort_by(|a, b| a.omega_h.total_cmp(&b.omega_h));
        Ok(out)
    }

    fn refine_extremum(&self, l: AcsSample, m: AcsSample, r: AcsSample, maximize: bool) -> Result<AcsSample> {
        let sign = if maximize { 1.0 } else { -1.0 };
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (l.omega, r.omega);
        let mut best = m;
        let eval = |w: f64, best: &mut AcsSample| -> Result<f64> {
            let y = self.track(w, best.y)?;
            let s = AcsSample { omega: w, y, gamma: gamma_of(y) };
            if sign * s.gamma > sign * best.gamma {
                *best = s;
            }
            Ok(sign * s.gamma)
        };
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let mut f1 = eval(x1, &mut best)?;
        let mut f2 = eval(x2, &mut best)?;
        for _ in 0..80 {
            if (b - a) < 1e-14 * self.omega_max {
                break;
            }
            if f1 > f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = eval(x1, &mut best)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = eval(x2, &mut best)?;
            }
        }
        Ok(best)
    }

    /// Number of branches with `gamma > 0` at each grid point.
    pub(crate) fn positive_counts(&self) -> Vec<PositiveCount> {
        (0..self.omegas.len())
            .map(|k| PositiveCount {
                omega_index: k,
                count: self.branches.iter().filter(|b| b.samples[k].gamma > 0.0).count(),
            })
            .collect()
    }

    /// `branch_id, omega, gamma, re_Y, im_Y`, one row per sample.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| DdeError::Input(e.to_string());
        w.write_record(["branch_id", "omega", "gamma", "re_Y", "im_Y"]).map_err(io)?;
        for b in &self.branches {
            for s in &b.samples {
                w.write_record(&[
                    b.branch_id.to_string(),
                    s.omega.to_string(),
                    s.gamma.to_string(),
                    s.y.re.to_string(),
                    s.y.im.to_string(),
                ])
                .map_err(io)?;
            }
        }
        w.flush().map_err(|e| DdeError::Input(e.to_string()))
    }
}
