//! Characteristic roots computed without the ACS: Chebyshev collocation of the
//! solution-operator generator, Newton refinement on `chi`, and an
//! argument-principle count of roots in the right half-plane.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::acs::AcsSpectrum;
use crate::charfn::{char_scale, delay_independent_roots, eval_char, eval_char_log_derivative, CharRootProbe};
use crate::error::{DdeError, Result};
use crate::system::LinearDde;

/// Eigenvalues with `|lambda| tau <= TRUST * N` are trusted.
pub const TRUST: f64 = 0.8;
pub const MIN_ORDER: usize = 16;
pub const MAX_ORDER: usize = 640;
pub const NEWTON_MAX_ITER: usize = 50;
/// Newton stops at `|chi| <= NEWTON_TOL * char_scale`.
pub const NEWTON_TOL: f64 = 1e-10;
/// Roots closer than this to the imaginary axis break the count.
pub const AXIS_TOL: f64 = 1e-6;
/// Radius of the indentation around persistent imaginary-axis roots.
pub const INDENT: f64 = 1e-4;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Chebyshev points `cos(pi j / N)` and the first-derivative matrix on `[-1, 1]`.
fn chebyshev(n: usize) -> (Vec<f64>, DMatrix<f64>) {
    let x: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let weight = |j: usize| {
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == n {
            2.0 * s
        } else {
            s
        }
    };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        let mut row = 0.0;
        for j in 0..=n {
            if i != j {
                let v = weight(i) / weight(j) / (x[i] - x[j]);
                d[(i, j)] = v;
                row += v;
            }
        }
        d[(i, i)] = -row;
    }
    (x, d)
}

/// Eigenvalues of the order-`N` collocation of the generator on `[-tau, 0]`,
/// restricted to the trusted disc `|lambda| tau <= 0.8 N`.
pub fn discretized_spectrum(sys: &LinearDde, tau: f64, order: usize) -> Result<Vec<Complex64>> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(DdeError::PreconditionViolated(format!("tau must be > 0, got {tau}")));
    }
    if order < MIN_ORDER {
        return Err(DdeError::PreconditionViolated(format!("order must be >= {MIN_ORDER}, got {order}")));
    }
    let n = sys.dim();
    let size = (order + 1) * n;
    let (_, d) = chebyshev(order);
    let mut g = DMatrix::<f64>::zeros(size, size);
    // block row 0: x'(0) = A x(0) + B x(-tau); node N sits at theta = -tau
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = sys.a()[(i, j)];
            g[(i, order * n + j)] += sys.b()[(i, j)];
        }
    }
    let s = 2.0 / tau;
    for bi in 1..=order {
        for bj in 0..=order {
            let v = s * d[(bi, bj)];
            if v != 0.0 {
                for k in 0..n {
                    g[(bi * n + k, bj * n + k)] = v;
                }
            }
        }
    }
    let limit = TRUST * order as f64 / tau;
    Ok(g.complex_eigenvalues()
        .iter()
        .copied()
        .filter(|l| l.is_finite() && l.norm() <= limit)
        .collect())
}

/// Collocation order whose trusted disc reaches radius `rho`.
pub fn order_for_radius(tau: f64, rho: f64) -> usize {
    ((rho * tau / TRUST).ceil() as usize + 4).clamp(MIN_ORDER, MAX_ORDER)
}

/// Newton iteration on `chi` with `chi'/chi = tr(M^{-1} M')`, `M' = I + tau B e^{-lambda tau}`.
pub fn newton_refine(sys: &LinearDde, tau: f64, lambda0: Complex64) -> Result<CharRootProbe> {
    let mut l = lambda0;
    let mut residual = f64::INFINITY;
    for _ in 0..=NEWTON_MAX_ITER {
        let (chi, ld) = eval_char_log_derivative(sys, tau, l);
        residual = chi.norm();
        if residual <= NEWTON_TOL * char_scale(sys, tau, l) {
            return Ok(CharRootProbe { lambda: l, tau, residual });
        }
        let Some(ld) = ld else { break };
        let mut step = 1.0 / ld;
        let cap = 1.0 + l.norm();
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        l -= step;
        if !l.is_finite() {
            break;
        }
    }
    Err(DdeError::NoConvergence {
        re: l.re,
        im: l.im,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn contains(&self, l: Complex64) -> bool {
        l.re >= self.re_min && l.re <= self.re_max && l.im >= self.im_min && l.im <= self.im_max
    }

    fn radius(&self) -> f64 {
        [self.re_min, self.re_max]
            .iter()
            .flat_map(|r| [self.im_min, self.im_max].map(|i| c(*r, i).norm()))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRoot {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

impl WindowRoot {
    pub fn lambda(&self) -> Complex64 {
        c(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumWindow {
    pub region: Region,
    pub tau: f64,
    pub order: usize,
    pub newton_max_iterations: usize,
    pub roots: Vec<WindowRoot>,
}

/// Refined characteristic roots inside `region`. The collocation order
/// defaults to one whose trusted disc covers the region (capped at 640).
pub fn spectrum_window(sys: &LinearDde, tau: f64, region: Region, order: Option<usize>) -> Result<SpectrumWindow> {
    let order = order.unwrap_or_else(|| order_for_radius(tau, region.radius()));
    let seeds = discretized_spectrum(sys, tau, order)?;
    let slack = 1e-3 * (1.0 + region.radius());
    let grown = Region {
        re_min: region.re_min - slack,
        re_max: region.re_max + slack,
        im_min: region.im_min - slack,
        im_max: region.im_max + slack,
    };
    let mut roots: Vec<WindowRoot> = Vec::new();
    for s in seeds.into_iter().filter(|s| grown.contains(*s)) {
        let Ok(p) = newton_refine(sys, tau, s) else { continue };
        if !region.contains(p.lambda) {
            continue;
        }
        if roots.iter().any(|r| (r.lambda() - p.lambda).norm() <= 1e-8 * (1.0 + p.lambda.norm())) {
            continue;
        }
        roots.push(WindowRoot {
            re: p.lambda.re,
            im: p.lambda.im,
            residual: p.residual,
        });
    }
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    Ok(SpectrumWindow {
        region,
        tau,
        order,
        newton_max_iterations: NEWTON_MAX_ITER,
        roots,
    })
}

impl SpectrumWindow {
    /// `re, im, residual`, one row per root.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.roots {
            w.serialize(r).map_err(|e| DdeError::Input(e.to_string()))?;
        }
        w.flush().map_err(|e| DdeError::Input(e.to_string()))
    }
}

/// Radius of the counting contour: `2 (1 + |A| + |B|) + 2 / tau`.
pub fn contour_radius(sys: &LinearDde, tau: f64) -> f64 {
    2.0 * sys.scale() + 2.0 / tau
}

/// Roots on the imaginary axis for every delay: `ker B` eigenvalues of `A`,
/// and `0` when `det(A + B) = 0`.
pub fn persistent_axis_roots(sys: &LinearDde) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = delay_independent_roots(sys)
        .into_iter()
        .map(|r| c(0.0, r.im))
        .collect();
    let chi0 = eval_char(sys, 0.0, c(0.0, 0.0)).norm();
    if chi0 <= 1e-9 * sys.scale().powi(sys.dim() as i32) && !out.iter().any(|r| r.norm() < INDENT) {
        out.push(c(0.0, 0.0));
    }
    out.sort_by(|a, b| a.im.total_cmp(&b.im));
    out.dedup_by(|a, b| (a.im - b.im).abs() < INDENT);
    out
}

/// Outcome of the contour integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingCount {
    pub count: u64,
    /// `(1/2 pi) Im \oint chi'/chi` before rounding.
    pub raw: f64,
    pub panels: usize,
    pub radius: f64,
}

/// Roots with `Re lambda > 0`, by the argument principle.
pub fn count_unstable(sys: &LinearDde, tau: f64) -> Result<u64> {
    count_unstable_detailed(sys, tau).map(|w| w.count)
}

type Path = Box<dyn Fn(f64) -> (Complex64, Complex64)>;

pub fn count_unstable_detailed(sys: &LinearDde, tau: f64) -> Result<WindingCount> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(DdeError::PreconditionViolated(format!("tau must be finite and >= 0, got {tau}")));
    }
    if tau == 0.0 {
        let m = sys.a() + sys.b();
        let ev = m.complex_eigenvalues();
        if let Some(l) = ev.iter().find(|l| l.re.abs() <= 1e-10 && l.norm() > 1e-10) {
            return Err(DdeError::RootOnContour { re: l.re, im: l.im });
        }
        let count = ev.iter().filter(|l| l.re > 1e-10).count() as u64;
        return Ok(WindingCount { count, raw: count as f64, panels: 0, radius: 0.0 });
    }
    let r = contour_radius(sys, tau);
    let persistent = persistent_axis_roots(sys);

    // Counterclockwise: right arc from -iR to iR, then down the axis with
    // right-hand indentations around persistent roots.
    let mut paths: Vec<(Path, f64, f64, bool)> = Vec::new();
    paths.push((
        Box::new(move |t: f64| {
            let z = Complex64::from_polar(r, t);
            (z, c(0.0, 1.0) * z)
        }),
        -PI / 2.0,
        PI / 2.0,
        false,
    ));
    let mut top = r;
    for p in persistent.iter().rev() {
        let w = p.im;
        paths.push((Box::new(move |t: f64| (c(0.0, -t), c(0.0, -1.0))), -top, -(w + INDENT), true));
        paths.push((
            Box::new(move |t: f64| {
                let z = c(0.0, w) + Complex64::from_polar(INDENT, -t);
                (z, c(0.0, -1.0) * (z - c(0.0, w)))
            }),
            -PI / 2.0,
            PI / 2.0,
            false,
        ));
        top = w - INDENT;
    }
    paths.push((Box::new(move |t: f64| (c(0.0, -t), c(0.0, -1.0))), -top, r, true));

    let tol = 1e-8;
    let total_len: f64 = paths.iter().map(|p| p.2 - p.1).sum();
    let mut integral = c(0.0, 0.0);
    let mut panels = 0usize;
    let mut axis_samples: Vec<(f64, f64)> = Vec::new();

    let eval = |path: &Path, t: f64, on_axis: bool, samples: &mut Vec<(f64, f64)>| -> Result<(Complex64, Complex64)> {
        let (z, dz) = path(t);
        let (chi, ld) = eval_char_log_derivative(sys, tau, z);
        match ld {
            Some(ld) if chi.norm() > 0.0 => {
                if on_axis {
                    samples.push((z.im, chi.norm() / char_scale(sys, tau, z)));
                }
                Ok((chi, ld * dz))
            }
            _ => Err(DdeError::RootOnContour { re: z.re, im: z.im }),
        }
    };

    for (path, t0, t1, on_axis) in &paths {
        let (t0, t1) = (*t0, *t1);
        if t1 <= t0 {
            continue;
        }
        let a0 = eval(path, t0, *on_axis, &mut axis_samples)?;
        let b0 = eval(path, t1, *on_axis, &mut axis_samples)?;
        let m0 = eval(path, 0.5 * (t0 + t1), *on_axis, &mut axis_samples)?;
        let mut stack = vec![(t0, t1, a0, m0, b0)];
        while let Some((a, b, fa, fm, fb)) = stack.pop() {
            let h = b - a;
            if h <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
                if *on_axis {
                    check_axis(sys, tau, &persistent, &mut axis_samples)?;
                }
                return Err(DdeError::QuadratureStall(format!("panel width {h:e} at t = {a}")));
            }
            let fl = eval(path, a + 0.25 * h, *on_axis, &mut axis_samples)?;
            let fr = eval(path, a + 0.75 * h, *on_axis, &mut axis_samples)?;
            let whole = (fa.1 + 4.0 * fm.1 + fb.1) * (h / 6.0);
            let halves = (fa.1 + 4.0 * fl.1 + 2.0 * fm.1 + 4.0 * fr.1 + fb.1) * (h / 12.0);
            let darg = (fb.0 / fa.0).arg();
            let local = tol * h / total_len;
            let ok = (halves - whole).norm() <= 15.0 * local.max(1e-14)
                && darg.abs() < PI / 4.0
                && (halves.im - darg).abs() < 0.1;
            if ok {
                integral += halves + (halves - whole) / 15.0;
                panels += 1;
                if panels > 2_000_000 {
                    return Err(DdeError::QuadratureStall("panel budget exhausted".into()));
                }
            } else {
                let m = a + 0.5 * h;
                stack.push((m, b, fm, fr, fb));
                stack.push((a, m, fa, fl, fm));
            }
        }
    }

    check_axis(sys, tau, &persistent, &mut axis_samples)?;

    let raw = integral.im / (2.0 * PI);
    let rounded = raw.round();
    if (raw - rounded).abs() > 1e-3 || rounded < 0.0 {
        return Err(DdeError::QuadratureStall(format!("winding number {raw} is not an integer")));
    }
    Ok(WindingCount {
        count: rounded as u64,
        raw,
        panels,
        radius: r,
    })
}

/// Refines local minima of `|chi| / scale` along the axis and rejects roots
/// within `AXIS_TOL` of it (other than the indented persistent ones).
fn check_axis(sys: &LinearDde, tau: f64, persistent: &[Complex64], samples: &mut [(f64, f64)]) -> Result<()> {
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    for i in 0..samples.len() {
        let v = samples[i].1;
        let left = if i > 0 { samples[i - 1].1 } else { f64::INFINITY };
        let right = samples.get(i + 1).map_or(f64::INFINITY, |s| s.1);
        if v > 1e-4 || v > left || v > right {
            continue;
        }
        if let Ok(p) = newton_refine(sys, tau, c(0.0, samples[i].0)) {
            let persistent_root = persistent.iter().any(|q| (p.lambda - q).norm() < INDENT);
            if p.lambda.re.abs() <= AXIS_TOL && !persistent_root {
                return Err(DdeError::RootOnContour {
                    re: p.lambda.re,
                    im: p.lambda.im,
                });
            }
        }
    }
    Ok(())
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

/// Largest distance from a rescaled root `(tau Re lambda, Im lambda)` with
/// `Re lambda >= -1/tau` to the polyline of ACS points `(gamma_j, omega)`.
/// Infinite when there are no branches or no qualifying roots.
pub fn spectrum_vs_acs_distance(roots: &[Complex64], tau: f64, acs: &AcsSpectrum) -> f64 {
    if acs.is_empty() {
        return f64::INFINITY;
    }
    let mut worst: Option<f64> = None;
    for l in roots.iter().filter(|l| l.re >= -1.0 / tau) {
        let p = (tau * l.re, l.im);
        let mut best = f64::INFINITY;
        for b in acs.branches() {
            for w in b.samples.windows(2) {
                best = best.min(segment_distance(p, (w[0].gamma, w[0].omega), (w[1].gamma, w[1].omega)));
            }
        }
        worst = Some(worst.map_or(best, |m: f64| m.max(best)));
    }
    worst.unwrap_or(f64::INFINITY)
}

/// Roots with `Re lambda >= -1/tau` and `|Im lambda| <= acs.omega_max()`, refined.
pub fn roots_near_axis(sys: &LinearDde, tau: f64, acs: &AcsSpectrum) -> Result<Vec<Complex64>> {
    let w = acs.omega_max().min(MAX_ORDER as f64 * TRUST / (1.5 * tau));
    let region = Region {
        re_min: -1.0 / tau,
        re_max: sys.scale(),
        im_min: -w,
        im_max: w,
    };
    Ok(spectrum_window(sys, tau, region, None)?
        .roots
        .iter()
        .map(WindowRoot::lambda)
        .collect())
}
