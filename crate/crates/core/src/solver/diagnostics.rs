use serde::{Deserialize, Serialize};

use super::{Boundary, SolveReport};
use crate::Error;

/// Profile near a wall as seen from the wall: distances to the wall and
/// values at the wall and at the interior nodes, nearest first.
pub(crate) struct WallProfile {
    pub h: f64,
    pub wall_value: f64,
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
}

pub(crate) fn wall_profile(report: &SolveReport, boundary: Boundary) -> WallProfile {
    let g = &report.solution;
    let grid = g.grid();
    let v = g.values();
    let h = grid.h();
    let interior: Vec<usize> = match boundary {
        Boundary::Left => grid.interior().collect(),
        Boundary::Right => grid.interior().rev().collect(),
    };
    let wall_value = match boundary {
        Boundary::Left => g.datum().left_limit(),
        Boundary::Right => g.datum().right_limit(),
    };
    WallProfile {
        h,
        wall_value,
        distances: (1..=interior.len()).map(|k| k as f64 * h).collect(),
        values: interior.iter().map(|&i| v[i]).collect(),
    }
}

/// The wall curve `x = v(x₂)` over the monotone jump window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseParametrization {
    pub boundary: Boundary,
    /// Value of the graph at the first interior node.
    pub jump_value: f64,
    /// `(x₂, distance to the wall)` along the window, starting at the wall.
    pub samples: Vec<(f64, f64)>,
    /// `h / |u(x₂) - u(x₁)|`, the slope of `v` at the bottom of the window.
    pub v_prime: f64,
}

/// Reparametrizes the discrete curve next to a jump by the vertical variable.
pub fn inverse_parametrization(
    report: &SolveReport,
    boundary: Boundary,
) -> Result<InverseParametrization, Error> {
    let p = wall_profile(report, boundary);
    let jump = p.values[0] - p.wall_value;
    let first_step = p.values[1] - p.values[0];
    // A genuine discontinuity dominates the next increment and continues
    // in the same direction.
    if !(jump.abs() > 2.0 * first_step.abs() && jump.abs() > 1e-6) || first_step * jump < 0.0 {
        return Err(Error::NoVerticalWindow(boundary.name()));
    }
    let sign = jump.signum();
    let mut samples = vec![(p.values[0], p.distances[0])];
    for k in 1..p.values.len() {
        if (p.values[k] - p.values[k - 1]) * sign <= 0.0 {
            break;
        }
        samples.push((p.values[k], p.distances[k]));
    }
    Ok(InverseParametrization {
        boundary,
        jump_value: p.values[0],
        samples,
        v_prime: p.h / first_step.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitReference {
    /// Measure from the exterior value at the wall.
    Datum,
    /// Fit the one-sided limit together with the power law.
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub amplitude: f64,
    /// Reference level the power law is measured from.
    pub limit: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub window: (f64, f64),
    pub nodes: usize,
    /// False when the residual exceeds the cap; the exponent is then not
    /// meaningful.
    pub reliable: bool,
}

pub const DEFAULT_RESIDUAL_CAP: f64 = 0.05;

/// Default fit window: interior nodes 2 through 17 from the wall.
pub fn default_fit_window(h: f64) -> (f64, f64) {
    (2.0 * h, 17.0 * h)
}

/// Least-squares fit of `log|u - limit|` against the log distance to the wall.
pub fn fit_boundary_exponent(
    report: &SolveReport,
    boundary: Boundary,
    window: (f64, f64),
    reference: FitReference,
) -> Result<ExponentFit, Error> {
    let p = wall_profile(report, boundary);
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi < 1.0) {
        return Err(Error::WindowOutOfRange(format!("fit window {window:?} must lie inside (0, 1)")));
    }
    let slack = 1e-9 * p.h;
    let (d, v): (Vec<f64>, Vec<f64>) = p
        .distances
        .iter()
        .zip(&p.values)
        .filter(|(d, _)| **d >= lo - slack && **d <= hi + slack)
        .map(|(d, v)| (*d, *v))
        .unzip();
    if d.len() < 6 {
        return Err(Error::WindowOutOfRange(format!(
            "fit window {window:?} holds {} nodes, need at least 6",
            d.len()
        )));
    }
    let mut fit = match reference {
        FitReference::Datum => power_fit(&d, &v, p.wall_value)?,
        FitReference::Free => free_power_fit(&d, &v)?,
    };
    fit.window = window;
    Ok(fit)
}

/// Fits `u = limit + a·d^γ` with the limit given.
pub fn power_fit(d: &[f64], v: &[f64], limit: f64) -> Result<ExponentFit, Error> {
    let dev: Vec<f64> = v.iter().map(|x| x - limit).collect();
    let scale = dev.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let sign = dev.iter().map(|x| x.signum()).sum::<f64>().signum();
    if !(scale > 1e-12 * limit.abs().max(1.0)) || dev.iter().any(|x| x * sign <= 0.0) {
        return Err(Error::DegenerateFit(
            "profile does not separate from its limit on the window".into(),
        ));
    }
    let x: Vec<f64> = d.iter().map(|d| d.ln()).collect();
    let y: Vec<f64> = dev.iter().map(|v| (v * sign).ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("window has no spread".into()));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - exponent * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ExponentFit {
        exponent,
        amplitude: sign * intercept.exp(),
        limit,
        residual,
        window: (d[0], d[d.len() - 1]),
        nodes: d.len(),
        reliable: residual <= DEFAULT_RESIDUAL_CAP,
    })
}

/// Fits `u = c + a·d^γ` with all three parameters free: linear least squares
/// in `(c, a)` for each `γ`, golden-section search in `γ`.
pub fn free_power_fit(d: &[f64], v: &[f64]) -> Result<ExponentFit, Error> {
    let spread = v.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x))
        - v.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    if !(spread > 1e-12) {
        return Err(Error::DegenerateFit("profile is constant on the window".into()));
    }
    let lsq = |gamma: f64| -> (f64, f64, f64) {
        let phi: Vec<f64> = d.iter().map(|x| x.powf(gamma)).collect();
        let n = phi.len() as f64;
        let mp = phi.iter().sum::<f64>() / n;
        let mv = v.iter().sum::<f64>() / n;
        let spp: f64 = phi.iter().map(|p| (p - mp).powi(2)).sum();
        let spv: f64 = phi.iter().zip(v).map(|(p, y)| (p - mp) * (y - mv)).sum();
        let a = spv / spp;
        let c = mv - a * mp;
        let sse: f64 = phi.iter().zip(v).map(|(p, y)| (y - c - a * p).powi(2)).sum();
        (sse, c, a)
    };
    let (mut lo, mut hi) = (0.02f64, 3.0f64);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (lsq(x1).0, lsq(x2).0);
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = lsq(x1).0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = lsq(x2).0;
        }
    }
    let gamma = 0.5 * (lo + hi);
    let (_, limit, _) = lsq(gamma);
    let mut fit = power_fit(d, v, limit).or_else(|_| {
        // The fitted limit can graze the first sample; report the direct fit.
        let (sse, c, a) = lsq(gamma);
        Ok::<_, Error>(ExponentFit {
            exponent: gamma,
            amplitude: a,
            limit: c,
            residual: (sse / d.len() as f64).sqrt() / spread,
            window: (d[0], d[d.len() - 1]),
            nodes: d.len(),
            reliable: false,
        })
    })?;
    fit.exponent = gamma;
    // An optimum on the edge of the bracket is not a power law.
    if !(0.03..=2.99).contains(&gamma) {
        fit.reliable = false;
    }
    Ok(fit)
}

/// Samples of `u_k(x) = k·u(x/k)` around the left wall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledProfile {
    pub k: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

/// Blow-up of the graph at the left wall, sampled at the grid nodes in
/// `[-window_radius, window_radius]`.
pub fn blow_up_rescale(report: &SolveReport, k: f64, window_radius: f64) -> Result<RescaledProfile, Error> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::WindowOutOfRange(format!("blow-up factor must be >= 1, got {k}")));
    }
    let g = &report.solution;
    let grid = g.grid();
    if !(window_radius > 0.0) || window_radius > grid.truncation() {
        return Err(Error::WindowOutOfRange(format!(
            "window radius {window_radius} exceeds the data range {}",
            grid.truncation()
        )));
    }
    let v = g.values();
    let h = grid.h();
    let wall = grid.left_wall() as isize;
    let reach = (window_radius / h + 1e-9).floor() as isize;
    // Position in units of h relative to the wall.
    let interp = |t: f64| -> f64 {
        let i = t.floor();
        let frac = t - i;
        let idx = (wall + i as isize) as usize;
        if frac == 0.0 {
            v[idx]
        } else {
            v[idx] * (1.0 - frac) + v[idx + 1] * frac
        }
    };
    let mut x = Vec::new();
    let mut u = Vec::new();
    for j in -reach..=reach {
        let xi = grid.x((wall + j) as usize);
        x.push(xi);
        u.push(k * interp(j as f64 / k));
    }
    Ok(RescaledProfile { k, x, u })
}
