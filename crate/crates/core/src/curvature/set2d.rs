use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::planar_set::{circle_inside_measure, PlanarSet};
use crate::special::{integrate, QuadError, QuadOptions};
use crate::{Error, FractionalOrder};

/// One evaluation of the planar nonlocal mean curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub point: (f64, f64),
    /// `±∞` when the principal value diverges.
    pub value: f64,
    /// Finite exactly when the quadrature converged.
    pub estimated_error: f64,
    /// `(inner, outer)`: analytic remainder below `inner`, far-field model beyond `outer`.
    pub cutoff_radii: (f64, f64),
}

impl CurvatureSample {
    pub fn is_divergent(&self) -> bool {
        self.value.is_infinite()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SetCurvatureOptions {
    /// Arc length between angular samples when locating boundary crossings.
    pub angular_resolution: f64,
    pub max_annuli: usize,
}

impl Default for SetCurvatureOptions {
    fn default() -> Self {
        Self {
            angular_resolution: 5e-3,
            max_annuli: 80,
        }
    }
}

/// `PV ∫ (χ_{ℝ²∖E} - χ_E)(y) |x - y|^-(2+s) dy` at a boundary point.
pub fn set_curvature_2d(
    set: &PlanarSet,
    point: (f64, f64),
    order: &FractionalOrder,
    tol: f64,
) -> Result<CurvatureSample, Error> {
    set_curvature_2d_with(set, point, order, tol, SetCurvatureOptions::default())
}

pub fn set_curvature_2d_with(
    set: &PlanarSet,
    point: (f64, f64),
    order: &FractionalOrder,
    tol: f64,
    opts: SetCurvatureOptions,
) -> Result<CurvatureSample, Error> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig {
            key: "tol".into(),
            message: format!("tolerance must be positive, got {tol}"),
        });
    }
    let s = order.s();
    let excess = |r: f64| {
        let samples = ((TAU * r / opts.angular_resolution).ceil() as usize).clamp(256, 8192);
        TAU - 2.0 * circle_inside_measure(|x, y| set.contains(x, y), point, r, samples)
    };

    // Probe at a tiny radius: no crossing means the point is off the
    // boundary; a non-vanishing excess means a corner.
    let scale = point.0.hypot(point.1).max(1.0);
    let probe = 1e-9 * scale;
    let a1 = excess(probe);
    if (a1.abs() - TAU).abs() < 1e-12 {
        return Err(Error::NotBoundaryPoint(point.0, point.1));
    }
    let a2 = excess(0.125 * probe);
    if a1.abs() > 1e-6 && a2.abs() > 1e-6 && a1.signum() == a2.signum() && (a1 - a2).abs() < 1e-3 * a1.abs() {
        return Ok(CurvatureSample {
            point,
            value: f64::INFINITY.copysign(a1),
            estimated_error: f64::INFINITY,
            cutoff_radii: (probe, f64::INFINITY),
        });
    }

    let outer = set.model_radius_for(point);
    let quad = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64| {
        integrate(
            f,
            a,
            b,
            QuadOptions {
                abs_tol,
                rel_tol: 0.0,
                max_intervals: 2000,
            },
        )
    };

    // Far field: r = outer · w^(-1/s), r^-(1+s) dr = outer^-s / s dw.
    let far_scale = outer.powf(-s) / s;
    let far = quad(
        &|w: f64| set.far_angular_excess(point, (outer * w.powf(-1.0 / s)).min(1e300)),
        0.0,
        1.0,
        tol / (8.0 * far_scale),
    )?;
    let mut value = far.value * far_scale;
    let mut error = far.error * far_scale;

    // Dyadic annuli inwards; stop once the linear remainder has settled.
    let mut hi = outer;
    let mut slopes: Vec<f64> = Vec::new();
    let mut inner = None;
    for _ in 0..opts.max_annuli {
        let lo = 0.5 * hi;
        let piece = quad(&|r: f64| r.powf(-1.0 - s) * excess(r), lo, hi, tol / 32.0)?;
        value += piece.value;
        error += piece.error;
        hi = lo;
        slopes.push(excess(lo) / lo);
        let k = slopes.len();
        if k >= 3 {
            let weight = lo.powf(1.0 - s) / (1.0 - s);
            let d1 = (slopes[k - 1] - slopes[k - 2]).abs() * weight;
            let d2 = (slopes[k - 2] - slopes[k - 3]).abs() * weight * 2f64.powf(1.0 - s);
            if d1.max(d2) < tol / 4.0 {
                value += slopes[k - 1] * weight;
                error += d1.max(d2);
                inner = Some(lo);
                break;
            }
        }
    }
    let Some(inner) = inner else {
        return Err(Error::Quadrature(QuadError::NotConverged {
            estimate: value,
            error,
            intervals: opts.max_annuli,
        }));
    };
    if error > tol {
        return Err(Error::Quadrature(QuadError::NotConverged {
            estimate: value,
            error,
            intervals: slopes.len(),
        }));
    }
    Ok(CurvatureSample {
        point,
        value,
        estimated_error: error,
        cutoff_radii: (inner, outer),
    })
}
