use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::curvature::{set_curvature_2d, CurvatureSample, FarField, PlanarSet, SetShape};
use crate::energy::Asymptote;
use crate::{Error, FractionalOrder};

/// Continuation of the barrier profile beyond the end of the ramp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cap {
    Flat,
    /// Continues with the given slope, usually negative.
    Bent { slope: f64 },
}

/// Subgraph of the profile `-δ` for `x₁ ≤ 0`, `-δ + m·x₁` on `(0, x_b]`,
/// then the cap. The concave corner sits at `(0, -δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierParams {
    pub delta: f64,
    pub slope: f64,
    pub ramp_end: f64,
    pub cap: Cap,
}

impl Default for BarrierParams {
    fn default() -> Self {
        Self {
            delta: 0.0,
            slope: 1.0,
            ramp_end: 1.0,
            cap: Cap::Bent { slope: -1.0 },
        }
    }
}

impl BarrierParams {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |key: &str, message: String| Error::InvalidConfig {
            key: key.into(),
            message,
        };
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(bad("delta", format!("need delta >= 0, got {}", self.delta)));
        }
        // Slope zero is the degenerate barrier without a corner.
        if !(self.slope >= 0.0 && self.slope.is_finite()) {
            return Err(bad("slope", format!("need slope >= 0, got {}", self.slope)));
        }
        if !(self.ramp_end > 0.0 && self.ramp_end.is_finite()) {
            return Err(bad("ramp_end", format!("need ramp_end > 0, got {}", self.ramp_end)));
        }
        if let Cap::Bent { slope } = self.cap {
            if !slope.is_finite() {
                return Err(bad("cap", "cap slope must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn corner(&self) -> (f64, f64) {
        (0.0, -self.delta)
    }

    pub fn profile(&self, x: f64) -> f64 {
        let top = -self.delta + self.slope * self.ramp_end;
        if x <= 0.0 {
            -self.delta
        } else if x <= self.ramp_end {
            -self.delta + self.slope * x
        } else {
            match self.cap {
                Cap::Flat => top,
                Cap::Bent { slope } => top + slope * (x - self.ramp_end),
            }
        }
    }

    /// Radius beyond which the subgraph agrees with its asymptotes in every direction.
    fn far_radius(&self) -> f64 {
        let bend = match self.cap {
            Cap::Flat => 0.0,
            Cap::Bent { slope } => slope.abs(),
        };
        2.0 * (self.ramp_end * (1.0 + self.slope + bend) + self.delta) + 1.0
    }

    pub fn ramp_length(&self) -> f64 {
        self.ramp_end * self.slope.hypot(1.0)
    }

    /// Point on the ramp at arc length `t` from the corner.
    pub fn ramp_point(&self, t: f64) -> (f64, f64) {
        let (sn, cs) = self.slope.atan().sin_cos();
        (t * cs, -self.delta + t * sn)
    }

    pub fn set(&self) -> Result<PlanarSet, Error> {
        self.validate()?;
        let p = *self;
        let top = -p.delta + p.slope * p.ramp_end;
        let right = match p.cap {
            Cap::Flat => Asymptote::Constant { value: top },
            Cap::Bent { slope } => Asymptote::Linear {
                slope,
                intercept: top - slope * p.ramp_end,
            },
        };
        let set = PlanarSet::subgraph(
            move |x| p.profile(x),
            Asymptote::Constant { value: -p.delta },
            right,
            p.far_radius(),
        )?;
        Ok(set.tagged(SetShape::CornerBarrier))
    }
}

/// Curvature of the barrier at ramp points `t` from the corner; `t = 0` is
/// the corner itself.
pub fn barrier_curvature_scan(
    order: &FractionalOrder,
    params: &BarrierParams,
    distances: &[f64],
    tol: f64,
) -> Result<Vec<CurvatureSample>, Error> {
    let set = params.set()?;
    distances
        .iter()
        .map(|&t| {
            let length = params.ramp_length();
            if !(t >= 0.0 && t < length) {
                return Err(Error::InvalidConfig {
                    key: "sample_points".into(),
                    message: format!("ramp distance {t} outside [0, {length})"),
                });
            }
            set_curvature_2d(&set, params.ramp_point(t), order, tol)
        })
        .collect()
}

/// `{x₂ ≤ 0} ∪ {x₁ ≥ μ}`: a half-plane with a vertical wall sliding in from
/// the right.
pub fn sliding_contact_set(mu: f64) -> Result<PlanarSet, Error> {
    PlanarSet::custom(
        move |x, y| y <= 0.0 || x >= mu,
        FarField::Wedge {
            apex: (mu, 0.0),
            from: PI,
            to: 0.5 * PI,
        },
        mu.abs() + 1.0,
    )
}

/// Curvature on the wall of [`sliding_contact_set`] at heights `t > 0`.
pub fn sliding_contact_scan(
    order: &FractionalOrder,
    mu: f64,
    heights: &[f64],
    tol: f64,
) -> Result<Vec<CurvatureSample>, Error> {
    let set = sliding_contact_set(mu)?;
    heights
        .iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(Error::NotBoundaryPoint(mu, t));
            }
            set_curvature_2d(&set, (mu, t), order, tol)
        })
        .collect()
}

/// Closed form of the sliding-contact curvature at height `t`:
/// `-t^-s √π Γ((1+s)/2) / (s Γ(1+s/2))`.
pub fn sliding_contact_exact(s: f64, t: f64) -> f64 {
    -t.powf(-s) * PI.sqrt() * gamma(0.5 * (1.0 + s)) / (s * gamma(1.0 + 0.5 * s))
}
