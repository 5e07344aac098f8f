use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Far-field behaviour of the exterior datum on one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Asymptote {
    Constant { value: f64 },
    Linear { slope: f64, intercept: f64 },
    /// `offset + amplitude · |y|^exponent`.
    Power { amplitude: f64, exponent: f64, offset: f64 },
}

impl Asymptote {
    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            Asymptote::Constant { value } => value,
            Asymptote::Linear { slope, intercept } => slope * y + intercept,
            Asymptote::Power {
                amplitude,
                exponent,
                offset,
            } => offset + amplitude * y.abs().powf(exponent),
        }
    }

    /// `(u - self(x + dir·d)) / d`, arranged to stay accurate for large `d`.
    #[inline]
    pub(crate) fn quotient(&self, u: f64, x: f64, dir: f64, d: f64) -> f64 {
        match *self {
            Asymptote::Constant { value } => (u - value) / d,
            Asymptote::Linear { slope, intercept } => (u - slope * x - intercept) / d - slope * dir,
            Asymptote::Power {
                amplitude,
                exponent,
                offset,
            } => (u - offset) / d - amplitude * (x + dir * d).abs().powf(exponent) / d,
        }
    }
}

/// Smooth compactly supported bump `height · (1 - ((x - c)/w)²)³` on `|x - c| ≤ w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub height: f64,
}

impl Bump {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let r = (x - self.center) / self.width;
        if r.abs() >= 1.0 {
            0.0
        } else {
            let q = 1.0 - r * r;
            self.height * q * q * q
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Prescribed values `u₀` on `ℝ ∖ (0, 1)` with a far-field model per side.
#[derive(Clone)]
pub struct ExteriorDatum {
    evaluator: Evaluator,
    left: Asymptote,
    right: Asymptote,
    /// Radius beyond which the datum coincides with its asymptotes.
    far_radius: f64,
    /// `(h₀, β)`: `u₀ ∈ C^{1,β}` on `[-h₀, 0]` and `[1, 1 + h₀]`.
    smoothness: Option<(f64, f64)>,
    label: String,
}

impl fmt::Debug for ExteriorDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExteriorDatum")
            .field("label", &self.label)
            .field("left", &self.left)
            .field("right", &self.right)
            .field("far_radius", &self.far_radius)
            .finish()
    }
}

impl ExteriorDatum {
    pub fn from_fn<F>(evaluator: F, left: Asymptote, right: Asymptote, far_radius: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            evaluator: Arc::new(evaluator),
            left,
            right,
            far_radius,
            smoothness: None,
            label: "custom".into(),
        }
    }

    pub fn flat() -> Self {
        Self::linear(0.0, 0.0).labelled("flat")
    }

    pub fn linear(slope: f64, intercept: f64) -> Self {
        let asym = Asymptote::Linear { slope, intercept };
        let mut d = Self::from_fn(move |x| slope * x + intercept, asym, asym, 0.0);
        if slope == 0.0 {
            let c = Asymptote::Constant { value: intercept };
            d.left = c;
            d.right = c;
        }
        d.smoothness = Some((f64::INFINITY, 1.0));
        d.labelled("linear")
    }

    /// Linear base plus a sum of [`Bump`]s.
    pub fn with_bumps(slope: f64, intercept: f64, bumps: Vec<Bump>) -> Self {
        let base = Self::linear(slope, intercept);
        let reach = bumps
            .iter()
            .map(|b| b.center.abs().max((b.center - 1.0).abs()) + b.width)
            .fold(0.0, f64::max);
        let bumps_eval = bumps.clone();
        Self {
            evaluator: Arc::new(move |x| {
                slope * x + intercept + bumps_eval.iter().map(|b| b.eval(x)).sum::<f64>()
            }),
            far_radius: reach,
            smoothness: Some((bump_clearance(&bumps), 1.0)),
            label: "bumps".into(),
            ..base
        }
    }

    /// Two symmetric bumps of the given height and half-width touching the
    /// walls from outside: centers `-width` and `1 + width`.
    pub fn two_bump(height: f64, width: f64) -> Self {
        Self::with_bumps(
            0.0,
            0.0,
            vec![
                Bump {
                    center: -width,
                    width,
                    height,
                },
                Bump {
                    center: 1.0 + width,
                    width,
                    height,
                },
            ],
        )
        .labelled("two_bump")
    }

    /// `self + t · φ` for a perturbation `φ ≥ 0` supported in `(-2, 0]`.
    pub fn perturbed(&self, bump: Bump, t: f64) -> Result<Self, Error> {
        validate_perturbation(&bump)?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidDatum(format!("perturbation size t must be >= 0, got {t}")));
        }
        let base = self.evaluator.clone();
        let reach = self.far_radius.max(bump.center.abs() + bump.width);
        Ok(Self {
            evaluator: Arc::new(move |x| base(x) + t * bump.eval(x)),
            far_radius: reach,
            label: format!("{}+{}φ", self.label, t),
            ..self.clone()
        })
    }

    /// `self + c`, asymptotes included.
    pub fn shifted(&self, c: f64) -> Self {
        let shift = |a: Asymptote| match a {
            Asymptote::Constant { value } => Asymptote::Constant { value: value + c },
            Asymptote::Linear { slope, intercept } => Asymptote::Linear {
                slope,
                intercept: intercept + c,
            },
            Asymptote::Power {
                amplitude,
                exponent,
                offset,
            } => Asymptote::Power {
                amplitude,
                exponent,
                offset: offset + c,
            },
        };
        let base = self.evaluator.clone();
        Self {
            evaluator: Arc::new(move |x| base(x) + c),
            left: shift(self.left),
            right: shift(self.right),
            ..self.clone()
        }
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_smoothness(mut self, window: f64, beta: f64) -> Self {
        self.smoothness = Some((window, beta));
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.evaluator)(x)
    }

    pub fn left_limit(&self) -> f64 {
        self.eval(0.0)
    }

    pub fn right_limit(&self) -> f64 {
        self.eval(1.0)
    }

    pub fn left_asymptote(&self) -> Asymptote {
        self.left
    }

    pub fn right_asymptote(&self) -> Asymptote {
        self.right
    }

    pub fn far_radius(&self) -> f64 {
        self.far_radius
    }

    pub fn smoothness(&self) -> Option<(f64, f64)> {
        self.smoothness
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Checks the asymptote models against the evaluator beyond the grid
    /// ends `(left_end, right_end)`.
    pub fn check_asymptotes(&self, left_end: f64, right_end: f64) -> Result<(), Error> {
        for k in [1.0, 1.37, 2.0, 5.0, 20.0, 1e3] {
            for (y, asym) in [(left_end * k, self.left), (right_end * k, self.right)] {
                let exact = self.eval(y);
                let model = asym.eval(y);
                if !exact.is_finite() || (exact - model).abs() > 1e-9 * model.abs().max(1.0) {
                    return Err(Error::InvalidDatum(format!(
                        "asymptote {asym:?} disagrees with the datum at y = {y}: {model} vs {exact}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn bump_clearance(bumps: &[Bump]) -> f64 {
    // Distance from each wall to the nearest bump support edge.
    bumps
        .iter()
        .flat_map(|b| {
            let (lo, hi) = b.support();
            [(0.0 - hi).max(lo - 1.0)]
        })
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

pub(crate) fn validate_perturbation(bump: &Bump) -> Result<(), Error> {
    let (lo, hi) = bump.support();
    if !(bump.height > 0.0) || !(bump.width > 0.0) {
        return Err(Error::InvalidDatum("perturbation must be nonnegative and not identically zero".into()));
    }
    if !(lo > -2.0 && hi <= 0.0) {
        return Err(Error::InvalidDatum(format!(
            "perturbation support [{lo}, {hi}] must lie in (-2, 0]"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        let b = Bump {
            center: -1.0,
            width: 0.5,
            height: 2.0,
        };
        assert_eq!(b.eval(-1.0), 2.0);
        assert_eq!(b.eval(-0.5), 0.0);
        assert_eq!(b.eval(0.0), 0.0);
        assert!(b.eval(-0.75) > 0.0);
    }

    #[test]
    fn two_bump_vanishes_at_walls() {
        let d = ExteriorDatum::two_bump(0.5, 0.5);
        assert_eq!(d.left_limit(), 0.0);
        assert_eq!(d.right_limit(), 0.0);
        assert_eq!(d.eval(-0.5), 0.5);
        assert_eq!(d.eval(1.5), 0.5);
        d.check_asymptotes(-4.0, 5.0).unwrap();
    }

    #[test]
    fn perturbation_support_is_checked() {
        let base = ExteriorDatum::flat();
        let ok = Bump {
            center: -1.0,
            width: 0.5,
            height: 1.0,
        };
        assert!(base.perturbed(ok, 0.1).is_ok());
        let inside = Bump {
            center: 0.2,
            width: 0.1,
            height: 1.0,
        };
        assert!(base.perturbed(inside, 0.1).is_err());
        let too_far = Bump {
            center: -1.95,
            width: 0.1,
            height: 1.0,
        };
        assert!(base.perturbed(too_far, 0.1).is_err());
    }

    #[test]
    fn asymptote_mismatch_is_reported() {
        let d = ExteriorDatum::from_fn(|x| x, Asymptote::Constant { value: 0.0 }, Asymptote::Constant { value: 0.0 }, 0.0);
        assert!(d.check_asymptotes(-4.0, 5.0).is_err());
    }
}
