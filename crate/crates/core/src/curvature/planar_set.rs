use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use crate::energy::Asymptote;
use crate::Error;

/// What kind of set a [`PlanarSet`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetShape {
    HalfPlane,
    SubgraphOf,
    Disk,
    CornerBarrier,
    Custom,
}

/// How the set looks outside the ball `B(0, far_radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FarField {
    /// Bounded set (`contains_infinity = false`) or bounded complement.
    Bounded { contains_infinity: bool },
    /// `{y : n·y < offset}` with `n = (cos angle, sin angle)`.
    HalfPlane { normal_angle: f64, offset: f64 },
    /// `{y₂ < F(y₁)}` with `F` the left asymptote for `y₁ < 0`, the right one otherwise.
    Subgraph { left: Asymptote, right: Asymptote },
    /// Points whose direction from `apex` lies on the counter-clockwise arc `[from, to]`.
    Wedge { apex: (f64, f64), from: f64, to: f64 },
}

type Indicator = Arc<dyn Fn(f64, f64) -> bool + Send + Sync>;

/// A planar set given by a membership oracle plus a far-field model.
#[derive(Clone)]
pub struct PlanarSet {
    indicator: Indicator,
    shape: SetShape,
    far_field: FarField,
    far_radius: f64,
    complemented: bool,
}

impl fmt::Debug for PlanarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarSet")
            .field("shape", &self.shape)
            .field("far_field", &self.far_field)
            .field("far_radius", &self.far_radius)
            .field("complemented", &self.complemented)
            .finish()
    }
}

fn wedge_contains(apex: (f64, f64), from: f64, to: f64, x: f64, y: f64) -> bool {
    let ang = (y - apex.1).atan2(x - apex.0);
    let span = (to - from).rem_euclid(TAU);
    (ang - from).rem_euclid(TAU) < span
}

impl PlanarSet {
    /// A set from an arbitrary oracle. The far-field model is spot-checked.
    pub fn custom<F>(indicator: F, far_field: FarField, far_radius: f64) -> Result<Self, Error>
    where
        F: Fn(f64, f64) -> bool + Send + Sync + 'static,
    {
        let set = Self {
            indicator: Arc::new(indicator),
            shape: SetShape::Custom,
            far_field,
            far_radius,
            complemented: false,
        };
        set.check_far_field()?;
        Ok(set)
    }

    /// `{y : (cos θ, sin θ)·y < offset}`.
    pub fn half_plane(normal_angle: f64, offset: f64) -> Self {
        let (sn, cs) = normal_angle.sin_cos();
        Self {
            indicator: Arc::new(move |x, y| cs * x + sn * y < offset),
            shape: SetShape::HalfPlane,
            far_field: FarField::HalfPlane { normal_angle, offset },
            far_radius: 0.0,
            complemented: false,
        }
    }

    pub fn disk(center: (f64, f64), radius: f64) -> Self {
        let (cx, cy) = center;
        let r2 = radius * radius;
        Self {
            indicator: Arc::new(move |x, y| (x - cx).powi(2) + (y - cy).powi(2) < r2),
            shape: SetShape::Disk,
            far_field: FarField::Bounded { contains_infinity: false },
            far_radius: (cx * cx + cy * cy).sqrt() + radius,
            complemented: false,
        }
    }

    /// Subgraph `{y₂ < f(y₁)}`; `f` must agree with the asymptotes for `|y₁| ≥ far_radius`.
    pub fn subgraph<F>(f: F, left: Asymptote, right: Asymptote, far_radius: f64) -> Result<Self, Error>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let set = Self {
            indicator: Arc::new(move |x, y| y < f(x)),
            shape: SetShape::SubgraphOf,
            far_field: FarField::Subgraph { left, right },
            far_radius,
            complemented: false,
        };
        set.check_far_field()?;
        Ok(set)
    }

    /// `{x₂ < 0 for x₁ < 0} ∪ {x₂ < b x₁ for x₁ > 0}`.
    pub fn cone(slope: f64) -> Self {
        Self::subgraph(
            move |x| if x > 0.0 { slope * x } else { 0.0 },
            Asymptote::Constant { value: 0.0 },
            Asymptote::Linear {
                slope,
                intercept: 0.0,
            },
            1.0,
        )
        .expect("cone matches its own asymptotes")
    }

    /// Subgraph of a profile with the given far field: used for barriers.
    pub(crate) fn tagged(mut self, shape: SetShape) -> Self {
        self.shape = shape;
        self
    }

    pub fn complement(&self) -> Self {
        let inner = self.indicator.clone();
        Self {
            indicator: Arc::new(move |x, y| !inner(x, y)),
            complemented: !self.complemented,
            ..self.clone()
        }
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.indicator)(x, y)
    }

    pub fn shape(&self) -> SetShape {
        self.shape
    }

    pub fn far_field(&self) -> FarField {
        self.far_field
    }

    pub fn far_radius(&self) -> f64 {
        self.far_radius
    }

    fn model_contains(&self, x: f64, y: f64) -> bool {
        let inside = match self.far_field {
            FarField::Bounded { contains_infinity } => contains_infinity,
            FarField::HalfPlane { normal_angle, offset } => {
                let (sn, cs) = normal_angle.sin_cos();
                cs * x + sn * y < offset
            }
            FarField::Subgraph { left, right } => {
                let f = if x < 0.0 { left.eval(x) } else { right.eval(x) };
                y < f
            }
            FarField::Wedge { apex, from, to } => wedge_contains(apex, from, to, x, y),
        };
        inside != self.complemented
    }

    /// Compares the oracle with the far-field model on a few circles.
    pub fn check_far_field(&self) -> Result<(), Error> {
        let base = self.far_radius.max(1.0);
        let mut mismatches = 0usize;
        let mut total = 0usize;
        for k in [1.01, 1.7, 3.0, 10.0] {
            let r = base * k;
            for j in 0..97 {
                let th = TAU * (j as f64 + 0.37) / 97.0;
                let (x, y) = (r * th.cos(), r * th.sin());
                total += 1;
                if self.contains(x, y) != self.model_contains(x, y) {
                    mismatches += 1;
                }
            }
        }
        if mismatches > 0 {
            return Err(Error::InvalidConfig {
                key: "far_field".into(),
                message: format!("far-field model disagrees with the set at {mismatches} of {total} sample points"),
            });
        }
        Ok(())
    }

    /// Radius beyond which circles around `p` see only the far-field model,
    /// with enough room for the branch-crossing search.
    pub(crate) fn model_radius_for(&self, p: (f64, f64)) -> f64 {
        let norm = p.0.hypot(p.1);
        let mut r = 2.0 * (self.far_radius + norm) + 1.0;
        if let FarField::Subgraph { left, right } = self.far_field {
            let f = if p.0 < 0.0 { left.eval(p.0) } else { right.eval(p.0) };
            r += 2.0 * (f - p.1).abs();
        }
        r
    }

    /// `A(r) = |outside ∩ circle| - |inside ∩ circle|` (angular measures)
    /// from the far-field model, valid for `r ≥ model_radius_for(p)`.
    pub(crate) fn far_angular_excess(&self, p: (f64, f64), r: f64) -> f64 {
        let value = match self.far_field {
            FarField::Bounded { contains_infinity } => {
                if contains_infinity {
                    -TAU
                } else {
                    TAU
                }
            }
            FarField::HalfPlane { normal_angle, offset } => {
                let (sn, cs) = normal_angle.sin_cos();
                let depth = offset - (cs * p.0 + sn * p.1);
                -4.0 * (depth / r).clamp(-1.0, 1.0).asin()
            }
            FarField::Subgraph { left, right } => {
                let fun = |y1: f64| if y1 < 0.0 { left.eval(y1) } else { right.eval(y1) };
                let gap = |th: f64| p.1 + r * th.sin() - fun(p.0 + r * th.cos());
                let right_cross = bisect_sign_change(gap, -0.5 * PI, 0.5 * PI);
                let left_cross = bisect_sign_change(|th| -gap(th), 0.5 * PI, 1.5 * PI);
                let inside = right_cross + TAU - left_cross;
                TAU - 2.0 * inside
            }
            FarField::Wedge { apex, from, to } => {
                let inside = circle_inside_measure(
                    |x, y| wedge_contains(apex, from, to, x, y),
                    p,
                    r,
                    256,
                );
                TAU - 2.0 * inside
            }
        };
        if self.complemented {
            -value
        } else {
            value
        }
    }
}

/// Root of `f` on `[a, b]` given `f(a) < 0 < f(b)`, to full precision.
fn bisect_sign_change(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Angular measure of `{θ : p + r e^{iθ} ∈ set}` by sampling `samples`
/// directions and bisecting every detected transition.
pub(crate) fn circle_inside_measure(
    contains: impl Fn(f64, f64) -> bool,
    p: (f64, f64),
    r: f64,
    samples: usize,
) -> f64 {
    // Offset keeps the samples off lattice directions such as the axes.
    const PHASE: f64 = std::f64::consts::FRAC_1_PI;
    let at = |th: f64| contains(p.0 + r * th.cos(), p.1 + r * th.sin());
    let step = TAU / samples as f64;
    let theta = |k: usize| step * (k as f64 + PHASE);
    let first = at(theta(0));
    let mut prev = first;
    let mut inside = 0.0;
    let mut entered: Option<f64> = None;
    let mut first_exit: Option<f64> = None;
    for k in 1..=samples {
        let cur = if k == samples { first } else { at(theta(k)) };
        if cur != prev {
            let (mut a, mut b) = (theta(k - 1), theta(k));
            for _ in 0..64 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if at(m) == prev {
                    a = m;
                } else {
                    b = m;
                }
            }
            let cross = 0.5 * (a + b);
            if cur {
                entered = Some(cross);
            } else if let Some(e) = entered.take() {
                inside += cross - e;
            } else {
                first_exit = Some(cross);
            }
        }
        prev = cur;
    }
    match (entered, first_exit) {
        (Some(e), Some(x)) => inside += x + TAU - e,
        (None, None) if first => inside = TAU,
        _ => {}
    }
    inside
}
