//! Kernel primitives of the graph-reduced fractional perimeter.
//!
//! With `p = (2 + s) / 2`, the vertical integral of the planar kernel
//! `|x - y|^-(2+s)` over a half-line reduces to the odd primitive
//!
//! ```text
//! G(t) = ∫_0^t (1 + τ²)^(-p) dτ,        G(±∞) = ±(√π/2) Γ((1+s)/2) / Γ(1 + s/2)
//! ```
//!
//! and the energy density of a pair is its even convex primitive
//! `𝒢(t) = ∫_0^t G`. Both are tabulated once per order on `[0, T_cut]`
//! with cubic Hermite interpolation (exact derivatives at the nodes) and
//! continued past `T_cut` by the convergent large-`t` expansion. `𝒢` is the
//! exact integral of the interpolated `G`, so the discrete energy and its
//! gradient are consistent to rounding.

mod quadrature;
mod zeta;

use std::fmt;
use std::sync::Arc;

pub use quadrature::{
    adaptive_quadrature, fixed_kronrod, graded_unit_rule, integrate, QuadError, QuadEstimate,
    QuadOptions,
};
pub use zeta::riemann_zeta;

use crate::Error;

/// Default tabulation cut-off for `G`.
pub const DEFAULT_T_CUT: f64 = 50.0;
/// Default number of table cells per unit length.
pub const DEFAULT_CELLS_PER_UNIT: usize = 256;

const TAIL_TERMS: usize = 12;

struct KernelTable {
    step: f64,
    inv_step: f64,
    t_cut: f64,
    g: Vec<f64>,
    dg: Vec<f64>,
    gg: Vec<f64>,
    // c_k / (1 + s + 2k) for the expansion of g_inf - G(t).
    tail: [f64; TAIL_TERMS],
}

/// Validated fractional parameter `s ∈ (0, 1)` with its derived constants
/// and kernel tables. Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct FractionalOrder {
    s: f64,
    sigma: f64,
    exponent: f64,
    g_infinity: f64,
    zeta_s: f64,
    table: Arc<KernelTable>,
}

impl fmt::Debug for FractionalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FractionalOrder")
            .field("s", &self.s)
            .field("sigma", &self.sigma)
            .field("g_infinity", &self.g_infinity)
            .field("t_cut", &self.table.t_cut)
            .finish()
    }
}

impl PartialEq for FractionalOrder {
    fn eq(&self, other: &Self) -> bool {
        self.s == other.s && self.table.t_cut == other.table.t_cut && self.table.step == other.table.step
    }
}

/// Closed form of `∫_0^∞ (1 + τ²)^(-p) dτ` for `p = (2 + s)/2`.
pub fn g_infinity_closed_form(s: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    0.5 * std::f64::consts::PI.sqrt() * (ln_gamma(0.5 * (1.0 + s)) - ln_gamma(1.0 + 0.5 * s)).exp()
}

impl FractionalOrder {
    pub fn new(s: f64) -> Result<Self, Error> {
        Self::with_table(s, DEFAULT_T_CUT, DEFAULT_CELLS_PER_UNIT)
    }

    /// Builds the order with an explicit table cut-off and resolution.
    pub fn with_table(s: f64, t_cut: f64, cells_per_unit: usize) -> Result<Self, Error> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidOrder(s));
        }
        if !(t_cut >= 4.0 && t_cut.is_finite()) || cells_per_unit < 16 {
            return Err(Error::InvalidConfig {
                key: "t_cut".into(),
                message: format!("table needs t_cut >= 4 and >= 16 cells per unit (got {t_cut}, {cells_per_unit})"),
            });
        }
        let p = 1.0 + 0.5 * s;
        let cells = (t_cut * cells_per_unit as f64).round() as usize;
        let step = t_cut / cells as f64;
        let density = |t: f64| (1.0 + t * t).powf(-p);

        let mut g = Vec::with_capacity(cells + 1);
        let mut dg = Vec::with_capacity(cells + 1);
        let mut gg = Vec::with_capacity(cells + 1);
        g.push(0.0);
        dg.push(1.0);
        gg.push(0.0);
        for k in 0..cells {
            let a = k as f64 * step;
            let b = (k + 1) as f64 * step;
            // Degree-31 rule on a cell of width 1/256: exact to rounding.
            let piece = fixed_kronrod(&density, a, b);
            let g_next = g[k] + piece;
            let d_next = density(b);
            // Exact integral of the Hermite cubic over the full cell.
            let cell_integral = step * (0.5 * (g[k] + g_next) + step * (dg[k] - d_next) / 12.0);
            gg.push(gg[k] + cell_integral);
            g.push(g_next);
            dg.push(d_next);
        }

        let mut tail = [0.0; TAIL_TERMS];
        let mut c = 1.0;
        for (k, slot) in tail.iter_mut().enumerate() {
            let kf = k as f64;
            *slot = c / (1.0 + s + 2.0 * kf);
            c *= -(p + kf) / (kf + 1.0);
        }

        Ok(Self {
            s,
            sigma: 0.5 * (1.0 + s),
            exponent: p,
            g_infinity: g_infinity_closed_form(s),
            zeta_s: riemann_zeta(s),
            table: Arc::new(KernelTable {
                step,
                inv_step: 1.0 / step,
                t_cut,
                g,
                dg,
                gg,
                tail,
            }),
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `σ = (1 + s)/2`, the order of the linearized operator at flat points.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `G(+∞)`.
    pub fn g_infinity(&self) -> f64 {
        self.g_infinity
    }

    pub fn zeta(&self) -> f64 {
        self.zeta_s
    }

    pub fn t_cut(&self) -> f64 {
        self.table.t_cut
    }

    /// `(1 + t²)^(-(2+s)/2)`, the derivative of [`Self::kernel_primitive`].
    #[inline]
    pub fn kernel_density(&self, t: f64) -> f64 {
        (1.0 + t * t).powf(-self.exponent)
    }

    /// Multiplier applied to nearest-neighbour pairs in lattice sums of
    /// `|δ|^-(1+s)`-singular integrands: `1 - ζ(s)`.
    pub fn near_neighbour_factor(&self) -> f64 {
        1.0 - self.zeta_s
    }

    fn tail_deficit(&self, t: f64) -> f64 {
        // g_inf - G(t) for t >= t_cut.
        let inv2 = 1.0 / (t * t);
        let mut pow = t.powf(-(1.0 + self.s));
        let mut acc = 0.0;
        for c in self.table.tail {
            acc += c * pow;
            pow *= inv2;
        }
        acc
    }

    /// The odd primitive `G(t)`; saturates to `±G(∞)` at `t = ±∞`.
    #[inline]
    pub fn kernel_primitive(&self, t: f64) -> f64 {
        if t < 0.0 {
            return -self.kernel_primitive_nonneg(-t);
        }
        self.kernel_primitive_nonneg(t)
    }

    #[inline]
    fn kernel_primitive_nonneg(&self, t: f64) -> f64 {
        let tab = &*self.table;
        if t >= tab.t_cut {
            if t == f64::INFINITY {
                return self.g_infinity;
            }
            return self.g_infinity - self.tail_deficit(t);
        }
        if t.is_nan() {
            return f64::NAN;
        }
        let x = t * tab.inv_step;
        let k = (x as usize).min(tab.g.len() - 2);
        let th = x - k as f64;
        let th2 = th * th;
        let th3 = th2 * th;
        let h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
        let h10 = th3 - 2.0 * th2 + th;
        let h01 = -2.0 * th3 + 3.0 * th2;
        let h11 = th3 - th2;
        h00 * tab.g[k] + h10 * tab.step * tab.dg[k] + h01 * tab.g[k + 1] + h11 * tab.step * tab.dg[k + 1]
    }

    /// The even convex primitive `𝒢(t) = ∫_0^t G`.
    pub fn kernel_double_primitive(&self, t: f64) -> f64 {
        let t = t.abs();
        let tab = &*self.table;
        if t >= tab.t_cut {
            let tc = tab.t_cut;
            let base = *tab.gg.last().expect("table is non-empty");
            let mut acc = self.g_infinity * (t - tc);
            // ∫_tc^t τ^-(1+s+2k) dτ = (tc^-(s+2k) - t^-(s+2k)) / (s+2k)
            for (k, c) in tab.tail.iter().enumerate() {
                let e = self.s + 2.0 * k as f64;
                acc -= c * (tc.powf(-e) - t.powf(-e)) / e;
            }
            return base + acc;
        }
        if t.is_nan() {
            return f64::NAN;
        }
        let x = t * tab.inv_step;
        let k = (x as usize).min(tab.g.len() - 2);
        let th = x - k as f64;
        let th2 = th * th;
        let th3 = th2 * th;
        let th4 = th2 * th2;
        let i00 = th - th3 + 0.5 * th4;
        let i10 = 0.5 * th2 - 2.0 * th3 / 3.0 + 0.25 * th4;
        let i01 = th3 - 0.5 * th4;
        let i11 = 0.25 * th4 - th3 / 3.0;
        tab.gg[k]
            + tab.step
                * (i00 * tab.g[k]
                    + i10 * tab.step * tab.dg[k]
                    + i01 * tab.g[k + 1]
                    + i11 * tab.step * tab.dg[k + 1])
    }
}


impl FractionalOrder {
    /// `𝒢(m + δ/2) - 𝒢(m - δ/2)`, without cancellation for small `δ`.
    pub fn kernel_double_primitive_increment(&self, mid: f64, delta: f64) -> f64 {
        if delta.abs() > 1e-3 {
            return self.kernel_double_primitive(mid + 0.5 * delta) - self.kernel_double_primitive(mid - 0.5 * delta);
        }
        // δ G(m) + δ³ G''(m) / 24
        let q = 1.0 + mid * mid;
        let density_slope = -2.0 * self.exponent * mid * q.powf(-self.exponent - 1.0);
        delta * self.kernel_primitive(mid) + delta * delta * delta * density_slope / 24.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct_g(s: f64, t: f64) -> f64 {
        let p = 1.0 + 0.5 * s;
        adaptive_quadrature(|x| (1.0 + x * x).powf(-p), 0.0, t, 1e-13).unwrap().value
    }

    /// Brute-force `𝒢(t) = ∫_0^t ∫_0^u k`, evaluated as `∫_0^t (t - σ) k(σ) dσ`.
    fn brute_double(s: f64, t: f64) -> f64 {
        let p = 1.0 + 0.5 * s;
        adaptive_quadrature(|x| (t - x) * (1.0 + x * x).powf(-p), 0.0, t, 1e-12).unwrap().value
    }

    #[test]
    fn rejects_out_of_range() {
        for s in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(FractionalOrder::new(s).is_err());
        }
    }

    #[test]
    fn sigma_range() {
        for s in [0.01, 0.5, 0.99] {
            let o = FractionalOrder::new(s).unwrap();
            assert!(o.sigma() > 0.5 && o.sigma() < 1.0);
        }
    }

    #[test]
    fn primitive_examples() {
        let o = FractionalOrder::new(0.5).unwrap();
        assert_eq!(o.kernel_primitive(0.0), 0.0);
        assert_eq!(o.kernel_primitive(-2.0), -o.kernel_primitive(2.0));
        assert_eq!(o.kernel_primitive(f64::INFINITY), o.g_infinity());
        assert_eq!(o.kernel_primitive(f64::NEG_INFINITY), -o.g_infinity());
    }

    #[test]
    fn g_infinity_against_quadrature() {
        // ∫_0^∞ (1+τ²)^(-p) = ∫_0^{π/2} cos^s θ dθ.
        for s in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let o = FractionalOrder::new(s).unwrap();
            let q = adaptive_quadrature(|th: f64| th.cos().powf(s), 0.0, std::f64::consts::FRAC_PI_2, 1e-13)
                .unwrap()
                .value;
            assert!(((o.g_infinity() - q) / q).abs() < 1e-10, "s={s}");
            // Table + tail match the closed form at the seam.
            let seam = o.kernel_primitive_nonneg(o.t_cut() * (1.0 - 1e-12)) + o.tail_deficit(o.t_cut());
            assert!(((seam - o.g_infinity()) / q).abs() < 1e-10);
        }
    }

    #[test]
    fn interpolated_primitive_accuracy() {
        for s in [0.1, 0.5, 0.9] {
            let o = FractionalOrder::new(s).unwrap();
            for &t in &[1e-7, 0.013, 0.3, 0.777, 1.0, 2.5, 9.99, 33.3, 49.9, 50.0, 70.0, 400.0] {
                let exact = direct_g(s, t);
                let got = o.kernel_primitive(t);
                assert!(((got - exact) / exact).abs() < 1e-10, "s={s} t={t}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn double_primitive_examples() {
        let o = FractionalOrder::new(0.3).unwrap();
        assert_eq!(o.kernel_double_primitive(0.0), 0.0);
        assert_eq!(o.kernel_double_primitive(-1.0), o.kernel_double_primitive(1.0));
        // Brute-force double integral at t = 10; offset from the linear asymptote.
        let brute = brute_double(0.3, 10.0);
        let got = o.kernel_double_primitive(10.0);
        assert!(((got - brute) / brute).abs() < 1e-10, "{got} vs {brute}");
        let offset = 10.0 * o.g_infinity() - brute;
        // c(0.3) at t = 10, frozen from a 30-digit quadrature; below its limit 1/s.
        assert!((offset - 2.048_994_532_445_348).abs() < 1e-9, "offset {offset}");
        // Far out the offset approaches 1/s.
        let far = 1e8;
        let far_offset = far * o.g_infinity() - o.kernel_double_primitive(far);
        assert!((far_offset - 1.0 / 0.3).abs() < 0.02, "{far_offset}");
    }

    #[test]
    fn double_primitive_matches_closed_form() {
        // 𝒢(t) = t G(t) - (1 - (1+t²)^(-s/2)) / s
        for s in [0.1, 0.5, 0.9] {
            let o = FractionalOrder::new(s).unwrap();
            for &t in &[0.01, 0.5, 3.0, 20.0, 49.0, 51.0, 1e3] {
                let closed = t * o.kernel_primitive(t) + (-0.5 * s * (t * t).ln_1p()).exp_m1() / s;
                let got = o.kernel_double_primitive(t);
                assert!(((got - closed) / closed).abs() < 1e-10, "s={s} t={t}");
            }
        }
    }

    #[test]
    fn derivative_consistency() {
        let o = FractionalOrder::new(0.4).unwrap();
        let h = 1e-5;
        let mut t = -10.0;
        while t <= 10.0 {
            let fd = (o.kernel_double_primitive(t + h) - o.kernel_double_primitive(t - h)) / (2.0 * h);
            assert!((fd - o.kernel_primitive(t)).abs() < 1e-7, "t={t}");
            t += 0.173;
        }
    }

    #[test]
    fn difference_matches_direct_subtraction() {
        let o = FractionalOrder::new(0.3).unwrap();
        for &(a, b) in &[(0.5, 0.4995), (3.0, 3.0 + 1e-8), (-2.0, -2.0 - 5e-4), (1e-5, -1e-5), (0.7, 0.2)] {
            let stable = o.kernel_double_primitive_increment(0.5 * (a + b), a - b);
            let direct = o.kernel_double_primitive(a) - o.kernel_double_primitive(b);
            assert!((stable - direct).abs() < 1e-15 + 1e-9 * direct.abs(), "{a} {b}");
        }
        assert_eq!(o.kernel_double_primitive_increment(0.0, 0.5), 0.0);
    }

    proptest! {
        #[test]
        fn oddness(s in 0.01f64..0.99, t in -200.0f64..200.0) {
            let o = FractionalOrder::with_table(s, 20.0, 64).unwrap();
            prop_assert_eq!(o.kernel_primitive(-t), -o.kernel_primitive(t));
        }

        #[test]
        fn monotone_saturation(s in 0.05f64..0.95, t1 in -80.0f64..80.0, dt in 1e-4f64..10.0) {
            let o = FractionalOrder::new(s).unwrap();
            let t2 = t1 + dt;
            prop_assert!(o.kernel_primitive(t1) < o.kernel_primitive(t2));
            prop_assert!(o.kernel_primitive(t2) <= o.g_infinity());
        }

        #[test]
        fn convexity(s in 0.05f64..0.95, t1 in -60.0f64..60.0, t2 in -60.0f64..60.0) {
            let o = FractionalOrder::new(s).unwrap();
            let mid = o.kernel_double_primitive(0.5 * (t1 + t2));
            let avg = 0.5 * (o.kernel_double_primitive(t1) + o.kernel_double_primitive(t2));
            prop_assert!(mid <= avg + 1e-12);
        }
    }
}
