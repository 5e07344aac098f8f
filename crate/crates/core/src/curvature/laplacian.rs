use crate::special::{integrate, QuadError, QuadEstimate, QuadOptions};
use crate::Error;

/// Unnormalized `(-Δ)^σ f(x) = PV ∫ (f(x) - f(y)) |x - y|^-(1+2σ) dy`,
/// folded to `∫_0^∞ (2f(x) - f(x+δ) - f(x-δ)) δ^-(1+2σ) dδ`.
pub fn fractional_laplacian_1d(
    f: impl Fn(f64) -> f64,
    x: f64,
    sigma: f64,
    tol: f64,
) -> Result<QuadEstimate, Error> {
    fractional_laplacian_1d_with_breakpoints(f, x, sigma, tol, &[])
}

/// As [`fractional_laplacian_1d`], with the points where `f` is not smooth.
pub fn fractional_laplacian_1d_with_breakpoints(
    f: impl Fn(f64) -> f64,
    x: f64,
    sigma: f64,
    tol: f64,
    breakpoints: &[f64],
) -> Result<QuadEstimate, Error> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidConfig {
            key: "sigma".into(),
            message: format!("sigma must lie in (0,1), got {sigma}"),
        });
    }
    if !(tol > 0.0) || !x.is_finite() {
        return Err(Error::InvalidConfig {
            key: "tol".into(),
            message: "tolerance must be positive and x finite".into(),
        });
    }
    let two_sigma = 2.0 * sigma;
    let mut distances: Vec<f64> = breakpoints.iter().map(|b| (x - b).abs()).collect();
    if distances.contains(&0.0) {
        return Err(Error::InvalidConfig {
            key: "x".into(),
            message: format!("x = {x} is a breakpoint of f"),
        });
    }
    distances.sort_by(f64::total_cmp);

    check_growth(&f, x, two_sigma)?;

    let fx = f(x);
    let (curv, curv_err, rho) = second_derivative(&f, x, distances.first().copied().unwrap_or(1.0).min(1.0));

    // Near field: 2f(x) - f(x+δ) - f(x-δ) ≈ -f''(x) δ².
    let delta0 = 1e-3 * rho;
    let near_factor = delta0.powf(2.0 - two_sigma) / (2.0 - two_sigma);
    let mut value = -curv * near_factor;
    let next_term = curv.abs() * delta0.powf(4.0 - two_sigma) / (12.0 * rho * rho * (4.0 - two_sigma));
    let mut error = curv_err * near_factor + next_term;
    let mut evaluations = 0;

    let integrand = |d: f64| (2.0 * fx - f(x + d) - f(x - d)) * d.powf(-1.0 - two_sigma);
    let far_start = 2.0 * (distances.last().copied().unwrap_or(0.0) + rho + 1.0);
    let mut cuts = Vec::new();
    let mut c = delta0;
    while c < rho {
        cuts.push(c);
        c *= 2.0;
    }
    cuts.extend(distances.iter().copied().filter(|&d| d > delta0 && d < far_start));
    cuts.push(rho);
    cuts.push(far_start);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let panel_tol = tol / (4.0 * cuts.len() as f64);
    for w in cuts.windows(2) {
        let piece = integrate(
            integrand,
            w[0],
            w[1],
            QuadOptions {
                abs_tol: panel_tol,
                rel_tol: 0.0,
                max_intervals: 2000,
            },
        )?;
        value += piece.value;
        error += piece.error;
        evaluations += piece.evaluations;
    }

    // Far field: δ = X w^(-1/(2σ)), δ^-(1+2σ) dδ = X^(-2σ)/(2σ) dw.
    let scale = far_start.powf(-two_sigma) / two_sigma;
    let far = integrate(
        |w: f64| {
            let d = (far_start * w.powf(-1.0 / two_sigma)).min(1e300);
            2.0 * fx - f(x + d) - f(x - d)
        },
        0.0,
        1.0,
        QuadOptions {
            abs_tol: tol / (4.0 * scale),
            rel_tol: 0.0,
            max_intervals: 2000,
        },
    )?;
    value += far.value * scale;
    error += far.error * scale;
    evaluations += far.evaluations;

    if error > tol {
        return Err(Error::Quadrature(QuadError::NotConverged {
            estimate: value,
            error,
            intervals: cuts.len(),
        }));
    }
    Ok(QuadEstimate {
        value,
        error,
        evaluations,
    })
}

/// Rejects data growing like `|y|^q` with `q ≥ 2σ`.
fn check_growth(f: &impl Fn(f64) -> f64, x: f64, two_sigma: f64) -> Result<(), Error> {
    let size = |r: f64| f(x + r).abs().max(f(x - r).abs());
    let base = 1.0 + x.abs();
    let (r1, r2) = (1e4 * base, 1e8 * base);
    let (g1, g2) = (size(r1), size(r2));
    if !g1.is_finite() || !g2.is_finite() {
        return Err(Error::DivergentTail(format!("f is not finite far from x = {x}")));
    }
    if g2 > 1.0 && g1 > 0.0 {
        let q = (g2 / g1).ln() / (r2 / r1).ln();
        if q >= two_sigma - 1e-3 {
            return Err(Error::DivergentTail(format!(
                "f grows like |y|^{q:.3}, which is not integrable against |y|^-(1+2σ) with 2σ = {two_sigma}"
            )));
        }
    }
    Ok(())
}

/// Richardson-extrapolated `f''(x)`, its uncertainty, and the radius on
/// which `f` was found smooth. The radius halves until two extrapolants agree.
fn second_derivative(f: &impl Fn(f64) -> f64, x: f64, start: f64) -> (f64, f64, f64) {
    let fx = f(x);
    let estimate = |rho: f64| {
        let mut table = [0.0f64; 4];
        let mut h = rho / 8.0;
        for slot in table.iter_mut() {
            *slot = (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
            h *= 0.5;
        }
        let mut factor = 4.0;
        for level in 1..4 {
            for k in (level..4).rev() {
                table[k] = (factor * table[k] - table[k - 1]) / (factor - 1.0);
            }
            factor *= 4.0;
        }
        (table[3], (table[3] - table[2]).abs())
    };
    let mut rho = start;
    let (mut prev, _) = estimate(rho);
    for _ in 0..30 {
        let (cur, spread) = estimate(0.5 * rho);
        let agree = (cur - prev).abs();
        if agree <= 1e-9 * cur.abs().max(1e-300) || agree < 1e-12 {
            return (cur, agree.max(spread), 0.5 * rho);
        }
        prev = cur;
        rho *= 0.5;
    }
    let (cur, spread) = estimate(rho);
    (cur, spread.max((cur - prev).abs()), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::Bump;

    #[test]
    fn constants_are_annihilated() {
        let r = fractional_laplacian_1d(|_| 3.7, 0.2, 0.75, 1e-10).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn positive_power_is_harmonic_on_the_half_line() {
        for sigma in [0.625, 0.75] {
            for k in 1..=9 {
                let x = 0.1 * k as f64;
                let f = |y: f64| y.max(0.0).powf(sigma);
                let r = fractional_laplacian_1d(f, x, sigma, 1e-6).unwrap();
                assert!(r.value.abs() <= 1e-4, "σ={sigma} x={x}: {}", r.value);
            }
        }
    }

    #[test]
    fn bump_peak_matches_riemann_sum() {
        let b = Bump {
            center: 0.0,
            width: 1.0,
            height: 1.0,
        };
        let sigma = 0.6;
        let got = fractional_laplacian_1d(|y| b.eval(y), 0.0, sigma, 1e-8).unwrap().value;
        // Dense midpoint sum over δ ∈ (0, 1), exact tail beyond the support.
        let n = 2_000_000;
        let h = 1.0 / n as f64;
        let mut sum = 0.0;
        for k in 0..n {
            let d = (k as f64 + 0.5) * h;
            sum += (2.0 - b.eval(d) - b.eval(-d)) * d.powf(-1.0 - 2.0 * sigma) * h;
        }
        sum += 2.0 / (2.0 * sigma);
        assert!(got > 0.0);
        assert!(((got - sum) / sum).abs() < 1e-3, "{got} vs {sum}");
    }

    #[test]
    fn fast_growth_is_rejected() {
        let r = fractional_laplacian_1d(|y: f64| y.abs().powf(1.7), 0.3, 0.75, 1e-8);
        assert!(matches!(r, Err(Error::DivergentTail(_))));
    }
}
