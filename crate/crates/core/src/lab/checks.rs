use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::{fractional_laplacian_1d, set_curvature_2d, PlanarSet};
use crate::energy::{discrete_energy, energy_gradient, Bump, DiscreteGraph, ExteriorDatum, GridSpec, Problem};
use crate::solver::{sliding_contact_exact, sliding_contact_scan, solve, SolveOptions, SolveReport};
use crate::{Error, FractionalOrder};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String), Error>) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn solved(datum: ExteriorDatum, m: usize, s: f64) -> Result<SolveReport, Error> {
    let r = solve(datum, GridSpec::new(m, 4.0)?, FractionalOrder::new(s)?, &SolveOptions::default())?;
    if !r.converged {
        return Err(Error::Solver {
            t: None,
            message: r.message.unwrap_or_default(),
        });
    }
    Ok(r)
}

/// Coarse-resolution invariant suite; every check runs in well under a second.
pub fn run_checks() -> Vec<CheckResult> {
    vec![
        check("flat datum gives the zero solution", || {
            let mut worst = 0.0f64;
            for s in [0.1, 0.5] {
                let r = solved(ExteriorDatum::flat(), 16, s)?;
                worst = r.solution.interior_values().iter().fold(worst, |a, u| a.max(u.abs()));
            }
            Ok((worst <= 1e-8, format!("max |u| = {worst:.3e}")))
        }),
        check("affine datum is reproduced", || {
            let mut devs = Vec::new();
            for m in [16, 32] {
                let r = solved(ExteriorDatum::linear(1.0, 0.0), m, 0.5)?;
                let dev = r
                    .solution
                    .positions()
                    .iter()
                    .zip(r.solution.values())
                    .map(|(x, u)| (u - x).abs())
                    .fold(0.0, f64::max);
                devs.push((dev, 1.0 / m as f64));
            }
            let ok = devs.iter().all(|(d, h)| *d <= 5.0 * h) && devs[1].0 < devs[0].0;
            Ok((ok, format!("deviations {:?}", devs.iter().map(|d| d.0).collect::<Vec<_>>())))
        }),
        check("energy gradient matches finite differences", || {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let mut worst = 0.0f64;
            for _ in 0..3 {
                let s = rng.gen_range(0.1..0.9);
                let p = Problem::new(ExteriorDatum::two_bump(0.5, 0.3), GridSpec::new(12, 2.0)?, FractionalOrder::new(s)?)?;
                let values: Vec<f64> = (0..11).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let g = DiscreteGraph::new(p.clone(), &values)?;
                let grad = energy_gradient(&g);
                for i in 0..values.len() {
                    let step = 1e-5;
                    let mut plus = values.clone();
                    let mut minus = values.clone();
                    plus[i] += step;
                    minus[i] -= step;
                    let fd = (discrete_energy(&DiscreteGraph::new(p.clone(), &plus)?)
                        - discrete_energy(&DiscreteGraph::new(p.clone(), &minus)?))
                        / (2.0 * step);
                    worst = worst.max((fd - grad[i]).abs() / grad[i].abs().max(1e-3));
                }
            }
            Ok((worst <= 1e-6, format!("max relative error {worst:.3e}")))
        }),
        check("disk curvature scales like R^-s", || {
            let order = FractionalOrder::new(0.5)?;
            let scaled: Vec<f64> = [0.5, 1.0, 2.0]
                .iter()
                .map(|&r| {
                    set_curvature_2d(&PlanarSet::disk((0.0, 0.0), r), (r, 0.0), &order, 1e-8).map(|c| c.value * r.powf(0.5))
                })
                .collect::<Result<_, _>>()?;
            let mean = scaled.iter().sum::<f64>() / 3.0;
            let spread = scaled.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean.abs();
            Ok((spread <= 1e-3, format!("relative spread {spread:.3e}")))
        }),
        check("maximum and comparison principles", || {
            let mut rng = ChaCha8Rng::seed_from_u64(23);
            let mut failures = 0;
            for _ in 0..4 {
                let bump = |rng: &mut ChaCha8Rng| Bump {
                    center: rng.gen_range(-2.5..-0.6),
                    width: 0.5,
                    height: rng.gen_range(-1.0..1.0),
                };
                let low = ExteriorDatum::with_bumps(rng.gen_range(-0.5..0.5), 0.0, vec![bump(&mut rng)]);
                let lift = Bump {
                    center: -1.0,
                    width: 0.5,
                    height: rng.gen_range(0.1..1.0),
                };
                let high = low.perturbed(lift, 1.0)?;
                let s = rng.gen_range(0.1..0.9);
                let a = solved(low, 16, s)?;
                let b = solved(high, 16, s)?;
                let samples = a.solution.problem().exterior_samples();
                let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let ok = a
                    .solution
                    .interior_values()
                    .iter()
                    .zip(b.solution.interior_values())
                    .all(|(u, w)| *u >= lo - 1e-9 && *u <= hi + 1e-9 && *u <= w + 1e-8);
                failures += usize::from(!ok);
            }
            Ok((failures == 0, format!("{failures} of 4 trials violated")))
        }),
        check("symmetric datum gives a symmetric solution", || {
            let r = solved(ExteriorDatum::two_bump(0.5, 0.25), 16, 0.3)?;
            let v = r.solution.interior_values();
            let asym = (0..v.len()).map(|i| (v[i] - v[v.len() - 1 - i]).abs()).fold(0.0, f64::max);
            Ok((asym <= 1e-9, format!("max asymmetry {asym:.3e}")))
        }),
        check("fractional Laplacian of (x)+^sigma vanishes on (0, 1)", || {
            let mut worst = 0.0f64;
            for s in [0.25, 0.5] {
                let sigma = 0.5 * (1.0 + s);
                for x in [0.2, 0.5, 0.8] {
                    let q = fractional_laplacian_1d(|y| if y > 0.0 { y.powf(sigma) } else { 0.0 }, x, sigma, 1e-7)?;
                    worst = worst.max(q.value.abs());
                }
            }
            Ok((worst <= 1e-4, format!("max |value| = {worst:.3e}")))
        }),
        check("sliding-contact curvature matches its closed form", || {
            let order = FractionalOrder::new(0.5)?;
            let values = sliding_contact_scan(&order, 0.0, &[0.1, 1.0], 1e-8)?;
            let worst = values
                .iter()
                .zip([0.1, 1.0])
                .map(|(c, t)| {
                    let exact = sliding_contact_exact(0.5, t);
                    (c.value - exact).abs() / exact.abs()
                })
                .fold(0.0, f64::max);
            Ok((worst <= 1e-6, format!("max relative error {worst:.3e}")))
        }),
    ]
}
