//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::time::{Duration, Instant};

use nonlocal_graphs::curvature::{graph_curvature, set_curvature_2d, subgraph_of_datum, PlanarSet};
use nonlocal_graphs::energy::{discrete_energy, energy_gradient, Bump, DiscreteGraph, ExteriorDatum, GridSpec, Problem};
use nonlocal_graphs::lab::{config_from_flags, run_scenario, Overrides, RunReport, ScenarioConfig};
use nonlocal_graphs::solver::{
    barrier_curvature_scan, solve, BarrierParams, InitialGuess, SolveOptions, StickinessVerdict,
};
use nonlocal_graphs::FractionalOrder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn scenario(name: &str, s: f64, h: &str, levels: usize, edit: impl FnOnce(&mut ScenarioConfig)) -> RunReport {
    let flags = Overrides {
        s: Some(s),
        h: Some(h.into()),
        levels: Some(levels),
        ..Overrides::default()
    };
    let mut config = config_from_flags(name, &flags).expect("valid scenario");
    edit(&mut config);
    run_scenario(&config).expect("scenario runs")
}

fn within(limit: Duration, start: Instant, mut o: Outcome) -> Outcome {
    let elapsed = start.elapsed();
    o.detail = format!("{} [{:.1}s]", o.detail, elapsed.as_secs_f64());
    if elapsed > limit {
        o.passed = false;
        o.detail.push_str(&format!(" exceeds {:.0}s", limit.as_secs_f64()));
    }
    o
}

fn flat_rigidity() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut converged = true;
    for s in [0.1, 0.5] {
        let r = scenario("flat", s, "1/64", 1, |_| {});
        converged &= r.succeeded();
        worst = worst.max(r.levels[0].max_abs_u);
    }
    within(
        Duration::from_secs(10),
        start,
        outcome(converged && worst <= 1e-8, format!("max |u| = {worst:.2e}")),
    )
}

fn halfplane_criticality() -> Outcome {
    let r = scenario("linear", 0.5, "1/32", 3, |c| {
        c.datum.slope = 1.0;
        c.datum.intercept = 0.0;
        // Start away from the line so every level is actually solved.
        c.solver.initial = InitialGuess::Zero;
    });
    let devs: Vec<(f64, f64)> = r.levels.iter().map(|l| (l.h, l.line_deviation.unwrap())).collect();
    let bounded = devs.iter().all(|(h, d)| *d <= 5.0 * h);
    let decreasing = devs.windows(2).all(|w| w[1].1 < w[0].1);
    outcome(
        r.succeeded() && bounded && decreasing,
        format!("deviations {:?}", devs.iter().map(|d| format!("{:.2e}", d.1)).collect::<Vec<_>>()),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let b = |center, width, height| Bump { center, width, height };
    let fixtures: Vec<(&str, ExteriorDatum)> = vec![
        ("interior bump", ExteriorDatum::with_bumps(0.0, 0.0, vec![b(0.4, 0.45, 0.3)])),
        ("bump across both walls", ExteriorDatum::with_bumps(0.0, 0.0, vec![b(0.5, 0.8, -0.4)])),
        ("tilted bump", ExteriorDatum::with_bumps(0.5, 0.0, vec![b(0.3, 0.6, 0.25)])),
        ("two bumps", ExteriorDatum::with_bumps(0.0, 0.0, vec![b(0.2, 0.5, 0.2), b(0.8, 0.5, -0.3)])),
        ("wide bump", ExteriorDatum::with_bumps(-0.2, 0.1, vec![b(0.5, 1.5, 0.6)])),
    ];
    let points = [0.25, 0.5, 0.75];
    let order = FractionalOrder::new(0.5).unwrap();
    let mut lines = Vec::new();
    let mut passed = true;
    for (name, datum) in fixtures {
        let set = subgraph_of_datum(&datum).expect("subgraph");
        let reference: Vec<f64> = points
            .iter()
            .map(|&x| set_curvature_2d(&set, (x, datum.eval(x)), &order, 1e-6).unwrap().value)
            .collect();
        let err_at = |m: usize| {
            let p = Problem::new(datum.clone(), GridSpec::new(m, 4.0).unwrap(), order.clone()).unwrap();
            let g = DiscreteGraph::from_fn(p, |x| datum.eval(x)).unwrap();
            let wall = g.grid().left_wall();
            points
                .iter()
                .zip(&reference)
                .map(|(x, r)| {
                    let i = wall + (x * m as f64).round() as usize;
                    (graph_curvature(&g, i) - r).abs() / r.abs()
                })
                .fold(0.0, f64::max)
        };
        let (e64, e128) = (err_at(64), err_at(128));
        passed &= e64 <= 1e-2 && e128 < e64;
        lines.push(format!("{name}: {e64:.1e} -> {e128:.1e}"));
    }
    within(Duration::from_secs(120), start, outcome(passed, lines.join("; ")))
}

fn disk_scaling() -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for s in [0.25, 0.5, 0.75] {
        let order = FractionalOrder::new(s).unwrap();
        let scaled: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&r| {
                set_curvature_2d(&PlanarSet::disk((0.0, 0.0), r), (0.0, r), &order, 1e-7).unwrap().value * r.powf(s)
            })
            .collect();
        let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = (max - min) / min.abs();
        passed &= spread <= 1e-3;
        lines.push(format!("s={s}: H(B_1)={:.10}, spread {spread:.1e}", scaled[1]));
    }
    outcome(passed, lines.join("; "))
}

fn gradient_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let s = rng.gen_range(0.05..0.95);
        let bumps = vec![
            Bump {
                center: rng.gen_range(-2.0..-0.6),
                width: 0.5,
                height: rng.gen_range(-1.0..1.0),
            },
            Bump {
                center: rng.gen_range(1.6..3.0),
                width: 0.5,
                height: rng.gen_range(-1.0..1.0),
            },
        ];
        let datum = ExteriorDatum::with_bumps(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), bumps);
        let m = 16;
        let p = Problem::new(datum, GridSpec::new(m, 3.0).unwrap(), FractionalOrder::new(s).unwrap()).unwrap();
        let values: Vec<f64> = (0..m - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = DiscreteGraph::new(p.clone(), &values).unwrap();
        let grad = energy_gradient(&g);
        let energy_at = |i: usize, step: f64| {
            let mut v = values.clone();
            v[i] += step;
            discrete_energy(&DiscreteGraph::new(p.clone(), &v).unwrap())
        };
        for (i, &gi) in grad.iter().enumerate() {
            // Richardson-extrapolated central differences.
            let central = |e: f64| (energy_at(i, e) - energy_at(i, -e)) / (2.0 * e);
            let fd = (4.0 * central(5e-4) - central(1e-3)) / 3.0;
            worst = worst.max((fd - gi).abs() / gi.abs());
        }
    }
    outcome(worst <= 1e-6, format!("worst per-component relative error {worst:.2e} over 20 graphs"))
}

fn two_bump() -> RunReport {
    scenario("two_bump", 0.1, "1/32", 3, |c| c.datum.bump_height = 0.5)
}

fn two_bump_stickiness(r: &RunReport, elapsed: Duration) -> Outcome {
    let st = r.stickiness.as_ref().expect("three converged levels");
    let wall = |w: &nonlocal_graphs::solver::WallReport| {
        format!(
            "jumps {:.4}/{:.4}/{:.4}, ratios {:.3}/{:.3}, {:?}",
            w.jumps[0], w.jumps[1], w.jumps[2], w.refinement_ratios[0], w.refinement_ratios[1], w.verdict
        )
    };
    let mut o = outcome(
        r.succeeded() && st.sticky_left() && st.sticky_right(),
        format!(
            "left: {}; right: {}; needs jump > {:.4}",
            wall(&st.left),
            wall(&st.right),
            10.0 * st.spacings[2]
        ),
    );
    o.detail = format!("{} [{:.1}s]", o.detail, elapsed.as_secs_f64());
    if elapsed > Duration::from_secs(300) {
        o.passed = false;
    }
    o
}

fn genericity() -> Outcome {
    let r = scenario("generic_perturbation", 0.1, "1/32", 3, |c| {
        c.datum.slope = 0.0;
        c.datum.intercept = 0.0;
        c.datum.bumps.clear();
        c.datum.perturbation = Bump {
            center: -1.0,
            width: 0.5,
            height: 1.0,
        };
        c.datum.t_values = vec![0.1, 0.2, 0.4];
    });
    let Some(sweep) = &r.sweep else {
        return outcome(false, format!("sweep failed: {:?}", r.convergence_failures));
    };
    let control = &sweep.entries[0];
    let positive = sweep.entries[1..].iter().all(|e| e.boundary_limit > 0.0);
    let control_ok = control.t == 0.0 && control.stickiness.left.verdict != StickinessVerdict::Sticky;
    let limits: Vec<String> = sweep
        .entries
        .iter()
        .map(|e| format!("t={}: {:.3e} ({:?})", e.t, e.boundary_limit, e.stickiness.left.verdict))
        .collect();
    outcome(
        positive && sweep.monotone && control_ok,
        format!("{}; monotone {}", limits.join(", "), sweep.monotone),
    )
}

fn vertical_tangent(r: &RunReport) -> Outcome {
    let slopes: Vec<f64> = r.levels.iter().map(|l| l.first_node_slope_left).collect();
    let growth: Vec<f64> = slopes.windows(2).map(|w| w[1] / w[0]).collect();
    let v: Vec<Option<f64>> = r.levels.iter().map(|l| l.v_prime_left).collect();
    let v_ok = v.iter().all(Option::is_some) && v.windows(2).all(|w| w[1].unwrap() < w[0].unwrap());
    outcome(
        growth.iter().all(|g| *g >= 1.3) && v_ok,
        format!(
            "quotient growth {:?}, v' {:?}",
            growth.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>(),
            v.iter().map(|x| x.map(|x| format!("{x:.3}"))).collect::<Vec<_>>()
        ),
    )
}

fn laplacian_zero() -> Outcome {
    let mut worst = 0.0f64;
    for s in [0.25, 0.5] {
        let r = scenario("laplacian_boundary", s, "1/64", 1, |c| {
            c.laplacian.points = (1..=9).map(|k| k as f64 / 10.0).collect();
        });
        worst = worst.max(r.laplacian.unwrap().max_abs);
    }
    outcome(worst <= 1e-4, format!("max |value| = {worst:.2e}"))
}

fn barrier_sign() -> Outcome {
    let doc: serde_json::Value =
        serde_json::from_str(include_str!("../fixtures/barrier_search.json")).expect("fixture parses");
    let params: BarrierParams = serde_json::from_value(doc["chosen"]["params"].clone()).unwrap();
    let order = FractionalOrder::new(doc["s"].as_f64().unwrap()).unwrap();
    let distances = [0.0, 0.005, 0.01, 0.02, 0.03, 0.05];
    let samples = barrier_curvature_scan(&order, &params, &distances, 1e-6).unwrap();
    let corner = samples[0].value == f64::NEG_INFINITY;
    let negative = samples[1..].iter().all(|c| c.value < 0.0 && c.value.is_finite());
    outcome(
        corner && negative,
        format!(
            "{params:?}: {:?}",
            samples.iter().map(|c| format!("{:.3}", c.value)).collect::<Vec<_>>()
        ),
    )
}

fn principles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut passed = 0;
    for _ in 0..100 {
        let bump = |rng: &mut ChaCha8Rng, left: bool| {
            let width = rng.gen_range(0.1..0.6);
            let gap = rng.gen_range(0.0..1.0);
            Bump {
                center: if left { -gap - width } else { 1.0 + gap + width },
                width,
                height: rng.gen_range(-1.0..1.0),
            }
        };
        let side = rng.gen_bool(0.5);
        let bumps = vec![bump(&mut rng, true), bump(&mut rng, false), bump(&mut rng, side)];
        let low = ExteriorDatum::with_bumps(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), bumps);
        let lift = Bump {
            center: rng.gen_range(-1.5..-0.5),
            width: 0.4,
            height: rng.gen_range(0.01..1.0),
        };
        let high = low.perturbed(lift, 1.0).unwrap();
        let s = rng.gen_range(0.1..0.9);
        let order = FractionalOrder::new(s).unwrap();
        let grid = GridSpec::new(16, 3.0).unwrap();
        let a = solve(low, grid, order.clone(), &SolveOptions::default()).unwrap();
        let b = solve(high, grid, order, &SolveOptions::default()).unwrap();
        let samples = a.solution.problem().exterior_samples();
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ok = a.converged
            && b.converged
            && a.solution
                .interior_values()
                .iter()
                .zip(b.solution.interior_values())
                .all(|(u, w)| *u >= lo - 1e-9 && *u <= hi + 1e-9 && *u <= w + 1e-8);
        passed += usize::from(ok);
    }
    within(
        Duration::from_secs(120),
        start,
        outcome(passed == 100, format!("{passed}/100 trials")),
    )
}

fn main() {
    let start = Instant::now();
    let bump_run = Instant::now();
    let bump = two_bump();
    let bump_elapsed = bump_run.elapsed();
    let results = [
        ("1 flat rigidity", flat_rigidity()),
        ("2 halfplane criticality", halfplane_criticality()),
        ("3 curvature oracle equivalence", oracle_equivalence()),
        ("4 disk scaling law", disk_scaling()),
        ("5 gradient exactness", gradient_exactness()),
        ("6 two-bump stickiness", two_bump_stickiness(&bump, bump_elapsed)),
        ("7 genericity", genericity()),
        ("8 vertical tangent", vertical_tangent(&bump)),
        ("9 s-harmonic boundary example", laplacian_zero()),
        ("10 barrier sign", barrier_sign()),
        ("11 comparison and maximum principles", principles()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
