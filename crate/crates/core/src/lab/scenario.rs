use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ScenarioConfig, ScenarioKind};
use super::report::{fmt_real, profile_csv, real_or_text, Table};
use crate::curvature::{fractional_laplacian_1d, CurvatureSample};
use crate::energy::{GridSpec, Problem};
use crate::solver::{
    barrier_curvature_scan, default_fit_window, detect_stickiness, first_node_slope, fit_boundary_exponent,
    inverse_parametrization, perturbation_sweep, sliding_contact_scan, solve_problem, wall_jump, Boundary,
    ExponentFit, FitReference, SolveReport, StickinessReport, SweepReport,
};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub cells_per_unit: usize,
    pub h: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub energy: f64,
    pub max_abs_u: f64,
    /// Largest curvature residual at nodes at least `5h` from the walls.
    pub max_el_residual: f64,
    pub el_residual_bound: f64,
    pub jump_left: f64,
    pub jump_right: f64,
    pub first_node_slope_left: f64,
    /// Slope of the inverse parametrization at the left jump, when there is one.
    pub v_prime_left: Option<f64>,
    /// Sup-norm distance from the affine datum, for the linear scenario.
    pub line_deviation: Option<f64>,
    pub violations: Vec<String>,
    pub message: Option<String>,
    pub profile: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentSummary {
    pub boundary: Boundary,
    pub fit: Option<ExponentFit>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureRow {
    /// Ramp distance from the corner, or height on the sliding wall.
    pub parameter: f64,
    pub x1: f64,
    pub x2: f64,
    #[serde(serialize_with = "real_or_text")]
    pub value: f64,
    #[serde(serialize_with = "real_or_text")]
    pub estimated_error: f64,
}

impl CurvatureRow {
    fn new(parameter: f64, c: &CurvatureSample) -> Self {
        Self {
            parameter,
            x1: c.point.0,
            x2: c.point.1,
            value: c.value,
            estimated_error: c.estimated_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacianRow {
    pub x: f64,
    pub value: f64,
    pub estimated_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacianTable {
    pub sigma: f64,
    pub rows: Vec<LaplacianRow>,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
}

/// Machine-readable summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub scenario: ScenarioKind,
    pub config: ScenarioConfig,
    pub levels: Vec<LevelSummary>,
    pub stickiness: Option<StickinessReport>,
    pub exponents: Vec<ExponentSummary>,
    pub sweep: Option<SweepReport>,
    pub barrier: Option<Vec<CurvatureRow>>,
    pub sliding_contact: Option<Vec<CurvatureRow>>,
    pub laplacian: Option<LaplacianTable>,
    /// Data files written, relative to the output directory.
    pub files: Vec<String>,
    /// Levels or entries that failed to converge.
    pub convergence_failures: Vec<String>,
    /// Levels that converged but violate a checked invariant.
    pub validation_failures: Vec<String>,
    pub timings: Timings,
}

impl RunReport {
    pub fn succeeded(&self) -> bool {
        self.convergence_failures.is_empty() && self.validation_failures.is_empty()
    }

    /// Summary JSON without the timing block, which is the only part that
    /// differs between identical runs.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timings");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

struct Level {
    grid: GridSpec,
    outcome: Result<SolveReport, Error>,
}

fn summarize(config: &ScenarioConfig, report: &SolveReport, samples: &[f64]) -> LevelSummary {
    let g = &report.solution;
    let grid = g.grid();
    let h = grid.h();
    let interior = g.interior_values();
    let xs: Vec<f64> = grid.interior().map(|i| grid.x(i)).collect();
    let max_el_residual = xs
        .iter()
        .zip(&report.el_residuals)
        .filter(|(x, _)| **x >= 5.0 * h - 1e-12 && **x <= 1.0 - 5.0 * h + 1e-12)
        .map(|(_, r)| r.abs())
        .fold(0.0, f64::max);
    let el_residual_bound = (10.0 * h).max(10.0 * report.tolerance / (h * h));
    let mut violations = Vec::new();
    if report.converged {
        if max_el_residual > el_residual_bound {
            violations.push(format!(
                "curvature residual {max_el_residual:.3e} exceeds {el_residual_bound:.3e}"
            ));
        }
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if interior.iter().any(|u| *u < lo - 1e-9 || *u > hi + 1e-9) {
            violations.push(format!("solution leaves the datum range [{lo}, {hi}]"));
        }
    }
    let line_deviation = (config.scenario == ScenarioKind::Linear).then(|| {
        g.positions()
            .iter()
            .zip(g.values())
            .map(|(x, u)| (u - config.datum.slope * x - config.datum.intercept).abs())
            .fold(0.0, f64::max)
    });
    LevelSummary {
        cells_per_unit: grid.cells_per_unit(),
        h,
        converged: report.converged,
        iterations: report.iterations,
        final_gradient_norm: report.final_gradient_norm,
        energy: report.energy,
        max_abs_u: interior.iter().fold(0.0, |a, u| a.max(u.abs())),
        max_el_residual,
        el_residual_bound,
        jump_left: wall_jump(report, Boundary::Left),
        jump_right: wall_jump(report, Boundary::Right),
        first_node_slope_left: first_node_slope(report, Boundary::Left),
        v_prime_left: inverse_parametrization(report, Boundary::Left).ok().map(|p| p.v_prime),
        line_deviation,
        violations,
        message: report.message.clone(),
        profile: None,
    }
}

fn failed_level(grid: &GridSpec, error: &Error) -> LevelSummary {
    LevelSummary {
        cells_per_unit: grid.cells_per_unit(),
        h: grid.h(),
        converged: false,
        iterations: 0,
        final_gradient_norm: f64::NAN,
        energy: f64::NAN,
        max_abs_u: f64::NAN,
        max_el_residual: f64::NAN,
        el_residual_bound: f64::NAN,
        jump_left: f64::NAN,
        jump_right: f64::NAN,
        first_node_slope_left: f64::NAN,
        v_prime_left: None,
        line_deviation: None,
        violations: Vec::new(),
        message: Some(error.to_string()),
        profile: None,
    }
}

/// Runs a validated scenario and, when an output directory is configured,
/// writes its data files and `report.json` there.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunReport, Error> {
    let start = Instant::now();
    let mut report = RunReport {
        schema_version: config.schema_version,
        scenario: config.scenario,
        config: config.clone(),
        levels: Vec::new(),
        stickiness: None,
        exponents: Vec::new(),
        sweep: None,
        barrier: None,
        sliding_contact: None,
        laplacian: None,
        files: Vec::new(),
        convergence_failures: Vec::new(),
        validation_failures: Vec::new(),
        timings: Timings { total_seconds: 0.0 },
    };
    let mut files: Vec<(String, String)> = Vec::new();
    match config.scenario {
        ScenarioKind::Flat | ScenarioKind::Linear | ScenarioKind::TwoBump | ScenarioKind::Custom => {
            run_levels(config, &mut report, &mut files)?
        }
        ScenarioKind::GenericPerturbation => run_sweep(config, &mut report, &mut files)?,
        ScenarioKind::Barrier => run_barrier(config, &mut report, &mut files)?,
        ScenarioKind::LaplacianBoundary => run_laplacian(config, &mut report, &mut files)?,
    }
    report.files = files.iter().map(|(name, _)| name.clone()).collect();
    report.timings.total_seconds = start.elapsed().as_secs_f64();
    if let Some(dir) = &config.output {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, text) in &files {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        write_summary(&report, &dir.join("report.json"))?;
    }
    Ok(report)
}

pub fn write_summary(report: &RunReport, path: &Path) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn run_levels(config: &ScenarioConfig, report: &mut RunReport, files: &mut Vec<(String, String)>) -> Result<(), Error> {
    let datum = config.exterior_datum();
    let order = config.order();
    let levels: Vec<Level> = config
        .grids()
        .into_par_iter()
        .map(|grid| Level {
            grid,
            outcome: Problem::new(datum.clone(), grid, order.clone()).and_then(|p| solve_problem(p, &config.solver)),
        })
        .collect();
    // Bad data is a configuration problem, not a per-level failure.
    if let Some(Level { outcome: Err(e), .. }) = levels.iter().find(|l| matches!(l.outcome, Err(Error::InvalidDatum(_)))) {
        return Err(Error::InvalidConfig {
            key: "datum".into(),
            message: e.to_string(),
        });
    }

    let mut table = Table::new(&[
        "h",
        "converged",
        "iterations",
        "final_gradient_norm",
        "jump_left",
        "jump_right",
        "first_node_slope_left",
        "max_el_residual",
    ]);
    for level in &levels {
        let m = level.grid.cells_per_unit();
        let mut summary = match &level.outcome {
            Ok(r) => summarize(config, r, r.solution.problem().exterior_samples()),
            Err(e) => failed_level(&level.grid, e),
        };
        if let Ok(r) = &level.outcome {
            let name = format!("profile_h{m}.csv");
            files.push((name.clone(), profile_csv(r)));
            summary.profile = Some(name);
        }
        if !summary.converged {
            report.convergence_failures.push(format!(
                "h = 1/{m}: {}",
                summary.message.clone().unwrap_or_else(|| "did not converge".into())
            ));
        }
        for v in &summary.violations {
            report.validation_failures.push(format!("h = 1/{m}: {v}"));
        }
        table.row(&[
            format!("1/{m}"),
            summary.converged.to_string(),
            summary.iterations.to_string(),
            fmt_real(summary.final_gradient_norm),
            fmt_real(summary.jump_left),
            fmt_real(summary.jump_right),
            fmt_real(summary.first_node_slope_left),
            fmt_real(summary.max_el_residual),
        ]);
        report.levels.push(summary);
    }
    files.push(("levels.csv".into(), table.into_string()));

    let solved: Vec<&SolveReport> = levels
        .iter()
        .filter_map(|l| l.outcome.as_ref().ok().filter(|r| r.converged))
        .collect();
    if solved.len() == levels.len() && solved.len() >= 3 {
        let n = solved.len();
        report.stickiness = Some(detect_stickiness(solved[n - 3], solved[n - 2], solved[n - 1])?);
    }
    if let Some(finest) = solved.last() {
        for boundary in [Boundary::Left, Boundary::Right] {
            let fit = fit_boundary_exponent(finest, boundary, default_fit_window(finest.h()), FitReference::Datum);
            report.exponents.push(ExponentSummary {
                boundary,
                error: fit.as_ref().err().map(|e| e.to_string()),
                fit: fit.ok(),
            });
        }
    }
    Ok(())
}

fn run_sweep(config: &ScenarioConfig, report: &mut RunReport, files: &mut Vec<(String, String)>) -> Result<(), Error> {
    let grid = config.grids()[0];
    let sweep = match perturbation_sweep(
        &config.exterior_datum(),
        config.datum.perturbation,
        &config.datum.t_values,
        grid,
        &config.order(),
        &config.solver,
    ) {
        Ok(s) => s,
        Err(e @ Error::Solver { .. }) => {
            report.convergence_failures.push(e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let mut table = Table::new(&["t", "boundary_limit", "jump_h", "jump_h2", "jump_h4", "verdict"]);
    for e in &sweep.entries {
        let w = &e.stickiness.left;
        table.row(&[
            fmt_real(e.t),
            fmt_real(e.boundary_limit),
            fmt_real(w.jumps[0]),
            fmt_real(w.jumps[1]),
            fmt_real(w.jumps[2]),
            serde_json::to_value(w.verdict).unwrap().as_str().unwrap().to_string(),
        ]);
    }
    files.push(("sweep.csv".into(), table.into_string()));
    report.sweep = Some(sweep);
    Ok(())
}

fn curvature_table(rows: &[CurvatureRow], parameter: &str) -> String {
    let mut table = Table::new(&[parameter, "x1", "x2", "curvature", "estimated_error"]);
    for r in rows {
        table.row(&[
            fmt_real(r.parameter),
            fmt_real(r.x1),
            fmt_real(r.x2),
            fmt_real(r.value),
            fmt_real(r.estimated_error),
        ]);
    }
    table.into_string()
}

fn run_barrier(config: &ScenarioConfig, report: &mut RunReport, files: &mut Vec<(String, String)>) -> Result<(), Error> {
    let b = &config.barrier;
    let order = config.order();
    let samples = barrier_curvature_scan(&order, &b.params, &b.distances, b.tolerance)?;
    let rows: Vec<CurvatureRow> = b.distances.iter().zip(&samples).map(|(t, c)| CurvatureRow::new(*t, c)).collect();
    files.push(("barrier.csv".into(), curvature_table(&rows, "distance")));
    report.barrier = Some(rows);
    if let Some(mu) = b.sliding_mu {
        let samples = sliding_contact_scan(&order, mu, &b.sliding_heights, b.tolerance)?;
        let rows: Vec<CurvatureRow> =
            b.sliding_heights.iter().zip(&samples).map(|(t, c)| CurvatureRow::new(*t, c)).collect();
        files.push(("sliding_contact.csv".into(), curvature_table(&rows, "height")));
        report.sliding_contact = Some(rows);
    }
    Ok(())
}

fn run_laplacian(config: &ScenarioConfig, report: &mut RunReport, files: &mut Vec<(String, String)>) -> Result<(), Error> {
    let sigma = config.order().sigma();
    let f = move |y: f64| if y > 0.0 { y.powf(sigma) } else { 0.0 };
    let rows: Vec<LaplacianRow> = config
        .laplacian
        .points
        .par_iter()
        .map(|&x| {
            fractional_laplacian_1d(f, x, sigma, config.laplacian.tolerance).map(|q| LaplacianRow {
                x,
                value: q.value,
                estimated_error: q.error,
            })
        })
        .collect::<Result<_, _>>()?;
    let max_abs = rows.iter().fold(0.0f64, |a, r| a.max(r.value.abs()));
    let mut table = Table::new(&["x", "value", "estimated_error"]);
    for r in &rows {
        table.row(&[fmt_real(r.x), fmt_real(r.value), fmt_real(r.estimated_error)]);
    }
    files.push(("laplacian.csv".into(), table.into_string()));
    report.laplacian = Some(LaplacianTable { sigma, rows, max_abs });
    Ok(())
}
