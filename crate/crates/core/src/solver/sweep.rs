use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{detect_stickiness, solve_problem, InitialGuess, SolveOptions, SolveReport, StickinessReport};
use crate::energy::{validate_perturbation, Bump, ExteriorDatum, GridSpec, Problem};
use crate::{Error, FractionalOrder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub t: f64,
    /// `u^{(t)}` at the first interior node of the finest grid.
    pub boundary_limit: f64,
    pub stickiness: StickinessReport,
    pub iterations: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    /// Boundary limits nondecreasing in `t` up to `1e-8`.
    pub monotone: bool,
}

pub const MONOTONICITY_SLACK: f64 = 1e-8;

/// Solves `u₀ + t·φ` at `h`, `h/2`, `h/4` for `t = 0` and each given `t`,
/// warm-starting each level from the previous `t`.
pub fn perturbation_sweep(
    base: &ExteriorDatum,
    bump: Bump,
    t_values: &[f64],
    grid: GridSpec,
    order: &FractionalOrder,
    opts: &SolveOptions,
) -> Result<SweepReport, Error> {
    validate_perturbation(&bump)?;
    if t_values.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidConfig {
            key: "t_values".into(),
            message: "perturbation sizes must be positive".into(),
        });
    }
    if t_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig {
            key: "t_values".into(),
            message: "perturbation sizes must be strictly ascending".into(),
        });
    }
    let ts: Vec<f64> = std::iter::once(0.0).chain(t_values.iter().copied()).collect();
    let data: Vec<ExteriorDatum> = ts
        .iter()
        .map(|&t| base.perturbed(bump, t))
        .collect::<Result<_, _>>()?;
    let grids = [grid, grid.refined(), grid.refined().refined()];

    let chains: Vec<Vec<SolveReport>> = grids
        .par_iter()
        .map(|&g| -> Result<Vec<SolveReport>, Error> {
            let mut out: Vec<SolveReport> = Vec::with_capacity(ts.len());
            for (&t, datum) in ts.iter().zip(&data) {
                let annotate = |e: Error| Error::Solver {
                    t: Some(t),
                    message: e.to_string(),
                };
                let problem = Problem::new(datum.clone(), g, order.clone()).map_err(annotate)?;
                let mut o = opts.clone();
                if let Some(prev) = out.last() {
                    o.initial = InitialGuess::WarmStart(prev.solution.interior_values().to_vec());
                }
                let report = solve_problem(problem, &o).map_err(annotate)?;
                if !report.converged {
                    return Err(Error::Solver {
                        t: Some(t),
                        message: report.message.clone().unwrap_or_else(|| "did not converge".into()),
                    });
                }
                out.push(report);
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;

    let mut entries = Vec::with_capacity(ts.len());
    for (k, &t) in ts.iter().enumerate() {
        let stickiness = detect_stickiness(&chains[0][k], &chains[1][k], &chains[2][k])?;
        let finest = &chains[2][k].solution;
        entries.push(SweepEntry {
            t,
            boundary_limit: finest.values()[finest.grid().left_wall() + 1],
            stickiness,
            iterations: [chains[0][k].iterations, chains[1][k].iterations, chains[2][k].iterations],
        });
    }
    let monotone = entries
        .windows(2)
        .all(|w| w[1].boundary_limit >= w[0].boundary_limit - MONOTONICITY_SLACK);
    Ok(SweepReport { entries, monotone })
}
