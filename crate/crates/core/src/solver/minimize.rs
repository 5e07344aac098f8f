use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curvature::interior_curvature;
use crate::energy::{discrete_energy, energy_gradient, energy_hessian, hessian_diagonal};
use crate::energy::{DiscreteGraph, ExteriorDatum, GridSpec, Problem};
use crate::{Error, FractionalOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PreconditionedGradient,
    DampedNewton,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialGuess {
    DatumInterpolation,
    Zero,
    WarmStart(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSearch {
    /// Sufficient-decrease constant.
    pub armijo: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearch {
    fn default() -> Self {
        Self {
            armijo: 1e-4,
            shrink: 0.5,
            max_backtracks: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Sup-norm of the energy gradient at which the solve stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub method: Method,
    pub line_search: LineSearch,
    pub initial: InitialGuess,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: 200,
            method: Method::DampedNewton,
            line_search: LineSearch::default(),
            initial: InitialGuess::DatumInterpolation,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig {
                key: "tol".into(),
                message: format!("tolerance must be positive, got {}", self.tolerance),
            });
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig {
                key: "max_iterations".into(),
                message: "need at least one iteration".into(),
            });
        }
        let ls = &self.line_search;
        if !(ls.armijo > 0.0 && ls.armijo < 0.5 && ls.shrink > 0.0 && ls.shrink < 1.0) {
            return Err(Error::InvalidConfig {
                key: "line_search".into(),
                message: "need 0 < armijo < 0.5 and 0 < shrink < 1".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: DiscreteGraph,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    /// Graph curvature at every interior node.
    pub el_residuals: Vec<f64>,
    pub converged: bool,
    pub tolerance: f64,
    pub energy: f64,
    /// Why the iteration stopped when it did not converge.
    pub message: Option<String>,
}

impl SolveReport {
    /// Diagnostics of a given graph without minimizing.
    pub fn evaluate(graph: DiscreteGraph, tolerance: f64) -> Self {
        let g = energy_gradient(&graph);
        let norm = sup_norm(&g);
        Self {
            el_residuals: interior_curvature(&graph),
            energy: discrete_energy(&graph),
            converged: norm <= tolerance,
            final_gradient_norm: norm,
            iterations: 0,
            tolerance,
            message: None,
            solution: graph,
        }
    }

    pub fn h(&self) -> f64 {
        self.solution.grid().h()
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Minimizes the discrete functional for the given exterior datum.
pub fn solve(
    datum: ExteriorDatum,
    grid: GridSpec,
    order: FractionalOrder,
    opts: &SolveOptions,
) -> Result<SolveReport, Error> {
    let problem = Problem::new(datum, grid, order)?;
    solve_problem(problem, opts)
}

pub fn solve_problem(problem: Arc<Problem>, opts: &SolveOptions) -> Result<SolveReport, Error> {
    opts.validate()?;
    let n = problem.grid().interior_len();
    let mut graph = match &opts.initial {
        InitialGuess::DatumInterpolation => DiscreteGraph::datum_interpolation(problem.clone()),
        InitialGuess::Zero => DiscreteGraph::new(problem.clone(), &vec![0.0; n])?,
        InitialGuess::WarmStart(v) => DiscreteGraph::new(problem.clone(), v)?,
    };
    let mut energy = discrete_energy(&graph);
    let mut grad = energy_gradient(&graph);
    let mut norm = sup_norm(&grad);
    let mut iterations = 0;
    let mut message = None;
    let mut step_hint = 1.0f64;
    // Previous step and gradient change for the spectral step length.
    let mut secant: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut recent = std::collections::VecDeque::from([energy]);

    while norm > opts.tolerance {
        if iterations >= opts.max_iterations {
            message = Some(format!("iteration limit {} reached", opts.max_iterations));
            break;
        }
        iterations += 1;
        let direction = match opts.method {
            Method::DampedNewton => {
                let hess = energy_hessian(&graph);
                match hess.cholesky() {
                    Some(chol) => {
                        let rhs = nalgebra::DVector::from_iterator(n, grad.iter().map(|g| -g));
                        chol.solve(&rhs).iter().copied().collect::<Vec<f64>>()
                    }
                    None => preconditioned(&graph, &grad),
                }
            }
            Method::PreconditionedGradient => preconditioned(&graph, &grad),
        };
        let slope: f64 = direction.iter().zip(&grad).map(|(d, g)| d * g).sum();
        if !(slope < 0.0) {
            message = Some("search direction is not a descent direction".into());
            break;
        }
        let diag = match opts.method {
            Method::DampedNewton => None,
            Method::PreconditionedGradient => Some(hessian_diagonal(&graph)),
        };
        let mut t = match (&diag, &secant) {
            (None, _) => 1.0,
            (Some(d), Some((ds, dg))) => {
                let num: f64 = ds.iter().zip(d).map(|(x, w)| w * x * x).sum();
                let den: f64 = ds.iter().zip(dg).map(|(x, y)| x * y).sum();
                if den > 0.0 {
                    (num / den).clamp(1e-8, 1e8)
                } else {
                    (2.0 * step_hint).min(1e6)
                }
            }
            (Some(_), None) => 1.0,
        };
        // Nonmonotone reference for the gradient method, plain Armijo for Newton.
        let reference = match opts.method {
            Method::DampedNewton => energy,
            Method::PreconditionedGradient => recent.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
        let current = graph.interior_values().to_vec();
        let mut accepted = None;
        for _ in 0..=opts.line_search.max_backtracks {
            let trial: Vec<f64> = current.iter().zip(&direction).map(|(u, d)| u + t * d).collect();
            let candidate = DiscreteGraph::new(problem.clone(), &trial)?;
            let e = discrete_energy(&candidate);
            if e <= reference + opts.line_search.armijo * t * slope {
                let g = energy_gradient(&candidate);
                accepted = Some((candidate, e, g));
                break;
            }
            // Near the minimum energy differences drown in rounding; fall
            // back to the gradient norm as merit.
            if (energy - e).abs() <= 64.0 * f64::EPSILON * energy.abs().max(1.0) {
                let g = energy_gradient(&candidate);
                if sup_norm(&g) < norm {
                    accepted = Some((candidate, e, g));
                    break;
                }
            }
            t *= opts.line_search.shrink;
        }
        let Some((candidate, e, g)) = accepted else {
            message = Some(format!("line search stagnated at gradient norm {norm:.3e}"));
            break;
        };
        step_hint = t;
        secant = Some((
            candidate.interior_values().iter().zip(&current).map(|(a, b)| a - b).collect(),
            g.iter().zip(&grad).map(|(a, b)| a - b).collect(),
        ));
        recent.push_back(e);
        if recent.len() > 8 {
            recent.pop_front();
        }
        graph = candidate;
        energy = e;
        grad = g;
        norm = sup_norm(&grad);
    }

    Ok(SolveReport {
        el_residuals: interior_curvature(&graph),
        converged: norm <= opts.tolerance,
        final_gradient_norm: norm,
        iterations,
        tolerance: opts.tolerance,
        energy,
        message,
        solution: graph,
    })
}

fn preconditioned(graph: &DiscreteGraph, grad: &[f64]) -> Vec<f64> {
    hessian_diagonal(graph).iter().zip(grad).map(|(d, g)| -g / d).collect()
}
