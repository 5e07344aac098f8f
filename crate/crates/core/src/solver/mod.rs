//! Minimization of the discrete functional and boundary diagnostics.

mod barrier;
mod diagnostics;
mod minimize;
mod stickiness;
mod sweep;

pub use barrier::{
    barrier_curvature_scan, sliding_contact_exact, sliding_contact_scan, sliding_contact_set, BarrierParams, Cap,
};
pub use diagnostics::{
    blow_up_rescale, default_fit_window, fit_boundary_exponent, free_power_fit, inverse_parametrization, power_fit,
    ExponentFit, FitReference, InverseParametrization, RescaledProfile, DEFAULT_RESIDUAL_CAP,
};
pub use minimize::{solve, solve_problem, InitialGuess, LineSearch, Method, SolveOptions, SolveReport};
pub use stickiness::{
    detect_stickiness, first_node_slope, wall_jump, Boundary, StickinessReport, StickinessVerdict, WallReport,
};
pub use sweep::{perturbation_sweep, SweepEntry, SweepReport, MONOTONICITY_SLACK};
