//! Scenario configuration, orchestration and report emission.

mod checks;
mod config;
mod report;
mod scenario;

pub use checks::{run_checks, CheckResult};
pub use config::{
    config_from_flags, parse_config, parse_config_str, parse_spacing, BarrierScan, DatumParams, LaplacianScan,
    Overrides, ScenarioConfig, ScenarioKind, DEFAULT_LEVELS, SCHEMA_VERSION,
};
pub use report::{
    emit_profile, fmt_real, parse_profile, parse_real, read_profile, ProfileRow, EXTERIOR_MARK, PROFILE_HEADER,
};
pub use scenario::{
    run_scenario, write_summary, CurvatureRow, ExponentSummary, LaplacianRow, LaplacianTable, LevelSummary,
    RunReport, Timings,
};
