//! `nlmg`: command-line front end of the nonlocal minimal graph laboratory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonlocal_graphs::curvature::{set_curvature_2d, PlanarSet};
use nonlocal_graphs::lab::{self, Overrides, RunReport, ScenarioConfig};
use nonlocal_graphs::solver::{barrier_curvature_scan, sliding_contact_scan};
use nonlocal_graphs::{Error, FractionalOrder};

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONVERGENCE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "nlmg", version, about = "Nonlocal minimal graphs over an interval")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Fractional order s in (0, 1).
    #[arg(long)]
    s: Option<f64>,
    /// Coarsest grid spacing, `1/m` or a decimal equal to one.
    #[arg(long)]
    h: Option<String>,
    /// Exterior truncation width.
    #[arg(long = "L")]
    truncation: Option<f64>,
    /// Solver tolerance on the gradient sup-norm.
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory for data files and report.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scenario document (TOML); flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of refinement levels.
    #[arg(long)]
    levels: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            s: self.s,
            h: self.h.clone(),
            truncation: self.truncation,
            tolerance: self.tol,
            levels: self.levels,
            output: self.out.clone(),
            t_values: None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DatumKind {
    Flat,
    Linear,
    TwoBump,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Disk,
    Barrier,
    SlidingContact,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize for one exterior datum on a single grid (or `--levels` grids).
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "flat")]
        datum: DatumKind,
    },
    /// Run a registered scenario by name or from `--config`.
    Scenario {
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Perturbation sweep `u₀ + t·φ` over the given sizes.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated perturbation sizes.
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Nonlocal curvature of a planar set at boundary points.
    Curvature {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        /// Disk radius.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Wall position of the sliding-contact set.
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Angles on the disk, distances along the barrier ramp, or heights on the wall.
        #[arg(long, value_delimiter = ',', default_value = "0.05")]
        at: Vec<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Run the coarse invariant suite.
    Check,
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::Solver { .. } | Error::Quadrature(_) => EXIT_CONVERGENCE,
        _ => EXIT_VALIDATION,
    }
}

fn load(name: Option<&str>, common: &Common) -> Result<ScenarioConfig, Error> {
    let flags = common.overrides();
    match (&common.config, name) {
        (Some(path), None) => lab::parse_config(path, &flags),
        (Some(_), Some(_)) => Err(Error::InvalidConfig {
            key: "scenario".into(),
            message: "give either a scenario name or --config, not both".into(),
        }),
        (None, Some(name)) => lab::config_from_flags(name, &flags),
        (None, None) => Err(Error::InvalidConfig {
            key: "scenario".into(),
            message: "missing scenario name or --config".into(),
        }),
    }
}

fn finish(report: &RunReport) -> u8 {
    println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    for f in &report.validation_failures {
        eprintln!("validation failure: {f}");
    }
    for f in &report.convergence_failures {
        eprintln!("convergence failure: {f}");
    }
    if !report.validation_failures.is_empty() {
        EXIT_VALIDATION
    } else if !report.convergence_failures.is_empty() {
        EXIT_CONVERGENCE
    } else {
        0
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Solve { common, datum } => {
            let name = match datum {
                DatumKind::Flat => "flat",
                DatumKind::Linear => "linear",
                DatumKind::TwoBump => "two_bump",
            };
            let mut common = common;
            common.levels = common.levels.or(Some(1));
            let config = match &common.config {
                Some(_) => load(None, &common)?,
                None => load(Some(name), &common)?,
            };
            Ok(finish(&lab::run_scenario(&config)?))
        }
        Command::Scenario { name, common } => {
            let config = load(name.as_deref(), &common)?;
            Ok(finish(&lab::run_scenario(&config)?))
        }
        Command::Sweep { common, t } => {
            let mut flags = common.overrides();
            if !t.is_empty() {
                flags.t_values = Some(t);
            }
            let config = match &common.config {
                Some(path) => lab::parse_config(path, &flags)?,
                None => lab::config_from_flags("generic_perturbation", &flags)?,
            };
            if config.scenario != lab::ScenarioKind::GenericPerturbation {
                return Err(Error::InvalidConfig {
                    key: "scenario".into(),
                    message: "sweep needs the generic_perturbation scenario".into(),
                });
            }
            Ok(finish(&lab::run_scenario(&config)?))
        }
        Command::Curvature {
            shape,
            s,
            radius,
            mu,
            at,
            tol,
        } => {
            let order = FractionalOrder::new(s)?;
            let samples = match shape {
                Shape::Disk => {
                    let disk = PlanarSet::disk((0.0, 0.0), radius);
                    at.iter()
                        .map(|&a| set_curvature_2d(&disk, (radius * a.cos(), radius * a.sin()), &order, tol))
                        .collect::<Result<Vec<_>, _>>()?
                }
                Shape::Barrier => barrier_curvature_scan(&order, &Default::default(), &at, tol)?,
                Shape::SlidingContact => sliding_contact_scan(&order, mu, &at, tol)?,
            };
            let rows: Vec<serde_json::Value> = samples
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "point": [c.point.0, c.point.1],
                        "value": lab::fmt_real(c.value),
                        "estimated_error": lab::fmt_real(c.estimated_error),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).expect("serializes"));
            Ok(0)
        }
        Command::Check => {
            let results = lab::run_checks();
            let mut failed = 0;
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                failed += usize::from(!r.passed);
            }
            Ok(if failed == 0 { 0 } else { EXIT_VALIDATION })
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("NLMG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
