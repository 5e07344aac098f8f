use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::energy::{cells_for_spacing, Bump, ExteriorDatum, GridSpec, DEFAULT_CELLS_PER_UNIT, DEFAULT_TRUNCATION};
use crate::solver::{BarrierParams, Cap, InitialGuess, LineSearch, Method, SolveOptions};
use crate::{Error, FractionalOrder};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Flat,
    Linear,
    TwoBump,
    GenericPerturbation,
    Barrier,
    LaplacianBoundary,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::Flat,
        ScenarioKind::Linear,
        ScenarioKind::TwoBump,
        ScenarioKind::GenericPerturbation,
        ScenarioKind::Barrier,
        ScenarioKind::LaplacianBoundary,
        ScenarioKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Flat => "flat",
            ScenarioKind::Linear => "linear",
            ScenarioKind::TwoBump => "two_bump",
            ScenarioKind::GenericPerturbation => "generic_perturbation",
            ScenarioKind::Barrier => "barrier",
            ScenarioKind::LaplacianBoundary => "laplacian_boundary",
            ScenarioKind::Custom => "custom",
        }
    }

    pub fn parse(name: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::InvalidConfig {
                key: "scenario".into(),
                message: format!(
                    "unknown scenario `{name}`, expected one of {}",
                    Self::ALL.map(|k| k.name()).join(", ")
                ),
            })
    }

    /// Scenarios that minimize the functional on a grid hierarchy.
    pub fn solves(self) -> bool {
        !matches!(self, ScenarioKind::Barrier | ScenarioKind::LaplacianBoundary)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `h` in a config: a number or a string `"1/m"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum RawSpacing {
    Number(f64),
    Text(String),
}

/// Parses `"1/m"` or a decimal that equals `1/m`.
pub fn parse_spacing(text: &str) -> Result<usize, Error> {
    let bad = |message: String| Error::InvalidConfig {
        key: "h".into(),
        message,
    };
    let text = text.trim();
    if let Some(den) = text.strip_prefix("1/") {
        let m: usize = den
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{text}` is not of the form 1/m")))?;
        if m == 0 {
            return Err(bad("h = 1/0".into()));
        }
        return Ok(m);
    }
    let h: f64 = text.parse().map_err(|_| bad(format!("`{text}` is not a number or 1/m")))?;
    cells_for_spacing(h).map_err(|e| bad(e.to_string()))
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDatum {
    slope: Option<f64>,
    intercept: Option<f64>,
    bump_height: Option<f64>,
    bump_width: Option<f64>,
    #[serde(default)]
    bumps: Vec<Bump>,
    perturbation: Option<Bump>,
    t_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    tolerance: Option<f64>,
    max_iterations: Option<usize>,
    method: Option<Method>,
    initial: Option<RawInitial>,
    armijo: Option<f64>,
    shrink: Option<f64>,
    max_backtracks: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum RawInitial {
    DatumInterpolation,
    Zero,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBarrier {
    delta: Option<f64>,
    slope: Option<f64>,
    ramp_end: Option<f64>,
    cap: Option<Cap>,
    distances: Option<Vec<f64>>,
    tolerance: Option<f64>,
    sliding_mu: Option<f64>,
    sliding_heights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLaplacian {
    points: Option<Vec<f64>>,
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: Option<u32>,
    scenario: String,
    s: Option<f64>,
    h: Option<RawSpacing>,
    #[serde(rename = "L")]
    truncation: Option<f64>,
    levels: Option<usize>,
    output: Option<PathBuf>,
    #[serde(default)]
    datum: RawDatum,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    barrier: RawBarrier,
    #[serde(default)]
    laplacian: RawLaplacian,
}

/// Exterior datum parameters after defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatumParams {
    pub slope: f64,
    pub intercept: f64,
    pub bump_height: f64,
    pub bump_width: f64,
    pub bumps: Vec<Bump>,
    pub perturbation: Bump,
    pub t_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierScan {
    pub params: BarrierParams,
    pub distances: Vec<f64>,
    pub tolerance: f64,
    pub sliding_mu: Option<f64>,
    pub sliding_heights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacianScan {
    pub points: Vec<f64>,
    pub tolerance: f64,
}

/// A validated run description with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub scenario: ScenarioKind,
    pub s: f64,
    /// `m` with `h = 1/m` on the coarsest level.
    #[serde(rename = "h", serialize_with = "spacing_text")]
    pub cells_per_unit: usize,
    #[serde(rename = "L")]
    pub truncation: f64,
    pub levels: usize,
    pub output: Option<PathBuf>,
    pub datum: DatumParams,
    pub solver: SolveOptions,
    pub barrier: BarrierScan,
    pub laplacian: LaplacianScan,
}

fn spacing_text<S: serde::Serializer>(m: &usize, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("1/{m}"))
}

/// Settings that command-line flags may override.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub s: Option<f64>,
    pub h: Option<String>,
    pub truncation: Option<f64>,
    pub tolerance: Option<f64>,
    pub levels: Option<usize>,
    pub output: Option<PathBuf>,
    pub t_values: Option<Vec<f64>>,
}

fn invalid(key: &str, message: impl Into<String>) -> Error {
    Error::InvalidConfig {
        key: key.into(),
        message: message.into(),
    }
}

pub fn parse_config_str(text: &str, overrides: &Overrides) -> Result<ScenarioConfig, Error> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let message = e.message().to_string();
        let key = message
            .split('`')
            .nth(1)
            .filter(|_| message.starts_with("unknown field"))
            .unwrap_or("document")
            .to_string();
        Error::InvalidConfig { key, message }
    })?;
    resolve(raw, overrides)
}

pub fn parse_config(path: &Path, overrides: &Overrides) -> Result<ScenarioConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, overrides)
}

/// Config for a scenario given only by name and flags.
pub fn config_from_flags(scenario: &str, overrides: &Overrides) -> Result<ScenarioConfig, Error> {
    let raw = RawConfig {
        schema_version: None,
        scenario: scenario.into(),
        s: None,
        h: None,
        truncation: None,
        levels: None,
        output: None,
        datum: RawDatum::default(),
        solver: RawSolver::default(),
        barrier: RawBarrier::default(),
        laplacian: RawLaplacian::default(),
    };
    resolve(raw, overrides)
}

fn resolve(raw: RawConfig, flags: &Overrides) -> Result<ScenarioConfig, Error> {
    let schema_version = raw.schema_version.unwrap_or(SCHEMA_VERSION);
    if schema_version != SCHEMA_VERSION {
        return Err(invalid(
            "schema_version",
            format!("unsupported schema version {schema_version}, expected {SCHEMA_VERSION}"),
        ));
    }
    let scenario = ScenarioKind::parse(&raw.scenario)?;

    let s = flags.s.or(raw.s).unwrap_or(0.5);
    FractionalOrder::new(s).map_err(|e| invalid("s", e.to_string()))?;

    let cells_per_unit = match (&flags.h, raw.h) {
        (Some(text), _) => parse_spacing(text)?,
        (None, Some(RawSpacing::Text(text))) => parse_spacing(&text)?,
        (None, Some(RawSpacing::Number(h))) => cells_for_spacing(h).map_err(|e| invalid("h", e.to_string()))?,
        (None, None) => DEFAULT_CELLS_PER_UNIT,
    };
    let truncation = flags.truncation.or(raw.truncation).unwrap_or(DEFAULT_TRUNCATION);
    GridSpec::new(cells_per_unit, truncation).map_err(|e| {
        let key = if truncation.is_finite() && truncation > 1.0 && cells_per_unit >= 9 { "L" } else { "h" };
        invalid(key, e.to_string())
    })?;
    let levels = flags.levels.or(raw.levels).unwrap_or(DEFAULT_LEVELS);
    if !(1..=6).contains(&levels) {
        return Err(invalid("levels", format!("need 1 to 6 refinement levels, got {levels}")));
    }
    if scenario == ScenarioKind::GenericPerturbation && levels != 3 {
        return Err(invalid("levels", "a perturbation sweep uses exactly 3 levels"));
    }

    let d = raw.datum;
    let datum = DatumParams {
        slope: d.slope.unwrap_or(if scenario == ScenarioKind::Linear { 1.0 } else { 0.0 }),
        intercept: d.intercept.unwrap_or(0.0),
        bump_height: d.bump_height.unwrap_or(0.5),
        bump_width: d.bump_width.unwrap_or(0.125),
        bumps: d.bumps,
        perturbation: d.perturbation.unwrap_or(Bump {
            center: -1.0,
            width: 0.5,
            height: 1.0,
        }),
        t_values: flags.t_values.clone().or(d.t_values).unwrap_or_else(|| vec![0.1, 0.2, 0.4]),
    };
    for (key, v) in [("datum.slope", datum.slope), ("datum.intercept", datum.intercept)] {
        if !v.is_finite() {
            return Err(invalid(key, "must be finite"));
        }
    }
    if !(datum.bump_height.is_finite()) {
        return Err(invalid("datum.bump_height", "must be finite"));
    }
    if !(datum.bump_width > 0.0 && datum.bump_width.is_finite()) {
        return Err(invalid("datum.bump_width", "must be positive"));
    }
    for b in &datum.bumps {
        let (lo, hi) = b.support();
        if !(b.width > 0.0 && b.height.is_finite() && lo.is_finite() && hi.is_finite()) {
            return Err(invalid("datum.bumps", format!("invalid bump {b:?}")));
        }
        if lo < 1.0 && hi > 0.0 {
            return Err(invalid("datum.bumps", format!("bump support [{lo}, {hi}] meets the domain (0, 1)")));
        }
        if lo < -truncation || hi > 1.0 + truncation {
            return Err(invalid("datum.bumps", format!("bump support [{lo}, {hi}] leaves the grid")));
        }
    }
    if scenario == ScenarioKind::GenericPerturbation {
        crate::energy::validate_perturbation(&datum.perturbation)
            .map_err(|e| invalid("datum.perturbation", e.to_string()))?;
        if datum.t_values.is_empty()
            || datum.t_values.iter().any(|t| !(*t > 0.0 && t.is_finite()))
            || datum.t_values.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(invalid("datum.t_values", "need positive, strictly ascending perturbation sizes"));
        }
    }

    let r = raw.solver;
    let defaults = SolveOptions::default();
    let solver = SolveOptions {
        tolerance: flags.tolerance.or(r.tolerance).unwrap_or(defaults.tolerance),
        max_iterations: r.max_iterations.unwrap_or(defaults.max_iterations),
        method: r.method.unwrap_or(defaults.method),
        line_search: LineSearch {
            armijo: r.armijo.unwrap_or(defaults.line_search.armijo),
            shrink: r.shrink.unwrap_or(defaults.line_search.shrink),
            max_backtracks: r.max_backtracks.unwrap_or(defaults.line_search.max_backtracks),
        },
        initial: match r.initial {
            Some(RawInitial::Zero) => InitialGuess::Zero,
            Some(RawInitial::DatumInterpolation) | None => InitialGuess::DatumInterpolation,
        },
    };
    solver.validate()?;

    let b = raw.barrier;
    let bd = BarrierParams::default();
    let barrier = BarrierScan {
        params: BarrierParams {
            delta: b.delta.unwrap_or(bd.delta),
            slope: b.slope.unwrap_or(bd.slope),
            ramp_end: b.ramp_end.unwrap_or(bd.ramp_end),
            cap: b.cap.unwrap_or(bd.cap),
        },
        distances: b.distances.unwrap_or_else(|| vec![0.0, 0.01, 0.02, 0.05]),
        tolerance: b.tolerance.unwrap_or(1e-6),
        sliding_mu: b.sliding_mu,
        sliding_heights: b.sliding_heights.unwrap_or_else(|| vec![0.05, 0.2, 1.0]),
    };
    barrier.params.validate().map_err(|e| match e {
        Error::InvalidConfig { key, message } => invalid(&format!("barrier.{key}"), message),
        other => other,
    })?;
    if barrier.distances.iter().any(|t| !(*t >= 0.0 && *t < barrier.params.ramp_length())) {
        return Err(invalid("barrier.distances", "sample distances must lie on the ramp"));
    }
    if !(barrier.tolerance > 0.0) {
        return Err(invalid("barrier.tolerance", "must be positive"));
    }
    if barrier.sliding_heights.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(invalid("barrier.sliding_heights", "heights must be positive"));
    }

    let l = raw.laplacian;
    let laplacian = LaplacianScan {
        points: l.points.unwrap_or_else(|| (1..=9).map(|k| k as f64 / 10.0).collect()),
        tolerance: l.tolerance.unwrap_or(1e-7),
    };
    if laplacian.points.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(invalid("laplacian.points", "evaluation points must be positive"));
    }
    if !(laplacian.tolerance > 0.0) {
        return Err(invalid("laplacian.tolerance", "must be positive"));
    }

    Ok(ScenarioConfig {
        schema_version,
        scenario,
        s,
        cells_per_unit,
        truncation,
        levels,
        output: flags.output.clone().or(raw.output),
        datum,
        solver,
        barrier,
        laplacian,
    })
}

impl ScenarioConfig {
    pub fn order(&self) -> FractionalOrder {
        FractionalOrder::new(self.s).expect("validated")
    }

    /// Grids from coarsest to finest.
    pub fn grids(&self) -> Vec<GridSpec> {
        let mut g = GridSpec::new(self.cells_per_unit, self.truncation).expect("validated");
        let mut out = Vec::with_capacity(self.levels);
        for _ in 0..self.levels {
            out.push(g);
            g = g.refined();
        }
        out
    }

    /// Exterior datum of the solve-based scenarios (the base datum for a sweep).
    pub fn exterior_datum(&self) -> ExteriorDatum {
        let d = &self.datum;
        match self.scenario {
            ScenarioKind::Flat => ExteriorDatum::flat(),
            ScenarioKind::Linear => ExteriorDatum::linear(d.slope, d.intercept),
            ScenarioKind::TwoBump => ExteriorDatum::two_bump(d.bump_height, d.bump_width),
            ScenarioKind::GenericPerturbation | ScenarioKind::Custom => {
                ExteriorDatum::with_bumps(d.slope, d.intercept, d.bumps.clone()).labelled(self.scenario.name())
            }
            ScenarioKind::Barrier | ScenarioKind::LaplacianBoundary => ExteriorDatum::flat(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ScenarioConfig, Error> {
        parse_config_str(text, &Overrides::default())
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse("scenario = \"flat\"\ns = 0.5\n").unwrap();
        assert_eq!(c.cells_per_unit, 64);
        assert_eq!(c.truncation, 4.0);
        assert_eq!(c.levels, 3);
        assert_eq!(c.schema_version, SCHEMA_VERSION);
        assert_eq!(c.solver.tolerance, 1e-9);
        let echoed = serde_json::to_value(&c).unwrap();
        assert_eq!(echoed["h"], "1/64");
        assert_eq!(echoed["L"], 4.0);
    }

    #[test]
    fn two_bump_geometry() {
        let c = parse("scenario = \"two_bump\"\ns = 0.1\n[datum]\nbump_height = 0.5\n").unwrap();
        let d = c.exterior_datum();
        assert_eq!(d.left_limit(), 0.0);
        assert_eq!(d.right_limit(), 0.0);
        assert_eq!(d.eval(-0.125), 0.5);
        assert_eq!(d.eval(1.125), 0.5);
        assert_eq!(d.eval(0.5), 0.0);
    }

    #[test]
    fn order_out_of_range() {
        match parse("scenario = \"flat\"\ns = 1.5\n") {
            Err(Error::InvalidConfig { key, message }) => {
                assert_eq!(key, "s");
                assert!(message.contains("s out of (0,1)"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spacing_forms() {
        assert_eq!(parse("scenario = \"flat\"\nh = \"1/32\"\n").unwrap().cells_per_unit, 32);
        assert_eq!(parse("scenario = \"flat\"\nh = 0.03125\n").unwrap().cells_per_unit, 32);
        for bad in ["h = 0.03", "h = \"1/x\"", "h = \"0.2\""] {
            match parse(&format!("scenario = \"flat\"\n{bad}\n")) {
                Err(Error::InvalidConfig { key, .. }) => assert_eq!(key, "h", "{bad}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn unknown_keys_and_scenarios() {
        match parse("scenario = \"flat\"\nbogus = 1\n") {
            Err(Error::InvalidConfig { key, .. }) => assert_eq!(key, "bogus"),
            other => panic!("{other:?}"),
        }
        assert!(parse("scenario = \"flat\"\n[datum]\nheight = 1\n").is_err());
        match parse("scenario = \"spiral\"\n") {
            Err(Error::InvalidConfig { key, message }) => {
                assert_eq!(key, "scenario");
                assert!(message.contains("spiral"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse("schema_version = 7\nscenario = \"flat\"\n").is_err());
    }

    #[test]
    fn flags_override_the_document() {
        let flags = Overrides {
            s: Some(0.3),
            h: Some("1/16".into()),
            levels: Some(2),
            ..Overrides::default()
        };
        let c = parse_config_str("scenario = \"flat\"\ns = 0.5\nh = \"1/64\"\n", &flags).unwrap();
        assert_eq!((c.s, c.cells_per_unit, c.levels), (0.3, 16, 2));
        assert_eq!(c.grids().iter().map(|g| g.cells_per_unit()).collect::<Vec<_>>(), vec![16, 32]);
    }

    #[test]
    fn bumps_must_stay_outside_the_domain() {
        let text = "scenario = \"custom\"\n[[datum.bumps]]\ncenter = 0.5\nwidth = 0.2\nheight = 1.0\n";
        match parse(text) {
            Err(Error::InvalidConfig { key, .. }) => assert_eq!(key, "datum.bumps"),
            other => panic!("{other:?}"),
        }
    }
}
