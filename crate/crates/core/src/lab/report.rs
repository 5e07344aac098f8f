use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::solver::SolveReport;
use crate::Error;

pub const PROFILE_HEADER: &str = "x,u,curvature_residual";
/// Residual column entry for nodes outside `(0, 1)`.
pub const EXTERIOR_MARK: &str = "exterior";

/// 17 significant digits, `.` as the decimal point regardless of locale.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_real(text: &str) -> Result<f64, std::num::ParseFloatError> {
    match text {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        t => t.parse(),
    }
}

/// Serializes non-finite numbers as the strings `inf`, `-inf`, `nan`.
pub(crate) fn real_or_text<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&fmt_real(*x))
    }
}

pub(crate) fn profile_csv(report: &SolveReport) -> String {
    let g = &report.solution;
    let grid = g.grid();
    let first = *grid.interior().start();
    let mut out = String::with_capacity(64 * grid.len());
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for (i, u) in g.values().iter().enumerate() {
        let residual = if grid.is_interior(i) {
            fmt_real(report.el_residuals[i - first])
        } else {
            EXTERIOR_MARK.to_string()
        };
        let _ = writeln!(out, "{},{},{}", fmt_real(grid.x(i)), fmt_real(*u), residual);
    }
    out
}

/// Writes one row per grid node; exterior rows carry [`EXTERIOR_MARK`].
pub fn emit_profile(report: &SolveReport, path: &Path) -> Result<(), Error> {
    fs::write(path, profile_csv(report)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub x: f64,
    pub u: f64,
    /// `None` on exterior rows.
    pub curvature_residual: Option<f64>,
}

pub fn read_profile(path: &Path) -> Result<Vec<ProfileRow>, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_profile(&text)
}

pub fn parse_profile(text: &str) -> Result<Vec<ProfileRow>, Error> {
    let bad = |line: usize, message: String| Error::InvalidConfig {
        key: format!("profile line {line}"),
        message,
    };
    let mut lines = text.lines();
    if lines.next() != Some(PROFILE_HEADER) {
        return Err(bad(1, format!("expected header `{PROFILE_HEADER}`")));
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(bad(k + 2, format!("expected 3 fields, got {}", fields.len())));
            }
            let num = |t: &str| parse_real(t).map_err(|e| bad(k + 2, format!("`{t}`: {e}")));
            Ok(ProfileRow {
                x: num(fields[0])?,
                u: num(fields[1])?,
                curvature_residual: if fields[2] == EXTERIOR_MARK { None } else { Some(num(fields[2])?) },
            })
        })
        .collect()
}

/// Comma-separated table with a header row.
pub(crate) struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{ExteriorDatum, GridSpec};
    use crate::solver::{solve, SolveOptions};
    use crate::FractionalOrder;

    fn solved(datum: ExteriorDatum) -> SolveReport {
        solve(datum, GridSpec::new(16, 2.0).unwrap(), FractionalOrder::new(0.3).unwrap(), &SolveOptions::default())
            .unwrap()
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let r = solved(ExteriorDatum::two_bump(0.5, 0.125));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profile.csv");
        emit_profile(&r, &path).unwrap();
        let rows = read_profile(&path).unwrap();
        assert_eq!(rows.len(), r.solution.grid().len());
        let grid = r.solution.grid();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.x.to_bits(), grid.x(i).to_bits());
            assert_eq!(row.u.to_bits(), r.solution.values()[i].to_bits());
            assert_eq!(row.curvature_residual.is_none(), !grid.is_interior(i));
        }
        let first = *grid.interior().start();
        for (k, res) in r.el_residuals.iter().enumerate() {
            assert_eq!(rows[first + k].curvature_residual.unwrap().to_bits(), res.to_bits());
        }
    }

    #[test]
    fn flat_profile_is_zero_and_jump_is_visible() {
        let flat = parse_profile(&profile_csv(&solved(ExteriorDatum::flat()))).unwrap();
        assert!(flat.iter().all(|r| r.u == 0.0));

        let r = solved(ExteriorDatum::two_bump(0.5, 0.125));
        let rows = parse_profile(&profile_csv(&r)).unwrap();
        let wall = r.solution.grid().left_wall();
        assert!(rows[wall].curvature_residual.is_none());
        assert_eq!(rows[wall].u, 0.0);
        assert!(rows[wall + 1].u > 0.02);
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let r = solved(ExteriorDatum::flat());
        let err = emit_profile(&r, Path::new("/nonexistent-dir/profile.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn rejects_malformed_profiles() {
        assert!(parse_profile("a,b\n").is_err());
        assert!(parse_profile("x,u,curvature_residual\n1,2\n").is_err());
        assert!(parse_profile("x,u,curvature_residual\n1,2,x\n").is_err());
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(parse_real(&fmt_real(f64::NEG_INFINITY)).unwrap(), f64::NEG_INFINITY);
    }
}
