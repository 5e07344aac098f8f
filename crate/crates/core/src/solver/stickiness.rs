use serde::{Deserialize, Serialize};

use super::SolveReport;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Left,
    Right,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Left => "left",
            Boundary::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StickinessVerdict {
    Sticky,
    NotSticky,
    /// The jump persists under refinement but is too small to resolve.
    BelowResolution,
}

/// Jump diagnostics at one wall across three grid levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallReport {
    /// `u(first interior node) - u₀(wall)` at `h`, `h/2`, `h/4`.
    pub jumps: [f64; 3],
    /// `jump(h)/jump(h/2)` and `jump(h/2)/jump(h/4)`.
    pub refinement_ratios: [f64; 2],
    pub verdict: StickinessVerdict,
    /// One-sided difference quotient `|u(x₂) - u(x₁)| / h` next to the wall, per level.
    pub first_node_slopes: [f64; 3],
}

impl WallReport {
    pub fn sticky(&self) -> bool {
        self.verdict == StickinessVerdict::Sticky
    }

    pub fn finest_jump(&self) -> f64 {
        self.jumps[2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickinessReport {
    pub spacings: [f64; 3],
    pub left: WallReport,
    pub right: WallReport,
}

impl StickinessReport {
    pub fn jump_left(&self) -> f64 {
        self.left.finest_jump()
    }

    pub fn jump_right(&self) -> f64 {
        self.right.finest_jump()
    }

    pub fn sticky_left(&self) -> bool {
        self.left.sticky()
    }

    pub fn sticky_right(&self) -> bool {
        self.right.sticky()
    }

    pub fn wall(&self, boundary: Boundary) -> &WallReport {
        match boundary {
            Boundary::Left => &self.left,
            Boundary::Right => &self.right,
        }
    }
}

pub(crate) const FIRST_BAND: (f64, f64) = (0.8, 1.25);
pub(crate) const SECOND_BAND: (f64, f64) = (0.9, 1.15);
const NEGLIGIBLE_JUMP: f64 = 1e-8;
const BOUNDARY_LAYER_RATIO: f64 = 1.75;

/// Jump `u(x₁) - u₀(0)` (or its mirror at `1`) of a solved graph.
pub fn wall_jump(report: &SolveReport, boundary: Boundary) -> f64 {
    let g = &report.solution;
    let grid = g.grid();
    let v = g.values();
    match boundary {
        Boundary::Left => v[grid.left_wall() + 1] - g.datum().left_limit(),
        Boundary::Right => v[grid.right_wall() - 1] - g.datum().right_limit(),
    }
}

/// `|u(x₂) - u(x₁)| / h` at the nodes next to the wall.
pub fn first_node_slope(report: &SolveReport, boundary: Boundary) -> f64 {
    let g = &report.solution;
    let grid = g.grid();
    let v = g.values();
    let (a, b) = match boundary {
        Boundary::Left => (grid.left_wall() + 1, grid.left_wall() + 2),
        Boundary::Right => (grid.right_wall() - 1, grid.right_wall() - 2),
    };
    (v[b] - v[a]).abs() / grid.h()
}

/// Applies the refinement-stability rule to three solves at `h`, `h/2`, `h/4`.
pub fn detect_stickiness(
    coarse: &SolveReport,
    refined: &SolveReport,
    refined2: &SolveReport,
) -> Result<StickinessReport, Error> {
    let levels = [coarse, refined, refined2];
    let s0 = coarse.solution.order().s();
    for r in &levels[1..] {
        if r.solution.order().s() != s0 {
            return Err(Error::Mismatch("reports have different s".into()));
        }
        if r.solution.datum().label() != coarse.solution.datum().label() {
            return Err(Error::Mismatch("reports have different exterior data".into()));
        }
    }
    let spacings = levels.map(|r| r.h());
    for w in spacings.windows(2) {
        if (w[0] / w[1] - 2.0).abs() > 1e-12 {
            return Err(Error::Mismatch(format!(
                "spacings must halve at each level, got {spacings:?}"
            )));
        }
    }
    // Same datum: compare exterior samples at the coarse nodes.
    let base = coarse.solution.values();
    let cg = coarse.solution.grid();
    for r in &levels[1..] {
        let g = r.solution.grid();
        let factor = g.cells_per_unit() / cg.cells_per_unit();
        if g.truncation() != cg.truncation() {
            return Err(Error::Mismatch("reports have different truncation".into()));
        }
        let v = r.solution.values();
        for i in (0..cg.len()).filter(|&i| !cg.is_interior(i)) {
            if v[i * factor] != base[i] {
                return Err(Error::Mismatch("reports have different exterior data".into()));
            }
        }
    }
    let wall = |b: Boundary| {
        let jumps = levels.map(|r| wall_jump(r, b));
        let first_node_slopes = levels.map(|r| first_node_slope(r, b));
        let refinement_ratios = [jumps[0] / jumps[1], jumps[1] / jumps[2]];
        let verdict = classify(jumps, spacings[2]);
        WallReport {
            jumps,
            refinement_ratios,
            verdict,
            first_node_slopes,
        }
    };
    Ok(StickinessReport {
        spacings,
        left: wall(Boundary::Left),
        right: wall(Boundary::Right),
    })
}

fn in_band(x: f64, band: (f64, f64)) -> bool {
    x >= band.0 && x <= band.1
}

/// Jumps at `h`, `h/2`, `h/4`; `finest` is `h/4`.
pub(crate) fn classify(jumps: [f64; 3], finest: f64) -> StickinessVerdict {
    let magnitude = jumps.map(f64::abs);
    if magnitude[2] <= NEGLIGIBLE_JUMP {
        return StickinessVerdict::NotSticky;
    }
    let r1 = jumps[0] / jumps[1];
    let r2 = jumps[1] / jumps[2];
    let stable = in_band(r1, FIRST_BAND) && in_band(r2, SECOND_BAND);
    let large = magnitude[2] > (10.0 * finest).max(1e-4);
    // Decay at least like h^0.8 at both refinements marks a boundary layer.
    let decays = r1 >= BOUNDARY_LAYER_RATIO && r2 >= BOUNDARY_LAYER_RATIO;
    if stable && large {
        StickinessVerdict::Sticky
    } else if decays {
        StickinessVerdict::NotSticky
    } else {
        StickinessVerdict::BelowResolution
    }
}
