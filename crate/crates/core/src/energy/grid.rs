use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Default grid spacing `h = 1/64`.
pub const DEFAULT_CELLS_PER_UNIT: usize = 64;
/// Default exterior truncation width.
pub const DEFAULT_TRUNCATION: f64 = 4.0;

/// Uniform grid with spacing `h = 1/m` on `[-L, 1 + L]`.
///
/// Both `0` and `1` are nodes. The exterior reaches the same distance `L`
/// beyond each end of the domain, so data symmetric under `x ↦ 1 - x`
/// produce a symmetric discrete problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    cells_per_unit: usize,
    truncation_cells: usize,
}

impl GridSpec {
    pub fn new(cells_per_unit: usize, truncation: f64) -> Result<Self, Error> {
        if cells_per_unit < 9 {
            return Err(Error::InvalidGrid(format!(
                "need at least 8 interior nodes, got h = 1/{cells_per_unit}"
            )));
        }
        if !(truncation > 1.0) || !truncation.is_finite() {
            return Err(Error::InvalidGrid(format!("truncation L must exceed 1, got {truncation}")));
        }
        let cells = truncation * cells_per_unit as f64;
        let rounded = cells.round();
        if (cells - rounded).abs() > 1e-9 * cells {
            return Err(Error::InvalidGrid(format!(
                "L = {truncation} is not a multiple of h = 1/{cells_per_unit}"
            )));
        }
        Ok(Self {
            cells_per_unit,
            truncation_cells: rounded as usize,
        })
    }

    /// Accepts `h` only when it is `1/m` for an integer `m`.
    pub fn from_spacing(h: f64, truncation: f64) -> Result<Self, Error> {
        let m = cells_for_spacing(h)?;
        Self::new(m, truncation)
    }

    pub fn cells_per_unit(&self) -> usize {
        self.cells_per_unit
    }

    pub fn h(&self) -> f64 {
        1.0 / self.cells_per_unit as f64
    }

    pub fn truncation(&self) -> f64 {
        self.truncation_cells as f64 / self.cells_per_unit as f64
    }

    pub fn len(&self) -> usize {
        2 * self.truncation_cells + self.cells_per_unit + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node position; exact for the nodes `0` and `1`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.truncation_cells as f64) / self.cells_per_unit as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Index of the node at `x = 0`.
    pub fn left_wall(&self) -> usize {
        self.truncation_cells
    }

    /// Index of the node at `x = 1`.
    pub fn right_wall(&self) -> usize {
        self.truncation_cells + self.cells_per_unit
    }

    /// Indices of the nodes in the open domain `(0, 1)`.
    pub fn interior(&self) -> RangeInclusive<usize> {
        self.left_wall() + 1..=self.right_wall() - 1
    }

    pub fn interior_len(&self) -> usize {
        self.cells_per_unit - 1
    }

    #[inline]
    pub fn is_interior(&self, i: usize) -> bool {
        i > self.left_wall() && i < self.right_wall()
    }

    /// Trapezoid weight of node `i`: `h`, halved at the two grid ends.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.len() {
            0.5 * self.h()
        } else {
            self.h()
        }
    }

    /// Left and right grid ends.
    pub fn ends(&self) -> (f64, f64) {
        (self.x(0), self.x(self.len() - 1))
    }

    /// The grid with half the spacing and the same truncation.
    pub fn refined(&self) -> Self {
        Self {
            cells_per_unit: 2 * self.cells_per_unit,
            truncation_cells: 2 * self.truncation_cells,
        }
    }
}

#[cfg(test)]
impl GridSpec {
    /// Grid below the usual minimum size, for hand-checkable instances.
    pub(crate) fn coarse(cells_per_unit: usize, truncation: f64) -> Self {
        Self {
            cells_per_unit,
            truncation_cells: (truncation * cells_per_unit as f64).round() as usize,
        }
    }
}

pub fn cells_for_spacing(h: f64) -> Result<usize, Error> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidGrid(format!("h must be positive, got {h}")));
    }
    let inv = 1.0 / h;
    let m = inv.round();
    if m < 1.0 || (inv - m).abs() > 1e-9 * m {
        return Err(Error::InvalidGrid(format!("h = {h} is not of the form 1/m")));
    }
    Ok(m as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walls_are_nodes() {
        let g = GridSpec::new(64, 4.0).unwrap();
        assert_eq!(g.x(g.left_wall()), 0.0);
        assert_eq!(g.x(g.right_wall()), 1.0);
        assert_eq!(g.interior_len(), 63);
        assert_eq!(g.interior().count(), 63);
        assert_eq!(g.ends(), (-4.0, 5.0));
    }

    #[test]
    fn mirror_is_exact() {
        let g = GridSpec::new(32, 4.0).unwrap();
        let n = g.len();
        for i in 0..n {
            assert_eq!(1.0 - g.x(i), g.x(n - 1 - i));
        }
    }

    #[test]
    fn rejects_bad_spacing() {
        assert!(GridSpec::from_spacing(0.03, 4.0).is_err());
        assert!(GridSpec::from_spacing(1.0 / 64.0, 4.0).is_ok());
        assert!(GridSpec::new(8, 4.0).is_err());
        assert!(GridSpec::new(16, 1.0).is_err());
        assert!(GridSpec::new(16, 4.01).is_err());
    }

    #[test]
    fn refinement_halves_spacing() {
        let g = GridSpec::new(16, 4.0).unwrap().refined();
        assert_eq!(g.h(), 1.0 / 32.0);
        assert_eq!(g.truncation(), 4.0);
    }
}
