use std::sync::Arc;

use super::datum::ExteriorDatum;
use super::grid::GridSpec;
use super::tails::TailRule;
use crate::special::FractionalOrder;
use crate::Error;

/// Lattice kernel factors for a pair at distance `k h`, with the
/// near-neighbour correction folded into `k = 1`.
#[derive(Debug)]
pub(crate) struct PairTable {
    /// `(kh)^-s`
    pub energy: Vec<f64>,
    /// `(kh)^-(1+s)`
    pub gradient: Vec<f64>,
    /// `(kh)^-(2+s)`
    pub hessian: Vec<f64>,
    /// `1 / (kh)`
    pub inv_dist: Vec<f64>,
}

impl PairTable {
    fn new(order: &FractionalOrder, grid: &GridSpec) -> Self {
        let n = grid.len();
        let h = grid.h();
        let s = order.s();
        let mut t = PairTable {
            energy: vec![0.0; n],
            gradient: vec![0.0; n],
            hessian: vec![0.0; n],
            inv_dist: vec![0.0; n],
        };
        for k in 1..n {
            let d = k as f64 * h;
            let nn = if k == 1 { order.near_neighbour_factor() } else { 1.0 };
            t.energy[k] = nn * d.powf(-s);
            t.gradient[k] = nn * d.powf(-1.0 - s);
            t.hessian[k] = nn * d.powf(-2.0 - s);
            t.inv_dist[k] = 1.0 / d;
        }
        t
    }
}

/// Everything about a discrete minimization problem except the unknowns:
/// grid, order, datum, frozen exterior samples and kernel tables.
#[derive(Debug)]
pub struct Problem {
    grid: GridSpec,
    order: FractionalOrder,
    datum: ExteriorDatum,
    frozen: Vec<f64>,
    pub(crate) pairs: PairTable,
    pub(crate) tail: TailRule,
}

impl Problem {
    pub fn new(datum: ExteriorDatum, grid: GridSpec, order: FractionalOrder) -> Result<Arc<Self>, Error> {
        let (left_end, right_end) = grid.ends();
        datum.check_asymptotes(left_end, right_end)?;
        let mut frozen = vec![0.0; grid.len()];
        for (i, slot) in frozen.iter_mut().enumerate() {
            if !grid.is_interior(i) {
                let v = datum.eval(grid.x(i));
                if !v.is_finite() {
                    return Err(Error::InvalidDatum(format!("datum is not finite at x = {}", grid.x(i))));
                }
                *slot = v;
            }
        }
        let pairs = PairTable::new(&order, &grid);
        let tail = TailRule::new(&order);
        Ok(Arc::new(Self {
            grid,
            order,
            datum,
            frozen,
            pairs,
            tail,
        }))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn order(&self) -> &FractionalOrder {
        &self.order
    }

    pub fn datum(&self) -> &ExteriorDatum {
        &self.datum
    }

    /// Datum samples at the exterior nodes; interior entries are zero.
    pub fn exterior_samples(&self) -> &[f64] {
        &self.frozen
    }
}

/// Candidate graph: node values with the exterior frozen to the datum.
#[derive(Debug, Clone)]
pub struct DiscreteGraph {
    problem: Arc<Problem>,
    values: Vec<f64>,
}

impl DiscreteGraph {
    /// Builds the graph from its interior values.
    pub fn new(problem: Arc<Problem>, interior: &[f64]) -> Result<Self, Error> {
        let mut g = Self {
            values: problem.frozen.clone(),
            problem,
        };
        g.set_interior(interior)?;
        Ok(g)
    }

    /// Interior values sampled from `f`.
    pub fn from_fn(problem: Arc<Problem>, f: impl Fn(f64) -> f64) -> Result<Self, Error> {
        let grid = problem.grid;
        let interior: Vec<f64> = grid.interior().map(|i| f(grid.x(i))).collect();
        Self::new(problem, &interior)
    }

    /// Linear interpolation of the datum limits at the two walls.
    pub fn datum_interpolation(problem: Arc<Problem>) -> Self {
        let a = problem.datum.left_limit();
        let b = problem.datum.right_limit();
        Self::from_fn(problem, |x| a + (b - a) * x).expect("datum limits are finite")
    }

    pub fn set_interior(&mut self, interior: &[f64]) -> Result<(), Error> {
        let range = self.problem.grid.interior();
        if interior.len() != self.problem.grid.interior_len() {
            return Err(Error::Mismatch(format!(
                "expected {} interior values, got {}",
                self.problem.grid.interior_len(),
                interior.len()
            )));
        }
        if let Some(bad) = interior.iter().find(|v| !v.is_finite()) {
            return Err(Error::Mismatch(format!("interior value {bad} is not finite")));
        }
        self.values[range].copy_from_slice(interior);
        Ok(())
    }

    pub fn problem(&self) -> &Arc<Problem> {
        &self.problem
    }

    pub fn grid(&self) -> &GridSpec {
        &self.problem.grid
    }

    pub fn order(&self) -> &FractionalOrder {
        &self.problem.order
    }

    pub fn datum(&self) -> &ExteriorDatum {
        &self.problem.datum
    }

    /// All node values, exterior included.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interior_values(&self) -> &[f64] {
        &self.values[self.problem.grid.interior()]
    }

    pub fn positions(&self) -> Vec<f64> {
        self.problem.grid.positions()
    }
}
