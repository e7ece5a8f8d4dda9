//! Boundable linear minimization oracle over an implicit integer-feasible
//! set, with three region kinds: closed-form integer box, budget knapsack,
//! and a generic MILP-backed region.

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::lp::{dot, LinearProgram, LpSolver, LpStatus, Row};
use crate::milp::{IndicatorRow, MilpModel, MilpSolver, MilpStatus, INT_TOL};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKind {
    IntegerBox,
    Budget { cost: Vec<f64>, budget: f64 },
    GenericMilp { model: MilpModel },
}

#[derive(Debug, Clone)]
pub struct Region {
    pub kind: RegionKind,
    pub integer_indices: Vec<usize>,
    pub dimension: usize,
}

/// Local variable bounds mutated by branch-and-bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundState {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        BoundState { lower, upper }
    }

    pub fn is_empty(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(l, u)| l > u)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
    }

    /// Componentwise intersection; used when global tightening lands on an
    /// open node.
    pub fn intersect(&mut self, other: &BoundState) {
        for (l, ol) in self.lower.iter_mut().zip(&other.lower) {
            *l = l.max(*ol);
        }
        for (u, ou) in self.upper.iter_mut().zip(&other.upper) {
            *u = u.min(*ou);
        }
    }
}

impl Region {
    /// The region as a MILP model (bounds come from the caller's BoundState).
    pub fn as_milp_model(&self) -> MilpModel {
        match &self.kind {
            RegionKind::IntegerBox => MilpModel {
                base: LinearProgram {
                    objective: vec![0.0; self.dimension],
                    rows: vec![],
                    lower: vec![f64::NEG_INFINITY; self.dimension],
                    upper: vec![f64::INFINITY; self.dimension],
                },
                integer_indices: self.integer_indices.clone(),
                indicator_rows: vec![],
            },
            RegionKind::Budget { cost, budget } => MilpModel {
                base: LinearProgram {
                    objective: vec![0.0; self.dimension],
                    rows: vec![Row::le(cost.clone(), *budget)],
                    lower: vec![f64::NEG_INFINITY; self.dimension],
                    upper: vec![f64::INFINITY; self.dimension],
                },
                integer_indices: self.integer_indices.clone(),
                indicator_rows: vec![],
            },
            RegionKind::GenericMilp { model } => model.clone(),
        }
    }

    pub fn rows(&self) -> Vec<Row> {
        match &self.kind {
            RegionKind::IntegerBox => vec![],
            RegionKind::Budget { cost, budget } => vec![Row::le(cost.clone(), *budget)],
            RegionKind::GenericMilp { model } => model.base.rows.clone(),
        }
    }

    pub fn indicator_rows(&self) -> &[IndicatorRow] {
        match &self.kind {
            RegionKind::GenericMilp { model } => &model.indicator_rows,
            _ => &[],
        }
    }
}

/// Minimize `<direction, v>` over the integer hull intersected with bounds.
/// Returns `None` when the region is empty under the bounds. A cutoff makes
/// the oracle report `None` unless a vertex strictly beats it.
pub fn lmo(
    region: &Region,
    bounds: &BoundState,
    direction: &[f64],
    milp: &mut MilpSolver,
    cutoff: Option<f64>,
) -> Result<Option<Vec<f64>>, SolverError> {
    if bounds.lower.len() != region.dimension || direction.len() != region.dimension {
        return Err(SolverError::Argument("dimension mismatch in lmo".into()));
    }
    if bounds.is_empty() {
        return Ok(None);
    }
    match &region.kind {
        RegionKind::IntegerBox => {
            let mut v = Vec::with_capacity(region.dimension);
            for j in 0..region.dimension {
                // ties (d_j == 0) go to the lower bound
                v.push(if direction[j] < 0.0 { bounds.upper[j] } else { bounds.lower[j] });
            }
            if let Some(c) = cutoff {
                if dot(direction, &v) >= c {
                    return Ok(None);
                }
            }
            Ok(Some(v))
        }
        _ => {
            let model = region.as_milp_model();
            let sol = milp.solve(&model, direction, &bounds.lower, &bounds.upper, cutoff)?;
            match sol.status {
                MilpStatus::Optimal => Ok(Some(snap_integers(sol.point, &region.integer_indices))),
                MilpStatus::Infeasible => Ok(None),
            }
        }
    }
}

/// Same minimization over the continuous relaxation (indicator rows are only
/// enforced where their binary variable is already fixed to one).
pub fn relaxed_lmo(
    region: &Region,
    bounds: &BoundState,
    direction: &[f64],
    lp: &mut LpSolver,
) -> Result<Option<Vec<f64>>, SolverError> {
    if bounds.is_empty() {
        return Ok(None);
    }
    match &region.kind {
        RegionKind::IntegerBox => {
            let mut v = Vec::with_capacity(region.dimension);
            for j in 0..region.dimension {
                v.push(if direction[j] < 0.0 { bounds.upper[j] } else { bounds.lower[j] });
            }
            Ok(Some(v))
        }
        _ => {
            let model = region.as_milp_model();
            let mut prog = model.base.clone();
            prog.objective = direction.to_vec();
            for ind in &model.indicator_rows {
                if bounds.lower[ind.z] >= 1.0 - INT_TOL {
                    prog.rows.push(ind.row.clone());
                }
            }
            let lower: Vec<f64> =
                (0..region.dimension).map(|j| bounds.lower[j].max(model.base.lower[j])).collect();
            let upper: Vec<f64> =
                (0..region.dimension).map(|j| bounds.upper[j].min(model.base.upper[j])).collect();
            let sol = lp.resolve_with_bounds(&prog, &lower, &upper)?;
            match sol.status {
                LpStatus::Optimal => Ok(Some(sol.point)),
                LpStatus::Infeasible => Ok(None),
                LpStatus::Unbounded => {
                    Err(SolverError::Numerical("unbounded relaxed LMO".into()))
                }
            }
        }
    }
}

fn snap_integers(mut v: Vec<f64>, integer_indices: &[usize]) -> Vec<f64> {
    for &j in integer_indices {
        v[j] = v[j].round();
    }
    v
}

/// True iff `x` is integral on J and satisfies bounds, rows, and indicator
/// implications within `INT_TOL`.
pub fn is_integer_feasible(region: &Region, bounds: &BoundState, x: &[f64]) -> bool {
    for &j in &region.integer_indices {
        if (x[j] - x[j].round()).abs() > INT_TOL {
            return false;
        }
    }
    if !bounds.contains(x, INT_TOL) {
        return false;
    }
    for row in region.rows() {
        if row.violation(x) > INT_TOL {
            return false;
        }
    }
    for ind in region.indicator_rows() {
        if x[ind.z] >= 1.0 - INT_TOL && ind.row.violation(x) > INT_TOL {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_box(dim: usize) -> Region {
        Region { kind: RegionKind::IntegerBox, integer_indices: (0..dim).collect(), dimension: dim }
    }

    #[test]
    fn integer_box_per_coordinate() {
        let region = int_box(2);
        let bounds = BoundState::new(vec![0.0, 0.0], vec![3.0, 3.0]);
        let mut milp = MilpSolver::new();
        let v = lmo(&region, &bounds, &[1.0, -2.0], &mut milp, None).unwrap().unwrap();
        assert_eq!(v, vec![0.0, 3.0]);
    }

    #[test]
    fn budget_tie_goes_to_lower_index() {
        let region = Region {
            kind: RegionKind::Budget { cost: vec![1.0, 1.0], budget: 1.0 },
            integer_indices: vec![0, 1],
            dimension: 2,
        };
        let bounds = BoundState::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let mut milp = MilpSolver::new();
        let v = lmo(&region, &bounds, &[-1.0, -1.0], &mut milp, None).unwrap().unwrap();
        assert!((dot(&[-1.0, -1.0], &v) + 1.0).abs() < 1e-9);
        assert_eq!(v, vec![1.0, 0.0]);
    }

    #[test]
    fn zero_direction_returns_feasible_vertex() {
        let region = Region {
            kind: RegionKind::Budget { cost: vec![1.0, 1.0], budget: 1.0 },
            integer_indices: vec![0, 1],
            dimension: 2,
        };
        let bounds = BoundState::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let mut milp = MilpSolver::new();
        let v = lmo(&region, &bounds, &[0.0, 0.0], &mut milp, None).unwrap().unwrap();
        assert!(is_integer_feasible(&region, &bounds, &v));
    }

    #[test]
    fn relaxed_budget_is_fractional_knapsack() {
        // c=(1,1), b=1.5, 0<=x<=1, d=(-2,-1) -> (1, 0.5)
        let region = Region {
            kind: RegionKind::Budget { cost: vec![1.0, 1.0], budget: 1.5 },
            integer_indices: vec![0, 1],
            dimension: 2,
        };
        let bounds = BoundState::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let mut lp = LpSolver::new();
        let v = relaxed_lmo(&region, &bounds, &[-2.0, -1.0], &mut lp).unwrap().unwrap();
        assert!((v[0] - 1.0).abs() < 1e-7 && (v[1] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn crossed_bounds_infeasible() {
        let region = int_box(1);
        let bounds = BoundState::new(vec![2.0], vec![1.0]);
        let mut lp = LpSolver::new();
        assert!(relaxed_lmo(&region, &bounds, &[1.0], &mut lp).unwrap().is_none());
        let mut milp = MilpSolver::new();
        assert!(lmo(&region, &bounds, &[1.0], &mut milp, None).unwrap().is_none());
    }

    #[test]
    fn relaxed_box_matches_integer_lmo() {
        let region = int_box(3);
        let bounds = BoundState::new(vec![0.0; 3], vec![2.0; 3]);
        let d = [0.5, -0.25, 0.0];
        let mut lp = LpSolver::new();
        let mut milp = MilpSolver::new();
        let a = relaxed_lmo(&region, &bounds, &d, &mut lp).unwrap().unwrap();
        let b = lmo(&region, &bounds, &d, &mut milp, None).unwrap().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fractional_midpoint_not_integer_feasible() {
        let region = int_box(2);
        let bounds = BoundState::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        assert!(is_integer_feasible(&region, &bounds, &[1.0, 0.0]));
        assert!(!is_integer_feasible(&region, &bounds, &[0.5, 0.5]));
    }

    #[test]
    fn indicator_violation_not_integer_feasible() {
        // vars (z, s): z=1 => s <= 0
        let model = MilpModel {
            base: LinearProgram {
                objective: vec![0.0, 0.0],
                rows: vec![],
                lower: vec![0.0, 0.0],
                upper: vec![1.0, 2.0],
            },
            integer_indices: vec![0],
            indicator_rows: vec![IndicatorRow { z: 0, row: Row::le(vec![0.0, 1.0], 0.0) }],
        };
        let region = Region { kind: RegionKind::GenericMilp { model }, integer_indices: vec![0], dimension: 2 };
        let bounds = BoundState::new(vec![0.0, 0.0], vec![1.0, 2.0]);
        assert!(!is_integer_feasible(&region, &bounds, &[1.0, 0.5]));
        assert!(is_integer_feasible(&region, &bounds, &[0.0, 0.5]));
    }
}
