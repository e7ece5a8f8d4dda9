//! Dense linear-programming solver.
//!
//! Bounded-variable simplex over `min <d, x>  s.t.  rows, l <= x <= u`.
//! Phase 1 uses artificial variables, phase 2 runs Dantzig pricing with a
//! Bland's-rule fallback once a degeneracy counter trips.

use serde::{Deserialize, Serialize};

use crate::error::SolverError;

/// Row feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-7;
/// Reduced-cost (optimality) tolerance.
pub const OPT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        Row { coeffs, sense: Sense::Le, rhs }
    }

    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Self {
        Row { coeffs, sense: Sense::Ge, rhs }
    }

    /// Signed violation of the row at `x` (positive means violated).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = dot(&self.coeffs, x);
        match self.sense {
            Sense::Le => lhs - self.rhs,
            Sense::Ge => self.rhs - lhs,
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub point: Vec<f64>,
    pub value: f64,
    pub is_vertex: bool,
}

impl LpSolution {
    fn infeasible(n: usize) -> Self {
        LpSolution { status: LpStatus::Infeasible, point: vec![0.0; n], value: f64::INFINITY, is_vertex: false }
    }

    fn unbounded(n: usize) -> Self {
        LpSolution { status: LpStatus::Unbounded, point: vec![0.0; n], value: f64::NEG_INFINITY, is_vertex: false }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn validate(lp: &LinearProgram) -> Result<(), SolverError> {
    let n = lp.objective.len();
    if lp.lower.len() != n || lp.upper.len() != n {
        return Err(SolverError::Argument("bound vectors do not match LP dimension".into()));
    }
    for row in &lp.rows {
        if row.coeffs.len() != n {
            return Err(SolverError::Argument("row length does not match LP dimension".into()));
        }
    }
    for j in 0..n {
        if lp.lower[j] > lp.upper[j] + FEAS_TOL {
            // crossed bounds make the program trivially infeasible, handled by caller
            continue;
        }
        if !lp.lower[j].is_finite() && !lp.upper[j].is_finite() {
            return Err(SolverError::Argument(format!("variable {j} has no finite bound")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarStatus {
    Basic(usize),
    AtLower,
    AtUpper,
}

#[derive(Debug, Clone)]
struct SavedBasis {
    basis: Vec<usize>,
    status: Vec<VarStatus>,
    n_struct: usize,
    n_rows: usize,
}

/// Simplex solver carrying the last basis for warm-started resolves.
#[derive(Debug, Default)]
pub struct LpSolver {
    saved: Option<SavedBasis>,
}

/// One-shot cold solve.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, SolverError> {
    LpSolver::new().solve(lp)
}

struct Tableau {
    /// m x (total+1), last column is B^-1 b.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    status: Vec<VarStatus>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    n_struct: usize,
    m: usize,
    total: usize,
    degenerate_pivots: usize,
    bland: bool,
}

impl Tableau {
    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower => self.lo[j],
            VarStatus::AtUpper => self.hi[j],
            VarStatus::Basic(_) => unreachable!(),
        }
    }

    fn basic_values(&self) -> Vec<f64> {
        let mut xb: Vec<f64> = self.t.iter().map(|r| r[self.total]).collect();
        for j in 0..self.total {
            if let VarStatus::Basic(_) = self.status[j] {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for i in 0..self.m {
                    xb[i] -= self.t[i][j] * v;
                }
            }
        }
        xb
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
        let mut d = vec![0.0; self.total];
        for j in 0..self.total {
            if let VarStatus::Basic(_) = self.status[j] {
                continue;
            }
            let mut v = cost[j];
            for i in 0..self.m {
                if cb[i] != 0.0 {
                    v -= cb[i] * self.t[i][j];
                }
            }
            d[j] = v;
        }
        d
    }

    /// Run the bounded simplex with the given cost vector. Returns Ok(true)
    /// on optimality, Ok(false) on unboundedness.
    fn optimize(&mut self, cost: &[f64]) -> Result<bool, SolverError> {
        let max_iters = 20_000 + 200 * (self.m + self.total);
        for _ in 0..max_iters {
            let xb = self.basic_values();
            let d = self.reduced_costs(cost);

            // entering variable
            let mut enter: Option<(usize, f64)> = None; // (var, sigma)
            for j in 0..self.total {
                let eligible = match self.status[j] {
                    VarStatus::Basic(_) => continue,
                    VarStatus::AtLower => d[j] < -OPT_TOL,
                    VarStatus::AtUpper => d[j] > OPT_TOL,
                };
                if !eligible {
                    continue;
                }
                let sigma = if matches!(self.status[j], VarStatus::AtLower) { 1.0 } else { -1.0 };
                if self.bland {
                    enter = Some((j, sigma));
                    break;
                }
                match enter {
                    Some((bj, _)) if d[bj].abs() >= d[j].abs() => {}
                    _ => enter = Some((j, sigma)),
                }
            }
            let Some((j, sigma)) = enter else {
                return Ok(true);
            };

            // ratio test: entering moves by t >= 0 in direction sigma,
            // basic i changes by -sigma * T[i][j] * t.
            let mut t_best = if self.lo[j].is_finite() && self.hi[j].is_finite() {
                self.hi[j] - self.lo[j]
            } else {
                f64::INFINITY
            };
            let mut leave: Option<(usize, bool)> = None; // (row, leaves_at_lower)
            for i in 0..self.m {
                let coef = -sigma * self.t[i][j];
                if coef < -1e-11 {
                    let b = self.basis[i];
                    if self.lo[b].is_finite() {
                        let t = (xb[i] - self.lo[b]) / (-coef);
                        let t = t.max(0.0);
                        if t < t_best - 1e-12
                            || (t < t_best + 1e-12
                                && leave.map_or(false, |(r, _)| self.basis[r] > b))
                        {
                            t_best = t;
                            leave = Some((i, true));
                        }
                    }
                } else if coef > 1e-11 {
                    let b = self.basis[i];
                    if self.hi[b].is_finite() {
                        let t = (self.hi[b] - xb[i]) / coef;
                        let t = t.max(0.0);
                        if t < t_best - 1e-12
                            || (t < t_best + 1e-12
                                && leave.map_or(false, |(r, _)| self.basis[r] > b))
                        {
                            t_best = t;
                            leave = Some((i, false));
                        }
                    }
                }
            }

            if !t_best.is_finite() {
                return Ok(false);
            }
            if t_best <= 1e-11 {
                self.degenerate_pivots += 1;
                if self.degenerate_pivots > 5 * (self.m + self.total) {
                    self.bland = true;
                }
            }

            match leave {
                None => {
                    // bound flip
                    self.status[j] = match self.status[j] {
                        VarStatus::AtLower => VarStatus::AtUpper,
                        VarStatus::AtUpper => VarStatus::AtLower,
                        VarStatus::Basic(_) => unreachable!(),
                    };
                }
                Some((r, at_lower)) => {
                    let old = self.basis[r];
                    self.status[old] = if at_lower { VarStatus::AtLower } else { VarStatus::AtUpper };
                    self.pivot(r, j);
                }
            }
        }
        Err(SolverError::Numerical("simplex iteration limit exceeded".into()))
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let piv = self.t[r][j];
        debug_assert!(piv.abs() > 1e-12);
        let inv = 1.0 / piv;
        for v in self.t[r].iter_mut() {
            *v *= inv;
        }
        let row_r = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (v, rv) in row.iter_mut().zip(&row_r) {
                    *v -= f * rv;
                }
            }
        }
        self.basis[r] = j;
        self.status[j] = VarStatus::Basic(r);
    }

    fn extract(&self, lp: &LinearProgram) -> LpSolution {
        let xb = self.basic_values();
        let mut point = vec![0.0; self.n_struct];
        for (j, p) in point.iter_mut().enumerate() {
            *p = match self.status[j] {
                VarStatus::Basic(i) => xb[i],
                VarStatus::AtLower => self.lo[j],
                VarStatus::AtUpper => self.hi[j],
            };
        }
        // clamp tiny bound violations from pivoting noise
        for (j, p) in point.iter_mut().enumerate() {
            *p = p.clamp(
                if lp.lower[j].is_finite() { lp.lower[j] } else { f64::NEG_INFINITY },
                if lp.upper[j].is_finite() { lp.upper[j] } else { f64::INFINITY },
            );
        }
        let value = dot(&lp.objective, &point);
        LpSolution { status: LpStatus::Optimal, point, value, is_vertex: true }
    }
}

impl LpSolver {
    pub fn new() -> Self {
        LpSolver { saved: None }
    }

    /// Solve the program, reusing the previous basis when the structure is
    /// unchanged and the old basis stays feasible.
    pub fn solve(&mut self, lp: &LinearProgram) -> Result<LpSolution, SolverError> {
        validate(lp)?;
        let n = lp.objective.len();
        for j in 0..n {
            if lp.lower[j] > lp.upper[j] + FEAS_TOL {
                return Ok(LpSolution::infeasible(n));
            }
        }

        if let Some(sol) = self.try_warm(lp)? {
            return Ok(sol);
        }
        self.cold_solve(lp)
    }

    /// Solve with the bounds substituted by `(l, u)`.
    pub fn resolve_with_bounds(
        &mut self,
        lp: &LinearProgram,
        l: &[f64],
        u: &[f64],
    ) -> Result<LpSolution, SolverError> {
        if l.len() != lp.objective.len() || u.len() != lp.objective.len() {
            return Err(SolverError::Argument("bound vectors do not match LP dimension".into()));
        }
        let mut sub = lp.clone();
        sub.lower = l.to_vec();
        sub.upper = u.to_vec();
        self.solve(&sub)
    }

    fn build(&self, lp: &LinearProgram) -> Tableau {
        let n = lp.objective.len();
        let m = lp.rows.len();
        let total = n + 2 * m; // structural + slack + artificial

        let mut lo = vec![0.0; total];
        let mut hi = vec![0.0; total];
        lo[..n].copy_from_slice(&lp.lower);
        hi[..n].copy_from_slice(&lp.upper);
        for (i, row) in lp.rows.iter().enumerate() {
            let (slo, shi) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lo[n + i] = slo;
            hi[n + i] = shi;
            lo[n + m + i] = 0.0;
            hi[n + m + i] = f64::INFINITY;
        }

        // nonbasic start: finite bound nearest zero
        let mut status = vec![VarStatus::AtLower; total];
        for j in 0..n + m {
            status[j] = if !lo[j].is_finite() {
                VarStatus::AtUpper
            } else if !hi[j].is_finite() {
                VarStatus::AtLower
            } else if lo[j].abs() <= hi[j].abs() {
                VarStatus::AtLower
            } else {
                VarStatus::AtUpper
            };
        }

        // residuals with structural + slack at their chosen bounds
        let mut resid = vec![0.0; m];
        for (i, row) in lp.rows.iter().enumerate() {
            let mut r = row.rhs;
            for j in 0..n {
                let v = match status[j] {
                    VarStatus::AtLower => lo[j],
                    VarStatus::AtUpper => hi[j],
                    VarStatus::Basic(_) => unreachable!(),
                };
                r -= row.coeffs[j] * v;
            }
            // park the slack at its finite bound nearest the residual; the
            // artificial absorbs the remainder and phase 1 cleans it up
            let slo = lo[n + i];
            let shi = hi[n + i];
            let (st, sv) = if !slo.is_finite() {
                (VarStatus::AtUpper, shi)
            } else if !shi.is_finite() || (r - slo).abs() <= (r - shi).abs() {
                (VarStatus::AtLower, slo)
            } else {
                (VarStatus::AtUpper, shi)
            };
            status[n + i] = st;
            resid[i] = r - sv;
        }

        let mut basis = Vec::with_capacity(m);
        let mut t = Vec::with_capacity(m);
        for (i, row) in lp.rows.iter().enumerate() {
            let sigma = if resid[i] >= 0.0 { 1.0 } else { -1.0 };
            let mut trow = vec![0.0; total + 1];
            for j in 0..n {
                trow[j] = sigma * row.coeffs[j];
            }
            trow[n + i] = sigma;
            trow[n + m + i] = 1.0;
            trow[total] = sigma * row.rhs;
            t.push(trow);
            basis.push(n + m + i);
            status[n + m + i] = VarStatus::Basic(i);
        }

        Tableau {
            t,
            basis,
            status,
            lo,
            hi,
            n_struct: n,
            m,
            total,
            degenerate_pivots: 0,
            bland: false,
        }
    }

    fn cold_solve(&mut self, lp: &LinearProgram) -> Result<LpSolution, SolverError> {
        let n = lp.objective.len();
        let m = lp.rows.len();
        let mut tab = self.build(lp);

        // phase 1: minimize artificial sum
        let mut cost1 = vec![0.0; tab.total];
        for j in n + m..tab.total {
            cost1[j] = 1.0;
        }
        let ok = tab.optimize(&cost1)?;
        debug_assert!(ok, "phase 1 cannot be unbounded");
        let xb = tab.basic_values();
        let mut art_sum = 0.0;
        for (i, &b) in tab.basis.iter().enumerate() {
            if b >= n + m {
                art_sum += xb[i].max(0.0);
            }
        }
        for j in n + m..tab.total {
            if !matches!(tab.status[j], VarStatus::Basic(_)) && tab.nonbasic_value(j) > 0.0 {
                art_sum += tab.nonbasic_value(j);
            }
        }
        let scale = 1.0 + lp.rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if art_sum > FEAS_TOL * scale {
            return Ok(LpSolution::infeasible(n));
        }

        // lock artificials at zero
        for j in n + m..tab.total {
            tab.hi[j] = 0.0;
            if matches!(tab.status[j], VarStatus::AtUpper) {
                tab.status[j] = VarStatus::AtLower;
            }
        }

        self.phase2(lp, tab)
    }

    fn phase2(&mut self, lp: &LinearProgram, mut tab: Tableau) -> Result<LpSolution, SolverError> {
        let n = lp.objective.len();
        let mut cost2 = vec![0.0; tab.total];
        cost2[..n].copy_from_slice(&lp.objective);
        tab.degenerate_pivots = 0;
        tab.bland = false;
        let bounded = tab.optimize(&cost2)?;
        if !bounded {
            self.saved = None;
            return Ok(LpSolution::unbounded(n));
        }
        self.saved = Some(SavedBasis {
            basis: tab.basis.clone(),
            status: tab.status.clone(),
            n_struct: n,
            n_rows: tab.m,
        });
        Ok(tab.extract(lp))
    }

    /// Rebuild the tableau from a previous basis; used when only bounds moved.
    fn try_warm(&mut self, lp: &LinearProgram) -> Result<Option<LpSolution>, SolverError> {
        let n = lp.objective.len();
        let m = lp.rows.len();
        let Some(saved) = self.saved.clone() else { return Ok(None) };
        if saved.n_struct != n || saved.n_rows != m {
            return Ok(None);
        }
        let mut tab = self.build(lp);
        tab.status = saved.status;
        tab.basis = saved.basis;
        // artificials stay locked at zero
        for j in n + m..tab.total {
            tab.hi[j] = 0.0;
            if matches!(tab.status[j], VarStatus::AtUpper) {
                tab.status[j] = VarStatus::AtLower;
            }
        }
        // refactorize: Gauss-Jordan the stored basis columns to the identity
        // (row scaling from build() is absorbed by the elimination)
        let basis_vars = tab.basis.clone();
        let mut new_basis = vec![usize::MAX; m];
        let mut done_rows = vec![false; m];
        for &bj in &basis_vars {
            let mut best: Option<(usize, f64)> = None;
            for i in 0..m {
                if done_rows[i] {
                    continue;
                }
                let v = tab.t[i][bj].abs();
                if best.map_or(true, |(_, bv)| v > bv) {
                    best = Some((i, v));
                }
            }
            let Some((r, piv)) = best else { return Ok(None) };
            if piv < 1e-9 {
                return Ok(None); // singular basis under new data
            }
            let inv = 1.0 / tab.t[r][bj];
            for v in tab.t[r].iter_mut() {
                *v *= inv;
            }
            let row_r = tab.t[r].clone();
            for i in 0..m {
                if i == r {
                    continue;
                }
                let f = tab.t[i][bj];
                if f != 0.0 {
                    for (v, rv) in tab.t[i].iter_mut().zip(&row_r) {
                        *v -= f * rv;
                    }
                }
            }
            done_rows[r] = true;
            new_basis[r] = bj;
        }
        tab.basis = new_basis;
        for (i, &bj) in tab.basis.iter().enumerate() {
            tab.status[bj] = VarStatus::Basic(i);
        }
        // feasibility of the warm basis under the new bounds
        let xb = tab.basic_values();
        for (i, &b) in tab.basis.iter().enumerate() {
            let lo = tab.lo[b];
            let hi = tab.hi[b];
            if (lo.is_finite() && xb[i] < lo - FEAS_TOL) || (hi.is_finite() && xb[i] > hi + FEAS_TOL) {
                return Ok(None);
            }
        }
        Ok(Some(self.phase2(lp, tab)?))
    }
}
