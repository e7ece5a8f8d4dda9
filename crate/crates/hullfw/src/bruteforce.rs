//! Reference solvers used only for verification. Everything here is
//! deliberately independent of the simplex, MILP, and conditional-gradient
//! engines: integer assignments are enumerated exhaustively and continuous
//! subproblems are solved by projected gradient or basis enumeration.

use crate::blmo::RegionKind;
use crate::error::SolverError;
use crate::la::gauss_solve;
use crate::lp::{dot, LinearProgram, Row, Sense};
use crate::milp::MilpModel;
use crate::objective::{ObjectiveKind, ProblemInstance};

const PG_TOL: f64 = 1e-9;
const PG_MAX_ITERS: usize = 500_000;
const MAX_FIXINGS: u64 = 2_000_000;

/// Minimize a smooth convex function over a convex set given by a projection
/// map. Armijo backtracking on the projection arc; stops when the unit-step
/// projected-gradient residual drops below `PG_TOL`.
pub fn projected_gradient<F, G, P>(f: F, grad: G, project: P, x0: Vec<f64>) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    P: Fn(Vec<f64>) -> Vec<f64>,
{
    let mut x = project(x0);
    let mut fx = f(&x);
    let mut step = 1.0;
    for _ in 0..PG_MAX_ITERS {
        let g = grad(&x);
        let resid = project(x.iter().zip(&g).map(|(xi, gi)| xi - gi).collect());
        let rn: f64 =
            resid.iter().zip(&x).map(|(r, xi)| (r - xi) * (r - xi)).sum::<f64>().sqrt();
        if rn <= PG_TOL {
            break;
        }
        loop {
            let cand =
                project(x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect());
            let d: Vec<f64> = cand.iter().zip(&x).map(|(c, xi)| c - xi).collect();
            let dn = dot(&d, &d);
            if dn == 0.0 {
                step *= 0.5;
                if step < 1e-18 {
                    return (x, fx);
                }
                continue;
            }
            let fc = f(&cand);
            if fc <= fx + dot(&g, &d) + dn / (2.0 * step) + 1e-15 {
                x = cand;
                fx = fc;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                return (x, fx);
            }
        }
    }
    (x, fx)
}

pub fn clamp_box(mut x: Vec<f64>, lower: &[f64], upper: &[f64]) -> Vec<f64> {
    for (v, (l, u)) in x.iter_mut().zip(lower.iter().zip(upper)) {
        *v = v.clamp(*l, *u);
    }
    x
}

/// Euclidean projection onto a box intersected with one halfspace
/// `<c, x> <= b`, by bisection on the constraint multiplier.
pub fn project_box_halfspace(
    x: Vec<f64>,
    lower: &[f64],
    upper: &[f64],
    c: &[f64],
    b: f64,
) -> Vec<f64> {
    let clamped = clamp_box(x.clone(), lower, upper);
    if dot(c, &clamped) <= b + 1e-14 {
        return clamped;
    }
    let shift = |lam: f64| -> Vec<f64> {
        clamp_box(x.iter().zip(c).map(|(xi, ci)| xi - lam * ci).collect(), lower, upper)
    };
    let mut hi = 1.0;
    while dot(c, &shift(hi)) > b {
        hi *= 2.0;
        if hi > 1e18 {
            break;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dot(c, &shift(mid)) > b {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    shift(hi)
}

/// All integral assignments for the bounded integer coordinates. Errors when
/// the grid would be too large to enumerate.
pub fn integer_assignments(
    integer_indices: &[usize],
    lower: &[f64],
    upper: &[f64],
) -> Result<Vec<Vec<f64>>, SolverError> {
    let mut count: u64 = 1;
    let mut ranges = Vec::with_capacity(integer_indices.len());
    for &j in integer_indices {
        let lo = lower[j].ceil();
        let hi = upper[j].floor();
        if lo > hi {
            return Ok(vec![]);
        }
        let span = (hi - lo) as u64 + 1;
        count = count.saturating_mul(span);
        if count > MAX_FIXINGS {
            return Err(SolverError::Argument("integer grid too large to enumerate".into()));
        }
        ranges.push((lo, span));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0.0; integer_indices.len()];
    fill(&ranges, 0, &mut current, &mut out);
    Ok(out)
}

fn fill(ranges: &[(f64, u64)], pos: usize, current: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
    if pos == ranges.len() {
        out.push(current.clone());
        return;
    }
    let (lo, span) = ranges[pos];
    for t in 0..span {
        current[pos] = lo + t as f64;
        fill(ranges, pos + 1, current, out);
    }
}

/// Global optimum of a problem instance by exhaustive enumeration over the
/// integer coordinates with a projected-gradient inner solve. Returns None
/// when no integral assignment is feasible.
pub fn reference_optimum(
    inst: &ProblemInstance,
) -> Result<Option<(Vec<f64>, f64)>, SolverError> {
    match (&inst.region, &inst.objective.kind) {
        (RegionKind::GenericMilp { .. }, ObjectiveKind::Tcmp { lambda, .. }) => {
            tcmp_optimum(inst, *lambda)
        }
        (RegionKind::Budget { cost, budget }, _) => {
            budget_optimum(inst, cost, *budget)
        }
        _ => box_reducible_optimum(inst),
    }
}

fn keep_best(best: &mut Option<(Vec<f64>, f64)>, cand: (Vec<f64>, f64)) {
    if best.as_ref().map_or(true, |(_, v)| cand.1 < *v) {
        *best = Some(cand);
    }
}

fn assemble(
    dim: usize,
    integer_indices: &[usize],
    fixing: &[f64],
    cont_indices: &[usize],
    cont: &[f64],
) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    for (slot, &j) in integer_indices.iter().enumerate() {
        x[j] = fixing[slot];
    }
    for (slot, &j) in cont_indices.iter().enumerate() {
        x[j] = cont[slot];
    }
    x
}

fn budget_optimum(
    inst: &ProblemInstance,
    cost: &[f64],
    budget: f64,
) -> Result<Option<(Vec<f64>, f64)>, SolverError> {
    let dim = inst.dimension;
    let cont: Vec<usize> =
        (0..dim).filter(|j| !inst.integer_indices.contains(j)).collect();
    let c_cont: Vec<f64> = cont.iter().map(|&j| cost[j]).collect();
    let lo: Vec<f64> = cont.iter().map(|&j| inst.lower[j]).collect();
    let hi: Vec<f64> = cont.iter().map(|&j| inst.upper[j]).collect();
    let min_cont: f64 = c_cont
        .iter()
        .zip(lo.iter().zip(&hi))
        .map(|(c, (l, u))| if *c >= 0.0 { c * l } else { c * u })
        .sum();
    let mut best = None;
    for fixing in integer_assignments(&inst.integer_indices, &inst.lower, &inst.upper)? {
        let used: f64 = inst
            .integer_indices
            .iter()
            .zip(&fixing)
            .map(|(&j, v)| cost[j] * v)
            .sum();
        let residual = budget - used;
        if min_cont > residual + 1e-12 {
            continue;
        }
        if cont.is_empty() {
            let x = assemble(dim, &inst.integer_indices, &fixing, &cont, &[]);
            let v = inst.objective.eval(&x);
            keep_best(&mut best, (x, v));
            continue;
        }
        let obj = &inst.objective;
        let full = |y: &[f64]| assemble(dim, &inst.integer_indices, &fixing, &cont, y);
        let (y, v) = projected_gradient(
            |y| obj.eval(&full(y)),
            |y| {
                let g = obj.grad(&full(y));
                cont.iter().map(|&j| g[j]).collect()
            },
            |y| project_box_halfspace(y, &lo, &hi, &c_cont, residual),
            lo.clone(),
        );
        keep_best(&mut best, (full(&y), v));
    }
    Ok(best)
}

/// Handles instances whose rows, after fixing the integer coordinates, touch
/// at most one continuous variable each (boxes and the regression coupling).
fn box_reducible_optimum(
    inst: &ProblemInstance,
) -> Result<Option<(Vec<f64>, f64)>, SolverError> {
    let dim = inst.dimension;
    let cont: Vec<usize> =
        (0..dim).filter(|j| !inst.integer_indices.contains(j)).collect();
    let rows: Vec<Row> = match &inst.region {
        RegionKind::IntegerBox => vec![],
        RegionKind::Budget { cost, budget } => vec![Row::le(cost.clone(), *budget)],
        RegionKind::GenericMilp { model } => model.base.rows.clone(),
    };
    let indicators: Vec<_> = match &inst.region {
        RegionKind::GenericMilp { model } => model.indicator_rows.clone(),
        _ => vec![],
    };
    let mut best = None;
    'fix: for fixing in integer_assignments(&inst.integer_indices, &inst.lower, &inst.upper)? {
        let mut lo: Vec<f64> = cont.iter().map(|&j| inst.lower[j]).collect();
        let mut hi: Vec<f64> = cont.iter().map(|&j| inst.upper[j]).collect();
        let base = assemble(dim, &inst.integer_indices, &fixing, &cont, &vec![0.0; cont.len()]);
        let mut active_rows: Vec<&Row> = rows.iter().collect();
        for ind in &indicators {
            let slot = inst.integer_indices.iter().position(|&j| j == ind.z);
            let Some(slot) = slot else {
                return Err(SolverError::Unsupported("continuous indicator variable".into()));
            };
            if fixing[slot] >= 0.5 {
                active_rows.push(&ind.row);
            }
        }
        for row in active_rows {
            let support: Vec<usize> = cont
                .iter()
                .enumerate()
                .filter(|(_, &j)| row.coeffs[j] != 0.0)
                .map(|(slot, _)| slot)
                .collect();
            let fixed_part: f64 = inst
                .integer_indices
                .iter()
                .zip(&fixing)
                .map(|(&j, v)| row.coeffs[j] * v)
                .sum();
            match (support.len(), row.sense) {
                (0, Sense::Le) => {
                    if fixed_part > row.rhs + 1e-9 {
                        continue 'fix;
                    }
                }
                (0, Sense::Ge) => {
                    if fixed_part < row.rhs - 1e-9 {
                        continue 'fix;
                    }
                }
                (0, Sense::Eq) => {
                    if (fixed_part - row.rhs).abs() > 1e-9 {
                        continue 'fix;
                    }
                }
                (1, sense) => {
                    let slot = support[0];
                    let a = row.coeffs[cont[slot]];
                    let bound = (row.rhs - fixed_part) / a;
                    let upper_side = (sense == Sense::Le) == (a > 0.0);
                    match sense {
                        Sense::Eq => {
                            lo[slot] = lo[slot].max(bound);
                            hi[slot] = hi[slot].min(bound);
                        }
                        _ if upper_side => hi[slot] = hi[slot].min(bound),
                        _ => lo[slot] = lo[slot].max(bound),
                    }
                }
                _ => {
                    return Err(SolverError::Unsupported(
                        "row couples several continuous variables".into(),
                    ));
                }
            }
        }
        if lo.iter().zip(&hi).any(|(l, u)| *l > u + 1e-12) {
            continue;
        }
        let hi_fixed: Vec<f64> = lo.iter().zip(&hi).map(|(l, u)| u.max(*l)).collect();
        if cont.is_empty() {
            let v = inst.objective.eval(&base);
            keep_best(&mut best, (base, v));
            continue;
        }
        let obj = &inst.objective;
        let full = |y: &[f64]| assemble(dim, &inst.integer_indices, &fixing, &cont, y);
        let start: Vec<f64> =
            lo.iter().zip(&hi_fixed).map(|(l, u)| 0.5 * (l + u)).collect();
        let (y, v) = projected_gradient(
            |y| obj.eval(&full(y)),
            |y| {
                let g = obj.grad(&full(y));
                cont.iter().map(|&j| g[j]).collect()
            },
            |y| clamp_box(y, &lo, &hi_fixed),
            start,
        );
        keep_best(&mut best, (full(&y), v));
    }
    Ok(best)
}

/// Detection problem: variables (x, z, s). Fixing z reduces the region to a
/// box on x (|x_i| <= tau_i where z_i = 1); s is reconstructed afterwards.
fn tcmp_optimum(
    inst: &ProblemInstance,
    lambda: f64,
) -> Result<Option<(Vec<f64>, f64)>, SolverError> {
    let n = inst.dimension / 3;
    let RegionKind::GenericMilp { model } = &inst.region else {
        return Err(SolverError::Argument("detection instance without MILP region".into()));
    };
    let tau: Vec<f64> = (0..n).map(|i| model.base.rows[2 * i].rhs).collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for fixing in integer_assignments(&inst.integer_indices, &inst.lower, &inst.upper)? {
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        let mut feasible = true;
        for i in 0..n {
            let (mut l, mut u) = (inst.lower[i], inst.upper[i]);
            if fixing[i] >= 0.5 {
                l = l.max(-tau[i]);
                u = u.min(tau[i]);
            } else {
                let slack = inst.upper[2 * n + i] + tau[i];
                l = l.max(-slack);
                u = u.min(slack);
            }
            if l > u {
                feasible = false;
                break;
            }
            lo.push(l);
            hi.push(u);
        }
        if !feasible {
            continue;
        }
        let obj = &inst.objective;
        let full = |xs: &[f64]| {
            let mut x = vec![0.0; inst.dimension];
            x[..n].copy_from_slice(xs);
            for i in 0..n {
                x[n + i] = fixing[i];
                x[2 * n + i] = (xs[i].abs() - tau[i]).max(0.0);
            }
            x
        };
        let (xs, _) = projected_gradient(
            |xs| obj.eval(&full(xs)),
            |xs| obj.grad(&full(xs))[..n].to_vec(),
            |xs| clamp_box(xs, &lo, &hi),
            vec![0.0; n],
        );
        let point = full(&xs);
        let v = obj.eval(&point);
        let _ = lambda;
        keep_best(&mut best, (point, v));
    }
    Ok(best)
}

/// LP reference: enumerate all basic points (choices of n active constraints
/// among row-equalities and bounds), keep the feasible one with least
/// objective. Intended for small boxes only.
pub fn lp_vertex_optimum(prog: &LinearProgram) -> Option<(Vec<f64>, f64)> {
    let n = prog.objective.len();
    // candidate active constraints as (coeffs, rhs)
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &prog.rows {
        cons.push((row.coeffs.clone(), row.rhs));
    }
    for j in 0..n {
        if prog.lower[j].is_finite() {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            cons.push((e, prog.lower[j]));
        }
        if prog.upper[j].is_finite() && prog.upper[j] != prog.lower[j] {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            cons.push((e, prog.upper[j]));
        }
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut pick = vec![0usize; n];
    enumerate_subsets(cons.len(), n, &mut pick, 0, 0, &mut |chosen| {
        let a: Vec<Vec<f64>> = chosen.iter().map(|&i| cons[i].0.clone()).collect();
        let b: Vec<f64> = chosen.iter().map(|&i| cons[i].1).collect();
        if let Some(x) = gauss_solve(&a, &b) {
            if lp_point_feasible(prog, &x) {
                let v = dot(&prog.objective, &x);
                if best.as_ref().map_or(true, |(_, bv)| v < *bv - 0.0) {
                    best = Some((x, v));
                }
            }
        }
    });
    best
}

fn enumerate_subsets(
    total: usize,
    k: usize,
    pick: &mut Vec<usize>,
    pos: usize,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos == k {
        visit(pick);
        return;
    }
    for i in start..total {
        pick[pos] = i;
        enumerate_subsets(total, k, pick, pos + 1, i + 1, visit);
    }
}

fn lp_point_feasible(prog: &LinearProgram, x: &[f64]) -> bool {
    const TOL: f64 = 1e-7;
    for (j, v) in x.iter().enumerate() {
        if *v < prog.lower[j] - TOL || *v > prog.upper[j] + TOL {
            return false;
        }
    }
    prog.rows.iter().all(|row| row.violation(x) <= TOL)
}

/// MILP reference: enumerate integer assignments, solve each continuous
/// remainder by vertex enumeration.
pub fn milp_enumeration(
    model: &MilpModel,
    objective: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> Result<Option<(Vec<f64>, f64)>, SolverError> {
    let dim = model.dimension();
    let lo: Vec<f64> = (0..dim).map(|j| lower[j].max(model.base.lower[j])).collect();
    let hi: Vec<f64> = (0..dim).map(|j| upper[j].min(model.base.upper[j])).collect();
    let cont: Vec<usize> =
        (0..dim).filter(|j| !model.integer_indices.contains(j)).collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    'fix: for fixing in integer_assignments(&model.integer_indices, &lo, &hi)? {
        let mut rows = model.base.rows.clone();
        for ind in &model.indicator_rows {
            let slot = model.integer_indices.iter().position(|&j| j == ind.z).unwrap();
            if fixing[slot] >= 0.5 {
                rows.push(ind.row.clone());
            }
        }
        if cont.is_empty() {
            let x = assemble(dim, &model.integer_indices, &fixing, &cont, &[]);
            for row in &rows {
                if row.violation(&x) > 1e-9 {
                    continue 'fix;
                }
            }
            let v = dot(objective, &x);
            keep_best(&mut best, (x, v));
            continue;
        }
        // reduce to the continuous coordinates
        let reduced = LinearProgram {
            objective: cont.iter().map(|&j| objective[j]).collect(),
            rows: rows
                .iter()
                .map(|row| {
                    let fixed: f64 = model
                        .integer_indices
                        .iter()
                        .zip(&fixing)
                        .map(|(&j, v)| row.coeffs[j] * v)
                        .sum();
                    Row {
                        coeffs: cont.iter().map(|&j| row.coeffs[j]).collect(),
                        sense: row.sense,
                        rhs: row.rhs - fixed,
                    }
                })
                .collect(),
            lower: cont.iter().map(|&j| lo[j]).collect(),
            upper: cont.iter().map(|&j| hi[j]).collect(),
        };
        if let Some((y, v)) = lp_vertex_optimum(&reduced) {
            let fixed_obj: f64 = model
                .integer_indices
                .iter()
                .zip(&fixing)
                .map(|(&j, w)| objective[j] * w)
                .sum();
            let x = assemble(dim, &model.integer_indices, &fixing, &cont, &y);
            keep_best(&mut best, (x, v + fixed_obj));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{make_portfolio, make_sparse_regression, make_tcmp, Objective};

    #[test]
    fn pg_solves_clamped_quadratic() {
        // min (x-2)^2 + (y+1)^2 over [0,1]^2 -> (1, 0), value 2
        let (x, v) = projected_gradient(
            |x| (x[0] - 2.0).powi(2) + (x[1] + 1.0).powi(2),
            |x| vec![2.0 * (x[0] - 2.0), 2.0 * (x[1] + 1.0)],
            |x| clamp_box(x, &[0.0, 0.0], &[1.0, 1.0]),
            vec![0.5, 0.5],
        );
        assert!((x[0] - 1.0).abs() < 1e-8 && x[1].abs() < 1e-8);
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn halfspace_projection_is_feasible_and_idempotent() {
        let p = project_box_halfspace(vec![2.0, 2.0], &[0.0, 0.0], &[3.0, 3.0], &[1.0, 1.0], 2.0);
        assert!((p[0] + p[1] - 2.0).abs() < 1e-10);
        assert!((p[0] - 1.0).abs() < 1e-10 && (p[1] - 1.0).abs() < 1e-10);
        let q = project_box_halfspace(p.clone(), &[0.0, 0.0], &[3.0, 3.0], &[1.0, 1.0], 2.0);
        assert!((q[0] - p[0]).abs() < 1e-9);
    }

    #[test]
    fn assignments_cover_the_grid() {
        let a = integer_assignments(&[0, 2], &[0.0, 0.0, -1.0], &[1.0, 5.0, 1.0]).unwrap();
        assert_eq!(a.len(), 6);
        assert!(a.contains(&vec![1.0, -1.0]));
    }

    #[test]
    fn spec_portfolio_fixture_has_value_minus_one() {
        // M = I, r = (2,2), cost (1,1), budget 1.5, x in {0,1}^2
        let inst = ProblemInstance {
            dimension: 2,
            objective: Objective {
                kind: ObjectiveKind::Portfolio {
                    m: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                    r: vec![2.0, 2.0],
                },
                strong_convexity_mu: Some(2.0),
                sharpness: None,
            },
            region: RegionKind::Budget { cost: vec![1.0, 1.0], budget: 1.5 },
            integer_indices: vec![0, 1],
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
            known_optimum: None,
        };
        let (x, v) = reference_optimum(&inst).unwrap().unwrap();
        assert!((v + 1.0).abs() < 1e-9);
        assert!((x[0] + x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn generated_families_enumerate_without_error() {
        let port = make_portfolio(4, 0.5, 2).unwrap();
        let (xp, vp) = reference_optimum(&port).unwrap().unwrap();
        assert!(vp <= port.objective.eval(&vec![0.0; 4]) + 1e-9);
        assert!(xp.iter().zip(&port.lower).all(|(x, l)| x >= &(l - 1e-9)));

        let reg = make_sparse_regression(6, 3, 1, 5).unwrap();
        let (xr, vr) = reference_optimum(&reg).unwrap().unwrap();
        let zeros = reg.objective.eval(&vec![0.0; 6]);
        assert!(vr <= zeros + 1e-9);
        let s: f64 = xr[3..].iter().sum();
        assert!(s <= 1.0 + 1e-9);

        let tc = make_tcmp(2, 0.3, 1e-3, &[0.4, 0.4], 8).unwrap();
        let (_, vt) = reference_optimum(&tc).unwrap().unwrap();
        // all-zero x with z = 0 is feasible, so the optimum is at most f(0)
        let mut zero = vec![0.0; 6];
        zero[2] = 1.0;
        zero[3] = 1.0;
        assert!(vt <= tc.objective.eval(&zero) + 1e-9);
    }

    #[test]
    fn tcmp_lambda_zero_keeps_all_ones_optimal() {
        let tc = make_tcmp(2, 0.0, 1e-3, &[5.0, 5.0], 3).unwrap();
        let (x, _) = reference_optimum(&tc).unwrap().unwrap();
        // tau is huge, so z = (1,1) costs nothing and the penalty is vacuous
        let mut ones = x.clone();
        ones[2] = 1.0;
        ones[3] = 1.0;
        let v1 = tc.objective.eval(&ones);
        let v0 = tc.objective.eval(&x);
        assert!(v1 <= v0 + 1e-9);
    }

    #[test]
    fn vertex_enumeration_matches_known_lp() {
        // min -x - y st x + y <= 1.5, box [0,1]^2 -> value -1.5
        let prog = LinearProgram {
            objective: vec![-1.0, -1.0],
            rows: vec![Row::le(vec![1.0, 1.0], 1.5)],
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
        };
        let (_, v) = lp_vertex_optimum(&prog).unwrap();
        assert!((v + 1.5).abs() < 1e-9);
    }

    #[test]
    fn milp_enumeration_matches_hand_count() {
        // integers in [0,2]^2, x + y >= 3, min x + 2y -> (2,1) value 4
        let model = MilpModel {
            base: LinearProgram {
                objective: vec![0.0, 0.0],
                rows: vec![Row::ge(vec![1.0, 1.0], 3.0)],
                lower: vec![0.0, 0.0],
                upper: vec![2.0, 2.0],
            },
            integer_indices: vec![0, 1],
            indicator_rows: vec![],
        };
        let (x, v) =
            milp_enumeration(&model, &[1.0, 2.0], &[0.0, 0.0], &[2.0, 2.0]).unwrap().unwrap();
        assert_eq!(x, vec![2.0, 1.0]);
        assert!((v - 4.0).abs() < 1e-12);
    }
}
