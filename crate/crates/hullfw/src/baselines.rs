//! Comparison solvers: outer approximation with gradient cuts on the MILP
//! engine, and a plain branch-and-bound whose node relaxation is Frank-Wolfe
//! over the continuous relaxation (box instead of hull).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::blmo::{is_integer_feasible, lmo, relaxed_lmo, BoundState, Region};
use crate::bpcg::{adaptive_step, ActiveSet};
use crate::error::Result;
use crate::harness::{EventKind, RunHeader, RunLog};
use crate::lp::{dot, Row};
use crate::milp::{IndicatorRow, MilpModel, MilpSolver, MilpStatus, INT_TOL};
use crate::objective::{Objective, ProblemInstance};
use crate::tree::{SolveOutcome, SolveStatus, SolverConfig};

fn new_log(solver: &str) -> RunLog {
    RunLog::new(RunHeader {
        instance: String::new(),
        solver: solver.into(),
        config_hash: String::new(),
        seed: 0,
    })
}

fn infeasible_outcome(mut log: RunLog, lmo_calls: usize, wall: f64) -> SolveOutcome {
    log.finish("Infeasible", None, f64::INFINITY, 0, lmo_calls, wall);
    SolveOutcome {
        status: SolveStatus::Infeasible,
        incumbent: None,
        primal: f64::INFINITY,
        dual: f64::INFINITY,
        nodes_processed: 0,
        total_lmo_calls: lmo_calls,
        log,
    }
}

/// Lift the region's MILP model by one epigraph variable `t` (last index).
fn epigraph_model(region: &Region) -> MilpModel {
    let model = region.as_milp_model();
    let n = region.dimension;
    let mut base = model.base.clone();
    base.objective = vec![0.0; n + 1];
    base.objective[n] = 1.0;
    for row in &mut base.rows {
        row.coeffs.push(0.0);
    }
    base.lower.push(f64::NEG_INFINITY);
    base.upper.push(f64::INFINITY);
    let indicator_rows = model
        .indicator_rows
        .iter()
        .map(|ind| {
            let mut row = ind.row.clone();
            row.coeffs.push(0.0);
            IndicatorRow { z: ind.z, row }
        })
        .collect();
    MilpModel { base, integer_indices: model.integer_indices.clone(), indicator_rows }
}

/// t >= f(x_k) + <g_k, x - x_k>  encoded as  <g_k, x> - t <= <g_k, x_k> - f(x_k)
fn gradient_cut(objective: &Objective, x_k: &[f64]) -> Row {
    let g = objective.grad(x_k);
    let rhs = dot(&g, x_k) - objective.eval(x_k);
    let mut coeffs = g;
    coeffs.push(-1.0);
    Row::le(coeffs, rhs)
}

/// Outer approximation: iteratively solve the epigraph MILP under all
/// gradient cuts collected so far, adding a new cut at each MILP solution.
pub fn solve_oa(
    instance: &ProblemInstance,
    tolerance: f64,
    max_rounds: usize,
    time_limit: Option<f64>,
) -> Result<SolveOutcome> {
    instance.validate()?;
    let start = Instant::now();
    let mut log = new_log("oa");
    let objective = &instance.objective;
    let region = instance.region();
    let bounds = instance.bounds();
    let n = instance.dimension;
    let mut milp = MilpSolver::new();

    let zero = vec![0.0; n];
    let mut lmo_calls = 1usize;
    let Some(x0) = lmo(&region, &bounds, &zero, &mut milp, None)? else {
        return Ok(infeasible_outcome(log, 1, start.elapsed().as_secs_f64()));
    };
    let mut incumbent = x0.clone();
    let mut upper = objective.eval(&x0);

    let mut model = epigraph_model(&region);
    // finite bounds on t keep the first epigraph solve bounded: the initial
    // cut at x0 caps t from below over the box, the incumbent from above
    let g0 = objective.grad(&x0);
    let mut t_lo = upper;
    for j in 0..n {
        let lo = bounds.lower[j] - x0[j];
        let hi = bounds.upper[j] - x0[j];
        t_lo += if g0[j] >= 0.0 { g0[j] * lo } else { g0[j] * hi };
    }
    model.base.lower[n] = t_lo.min(upper) - 1.0;
    model.base.upper[n] = upper + 1.0;
    model.base.rows.push(gradient_cut(objective, &x0));

    let mut lower = vec![0.0; n + 1];
    let mut upper_b = vec![0.0; n + 1];
    lower[..n].copy_from_slice(&bounds.lower);
    upper_b[..n].copy_from_slice(&bounds.upper);
    lower[n] = model.base.lower[n];
    upper_b[n] = model.base.upper[n];

    let objective_row = model.base.objective.clone();
    let mut dual = f64::NEG_INFINITY;
    let mut status = SolveStatus::GapLimit;
    for round in 0..max_rounds {
        if time_limit.is_some_and(|l| start.elapsed().as_secs_f64() >= l) {
            status = SolveStatus::TimeLimit;
            break;
        }
        let sol = milp.solve(&model, &objective_row, &lower, &upper_b, None)?;
        lmo_calls += 1;
        if sol.status == MilpStatus::Infeasible {
            // cuts are valid underestimators, so this can only mean the
            // region itself is empty
            return Ok(infeasible_outcome(log, lmo_calls, start.elapsed().as_secs_f64()));
        }
        let x_k: Vec<f64> = sol.point[..n].to_vec();
        let t_k = sol.point[n];
        dual = dual.max(t_k);
        let f_k = objective.eval(&x_k);
        if f_k < upper - 1e-12 && is_integer_feasible(&region, &bounds, &x_k) {
            upper = f_k;
            incumbent = x_k.clone();
            log.push(EventKind::Incumbent { value: upper, node: round as u64 });
        }
        log.push(EventKind::OaRound { round, primal: upper, dual });
        if upper - dual <= tolerance {
            status = SolveStatus::Optimal;
            break;
        }
        model.base.rows.push(gradient_cut(objective, &x_k));
        // t may need to exceed its previous cap once cuts accumulate
        upper_b[n] = upper + 1.0;
        model.base.upper[n] = upper_b[n];
    }
    if dual > upper {
        dual = upper;
    }
    let wall = start.elapsed().as_secs_f64();
    log.finish(
        match status {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::TimeLimit => "TimeLimit",
            _ => "GapLimit",
        },
        Some(upper),
        dual,
        lmo_calls,
        lmo_calls,
        wall,
    );
    Ok(SolveOutcome {
        status,
        incumbent: Some(incumbent),
        primal: upper,
        dual,
        nodes_processed: lmo_calls,
        total_lmo_calls: lmo_calls,
        log,
    })
}

struct BoxNode {
    id: u64,
    bounds: BoundState,
    bound: f64,
}

struct BoxEntry {
    bound: f64,
    id: u64,
}
impl PartialEq for BoxEntry {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for BoxEntry {}
impl PartialOrd for BoxEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for BoxEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then(other.id.cmp(&self.id))
    }
}

/// Pairwise Frank-Wolfe over the continuous relaxation of one box (plain FW
/// zigzags and stalls well above any useful node tolerance).
/// Returns (iterate, f, certified gap, lp solves) or None when empty.
fn continuous_node(
    objective: &Objective,
    region: &Region,
    bounds: &BoundState,
    eps: f64,
    max_iters: usize,
) -> Result<Option<(Vec<f64>, f64, f64, usize)>> {
    let mut lp = crate::lp::LpSolver::new();
    let zero = vec![0.0; region.dimension];
    let Some(x0) = relaxed_lmo(region, bounds, &zero, &mut lp)? else {
        return Ok(None);
    };
    let j_set = region.integer_indices.clone();
    let mut active = ActiveSet::singleton(x0.clone());
    let mut x = x0;
    let mut calls = 1usize;
    let mut l_est = 1.0;
    let mut gap = f64::INFINITY;
    for _ in 0..max_iters {
        let g = objective.grad(&x);
        let Some(w) = relaxed_lmo(region, bounds, &g, &mut lp)? else {
            return Ok(None);
        };
        calls += 1;
        gap = (dot(&g, &x) - dot(&g, &w)).max(0.0);
        if gap <= eps {
            break;
        }
        // away vertex: worst active vertex along the gradient
        let a_idx = active
            .vertices
            .iter()
            .enumerate()
            .max_by(|(_, u), (_, v)| dot(&g, u).total_cmp(&dot(&g, v)))
            .map(|(i, _)| i)
            .unwrap();
        let a = active.vertices[a_idx].clone();
        let d: Vec<f64> = a.iter().zip(&w).map(|(ai, wi)| ai - wi).collect();
        let gd = dot(&g, &d);
        if gd <= 0.0 {
            break;
        }
        let gamma_max = active.weights[a_idx];
        let (gamma, new_l) = adaptive_step(objective, &x, &d, gamma_max, l_est)?;
        l_est = new_l;
        active.weights[a_idx] -= gamma;
        if let Some(i) = active.position(&w, &j_set) {
            active.weights[i] += gamma;
        } else {
            active.vertices.push(w);
            active.weights.push(gamma);
        }
        if active.weights[a_idx] <= 1e-12 {
            active.vertices.swap_remove(a_idx);
            active.weights.swap_remove(a_idx);
        }
        x = active.iterate();
    }
    let f = objective.eval(&x);
    Ok(Some((x, f, gap, calls)))
}

/// Branch-and-bound with a box (not hull) node relaxation; the reference
/// point for node-count comparisons against the hull solver.
pub fn solve_nlp_bnb(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveOutcome> {
    instance.validate()?;
    let start = Instant::now();
    let mut log = new_log("nlp-bnb");
    let objective = &instance.objective;
    let region = instance.region();
    let j_set = &instance.integer_indices;
    let instance_bounds = instance.bounds();
    let node_eps = config.eps_min.max(1e-8);

    let mut heap = BinaryHeap::new();
    let mut open: Vec<BoxNode> = vec![BoxNode {
        id: 0,
        bounds: instance_bounds.clone(),
        bound: f64::NEG_INFINITY,
    }];
    heap.push(BoxEntry { bound: f64::NEG_INFINITY, id: 0 });
    let mut next_id = 1u64;
    let mut upper = f64::INFINITY;
    let mut incumbent: Option<Vec<f64>> = None;
    let mut lower = f64::NEG_INFINITY;
    let mut nodes_processed = 0usize;
    let mut lp_calls = 0usize;
    let mut status = SolveStatus::Optimal;

    while let Some(entry) = heap.pop() {
        let slot = open.iter().position(|n| n.id == entry.id).unwrap();
        let node = open.swap_remove(slot);
        if node.bound >= upper - 1e-12 {
            log.push(EventKind::NodePruned { id: node.id, bound: node.bound });
            continue;
        }
        if config.node_limit.is_some_and(|l| nodes_processed >= l) {
            status = SolveStatus::NodeLimit;
            break;
        }
        if config.time_limit.is_some_and(|l| start.elapsed().as_secs_f64() >= l) {
            status = SolveStatus::TimeLimit;
            break;
        }
        let Some((x_hat, f_hat, gap, calls)) =
            continuous_node(objective, &region, &node.bounds, node_eps, 5_000)?
        else {
            nodes_processed += 1;
            log.push(EventKind::NodeInfeasible { id: node.id });
            continue;
        };
        nodes_processed += 1;
        lp_calls += calls;
        let node_bound = (f_hat - gap).max(node.bound);
        log.push(EventKind::NodeSolved {
            id: node.id,
            depth: 0,
            f_hat,
            certified_gap: gap,
            node_bound,
            lower_bound: lower,
            upper_bound: upper,
            lmo_calls: calls,
            open_nodes: open.len(),
        });
        if node_bound >= upper - 1e-12 {
            log.push(EventKind::NodePruned { id: node.id, bound: node_bound });
        } else {
            let mut rounded = x_hat.clone();
            for &j in j_set {
                rounded[j] = rounded[j].round();
            }
            for cand in [&x_hat, &rounded] {
                let fc = objective.eval(cand);
                if fc < upper - 1e-12 && is_integer_feasible(&region, &instance_bounds, cand) {
                    upper = fc;
                    incumbent = Some(cand.clone());
                    log.push(EventKind::Incumbent { value: upper, node: node.id });
                }
            }
            let fractional: Vec<usize> = j_set
                .iter()
                .copied()
                .filter(|&j| (x_hat[j] - x_hat[j].round()).abs() > INT_TOL)
                .collect();
            let mut branch: Option<(usize, f64, f64)> = fractional
                .iter()
                .max_by(|&&a, &&b| {
                    let fa = x_hat[a] - x_hat[a].floor();
                    let fb = x_hat[b] - x_hat[b].floor();
                    fa.min(1.0 - fa)
                        .partial_cmp(&fb.min(1.0 - fb))
                        .unwrap_or(Ordering::Equal)
                        .then(b.cmp(&a))
                })
                .map(|&j| (j, x_hat[j].floor(), x_hat[j].ceil()));
            if branch.is_none() {
                // the relaxation may sit at an integral z without its
                // indicator row being enforced; dichotomize that z
                branch = region
                    .indicator_rows()
                    .iter()
                    .find(|ind| {
                        x_hat[ind.z] >= 1.0 - INT_TOL
                            && node.bounds.lower[ind.z] < 1.0 - INT_TOL
                            && ind.row.violation(&x_hat) > INT_TOL
                    })
                    .map(|ind| (ind.z, 0.0, 1.0));
            }
            if let Some((j, down_val, up_val)) = branch {
                let mut kids = [0u64; 2];
                for (k, down) in [true, false].into_iter().enumerate() {
                    let mut cb = node.bounds.clone();
                    if down {
                        cb.upper[j] = cb.upper[j].min(down_val);
                    } else {
                        cb.lower[j] = cb.lower[j].max(up_val);
                    }
                    if cb.is_empty() {
                        continue;
                    }
                    kids[k] = next_id;
                    heap.push(BoxEntry { bound: node_bound, id: next_id });
                    open.push(BoxNode { id: next_id, bounds: cb, bound: node_bound });
                    next_id += 1;
                }
                log.push(EventKind::Branched { node: node.id, variable: j, children: kids });
            }
        }
        let open_min = open.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
        lower = lower.max(open_min.min(upper));
        if nodes_processed > 0
            && upper.is_finite()
            && (upper - lower <= config.abs_gap_tolerance
                || upper - lower <= config.rel_gap_tolerance * upper.abs().max(1e-8))
        {
            break;
        }
    }
    if heap.is_empty() {
        lower = upper;
    }
    if incumbent.is_none() && status == SolveStatus::Optimal {
        return Ok(infeasible_outcome(log, lp_calls, start.elapsed().as_secs_f64()));
    }
    if status == SolveStatus::Optimal && upper - lower > config.abs_gap_tolerance {
        status = SolveStatus::GapLimit;
    }
    let wall = start.elapsed().as_secs_f64();
    log.finish(
        match status {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::GapLimit => "GapLimit",
            SolveStatus::NodeLimit => "NodeLimit",
            SolveStatus::TimeLimit => "TimeLimit",
            SolveStatus::Infeasible => "Infeasible",
        },
        if upper.is_finite() { Some(upper) } else { None },
        lower,
        nodes_processed,
        lp_calls,
        wall,
    );
    Ok(SolveOutcome {
        status,
        incumbent,
        primal: upper,
        dual: lower,
        nodes_processed,
        total_lmo_calls: lp_calls,
        log,
    })
}
