//! Outer branch-and-bound over the integer hull: best-bound node selection,
//! warm-started node relaxations, adaptive gap tolerances, dual tightening,
//! and vertex-set partitioning into children.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::blmo::{is_integer_feasible, lmo, relaxed_lmo, BoundState, Region};
use crate::bpcg::{
    adaptive_step, solve_node, ActiveSet, NodeSolveParams, ShadowSet, Termination,
};
use crate::error::SolverError;
use crate::harness::{EventKind, RunHeader, RunLog};
use crate::lp::{dot, LpSolver};
use crate::milp::{MilpSolver, INT_TOL};
use crate::objective::{Objective, ProblemInstance};
use crate::tightening::{
    global_tightening, strong_convexity_node_bound, tighten_bounds, BranchDirection,
    TighteningContext,
};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum BranchingStrategy {
    MostFractional,
    PartialStrong { iters: usize, eps: f64 },
    Hybrid { depth_limit: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// absolute primal-dual gap tolerance
    pub abs_gap_tolerance: f64,
    /// relative gap tolerance; the solver stops on either
    pub rel_gap_tolerance: f64,
    /// node gap tolerance schedule eps0 * rho^depth, floored at eps_min
    pub eps0: f64,
    pub rho: f64,
    pub eps_min: f64,
    pub branching: BranchingStrategy,
    pub laziness_k: f64,
    pub tree_state_threshold: Option<usize>,
    pub use_local_tightening: bool,
    pub use_global_tightening: bool,
    pub use_strong_convexity: bool,
    pub use_shadow_set: bool,
    pub use_warm_start: bool,
    pub certify_node_gaps: bool,
    pub node_limit: Option<usize>,
    pub time_limit: Option<f64>,
    pub trace_iterations: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let delta = 1e-6;
        SolverConfig {
            abs_gap_tolerance: delta,
            rel_gap_tolerance: 1e-4,
            eps0: 1e-2,
            rho: 0.9,
            eps_min: delta / 2.0,
            branching: BranchingStrategy::MostFractional,
            laziness_k: 2.0,
            tree_state_threshold: None,
            use_local_tightening: true,
            use_global_tightening: true,
            use_strong_convexity: false,
            use_shadow_set: true,
            use_warm_start: true,
            certify_node_gaps: true,
            node_limit: None,
            time_limit: None,
            trace_iterations: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    GapLimit,
    NodeLimit,
    TimeLimit,
    Infeasible,
}

#[derive(Debug)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub incumbent: Option<Vec<f64>>,
    pub primal: f64,
    pub dual: f64,
    pub nodes_processed: usize,
    pub total_lmo_calls: usize,
    pub log: RunLog,
}

struct Node {
    id: u64,
    depth: usize,
    bounds: BoundState,
    warm_active: ActiveSet,
    warm_shadow: ShadowSet,
    /// inherited parent bound; the heap priority
    bound: f64,
    /// possibly stronger child bound used for pruning and LB only
    prune_bound: f64,
}

struct HeapEntry {
    bound: f64,
    id: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap: reverse for best-bound, ties to lowest id
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then(other.id.cmp(&self.id))
    }
}

/// True iff at least `threshold` open nodes carry a bound below the node
/// currently being processed; used to abandon a node whose subtree has
/// become unpromising.
pub fn tree_state_probe(open_bounds: &[f64], current_dual: f64, threshold: usize) -> bool {
    open_bounds.iter().filter(|b| **b < current_dual).count() >= threshold
}

/// Split active and shadow vertices by the branch value of coordinate j;
/// weights are renormalized on each side.
pub fn partition_vertices(
    active: &ActiveSet,
    shadow: &ShadowSet,
    j: usize,
    split: (f64, f64),
) -> ((ActiveSet, ShadowSet), (ActiveSet, ShadowSet)) {
    let (floor_val, ceil_val) = split;
    let mut left = ActiveSet::default();
    let mut right = ActiveSet::default();
    for (v, w) in active.vertices.iter().zip(&active.weights) {
        if v[j] <= floor_val + INT_TOL {
            left.vertices.push(v.clone());
            left.weights.push(*w);
        } else {
            debug_assert!(v[j] >= ceil_val - INT_TOL);
            right.vertices.push(v.clone());
            right.weights.push(*w);
        }
    }
    left.renormalize();
    right.renormalize();
    let mut sl = ShadowSet::default();
    let mut sr = ShadowSet::default();
    for v in &shadow.vertices {
        if v[j] <= floor_val + INT_TOL {
            sl.vertices.push(v.clone());
        } else {
            sr.vertices.push(v.clone());
        }
    }
    ((left, sl), (right, sr))
}

fn fractional_candidates(x_hat: &[f64], integer_indices: &[usize]) -> Vec<usize> {
    integer_indices
        .iter()
        .copied()
        .filter(|&j| (x_hat[j] - x_hat[j].round()).abs() > INT_TOL)
        .collect()
}

pub struct BranchContext<'a> {
    pub objective: &'a Objective,
    pub region: &'a Region,
    pub bounds: &'a BoundState,
    pub depth: usize,
}

pub fn select_branch_variable(
    x_hat: &[f64],
    integer_indices: &[usize],
    strategy: &BranchingStrategy,
    ctx: &BranchContext,
) -> Result<usize, SolverError> {
    let candidates = fractional_candidates(x_hat, integer_indices);
    if candidates.is_empty() {
        return Err(SolverError::Argument("no fractional integer variable".into()));
    }
    match strategy {
        BranchingStrategy::MostFractional => Ok(most_fractional(x_hat, &candidates)),
        BranchingStrategy::PartialStrong { iters, eps } => {
            partial_strong(x_hat, &candidates, ctx, *iters, *eps)
        }
        BranchingStrategy::Hybrid { depth_limit } => {
            if ctx.depth < *depth_limit {
                partial_strong(x_hat, &candidates, ctx, 10, 1e-4)
            } else {
                Ok(most_fractional(x_hat, &candidates))
            }
        }
    }
}

fn most_fractional(x_hat: &[f64], candidates: &[usize]) -> usize {
    let mut best = candidates[0];
    let mut best_score = -1.0;
    for &j in candidates {
        let frac = x_hat[j] - x_hat[j].floor();
        let score = frac.min(1.0 - frac);
        if score > best_score + 1e-12 {
            best_score = score;
            best = j;
        }
    }
    best
}

fn partial_strong(
    x_hat: &[f64],
    candidates: &[usize],
    ctx: &BranchContext,
    iters: usize,
    eps: f64,
) -> Result<usize, SolverError> {
    let mut best = candidates[0];
    let mut best_score = f64::NEG_INFINITY;
    for &j in candidates {
        let mut worst_child = f64::INFINITY;
        for dir in [BranchDirection::Down, BranchDirection::Up] {
            let mut child = ctx.bounds.clone();
            match dir {
                BranchDirection::Down => child.upper[j] = x_hat[j].floor(),
                BranchDirection::Up => child.lower[j] = x_hat[j].ceil(),
            }
            let bound = continuous_fw_bound(ctx.objective, ctx.region, &child, iters, eps)?;
            worst_child = worst_child.min(bound);
        }
        if worst_child > best_score + 1e-12 {
            best_score = worst_child;
            best = j;
        }
    }
    Ok(best)
}

/// Dual bound for a box from a few Frank-Wolfe iterations over the
/// continuous relaxation; +inf when the relaxation is empty.
pub fn continuous_fw_bound(
    objective: &Objective,
    region: &Region,
    bounds: &BoundState,
    iters: usize,
    eps: f64,
) -> Result<f64, SolverError> {
    let mut lp = LpSolver::new();
    let zero = vec![0.0; region.dimension];
    let Some(mut x) = relaxed_lmo(region, bounds, &zero, &mut lp)? else {
        return Ok(f64::INFINITY);
    };
    let mut l_est = 1.0;
    let mut best = f64::NEG_INFINITY;
    for _ in 0..iters.max(1) {
        let g = objective.grad(&x);
        let Some(v) = relaxed_lmo(region, bounds, &g, &mut lp)? else {
            return Ok(f64::INFINITY);
        };
        let gap = (dot(&g, &x) - dot(&g, &v)).max(0.0);
        best = best.max(objective.eval(&x) - gap);
        if gap <= eps {
            break;
        }
        let d: Vec<f64> = x.iter().zip(&v).map(|(xi, vi)| xi - vi).collect();
        let (gamma, new_l) = adaptive_step(objective, &x, &d, 1.0, l_est)?;
        l_est = new_l;
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi -= gamma * di;
        }
    }
    Ok(best)
}

pub fn solve(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveOutcome, SolverError> {
    instance.validate()?;
    let start = Instant::now();
    let mut log = RunLog::new(RunHeader {
        instance: String::new(),
        solver: "hullfw".into(),
        config_hash: String::new(),
        seed: 0,
    });
    let objective = &instance.objective;
    let region = instance.region();
    let j_set = instance.integer_indices.clone();
    let mut milp = MilpSolver::new();
    let mut global_bounds = instance.bounds();
    let instance_bounds = instance.bounds();

    // root vertex from a zero-direction oracle call
    let zero = vec![0.0; instance.dimension];
    let mut total_lmo = 1usize;
    let Some(x0) = lmo(&region, &global_bounds, &zero, &mut milp, None)? else {
        log.finish("Infeasible", None, f64::INFINITY, 0, 1, start.elapsed().as_secs_f64());
        return Ok(SolveOutcome {
            status: SolveStatus::Infeasible,
            incumbent: None,
            primal: f64::INFINITY,
            dual: f64::INFINITY,
            nodes_processed: 0,
            total_lmo_calls: 1,
            log,
        });
    };
    let mut upper = objective.eval(&x0);
    let mut incumbent = Some(x0.clone());
    log.push(EventKind::Incumbent { value: upper, node: 0 });

    let mut nodes: Vec<Node> = vec![Node {
        id: 0,
        depth: 0,
        bounds: global_bounds.clone(),
        warm_active: ActiveSet::singleton(x0),
        warm_shadow: ShadowSet::default(),
        bound: f64::NEG_INFINITY,
        prune_bound: f64::NEG_INFINITY,
    }];
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry { bound: f64::NEG_INFINITY, id: 0 });
    let mut next_id: u64 = 1;
    let mut lower = f64::NEG_INFINITY;
    let mut nodes_processed = 0usize;
    let mut root_ctx: Option<(TighteningContext, Vec<f64>)> = None;
    let mut status = SolveStatus::Optimal;

    'outer: loop {
        let Some(entry) = heap.pop() else {
            lower = upper;
            break;
        };
        let slot = nodes.iter().position(|n| n.id == entry.id).unwrap();
        let mut node = nodes.swap_remove(slot);
        if node.prune_bound >= upper - 1e-12 {
            log.push(EventKind::NodePruned { id: node.id, bound: node.prune_bound });
            continue;
        }
        if let Some(limit) = config.node_limit {
            if nodes_processed >= limit {
                status = SolveStatus::NodeLimit;
                break;
            }
        }
        if let Some(limit) = config.time_limit {
            if start.elapsed().as_secs_f64() >= limit {
                status = SolveStatus::TimeLimit;
                break;
            }
        }

        node.bounds.intersect(&global_bounds);
        if node.bounds.is_empty() {
            log.push(EventKind::NodeInfeasible { id: node.id });
            continue;
        }
        let eps_depth = (config.eps0 * config.rho.powi(node.depth as i32)).max(config.eps_min);
        let (warm_active, warm_shadow) = if config.use_warm_start {
            (std::mem::take(&mut node.warm_active), std::mem::take(&mut node.warm_shadow))
        } else {
            (ActiveSet::default(), ShadowSet::default())
        };
        let open_bounds: Vec<f64> = nodes.iter().map(|n| n.bound).collect();
        let deadline = config.time_limit.map(|l| (start, l));
        let threshold = config.tree_state_threshold;
        let mut probe = move |current_dual: f64| -> bool {
            if let Some((s, l)) = deadline {
                if s.elapsed().as_secs_f64() >= l {
                    return true;
                }
            }
            threshold.is_some_and(|t| tree_state_probe(&open_bounds, current_dual, t))
        };
        let mut trace = Vec::new();
        let res = solve_node(
            objective,
            &region,
            &node.bounds,
            warm_active,
            warm_shadow,
            &mut milp,
            NodeSolveParams {
                eps_tol: eps_depth,
                primal_cutoff: upper,
                laziness_k: config.laziness_k,
                certify_gap: config.certify_node_gaps,
                use_shadow_set: config.use_shadow_set,
                tree_state_probe: Some(&mut probe),
                trace: if config.trace_iterations { Some(&mut trace) } else { None },
            },
        )?;
        nodes_processed += 1;
        let Some(res) = res else {
            log.push(EventKind::NodeInfeasible { id: node.id });
            update_lower(&mut lower, upper, &nodes);
            if termination_reached(upper, lower, config, nodes_processed) {
                break;
            }
            continue;
        };
        total_lmo += res.lmo_calls;
        if config.trace_iterations && !trace.is_empty() {
            log.push(EventKind::NodeTrace { node: node.id, records: trace });
        }
        if res.termination == Termination::TreeState
            && config
                .time_limit
                .is_some_and(|l| start.elapsed().as_secs_f64() >= l)
        {
            // put the node back so the summary stays truthful, then stop
            nodes.push(node);
            status = SolveStatus::TimeLimit;
            break 'outer;
        }

        let node_dual = (res.f_hat - res.certified_gap).max(node.bound);
        let x_hat = res.iterate.clone();
        let ctx = TighteningContext {
            gradient: objective.grad(&x_hat),
            f_hat: res.f_hat,
            gap: res.certified_gap,
            upper_bound: upper,
            mu: objective.strong_convexity_mu,
            sharpness: objective.sharpness,
        };
        if node.id == 0 {
            root_ctx = Some((ctx.clone(), x_hat.clone()));
        }

        // incumbent candidates: oracle vertices, active and shadow vertices,
        // and one rounding probe of the relaxed solution
        let mut improved = false;
        let consider = |v: &[f64], upper: &mut f64, incumbent: &mut Option<Vec<f64>>| {
            let fv = objective.eval(v);
            if fv < *upper - 1e-12 && is_integer_feasible(&region, &instance_bounds, v) {
                *upper = fv;
                *incumbent = Some(v.to_vec());
                return true;
            }
            false
        };
        for (v, _) in &res.incumbents {
            improved |= consider(v, &mut upper, &mut incumbent);
        }
        for v in res.active.vertices.iter().chain(&res.shadow.vertices) {
            improved |= consider(v, &mut upper, &mut incumbent);
        }
        let mut rounded = x_hat.clone();
        for &j in &j_set {
            rounded[j] = rounded[j].round();
        }
        improved |= consider(&rounded, &mut upper, &mut incumbent);
        if improved {
            log.push(EventKind::Incumbent { value: upper, node: node.id });
            if config.use_global_tightening {
                if let Some((rctx, rx)) = &root_ctx {
                    let (gb, events) =
                        global_tightening(rctx, rx, upper, &global_bounds, &j_set);
                    if !events.is_empty() {
                        log.push(EventKind::Tightening { node: node.id, global: true, events });
                    }
                    global_bounds = gb;
                }
            }
        }

        log.push(EventKind::NodeSolved {
            id: node.id,
            depth: node.depth,
            f_hat: res.f_hat,
            certified_gap: res.certified_gap,
            node_bound: node_dual,
            lower_bound: lower,
            upper_bound: upper,
            lmo_calls: res.lmo_calls,
            open_nodes: nodes.len(),
        });

        let fractional = fractional_candidates(&x_hat, &j_set);
        // an integral node may only be dropped once its residual gap fits in
        // the final tolerance; a looser gap could still hide a better point
        let closed = fractional.is_empty() && res.certified_gap <= config.abs_gap_tolerance;
        if !closed && node_dual < upper - 1e-12 {
            // local tightening, then branch
            let mut node_bounds = node.bounds.clone();
            if config.use_local_tightening {
                let (nb, events) = tighten_bounds(&ctx, &x_hat, &node_bounds, &j_set);
                if !events.is_empty() {
                    log.push(EventKind::Tightening { node: node.id, global: false, events });
                }
                node_bounds = nb;
            }
            if fractional.is_empty() {
                // integral but the node gap is still loose: re-queue the same
                // box with a tighter warm start rather than branching
                let child = Node {
                    id: next_id,
                    depth: node.depth + 1,
                    bounds: node_bounds,
                    warm_active: res.active,
                    warm_shadow: res.shadow,
                    bound: node_dual,
                    prune_bound: node_dual,
                };
                heap.push(HeapEntry { bound: child.bound, id: child.id });
                next_id += 1;
                nodes.push(child);
            } else {
                let bctx = BranchContext {
                    objective,
                    region: &region,
                    bounds: &node_bounds,
                    depth: node.depth,
                };
                let j = select_branch_variable(&x_hat, &j_set, &config.branching, &bctx)?;
                let floor_val = x_hat[j].floor();
                let ceil_val = x_hat[j].ceil();
                let ((la, ls), (ra, rs)) =
                    partition_vertices(&res.active, &res.shadow, j, (floor_val, ceil_val));
                let sides = [
                    (BranchDirection::Down, floor_val, la, ls),
                    (BranchDirection::Up, ceil_val, ra, rs),
                ];
                let mut child_ids = [0u64; 2];
                for (k, (dir, val, wa, ws)) in sides.into_iter().enumerate() {
                    let mut cb = node_bounds.clone();
                    match dir {
                        BranchDirection::Down => cb.upper[j] = cb.upper[j].min(val),
                        BranchDirection::Up => cb.lower[j] = cb.lower[j].max(val),
                    }
                    if cb.is_empty() {
                        continue;
                    }
                    let mut prune_bound = node_dual;
                    if config.use_strong_convexity && ctx.mu.is_some() {
                        if let Ok(sc) =
                            strong_convexity_node_bound(&ctx, &x_hat, j, dir, &j_set)
                        {
                            prune_bound = prune_bound.max(sc);
                        }
                    }
                    if prune_bound >= upper - 1e-12 {
                        log.push(EventKind::NodePruned { id: next_id, bound: prune_bound });
                        next_id += 1;
                        continue;
                    }
                    let child = Node {
                        id: next_id,
                        depth: node.depth + 1,
                        bounds: cb,
                        warm_active: wa,
                        warm_shadow: ws,
                        bound: node_dual,
                        prune_bound,
                    };
                    child_ids[k] = child.id;
                    heap.push(HeapEntry { bound: child.bound, id: child.id });
                    next_id += 1;
                    nodes.push(child);
                }
                log.push(EventKind::Branched {
                    node: node.id,
                    variable: j,
                    children: child_ids,
                });
            }
        }

        update_lower(&mut lower, upper, &nodes);
        if termination_reached(upper, lower, config, nodes_processed) {
            break;
        }
    }

    if lower > upper {
        lower = upper;
    }
    if status == SolveStatus::Optimal && upper - lower > config.abs_gap_tolerance {
        if upper.is_finite() {
            status = SolveStatus::GapLimit;
        }
    }
    let primal = upper;
    log.finish(
        match status {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::GapLimit => "GapLimit",
            SolveStatus::NodeLimit => "NodeLimit",
            SolveStatus::TimeLimit => "TimeLimit",
            SolveStatus::Infeasible => "Infeasible",
        },
        if primal.is_finite() { Some(primal) } else { None },
        lower,
        nodes_processed,
        total_lmo,
        start.elapsed().as_secs_f64(),
    );
    Ok(SolveOutcome {
        status,
        incumbent,
        primal,
        dual: lower,
        nodes_processed,
        total_lmo_calls: total_lmo,
        log,
    })
}

fn update_lower(lower: &mut f64, upper: f64, open: &[Node]) {
    let open_min = open.iter().map(|n| n.prune_bound).fold(f64::INFINITY, f64::min);
    let cand = open_min.min(upper);
    if cand > *lower {
        *lower = cand;
    }
}

fn termination_reached(
    upper: f64,
    lower: f64,
    config: &SolverConfig,
    nodes_processed: usize,
) -> bool {
    if nodes_processed == 0 || !upper.is_finite() {
        return false;
    }
    let gap = upper - lower;
    gap <= config.abs_gap_tolerance
        || gap <= config.rel_gap_tolerance * upper.abs().max(1e-8)
}
