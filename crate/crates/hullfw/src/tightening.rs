//! Dual bound tightening: shrinking integer variable bounds from the node
//! gradient, the incumbent value, and the gap, plus the strong-convexity and
//! sharpness child lower bounds used while branching.

use serde::{Deserialize, Serialize};

use crate::blmo::BoundState;
use crate::error::SolverError;
use crate::objective::Sharpness;

const AT_BOUND_TOL: f64 = 1e-6;
const FRAC_TOL: f64 = 1e-6;

/// Everything captured at a relaxed node solution that the tightening rules
/// consume.
#[derive(Debug, Clone)]
pub struct TighteningContext {
    pub gradient: Vec<f64>,
    pub f_hat: f64,
    pub gap: f64,
    pub upper_bound: f64,
    pub mu: Option<f64>,
    pub sharpness: Option<Sharpness>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TighteningEvent {
    pub variable: usize,
    /// true when the upper bound moved down, false when the lower moved up
    pub upper: bool,
    pub old: f64,
    pub new: f64,
    /// whether the strong-convexity strengthening was in effect
    pub strengthened: bool,
}

/// Shrink integer bounds around a relaxed solution sitting at its bounds.
/// For j at its lower bound with nonnegative gradient, any point with
/// x_j >= l_j + M is dominated once M * grad_j exceeds the slack
/// UB - f_hat + gap (minus (mu/2) M^2 when mu is known), so the upper bound
/// drops to l_j + M - 1; symmetric at upper bounds. Bounds never loosen.
pub fn tighten_bounds(
    ctx: &TighteningContext,
    x_hat: &[f64],
    bounds: &BoundState,
    integer_indices: &[usize],
) -> (BoundState, Vec<TighteningEvent>) {
    let mut out = bounds.clone();
    let mut events = Vec::new();
    let slack = ctx.upper_bound - ctx.f_hat + ctx.gap;
    if !slack.is_finite() {
        return (out, events);
    }
    let margin = 1e-7 * (1.0 + slack.abs());
    let mu = ctx.mu.unwrap_or(0.0);
    for &j in integer_indices {
        let (l, u) = (bounds.lower[j], bounds.upper[j]);
        let range = (u - l).floor();
        if range < 1.0 {
            continue;
        }
        let g = ctx.gradient[j];
        if (x_hat[j] - l).abs() <= AT_BOUND_TOL && g >= 0.0 {
            if let Some(m) = first_violating_m(g, mu, slack, margin, range as u64) {
                let new_u = l + (m - 1) as f64;
                if new_u < out.upper[j] {
                    events.push(TighteningEvent {
                        variable: j,
                        upper: true,
                        old: out.upper[j],
                        new: new_u,
                        strengthened: mu > 0.0,
                    });
                    out.upper[j] = new_u;
                }
            }
        } else if (x_hat[j] - u).abs() <= AT_BOUND_TOL && g <= 0.0 {
            if let Some(m) = first_violating_m(-g, mu, slack, margin, range as u64) {
                let new_l = u - (m - 1) as f64;
                if new_l > out.lower[j] {
                    events.push(TighteningEvent {
                        variable: j,
                        upper: false,
                        old: out.lower[j],
                        new: new_l,
                        strengthened: mu > 0.0,
                    });
                    out.lower[j] = new_l;
                }
            }
        }
    }
    (out, events)
}

fn first_violating_m(g: f64, mu: f64, slack: f64, margin: f64, range: u64) -> Option<u64> {
    // left side grows and right side shrinks with m, so scan from 1
    for m in 1..=range {
        let mf = m as f64;
        if mf * g > slack - 0.5 * mu * mf * mf + margin {
            return Some(m);
        }
    }
    None
}

/// Lower bound for a child created by rounding variable `branch_j` down or
/// up, from strong convexity: the child optimum moves at least the rounding
/// distance away in coordinate j and every other fractional coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchDirection {
    Down,
    Up,
}

pub fn strong_convexity_node_bound(
    ctx: &TighteningContext,
    x_hat: &[f64],
    branch_j: usize,
    direction: BranchDirection,
    integer_indices: &[usize],
) -> Result<f64, SolverError> {
    let mu = ctx
        .mu
        .ok_or_else(|| SolverError::Unsupported("strong convexity parameter not available".into()))?;
    let xj = x_hat[branch_j];
    let dist = match direction {
        BranchDirection::Down => xj - xj.floor(),
        BranchDirection::Up => xj.ceil() - xj,
    };
    let mut rounding = 0.0;
    for &k in integer_indices {
        if k == branch_j {
            continue;
        }
        let frac = x_hat[k] - x_hat[k].floor();
        if frac > FRAC_TOL && frac < 1.0 - FRAC_TOL {
            let d = frac.min(1.0 - frac);
            rounding += d * d;
        }
    }
    Ok(ctx.f_hat + 0.5 * mu * dist * dist + 0.5 * mu * rounding - ctx.gap)
}

/// Lower bound for a child from a Hölder error bound around the (assumed
/// unique) optimum: valid when `dist_lower` under-estimates the distance
/// from x_hat to the child's optimum.
pub fn sharpness_node_bound(
    ctx: &TighteningContext,
    dist_lower: f64,
) -> Result<f64, SolverError> {
    let s = ctx
        .sharpness
        .ok_or_else(|| SolverError::Unsupported("sharpness parameters not available".into()))?;
    let base = ctx.f_hat - ctx.gap;
    if s.theta <= 0.0 {
        return Ok(base);
    }
    let inner = dist_lower - s.big_m * ctx.gap.powf(s.theta);
    if inner <= 0.0 {
        return Ok(base);
    }
    Ok(s.big_m.powf(-1.0 / s.theta) * inner.powf(1.0 / s.theta) + base)
}

/// Re-apply the root-node tightening with an improved incumbent value; the
/// result is valid for the whole tree.
pub fn global_tightening(
    root_ctx: &TighteningContext,
    root_x: &[f64],
    new_upper_bound: f64,
    global_bounds: &BoundState,
    integer_indices: &[usize],
) -> (BoundState, Vec<TighteningEvent>) {
    let ctx = TighteningContext { upper_bound: new_upper_bound, ..root_ctx.clone() };
    tighten_bounds(&ctx, root_x, global_bounds, integer_indices)
}
