//! Mixed-integer convex solver.
//!
//! Branch-and-bound over the integer hull of the feasible set: each node's
//! convex relaxation is solved by a lazy Blended Pairwise Conditional
//! Gradient whose linear minimization oracle is a bounded mixed-integer
//! linear solver. Ships with its own LP/MILP engines, dual bound tightening,
//! branching strategies, problem generators, two baseline solvers, and a
//! benchmark harness.

pub mod baselines;
pub mod blmo;
pub mod bpcg;
pub mod bruteforce;
pub mod error;
pub mod harness;
pub(crate) mod la;
pub mod lp;
pub mod milp;
pub mod objective;
pub mod tightening;
pub mod tree;

pub use error::{Result, SolverError};
