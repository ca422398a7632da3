//! Universal fast gradient method for heterogeneous sums.
//!
//! Minimizes `F(x) + Ψ(x)` over a simple set `Q`, where `F = Σ f_j` and each
//! summand is Hölder smooth with its own `(M_j, v_j)`. The solver only sees
//! `(F(x), ∇F(x))` and a target accuracy; it never reads the Hölder data.
//! The [`theory`] module evaluates the matching iteration bounds so runs can
//! be checked against them.
//!
//! * [`geometry`]: Bregman distance and the closed-form prox subproblems.
//! * [`problems`]: oracles, composite problems, data generation and loading.
//! * [`solver`]: UFGM, the restarted variant, and two baselines.
//! * [`theory`]: rate bounds, root finders, and recurrence simulators.
//! * [`harness`]: experiment configs, trace files, and reports.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod problems;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};
pub use geometry::{Constraint, Geometry, Point, Regularizer, SimpleTerm};
pub use problems::{CompositeProblem, FirstOrderEval, Oracle, SummandSpec};
pub use solver::{RunResult, SolverConfig, StopReason, StopRule, TraceRecord};
