//! UFGM, its restarted variant, and the subgradient / dual-averaging baselines.

mod baselines;
mod restart;
mod ufgm;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

pub use baselines::{rda_solve, subgradient_solve, RdaSchedule};
pub use restart::{expected_epochs, r_ufgm_solve, Epoch, RestartResult};
pub use ufgm::{solve_a, ufgm_solve, SolverState, Ufgm, DESCENT_SLACK};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StopRule {
    /// Stop once `F(y_k) + Ψ(y_k) − p_star ≤ tol`.
    KnownOptimum { p_star: f64, tol: f64 },
    /// Stop once the certified gap `F(y_k) + Ψ(y_k) − (φ_k* − d)/A_k ≤ ε`,
    /// where `d ≥ ξ(x0, x*)` is supplied by the caller.
    Certificate { d: f64 },
    /// Run until `max_iters`.
    Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub epsilon: f64,
    #[serde(default = "default_l0")]
    pub l0: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_max_doublings")]
    pub max_doublings: u32,
    #[serde(default = "default_stop_rule")]
    pub stop_rule: StopRule,
}

fn default_l0() -> f64 {
    1.0
}

fn default_max_iters() -> usize {
    10_000
}

fn default_max_doublings() -> u32 {
    60
}

fn default_stop_rule() -> StopRule {
    StopRule::Budget
}

impl SolverConfig {
    pub fn new(epsilon: f64) -> Self {
        SolverConfig {
            epsilon,
            l0: default_l0(),
            max_iters: default_max_iters(),
            max_doublings: default_max_doublings(),
            stop_rule: default_stop_rule(),
        }
    }

    pub fn l0(mut self, l0: f64) -> Self {
        self.l0 = l0;
        self
    }

    pub fn max_iters(mut self, n: usize) -> Self {
        self.max_iters = n;
        self
    }

    pub fn max_doublings(mut self, n: u32) -> Self {
        self.max_doublings = n;
        self
    }

    pub fn stop_rule(mut self, rule: StopRule) -> Self {
        self.stop_rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config("epsilon", "must be positive and finite"));
        }
        if !(self.l0 > 0.0 && self.l0.is_finite()) {
            return Err(Error::config("l0", "must be positive and finite"));
        }
        if self.max_doublings < 1 {
            return Err(Error::config("max_doublings", "must be at least 1"));
        }
        match self.stop_rule {
            StopRule::KnownOptimum { p_star, tol } => {
                if !p_star.is_finite() {
                    return Err(Error::config("stop_rule.p_star", "must be finite"));
                }
                if !(tol > 0.0) {
                    return Err(Error::config("stop_rule.tol", "must be positive"));
                }
            }
            StopRule::Certificate { d } => {
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(Error::config("stop_rule.d", "must be finite and nonnegative"));
                }
            }
            StopRule::Budget => {}
        }
        Ok(())
    }
}

/// One UFGM iteration. Row `k = 0` describes the starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    /// Number of doublings of `L_k` before the descent test passed.
    pub i_k: u32,
    /// `A_k`
    pub weight_sum: f64,
    /// `a_k`
    pub weight: f64,
    /// `L_k`
    pub l_est: f64,
    pub tau: f64,
    /// `F(y_k) + Ψ(y_k)`
    pub objective: f64,
    /// `φ_k* = min_Q φ_k`
    pub phi_star: f64,
    /// `F(y_k) + Ψ(y_k) − φ_k*/A_k`, infinite at `k = 0`.
    pub cert_gap: f64,
    pub oracle_calls: u64,
    pub wall_ns: u64,
}

impl TraceRecord {
    /// `A_k(F(y_k) + Ψ(y_k) − ε/2) ≤ φ_k*`, up to `rel_slack·max(1, |φ_k*|, |lhs|)`.
    pub fn certificate_holds(&self, epsilon: f64, rel_slack: f64) -> bool {
        let lhs = self.weight_sum * (self.objective - 0.5 * epsilon);
        lhs <= self.phi_star + rel_slack * 1f64.max(self.phi_star.abs()).max(lhs.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StopReason {
    Converged,
    Budget,
    Error(String),
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::Converged => write!(f, "converged"),
            StopReason::Budget => write!(f, "budget"),
            StopReason::Error(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// Final reported iterate.
    pub y: Point,
    pub objective: f64,
    pub iterations: usize,
    pub oracle_calls: u64,
    pub stop: StopReason,
    /// UFGM trace; empty for the baselines.
    pub trace: Vec<TraceRecord>,
    /// Objective at the reported iterate, index 0 being the start point.
    pub objectives: Vec<f64>,
}

impl RunResult {
    /// Running minimum of `objectives`.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.objectives
            .iter()
            .scan(f64::INFINITY, |best, v| {
                *best = best.min(*v);
                Some(*best)
            })
            .collect()
    }

    /// First iteration whose objective is within `tol` of `p_star`.
    pub fn first_within(&self, p_star: f64, tol: f64) -> Option<usize> {
        self.objectives.iter().position(|v| v - p_star <= tol)
    }
}
