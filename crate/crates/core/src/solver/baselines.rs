use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::geometry::{composite_step, model_argmin, Point};
use crate::linalg::axpy;
use crate::problems::CompositeProblem;

use super::{RunResult, StopReason};

/// Projected subgradient method with steps `c/(k+1)`.
///
/// A step that fails (typically a diverging iterate overflowing) ends the run
/// with `StopReason::Error`; the objectives seen so far are kept.
pub fn subgradient_solve(problem: &CompositeProblem, x0: Point, c: f64, iters: usize) -> Result<RunResult> {
    check_dim(problem.dim(), x0.len())?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(crate::error::Error::invalid("c", "must be positive and finite"));
    }
    let geometry = problem.geometry();
    let simple = problem.simple();
    let mut x = x0;
    let mut e = problem.evaluate(&x)?;
    let mut objectives = vec![e.value + simple.value(&x)];
    for k in 0..iters {
        let next = composite_step(geometry, simple, &x, &e.subgradient, c / (k + 1) as f64)
            .and_then(|x| Ok((problem.evaluate(&x)?, x)));
        match next {
            Ok((ev, xn)) => {
                objectives.push(ev.value + simple.value(&xn));
                x = xn;
                e = ev;
            }
            Err(err) => return Ok(finish(x, objectives, StopReason::Error(err.to_string()))),
        }
    }
    Ok(finish(x, objectives, StopReason::Budget))
}

/// Weight schedule `λ_k` for regularized dual averaging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RdaSchedule {
    /// `λ_k = 1`
    Short,
    /// `λ_k = k`
    Medium,
    /// `λ_k = k²`
    Long,
}

impl RdaSchedule {
    pub fn weight(self, k: usize) -> f64 {
        let k = k as f64;
        match self {
            RdaSchedule::Short => 1.0,
            RdaSchedule::Medium => k,
            RdaSchedule::Long => k * k,
        }
    }
}

/// Dual averaging with `β_k = √k`:
/// `x_{k+1} = argmin_Q ξ(x0, x) + ⟨Σλ_i g_i, x⟩/β_k + (Σλ_i/β_k)·Ψ(x)`.
///
/// The growing schedules can diverge on strongly convex objectives; as in
/// [`subgradient_solve`], a failing step ends the run with `StopReason::Error`.
pub fn rda_solve(problem: &CompositeProblem, x0: Point, schedule: RdaSchedule, iters: usize) -> Result<RunResult> {
    check_dim(problem.dim(), x0.len())?;
    let geometry = problem.geometry();
    let simple = problem.simple();
    let mut x = x0.clone();
    let mut e = problem.evaluate(&x)?;
    let mut objectives = vec![e.value + simple.value(&x)];
    let mut g_sum = vec![0.0; x.len()];
    let mut lambda_sum = 0.0;
    for k in 1..=iters {
        let lambda = schedule.weight(k);
        axpy(lambda, &e.subgradient, &mut g_sum);
        lambda_sum += lambda;
        let beta = (k as f64).sqrt();
        let scaled: Vec<f64> = g_sum.iter().map(|g| g / beta).collect();
        let next = model_argmin(geometry, simple, &x0, &scaled, lambda_sum / beta)
            .and_then(|(x, _)| Ok((problem.evaluate(&x)?, x)));
        match next {
            Ok((ev, xn)) => {
                objectives.push(ev.value + simple.value(&xn));
                x = xn;
                e = ev;
            }
            Err(err) => return Ok(finish(x, objectives, StopReason::Error(err.to_string()))),
        }
    }
    Ok(finish(x, objectives, StopReason::Budget))
}

fn finish(y: Point, objectives: Vec<f64>, stop: StopReason) -> RunResult {
    let iters = objectives.len() - 1;
    RunResult {
        y,
        objective: *objectives.last().expect("start point is always recorded"),
        iterations: iters,
        oracle_calls: iters as u64 + 1,
        stop,
        trace: Vec::new(),
        objectives,
    }
}
