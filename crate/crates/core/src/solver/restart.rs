use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::problems::CompositeProblem;

use super::{ufgm_solve, RunResult, SolverConfig, StopReason, StopRule};

#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    /// Accuracy handed to UFGM in this epoch.
    pub epsilon: f64,
    pub iterations: usize,
    pub oracle_calls: u64,
    /// `F(z_n) + Ψ(z_n) − p*` at the epoch start.
    pub start_gap: f64,
    pub end_gap: f64,
}

#[derive(Debug, Clone)]
pub struct RestartResult {
    /// Concatenated run. Trace rows restart at `k = 0` in every epoch.
    pub run: RunResult,
    pub epochs: Vec<Epoch>,
}

/// Restarted UFGM: each epoch halves the accuracy and stops once the gap to
/// the known optimum reaches it. Needs `p*` on the problem.
///
/// `config.max_iters` caps each epoch; an epoch that hits it ends the run
/// with `StopReason::Budget`.
pub fn r_ufgm_solve(
    problem: &CompositeProblem,
    z0: Point,
    config: &SolverConfig,
    target_eps: f64,
) -> Result<RestartResult> {
    let p_star = problem
        .p_star()
        .ok_or_else(|| Error::config("problem.p_star", "restarted UFGM needs a known optimum"))?;
    if !(target_eps > 0.0 && target_eps.is_finite()) {
        return Err(Error::config("target_eps", "must be positive and finite"));
    }
    let obj0 = problem.objective(&z0)?;
    let gap0 = obj0 - p_star;
    let mut eps = 0.5 * gap0;
    let mut z = z0;
    let mut objective = obj0;
    let mut oracle_calls = 1;
    let mut objectives = vec![obj0];
    let mut trace = Vec::new();
    let mut epochs = Vec::new();
    let mut iterations = 0;
    let mut stop = StopReason::Converged;

    while 2.0 * eps > target_eps {
        let cfg = SolverConfig {
            epsilon: eps,
            stop_rule: StopRule::KnownOptimum { p_star, tol: eps },
            ..config.clone()
        };
        let r = ufgm_solve(problem, z.clone(), &cfg)?;
        epochs.push(Epoch {
            epsilon: eps,
            iterations: r.iterations,
            oracle_calls: r.oracle_calls,
            start_gap: objective - p_star,
            end_gap: r.objective - p_star,
        });
        iterations += r.iterations;
        oracle_calls += r.oracle_calls;
        objectives.extend_from_slice(&r.objectives[1..]);
        trace.extend_from_slice(&r.trace);
        z = r.y;
        objective = r.objective;
        if r.stop != StopReason::Converged {
            stop = r.stop;
            break;
        }
        eps *= 0.5;
    }

    Ok(RestartResult {
        run: RunResult {
            y: z,
            objective,
            iterations,
            oracle_calls,
            stop,
            trace,
            objectives,
        },
        epochs,
    })
}

/// `⌈log₂(gap₀/ε̃)⌉` epochs, or none if the start is already good enough.
pub fn expected_epochs(gap0: f64, target_eps: f64) -> usize {
    if gap0 <= target_eps {
        0
    } else {
        (gap0 / target_eps).log2().ceil() as usize
    }
}
