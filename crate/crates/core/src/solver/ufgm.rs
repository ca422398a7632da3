use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{composite_step, model_argmin, Point};
use crate::linalg::{axpy, dist_sq, dot, lerp};
use crate::problems::CompositeProblem;

use super::{RunResult, SolverConfig, StopReason, StopRule, TraceRecord};

/// Absolute-relative slack added to the right side of the descent test to
/// absorb rounding: `DESCENT_SLACK·(1 + |F(x)|)`.
pub const DESCENT_SLACK: f64 = 1e-12;

const L_FLOOR: f64 = 1e-300;

/// Positive root of `L·a² = A + a`.
pub fn solve_a(big_a: f64, l_hat: f64) -> Result<f64> {
    if !(big_a >= 0.0 && big_a.is_finite()) {
        return Err(Error::invalid("A", "must be finite and nonnegative"));
    }
    if !(l_hat > 0.0 && l_hat.is_finite()) {
        return Err(Error::invalid("L", "must be positive and finite"));
    }
    let a = (1.0 + (1.0 + 4.0 * l_hat * big_a).sqrt()) / (2.0 * l_hat);
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Numerical {
            label: "step weight".into(),
        });
    }
    Ok(a)
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub k: usize,
    pub y: Point,
    pub v: Point,
    /// `A_k`
    pub weight_sum: f64,
    /// `L_k`
    pub l_est: f64,
    /// Running `Σ a_i g_i`.
    pub g_acc: Vec<f64>,
    /// Running `Σ a_i (F(x_i) − ⟨g_i, x_i⟩)`.
    pub c_acc: f64,
    pub phi_star: f64,
    /// `F(y_k) + Ψ(y_k)`
    pub objective: f64,
    pub oracle_calls: u64,
}

/// UFGM as an explicit stepper, so callers can inspect the state between
/// iterations.
pub struct Ufgm<'p> {
    problem: &'p CompositeProblem,
    config: SolverConfig,
    x0: Point,
    state: SolverState,
    start: Instant,
}

impl<'p> Ufgm<'p> {
    pub fn new(problem: &'p CompositeProblem, x0: Point, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        crate::error::check_dim(problem.dim(), x0.len())?;
        if !problem.simple().contains(&x0) {
            return Err(Error::invalid("x0", "starting point is outside the feasible set"));
        }
        let start = Instant::now();
        let objective = problem.objective(&x0)?;
        let state = SolverState {
            k: 0,
            y: x0.clone(),
            v: x0.clone(),
            weight_sum: 0.0,
            l_est: config.l0,
            g_acc: vec![0.0; x0.len()],
            c_acc: 0.0,
            phi_star: 0.0,
            objective,
            oracle_calls: 1,
        };
        Ok(Ufgm {
            problem,
            config,
            x0,
            state,
            start,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn initial_record(&self) -> TraceRecord {
        self.record(0, 0.0, 0.0)
    }

    fn record(&self, i_k: u32, weight: f64, tau: f64) -> TraceRecord {
        let s = &self.state;
        let cert_gap = if s.weight_sum > 0.0 {
            s.objective - s.phi_star / s.weight_sum
        } else {
            f64::INFINITY
        };
        TraceRecord {
            k: s.k,
            i_k,
            weight_sum: s.weight_sum,
            weight,
            l_est: s.l_est,
            tau,
            objective: s.objective,
            phi_star: s.phi_star,
            cert_gap,
            oracle_calls: s.oracle_calls,
            wall_ns: self.start.elapsed().as_nanos() as u64,
        }
    }

    /// Whether the configured stop rule is satisfied at the current `y_k`.
    pub fn should_stop(&self) -> bool {
        let s = &self.state;
        match self.config.stop_rule {
            StopRule::KnownOptimum { p_star, tol } => s.objective - p_star <= tol,
            StopRule::Certificate { d } => {
                s.weight_sum > 0.0 && s.objective - (s.phi_star - d) / s.weight_sum <= self.config.epsilon
            }
            StopRule::Budget => false,
        }
    }

    /// One outer iteration including its backtracking loop.
    pub fn step(&mut self) -> Result<TraceRecord> {
        let problem = self.problem;
        let geometry = problem.geometry();
        let simple = problem.simple();
        let eps = self.config.epsilon;
        let big_a = self.state.weight_sum;
        let l_k = self.state.l_est;

        for i in 0..=self.config.max_doublings {
            let l_hat = l_k * 2f64.powi(i as i32);
            if !l_hat.is_finite() {
                break;
            }
            let a = solve_a(big_a, l_hat)?;
            let a_next = big_a + a;
            let tau = a / a_next;
            let x = lerp(tau, &self.state.v, &self.state.y);
            let ex = problem.evaluate(&x)?;
            self.state.oracle_calls += 1;
            let x_hat = composite_step(geometry, simple, &self.state.v, &ex.subgradient, a)?;
            let y_next = lerp(tau, &x_hat, &self.state.y);
            let f_y = problem.evaluate(&y_next)?.value;
            self.state.oracle_calls += 1;

            let diff: Vec<f64> = y_next.iter().zip(&x).map(|(a, b)| a - b).collect();
            let rhs = ex.value + dot(&ex.subgradient, &diff) + 0.5 * l_hat * dist_sq(&y_next, &x) + 0.5 * eps * tau;
            if f_y > rhs + DESCENT_SLACK * (1.0 + ex.value.abs()) {
                continue;
            }

            axpy(a, &ex.subgradient, &mut self.state.g_acc);
            self.state.c_acc += a * (ex.value - dot(&ex.subgradient, &x));
            let (v, reduced) = model_argmin(geometry, simple, &self.x0, &self.state.g_acc, a_next)?;
            let s = &mut self.state;
            s.k += 1;
            s.v = v;
            s.y = Point::from_vec(y_next);
            s.objective = f_y + simple.value(&s.y);
            s.weight_sum = a_next;
            s.l_est = (0.5 * l_hat).max(L_FLOOR);
            s.phi_star = reduced + s.c_acc;
            return Ok(self.record(i, a, tau));
        }
        Err(Error::BacktrackExhausted {
            iteration: self.state.k + 1,
            doublings: self.config.max_doublings,
        })
    }

    /// Runs until the stop rule fires, the budget runs out, or a step fails.
    /// A failing step ends the run with `StopReason::Error` and the partial
    /// trace is kept.
    pub fn run(mut self) -> RunResult {
        let mut trace = vec![self.initial_record()];
        let stop = loop {
            if self.should_stop() {
                break StopReason::Converged;
            }
            if self.state.k >= self.config.max_iters {
                break StopReason::Budget;
            }
            match self.step() {
                Ok(rec) => trace.push(rec),
                Err(e) => break StopReason::Error(e.to_string()),
            }
        };
        RunResult {
            objectives: trace.iter().map(|r| r.objective).collect(),
            y: self.state.y,
            objective: self.state.objective,
            iterations: self.state.k,
            oracle_calls: self.state.oracle_calls,
            stop,
            trace,
        }
    }
}

/// Runs UFGM from `x0`. Failures inside an iteration are reported as `Err`;
/// use [`Ufgm::run`] to keep the partial trace instead.
pub fn ufgm_solve(problem: &CompositeProblem, x0: Point, config: &SolverConfig) -> Result<RunResult> {
    let mut solver = Ufgm::new(problem, x0, config.clone())?;
    let mut trace = vec![solver.initial_record()];
    let stop = loop {
        if solver.should_stop() {
            break StopReason::Converged;
        }
        if solver.state.k >= config.max_iters {
            break StopReason::Budget;
        }
        trace.push(solver.step()?);
    };
    let state = solver.state;
    Ok(RunResult {
        objectives: trace.iter().map(|r| r.objective).collect(),
        y: state.y,
        objective: state.objective,
        iterations: state.k,
        oracle_calls: state.oracle_calls,
        stop,
        trace,
    })
}
