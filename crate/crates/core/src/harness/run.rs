use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::data::format_f64;
use crate::solver::{r_ufgm_solve, rda_solve, subgradient_solve, Epoch, RdaSchedule, RunResult, StopRule, Ufgm};
use crate::theory::{explicit_bound, growth_bound, implicit_bound, GrowthSpec, RateInputs};

use super::build::{build_problem, BuiltProblem};
use super::config::{ExperimentConfig, MethodSpec, ProblemSpec};
use super::trace::{baseline_csv, certificate_violations, oracle_budget_holds, trace_csv};

/// Relative slack used when re-checking certificates in reports.
pub const CERT_SLACK: f64 = 1e-7;

#[derive(Debug)]
pub struct RunOutcome {
    pub result: RunResult,
    pub epochs: Vec<Epoch>,
    /// Trace CSV for UFGM methods, objective CSV for the baselines.
    pub csv: String,
}

/// Runs the configured method once.
pub fn run_experiment(cfg: &ExperimentConfig, timing: bool) -> Result<RunOutcome> {
    let built = build_problem(cfg)?;
    run_built(cfg, &built, timing)
}

pub fn run_built(cfg: &ExperimentConfig, built: &BuiltProblem, timing: bool) -> Result<RunOutcome> {
    let problem = &built.problem;
    let x0 = built.x0.clone();
    let iters = cfg.run.max_iters;
    let (result, epochs) = match &cfg.solver {
        MethodSpec::Ufgm => (Ufgm::new(problem, x0, cfg.run.clone())?.run(), Vec::new()),
        MethodSpec::RUfgm { target_eps } => {
            let r = r_ufgm_solve(problem, x0, &cfg.run, *target_eps)?;
            (r.run, r.epochs)
        }
        MethodSpec::Subgradient { c } => (subgradient_solve(problem, x0, *c, iters)?, Vec::new()),
        MethodSpec::Rda { schedule } => (rda_solve(problem, x0, *schedule, iters)?, Vec::new()),
    };
    let csv = match cfg.solver {
        MethodSpec::Ufgm | MethodSpec::RUfgm { .. } => trace_csv(&result.trace, timing),
        _ => baseline_csv(&result.objectives),
    };
    Ok(RunOutcome { result, epochs, csv })
}

/// The seven methods of a comparison: UFGM, subgradient steps `c/(k+1)` for
/// `c ∈ {0.1, 1, 10}`, and dual averaging with `λ_k ∈ {1, k, k²}`.
pub fn compare_methods() -> Vec<(&'static str, MethodSpec)> {
    vec![
        ("ufgm", MethodSpec::Ufgm),
        ("subgradient_short", MethodSpec::Subgradient { c: 0.1 }),
        ("subgradient_medium", MethodSpec::Subgradient { c: 1.0 }),
        ("subgradient_long", MethodSpec::Subgradient { c: 10.0 }),
        (
            "rda_short",
            MethodSpec::Rda {
                schedule: RdaSchedule::Short,
            },
        ),
        (
            "rda_medium",
            MethodSpec::Rda {
                schedule: RdaSchedule::Medium,
            },
        ),
        (
            "rda_long",
            MethodSpec::Rda {
                schedule: RdaSchedule::Long,
            },
        ),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub method: String,
    pub final_objective: f64,
    pub final_gap: f64,
    pub best_gap: f64,
    pub iterations: usize,
    pub oracle_calls: u64,
    pub stop: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TheoryColumns {
    pub xi0: Option<f64>,
    pub explicit_bound: Option<f64>,
    pub implicit_5k: Option<f64>,
    pub growth_bound: Option<f64>,
}

/// Flags computed from the UFGM trace and the theory columns.
#[derive(Debug, Clone, Serialize)]
pub struct Compliance {
    pub certificate: bool,
    pub oracle_budget: bool,
    /// First iteration with gap `≤ ε`, when `p*` is exact.
    pub first_hit: Option<usize>,
    pub within_explicit: Option<bool>,
    pub within_implicit_5k: Option<bool>,
    pub ufgm_not_worst: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub problem: String,
    pub dim: usize,
    pub epsilon: f64,
    pub budget: usize,
    pub p_star: f64,
    pub p_star_source: String,
    pub rows: Vec<ReportRow>,
    pub theory: TheoryColumns,
    pub compliance: Compliance,
}

#[derive(Debug)]
pub struct CompareOutput {
    pub report: Report,
    /// Best gap seen per iteration, one column per method, equal lengths.
    pub best_gap_csv: String,
}

/// Runs every method in [`compare_methods`] on the same problem and start
/// point for `cfg.run.max_iters` iterations. `threads` caps parallelism.
pub fn compare(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<CompareOutput> {
    let built = build_problem(cfg)?;
    let budget = cfg.run.max_iters;
    let methods = compare_methods();
    let run_one = |spec: &MethodSpec| -> Result<RunResult> {
        let mut c = cfg.clone();
        c.solver = spec.clone();
        c.run.stop_rule = StopRule::Budget;
        Ok(run_built(&c, &built, false)?.result)
    };
    let runs: Vec<Result<RunResult>> = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid("threads", e.to_string()))?
            .install(|| methods.par_iter().map(|(_, m)| run_one(m)).collect()),
        None => methods.par_iter().map(|(_, m)| run_one(m)).collect(),
    };
    let runs: Vec<RunResult> = runs.into_iter().collect::<Result<_>>()?;

    let (p_star, source) = match (cfg.p_star, built.problem.p_star()) {
        (Some(p), _) => (p, "config"),
        (None, Some(p)) => (p, "construction"),
        (None, None) => (
            runs.iter()
                .flat_map(|r| r.objectives.iter().copied())
                .fold(f64::INFINITY, f64::min),
            "best_seen",
        ),
    };
    let exact_p_star = source != "best_seen";

    let columns: Vec<Vec<f64>> = runs
        .iter()
        .map(|r| {
            let mut best = r.best_so_far();
            let last = *best.last().expect("start point recorded");
            best.resize(budget + 1, last);
            best.iter().map(|b| b - p_star).collect()
        })
        .collect();
    let mut csv = String::from("k");
    for (name, _) in &methods {
        csv.push(',');
        csv.push_str(name);
    }
    csv.push('\n');
    for k in 0..=budget {
        csv.push_str(&k.to_string());
        for col in &columns {
            csv.push(',');
            csv.push_str(&format_f64(col[k]));
        }
        csv.push('\n');
    }

    let rows: Vec<ReportRow> = methods
        .iter()
        .zip(&runs)
        .zip(&columns)
        .map(|(((name, _), r), col)| ReportRow {
            method: name.to_string(),
            final_objective: r.objective,
            final_gap: r.objective - p_star,
            best_gap: *col.last().expect("nonempty"),
            iterations: r.iterations,
            oracle_calls: r.oracle_calls,
            stop: r.stop.to_string(),
        })
        .collect();

    let eps = cfg.run.epsilon;
    let ufgm = &runs[0];
    let theory = theory_columns(&built, eps, p_star, exact_p_star);
    let first_hit = exact_p_star.then(|| ufgm.first_within(p_star, eps)).flatten();
    let worst = rows[1..].iter().map(|r| r.final_gap).fold(f64::NEG_INFINITY, f64::max);
    let compliance = Compliance {
        certificate: certificate_violations(&ufgm.trace, eps, CERT_SLACK).is_empty(),
        oracle_budget: oracle_budget_holds(&ufgm.trace, cfg.run.l0),
        first_hit,
        within_explicit: first_hit.zip(theory.explicit_bound).map(|(k, b)| k as f64 <= b),
        within_implicit_5k: first_hit.zip(theory.implicit_5k).map(|(k, b)| k as f64 <= b),
        ufgm_not_worst: rows[0].final_gap <= worst,
    };

    Ok(CompareOutput {
        report: Report {
            problem: problem_kind(&cfg.problem).to_string(),
            dim: built.problem.dim(),
            epsilon: eps,
            budget,
            p_star,
            p_star_source: source.to_string(),
            rows,
            theory,
            compliance,
        },
        best_gap_csv: csv,
    })
}

fn theory_columns(built: &BuiltProblem, eps: f64, p_star: f64, exact: bool) -> TheoryColumns {
    let mut cols = TheoryColumns::default();
    let Some(specs) = built.problem.holder_specs() else {
        return cols;
    };
    if let Some(xi0) = built.xi0() {
        cols.xi0 = Some(xi0);
        if let Ok(inputs) = RateInputs::new(specs.clone(), eps, xi0) {
            cols.explicit_bound = Some(explicit_bound(&inputs));
            cols.implicit_5k = implicit_bound(&inputs).ok().map(|b| b.guarantee);
        }
    }
    if let (Some((mu, p)), true) = (built.growth, exact) {
        let gap0 = built
            .problem
            .objective(&built.x0)
            .map(|f| f - p_star)
            .unwrap_or(f64::NAN);
        let growth = GrowthSpec::new(mu, p, gap0);
        let inputs = RateInputs::new(specs, eps, 0.0);
        if let (Ok(g), Ok(inputs)) = (growth, inputs) {
            cols.growth_bound = growth_bound(&inputs, &g, eps).ok();
        }
    }
    cols
}

pub fn problem_kind(spec: &ProblemSpec) -> &'static str {
    match spec {
        ProblemSpec::Quadratic { .. } => "quadratic",
        ProblemSpec::Lp { .. } => "lp",
        ProblemSpec::TwoTerm { .. } => "two_term",
        ProblemSpec::Svm { .. } => "svm",
        ProblemSpec::Specproj { .. } => "specproj",
        ProblemSpec::HolderSum { .. } => "holder_sum",
    }
}
