use rand::Rng;
use ufgm_core::harness::{build_problem, certificate_violations, oracle_budget_holds, BuiltProblem, ExperimentConfig};
use ufgm_core::linalg::norm_sq;
use ufgm_core::problems::data::{gen_gaussian_instance, gen_svm};
use ufgm_core::problems::{holder_power, lp_term, scaled, CompositeProblem};
use ufgm_core::solver::{r_ufgm_solve, ufgm_solve};
use ufgm_core::theory::{explicit_bound, growth_bound, restart_epochs, two_term_bound, GrowthSpec, RateInputs};
use ufgm_core::{Constraint, Point, Regularizer, SimpleTerm, SolverConfig, StopReason, StopRule, SummandSpec};

use crate::ensure;
use crate::support::{log_uniform, rng, scaled_power, svm_objective, svm_reference, to_nalgebra, Traces, CERT_SLACK};

fn built(json: &str) -> BuiltProblem {
    let cfg = ExperimentConfig::from_json(json).expect("acceptance config parses");
    build_problem(&cfg).expect("acceptance problem builds")
}

fn desk_config(problem: &str) -> String {
    format!(r#"{{"version": 1, "problem": {problem}, "solver": {{"method": "ufgm"}}, "run": {{"epsilon": 1.0}}}}"#)
}

struct Case {
    label: String,
    problem: CompositeProblem,
    x0: Point,
    config: SolverConfig,
}

fn gaussian_l1(m: usize, n: usize, seed: u64, simple: SimpleTerm) -> CompositeProblem {
    let inst = gen_gaussian_instance(m, n, seed);
    CompositeProblem::new(n)
        .with_summand(lp_term(inst.a, inst.b, 1.0).unwrap())
        .unwrap()
        .with_simple(simple)
        .unwrap()
}

fn certificate_cases() -> Vec<Case> {
    let mut cases = Vec::new();
    let mut r = rng(11);
    let center: Vec<f64> = (0..20).map(|_| r.random_range(-3.0..3.0)).collect();
    let quad = |simple: SimpleTerm| {
        CompositeProblem::new(20)
            .with_summand(holder_power(2.0, 1.0, 20).unwrap().centered(center.clone()).unwrap())
            .unwrap()
            .with_simple(simple)
            .unwrap()
    };
    let budget = |eps: f64, iters: usize| SolverConfig::new(eps).max_iters(iters);

    cases.push(Case {
        label: "quadratic".into(),
        problem: quad(SimpleTerm::default()),
        x0: Point::zeros(20),
        config: budget(1e-6, 400),
    });
    cases.push(Case {
        label: "quadratic_ball".into(),
        problem: quad(SimpleTerm::new(Regularizer::Zero, Constraint::Ball { radius: 1.0 })),
        x0: Point::zeros(20),
        config: budget(1e-6, 400).l0(1e-6),
    });
    cases.push(Case {
        label: "l1_lasso".into(),
        problem: gaussian_l1(
            60,
            30,
            5,
            SimpleTerm::new(Regularizer::L1 { weight: 0.5 }, Constraint::Free),
        ),
        x0: Point::zeros(30),
        config: budget(1e-4, 2000),
    });
    cases.push(Case {
        label: "l1_nonnegative".into(),
        problem: gaussian_l1(
            60,
            30,
            6,
            SimpleTerm::new(Regularizer::SquaredL2 { weight: 0.1 }, Constraint::NonNegative),
        ),
        x0: Point::zeros(30),
        config: budget(1e-4, 2000),
    });
    cases.push(Case {
        label: "l1_box".into(),
        problem: gaussian_l1(
            60,
            30,
            7,
            SimpleTerm::new(
                Regularizer::Zero,
                Constraint::Box {
                    lo: vec![-0.5; 30],
                    hi: vec![0.5; 30],
                },
            ),
        ),
        x0: Point::zeros(30),
        config: budget(1e-4, 2000).l0(100.0),
    });

    let two_term = built(&desk_config(
        r#"{"kind": "two_term", "m": 200, "n": 100, "c": 0.001, "seed": 42}"#,
    ));
    cases.push(Case {
        label: "two_term_200x100".into(),
        problem: two_term.problem,
        x0: two_term.x0,
        config: budget(1e-9, 3000),
    });
    let svm = built(&desk_config(
        r#"{"kind": "svm", "samples": 100, "dim": 20, "seed": 7, "lambda": 1.0}"#,
    ));
    cases.push(Case {
        label: "svm_100x20".into(),
        problem: svm.problem,
        x0: svm.x0,
        config: budget(1e-3, 3000),
    });
    let spec = built(&desk_config(
        r#"{"kind": "specproj", "nodes": 50, "density": 0.2, "seed": 3, "alpha": 5.0}"#,
    ));
    cases.push(Case {
        label: "specproj_50".into(),
        problem: spec.problem,
        x0: spec.x0,
        config: budget(1e-4, 1000),
    });
    cases
}

/// Certificate inequality at every iteration of every run, within `CERT_SLACK`.
pub fn certificate_suite(traces: &mut Traces) -> Result<String, String> {
    let mut rows = 0;
    let cases = certificate_cases();
    let count = cases.len();
    for case in cases {
        let run = ufgm_solve(&case.problem, case.x0, &case.config).map_err(|e| format!("{}: {e}", case.label))?;
        let bad = certificate_violations(&run.trace, case.config.epsilon, CERT_SLACK);
        ensure!(
            bad.is_empty(),
            "{}: certificate fails at k = {:?}",
            case.label,
            &bad[..bad.len().min(5)]
        );
        ensure!(run.iterations > 0, "{}: no iterations", case.label);
        rows += run.trace.len();
        traces.record(&case.label, case.config.l0, &run.trace);
    }
    Ok(format!("{rows} trace rows over {count} runs, zero violations"))
}

/// All multisets of exponents from {0, 0.5, 1} with 1 to 3 members.
fn exponent_sets() -> Vec<Vec<f64>> {
    let vs = [0.0, 0.5, 1.0];
    let mut out = Vec::new();
    for a in 0..3 {
        out.push(vec![vs[a]]);
        for b in a..3 {
            out.push(vec![vs[a], vs[b]]);
            for c in b..3 {
                out.push(vec![vs[a], vs[b], vs[c]]);
            }
        }
    }
    out
}

const CALIBRATED_DIM: usize = 10;
const CALIBRATED_SEEDS: u64 = 3;
/// Runs past this many iterations are reported rather than continued.
const CALIBRATED_CAP: usize = 2_000_000;
/// Relative headroom on the backtracking ceiling for round-off.
const CEILING_SLACK: f64 = 1e-12;

/// Sums of `(M/(1+v))‖D(x − c)‖^{1+v}` sharing the minimizer `c`, with random
/// diagonal scalings so the terms are heterogeneous in both M and curvature.
fn calibrated(vs: &[f64], seed: u64) -> (CompositeProblem, Vec<SummandSpec>, f64) {
    let mut r = rng(seed);
    let n = CALIBRATED_DIM;
    let c: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
    let mut problem = CompositeProblem::new(n);
    for &v in vs {
        let d: Vec<f64> = (0..n).map(|_| log_uniform(&mut r, 1e-2, 1.0)).collect();
        let m = log_uniform(&mut r, 0.1, 10.0);
        problem = problem.with_summand(scaled_power(m, v, d, c.clone())).unwrap();
    }
    let specs = problem.holder_specs().expect("calibrated terms carry constants");
    let xi0 = 0.5 * norm_sq(&c);
    (problem.with_p_star(0.0), specs, xi0)
}

/// `2·Σ_j (|J|/(ε τ))^{(1−v)/(1+v)} M_j^{2/(1+v)}`, with `τ = a/A'`.
fn ceiling(specs: &[SummandSpec], eps: f64, tau: f64) -> f64 {
    let j = specs.len() as f64;
    2.0 * specs
        .iter()
        .map(|s| (j / (eps * tau)).powf((1.0 - s.v) / (1.0 + s.v)) * s.m.powf(2.0 / (1.0 + s.v)))
        .sum::<f64>()
}

/// First iteration with gap ≤ ε never exceeds the explicit bound; the accepted
/// smoothness estimate never exceeds the backtracking ceiling.
pub fn explicit_bound_compliance(traces: &mut Traces) -> Result<String, String> {
    let mut runs = 0;
    let mut worst_ratio: f64 = 0.0;
    for (si, vs) in exponent_sets().into_iter().enumerate() {
        for eps in [1e-2, 1e-4] {
            for seed in 0..CALIBRATED_SEEDS {
                let (problem, specs, xi0) = calibrated(&vs, 1000 * si as u64 + seed);
                let inputs = RateInputs::new(specs.clone(), eps, xi0).map_err(|e| e.to_string())?;
                let bound = explicit_bound(&inputs);
                for l0 in [1.0, 1e-6] {
                    let cap = (bound.ceil() as usize).min(CALIBRATED_CAP);
                    let cfg = SolverConfig::new(eps)
                        .l0(l0)
                        .max_iters(cap)
                        .stop_rule(StopRule::KnownOptimum { p_star: 0.0, tol: eps });
                    let run = ufgm_solve(&problem, Point::zeros(CALIBRATED_DIM), &cfg)
                        .map_err(|e| format!("v = {vs:?}, eps = {eps:e}: {e}"))?;
                    let hit = run.first_within(0.0, eps);
                    ensure!(
                        hit.is_some_and(|k| k as f64 <= bound),
                        "v = {vs:?}, eps = {eps:e}, L0 = {l0:e}: first hit {hit:?}, bound {bound:.4e}"
                    );
                    worst_ratio = worst_ratio.max(hit.unwrap() as f64 / bound);
                    if l0 < 1.0 {
                        for rec in &run.trace[1..] {
                            let accepted = 2.0 * rec.l_est;
                            let cap = ceiling(&specs, eps, rec.tau);
                            ensure!(
                                accepted <= cap * (1.0 + CEILING_SLACK),
                                "v = {vs:?}, eps = {eps:e}: k = {} accepted L {accepted:.4e} above ceiling {cap:.4e}",
                                rec.k
                            );
                        }
                    }
                    traces.record(format!("calibrated {vs:?}"), l0, &run.trace);
                    runs += 1;
                }
            }
        }
    }
    Ok(format!(
        "{runs} runs, max first-hit / bound = {worst_ratio:.3e}, ceiling holds"
    ))
}

/// Margin applied to estimated Hölder constants so they over-estimate.
const CONSTANT_MARGIN: f64 = 1.01;
const TWO_TERM_EPS: f64 = 1e-4;
const PHASE_C: f64 = 1e-3;
const PHASE_EPS: f64 = 1e-9;
const PHASE_BUDGET: usize = 20_000;
const PHASE_RATIO: f64 = 5.0;

/// Desk two-term instance: iterations to 1e-4 within `8(M/ε)²ξ + 4√(Lξ/ε)`, and
/// halving the gap below `c^{4/3}` is much slower than above it.
pub fn two_term_rate(traces: &mut Traces) -> Result<String, String> {
    let b = built(&desk_config(&format!(
        r#"{{"kind": "two_term", "m": 200, "n": 100, "c": {PHASE_C}, "seed": 42}}"#
    )));
    let specs = b.problem.holder_specs().expect("two-term constants");
    let l = specs.iter().find(|s| s.v == 1.0).unwrap().m * CONSTANT_MARGIN;
    let m = specs.iter().find(|s| s.v == 0.0).unwrap().m * CONSTANT_MARGIN;
    // The planted x* is an exact minimizer (both residuals vanish there).
    let xi = b.xi0().expect("planted optimum");
    let bound = two_term_bound(m, l, xi, TWO_TERM_EPS).map_err(|e| e.to_string())?;

    let cfg = SolverConfig::new(TWO_TERM_EPS)
        .max_iters(bound.ceil() as usize)
        .stop_rule(StopRule::KnownOptimum {
            p_star: 0.0,
            tol: TWO_TERM_EPS,
        });
    let run = ufgm_solve(&b.problem, b.x0.clone(), &cfg).map_err(|e| e.to_string())?;
    ensure!(
        run.stop == StopReason::Converged,
        "did not reach {TWO_TERM_EPS:e} within {bound:.4e}"
    );
    traces.record("two_term eps 1e-4", 1.0, &run.trace);

    let cfg = SolverConfig::new(PHASE_EPS).max_iters(PHASE_BUDGET);
    let long = ufgm_solve(&b.problem, b.x0.clone(), &cfg).map_err(|e| e.to_string())?;
    traces.record("two_term phase", 1.0, &long.trace);
    let best = long.best_so_far();
    let threshold = PHASE_C.powf(4.0 / 3.0);
    let gap0 = best[0];
    let k_t = best
        .iter()
        .position(|&g| g <= threshold)
        .ok_or("never crossed c^{4/3}")?;
    let g_final = *best.last().unwrap();
    let k_final = best.iter().position(|&g| g <= g_final).unwrap();
    let above = k_t as f64 / (gap0 / threshold).log2();
    let below = (k_final - k_t) as f64 / (threshold / g_final).log2();
    ensure!(
        below > PHASE_RATIO * above,
        "iterations per halving: {above:.2} above c^(4/3), {below:.2} below; ratio {:.2}",
        below / above
    );
    Ok(format!(
        "reached 1e-4 in {} iterations (bound {bound:.4e}); per-halving {above:.2} above vs {below:.1} below c^(4/3), ratio {:.1}",
        run.iterations,
        below / above
    ))
}

const LSQ_ROWS: usize = 40;
const LSQ_COLS: usize = 80;
const LSQ_BUDGET: usize = 1000;
const LSQ_FROM: usize = 10;

/// Underdetermined least squares: gap at y_k at most `16·L·ξ/k²` for k ≥ 10,
/// with L and the nearest minimizer from a dense SVD.
pub fn smooth_acceleration(traces: &mut Traces) -> Result<String, String> {
    let inst = gen_gaussian_instance(LSQ_ROWS, LSQ_COLS, 21);
    let a = to_nalgebra(&inst.a);
    let svd = a.clone().svd(true, true);
    let sigma = svd.singular_values.max();
    let l = sigma * sigma;
    let b = nalgebra::DVector::from_column_slice(&inst.b);
    let x_min = svd.solve(&b, 1e-12).map_err(|e| e.to_string())?;
    let xi = 0.5 * x_min.norm_squared();

    let problem = CompositeProblem::new(LSQ_COLS)
        .with_summand(scaled(lp_term(inst.a.clone(), inst.b.clone(), 2.0).unwrap(), 0.5).unwrap())
        .unwrap();
    let cfg = SolverConfig::new(1e-12).max_iters(LSQ_BUDGET);
    let run = ufgm_solve(&problem, Point::zeros(LSQ_COLS), &cfg).map_err(|e| e.to_string())?;
    traces.record("least_squares", 1.0, &run.trace);
    let mut tightest: f64 = 0.0;
    for (k, gap) in run.objectives.iter().enumerate().skip(LSQ_FROM) {
        let bound = 16.0 * l * xi / (k * k) as f64;
        ensure!(*gap <= bound, "k = {k}: gap {gap:.4e} > {bound:.4e}");
        tightest = tightest.max(gap / bound);
    }
    Ok(format!(
        "{} iterates checked, max gap / bound = {tightest:.3e}",
        run.objectives.len() - LSQ_FROM
    ))
}

const SVM_TARGET: f64 = 1e-6;
const SVM_LAMBDA: f64 = 1.0;
/// Absolute duality gap the reference optimum must reach.
const SVM_REFERENCE_GAP: f64 = 1e-9;

/// Restarted UFGM on the desk SVM: reaches 1e-6, uses exactly
/// `⌈log₂(gap₀/ε̃)⌉` epochs, and stays within the growth bound.
pub fn restarted_svm(traces: &mut Traces) -> Result<String, String> {
    let data = gen_svm(100, 20, 7);
    let (p_star, dual_gap) = svm_reference(&data, SVM_LAMBDA, 1e-13, 200_000);
    ensure!(
        dual_gap <= SVM_REFERENCE_GAP,
        "reference solve stalled at duality gap {dual_gap:.3e}"
    );

    let b = built(&desk_config(
        r#"{"kind": "svm", "samples": 100, "dim": 20, "seed": 7, "lambda": 1.0}"#,
    ));
    let x0 = b.x0.clone();
    let gap0 = svm_objective(&data.x, &data.y, SVM_LAMBDA, &x0) - p_star;
    let specs = b.problem.holder_specs().expect("svm constants");
    let problem = b.problem.with_p_star(p_star);
    let cfg = SolverConfig::new(1.0).max_iters(usize::MAX);
    let res = r_ufgm_solve(&problem, x0, &cfg, SVM_TARGET).map_err(|e| e.to_string())?;
    traces.record("svm restarted", cfg.l0, &res.run.trace);

    let final_gap = res.run.objective - p_star;
    ensure!(res.run.stop == StopReason::Converged, "stopped with {}", res.run.stop);
    ensure!(final_gap <= SVM_TARGET, "final gap {final_gap:.3e}");
    for (n, e) in res.epochs.iter().enumerate() {
        ensure!(
            e.end_gap <= e.epsilon,
            "epoch {n}: gap {:.3e} > {:.3e}",
            e.end_gap,
            e.epsilon
        );
    }
    let expected = restart_epochs(gap0, SVM_TARGET);
    ensure!(
        res.epochs.len() == expected,
        "{} epochs, expected {expected}",
        res.epochs.len()
    );

    let growth = GrowthSpec::new(SVM_LAMBDA, 2.0, gap0).map_err(|e| e.to_string())?;
    let inputs = RateInputs::new(specs, SVM_TARGET, 0.0).map_err(|e| e.to_string())?;
    let bound = growth_bound(&inputs, &growth, SVM_TARGET).map_err(|e| e.to_string())?;
    let iters = res.run.iterations;
    ensure!(iters as f64 <= bound, "{iters} iterations > growth bound {bound:.4e}");
    Ok(format!(
        "gap {final_gap:.3e} after {iters} iterations in {expected} epochs (bound {bound:.4e}, reference duality gap {dual_gap:.1e})"
    ))
}

/// `calls ≤ 4k + 2·max(0, log₂(L_k/L₀)) + 8` on every recorded UFGM run.
pub fn oracle_budget(traces: &mut Traces) -> Result<String, String> {
    if traces.runs.is_empty() {
        certificate_suite(traces)?;
    }
    let mut rows = 0;
    for run in &traces.runs {
        ensure!(
            oracle_budget_holds(&run.trace, run.l0),
            "{}: oracle budget exceeded",
            run.label
        );
        rows += run.trace.len();
    }
    Ok(format!("{} runs, {rows} trace rows", traces.runs.len()))
}
