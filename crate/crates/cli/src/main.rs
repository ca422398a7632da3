use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ufgm_core::harness::{
    certificate_violations, compare, generate, rate_table, read_trace, recurrence_csv, recurrence_rows, run_experiment,
    split_table, write_text, ExperimentConfig, GenKind,
};
use ufgm_core::theory::{GrowthSpec, RateInputs, RecurrenceSpec};
use ufgm_core::{Error, StopReason, SummandSpec};

/// Exit codes: 0 converged (or success), 2 iteration budget exhausted, 1 any error.
#[derive(Parser)]
#[command(name = "ufgm", version, about = "Universal fast gradient method toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver from a JSON config and write its trace CSV.
    Solve(SolveArgs),
    /// Run UFGM and the six baselines on one problem and write a report.
    Compare(SolveArgs),
    /// Evaluate rate bounds for given Hölder terms.
    Rate(RateArgs),
    /// Extremal sequence of the generic recurrence, with lemma checks.
    Recurrence(RecurrenceArgs),
    /// Generate synthetic data files.
    Gen(GenArgs),
    /// Re-check the certificate inequality on a saved UFGM trace.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    config: PathBuf,
    /// Trace file for `solve`, output directory for `compare`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the generator seed of the problem.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    l0: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Record wall-clock times in the trace (makes files non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct RateArgs {
    /// Hölder term `M,v`; repeat for each summand.
    #[arg(long = "term", value_parser = parse_pair)]
    terms: Vec<(f64, f64)>,
    #[arg(long)]
    eps: f64,
    /// Value or upper bound for ξ(x0, x*).
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    /// Also solve for the implicit rate K.
    #[arg(long)]
    implicit: bool,
    /// Split `M,v` uniformly over each count in `--counts` and compare K.
    #[arg(long, value_parser = parse_pair, conflicts_with = "terms")]
    uniform_split: Option<(f64, f64)>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    counts: Vec<usize>,
    /// Growth condition `mu,p,initial_gap` for the restarted bound.
    #[arg(long, value_parser = parse_triple)]
    growth: Option<(f64, f64, f64)>,
    /// Target accuracy of the restarted bound; defaults to `--eps`.
    #[arg(long)]
    target_eps: Option<f64>,
}

#[derive(Args)]
struct RecurrenceArgs {
    /// Pair `alpha,q`; repeat for each term.
    #[arg(long = "pair", value_parser = parse_pair, required = true)]
    pairs: Vec<(f64, f64)>,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gaussian,
    Svm,
    Graph,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 200)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    count: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 20)]
    dim: usize,
    #[arg(long, default_value_t = 50)]
    nodes: usize,
    #[arg(long, default_value_t = 0.2)]
    density: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1e-7)]
    slack: f64,
}

fn parse_numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number `{p}`")))
        .collect::<Result<_, _>>()?;
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got `{s}`"));
    }
    Ok(parts)
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let p = parse_numbers(s, 2)?;
    Ok((p[0], p[1]))
}

fn parse_triple(s: &str) -> Result<(f64, f64, f64), String> {
    let p = parse_numbers(s, 3)?;
    Ok((p[0], p[1], p[2]))
}

fn load_config(args: &SolveArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.problem.set_seed(seed);
    }
    if let Some(eps) = args.eps {
        cfg.run.epsilon = eps;
    }
    if let Some(l0) = args.l0 {
        cfg.run.l0 = l0;
    }
    if let Some(n) = args.max_iters {
        cfg.run.max_iters = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(args: &SolveArgs) -> Result<ExitCode, Error> {
    let cfg = load_config(args)?;
    let outcome = run_experiment(&cfg, args.timing)?;
    let out = args.out.clone().or_else(|| cfg.output.clone());
    emit(out.as_deref(), &outcome.csv)?;
    let r = &outcome.result;
    for (n, e) in outcome.epochs.iter().enumerate() {
        eprintln!(
            "epoch {n}: eps={:e} iterations={} gap {:e} -> {:e}",
            e.epsilon, e.iterations, e.start_gap, e.end_gap
        );
    }
    eprintln!(
        "stop={} iterations={} objective={:e} oracle_calls={}",
        r.stop, r.iterations, r.objective, r.oracle_calls
    );
    Ok(match r.stop {
        StopReason::Converged => ExitCode::SUCCESS,
        StopReason::Budget => ExitCode::from(2),
        StopReason::Error(_) => ExitCode::from(1),
    })
}

fn compare_cmd(args: &SolveArgs) -> Result<ExitCode, Error> {
    let cfg = load_config(args)?;
    let threads = match std::env::var("UFGM_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| Error::Config {
            field: "UFGM_THREADS".into(),
            message: format!("`{v}` is not a thread count"),
        })?),
        Err(_) => None,
    };
    let out = compare(&cfg, threads)?;
    let report = serde_json::to_string_pretty(&out.report).expect("report serializes") + "\n";
    match &args.out {
        Some(dir) => {
            write_text(dir.join("best_gap.csv"), &out.best_gap_csv)?;
            write_text(dir.join("report.json"), &report)?;
        }
        None => print!("{report}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn rate(args: &RateArgs) -> Result<ExitCode, Error> {
    if let Some((m, v)) = args.uniform_split {
        print!("{}", split_table(m, v, &args.counts, args.eps, args.xi)?);
        return Ok(ExitCode::SUCCESS);
    }
    let terms = args
        .terms
        .iter()
        .map(|&(m, v)| SummandSpec::new(m, v, ""))
        .collect::<Result<Vec<_>, _>>()?;
    let inputs = RateInputs::new(terms, args.eps, args.xi)?;
    let growth = args
        .growth
        .map(|(mu, p, gap)| GrowthSpec::new(mu, p, gap))
        .transpose()?;
    let target = args.target_eps.unwrap_or(args.eps);
    print!(
        "{}",
        rate_table(&inputs, args.implicit, growth.as_ref().map(|g| (g, target)))?
    );
    Ok(ExitCode::SUCCESS)
}

fn recurrence(args: &RecurrenceArgs) -> Result<ExitCode, Error> {
    let spec = RecurrenceSpec::new(args.pairs.clone())?;
    let rows = recurrence_rows(&spec, args.steps)?;
    emit(args.out.as_deref(), &recurrence_csv(&rows))?;
    let bad = rows.iter().filter(|r| !r.lemma3_ok() || !r.lemma4_ok).count();
    eprintln!("rows={} violations={bad}", rows.len());
    Ok(ExitCode::SUCCESS)
}

fn gen(args: &GenArgs) -> Result<ExitCode, Error> {
    let kind = match args.kind {
        Kind::Gaussian => GenKind::Gaussian {
            m: args.m,
            n: args.n,
            count: args.count,
        },
        Kind::Svm => GenKind::Svm {
            samples: args.samples,
            dim: args.dim,
        },
        Kind::Graph => GenKind::Graph {
            nodes: args.nodes,
            density: args.density,
        },
    };
    let meta = generate(&kind, args.seed, &args.out)?;
    eprintln!("wrote {} files to {}", meta.files.len() + 1, args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn verify(args: &VerifyArgs) -> Result<ExitCode, Error> {
    let records = read_trace(&args.trace)?;
    let bad = certificate_violations(&records, args.eps, args.slack);
    if bad.is_empty() {
        println!("ok: {} rows satisfy the certificate", records.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("violations at k = {bad:?}");
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Compare(a) => compare_cmd(a),
        Command::Rate(a) => rate(a),
        Command::Recurrence(a) => recurrence(a),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
