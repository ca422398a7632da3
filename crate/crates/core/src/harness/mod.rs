//! Experiment configs, problem construction, trace files and reports.

mod build;
mod config;
mod gen;
mod run;
mod tables;
mod trace;

pub use build::{build_problem, BuiltProblem};
pub use config::{ExperimentConfig, HolderTermSpec, MethodSpec, ProblemSpec, CONFIG_VERSION};
pub use gen::{generate, GenKind};
pub use run::{
    compare, compare_methods, problem_kind, run_built, run_experiment, CompareOutput, Compliance, Report, ReportRow,
    RunOutcome, TheoryColumns, CERT_SLACK,
};
pub use tables::{rate_table, recurrence_csv, recurrence_rows, split_table, RecurrenceRow};
pub use trace::{
    baseline_csv, certificate_violations, oracle_budget_holds, read_trace, trace_csv, write_text, BASELINE_HEADER,
    TRACE_HEADER,
};
