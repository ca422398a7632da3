use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::problems::data::format_f64;
use crate::solver::TraceRecord;

pub const TRACE_HEADER: &str = "k,i_k,A_k,a_k,L_k,tau_k,obj,phi_star,cert_gap,oracle_calls,wall_ns";
pub const BASELINE_HEADER: &str = "k,obj,best_obj";

/// CSV text for a UFGM trace. With `timing` off the `wall_ns` column is 0 so
/// that repeated runs produce identical files.
pub fn trace_csv(records: &[TraceRecord], timing: bool) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in records {
        let wall = if timing { r.wall_ns } else { 0 };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.k,
            r.i_k,
            format_f64(r.weight_sum),
            format_f64(r.weight),
            format_f64(r.l_est),
            format_f64(r.tau),
            format_f64(r.objective),
            format_f64(r.phi_star),
            format_f64(r.cert_gap),
            r.oracle_calls,
            wall
        )
        .expect("writing to a String");
    }
    out
}

/// CSV text for a baseline run: objective and best objective per iteration.
pub fn baseline_csv(objectives: &[f64]) -> String {
    let mut out = String::new();
    out.push_str(BASELINE_HEADER);
    out.push('\n');
    let mut best = f64::INFINITY;
    for (k, v) in objectives.iter().enumerate() {
        best = best.min(*v);
        writeln!(out, "{k},{},{}", format_f64(*v), format_f64(best)).expect("writing to a String");
    }
    out
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<TraceRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text).map_err(|(line, message)| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

fn parse_trace(text: &str) -> std::result::Result<Vec<TraceRecord>, (usize, String)> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRACE_HEADER => {}
        _ => return Err((1, format!("expected header `{TRACE_HEADER}`"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 11 {
            return Err((lineno, format!("expected 11 columns, found {}", cols.len())));
        }
        let f = |j: usize| -> std::result::Result<f64, (usize, String)> {
            cols[j]
                .parse()
                .map_err(|_| (lineno, format!("bad number `{}`", cols[j])))
        };
        let u = |j: usize| -> std::result::Result<u64, (usize, String)> {
            cols[j]
                .parse()
                .map_err(|_| (lineno, format!("bad integer `{}`", cols[j])))
        };
        out.push(TraceRecord {
            k: u(0)? as usize,
            i_k: u(1)? as u32,
            weight_sum: f(2)?,
            weight: f(3)?,
            l_est: f(4)?,
            tau: f(5)?,
            objective: f(6)?,
            phi_star: f(7)?,
            cert_gap: f(8)?,
            oracle_calls: u(9)?,
            wall_ns: u(10)?,
        });
    }
    Ok(out)
}

/// Rows (by `k`) that violate `A_k(obj − ε/2) ≤ φ_k*` beyond `rel_slack`.
pub fn certificate_violations(records: &[TraceRecord], epsilon: f64, rel_slack: f64) -> Vec<usize> {
    records
        .iter()
        .filter(|r| !r.certificate_holds(epsilon, rel_slack))
        .map(|r| r.k)
        .collect()
}

/// Whether the cumulative oracle count stays within
/// `4k + 2·max(0, log₂(L_k/L₀)) + 8` at every row.
pub fn oracle_budget_holds(records: &[TraceRecord], l0: f64) -> bool {
    records.iter().all(|r| {
        let budget = 4.0 * r.k as f64 + 2.0 * (r.l_est / l0).log2().max(0.0) + 8.0;
        r.oracle_calls as f64 <= budget
    })
}
