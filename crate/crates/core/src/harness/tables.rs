use std::fmt::Write as _;

use crate::error::Result;
use crate::problems::data::format_f64;
use crate::theory::{
    explicit_bound, explicit_coefficient, explicit_terms, growth_bound, implicit_bound, lemma3_bound, lemma4_c,
    recurrence_extremal, GrowthSpec, RateInputs, RecurrenceSpec,
};

/// Tab-separated `key value` lines for the rate bounds of `inputs`.
pub fn rate_table(inputs: &RateInputs, implicit: bool, growth: Option<(&GrowthSpec, f64)>) -> Result<String> {
    let mut out = String::new();
    let count = inputs.count();
    for (j, (t, share)) in inputs.terms().iter().zip(explicit_terms(inputs)).enumerate() {
        writeln!(
            out,
            "term\t{j}\tM={}\tv={}\tc={}\tbound={}",
            t.m,
            t.v,
            explicit_coefficient(t.v, count),
            share
        )
        .expect("writing to a String");
    }
    writeln!(out, "explicit_bound\t{}", explicit_bound(inputs)).expect("writing to a String");
    if implicit {
        let k = implicit_bound(inputs)?;
        writeln!(out, "implicit_K\t{}", k.k).expect("writing to a String");
        writeln!(out, "implicit_5K\t{}", k.guarantee).expect("writing to a String");
    }
    if let Some((g, target)) = growth {
        writeln!(out, "growth_bound\t{}", growth_bound(inputs, g, target)?).expect("writing to a String");
    }
    Ok(out)
}

/// Implicit and explicit bounds for `count` copies of `(m/count, v)`.
pub fn split_table(m: f64, v: f64, counts: &[usize], eps: f64, xi0: f64) -> Result<String> {
    let mut out = String::from("J\tK\t5K\texplicit_bound\n");
    for &c in counts {
        let inputs = RateInputs::uniform_split(m, v, c, eps, xi0)?;
        let k = implicit_bound(&inputs)?;
        writeln!(out, "{c}\t{}\t{}\t{}", k.k, k.guarantee, explicit_bound(&inputs)).expect("writing to a String");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceRow {
    pub k: usize,
    pub a: f64,
    pub lemma3_rhs: f64,
    /// `k ≤ 5·C(Δ = A_k)`, i.e. the `lemma4_c` step count with `Δ` set to this
    /// row's value; rows with `Δ ≤ A_1` pass by convention.
    pub lemma4_ok: bool,
}

impl RecurrenceRow {
    pub fn lemma3_ok(&self) -> bool {
        self.k as f64 <= self.lemma3_rhs
    }
}

pub fn recurrence_rows(spec: &RecurrenceSpec, steps: usize) -> Result<Vec<RecurrenceRow>> {
    let seq = recurrence_extremal(spec, steps)?;
    let a1 = seq[1];
    seq.iter()
        .enumerate()
        .map(|(k, &a)| {
            let lemma4_ok = if k <= 1 || a <= a1 {
                true
            } else {
                k as f64 <= 5.0 * lemma4_c(spec, a)?
            };
            Ok(RecurrenceRow {
                k,
                a,
                lemma3_rhs: lemma3_bound(spec, a),
                lemma4_ok,
            })
        })
        .collect()
}

pub fn recurrence_csv(rows: &[RecurrenceRow]) -> String {
    let mut out = String::from("k,A_k,lemma3_rhs,lemma4_flag\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.k,
            format_f64(r.a),
            format_f64(r.lemma3_rhs),
            u8::from(r.lemma4_ok)
        )
        .expect("writing to a String");
    }
    out
}
