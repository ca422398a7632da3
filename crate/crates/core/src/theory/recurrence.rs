use crate::error::{Error, Result};

use super::{bisect_decreasing, RateInputs};

/// Pairs `(α_j, q_j)` of the generic recurrence
/// `Σ α_j (A_{k+1} − A_k)^{1+q_j} / A_{k+1}^{q_j} ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceSpec {
    pairs: Vec<(f64, f64)>,
}

impl RecurrenceSpec {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("pairs", "need at least one (alpha, q) pair"));
        }
        for &(alpha, q) in &pairs {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::invalid("alpha", "must be positive and finite"));
            }
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::invalid("q", "must lie in [0, 1]"));
            }
        }
        Ok(RecurrenceSpec { pairs })
    }

    /// The recurrence satisfied by UFGM's `A_k`:
    /// `α_j = 2|J|^{(1−v)/(1+v)} M_j^{2/(1+v)} / ε^{(1−v)/(1+v)}`, `q_j = 2v/(1+v)`.
    /// Terms with `M_j = 0` drop out.
    pub fn from_rate_inputs(inputs: &RateInputs) -> Result<Self> {
        let j = inputs.terms().len() as f64;
        let pairs = inputs
            .terms()
            .iter()
            .filter(|t| t.m > 0.0)
            .map(|t| {
                let r = (1.0 - t.v) / (1.0 + t.v);
                let alpha = 2.0 * j.powf(r) * t.m.powf(2.0 / (1.0 + t.v)) / inputs.epsilon().powf(r);
                (alpha, 2.0 * t.v / (1.0 + t.v))
            })
            .collect();
        Self::new(pairs)
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn alpha_sum(&self) -> f64 {
        self.pairs.iter().map(|p| p.0).sum()
    }

    /// `Σ α_j d^{1+q_j} / (a + d)^{q_j}`
    pub fn increment_value(&self, a: f64, d: f64) -> f64 {
        self.pairs
            .iter()
            .map(|&(alpha, q)| alpha * d.powf(1.0 + q) / (a + d).powf(q))
            .sum()
    }
}

/// Slowest sequence admissible under the recurrence: `A_0 = 0` and each
/// `A_{k+1}` solves it with equality.
pub fn recurrence_extremal(spec: &RecurrenceSpec, steps: usize) -> Result<Vec<f64>> {
    if steps < 1 {
        return Err(Error::invalid("steps", "must be at least 1"));
    }
    let mut seq = Vec::with_capacity(steps + 1);
    seq.push(0.0);
    seq.push(1.0 / spec.alpha_sum());
    for _ in 1..steps {
        let a = *seq.last().expect("nonempty");
        let d = bisect_decreasing("recurrence_extremal", |d| 1.0 - spec.increment_value(a, d))?.x;
        seq.push(a + d);
    }
    Ok(seq)
}

/// `Σ (1 + q_j)(α_j A)^{1/(1+q_j)}`
pub fn lemma3_bound(spec: &RecurrenceSpec, a: f64) -> f64 {
    spec.pairs
        .iter()
        .map(|&(alpha, q)| (1.0 + q) * (alpha * a).powf(1.0 / (1.0 + q)))
        .sum()
}

/// Positive root `C` of `Σ α_j Δ C^{−(1+q_j)} = 1`.
pub fn lemma4_c(spec: &RecurrenceSpec, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta", "must be positive and finite"));
    }
    Ok(bisect_decreasing("lemma4_c", |c| lemma4_lhs(spec, delta, c) - 1.0)?.x)
}

/// `Σ α_j Δ C^{−(1+q_j)}`
pub fn lemma4_lhs(spec: &RecurrenceSpec, delta: f64, c: f64) -> f64 {
    spec.pairs
        .iter()
        .map(|&(alpha, q)| alpha * delta * c.powf(-(1.0 + q)))
        .sum()
}
