//! Rate bounds for UFGM on heterogeneous sums, and the recurrence
//! simulators used to check them.

mod bisect;
mod recurrence;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::SummandSpec;

pub use bisect::{bisect_decreasing, Root};
pub use recurrence::{lemma3_bound, lemma4_c, lemma4_lhs, recurrence_extremal, RecurrenceSpec};

/// `x^y` with `0⁰ = 1`.
fn pow0(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else {
        x.powf(y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateInputs {
    terms: Vec<SummandSpec>,
    epsilon: f64,
    xi0: f64,
}

impl RateInputs {
    pub fn new(terms: Vec<SummandSpec>, epsilon: f64, xi0: f64) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("terms", "need at least one summand"));
        }
        for t in &terms {
            SummandSpec::new(t.m, t.v, "")?;
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", "must be positive and finite"));
        }
        if !(xi0 >= 0.0 && xi0.is_finite()) {
            return Err(Error::invalid("xi0", "must be finite and nonnegative"));
        }
        Ok(RateInputs { terms, epsilon, xi0 })
    }

    /// `count` copies of `(m/count, v)`.
    pub fn uniform_split(m: f64, v: f64, count: usize, epsilon: f64, xi0: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("count", "must be positive"));
        }
        let term = SummandSpec::new(m / count as f64, v, "split")?;
        Self::new(vec![term; count], epsilon, xi0)
    }

    pub fn terms(&self) -> &[SummandSpec] {
        &self.terms
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    /// `|J|`
    pub fn count(&self) -> usize {
        self.terms.len()
    }
}

/// Hölder growth `F + Ψ − p* ≥ μ·ξ(x, x*)^{p/2}`, plus the starting gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSpec {
    pub mu: f64,
    pub p: f64,
    pub initial_gap: f64,
}

impl GrowthSpec {
    pub fn new(mu: f64, p: f64, initial_gap: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid("mu", "must be positive and finite"));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::invalid("p", "must be at least 1"));
        }
        if !(initial_gap > 0.0 && initial_gap.is_finite()) {
            return Err(Error::invalid("initial_gap", "must be positive and finite"));
        }
        Ok(GrowthSpec { mu, p, initial_gap })
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("delta", "must be positive and finite"))
    }
}

/// Smallest `L` for which an `(M, v)`-Hölder function admits the quadratic
/// upper model with additive slack `δ/2`:
/// `[((1−v)/(1+v))/δ]^{(1−v)/(1+v)} M^{2/(1+v)}`.
pub fn inexact_constant(m: f64, v: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let r = (1.0 - v) / (1.0 + v);
    Ok(pow0(r / delta, r) * m.powf(2.0 / (1.0 + v)))
}

/// Same as [`inexact_constant`] for a sum, each term getting slack `δ/|J|`.
pub fn sum_inexact_constant(terms: &[SummandSpec], delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let j = terms.len() as f64;
    terms.iter().map(|t| inexact_constant(t.m, t.v, delta / j)).sum()
}

/// `c_j = ((1+3v)/(1+v))·2^{(2+2v)/(1+3v)}·|J|^{(1−v)/(1+3v)}`
pub fn explicit_coefficient(v: f64, count: usize) -> f64 {
    let d = 1.0 + 3.0 * v;
    (d / (1.0 + v)) * 2f64.powf((2.0 + 2.0 * v) / d) * (count as f64).powf((1.0 - v) / d)
}

/// Per-term contributions `c_j (M_j/ε)^{2/(1+3v_j)} ξ₀^{(1+v_j)/(1+3v_j)}`.
pub fn explicit_terms(inputs: &RateInputs) -> Vec<f64> {
    let count = inputs.count();
    inputs
        .terms
        .iter()
        .map(|t| {
            let d = 1.0 + 3.0 * t.v;
            explicit_coefficient(t.v, count) * (t.m / inputs.epsilon).powf(2.0 / d) * inputs.xi0.powf((1.0 + t.v) / d)
        })
        .collect()
}

/// Iterations after which UFGM's gap is at most ε: the sum of [`explicit_terms`].
pub fn explicit_bound(inputs: &RateInputs) -> f64 {
    explicit_terms(inputs).iter().sum()
}

/// [`explicit_bound`] for one Lipschitz term `(m, 0)` and one smooth term `(l, 1)`:
/// `8(M/ε)²ξ + 4√(Lξ/ε)`.
pub fn two_term_bound(m: f64, l: f64, xi0: f64, eps: f64) -> Result<f64> {
    let inputs = RateInputs::new(
        vec![
            SummandSpec::new(m, 0.0, "lipschitz")?,
            SummandSpec::new(l, 1.0, "smooth")?,
        ],
        eps,
        xi0,
    )?;
    Ok(explicit_bound(&inputs))
}

/// Left side of the implicit rate equation minus one, as a function of `K`.
fn implicit_residual(inputs: &RateInputs, k: f64) -> f64 {
    let j = inputs.count() as f64;
    inputs
        .terms
        .iter()
        .map(|t| {
            let s = 1.0 + t.v;
            j.powf((1.0 - t.v) / s) * t.m.powf(2.0 / s) * inputs.xi0 / inputs.epsilon.powf(2.0 / s)
                * k.powf(-(1.0 + 3.0 * t.v) / s)
        })
        .sum::<f64>()
        - 1.0
}

/// The implicit rate `K` together with the iteration guarantee `5K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitBound {
    pub k: f64,
    pub guarantee: f64,
    pub root: Root,
}

/// Positive root `K` of
/// `Σ |J|^{(1−v)/(1+v)} M^{2/(1+v)} ξ₀ / ε^{2/(1+v)} · K^{−(1+3v)/(1+v)} = 1`.
pub fn implicit_bound(inputs: &RateInputs) -> Result<ImplicitBound> {
    if inputs.xi0 == 0.0 || inputs.terms.iter().all(|t| t.m == 0.0) {
        return Err(Error::invalid("terms", "implicit rate needs some M > 0 and xi0 > 0"));
    }
    let root = bisect_decreasing("implicit_bound", |k| implicit_residual(inputs, k))?;
    Ok(ImplicitBound {
        k: root.x,
        guarantee: 5.0 * root.x,
        root,
    })
}

/// `N = ⌈log₂(gap₀/ε̃)⌉`, or 0 when the start is already ε̃-optimal.
pub fn restart_epochs(initial_gap: f64, target_eps: f64) -> usize {
    if initial_gap <= target_eps {
        0
    } else {
        (initial_gap / target_eps).log2().ceil() as usize
    }
}

/// Total UFGM iterations of the restarted method under Hölder growth:
///
/// `Σ_j c_j''·min{2^e/(2^e − 1), N/2^e}·M_j^{2/(1+3v)} / (μ^{2(1+v)/(p(1+3v))} ε̃^e) + N`
///
/// with `e = 2(p−1−v)/(p(1+3v))` and
/// `c_j'' = ((1+3v)/(1+v))·2^{(v−1)(p−2)/(p(1+3v))}·|J|^{(1−v)/(1+3v)}`.
/// Terms with `e ≤ 0` use the `N/2^e` branch.
pub fn growth_bound(inputs: &RateInputs, growth: &GrowthSpec, target_eps: f64) -> Result<f64> {
    if !(target_eps > 0.0 && target_eps.is_finite()) {
        return Err(Error::invalid("target_eps", "must be positive and finite"));
    }
    let n = restart_epochs(growth.initial_gap, target_eps) as f64;
    let j = inputs.count() as f64;
    let p = growth.p;
    let total: f64 = inputs
        .terms
        .iter()
        .map(|t| {
            let v = t.v;
            let d = 1.0 + 3.0 * v;
            let e = 2.0 * (p - 1.0 - v) / (p * d);
            let c2 = (d / (1.0 + v)) * 2f64.powf((v - 1.0) * (p - 2.0) / (p * d)) * j.powf((1.0 - v) / d);
            let two_e = 2f64.powf(e);
            let factor = if e > 0.0 {
                (two_e / (two_e - 1.0)).min(n / two_e)
            } else {
                n / two_e
            };
            c2 * factor * t.m.powf(2.0 / d) / (growth.mu.powf(2.0 * (1.0 + v) / (p * d)) * target_eps.powf(e))
        })
        .sum();
    Ok(total + n)
}
