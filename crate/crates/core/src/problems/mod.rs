//! First-order oracles and the composite problem `min_{x∈Q} Σ f_j(x) + Ψ(x)`.

mod constants;
pub mod data;
mod eigen;
mod oracles;

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{Geometry, SimpleTerm};
use crate::linalg::all_finite;

pub use constants::estimate_constants;
pub use eigen::{eigen_max, jacobi_eigen, SymmetricEigen};
pub use oracles::{
    hinge_sum, holder_power, lp_term, ridge, scaled, specproj_term, FnOracle, HingeSum, HolderPower, LpTerm, Ridge,
    Scaled, SpectralPenalty,
};

/// Value and one subgradient of a function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderEval {
    pub value: f64,
    pub subgradient: Vec<f64>,
}

/// Hölder data `(M, v)` of one summand: `‖∇f(x) − ∇f(y)‖ ≤ M‖x − y‖^v`.
///
/// Only the rate-bound evaluators read this; the solvers never do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummandSpec {
    pub m: f64,
    pub v: f64,
    #[serde(default)]
    pub label: String,
}

impl SummandSpec {
    pub fn new(m: f64, v: f64, label: impl Into<String>) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::invalid("M", "must be finite and nonnegative"));
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid("v", "must lie in [0, 1]"));
        }
        Ok(SummandSpec {
            m,
            v,
            label: label.into(),
        })
    }
}

/// A first-order oracle for one summand.
pub trait Oracle: Send + Sync {
    fn dim(&self) -> usize;

    fn label(&self) -> &str;

    /// Adds a subgradient at `x` into `grad` and returns the value at `x`.
    fn eval_into(&self, x: &[f64], grad: &mut [f64]) -> Result<f64>;

    /// Known Hölder constants, when the oracle carries them.
    fn holder(&self) -> Option<SummandSpec> {
        None
    }

    fn eval(&self, x: &[f64]) -> Result<FirstOrderEval> {
        check_dim(self.dim(), x.len())?;
        let mut subgradient = vec![0.0; x.len()];
        let value = self.eval_into(x, &mut subgradient)?;
        Ok(FirstOrderEval { value, subgradient })
    }
}

pub struct Summand {
    pub oracle: Box<dyn Oracle>,
    pub spec: Option<SummandSpec>,
}

/// `F = Σ f_j` with the simple term Ψ, the set Q, and the geometry.
pub struct CompositeProblem {
    summands: Vec<Summand>,
    simple: SimpleTerm,
    geometry: Geometry,
    dim: usize,
    p_star: Option<f64>,
    calls: AtomicU64,
}

impl std::fmt::Debug for CompositeProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompositeProblem")
            .field(
                "summands",
                &self.summands.iter().map(|s| s.oracle.label()).collect::<Vec<_>>(),
            )
            .field("simple", &self.simple)
            .field("dim", &self.dim)
            .field("p_star", &self.p_star)
            .finish()
    }
}

impl CompositeProblem {
    pub fn new(dim: usize) -> Self {
        CompositeProblem {
            summands: Vec::new(),
            simple: SimpleTerm::default(),
            geometry: Geometry::Euclidean,
            dim,
            p_star: None,
            calls: AtomicU64::new(0),
        }
    }

    /// Adds a summand, carrying over whatever Hölder data the oracle reports.
    pub fn with_summand(self, oracle: impl Oracle + 'static) -> Result<Self> {
        let spec = oracle.holder();
        self.push(Box::new(oracle), spec)
    }

    pub fn with_summand_spec(self, oracle: impl Oracle + 'static, spec: SummandSpec) -> Result<Self> {
        self.push(Box::new(oracle), Some(spec))
    }

    pub fn with_boxed(self, oracle: Box<dyn Oracle>, spec: Option<SummandSpec>) -> Result<Self> {
        self.push(oracle, spec)
    }

    fn push(mut self, oracle: Box<dyn Oracle>, spec: Option<SummandSpec>) -> Result<Self> {
        check_dim(self.dim, oracle.dim())?;
        self.summands.push(Summand { oracle, spec });
        Ok(self)
    }

    pub fn with_simple(mut self, simple: SimpleTerm) -> Result<Self> {
        simple.validate(self.dim)?;
        self.simple = simple;
        Ok(self)
    }

    pub fn with_p_star(mut self, p_star: f64) -> Self {
        self.p_star = Some(p_star);
        self
    }

    pub fn without_p_star(mut self) -> Self {
        self.p_star = None;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn simple(&self) -> &SimpleTerm {
        &self.simple
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn p_star(&self) -> Option<f64> {
        self.p_star
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// Hölder data for every summand, or `None` if any summand lacks it.
    pub fn holder_specs(&self) -> Option<Vec<SummandSpec>> {
        self.summands.iter().map(|s| s.spec.clone()).collect()
    }

    /// Number of full-sum evaluations performed so far.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// `(F(x), ∇F(x))` by the sum rule. Counts as exactly one oracle call.
    pub fn evaluate(&self, x: &[f64]) -> Result<FirstOrderEval> {
        check_dim(self.dim, x.len())?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        let mut subgradient = vec![0.0; self.dim];
        let mut value = 0.0;
        for s in &self.summands {
            let fj = s.oracle.eval_into(x, &mut subgradient)?;
            if !fj.is_finite() || !all_finite(&subgradient) {
                return Err(Error::Numerical {
                    label: s.oracle.label().to_string(),
                });
            }
            value += fj;
        }
        Ok(FirstOrderEval { value, subgradient })
    }

    /// `F(x) + Ψ(x)`; one oracle call.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate(x)?.value + self.simple.value(x))
    }
}
