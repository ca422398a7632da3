use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SimpleTerm;
use crate::solver::{RdaSchedule, SolverConfig};

pub const CONFIG_VERSION: u32 = 1;

/// One experiment: a problem, a method, and its settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub problem: ProblemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple: Option<SimpleTerm>,
    /// Starting point; zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Overrides the optimal value known from the problem construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_star: Option<f64>,
    pub solver: MethodSpec,
    pub run: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// `(scale/2)‖x − center‖²`, optimum 0.
    Quadratic {
        center: Vec<f64>,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `‖Ax − b‖_p^p` with `A` from a dense CSV and `b` from a vector file.
    Lp { matrix: PathBuf, rhs: PathBuf, p: f64 },
    /// `½‖A₁x − b₁‖² + c‖A₂x − b₂‖₁` with standard normal `A_i` of size
    /// `m × n` and `b_i = A_i x*`, so the optimum is 0 at the planted `x*`.
    TwoTerm { m: usize, n: usize, c: f64, seed: u64 },
    /// `Σ max(0, 1 − y_i⟨x_i, w⟩) + (λ/2)‖w‖²`, from a LIBSVM file or synthetic.
    Svm {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default = "one")]
        lambda: f64,
    },
    /// `½‖y − ȳ‖² + α·max(λ_max(diag(y) − L), 0)`, with `L` read from a
    /// matrix file or built from a random graph.
    Specproj {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        density: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        alpha: f64,
        /// Use the graph Laplacian of the loaded weights rather than the weights.
        #[serde(default = "yes")]
        laplacian: bool,
        /// Point to project; all ones when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y_bar: Option<Vec<f64>>,
    },
    /// `Σ_j M_j/(1+v_j)·‖x − c_j‖^{1+v_j}`.
    HolderSum { dim: usize, terms: Vec<HolderTermSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderTermSpec {
    pub m: f64,
    pub v: f64,
    /// Zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodSpec {
    Ufgm,
    RUfgm { target_eps: f64 },
    Subgradient { c: f64 },
    Rda { schedule: RdaSchedule },
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::config(json_field_hint(&e), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Makes relative data paths relative to `dir`.
    pub fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        match &mut self.problem {
            ProblemSpec::Lp { matrix, rhs, .. } => {
                fix(matrix);
                fix(rhs);
            }
            ProblemSpec::Svm { path: Some(p), .. } | ProblemSpec::Specproj { path: Some(p), .. } => fix(p),
            _ => {}
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::config(
                "version",
                format!("unsupported version {}, expected {CONFIG_VERSION}", self.version),
            ));
        }
        self.run.validate().map_err(|e| prefix_field("run", e))?;
        self.problem.validate().map_err(|e| prefix_field("problem", e))?;
        match self.solver {
            MethodSpec::RUfgm { target_eps } if !(target_eps > 0.0 && target_eps.is_finite()) => {
                return Err(Error::config("solver.target_eps", "must be positive and finite"));
            }
            MethodSpec::Subgradient { c } if !(c > 0.0 && c.is_finite()) => {
                return Err(Error::config("solver.c", "must be positive and finite"));
            }
            _ => {}
        }
        if let Some(x0) = &self.x0 {
            if !x0.iter().all(|x| x.is_finite()) {
                return Err(Error::config("x0", "entries must be finite"));
            }
        }
        if let Some(p) = self.p_star {
            if !p.is_finite() {
                return Err(Error::config("p_star", "must be finite"));
            }
        }
        Ok(())
    }
}

impl ProblemSpec {
    fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::config(name, "must be positive and finite"))
            }
        };
        match self {
            ProblemSpec::Quadratic { center, scale } => {
                positive("scale", *scale)?;
                if center.is_empty() {
                    return Err(Error::config("center", "must be nonempty"));
                }
            }
            ProblemSpec::Lp { p, .. } => {
                if !(1.0..=2.0).contains(p) {
                    return Err(Error::config("p", "must lie in [1, 2]"));
                }
            }
            ProblemSpec::TwoTerm { m, n, c, .. } => {
                if *m == 0 || *n == 0 {
                    return Err(Error::config("m", "dimensions must be positive"));
                }
                if !(*c >= 0.0 && c.is_finite()) {
                    return Err(Error::config("c", "must be finite and nonnegative"));
                }
            }
            ProblemSpec::Svm {
                path,
                samples,
                dim,
                seed,
                lambda,
            } => {
                positive("lambda", *lambda)?;
                if path.is_none() && (samples.is_none() || dim.is_none() || seed.is_none()) {
                    return Err(Error::config(
                        "seed",
                        "synthetic data needs samples, dim and seed (or give a path)",
                    ));
                }
            }
            ProblemSpec::Specproj {
                path,
                nodes,
                density,
                seed,
                alpha,
                ..
            } => {
                positive("alpha", *alpha)?;
                if path.is_none() && (nodes.is_none() || density.is_none() || seed.is_none()) {
                    return Err(Error::config(
                        "seed",
                        "synthetic graphs need nodes, density and seed (or give a path)",
                    ));
                }
            }
            ProblemSpec::HolderSum { dim, terms } => {
                if *dim == 0 {
                    return Err(Error::config("dim", "must be positive"));
                }
                if terms.is_empty() {
                    return Err(Error::config("terms", "need at least one term"));
                }
                for (i, t) in terms.iter().enumerate() {
                    if !(t.m >= 0.0 && t.m.is_finite()) || !(0.0..=1.0).contains(&t.v) {
                        return Err(Error::config(
                            format!("terms[{i}]"),
                            "need finite m ≥ 0 and v in [0, 1]",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Replaces the generator seed, if the problem has one.
    pub fn set_seed(&mut self, new_seed: u64) {
        match self {
            ProblemSpec::TwoTerm { seed, .. } => *seed = new_seed,
            ProblemSpec::Svm { seed, path: None, .. } | ProblemSpec::Specproj { seed, path: None, .. } => {
                *seed = Some(new_seed)
            }
            _ => {}
        }
    }
}

fn prefix_field(prefix: &str, e: Error) -> Error {
    match e {
        Error::Config { field, message } => Error::Config {
            field: format!("{prefix}.{field}"),
            message,
        },
        other => other,
    }
}

/// Best-effort field name from a serde error such as "unknown field `foo`".
fn json_field_hint(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    for marker in ["unknown field `", "missing field `", "unknown variant `"] {
        if let Some(rest) = msg.split(marker).nth(1) {
            if let Some(name) = rest.split('`').next() {
                return name.to_string();
            }
        }
    }
    format!("line {}", e.line())
}
