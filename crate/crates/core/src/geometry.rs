//! Prox-function geometry and the closed-form Bregman subproblems.
//!
//! Only the Euclidean prox-function `d(x) = ½‖x‖²` is implemented, so every
//! subproblem reduces to `argmin_{y∈Q} ½‖y − z‖² + w·Ψ(y)` for a shifted
//! point `z` and weight `w`. That reduced problem is solved in closed form
//! for each supported (Ψ, Q) pair; anything else is a configuration error.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist_sq, dot, norm, norm_sq};

/// A point in the problem space. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().all(|v| v.is_finite()) {
            Ok(Point(coords))
        } else {
            Err(Error::invalid("point", "entries must be finite"))
        }
    }

    pub fn zeros(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    // Callers inside the crate only build points from arithmetic on finite data
    // and re-check finiteness where an oracle is involved.
    pub(crate) fn from_vec(coords: Vec<f64>) -> Self {
        Point(coords)
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    #[default]
    Euclidean,
}

impl Geometry {
    /// Bregman distance `ξ(x, y) = d(y) − d(x) − ⟨∇d(x), y − x⟩`.
    pub fn xi(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(x.len(), y.len())?;
        match self {
            Geometry::Euclidean => Ok(0.5 * dist_sq(x, y)),
        }
    }
}

/// The simple additive term Ψ.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Regularizer {
    #[default]
    Zero,
    /// `weight·‖x‖₁`
    L1 { weight: f64 },
    /// `(weight/2)·‖x‖²`
    SquaredL2 { weight: f64 },
}

/// The feasible set Q.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Constraint {
    #[default]
    Free,
    NonNegative,
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// Euclidean ball of the given radius about the origin.
    Ball {
        radius: f64,
    },
}

impl fmt::Display for Regularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularizer::Zero => write!(f, "zero"),
            Regularizer::L1 { weight } => write!(f, "l1({weight})"),
            Regularizer::SquaredL2 { weight } => write!(f, "squared_l2({weight})"),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Free => write!(f, "free"),
            Constraint::NonNegative => write!(f, "nonnegative"),
            Constraint::Box { .. } => write!(f, "box"),
            Constraint::Ball { radius } => write!(f, "ball({radius})"),
        }
    }
}

/// Ψ together with Q.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimpleTerm {
    #[serde(default)]
    pub psi: Regularizer,
    #[serde(default)]
    pub constraint: Constraint,
}

impl SimpleTerm {
    pub fn new(psi: Regularizer, constraint: Constraint) -> Self {
        SimpleTerm { psi, constraint }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self.psi {
            Regularizer::Zero => {}
            Regularizer::L1 { weight } | Regularizer::SquaredL2 { weight } => {
                if !(weight >= 0.0 && weight.is_finite()) {
                    return Err(Error::invalid("weight", "must be finite and nonnegative"));
                }
            }
        }
        match &self.constraint {
            Constraint::Free | Constraint::NonNegative => {}
            Constraint::Box { lo, hi } => {
                check_dim(dim, lo.len())?;
                check_dim(dim, hi.len())?;
                if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
                    return Err(Error::invalid("box", "requires lo <= hi componentwise"));
                }
            }
            Constraint::Ball { radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::invalid("radius", "must be positive"));
                }
            }
        }
        if matches!(
            (&self.psi, &self.constraint),
            (Regularizer::L1 { .. }, Constraint::Ball { .. })
        ) {
            return Err(self.unsupported());
        }
        Ok(())
    }

    /// Ψ(x); the constraint is not consulted.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self.psi {
            Regularizer::Zero => 0.0,
            Regularizer::L1 { weight } => weight * x.iter().map(|v| v.abs()).sum::<f64>(),
            Regularizer::SquaredL2 { weight } => 0.5 * weight * norm_sq(x),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.constraint {
            Constraint::Free => true,
            Constraint::NonNegative => x.iter().all(|v| *v >= 0.0),
            Constraint::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| l <= v && v <= h),
            Constraint::Ball { radius } => norm(x) <= *radius,
        }
    }

    fn unsupported(&self) -> Error {
        Error::UnsupportedCombination {
            psi: self.psi.to_string(),
            constraint: self.constraint.to_string(),
        }
    }

    fn project(&self, z: Vec<f64>) -> Result<Vec<f64>> {
        Ok(match &self.constraint {
            Constraint::Free => z,
            Constraint::NonNegative => project_nonneg(&z).into_vec(),
            Constraint::Box { lo, hi } => project_box(&z, lo, hi)?.into_vec(),
            Constraint::Ball { radius } => project_ball(&z, *radius)?.into_vec(),
        })
    }

    /// `argmin_{y∈Q} ½‖y − z‖² + weight·Ψ(y)`.
    pub fn prox(&self, z: &[f64], weight: f64) -> Result<Point> {
        if !(weight >= 0.0) {
            return Err(Error::invalid("weight", "prox weight must be nonnegative"));
        }
        let out = match self.psi {
            Regularizer::Zero => self.project(z.to_vec())?,
            Regularizer::SquaredL2 { weight: w } => {
                // ½‖y − z‖² + (ωw/2)‖y‖² is isotropic about z/(1 + ωw).
                let s = 1.0 / (1.0 + weight * w);
                self.project(z.iter().map(|v| s * v).collect())?
            }
            Regularizer::L1 { weight: w } => match self.constraint {
                // Separable: clamping the 1-D soft-threshold minimizer stays optimal.
                Constraint::Ball { .. } => return Err(self.unsupported()),
                _ => self.project(soft_threshold(z, weight * w)?.into_vec())?,
            },
        };
        Ok(Point::from_vec(out))
    }
}

/// Bregman step `argmin_{y∈Q} ξ(v, y) + a·(⟨g, y⟩ + Ψ(y))`.
pub fn composite_step(geometry: Geometry, simple: &SimpleTerm, v: &[f64], g: &[f64], a: f64) -> Result<Point> {
    check_dim(v.len(), g.len())?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid("a", "step weight must be positive and finite"));
    }
    if !g.iter().all(|x| x.is_finite()) {
        return Err(Error::Numerical {
            label: "composite_step gradient".into(),
        });
    }
    match geometry {
        Geometry::Euclidean => {
            let z: Vec<f64> = v.iter().zip(g).map(|(vi, gi)| vi - a * gi).collect();
            simple.prox(&z, a)
        }
    }
}

/// Minimizer over Q of the reduced model `ξ(x0, x) + ⟨g_acc, x⟩ + A·Ψ(x)`,
/// together with the model value there.
pub fn model_argmin(
    geometry: Geometry,
    simple: &SimpleTerm,
    x0: &[f64],
    g_acc: &[f64],
    weight: f64,
) -> Result<(Point, f64)> {
    check_dim(x0.len(), g_acc.len())?;
    if !(weight >= 0.0) {
        return Err(Error::invalid("A", "must be nonnegative"));
    }
    let v = match geometry {
        Geometry::Euclidean => {
            let z: Vec<f64> = x0.iter().zip(g_acc).map(|(x, g)| x - g).collect();
            simple.prox(&z, weight)?
        }
    };
    let value = geometry.xi(x0, &v)? + dot(g_acc, &v) + weight * simple.value(&v);
    Ok((v, value))
}

pub fn soft_threshold(z: &[f64], t: f64) -> Result<Point> {
    if !(t >= 0.0) {
        return Err(Error::invalid("t", "threshold must be nonnegative"));
    }
    Ok(Point::from_vec(
        z.iter()
            .map(|v| {
                if *v > t {
                    v - t
                } else if *v < -t {
                    v + t
                } else {
                    0.0
                }
            })
            .collect(),
    ))
}

pub fn project_nonneg(z: &[f64]) -> Point {
    Point::from_vec(z.iter().map(|v| v.max(0.0)).collect())
}

pub fn project_box(z: &[f64], lo: &[f64], hi: &[f64]) -> Result<Point> {
    check_dim(z.len(), lo.len())?;
    check_dim(z.len(), hi.len())?;
    if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
        return Err(Error::invalid("box", "requires lo <= hi componentwise"));
    }
    Ok(Point::from_vec(
        z.iter()
            .zip(lo.iter().zip(hi))
            .map(|(v, (l, h))| v.clamp(*l, *h))
            .collect(),
    ))
}

pub fn project_ball(z: &[f64], radius: f64) -> Result<Point> {
    if !(radius > 0.0) {
        return Err(Error::invalid("radius", "must be positive"));
    }
    let n = norm(z);
    if n <= radius {
        return Ok(Point::from_vec(z.to_vec()));
    }
    let s = radius / n;
    let mut out: Vec<f64> = z.iter().map(|v| s * v).collect();
    // Rounding can leave the scaled point a few ulps outside; pull it in so a
    // second projection is the identity.
    while norm(&out) > radius {
        out.iter_mut().for_each(|v| *v *= 1.0 - f64::EPSILON);
    }
    Ok(Point::from_vec(out))
}
