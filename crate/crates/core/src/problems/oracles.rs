use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, dot, norm, Matrix};

use super::eigen::eigen_max;
use super::{Oracle, SummandSpec};

/// `‖Ax − b‖_p^p` for `p ∈ [1, 2]`.
#[derive(Debug, Clone)]
pub struct LpTerm {
    a: Matrix,
    b: Vec<f64>,
    p: f64,
    label: String,
}

pub fn lp_term(a: Matrix, b: Vec<f64>, p: f64) -> Result<LpTerm> {
    check_dim(a.rows(), b.len())?;
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::invalid("p", "must lie in [1, 2]"));
    }
    Ok(LpTerm {
        a,
        b,
        p,
        label: format!("lp(p={p})"),
    })
}

impl LpTerm {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl Oracle for LpTerm {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn eval_into(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        let mut r = self.a.matvec(x)?;
        let p = self.p;
        let mut value = 0.0;
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            let res = *ri - bi;
            let mag = res.abs();
            let sign = if res > 0.0 {
                1.0
            } else if res < 0.0 {
                -1.0
            } else {
                0.0
            };
            // d/dr |r|^p = p·|r|^{p−1}·sign(r), with sign(0) = 0.
            let (v, d) = if p == 1.0 {
                (mag, sign)
            } else if p == 2.0 {
                (res * res, 2.0 * res)
            } else if res == 0.0 {
                (0.0, 0.0)
            } else {
                (mag.powf(p), p * mag.powf(p - 1.0) * sign)
            };
            value += v;
            *ri = d;
        }
        let g = self.a.matvec_t(&r)?;
        axpy(1.0, &g, grad);
        Ok(value)
    }
}

/// `c·f(x)` for a wrapped oracle `f`.
pub struct Scaled {
    inner: Box<dyn Oracle>,
    c: f64,
    label: String,
}

pub fn scaled(inner: impl Oracle + 'static, c: f64) -> Result<Scaled> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::invalid("c", "scale must be finite and nonnegative"));
    }
    let label = format!("{c}*{}", inner.label());
    Ok(Scaled {
        inner: Box::new(inner),
        c,
        label,
    })
}

impl Oracle for Scaled {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn eval_into(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        let mut g = vec![0.0; grad.len()];
        let v = self.inner.eval_into(x, &mut g)?;
        axpy(self.c, &g, grad);
        Ok(self.c * v)
    }

    fn holder(&self) -> Option<SummandSpec> {
        self.inner.holder().map(|s| SummandSpec {
            m: self.c * s.m,
            v: s.v,
            label: self.label.clone(),
        })
    }
}

/// `Σ_i max{0, 1 − y_i·x_iᵀw}` over the rows of `X`.
#[derive(Debug, Clone)]
pub struct HingeSum {
    x: Matrix,
    y: Vec<f64>,
}

pub fn hinge_sum(x: Matrix, y: Vec<f64>) -> Result<HingeSum> {
    check_dim(x.rows(), y.len())?;
    if let Some(bad) = y.iter().find(|l| **l != 1.0 && **l != -1.0) {
        return Err(Error::invalid("label", format!("{bad} is not ±1")));
    }
    Ok(HingeSum { x, y })
}

impl HingeSum {
    pub fn features(&self) -> &Matrix {
        &self.x
    }
}

impl Oracle for HingeSum {
    fn dim(&self) -> usize {
        self.x.cols()
    }

    fn label(&self) -> &str {
        "hinge"
    }

    fn eval_into(&self, w: &[f64], grad: &mut [f64]) -> Result<f64> {
        check_dim(self.x.cols(), w.len())?;
        let mut value = 0.0;
        for (i, yi) in self.y.iter().enumerate() {
            let row = self.x.row(i);
            let margin = 1.0 - yi * dot(row, w);
            if margin > 0.0 {
                value += margin;
                axpy(-yi, row, grad);
            }
        }
        Ok(value)
    }
}

/// `(λ/2)‖w‖²`
#[derive(Debug, Clone)]
pub struct Ridge {
    lambda: f64,
    dim: usize,
}

pub fn ridge(lambda: f64, dim: usize) -> Result<Ridge> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", "must be finite and nonnegative"));
    }
    Ok(Ridge { lambda, dim })
}

impl Oracle for Ridge {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> &str {
        "ridge"
    }

    fn eval_into(&self, w: &[f64], grad: &mut [f64]) -> Result<f64> {
        check_dim(self.dim, w.len())?;
        axpy(self.lambda, w, grad);
        Ok(0.5 * self.lambda * dot(w, w))
    }

    fn holder(&self) -> Option<SummandSpec> {
        Some(SummandSpec {
            m: self.lambda,
            v: 1.0,
            label: "ridge".into(),
        })
    }
}

/// `(M/(1+v))·‖x − c‖^{1+v}`, a summand with exactly known Hölder exponent.
#[derive(Debug, Clone)]
pub struct HolderPower {
    m: f64,
    v: f64,
    center: Vec<f64>,
    label: String,
}

pub fn holder_power(m: f64, v: f64, dim: usize) -> Result<HolderPower> {
    SummandSpec::new(m, v, "")?;
    Ok(HolderPower {
        m,
        v,
        center: vec![0.0; dim],
        label: format!("holder(M={m},v={v})"),
    })
}

impl HolderPower {
    pub fn centered(mut self, center: Vec<f64>) -> Result<Self> {
        check_dim(self.center.len(), center.len())?;
        self.center = center;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

impl Oracle for HolderPower {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn eval_into(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        check_dim(self.center.len(), x.len())?;
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        let r = norm(&d);
        if r == 0.0 {
            return Ok(0.0);
        }
        let scale = if self.v == 1.0 {
            self.m
        } else {
            self.m * r.powf(self.v - 1.0)
        };
        axpy(scale, &d, grad);
        let value = if self.v == 1.0 {
            0.5 * self.m * crate::linalg::norm_sq(&d)
        } else {
            self.m / (1.0 + self.v) * r.powf(1.0 + self.v)
        };
        Ok(value)
    }

    /// `x ↦ ‖x‖^{v−1}x` is `(2^{1−v}, v)`-Hölder, so `2^{1−v}·M` is safe.
    fn holder(&self) -> Option<SummandSpec> {
        Some(SummandSpec {
            m: 2f64.powf(1.0 - self.v) * self.m,
            v: self.v,
            label: self.label.clone(),
        })
    }
}

/// `α·max{λ_max(diag(y) − L), 0}`
#[derive(Debug, Clone)]
pub struct SpectralPenalty {
    l: Matrix,
    alpha: f64,
}

impl Oracle for SpectralPenalty {
    fn dim(&self) -> usize {
        self.l.rows()
    }

    fn label(&self) -> &str {
        "spectral_penalty"
    }

    fn eval_into(&self, y: &[f64], grad: &mut [f64]) -> Result<f64> {
        check_dim(self.l.rows(), y.len())?;
        let mut s = self.l.scaled(-1.0);
        for (i, yi) in y.iter().enumerate() {
            s[(i, i)] += yi;
        }
        let (lambda, u) = eigen_max(&s)?;
        if lambda > 0.0 {
            for (g, ui) in grad.iter_mut().zip(&u) {
                *g += self.alpha * ui * ui;
            }
            Ok(self.alpha * lambda)
        } else {
            Ok(0.0)
        }
    }

    /// Subgradients are `α·(u∘u)` or zero; any two differ by at most `√2·α`.
    fn holder(&self) -> Option<SummandSpec> {
        Some(SummandSpec {
            m: std::f64::consts::SQRT_2 * self.alpha,
            v: 0.0,
            label: "spectral_penalty".into(),
        })
    }
}

/// The two summands of the exact-penalty spectrahedron projection:
/// `½‖y − ȳ‖²` and `α·max{λ_max(diag(y) − L), 0}`.
pub fn specproj_term(l: Matrix, alpha: f64, y_bar: Vec<f64>) -> Result<(HolderPower, SpectralPenalty)> {
    if !l.is_square() {
        return Err(Error::invalid("L", "must be square"));
    }
    if !l.is_symmetric(1e-12 * l.frobenius_norm().max(1.0)) {
        return Err(Error::invalid("L", "must be symmetric"));
    }
    check_dim(l.rows(), y_bar.len())?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", "must be positive"));
    }
    let quad = holder_power(1.0, 1.0, y_bar.len())?
        .centered(y_bar)?
        .with_label("specproj_quadratic");
    Ok((quad, SpectralPenalty { l, alpha }))
}

type EvalFn = dyn Fn(&[f64], &mut [f64]) -> f64 + Send + Sync;

/// An oracle backed by a closure that adds its subgradient into the buffer.
pub struct FnOracle {
    dim: usize,
    label: String,
    f: Box<EvalFn>,
    spec: Option<SummandSpec>,
}

impl FnOracle {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        f: impl Fn(&[f64], &mut [f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FnOracle {
            dim,
            label: label.into(),
            f: Box::new(f),
            spec: None,
        }
    }

    pub fn with_holder(mut self, spec: SummandSpec) -> Self {
        self.spec = Some(spec);
        self
    }
}

impl Oracle for FnOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn eval_into(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok((self.f)(x, grad))
    }

    fn holder(&self) -> Option<SummandSpec> {
        self.spec.clone()
    }
}
