use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;

use super::SummandSpec;

const POWER_TOL: f64 = 1e-8;
const POWER_MAX_ITERS: usize = 200_000;

/// Over-estimated Hölder data for `‖Ax − b‖_p^p`, with `v = p − 1`.
///
/// Conventions at the endpoints:
/// * `p = 2`: `M = σ_max(A)²`, the smoothness of `½‖Ax − b‖²`. The unhalved
///   square has twice this constant.
/// * `p = 1`: `M = σ_max(A)·√m`, the Lipschitz constant. Subgradient
///   differences can be up to twice this.
///
/// Strictly between the endpoints, the returned
/// `M = p·2^{2−p}·σ^p·m^{(2−p)/2}` is a Hölder constant of the unhalved
/// gradient map itself.
pub fn estimate_constants(a: &Matrix, b: &[f64], p: f64) -> Result<SummandSpec> {
    check_dim(a.rows(), b.len())?;
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::invalid("p", "must lie in [1, 2]"));
    }
    let sigma = a.sigma_max(POWER_TOL, POWER_MAX_ITERS)?;
    let m_rows = a.rows() as f64;
    let m = if p == 2.0 {
        sigma * sigma
    } else if p == 1.0 {
        sigma * m_rows.sqrt()
    } else {
        p * 2f64.powf(2.0 - p) * sigma.powf(p) * m_rows.powf((2.0 - p) / 2.0)
    };
    SummandSpec::new(m, p - 1.0, format!("lp(p={p})"))
}
