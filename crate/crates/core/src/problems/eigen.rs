use crate::error::{Error, Result};
use crate::linalg::Matrix;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-10;

/// Eigenvalues and column eigenvectors of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: Matrix,
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps visit pairs `(p, q)` in row order, so results are reproducible.
/// Converged once the off-diagonal Frobenius norm is below
/// `1e-10·max(1, ‖S‖_F)`.
pub fn jacobi_eigen(s: &Matrix) -> Result<SymmetricEigen> {
    if !s.is_square() {
        return Err(Error::invalid("S", "must be square"));
    }
    if !s.as_slice().iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical {
            label: "jacobi_eigen input".into(),
        });
    }
    let n = s.rows();
    let mut a = s.clone();
    let mut v = Matrix::identity(n);
    let tol = OFF_DIAGONAL_TOL * s.frobenius_norm().max(1.0);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            let values = (0..n).map(|i| a[(i, i)]).collect();
            return Ok(SymmetricEigen { values, vectors: v });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::NonConvergence {
        routine: "cyclic Jacobi",
        iterations: MAX_SWEEPS,
    })
}

/// Largest eigenvalue and a unit eigenvector for it.
///
/// Ties go to the lowest index; the vector's first nonzero entry is positive.
pub fn eigen_max(s: &Matrix) -> Result<(f64, Vec<f64>)> {
    let eig = jacobi_eigen(s)?;
    let n = s.rows();
    if n == 0 {
        return Err(Error::invalid("S", "must be nonempty"));
    }
    let mut best = 0;
    for i in 1..n {
        if eig.values[i] > eig.values[best] {
            best = i;
        }
    }
    let mut u: Vec<f64> = (0..n).map(|k| eig.vectors[(k, best)]).collect();
    let nrm = crate::linalg::norm(&u);
    let flip = u.iter().find(|x| **x != 0.0).map_or(1.0, |x| x.signum());
    u.iter_mut().for_each(|x| *x *= flip / nrm);
    Ok((eig.values[best], u))
}
