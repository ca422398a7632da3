use crate::error::{Error, Result};

const BRACKET_FLOOR: f64 = 1e-300;

/// Root of a strictly decreasing function on `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// Final bracket; `f(lo) ≥ 0 ≥ f(hi)` and the endpoints are adjacent floats
    /// unless the root was hit exactly.
    pub lo: f64,
    pub hi: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection for `f(x) = 0` with `f` strictly decreasing on `(0, ∞)`.
///
/// The bracket is grown from 1 by doubling or halving (down to 1e-300) until
/// the sign changes, then halved until its endpoints are adjacent floats.
pub fn bisect_decreasing(routine: &'static str, f: impl Fn(f64) -> f64) -> Result<Root> {
    let mut iterations = 0;
    let f1 = f(1.0);
    if f1.is_nan() {
        return Err(Error::Numerical {
            label: routine.to_string(),
        });
    }
    let (mut lo, mut hi) = if f1 > 0.0 {
        let mut lo = 1.0;
        let mut hi = 2.0;
        while f(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            iterations += 1;
            if !hi.is_finite() {
                return Err(Error::NonConvergence { routine, iterations });
            }
        }
        (lo, hi)
    } else {
        let mut hi = 1.0;
        let mut lo = 0.5;
        while f(lo) <= 0.0 {
            if lo == BRACKET_FLOOR {
                return Err(Error::NonConvergence { routine, iterations });
            }
            hi = lo;
            lo = (lo * 0.5).max(BRACKET_FLOOR);
            iterations += 1;
        }
        (lo, hi)
    };
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let fm = f(mid);
        if fm.is_nan() {
            return Err(Error::Numerical {
                label: routine.to_string(),
            });
        }
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (f(lo), f(hi));
    let (x, residual) = if flo.abs() <= fhi.abs() { (lo, flo) } else { (hi, fhi) };
    Ok(Root {
        x,
        lo,
        hi,
        residual,
        iterations,
    })
}
