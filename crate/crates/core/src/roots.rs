//! Bracketing root finders.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]`, which must bracket a sign change of `f`.
///
/// Stops once the bracket is narrower than `x_tol` (or after 200 halvings,
/// which exhausts double precision for any finite bracket).
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::Domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Domain(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    for _ in 0..200 {
        if hi - lo <= x_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A sign change of a sampled function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    /// `true` when the function goes from nonnegative to negative.
    pub falling: bool,
}

/// Samples `f` on `samples` evenly spaced points of `[lo, hi]` and returns
/// every adjacent pair whose values straddle zero. Zero counts as
/// nonnegative.
pub fn scan_sign_changes<F>(f: F, lo: f64, hi: f64, samples: usize) -> Vec<Bracket>
where
    F: Fn(f64) -> f64,
{
    assert!(samples >= 2, "need at least two samples");
    let step = (hi - lo) / (samples - 1) as f64;
    let xs: Vec<f64> = (0..samples)
        .map(|i| if i + 1 == samples { hi } else { lo + step * i as f64 })
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let mut out = Vec::new();
    for i in 0..samples - 1 {
        let (a, b) = (ys[i], ys[i + 1]);
        if a.is_nan() || b.is_nan() {
            continue;
        }
        let negative = |v: f64| v < 0.0;
        if negative(a) != negative(b) {
            out.push(Bracket {
                lo: xs[i],
                hi: xs[i + 1],
                falling: !negative(a),
            });
        }
    }
    out
}
