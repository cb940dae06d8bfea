//! Bracketing root finders for monotone scalar equations.

use crate::{Error, Result};

const MAX_ITER: usize = 2000;

/// Bisection on `[lo, hi]` until the bracket can no longer be split in
/// floating point.
///
/// `f(lo)` and `f(hi)` must have opposite signs; an exact zero at either end
/// is returned immediately.
pub fn bisect<F>(f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.signum() != fhi.signum()) || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoBracket { lo, hi });
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Doubles `hi` (relative to `lo`) until `f` changes sign between `lo` and
/// `hi`, then bisects.
pub fn bisect_expanding<F>(f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let flo = f(lo);
    let mut hi = hi;
    for _ in 0..200 {
        let fhi = f(hi);
        if fhi == 0.0 || fhi.signum() != flo.signum() {
            return bisect(&f, lo, hi);
        }
        hi = lo + 2.0 * (hi - lo);
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::NoBracket { lo, hi })
}

/// Sign-change scan on a uniform grid followed by bisection of every
/// bracketing cell. Tangential roots are not detected.
pub fn scan_roots<F>(f: F, lo: f64, hi: f64, step: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let mut roots = Vec::new();
    if !(hi > lo) || !(step > 0.0) {
        return roots;
    }
    let cells = ((hi - lo) / step).ceil() as usize;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=cells {
        let x1 = if i == cells { hi } else { lo + step * i as f64 };
        let f1 = f(x1);
        if f1 == 0.0 {
            roots.push(x1);
        } else if f0 != 0.0 && f0.signum() != f1.signum() {
            if let Ok(r) = bisect(&f, x0, x1) {
                roots.push(r);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}
