//! Overflow-safe hyperbolic expressions.
//!
//! Eigenvalues of square-root type push `κ` to `10³` and beyond, so `sinh κ`
//! and `cosh κ` are never formed for large arguments. Everything here is
//! expressed through `e^{-2x}` and `expm1`.

use crate::roots::bisect;
use crate::{Error, Result};

/// `coth x = 1 + 2e^{-2x} / (1 - e^{-2x})` for `x > 0`.
pub fn coth(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x > 1.0 {
        let q = (-2.0 * x).exp();
        1.0 + 2.0 * q / (1.0 - q)
    } else {
        1.0 / x.tanh()
    }
}

/// `x coth x`, continuous at `x = 0` where it equals 1.
pub fn x_coth_x(x: f64) -> f64 {
    let x = x.abs();
    if x < 1e-4 {
        1.0 + x * x / 3.0
    } else if x > 1.0 {
        x * coth(x)
    } else {
        x / x.tanh()
    }
}

/// `x tanh x`.
pub fn x_tanh_x(x: f64) -> f64 {
    x * x.tanh()
}

/// `sinh x - x`, accurate for small `x` where the difference cancels.
pub fn sinh_minus_id(x: f64) -> f64 {
    if x.abs() < 1.0 {
        // x³/3! + x⁵/5! + ...
        let x2 = x * x;
        let mut term = x * x2 / 6.0;
        let mut sum = term;
        let mut n = 3.0;
        while term.abs() > 1e-17 * sum.abs() {
            term *= x2 / ((n + 1.0) * (n + 2.0));
            sum += term;
            n += 2.0;
        }
        sum
    } else {
        x.sinh() - x
    }
}

/// `Φ(κ) = 2 coth κ - 2κ / sinh² κ = (sinh 2κ - 2κ) / sinh² κ`.
///
/// Behaves like `4κ/3` near zero and `2 + O(e^{-2κ})` for large `κ`.
pub fn phi(kappa: f64) -> f64 {
    debug_assert!(kappa > 0.0);
    if kappa > 20.0 {
        let q = (-2.0 * kappa).exp();
        2.0 * coth(kappa) - 8.0 * kappa * q / ((1.0 - q) * (1.0 - q))
    } else {
        let s = kappa.sinh();
        sinh_minus_id(2.0 * kappa) / (s * s)
    }
}

/// `sinh(κx) / sinh κ` for `κ > 0`, `x ∈ [0, 1]`.
pub fn sinh_ratio(kappa: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    // e^{-κ(1-x)} (1 - e^{-2κx}) / (1 - e^{-2κ})
    (-kappa * (1.0 - x)).exp() * (-2.0 * kappa * x).exp_m1() / (-2.0 * kappa).exp_m1()
}

/// `cosh(κx) / sinh κ` for `κ > 0`, `x ∈ [0, 1]`.
pub fn cosh_sinh_ratio(kappa: f64, x: f64) -> f64 {
    // e^{-κ(1-x)} (1 + e^{-2κx}) / (1 - e^{-2κ})
    -(-kappa * (1.0 - x)).exp() * (1.0 + (-2.0 * kappa * x).exp()) / (-2.0 * kappa).exp_m1()
}

/// The unique `κ > 0` with `κ coth κ = rhs`; requires `rhs > 1`.
///
/// `κ ↦ κ coth κ` increases strictly from 1, so the bracket
/// `[1e-12, max(10, rhs + 2)]` always contains exactly one sign change.
pub fn solve_x_coth_x(rhs: f64) -> Result<f64> {
    if !(rhs > 1.0) || !rhs.is_finite() {
        return Err(Error::NoRoot { rhs });
    }
    let hi = f64::max(10.0, rhs + 2.0);
    bisect(|k| x_coth_x(k) - rhs, 1e-12, hi)
}

/// The unique `τ > 0` with `τ tanh τ = rhs`; requires `rhs > 0`.
pub fn solve_x_tanh_x(rhs: f64) -> Result<f64> {
    if !(rhs > 0.0) || !rhs.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "τ tanh τ = {rhs} needs a positive right-hand side"
        )));
    }
    bisect(|t| x_tanh_x(t) - rhs, 0.0, rhs + 1.0)
}
