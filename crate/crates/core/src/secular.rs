//! Characteristic functions and negative eigenvalues.
//!
//! Eigenvalues are the squares of real zeros of
//! `cos kε · sin k` (rank 2), `g0(ε, k)` (rank 1) or `h0(ε, k)` (rank 0).
//! Negative eigenvalues `λ = -κ²` correspond to `k = iκ`; after dividing by
//! `cosh κε · sinh κ` the equations only involve `κ coth κ` and
//! `κ tanh κε` and stay finite for any `κ`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::counting;
use crate::hyperbolic::{solve_x_coth_x, solve_x_tanh_x, x_coth_x};
use crate::roots::{bisect, bisect_expanding, scan_roots};
use crate::vertex_model::{solve_kappa0, solve_kappa1, EigKind, VertexCondition, ZParam};
use crate::{Error, Result};

/// Largest `ε` accepted by [`find_negative_eigenvalues`].
pub const EPS_CEILING: f64 = 0.2;

/// One negative eigenvalue `λ = -κ²` at a given `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub epsilon: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub kind: Option<EigKind>,
    pub alpha_predicted: Option<f64>,
}

impl SpectralPoint {
    pub fn new(epsilon: f64, kappa: f64, kind: Option<EigKind>, alpha: Option<f64>) -> Self {
        SpectralPoint {
            epsilon,
            kappa,
            lambda: -kappa * kappa,
            kind,
            alpha_predicted: alpha,
        }
    }
}

/// Least-squares fit of `log|λ|` against `log ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    /// Nearest admissible exponent, one of `0`, `-2/3`, `-1`.
    pub rate: f64,
    /// Median of `|λ| ε^{-rate}`.
    pub coeff: f64,
    /// Root-mean-square residual of the log-log regression.
    pub residual: f64,
}

/// `g0(ε,k) = (k cos k + μ sin k) cos kε - |z|² (k sin kε - μ cos kε) sin k`.
pub fn g0(epsilon: f64, k: Complex64, z: Complex64, mu: f64) -> Complex64 {
    let ke = k * epsilon;
    (k * k.cos() + mu * k.sin()) * ke.cos() - z.norm_sqr() * (k * ke.sin() - mu * ke.cos()) * k.sin()
}

/// `h0(ε,k) = -(k sin kε - a cos kε)(k cos k + b sin k) - |c|² sin k cos kε`.
pub fn h0(epsilon: f64, k: Complex64, a: f64, b: f64, c: Complex64) -> Complex64 {
    let ke = k * epsilon;
    -(k * ke.sin() - a * ke.cos()) * (k * k.cos() + b * k.sin()) - c.norm_sqr() * k.sin() * ke.cos()
}

/// Divided characteristic function on the negative axis, `k = iκ`.
///
/// Zero exactly at `κ` with `-κ²` an eigenvalue. Rank 2 returns the
/// constant `1` (no negative spectrum).
pub fn secular_neg(vc: &VertexCondition, epsilon: f64, kappa: f64) -> f64 {
    let kt = kappa * (kappa * epsilon).tanh();
    match *vc {
        VertexCondition::Rank2 => 1.0,
        VertexCondition::Rank1 {
            z: ZParam::Infinite,
            mu,
        } => kt + mu,
        VertexCondition::Rank1 {
            z: ZParam::Finite(z),
            mu,
        } => {
            let z2 = z.norm_sqr();
            x_coth_x(kappa) + z2 * kt + mu * (1.0 + z2)
        }
        VertexCondition::Rank0 { a, b, c } => (kt + a) * (x_coth_x(kappa) + b) - c.norm_sqr(),
    }
}

/// Number of negative eigenvalues for any `ε > 0`.
pub fn expected_count(vc: &VertexCondition) -> usize {
    match *vc {
        VertexCondition::Rank2 => 0,
        VertexCondition::Rank1 {
            z: ZParam::Infinite,
            mu,
        } => usize::from(mu < 0.0),
        VertexCondition::Rank1 {
            z: ZParam::Finite(z),
            mu,
        } => usize::from(-mu * (1.0 + z.norm_sqr()) > 1.0),
        VertexCondition::Rank0 { a, b, c } => counting::closed_form_count(a, b, c).0,
    }
}

/// Solves `f(κ) = 0` in a scaled chart `κ = t · scale` on `[t_lo, t_hi]`
/// and falls back to an expanding bracket from `kappa_lo` when the chart
/// bracket shows no sign change.
fn chart_root<F>(f: F, scale: f64, t_lo: f64, t_hi: f64, kappa_lo: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let t_lo = t_lo.max(kappa_lo / scale);
    if t_lo < t_hi {
        if let Ok(t) = bisect(|t| f(t * scale), t_lo, t_hi) {
            return Ok(t * scale);
        }
    }
    bisect_expanding(&f, kappa_lo, 2.0 * kappa_lo + 1.0)
}

/// All negative eigenvalues at a given `ε ∈ (0, 0.2]`, sorted by `κ`.
///
/// Bounded roots are located in the original variable `κ`, square-root
/// roots in `ρ = κ√ε` near `√|a|` (or `√|μ|`), and cubic-root roots in
/// `τ = κε^{1/3}` near `|c|^{2/3}`. For rank 0 the search is anchored on the
/// zeros `κ_A` of `κ tanh κε + a` and `κ_b` of `κ coth κ + b`: both factors of
/// the divided equation are increasing, so there is at most one root below
/// `min(κ_A, κ_b)` and exactly one above `max(κ_A, κ_b)`.
pub fn find_negative_eigenvalues(vc: &VertexCondition, epsilon: f64) -> Result<Vec<SpectralPoint>> {
    let vc = vc.validate()?;
    if !(epsilon > 0.0 && epsilon <= EPS_CEILING) {
        return Err(Error::InvalidParameter(format!(
            "ε = {epsilon} outside (0, {EPS_CEILING}]"
        )));
    }
    let f = |k: f64| secular_neg(&vc, epsilon, k);
    let sqrt_eps = epsilon.sqrt();
    let cbrt_eps = epsilon.cbrt();
    let mut roots: Vec<(f64, EigKind)> = Vec::new();

    match vc {
        VertexCondition::Rank2 => {}
        VertexCondition::Rank1 {
            z: ZParam::Infinite,
            mu,
        } => {
            if mu < 0.0 {
                let r = (-mu).sqrt();
                let k = chart_root(f, 1.0 / sqrt_eps, 0.5 * r, 2.0 * r, 0.0)?;
                roots.push((k, EigKind::S));
            }
        }
        VertexCondition::Rank1 { z, mu } => {
            if expected_count(&vc) == 1 {
                // The |z|² κ tanh κε term is non-negative, so κ(ε) ≤ κ1.
                let k1 = solve_kappa1(z, mu)?;
                let k = chart_root(f, 1.0, 1e-12, k1, 0.0)?;
                roots.push((k, EigKind::B));
            }
        }
        VertexCondition::Rank0 { a, b, c } => {
            let c2 = c.norm_sqr();
            let k_a = if a < 0.0 {
                Some(solve_x_tanh_x(-a * epsilon)? / epsilon)
            } else {
                None
            };
            let k_b = if b < -1.0 { Some(solve_x_coth_x(-b)?) } else { None };
            if c2 == 0.0 {
                // Decoupled: the zeros of the two factors are the roots.
                if let Some(k) = k_b {
                    roots.push((k, EigKind::B));
                }
                if let Some(k) = k_a {
                    roots.push((k, EigKind::S));
                }
            } else {
                if let (Some(ka), Some(kb)) = (k_a, k_b) {
                    if a * (1.0 + b) > c2 {
                        let k = bisect(f, 0.0, ka.min(kb))?;
                        roots.push((k, EigKind::B));
                    }
                }
                let m = k_a.unwrap_or(0.0).max(k_b.unwrap_or(0.0));
                if m > 0.0 || a * (1.0 + b) < c2 {
                    let (k, kind) = if a < 0.0 {
                        let r = (-a).sqrt();
                        (chart_root(f, 1.0 / sqrt_eps, 0.5 * r, 2.0 * r, m)?, EigKind::S)
                    } else if a == 0.0 {
                        let r = c2.cbrt();
                        (chart_root(f, 1.0 / cbrt_eps, 0.5 * r, 2.0 * r, m)?, EigKind::C)
                    } else {
                        let k0 = solve_kappa0(a, b, c)?;
                        let hi = k0 * (1.0 + 1e-12) + 1e-12;
                        (chart_root(f, 1.0, m, hi, m)?, EigKind::B)
                    };
                    roots.push((k, kind));
                }
            }
        }
    }

    roots.sort_by(|x, y| x.0.total_cmp(&y.0));
    let expected = expected_count(&vc);
    let collided = roots
        .windows(2)
        .any(|w| (w[1].0 - w[0].0).abs() <= 1e-8 * w[1].0);
    if roots.len() != expected || collided {
        return Err(Error::CountMismatch {
            epsilon,
            found: if collided { roots.len() - 1 } else { roots.len() },
            expected,
        });
    }

    let predictions = vc.classify()?;
    Ok(roots
        .into_iter()
        .map(|(k, kind)| {
            let alpha = predictions.iter().find(|p| p.kind == kind).map(|p| p.alpha);
            SpectralPoint::new(epsilon, k, Some(kind), alpha)
        })
        .collect())
}

/// Real-axis characteristic function used by [`scan_real_poles`] and its
/// magnitude scale.
pub fn pole_function(vc: &VertexCondition, epsilon: f64, k: f64) -> (f64, f64) {
    let kc = Complex64::new(k, 0.0);
    match *vc {
        VertexCondition::Rank2 => ((k * epsilon).cos() * k.sin(), 1.0),
        VertexCondition::Rank1 {
            z: ZParam::Infinite,
            mu,
        } => {
            let v = (k * (k * epsilon).sin() - mu * (k * epsilon).cos()) * k.sin();
            (v, k.abs() + mu.abs() + 1.0)
        }
        VertexCondition::Rank1 {
            z: ZParam::Finite(z),
            mu,
        } => (
            g0(epsilon, kc, z, mu).re,
            (k.abs() + mu.abs() + 1.0) * (1.0 + z.norm_sqr()),
        ),
        VertexCondition::Rank0 { a, b, c } => (
            h0(epsilon, kc, a, b, c).re,
            (k.abs() + a.abs() + 1.0) * (k.abs() + b.abs() + 1.0) + c.norm_sqr(),
        ),
    }
}

/// Real zeros `k ∈ (0, k_max]` of the characteristic function: the square
/// roots of the non-negative eigenvalues. Requires `k_max ≤ 200/ε`.
///
/// A sign scan with step `π/64` (never coarser than `π/(64ε)`) brackets
/// the zeros; tangential zeros are missed.
pub fn scan_real_poles(vc: &VertexCondition, epsilon: f64, k_max: f64) -> Result<Vec<f64>> {
    let vc = vc.validate()?;
    if !(epsilon > 0.0) || !(k_max > 0.0) || k_max > 200.0 / epsilon {
        return Err(Error::InvalidParameter(format!(
            "k_max = {k_max} must lie in (0, 200/ε] for ε = {epsilon}"
        )));
    }
    let pi = std::f64::consts::PI;
    let step = f64::min(pi / 64.0, pi / (64.0 * epsilon));
    let lo = f64::min(1e-6, step / 100.0);
    Ok(scan_roots(|k| pole_function(&vc, epsilon, k).0, lo, k_max, step))
}

const ADMISSIBLE_RATES: [f64; 3] = [0.0, -2.0 / 3.0, -1.0];

/// Fits `|λ| ≈ α ε^{p}` over an ε sweep of a single branch.
pub fn fit_rate(points: &[SpectralPoint]) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    let kind = points[0].kind;
    if points.iter().any(|p| p.kind != kind) {
        return Err(Error::InvalidParameter("rate fit mixes eigenvalue kinds".into()));
    }
    let mut eps: Vec<f64> = points.iter().map(|p| p.epsilon).collect();
    eps.sort_by(f64::total_cmp);
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("rate fit needs distinct ε".into()));
    }

    let xs: Vec<f64> = points.iter().map(|p| p.epsilon.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.lambda.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();

    let rate = ADMISSIBLE_RATES
        .iter()
        .copied()
        .min_by(|p, q| (slope - p).abs().total_cmp(&(slope - q).abs()))
        .unwrap();
    if (slope - rate).abs() > 0.15 {
        return Err(Error::AmbiguousRate { slope });
    }
    let mut coeffs: Vec<f64> = points
        .iter()
        .map(|p| p.lambda.abs() * p.epsilon.powf(-rate))
        .collect();
    coeffs.sort_by(f64::total_cmp);
    let m = coeffs.len();
    let coeff = if m % 2 == 1 {
        coeffs[m / 2]
    } else {
        0.5 * (coeffs[m / 2 - 1] + coeffs[m / 2])
    };
    Ok(RateFit {
        slope,
        rate,
        coeff,
        residual,
    })
}

/// Default sweep grid: 9 log-spaced values from `1e-2` down to `1e-6`.
pub fn default_eps_grid() -> Vec<f64> {
    (0..9).map(|i| 10f64.powf(-2.0 - 0.5 * i as f64)).collect()
}

/// Runs [`find_negative_eigenvalues`] over a grid of `ε`, keeping the grid
/// order.
pub fn sweep(vc: &VertexCondition, eps_grid: &[f64]) -> Result<Vec<SpectralPoint>> {
    let mut out = Vec::new();
    for &eps in eps_grid {
        out.extend(find_negative_eigenvalues(vc, eps)?);
    }
    Ok(out)
}

/// Groups sweep output by eigenvalue kind.
pub fn branches(points: &[SpectralPoint]) -> BTreeMap<EigKind, Vec<SpectralPoint>> {
    let mut map: BTreeMap<EigKind, Vec<SpectralPoint>> = BTreeMap::new();
    for p in points {
        if let Some(kind) = p.kind {
            map.entry(kind).or_default().push(*p);
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn preview() -> VertexCondition {
        VertexCondition::Rank0 {
            a: 0.0,
            b: 0.0,
            c: c(-1.0),
        }
    }

    #[test]
    fn g0_examples() {
        let v = g0(0.0, c(PI / 2.0), c(0.0), 0.0);
        assert!(v.norm() < 1e-15);
        for eps in [0.0, 0.1, 0.37] {
            let v = g0(eps, c(PI), c(0.0), 0.0);
            assert!((v - c(-PI * (PI * eps).cos())).norm() < 1e-14);
        }
    }

    #[test]
    fn h0_examples() {
        let (a, b, cc) = (0.7, -1.3, Complex64::new(0.4, -0.9));
        for k in [c(0.3), c(2.0), Complex64::new(1.0, 1.0)] {
            let v = h0(0.0, k, a, b, cc);
            let want = (a * b - cc.norm_sqr()) * k.sin() + a * k * k.cos();
            assert!((v - want).norm() < 1e-13);
            let eps = 0.05;
            let v = h0(eps, k, 0.0, b, c(0.0));
            let want = -k * (k * eps).sin() * (k * k.cos() + b * k.sin());
            assert!((v - want).norm() < 1e-13);
        }
        let k = Complex64::new(0.0, 1.0).sqrt();
        for eps in [1e-3, 1e-2, 0.1] {
            assert!(h0(eps, k, 0.0, 0.0, c(-1.0)).norm() > 1e-6);
        }
    }

    #[test]
    fn secular_neg_examples() {
        let eps: f64 = 1e-6;
        let kappa = eps.powf(-1.0 / 3.0);
        assert!(secular_neg(&preview(), eps, kappa).abs() < 1e-3);
        let z_inf = VertexCondition::Rank1 {
            z: ZParam::Infinite,
            mu: 1.0,
        };
        for k in [1e-3, 1.0, 1e3] {
            assert!(secular_neg(&z_inf, 0.01, k) > 0.0);
        }
        let vc = VertexCondition::Rank1 {
            z: ZParam::Finite(c(0.0)),
            mu: -2.0,
        };
        let k1 = solve_kappa1(ZParam::Finite(c(0.0)), -2.0).unwrap();
        assert!(secular_neg(&vc, 0.0, k1).abs() < 1e-14);
    }

    #[test]
    fn secular_neg_agrees_with_g0_h0() {
        let eps = 0.05;
        for kappa in [0.3, 1.7, 4.0] {
            let k = Complex64::new(0.0, kappa);
            let norm = (kappa * eps).cosh() * kappa.sinh();
            let (z, mu) = (Complex64::new(0.5, -0.5), -1.5);
            let vc = VertexCondition::Rank1 {
                z: ZParam::Finite(z),
                mu,
            };
            // g0(ε, iκ) = i cosh κε sinh κ · secular
            let ratio = g0(eps, k, z, mu) / Complex64::new(0.0, norm);
            assert!((ratio.re - secular_neg(&vc, eps, kappa)).abs() < 1e-12);
            let (a, b, cc) = (-0.4, 0.2, Complex64::new(0.1, 0.7));
            let vc = VertexCondition::Rank0 { a, b, c: cc };
            // h0(ε, iκ) = i cosh κε sinh κ · secular
            let ratio = h0(eps, k, a, b, cc) / Complex64::new(0.0, norm);
            assert!((ratio.re - secular_neg(&vc, eps, kappa)).abs() < 1e-12);
        }
    }

    #[test]
    fn preview_example_single_root() {
        let pts = find_negative_eigenvalues(&preview(), 1e-3).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].kind, Some(EigKind::C));
        let scaled = pts[0].lambda * 1e-3f64.powf(2.0 / 3.0);
        assert!((-1.3..=-0.7).contains(&scaled));
        // mpmath: λ ε^{2/3} = -1.0000222196967258 at ε = 1e-3
        assert!((scaled + 1.000_022_219_696_725_8).abs() < 1e-12);
    }

    #[test]
    fn two_root_case() {
        let vc = VertexCondition::Rank0 {
            a: -1.0,
            b: -3.0,
            c: c(0.0),
        };
        let eps = 1e-3;
        let pts = find_negative_eigenvalues(&vc, eps).unwrap();
        assert_eq!(pts.len(), 2);
        let k0 = solve_x_coth_x(3.0).unwrap();
        assert_eq!(pts[0].kind, Some(EigKind::B));
        assert!((pts[0].kappa - k0).abs() < 1e-12);
        assert_eq!(pts[1].kind, Some(EigKind::S));
        let rho = pts[1].kappa * eps.sqrt();
        assert!((rho - 1.0).abs() < 1e-3);
    }

    #[test]
    fn two_root_case_coupled() {
        let vc = VertexCondition::Rank0 {
            a: -1.0,
            b: -3.0,
            c: Complex64::new(0.6, 0.8),
        };
        for eps in [1e-1, 1e-3, 1e-6] {
            let pts = find_negative_eigenvalues(&vc, eps).unwrap();
            assert_eq!(pts.len(), 2);
            for p in &pts {
                assert!(secular_neg(&vc, eps, p.kappa).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn rank2_has_none() {
        for eps in [1e-6, 1e-2, 0.2] {
            assert!(find_negative_eigenvalues(&VertexCondition::Rank2, eps)
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn rejects_eps_above_ceiling() {
        assert!(find_negative_eigenvalues(&preview(), 0.3).is_err());
        assert!(find_negative_eigenvalues(&preview(), 0.0).is_err());
    }

    #[test]
    fn square_root_chart_matches_unscaled_equation() {
        let vc = VertexCondition::Rank0 {
            a: -2.0,
            b: 0.5,
            c: c(1.0),
        };
        for eps in [1e-2, 1e-4, 1e-6] {
            let pts = find_negative_eigenvalues(&vc, eps).unwrap();
            let s = pts.iter().find(|p| p.kind == Some(EigKind::S)).unwrap();
            let ka = solve_x_tanh_x(2.0 * eps).unwrap() / eps;
            let direct =
                bisect_expanding(|k| secular_neg(&vc, eps, k), ka, 2.0 * ka).unwrap();
            assert!((direct - s.kappa).abs() <= 1e-10 * s.kappa);
        }
    }

    #[test]
    fn square_root_remainder_is_order_sqrt_eps() {
        let vc = VertexCondition::Rank0 {
            a: -1.0,
            b: 0.0,
            c: c(1.0),
        };
        let dev: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&e| {
                let p = find_negative_eigenvalues(&vc, e).unwrap()[0];
                (p.kappa * e.sqrt() - 1.0).abs()
            })
            .collect();
        // each factor 100 in ε should shrink the deviation by ~10
        assert!(dev[1] < dev[0] / 5.0 && dev[2] < dev[1] / 5.0, "{dev:?}");
    }

    #[test]
    fn rank1_count_matches_closed_form() {
        for (zr, mu, want) in [(0.0, -2.0, 1), (0.0, -1.0, 0), (-1.0, -0.6, 1), (2.0, 0.1, 0)] {
            let vc = VertexCondition::Rank1 {
                z: ZParam::Finite(c(zr)),
                mu,
            };
            assert_eq!(find_negative_eigenvalues(&vc, 1e-3).unwrap().len(), want);
        }
    }

    #[test]
    fn scan_rank2_decoupled() {
        let roots = scan_real_poles(&VertexCondition::Rank2, 0.1, 10.0).unwrap();
        assert_eq!(roots.len(), 3);
        for (r, n) in roots.iter().zip(1..) {
            assert!((r - n as f64 * PI).abs() < 1e-12);
        }
        assert!(scan_real_poles(&VertexCondition::Rank2, 0.1, 2001.0).is_err());
    }

    #[test]
    fn scan_kirchhoff_lowest_near_half_pi() {
        let vc = VertexCondition::kirchhoff();
        let roots = scan_real_poles(&vc, 1e-4, 5.0).unwrap();
        // independent bisection of g0(1e-4, ·) on [1, 2]
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        let g = |k: f64| g0(1e-4, c(k), c(-1.0), 0.0).re;
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if g(m).signum() == g(lo).signum() {
                lo = m;
            } else {
                hi = m;
            }
        }
        assert!((roots[0] - lo).abs() < 1e-10);
        assert!((roots[0] - PI / 2.0).abs() < 1e-3);
        for r in roots {
            let (v, scale) = pole_function(&vc, 1e-4, r);
            assert!(v.abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn fit_rate_examples() {
        let pts: Vec<SpectralPoint> = [1e-2, 1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&e| SpectralPoint::new(e, 2.0, Some(EigKind::B), None))
            .collect();
        let fit = fit_rate(&pts).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert_eq!(fit.rate, 0.0);
        assert!((fit.coeff - 4.0).abs() < 1e-12);

        let grid: Vec<f64> = (0..9).map(|i| 10f64.powf(-3.0 - 0.375 * i as f64)).collect();
        let pts = sweep(&preview(), &grid).unwrap();
        let fit = fit_rate(&pts).unwrap();
        assert!((fit.slope + 2.0 / 3.0).abs() < 0.02);
        assert!((fit.coeff - 1.0).abs() < 0.01);

        let zinf = VertexCondition::Rank1 {
            z: ZParam::Infinite,
            mu: -1.0,
        };
        let fit = fit_rate(&sweep(&zinf, &default_eps_grid()).unwrap()).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.02);
        assert!((fit.coeff - 1.0).abs() < 0.02);
    }

    #[test]
    fn fit_rate_rejects_ambiguous_slope() {
        let pts: Vec<SpectralPoint> = [1e-2, 1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&e: &f64| SpectralPoint::new(e, e.powf(-0.2), Some(EigKind::S), None))
            .collect();
        assert!(matches!(fit_rate(&pts), Err(Error::AmbiguousRate { .. })));
        assert!(fit_rate(&pts[..3]).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(200))]
        #[test]
        fn roots_have_small_residual(a in -5.0..5.0f64, b in -5.0..5.0f64,
                                     r in 0.0..3.0f64, th in 0.0..6.3f64,
                                     le in -6.0..-1.0f64) {
            let eps = 10f64.powf(le);
            let vc = VertexCondition::Rank0 { a, b, c: Complex64::from_polar(r, th) };
            let pts = find_negative_eigenvalues(&vc, eps).unwrap();
            proptest::prop_assert_eq!(pts.len(), vc.classify().unwrap().len());
            for p in pts {
                proptest::prop_assert!(secular_neg(&vc, eps, p.kappa).abs() <= 1e-9,
                    "residual {} at κ={}", secular_neg(&vc, eps, p.kappa), p.kappa);
            }
        }

        #[test]
        fn rank1_roots(zr in -3.0..3.0f64, zi in -3.0..3.0f64, mu in -5.0..5.0f64,
                       le in -6.0..-1.0f64) {
            let eps = 10f64.powf(le);
            let vc = VertexCondition::Rank1 { z: ZParam::Finite(Complex64::new(zr, zi)), mu };
            let pts = find_negative_eigenvalues(&vc, eps).unwrap();
            let want = usize::from(-mu * (1.0 + zr * zr + zi * zi) > 1.0);
            proptest::prop_assert_eq!(pts.len(), want);
            for p in pts {
                proptest::prop_assert!(secular_neg(&vc, eps, p.kappa).abs() <= 1e-9);
            }
        }
    }
}
