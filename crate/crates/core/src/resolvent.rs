//! Explicit resolvent `(H_ε - λ)^{-1}`.
//!
//! For `f = (f_s, f_e)` the solution is
//! `u_e = L f_e + C_e sin kx` and `u_s(y) = L^ε f_s (y) + C_s cos εky`,
//! with `k = √λ` and the short edge rescaled to `y = x/ε ∈ [0, 1]`.
//! The coefficients solve the 2×2 system coming from the vertex condition.

use num_complex::Complex64;
use serde::Serialize;

use crate::grid::GridFunction;
use crate::vertex_model::{VertexCondition, ZParam};
use crate::{Error, Result};

/// Default relative threshold for [`Error::NearPole`].
pub const DEFAULT_POLE_TOL: f64 = 1e-10;

/// Default number of grid nodes per edge.
pub const DEFAULT_NODES: usize = 257;

type C = Complex64;

fn c0() -> C {
    C::new(0.0, 0.0)
}

/// Right-hand side `(f_s, f_e)`; `f_s` lives in the rescaled variable `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forcing {
    pub f_s: GridFunction,
    pub f_e: GridFunction,
}

impl Forcing {
    pub fn new(f_s: GridFunction, f_e: GridFunction) -> Self {
        Forcing { f_s, f_e }
    }

    pub fn short_only(&self) -> Result<Forcing> {
        Ok(Forcing::new(self.f_s.clone(), GridFunction::zeros(self.f_e.n())?))
    }

    pub fn long_only(&self) -> Result<Forcing> {
        Ok(Forcing::new(GridFunction::zeros(self.f_s.n())?, self.f_e.clone()))
    }
}

/// `W`, `W'` with `U = V - W`, `U' = V' - W'` where `V`, `V'` are the
/// boundary values of the homogeneous parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub w: [C; 2],
    pub wp: [C; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSolution {
    pub c_s: C,
    pub c_e: C,
    /// Short-edge solution in the variable `y`.
    pub u_s: GridFunction,
    pub u_e: GridFunction,
    pub lambda: C,
    pub epsilon: f64,
}

/// Principal square root with `Im √λ ≥ 0`.
pub fn sqrt_lambda(lambda: C) -> C {
    let k = lambda.sqrt();
    if k.im < 0.0 {
        -k
    } else {
        k
    }
}

/// Particular solution `p ∫₀ˣ sin K(x-t) f(t) dt` written as
/// `p (sin Kx · A(x) - cos Kx · B(x))`, `A = ∫ cos(Kt) f`, `B = ∫ sin(Kt) f`.
struct Convolution {
    p: C,
    kk: C,
    a: Vec<C>,
    b: Vec<C>,
}

impl Convolution {
    fn new(f: &GridFunction, p: C, kk: C) -> Self {
        let h = f.step();
        let cos_f: Vec<C> = f
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| (kk * (j as f64 * h)).cos() * v)
            .collect();
        let sin_f: Vec<C> = f
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| (kk * (j as f64 * h)).sin() * v)
            .collect();
        Convolution {
            p,
            kk,
            a: crate::grid::cumulative(&cos_f, h),
            b: crate::grid::cumulative(&sin_f, h),
        }
    }

    fn value(&self, j: usize, x: f64) -> C {
        let kx = self.kk * x;
        self.p * (kx.sin() * self.a[j] - kx.cos() * self.b[j])
    }

    fn derivative(&self, j: usize, x: f64) -> C {
        let kx = self.kk * x;
        self.p * self.kk * (kx.cos() * self.a[j] + kx.sin() * self.b[j])
    }

    /// Second derivative divided by `s²`, with `f` the forcing at node `j`.
    fn second_scaled(&self, j: usize, x: f64, f: C, s: f64) -> C {
        let kx = self.kk * x;
        let ks = self.kk / s;
        self.p * ks / s * (self.kk * (-kx.sin() * self.a[j] + kx.cos() * self.b[j]) + f)
    }

    fn samples(&self) -> Vec<C> {
        let n = self.a.len();
        let h = 1.0 / (n - 1) as f64;
        (0..n).map(|j| self.value(j, j as f64 * h)).collect()
    }
}

fn long_conv(f_e: &GridFunction, k: C) -> Convolution {
    Convolution::new(f_e, -k.inv(), k)
}

fn short_conv(f_s: &GridFunction, k: C, epsilon: f64) -> Convolution {
    Convolution::new(f_s, -k.inv() * epsilon, k * epsilon)
}

fn check_lambda(lambda: C) -> Result<()> {
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::InvalidParameter("λ must be finite".into()));
    }
    if lambda.im == 0.0 && lambda.re >= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "λ = {lambda} lies on the non-negative real axis"
        )));
    }
    Ok(())
}

fn check_nonzero(lambda: C) -> Result<()> {
    if !lambda.re.is_finite() || !lambda.im.is_finite() || lambda == c0() {
        return Err(Error::InvalidParameter("λ must be finite and nonzero".into()));
    }
    Ok(())
}

fn check_eps(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} must be positive")));
    }
    Ok(())
}

/// `(L f_e)(x) = -(1/√λ) ∫₀ˣ sin √λ(x-t) f_e(t) dt` on the grid of `f_e`.
pub fn apply_l(f_e: &GridFunction, lambda: C) -> Result<GridFunction> {
    check_nonzero(lambda)?;
    GridFunction::new(long_conv(f_e, sqrt_lambda(lambda)).samples())
}

/// `(L^ε f_s)(y) = -(ε/√λ) ∫₀ʸ sin ε√λ(y-t) f_s(t) dt`.
pub fn apply_l_eps(f_s: &GridFunction, lambda: C, epsilon: f64) -> Result<GridFunction> {
    check_nonzero(lambda)?;
    check_eps(epsilon)?;
    GridFunction::new(short_conv(f_s, sqrt_lambda(lambda), epsilon).samples())
}

fn boundary_from(short: &Convolution, long: &Convolution, epsilon: f64) -> BoundaryData {
    let n_s = short.a.len();
    let n_e = long.a.len();
    BoundaryData {
        w: [-short.value(n_s - 1, 1.0), -long.value(n_e - 1, 1.0)],
        // U'_1 = -u_s'(y=1)/ε and U'_2 = -u_e'(1)
        wp: [
            short.derivative(n_s - 1, 1.0) / epsilon,
            long.derivative(n_e - 1, 1.0),
        ],
    }
}

/// The integrals `W`, `W'` of the forcing.
pub fn boundary_data(f: &Forcing, lambda: C, epsilon: f64) -> Result<BoundaryData> {
    check_nonzero(lambda)?;
    check_eps(epsilon)?;
    let k = sqrt_lambda(lambda);
    Ok(boundary_from(
        &short_conv(&f.f_s, k, epsilon),
        &long_conv(&f.f_e, k),
        epsilon,
    ))
}

fn guard(den: C, name: &'static str, k: C, lambda: C, tol: f64) -> Result<C> {
    if den.norm() < tol * (k.norm() + 1.0) {
        return Err(Error::NearPole {
            lambda: format!("{lambda}"),
            denominator: name,
            modulus: den.norm(),
        });
    }
    Ok(den)
}

/// `(C_s, C_e)` with the default pole threshold.
pub fn coefficients(vc: &VertexCondition, bd: &BoundaryData, lambda: C, epsilon: f64) -> Result<(C, C)> {
    coefficients_with_tol(vc, bd, lambda, epsilon, DEFAULT_POLE_TOL)
}

/// `(C_s, C_e)`; fails with `NearPole` when the active denominator is below
/// `pole_tol (|√λ| + 1)`.
pub fn coefficients_with_tol(
    vc: &VertexCondition,
    bd: &BoundaryData,
    lambda: C,
    epsilon: f64,
    pole_tol: f64,
) -> Result<(C, C)> {
    let k = sqrt_lambda(lambda);
    let ke = k * epsilon;
    let (sk, ck) = (k.sin(), k.cos());
    let (ske, cke) = (ke.sin(), ke.cos());
    let [w1, w2] = bd.w;
    let [w1p, w2p] = bd.wp;
    let g = |den, name| guard(den, name, k, lambda, pole_tol);
    Ok(match *vc {
        VertexCondition::Rank2 => (w1 / g(cke, "cos kε")?, w2 / g(sk, "sin k")?),
        VertexCondition::Rank1 {
            z: ZParam::Infinite,
            mu,
        } => {
            let d = g(k * ske - mu * cke, "k sin kε - μ cos kε")?;
            ((w1p - mu * w1) / d, w2 / g(sk, "sin k")?)
        }
        VertexCondition::Rank1 {
            z: ZParam::Finite(z),
            mu,
        } => {
            let z2 = z.norm_sqr();
            let m = mu * (1.0 + z2);
            let d = g(crate::secular::g0(epsilon, k, z, mu), "g0")?;
            let s = w1 + z * w2;
            let c_s = (s * k * ck + (m * w1 - z2 * w1p + z * w2p) * sk) / d;
            let c_e = ((m * w2 + z.conj() * w1p - w2p) * cke - z.conj() * s * k * ske) / d;
            (c_s, c_e)
        }
        VertexCondition::Rank0 { a, b, c } if a == 0.0 && c == c0() => {
            let c_s = w1p / g(k * ske, "k sin kε")?;
            let c_e = (-w2p + b * w2) / g(k * ck + b * sk, "k cos k + b sin k")?;
            (c_s, c_e)
        }
        VertexCondition::Rank0 { a, b, c } => {
            let c2 = c.norm_sqr();
            let det = a * b - c2;
            let d = g(crate::secular::h0(epsilon, k, a, b, c), "h0")?;
            let c_s = ((-w1p + a * w1 + c * w2) * k * ck + (-b * w1p + c * w2p + det * w1) * sk) / d;
            let c_e = ((c.conj() * w1p - a * w2p + det * w2) * cke
                + (w2p - c.conj() * w1 - b * w2) * k * ske)
                / d;
            (c_s, c_e)
        }
    })
}

/// Solves `(H_ε - λ) u = f`.
pub fn resolve(vc: &VertexCondition, epsilon: f64, lambda: C, f: &Forcing) -> Result<ResolventSolution> {
    resolve_with_tol(vc, epsilon, lambda, f, DEFAULT_POLE_TOL)
}

pub fn resolve_with_tol(
    vc: &VertexCondition,
    epsilon: f64,
    lambda: C,
    f: &Forcing,
    pole_tol: f64,
) -> Result<ResolventSolution> {
    let vc = vc.validate()?;
    check_lambda(lambda)?;
    check_eps(epsilon)?;
    let k = sqrt_lambda(lambda);
    let short = short_conv(&f.f_s, k, epsilon);
    let long = long_conv(&f.f_e, k);
    let bd = boundary_from(&short, &long, epsilon);
    let (c_s, c_e) = coefficients_with_tol(&vc, &bd, lambda, epsilon, pole_tol)?;
    let ke = k * epsilon;
    let u_s = GridFunction::new(
        short
            .samples()
            .into_iter()
            .enumerate()
            .map(|(j, v)| v + c_s * (ke * f.f_s.x(j)).cos())
            .collect(),
    )?;
    let u_e = GridFunction::new(
        long.samples()
            .into_iter()
            .enumerate()
            .map(|(j, v)| v + c_e * (k * f.f_e.x(j)).sin())
            .collect(),
    )?;
    Ok(ResolventSolution {
        c_s,
        c_e,
        u_s,
        u_e,
        lambda,
        epsilon,
    })
}

/// Largest defect of `sol` in the differential equations and all boundary
/// and vertex conditions. Second derivatives come from differentiating the
/// closed form analytically.
pub fn residual(vc: &VertexCondition, epsilon: f64, lambda: C, f: &Forcing, sol: &ResolventSolution) -> f64 {
    let k = sqrt_lambda(lambda);
    let ke = k * epsilon;
    let short = short_conv(&f.f_s, k, epsilon);
    let long = long_conv(&f.f_e, k);
    let mut worst: f64 = 0.0;

    let n_s = f.f_s.n();
    for j in 0..n_s {
        let y = f.f_s.x(j);
        let fs = f.f_s.values()[j];
        let u2 = short.second_scaled(j, y, fs, epsilon) - sol.c_s * k * k * (ke * y).cos();
        let r = -u2 - lambda * sol.u_s.values()[j] - fs;
        worst = worst.max(r.norm());
    }
    let n_e = f.f_e.n();
    for j in 0..n_e {
        let x = f.f_e.x(j);
        let fe = f.f_e.values()[j];
        let u2 = long.second_scaled(j, x, fe, 1.0) - sol.c_e * k * k * (k * x).sin();
        let r = -u2 - lambda * sol.u_e.values()[j] - fe;
        worst = worst.max(r.norm());
    }

    worst = worst.max(sol.u_e.values()[0].norm());
    let dus0 = short.derivative(0, 0.0);
    worst = worst.max(dus0.norm());

    let u = [sol.u_s.values()[n_s - 1], sol.u_e.values()[n_e - 1]];
    let du_s = short.derivative(n_s - 1, 1.0) - sol.c_s * ke * ke.sin();
    let du_e = long.derivative(n_e - 1, 1.0) + sol.c_e * k * k.cos();
    let up = [-du_s / epsilon, -du_e];
    worst.max(vertex_defect(vc, u, up))
}

/// `max(|P U|, |Q U' - T Q U|)`.
pub fn vertex_defect(vc: &VertexCondition, u: [C; 2], up: [C; 2]) -> f64 {
    let p = vc.projection();
    let q = vc.complement();
    let t = vc.robin();
    let mul = |m: &[[C; 2]; 2], v: [C; 2]| [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
    let pu = mul(&p, u);
    let qu = mul(&q, u);
    let qup = mul(&q, up);
    let tqu = mul(&t, qu);
    let a = (pu[0].norm_sqr() + pu[1].norm_sqr()).sqrt();
    let b = ((qup[0] - tqu[0]).norm_sqr() + (qup[1] - tqu[1]).norm_sqr()).sqrt();
    a.max(b)
}

/// `ε ⟨u_s, v_s⟩ + ⟨u_e, v_e⟩`, the inner product of the unscaled graph.
pub fn weighted_inner(epsilon: f64, u: (&GridFunction, &GridFunction), v: (&GridFunction, &GridFunction)) -> Result<C> {
    Ok(u.0.inner(v.0)? * epsilon + u.1.inner(v.1)?)
}

/// Case of the small-`ε` expansion of the short-edge resolvent part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RellCase {
    /// `R_s f = O(ε²)`.
    Quadratic,
    /// `R_s f = ε B_s f_s + O(ε²)`.
    LinearShort,
    /// `R_s f = B_s f_s + O(ε)`.
    OrderOneShort,
    /// `R_s f = B_e f_e + O(ε)`.
    OrderOneLong,
}

impl RellCase {
    pub fn expected(vc: &VertexCondition) -> RellCase {
        match *vc {
            VertexCondition::Rank2 => RellCase::Quadratic,
            VertexCondition::Rank1 {
                z: ZParam::Infinite,
                mu,
            } => {
                if mu != 0.0 {
                    RellCase::LinearShort
                } else {
                    RellCase::OrderOneShort
                }
            }
            VertexCondition::Rank0 { a, c, .. } if a == 0.0 && c == c0() => RellCase::OrderOneShort,
            _ => RellCase::OrderOneLong,
        }
    }

    /// Predicted `ε`-slopes of `‖R_s (f_s, 0)‖` and `‖R_s (0, f_e)‖`;
    /// `None` means identically zero.
    fn slopes(self) -> (f64, Option<f64>) {
        match self {
            RellCase::Quadratic => (2.0, None),
            RellCase::LinearShort => (1.0, None),
            RellCase::OrderOneShort => (0.0, None),
            RellCase::OrderOneLong => (1.0, Some(0.0)),
        }
    }
}

/// Measured small-`ε` behaviour of the resolvent for a fixed `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadingOrderReport {
    pub eps: Vec<f64>,
    pub expected: RellCase,
    /// Slope of `log ‖R_s (f_s, 0)‖` against `log ε`; `None` if it vanishes.
    pub short_slope: Option<f64>,
    /// Slope of `log ‖R_s (0, f_e)‖`; `None` if it vanishes.
    pub long_slope: Option<f64>,
    /// Order of `‖R_s f - lim‖` from successive differences.
    pub rs_order: Option<f64>,
    /// Order of `‖R_e f - lim‖` from successive differences.
    pub re_order: Option<f64>,
    /// Rank 2 only: `max |R_e f - (B f_e sin kx + L f_e)|`.
    pub b_error: Option<f64>,
    pub consistent: bool,
}

const SLOPE_TOL: f64 = 0.25;

fn l2(g: &GridFunction) -> f64 {
    g.norm_sq().max(0.0).sqrt()
}

/// Local log-log slopes of `ys` against `xs`; `None` if every value is zero,
/// `AmbiguousOrder` if the local slopes disagree.
fn consistent_slope(xs: &[f64], ys: &[f64], what: &str) -> Result<Option<f64>> {
    let scale = ys.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(None);
    }
    if ys.iter().any(|&y| y <= 1e-14 * scale) {
        return Err(Error::AmbiguousOrder(format!("{what}: some norms vanish")));
    }
    let local: Vec<f64> = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] / y[0]).ln() / (x[1] / x[0]).ln())
        .collect();
    let lo = local.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = local.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > 0.3 {
        return Err(Error::AmbiguousOrder(format!("{what}: local slopes {local:?}")));
    }
    Ok(Some(local.iter().sum::<f64>() / local.len() as f64))
}

/// Order of convergence from successive differences of a sequence of grids;
/// `None` if the sequence is constant to roundoff.
fn difference_order(eps: &[f64], seq: &[GridFunction], what: &str) -> Result<Option<f64>> {
    let size = seq.iter().map(l2).fold(0.0, f64::max);
    let diffs: Vec<f64> = seq
        .windows(2)
        .map(|w| w[0].combine(C::new(1.0, 0.0), &w[1], C::new(-1.0, 0.0)).map(|d| l2(&d)))
        .collect::<Result<_>>()?;
    if diffs.iter().all(|&d| d <= 1e-13 * size.max(1e-300)) {
        return Ok(None);
    }
    consistent_slope(&eps[..eps.len() - 1], &diffs, what)
}

/// Estimates the small-`ε` orders of `R_s f` and `R_e f` and checks them
/// against the case predicted by the vertex condition.
pub fn leading_order_probe(vc: &VertexCondition, lambda: C, f: &Forcing, eps_list: &[f64]) -> Result<LeadingOrderReport> {
    let vc = vc.validate()?;
    if eps_list.len() < 4 {
        return Err(Error::InvalidParameter("leading-order probe needs at least 4 ε".into()));
    }
    let mut eps = eps_list.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let ratios: Vec<f64> = eps.windows(2).map(|w| (w[0] / w[1]).ln()).collect();
    if ratios.iter().any(|&r| r <= 0.0)
        || ratios.iter().any(|&r| (r - ratios[0]).abs() > 1e-6 * ratios[0])
    {
        return Err(Error::InvalidParameter("ε list must be log-spaced and distinct".into()));
    }

    let short_f = f.short_only()?;
    let long_f = f.long_only()?;
    let mut full = Vec::new();
    let mut short_norms = Vec::new();
    let mut long_norms = Vec::new();
    for &e in &eps {
        full.push(resolve(&vc, e, lambda, f)?);
        short_norms.push(l2(&resolve(&vc, e, lambda, &short_f)?.u_s));
        long_norms.push(l2(&resolve(&vc, e, lambda, &long_f)?.u_s));
    }
    let short_slope = consistent_slope(&eps, &short_norms, "‖R_s(f_s,0)‖")?;
    let long_slope = consistent_slope(&eps, &long_norms, "‖R_s(0,f_e)‖")?;
    let us: Vec<GridFunction> = full.iter().map(|s| s.u_s.clone()).collect();
    let ue: Vec<GridFunction> = full.iter().map(|s| s.u_e.clone()).collect();
    let rs_order = difference_order(&eps, &us, "R_s")?;
    let re_order = difference_order(&eps, &ue, "R_e")?;

    let b_error = if matches!(vc, VertexCondition::Rank2) {
        let k = sqrt_lambda(lambda);
        let kernel = f.f_e.map(|t, v| (k * (1.0 - t)).sin() * v);
        let b = kernel.integrate() / (k * k.sin());
        let lf = apply_l(&f.f_e, lambda)?;
        let err = full
            .iter()
            .flat_map(|s| {
                s.u_e
                    .values()
                    .iter()
                    .zip(lf.values())
                    .enumerate()
                    .map(|(j, (u, l))| (u - l - b * (k * f.f_e.x(j)).sin()).norm())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max);
        Some(err)
    } else {
        None
    };

    let expected = RellCase::expected(&vc);
    let (want_short, want_long) = expected.slopes();
    let short_ok = f.f_s.is_zero()
        || short_slope.map_or(false, |s| (s - want_short).abs() <= SLOPE_TOL);
    let long_ok = f.f_e.is_zero()
        || match (want_long, long_slope) {
            (None, None) => true,
            (Some(w), Some(s)) => (s - w).abs() <= SLOPE_TOL,
            _ => false,
        };
    let re_ok = re_order.map_or(true, |p| p >= 1.0 - SLOPE_TOL);
    let b_ok = b_error.map_or(true, |e| e <= 1e-6);
    Ok(LeadingOrderReport {
        eps,
        expected,
        short_slope,
        long_slope,
        rs_order,
        re_order,
        b_error,
        consistent: short_ok && long_ok && re_ok && b_ok,
    })
}

/// Degree-4 interpolation of `ε ↦ C_e(ε)` at five points of `(0, eps_max]`,
/// checked at interleaved points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticityReport {
    pub nodes: Vec<f64>,
    pub checks: Vec<f64>,
    /// `max |p(ε) - C_e(ε)| / max |C_e|` over the check points.
    pub relative_remainder: f64,
}

pub fn analyticity_probe(vc: &VertexCondition, lambda: C, f: &Forcing, eps_max: f64) -> Result<AnalyticityReport> {
    let nodes: Vec<f64> = (1..=5).map(|j| eps_max * j as f64 / 5.0).collect();
    let checks: Vec<f64> = (0..5).map(|j| eps_max * (j as f64 + 0.5) / 5.0).collect();
    let ce = |e: f64| resolve(vc, e, lambda, f).map(|s| s.c_e);
    let vals: Vec<C> = nodes.iter().map(|&e| ce(e)).collect::<Result<_>>()?;
    let interp = |x: f64| -> C {
        let mut s = c0();
        for i in 0..5 {
            let mut w = 1.0;
            for j in 0..5 {
                if j != i {
                    w *= (x - nodes[j]) / (nodes[i] - nodes[j]);
                }
            }
            s += vals[i] * w;
        }
        s
    };
    let mut worst: f64 = 0.0;
    let mut size = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for &x in &checks {
        let v = ce(x)?;
        size = size.max(v.norm());
        worst = worst.max((interp(x) - v).norm());
    }
    Ok(AnalyticityReport {
        nodes,
        checks,
        relative_remainder: if size > 0.0 { worst / size } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ci(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn grid<F: Fn(f64) -> C>(f: F) -> GridFunction {
        GridFunction::from_fn(DEFAULT_NODES, f).unwrap()
    }

    fn zero() -> GridFunction {
        GridFunction::zeros(DEFAULT_NODES).unwrap()
    }

    #[test]
    fn sqrt_branch() {
        for l in [ci(1.0, -1.0), ci(-4.0, 0.0), ci(0.0, 1.0), ci(-1.0, -1e-3)] {
            let k = sqrt_lambda(l);
            assert!(k.im >= 0.0);
            assert!((k * k - l).norm() < 1e-14);
        }
    }

    #[test]
    fn apply_l_examples() {
        assert!(apply_l(&zero(), ci(0.0, 1.0)).unwrap().is_zero());
        let one = grid(|_| ci(1.0, 0.0));
        let l = apply_l(&one, ci(1.0, 0.0)).unwrap();
        for j in 0..l.n() {
            let x = l.x(j);
            assert!((l.values()[j] + (1.0 - x.cos())).norm() < 1e-10);
        }
    }

    #[test]
    fn apply_l_eps_scales_quadratically() {
        let one = grid(|_| ci(1.0, 0.0));
        let n1 = apply_l_eps(&one, ci(0.0, 1.0), 1e-3).unwrap().sup_norm();
        let n2 = apply_l_eps(&one, ci(0.0, 1.0), 5e-4).unwrap().sup_norm();
        assert!(n1 <= 1e-5);
        let r = n1 / n2;
        assert!((3.5..=4.5).contains(&r), "{r}");
        assert!(apply_l_eps(&zero(), ci(0.0, 1.0), 1e-3).unwrap().is_zero());
    }

    #[test]
    fn boundary_data_examples() {
        let f = Forcing::new(zero(), zero());
        let bd = boundary_data(&f, ci(0.0, 1.0), 0.1).unwrap();
        assert_eq!(bd.w, [c0(), c0()]);
        assert_eq!(bd.wp, [c0(), c0()]);

        let f = Forcing::new(zero(), grid(|_| ci(1.0, 0.0)));
        let bd = boundary_data(&f, ci(1.0, 0.0), 0.1).unwrap();
        assert!((bd.w[1] - ci(1.0 - 1f64.cos(), 0.0)).norm() < 1e-10);

        let f = Forcing::new(grid(|_| ci(1.0, 0.0)), zero());
        let a = boundary_data(&f, ci(0.0, 1.0), 1e-2).unwrap().w[0].norm();
        let b = boundary_data(&f, ci(0.0, 1.0), 5e-3).unwrap().w[0].norm();
        assert!((a / b - 4.0).abs() < 0.05);
    }

    #[test]
    fn rank2_coefficients() {
        let bd = BoundaryData {
            w: [ci(1.0, 2.0), ci(-0.5, 0.3)],
            wp: [ci(0.7, 0.0), ci(0.0, 1.0)],
        };
        let lambda = ci(2.0, 3.0);
        let eps = 0.1;
        let k = sqrt_lambda(lambda);
        let (cs, ce) = coefficients(&VertexCondition::Rank2, &bd, lambda, eps).unwrap();
        assert!((cs - bd.w[0] / (k * eps).cos()).norm() < 1e-14);
        assert!((ce - bd.w[1] / k.sin()).norm() < 1e-14);
        let zinf = VertexCondition::Rank1 {
            z: ZParam::Infinite,
            mu: 0.0,
        };
        let (cs, ce) = coefficients(&zinf, &bd, lambda, eps).unwrap();
        assert!((ce - bd.w[1] / k.sin()).norm() < 1e-14);
        assert!((cs - bd.wp[0] / (k * (k * eps).sin())).norm() < 1e-14);
    }

    #[test]
    fn near_pole_detected() {
        let bd = BoundaryData {
            w: [ci(1.0, 0.0), ci(1.0, 0.0)],
            wp: [c0(), c0()],
        };
        let lambda = ci(std::f64::consts::PI.powi(2), 1e-14);
        let err = coefficients(&VertexCondition::Rank2, &bd, lambda, 0.1).unwrap_err();
        assert!(matches!(err, Error::NearPole { denominator: "sin k", .. }));
        assert!(coefficients_with_tol(&VertexCondition::Rank2, &bd, lambda, 0.1, 1e-20).is_ok());
    }

    #[test]
    fn manufactured_rank2() {
        // v(x) = x(1-x) on e: v(0)=v(1)=0, f_e = 2 - λ v.
        let lambda = ci(0.0, 2.0);
        let f = Forcing::new(zero(), grid(|x| 2.0 - lambda * x * (1.0 - x)));
        let sol = resolve(&VertexCondition::Rank2, 0.1, lambda, &f).unwrap();
        assert!(sol.u_s.is_zero() || sol.u_s.sup_norm() < 1e-14);
        for j in 0..sol.u_e.n() {
            let x = sol.u_e.x(j);
            assert!((sol.u_e.values()[j] - x * (1.0 - x)).norm() < 1e-9);
        }
        assert!(residual(&VertexCondition::Rank2, 0.1, lambda, &f, &sol) <= 1e-9);
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let f = Forcing::new(zero(), zero());
        let vc = VertexCondition::Rank0 {
            a: 1.0,
            b: 2.0,
            c: ci(0.0, 1.0),
        };
        let sol = resolve(&vc, 0.01, ci(0.0, 1.0), &f).unwrap();
        assert_eq!((sol.c_s, sol.c_e), (c0(), c0()));
        assert_eq!(residual(&vc, 0.01, ci(0.0, 1.0), &f, &sol), 0.0);
    }

    #[test]
    fn rank2_long_edge_only_depends_on_f_e() {
        let f = Forcing::new(grid(|y| ci(y.cos(), 1.0)), zero());
        let sol = resolve(&VertexCondition::Rank2, 0.05, ci(0.0, 1.0), &f).unwrap();
        assert!(sol.u_e.is_zero());
    }

    #[test]
    fn rejects_real_nonnegative_lambda() {
        let f = Forcing::new(zero(), zero());
        assert!(resolve(&VertexCondition::Rank2, 0.1, ci(1.0, 0.0), &f).is_err());
    }
}
