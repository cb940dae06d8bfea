//! The nine acceptance criteria as runnable checks.
//!
//! Each check returns an [`Outcome`] instead of panicking so that the CLI
//! can print a complete table. Checks 1-4 take the eigenvalue solver as a
//! parameter, which lets tests substitute a deliberately broken one.

use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::counting::{build_d_eps, build_d_inf, count_negative, hermitian3_eigs};
use crate::eigenmodes::{build_eigenmode, localization};
use crate::fd_oracle::{assemble, lowest_eigenvalues, negative_count};
use crate::grid::GridFunction;
use crate::resolvent::{leading_order_probe, residual, resolve, weighted_inner, Forcing, DEFAULT_NODES};
use crate::secular::{default_eps_grid, expected_count, find_negative_eigenvalues, fit_rate, SpectralPoint};
use crate::vertex_model::{solve_kappa1, EigKind, VertexCondition, ZParam};
use crate::Result;

/// Negative-eigenvalue solver used by the sweep-based checks.
pub type Solver = fn(&VertexCondition, f64) -> Result<Vec<SpectralPoint>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    /// Expected laptop runtime.
    pub budget_seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<34} {:>8.3}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

fn run<F>(id: u8, name: &'static str, budget: f64, f: F) -> Outcome
where
    F: FnOnce() -> Result<(bool, String)>,
{
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
        budget_seconds: budget,
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sweep_with(solver: Solver, vc: &VertexCondition, grid: &[f64]) -> Result<Vec<Vec<SpectralPoint>>> {
    grid.iter().map(|&e| solver(vc, e)).collect()
}

fn branch(sweep: &[Vec<SpectralPoint>], kind: EigKind) -> Vec<SpectralPoint> {
    sweep
        .iter()
        .flat_map(|pts| pts.iter().filter(|p| p.kind == Some(kind)).copied())
        .collect()
}

/// Cubic-root rate for `a = b = 0, c = -1`.
pub fn criterion_1(solver: Solver) -> Outcome {
    run(1, "preview example, rate eps^-2/3", 1.0, || {
        let vc = VertexCondition::Rank0 {
            a: 0.0,
            b: 0.0,
            c: c(-1.0, 0.0),
        };
        let grid = default_eps_grid();
        let pts: Vec<SpectralPoint> = sweep_with(solver, &vc, &grid)?.into_iter().flatten().collect();
        if pts.len() != grid.len() {
            return Ok((false, format!("{} roots on {} grid points", pts.len(), grid.len())));
        }
        let fit = fit_rate(&pts)?;
        let last = pts.last().unwrap();
        let scaled = last.lambda * last.epsilon.powf(2.0 / 3.0);
        let ok = (fit.slope + 2.0 / 3.0).abs() <= 0.02 && (scaled + 1.0).abs() <= 0.05;
        Ok((
            ok,
            format!("slope {:.5}, lambda*eps^(2/3) at 1e-6 = {:.8}", fit.slope, scaled),
        ))
    })
}

/// Square-root rate for `z = ∞, μ = -1`.
pub fn criterion_2(solver: Solver) -> Outcome {
    run(2, "type S rate, z=inf mu=-1", 1.0, || {
        let vc = VertexCondition::Rank1 {
            z: ZParam::Infinite,
            mu: -1.0,
        };
        let pts: Vec<SpectralPoint> = sweep_with(solver, &vc, &default_eps_grid())?
            .into_iter()
            .flatten()
            .collect();
        let fit = fit_rate(&pts)?;
        let ok = (fit.slope + 1.0).abs() <= 0.02 && (fit.coeff - 1.0).abs() <= 0.02;
        Ok((ok, format!("slope {:.5}, coeff {:.5}", fit.slope, fit.coeff)))
    })
}

/// Bounded eigenvalue for `z = -1, μ = -2`.
pub fn criterion_3(solver: Solver) -> Outcome {
    run(3, "type B stability, z=-1 mu=-2", 1.0, || {
        let vc = VertexCondition::Rank1 {
            z: ZParam::Finite(c(-1.0, 0.0)),
            mu: -2.0,
        };
        let kappa1 = solve_kappa1(ZParam::Finite(c(-1.0, 0.0)), -2.0)?;
        let pts: Vec<SpectralPoint> = sweep_with(solver, &vc, &default_eps_grid())?
            .into_iter()
            .flatten()
            .collect();
        let fit = fit_rate(&pts)?;
        let worst = pts
            .iter()
            .map(|p| (p.lambda + kappa1 * kappa1).abs() / p.epsilon)
            .fold(0.0, f64::max);
        let ok = fit.slope.abs() <= 0.02 && worst <= 5.0;
        Ok((
            ok,
            format!(
                "slope {:.5}, max |lambda+kappa1^2|/eps = {:.3} (bound 5)",
                fit.slope, worst
            ),
        ))
    })
}

/// Two coexisting eigenvalues for `a = -1, b = -3, c = 0`.
pub fn criterion_4(solver: Solver) -> Outcome {
    run(4, "two eigenvalues, a=-1 b=-3 c=0", 5.0, || {
        let vc = VertexCondition::Rank0 {
            a: -1.0,
            b: -3.0,
            c: c(0.0, 0.0),
        };
        let sweep = sweep_with(solver, &vc, &default_eps_grid())?;
        let all_two = sweep.iter().all(|pts| pts.len() == 2);
        let fb = fit_rate(&branch(&sweep, EigKind::B))?;
        let fs = fit_rate(&branch(&sweep, EigKind::S))?;
        let rates_ok = fb.rate == 0.0 && fs.rate == -1.0;
        let count = count_negative(&vc, 1e-2)?.count;
        let fd = negative_count(&assemble(&vc, 1e-2, 1000, 1000)?)?;
        let ok = all_two && rates_ok && count == 2 && fd == 2;
        Ok((
            ok,
            format!(
                "two roots everywhere: {all_two}, slopes B {:.4} S {:.4}, counting {count}, fd inertia {fd}",
                fb.slope, fs.slope
            ),
        ))
    })
}

/// Edge localization of the three eigenfunction types.
pub fn criterion_5() -> Outcome {
    run(5, "localization of eigenfunctions", 1.0, || {
        let mut worst_quad: f64 = 0.0;
        let mut check = |vc: VertexCondition, eps: f64, kind: EigKind| -> Result<(f64, f64)> {
            let p = find_negative_eigenvalues(&vc, eps)?
                .into_iter()
                .find(|p| p.kind == Some(kind))
                .ok_or_else(|| crate::Error::InvalidParameter(format!("no {kind} root")))?;
            let loc = localization(&vc, p)?;
            let mode = build_eigenmode(&vc, p)?;
            let qs = eps * mode.psi_s.norm_sq();
            let qe = mode.psi_e.norm_sq();
            for (q, l) in [(qs, loc.norm_s_sq), (qe, loc.norm_e_sq)] {
                if l > 0.0 {
                    worst_quad = worst_quad.max((q - l).abs() / l);
                }
            }
            Ok((loc.norm_s_sq, loc.norm_e_sq))
        };
        let (cs, ce) = check(
            VertexCondition::Rank0 {
                a: 0.0,
                b: 0.0,
                c: c(-1.0, 0.0),
            },
            1e-5,
            EigKind::C,
        )?;
        let (ss, _) = check(
            VertexCondition::Rank0 {
                a: -1.0,
                b: 0.0,
                c: c(1.0, 0.0),
            },
            1e-4,
            EigKind::S,
        )?;
        let (_, be) = check(
            VertexCondition::Rank1 {
                z: ZParam::Finite(c(-1.0, 0.0)),
                mu: -2.0,
            },
            1e-3,
            EigKind::B,
        )?;
        let ok = (cs - 2.0 / 3.0).abs() <= 0.05
            && (ce - 1.0 / 3.0).abs() <= 0.05
            && ss >= 0.95
            && be >= 0.99
            && worst_quad <= 1e-8;
        Ok((
            ok,
            format!(
                "C: {cs:.4}/{ce:.4}, S short {ss:.5}, B long {be:.6}, quadrature rel err {worst_quad:.2e}"
            ),
        ))
    })
}

/// One vertex condition per coefficient branch of the resolvent.
pub fn resolvent_branches() -> Vec<(&'static str, VertexCondition)> {
    vec![
        ("rank 2", VertexCondition::Rank2),
        (
            "rank 1, finite z",
            VertexCondition::Rank1 {
                z: ZParam::Finite(c(0.5, -0.3)),
                mu: 0.7,
            },
        ),
        (
            "rank 1, z = inf",
            VertexCondition::Rank1 {
                z: ZParam::Infinite,
                mu: -0.4,
            },
        ),
        (
            "rank 0, general",
            VertexCondition::Rank0 {
                a: 0.3,
                b: -1.2,
                c: c(0.4, 0.2),
            },
        ),
        (
            "rank 0, a = c = 0",
            VertexCondition::Rank0 {
                a: 0.0,
                b: 0.5,
                c: c(0.0, 0.0),
            },
        ),
    ]
}

/// Smooth random forcing: a short trigonometric series per edge.
pub fn random_forcing(rng: &mut StdRng, n: usize) -> Result<Forcing> {
    let mut series = || {
        let coeffs: Vec<(Complex64, Complex64)> = (0..4)
            .map(|_| {
                (
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            })
            .collect();
        GridFunction::from_fn(n, move |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(m, (p, q))| {
                    let w = std::f64::consts::PI * m as f64;
                    p * (w * x).cos() + q * (w * x).sin()
                })
                .sum()
        })
    };
    let f_s = series()?;
    let f_e = series()?;
    Ok(Forcing::new(f_s, f_e))
}

/// Residual and symmetry of the explicit resolvent.
pub fn criterion_6() -> Outcome {
    run(6, "resolvent residual and symmetry", 2.0, || {
        let mut rng = StdRng::seed_from_u64(6);
        let mut worst_res: f64 = 0.0;
        let mut worst_sym: f64 = 0.0;
        let n = 1025;
        for (_, vc) in resolvent_branches() {
            for lambda in [c(0.0, 1.0), c(2.0, 3.0)] {
                for eps in [1e-1, 1e-3] {
                    let f = random_forcing(&mut rng, n)?;
                    let g = random_forcing(&mut rng, n)?;
                    let rf = resolve(&vc, eps, lambda, &f)?;
                    worst_res = worst_res.max(residual(&vc, eps, lambda, &f, &rf));
                    let rg = resolve(&vc, eps, lambda.conj(), &g)?;
                    let lhs = weighted_inner(eps, (&rf.u_s, &rf.u_e), (&g.f_s, &g.f_e))?;
                    let rhs = weighted_inner(eps, (&f.f_s, &f.f_e), (&rg.u_s, &rg.u_e))?;
                    worst_sym = worst_sym.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()));
                }
            }
        }
        let ok = worst_res <= 1e-7 && worst_sym <= 1e-8;
        Ok((ok, format!("max residual {worst_res:.2e}, max symmetry defect {worst_sym:.2e}")))
    })
}

/// Small-`ε` leading orders of the resolvent.
pub fn criterion_7() -> Outcome {
    run(7, "resolvent leading orders", 3.0, || {
        let lambda = c(0.0, 1.0);
        let eps = [1e-2, 1e-3, 1e-4, 1e-5];
        let n = DEFAULT_NODES;
        let fs = GridFunction::from_fn(n, |y| c(1.0 + y * y, 0.5 * y))?;
        let fe = GridFunction::from_fn(n, |x| c((3.0 * x).sin(), 1.0 - x))?;
        let zero = GridFunction::zeros(n)?;
        let short = Forcing::new(fs.clone(), zero.clone());
        let long = Forcing::new(zero, fe);
        let both = Forcing::new(fs, long.f_e.clone());

        let r2 = leading_order_probe(&VertexCondition::Rank2, lambda, &short, &eps)?;
        let r2_slope = r2.short_slope.unwrap_or(f64::NAN);
        let r2b = leading_order_probe(&VertexCondition::Rank2, lambda, &both, &eps)?;
        let b_err = r2b.b_error.unwrap_or(f64::INFINITY);

        let res = VertexCondition::Rank0 {
            a: 0.0,
            b: 0.5,
            c: c(0.0, 0.0),
        };
        let rr = leading_order_probe(&res, lambda, &short, &eps)?;
        let rr_slope = rr.short_slope.unwrap_or(f64::NAN);
        let rr_long = leading_order_probe(&res, lambda, &long, &eps)?.long_slope;

        let kir = VertexCondition::kirchhoff();
        let rk = leading_order_probe(&kir, lambda, &long, &eps)?;
        let rk_slope = rk.long_slope.unwrap_or(f64::NAN);
        let rk_order = rk.rs_order.unwrap_or(f64::NAN);

        let ok = (r2_slope - 2.0).abs() <= 0.2
            && b_err <= 1e-6
            && rr_slope.abs() <= 0.2
            && rr_long.is_none()
            && rk_slope.abs() <= 0.2
            && (rk_order - 1.0).abs() <= 0.2;
        Ok((
            ok,
            format!(
                "rank2 |R_s f| slope {r2_slope:.3}, B f_e err {b_err:.1e}; a=c=0 slope {rr_slope:.3}; \
                 kirchhoff f_e slope {rk_slope:.3}, remainder order {rk_order:.3}"
            ),
        ))
    })
}

/// One vertex condition per row of the classification table.
pub fn table_rows() -> Vec<(&'static str, VertexCondition)> {
    vec![
        (
            "rank 1, z = inf, mu < 0",
            VertexCondition::Rank1 {
                z: ZParam::Infinite,
                mu: -1.0,
            },
        ),
        (
            "rank 1, finite z",
            VertexCondition::Rank1 {
                z: ZParam::Finite(c(-1.0, 0.0)),
                mu: -2.0,
            },
        ),
        (
            "rank 0, a < 0, two roots",
            VertexCondition::Rank0 {
                a: -1.0,
                b: -3.0,
                c: c(0.3, 0.4),
            },
        ),
        (
            "rank 0, a < 0, one root",
            VertexCondition::Rank0 {
                a: -1.0,
                b: 0.0,
                c: c(1.0, 0.0),
            },
        ),
        (
            "rank 0, a = 0, c = 0",
            VertexCondition::Rank0 {
                a: 0.0,
                b: -3.0,
                c: c(0.0, 0.0),
            },
        ),
        (
            "rank 0, a = 0, c != 0",
            VertexCondition::Rank0 {
                a: 0.0,
                b: 0.0,
                c: c(-1.0, 0.0),
            },
        ),
        (
            "rank 0, a > 0",
            VertexCondition::Rank0 {
                a: 1.0,
                b: 0.0,
                c: c(2.0, 0.0),
            },
        ),
    ]
}

/// Finite-element eigenvalues and inertia against the secular roots.
pub fn criterion_8() -> Outcome {
    run(8, "finite-element oracle agreement", 30.0, || {
        let eps = 1e-2;
        let mut worst: f64 = 0.0;
        let mut counts_ok = true;
        for (_, vc) in table_rows() {
            let mut roots = find_negative_eigenvalues(&vc, eps)?;
            roots.sort_by(|p, q| p.lambda.total_cmp(&q.lambda));
            let op = assemble(&vc, eps, 2000, 2000)?;
            let inertia = negative_count(&op)?;
            counts_ok &= inertia == expected_count(&vc) && inertia == roots.len();
            let fd = lowest_eigenvalues(&op, roots.len())?;
            for (p, l) in roots.iter().zip(&fd) {
                worst = worst.max((l - p.lambda).abs() / p.lambda.abs());
            }
        }
        Ok((
            counts_ok && worst <= 5e-3,
            format!("{} conditions, max rel err {worst:.2e}, counts match: {counts_ok}", table_rows().len()),
        ))
    })
}

/// Randomized agreement and the second-order cubic-root coefficient.
pub fn criterion_9() -> Outcome {
    run(9, "property suites", 20.0, || {
        let mut rng = StdRng::seed_from_u64(9);
        let mut triple = 0;
        for _ in 0..500 {
            let vc = VertexCondition::Rank0 {
                a: rng.gen_range(-5.0..5.0),
                b: rng.gen_range(-5.0..5.0),
                c: Complex64::from_polar(rng.gen_range(0.0..3.0), rng.gen_range(0.0..std::f64::consts::TAU)),
            };
            let eps = 10f64.powf(rng.gen_range(-6.0..-1.0));
            let n_classify = vc.classify()?.len();
            let n_count = count_negative(&vc, eps)?.count;
            let n_roots = find_negative_eigenvalues(&vc, eps)?.len();
            if n_classify == n_count && n_count == n_roots {
                triple += 1;
            }
        }

        let mut interlace = 0;
        for _ in 0..500 {
            let (a, b) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let cc = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let eps = 10f64.powf(rng.gen_range(-6.0..0.0));
            let de = hermitian3_eigs(&build_d_eps(a, b, cc, eps));
            let di = hermitian3_eigs(&build_d_inf(a, b, cc));
            let tol = 1e-9 * (1.0 / eps + 10.0);
            if (0..2).all(|i| di[i] <= de[i + 1] + tol && de[i + 1] <= di[i + 1] + tol) {
                interlace += 1;
            }
        }

        let mut worst_coeff: f64 = 0.0;
        let mut coeffs = Vec::new();
        for b in [-2.0, 1.0, 3.0] {
            let coeff = cubic_second_order(b)?;
            worst_coeff = worst_coeff.max((coeff + b / 3.0).abs() / (b / 3.0).abs());
            coeffs.push(coeff);
        }
        let ok = triple == 500 && interlace == 500 && worst_coeff <= 0.1;
        Ok((
            ok,
            format!(
                "triple agreement {triple}/500, interlacing {interlace}/500, \
                 second-order coefficients {coeffs:.4?} (worst rel err {worst_coeff:.2e})"
            ),
        ))
    })
}

/// Coefficient `τ₁` in `κ ε^{1/3} = |c|^{2/3} + τ₁ ε^{1/3} + O(ε^{2/3})` for
/// `a = 0, c = -1`, extrapolated from two values of `ν = ε^{1/3}`.
pub fn cubic_second_order(b: f64) -> Result<f64> {
    let vc = VertexCondition::Rank0 {
        a: 0.0,
        b,
        c: c(-1.0, 0.0),
    };
    let slope = |nu: f64| -> Result<f64> {
        let eps = nu * nu * nu;
        let p = find_negative_eigenvalues(&vc, eps)?
            .into_iter()
            .find(|p| p.kind == Some(EigKind::C))
            .ok_or_else(|| crate::Error::InvalidParameter("no cubic-root eigenvalue".into()))?;
        Ok((p.kappa * nu - 1.0) / nu)
    };
    let (s1, s2) = (slope(1e-3)?, slope(2e-3)?);
    Ok(2.0 * s1 - s2)
}

/// Runs every criterion with the given solver, in order.
pub fn run_all_with(solver: Solver) -> Vec<Outcome> {
    vec![
        criterion_1(solver),
        criterion_2(solver),
        criterion_3(solver),
        criterion_4(solver),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ]
}

pub fn run_all() -> Vec<Outcome> {
    run_all_with(find_negative_eigenvalues)
}

/// `0` if every criterion passed, `1` otherwise.
pub fn exit_code(outcomes: &[Outcome]) -> i32 {
    if outcomes.iter().all(|o| o.passed) {
        0
    } else {
        1
    }
}

/// A solver whose unbounded branches drift by `ε^{-0.05}`, for exercising
/// the failure path.
pub fn broken_solver(vc: &VertexCondition, epsilon: f64) -> Result<Vec<SpectralPoint>> {
    Ok(find_negative_eigenvalues(vc, epsilon)?
        .into_iter()
        .map(|mut p| {
            if p.kind != Some(EigKind::B) {
                p.kappa *= epsilon.powf(-0.05);
                p.lambda = -p.kappa * p.kappa;
            }
            p
        })
        .collect())
}
