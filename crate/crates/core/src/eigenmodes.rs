//! Eigenfunctions of the negative eigenvalues and their localization.
//!
//! For `λ = -κ²` the eigenfunction is `ψ_s(y) = c_s cosh(κεy)` on the short
//! edge (rescaled variable `y`) and `ψ_e(x) = c_e sinh(κx) / sinh κ` on the
//! long edge. Storing `c_e = ψ_e(1)` keeps everything finite for large `κ`.

use num_complex::Complex64;
use serde::Serialize;

use crate::grid::GridFunction;
use crate::hyperbolic::{cosh_sinh_ratio, phi, sinh_ratio, x_coth_x};
use crate::resolvent::vertex_defect;
use crate::secular::{secular_neg, SpectralPoint};
use crate::vertex_model::{VertexCondition, ZParam};
use crate::{Error, Result};

type C = Complex64;

/// Largest secular residual accepted by [`build_eigenmode`].
pub const ROOT_TOL: f64 = 1e-8;

const MAX_NODES: usize = 4_000_001;

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenmode {
    pub point: SpectralPoint,
    pub c_s: C,
    /// Value `ψ_e(1)`.
    pub c_e: C,
    pub psi_s: GridFunction,
    pub psi_e: GridFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub norm_s_sq: f64,
    pub norm_e_sq: f64,
}

/// `‖ψ_s‖²` (physical length `ε`) per unit `|c_s|²`.
fn short_weight(kappa: f64, epsilon: f64) -> f64 {
    let t = 2.0 * kappa * epsilon;
    (t.sinh() + t) / (4.0 * kappa)
}

/// `‖ψ_e‖²` per unit `|c_e|²`.
fn long_weight(kappa: f64) -> f64 {
    phi(kappa) / (4.0 * kappa)
}

/// Unnormalized null vector `(c_s, c_e)` of the vertex condition at `κ`.
fn raw_coefficients(vc: &VertexCondition, epsilon: f64, kappa: f64) -> Result<(C, C)> {
    let ke = kappa * epsilon;
    let one = C::new(1.0, 0.0);
    Ok(match *vc {
        VertexCondition::Rank2 => {
            return Err(Error::NotAnEigenvalue {
                kappa,
                residual: f64::INFINITY,
            })
        }
        VertexCondition::Rank1 {
            z: ZParam::Infinite,
            ..
        } => (one, C::new(0.0, 0.0)),
        VertexCondition::Rank1 {
            z: ZParam::Finite(z),
            ..
        } => (-z, one * ke.cosh()),
        VertexCondition::Rank0 { a, b, c } => {
            // Either row of the 2×2 vertex system gives a null vector; take
            // the better conditioned one.
            let first = (-c, one * (kappa * ke.sinh() + a * ke.cosh()));
            let second = (-one * (x_coth_x(kappa) + b), c.conj() * ke.cosh());
            let size = |v: &(C, C)| v.0.norm_sqr() + v.1.norm_sqr();
            if size(&first) >= size(&second) {
                first
            } else {
                second
            }
        }
    })
}

fn normalize(c_s: C, c_e: C, kappa: f64, epsilon: f64) -> (C, C) {
    let total = c_s.norm_sqr() * short_weight(kappa, epsilon) + c_e.norm_sqr() * long_weight(kappa);
    let scale = total.sqrt();
    let (c_s, c_e) = (c_s / scale, c_e / scale);
    let pivot = if c_e.norm() > 0.0 { c_e } else { c_s };
    let phase = pivot.conj() / pivot.norm();
    (c_s * phase, c_e * phase)
}

fn nodes_for(scale: f64) -> usize {
    let n = ((scale / 0.005).ceil() as usize).max(256);
    (n + 1 + (n % 2)).min(MAX_NODES)
}

/// Normalized mode at `point.kappa` without checking that it is a root.
pub fn eigenmode_at(vc: &VertexCondition, point: SpectralPoint) -> Result<Eigenmode> {
    let (kappa, epsilon) = (point.kappa, point.epsilon);
    let (c_s, c_e) = raw_coefficients(vc, epsilon, kappa)?;
    let (c_s, c_e) = normalize(c_s, c_e, kappa, epsilon);
    let ke = kappa * epsilon;
    let psi_s = GridFunction::from_fn(nodes_for(ke), |y| c_s * (ke * y).cosh())?;
    let psi_e = GridFunction::from_fn(nodes_for(kappa), |x| c_e * sinh_ratio(kappa, x))?;
    Ok(Eigenmode {
        point,
        c_s,
        c_e,
        psi_s,
        psi_e,
    })
}

fn check_root(vc: &VertexCondition, point: &SpectralPoint) -> Result<()> {
    let residual = secular_neg(vc, point.epsilon, point.kappa);
    if matches!(vc, VertexCondition::Rank2) || !(residual.abs() <= ROOT_TOL) {
        return Err(Error::NotAnEigenvalue {
            kappa: point.kappa,
            residual,
        });
    }
    Ok(())
}

/// Normalized eigenfunction, `ε ‖ψ_s‖²_y + ‖ψ_e‖² = 1`, with the phase
/// making `c_e` (or `c_s` if `c_e = 0`) real and non-negative.
pub fn build_eigenmode(vc: &VertexCondition, point: SpectralPoint) -> Result<Eigenmode> {
    check_root(vc, &point)?;
    eigenmode_at(vc, point)
}

/// Share of the squared norm carried by each edge, from closed forms.
pub fn localization(vc: &VertexCondition, point: SpectralPoint) -> Result<LocalizationReport> {
    check_root(vc, &point)?;
    let (kappa, epsilon) = (point.kappa, point.epsilon);
    let (c_s, c_e) = raw_coefficients(vc, epsilon, kappa)?;
    let ns = c_s.norm_sqr() * short_weight(kappa, epsilon);
    let ne = c_e.norm_sqr() * long_weight(kappa);
    let norm_s_sq = ns / (ns + ne);
    Ok(LocalizationReport {
        norm_s_sq,
        norm_e_sq: 1.0 - norm_s_sq,
    })
}

/// Largest defect of `ψ'' = κ² ψ` on both edges, the end conditions and
/// the vertex condition.
pub fn mode_residual(vc: &VertexCondition, mode: &Eigenmode) -> f64 {
    let (kappa, epsilon) = (mode.point.kappa, mode.point.epsilon);
    let ke = kappa * epsilon;
    let k2 = kappa * kappa;
    let mut worst: f64 = 0.0;
    // ψ_s'' in x equals ε^{-2} d²/dy², i.e. c_s κ² cosh(κεy)
    for (j, v) in mode.psi_s.values().iter().enumerate() {
        let y = mode.psi_s.x(j);
        let second = mode.c_s * k2 * (ke * y).cosh();
        worst = worst.max((second - k2 * v).norm());
    }
    for (j, v) in mode.psi_e.values().iter().enumerate() {
        let x = mode.psi_e.x(j);
        let second = mode.c_e * k2 * sinh_ratio(kappa, x);
        worst = worst.max((second - k2 * v).norm());
    }
    worst = worst.max(mode.psi_e.values()[0].norm());
    // ψ_s'(0) = c_s κ sinh 0 vanishes identically
    let u = [mode.c_s * ke.cosh(), mode.c_e];
    let up = [
        -mode.c_s * kappa * ke.sinh(),
        -mode.c_e * kappa * cosh_sinh_ratio(kappa, 1.0),
    ];
    worst.max(vertex_defect(vc, u, up))
}

/// `ε ⟨ψ_s, φ_s⟩_y + ⟨ψ_e, φ_e⟩` evaluated by quadrature on a common grid.
pub fn mode_inner(a: &Eigenmode, b: &Eigenmode) -> Result<C> {
    let eps = a.point.epsilon;
    let n_s = a.psi_s.n().max(b.psi_s.n());
    let n_e = a.psi_e.n().max(b.psi_e.n());
    let gs = |m: &Eigenmode| {
        let ke = m.point.kappa * eps;
        GridFunction::from_fn(n_s, |y| m.c_s * (ke * y).cosh())
    };
    let ge = |m: &Eigenmode| GridFunction::from_fn(n_e, |x| m.c_e * sinh_ratio(m.point.kappa, x));
    Ok(gs(a)?.inner(&gs(b)?)? * eps + ge(a)?.inner(&ge(b)?)?)
}

/// Limit of `norm_s_sq` as `ε → 0` for each eigenvalue type.
pub fn localization_limit(kind: crate::EigKind) -> f64 {
    match kind {
        crate::EigKind::B => 0.0,
        crate::EigKind::S => 1.0,
        crate::EigKind::C => 2.0 / 3.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secular::find_negative_eigenvalues;
    use crate::EigKind;

    fn r(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn first(vc: &VertexCondition, eps: f64) -> SpectralPoint {
        find_negative_eigenvalues(vc, eps).unwrap()[0]
    }

    #[test]
    fn z_infinite_lives_on_short_edge() {
        let vc = VertexCondition::Rank1 {
            z: ZParam::Infinite,
            mu: -1.0,
        };
        for eps in [1e-2, 1e-4] {
            let p = first(&vc, eps);
            let m = build_eigenmode(&vc, p).unwrap();
            assert_eq!(m.c_e, r(0.0));
            let loc = localization(&vc, p).unwrap();
            assert_eq!(loc.norm_s_sq, 1.0);
            assert!(mode_residual(&vc, &m) <= 1e-8);
        }
    }

    #[test]
    fn rank2_rejected() {
        let p = SpectralPoint::new(1e-2, 1.0, None, None);
        assert!(matches!(
            build_eigenmode(&VertexCondition::Rank2, p),
            Err(Error::NotAnEigenvalue { .. })
        ));
    }

    #[test]
    fn cubic_mode_has_both_parts() {
        let vc = VertexCondition::Rank0 {
            a: 0.0,
            b: 0.0,
            c: r(-1.0),
        };
        let p = first(&vc, 1e-4);
        let m = build_eigenmode(&vc, p).unwrap();
        assert!(m.c_s.norm() > 0.0 && m.c_e.norm() > 0.0);
        assert!(m.c_e.im == 0.0 && m.c_e.re > 0.0);
        let loc = localization(&vc, p).unwrap();
        assert!((loc.norm_s_sq - 2.0 / 3.0).abs() < 0.1);
        assert!(mode_residual(&vc, &m) <= 1e-8);
    }

    #[test]
    fn localization_examples() {
        let vc = VertexCondition::Rank0 {
            a: -1.0,
            b: 0.0,
            c: r(1.0),
        };
        let p = first(&vc, 1e-4);
        assert_eq!(p.kind, Some(EigKind::S));
        assert!(localization(&vc, p).unwrap().norm_s_sq >= 0.95);

        let vc = VertexCondition::Rank1 {
            z: ZParam::Finite(r(-1.0)),
            mu: -2.0,
        };
        let p = first(&vc, 1e-3);
        assert!(localization(&vc, p).unwrap().norm_e_sq >= 0.99);
    }

    #[test]
    fn closed_form_norms_match_quadrature() {
        let vc = VertexCondition::Rank0 {
            a: 0.0,
            b: 0.0,
            c: C::new(0.6, -0.8),
        };
        let p = first(&vc, 1e-3);
        let m = build_eigenmode(&vc, p).unwrap();
        let loc = localization(&vc, p).unwrap();
        let qs = p.epsilon * m.psi_s.norm_sq();
        let qe = m.psi_e.norm_sq();
        assert!((qs - loc.norm_s_sq).abs() <= 1e-8 * loc.norm_s_sq);
        assert!((qe - loc.norm_e_sq).abs() <= 1e-8 * loc.norm_e_sq);
        assert!((qs + qe - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn perturbed_kappa_has_large_residual() {
        let vc = VertexCondition::Rank0 {
            a: 0.0,
            b: 0.0,
            c: r(-1.0),
        };
        let mut p = first(&vc, 1e-3);
        p.kappa *= 1.0 + 1e-3;
        assert!(build_eigenmode(&vc, p).is_err());
        let m = eigenmode_at(&vc, p).unwrap();
        assert!(mode_residual(&vc, &m) > 1e-5);
    }

    #[test]
    fn two_modes_are_orthogonal() {
        let vc = VertexCondition::Rank0 {
            a: -1.0,
            b: -3.0,
            c: C::new(0.3, 0.4),
        };
        let pts = find_negative_eigenvalues(&vc, 1e-3).unwrap();
        assert_eq!(pts.len(), 2);
        let m0 = build_eigenmode(&vc, pts[0]).unwrap();
        let m1 = build_eigenmode(&vc, pts[1]).unwrap();
        assert!(mode_inner(&m0, &m1).unwrap().norm() <= 1e-8);
        assert!((mode_inner(&m0, &m0).unwrap().re - 1.0).abs() <= 1e-8);
    }
}
