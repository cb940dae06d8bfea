//! Piecewise-linear finite elements for the quadratic form
//! `∫|u'|² + ⟨T Q U, Q U⟩` on both edges.
//!
//! Unknowns are ordered short edge (free end first), vertex traces, then the
//! long edge backwards, so both matrices of the pencil are tridiagonal and
//! Hermitian. The constraint `P U = 0` is built into the trace unknowns.

use num_complex::Complex64;
use serde::Serialize;

use crate::vertex_model::{VertexCondition, ZParam};
use crate::{Error, Result};

type C = Complex64;

/// Smallest accepted number of elements per edge.
pub const MIN_ELEMENTS: usize = 16;

/// Hermitian tridiagonal matrix: real diagonal, `upper[i] = M[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub upper: Vec<C>,
}

impl Tridiagonal {
    fn zeros(n: usize) -> Self {
        Tridiagonal {
            diag: vec![0.0; n],
            upper: vec![C::new(0.0, 0.0); n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }
}

/// How the vertex traces enter the unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Constraint {
    /// Both traces vanish.
    BothEliminated,
    /// One unknown `t` with `(U₁, U₂) = t (-z, 1)`.
    Combination,
    /// `U₂ = 0`, `U₁` free.
    LongEliminated,
    /// Both traces free.
    NoneEliminated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub stiffness: Tridiagonal,
    pub mass: Tridiagonal,
    pub n_s: usize,
    pub n_e: usize,
    pub epsilon: f64,
    pub constraint: Constraint,
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }
}

type NodeMap = Option<(usize, C)>;

fn add_element(k: &mut Tridiagonal, local: [[f64; 2]; 2], nodes: [NodeMap; 2]) {
    for (al, na) in nodes.iter().enumerate() {
        for (be, nb) in nodes.iter().enumerate() {
            if let (Some((i, ci)), Some((j, cj))) = (na, nb) {
                let v = ci.conj() * local[al][be] * cj;
                if i == j {
                    k.diag[*i] += v.re;
                } else if *j == i + 1 {
                    k.upper[*i] += v;
                } else {
                    debug_assert!(*i == j + 1, "non-adjacent coupling {i}-{j}");
                }
            }
        }
    }
}

/// Assembles stiffness and mass with `n_s` elements on the short edge
/// (length `ε`) and `n_e` on the long edge.
pub fn assemble(vc: &VertexCondition, epsilon: f64, n_s: usize, n_e: usize) -> Result<DiscreteOperator> {
    let vc = vc.validate()?;
    if n_s < MIN_ELEMENTS || n_e < MIN_ELEMENTS {
        return Err(Error::MeshTooCoarse(n_s.min(n_e)));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} must be positive")));
    }
    let one = C::new(1.0, 0.0);
    let (trace1, trace2, base_e, constraint): (NodeMap, NodeMap, usize, Constraint) = match vc {
        VertexCondition::Rank2 => (None, None, n_s, Constraint::BothEliminated),
        VertexCondition::Rank1 {
            z: ZParam::Finite(z),
            ..
        } => (Some((n_s, -z)), Some((n_s, one)), n_s + 1, Constraint::Combination),
        VertexCondition::Rank1 {
            z: ZParam::Infinite,
            ..
        } => (Some((n_s, one)), None, n_s + 1, Constraint::LongEliminated),
        VertexCondition::Rank0 { .. } => (
            Some((n_s, one)),
            Some((n_s + 1, one)),
            n_s + 2,
            Constraint::NoneEliminated,
        ),
    };
    let dim = base_e + n_e - 1;
    let mut k = Tridiagonal::zeros(dim);
    let mut m = Tridiagonal::zeros(dim);

    let short_node = |j: usize| if j < n_s { Some((j, one)) } else { trace1 };
    let long_node = |i: usize| match i {
        0 => None,
        i if i == n_e => trace2,
        i => Some((base_e + n_e - 1 - i, one)),
    };
    let stiff = |h: f64| [[1.0 / h, -1.0 / h], [-1.0 / h, 1.0 / h]];
    let mass = |h: f64| [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]];

    let h_s = epsilon / n_s as f64;
    for j in 0..n_s {
        let nodes = [short_node(j), short_node(j + 1)];
        add_element(&mut k, stiff(h_s), nodes);
        add_element(&mut m, mass(h_s), nodes);
    }
    let h_e = 1.0 / n_e as f64;
    for i in 0..n_e {
        let nodes = [long_node(i), long_node(i + 1)];
        add_element(&mut k, stiff(h_e), nodes);
        add_element(&mut m, mass(h_e), nodes);
    }

    match vc {
        VertexCondition::Rank2 => {}
        VertexCondition::Rank1 {
            z: ZParam::Finite(z),
            mu,
        } => k.diag[n_s] += mu * (1.0 + z.norm_sqr()),
        VertexCondition::Rank1 { mu, .. } => k.diag[n_s] += mu,
        VertexCondition::Rank0 { a, b, c } => {
            k.diag[n_s] += a;
            k.diag[n_s + 1] += b;
            k.upper[n_s] += c;
        }
    }

    Ok(DiscreteOperator {
        stiffness: k,
        mass: m,
        n_s,
        n_e,
        epsilon,
        constraint,
    })
}

/// Number of eigenvalues of the pencil below `shift`, from the `LDL*`
/// factorization of `K - shift·M`.
pub fn inertia(op: &DiscreteOperator, shift: f64) -> Result<usize> {
    let (k, m) = (&op.stiffness, &op.mass);
    let n = k.dim();
    let mut negatives = 0;
    let mut d_prev = 0.0;
    for i in 0..n {
        let a = k.diag[i] - shift * m.diag[i];
        let t = if i > 0 {
            (k.upper[i - 1] - m.upper[i - 1] * shift).norm_sqr() / d_prev
        } else {
            0.0
        };
        let d = a - t;
        // a pivot at roundoff level carries no sign information
        if d.abs() <= 64.0 * f64::EPSILON * (a.abs() + t.abs()) || d.abs() < f64::MIN_POSITIVE {
            return Err(Error::FactorizationBreakdown { shift });
        }
        if d < 0.0 {
            negatives += 1;
        }
        d_prev = d;
    }
    Ok(negatives)
}

/// [`inertia`] retried at slightly lower shifts when the factorization
/// breaks down. Lowering keeps eigenvalues equal to the shift uncounted.
fn robust_inertia(op: &DiscreteOperator, shift: f64) -> Result<usize> {
    match inertia(op, shift) {
        Err(Error::FactorizationBreakdown { .. }) => {}
        other => return other,
    }
    for nudge in [1e-12, 1e-10, 1e-8, 1e-6, 1e-4] {
        match inertia(op, shift - nudge * shift.abs().max(1.0)) {
            Err(Error::FactorizationBreakdown { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::FactorizationBreakdown { shift })
}

/// Negative-eigenvalue count, the inertia at shift zero.
pub fn negative_count(op: &DiscreteOperator) -> Result<usize> {
    robust_inertia(op, 0.0)
}

/// The `count ≤ 6` smallest eigenvalues by inertia bisection to relative
/// tolerance `1e-8`.
pub fn lowest_eigenvalues(op: &DiscreteOperator, count: usize) -> Result<Vec<f64>> {
    if count > 6 || count > op.dim() {
        return Err(Error::InvalidParameter(format!("cannot extract {count} eigenvalues")));
    }
    let mut lo = -1.0;
    while robust_inertia(op, lo)? > 0 {
        lo *= 2.0;
    }
    let mut out = Vec::with_capacity(count);
    for idx in 1..=count {
        let mut a = lo;
        let mut b = out.last().copied().unwrap_or(lo).abs().max(1.0);
        while robust_inertia(op, b)? < idx {
            b *= 2.0;
        }
        while b - a > 1e-8 * a.abs().max(b.abs()).max(1e-6) {
            let mid = 0.5 * (a + b);
            if robust_inertia(op, mid)? >= idx {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Observed order of the lowest eigenvalue from three meshes, by the
/// Richardson ratio of successive differences. Each mesh should halve the
/// element size of the previous one.
pub fn convergence_order(vc: &VertexCondition, epsilon: f64, ladder: &[(usize, usize); 3]) -> Result<f64> {
    let lam: Vec<f64> = ladder
        .iter()
        .map(|&(n_s, n_e)| lowest_eigenvalues(&assemble(vc, epsilon, n_s, n_e)?, 1).map(|v| v[0]))
        .collect::<Result<_>>()?;
    let ratio_h = ladder[1].1 as f64 / ladder[0].1 as f64;
    Ok(((lam[0] - lam[1]) / (lam[1] - lam[2])).abs().ln() / ratio_h.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn r(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn rejects_coarse_mesh() {
        assert!(matches!(
            assemble(&VertexCondition::Rank2, 0.1, 8, 100),
            Err(Error::MeshTooCoarse(8))
        ));
    }

    #[test]
    fn constraint_shapes() {
        let op = assemble(&VertexCondition::Rank2, 0.1, 20, 30).unwrap();
        assert_eq!(op.constraint, Constraint::BothEliminated);
        assert_eq!(op.dim(), 20 + 29);
        // decoupled edges: no link between the last short and first long unknown
        assert_eq!(op.stiffness.upper[19], r(0.0));
        let rank0 = VertexCondition::Rank0 {
            a: 1.0,
            b: 2.0,
            c: C::new(0.5, -0.5),
        };
        let op = assemble(&rank0, 0.1, 20, 30).unwrap();
        assert_eq!(op.constraint, Constraint::NoneEliminated);
        assert_eq!(op.dim(), 22 + 29);
        assert_eq!(op.stiffness.upper[20], C::new(0.5, -0.5));
        let op = assemble(&VertexCondition::kirchhoff(), 0.1, 20, 30).unwrap();
        assert_eq!(op.constraint, Constraint::Combination);
        assert_eq!(op.dim(), 21 + 29);
    }

    #[test]
    fn rank2_ground_state_tends_to_pi_squared() {
        let lam = |n| {
            let op = assemble(&VertexCondition::Rank2, 0.1, n, n).unwrap();
            lowest_eigenvalues(&op, 1).unwrap()[0]
        };
        let (l1, l2) = (lam(100), lam(400));
        assert!(l1 > l2 && l2 > PI * PI);
        assert!((l2 - PI * PI).abs() < 1e-3);
    }

    #[test]
    fn rank2_spectrum_decouples() {
        let eps = 0.1;
        let op = assemble(&VertexCondition::Rank2, eps, 400, 400).unwrap();
        let v = lowest_eigenvalues(&op, 3).unwrap();
        let short = (PI / (2.0 * eps)).powi(2);
        let mut want = [PI * PI, 4.0 * PI * PI, 9.0 * PI * PI, 16.0 * PI * PI, short];
        want.sort_by(f64::total_cmp);
        for (got, w) in v.iter().zip(want) {
            assert!((got - w).abs() < 2e-3 * w, "{got} vs {w}");
        }
    }

    #[test]
    fn eigenvalues_decrease_under_refinement() {
        let vc = VertexCondition::Rank0 {
            a: 0.0,
            b: 0.0,
            c: r(-1.0),
        };
        let l: Vec<f64> = [50, 100, 200]
            .iter()
            .map(|&n| lowest_eigenvalues(&assemble(&vc, 1e-2, n, n).unwrap(), 1).unwrap()[0])
            .collect();
        assert!(l[0] > l[1] && l[1] > l[2]);
    }

    #[test]
    fn convergence_is_second_order() {
        let p = convergence_order(&VertexCondition::Rank2, 0.1, &[(50, 50), (100, 100), (200, 200)]).unwrap();
        assert!((p - 2.0).abs() < 0.3, "{p}");
    }

    #[test]
    fn inertia_counts_negative_eigenvalues() {
        let vc = VertexCondition::Rank0 {
            a: -1.0,
            b: -3.0,
            c: r(0.0),
        };
        let op = assemble(&vc, 1e-2, 200, 200).unwrap();
        assert_eq!(negative_count(&op).unwrap(), 2);
        let op = assemble(&VertexCondition::Rank2, 1e-2, 200, 200).unwrap();
        assert_eq!(negative_count(&op).unwrap(), 0);
    }
}
