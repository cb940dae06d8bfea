//! Negative-eigenvalue count for rank-0 vertex conditions.
//!
//! The count equals the number of positive eigenvalues of
//! `D_ε = D_∞ - ε^{-1} E₀`, a 3×3 Hermitian matrix. Since `D_ε` is congruent
//! to `diag(-1/ε) ⊕ [[-a, -c], [-c̄, -b-1]]` the count does not depend on `ε`,
//! which gives the closed form.

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::vertex_model::VertexCondition;
use crate::{Error, Result};

/// 3×3 Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian3(pub [[Complex64; 3]; 3]);

/// 4×4 complex matrix used by the documentation-level constructors.
pub type Mat4 = [[Complex64; 4]; 4];

/// Result of [`count_negative`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub count: usize,
    pub via_inertia: usize,
    pub via_closed_form: usize,
    pub conditions_matched: Vec<&'static str>,
}

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl Hermitian3 {
    pub fn new(m: [[Complex64; 3]; 3]) -> Result<Self> {
        let h = Hermitian3(m);
        let scale = h.norm().max(1.0);
        for i in 0..3 {
            for j in 0..3 {
                if (m[i][j] - m[j][i].conj()).norm() > 1e-14 * scale {
                    return Err(Error::NonHermitian(format!("entry ({i},{j})")));
                }
            }
        }
        Ok(h)
    }

    pub fn from_real_diag(d: [f64; 3]) -> Self {
        let mut m = [[r(0.0); 3]; 3];
        for i in 0..3 {
            m[i][i] = r(d[i]);
        }
        Hermitian3(m)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..3).map(|i| self.0[i][i].re).sum()
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            .re
    }

    /// `S M S` for a real diagonal `S`.
    pub fn scaled(&self, s: [f64; 3]) -> Self {
        let mut m = self.0;
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v *= s[i] * s[j];
            }
        }
        Hermitian3(m)
    }

    pub fn mul_vec(&self, v: &[Complex64; 3]) -> [Complex64; 3] {
        let mut out = [r(0.0); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors. Eigenvector `k`
/// is column `k` of the returned matrix.
pub fn hermitian3_eigensystem(m: &Hermitian3) -> ([f64; 3], [[Complex64; 3]; 3]) {
    let mat = Matrix3::from_fn(|i, j| m.0[i][j]);
    let eig = SymmetricEigen::new(mat);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.map(|i| eig.eigenvalues[i]);
    let mut vecs = [[r(0.0); 3]; 3];
    for (col, &src) in idx.iter().enumerate() {
        for (row, v) in vecs.iter_mut().enumerate() {
            v[col] = eig.eigenvectors[(row, src)];
        }
    }
    (vals, vecs)
}

/// Eigenvalues of a Hermitian 3×3 matrix in ascending order.
pub fn hermitian3_eigs(m: &Hermitian3) -> [f64; 3] {
    hermitian3_eigensystem(m).0
}

/// `D_ε = [[-1/ε, 1/ε, 0], [1/ε, -a-1/ε, -c], [0, -c̄, -b-1]]`.
pub fn build_d_eps(a: f64, b: f64, c: Complex64, epsilon: f64) -> Hermitian3 {
    let ie = 1.0 / epsilon;
    Hermitian3([
        [r(-ie), r(ie), r(0.0)],
        [r(ie), r(-a - ie), -c],
        [r(0.0), -c.conj(), r(-b - 1.0)],
    ])
}

/// `D_∞ = [[0, 0, 0], [0, -a, -c], [0, -c̄, -b-1]]`.
pub fn build_d_inf(a: f64, b: f64, c: Complex64) -> Hermitian3 {
    Hermitian3([
        [r(0.0); 3],
        [r(0.0), r(-a), -c],
        [r(0.0), -c.conj(), r(-b - 1.0)],
    ])
}

/// `E₀` with `D_ε = D_∞ - ε^{-1} E₀`.
pub fn build_e0() -> Hermitian3 {
    Hermitian3([
        [r(1.0), r(-1.0), r(0.0)],
        [r(-1.0), r(1.0), r(0.0)],
        [r(0.0); 3],
    ])
}

/// Vertex-condition pair `(A, B)` on the four endpoint traces.
pub fn build_ab(a: f64, b: f64, c: Complex64) -> (Mat4, Mat4) {
    let z = r(0.0);
    let one = r(1.0);
    let a_mat = [
        [z, z, z, z],
        [z, r(-a), -c, z],
        [z, -c.conj(), r(-b), z],
        [z, z, z, one],
    ];
    let b_mat = [
        [one, z, z, z],
        [z, one, z, z],
        [z, z, one, z],
        [z, z, z, z],
    ];
    (a_mat, b_mat)
}

/// Dirichlet-to-Neumann matrix at `λ = 0` for the edges of length `ε` and `1`.
pub fn build_m(epsilon: f64) -> Mat4 {
    let ie = 1.0 / epsilon;
    let z = r(0.0);
    [
        [r(-ie), r(ie), z, z],
        [r(ie), r(-ie), z, z],
        [z, z, r(-1.0), r(1.0)],
        [z, z, r(1.0), r(-1.0)],
    ]
}

fn mat4_mul(x: &Mat4, y: &Mat4) -> Mat4 {
    let mut out = [[r(0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|l| x[i][l] * y[l][j]).sum();
        }
    }
    out
}

fn mat4_adjoint(x: &Mat4) -> Mat4 {
    let mut out = [[r(0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = x[j][i].conj();
        }
    }
    out
}

/// `D = A B* + B M B*`; its leading 3×3 block is `D_ε` and the rest vanishes.
pub fn build_d4(a: f64, b: f64, c: Complex64, epsilon: f64) -> Mat4 {
    let (am, bm) = build_ab(a, b, c);
    let bs = mat4_adjoint(&bm);
    let x = mat4_mul(&am, &bs);
    let y = mat4_mul(&mat4_mul(&bm, &build_m(epsilon)), &bs);
    let mut out = x;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] += y[i][j];
        }
    }
    out
}

/// Closed-form count with the list of conditions that fired.
pub fn closed_form_count(a: f64, b: f64, c: Complex64) -> (usize, Vec<&'static str>) {
    let c2 = c.norm_sqr();
    let det = c2 - a * b;
    if det < a && a < 0.0 {
        (2, vec!["|c|^2 - ab < a < 0"])
    } else if det > a {
        (1, vec!["|c|^2 - ab > a"])
    } else if det == a && a + b + 1.0 < 0.0 {
        (1, vec!["|c|^2 - ab = a, a + b + 1 < 0"])
    } else {
        (0, Vec::new())
    }
}

/// Number of positive eigenvalues of `D_ε` and the closed-form cross-check.
///
/// For `ε ≤ 1e-6` the inertia is read from `diag(√ε,√ε,1) D_ε diag(√ε,√ε,1)`.
/// When an eigenvalue lies within `1e-9 ‖D‖` of zero the inertia is
/// inconclusive and the closed form decides.
pub fn count_negative(vc: &VertexCondition, epsilon: f64) -> Result<CountReport> {
    let (a, b, c) = match vc.validate()? {
        VertexCondition::Rank0 { a, b, c } => (a, b, c),
        other => {
            return Err(Error::InvalidRank(format!(
                "counting needs a rank 0 condition, got rank {}",
                other.rank()
            )))
        }
    };
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} must be positive")));
    }
    let mut d = build_d_eps(a, b, c, epsilon);
    if epsilon <= 1e-6 {
        let s = epsilon.sqrt();
        d = d.scaled([s, s, 1.0]);
    }
    let eigs = hermitian3_eigs(&d);
    let tol = 1e-9 * d.norm();
    let ambiguous = eigs.iter().any(|l| l.abs() <= tol);
    let via_inertia = eigs.iter().filter(|&&l| l > tol).count();
    let (via_closed_form, conditions_matched) = closed_form_count(a, b, c);
    if !ambiguous && via_inertia != via_closed_form {
        return Err(Error::Inconsistent {
            inertia: via_inertia,
            closed_form: via_closed_form,
        });
    }
    Ok(CountReport {
        count: via_closed_form,
        via_inertia,
        via_closed_form,
        conditions_matched,
    })
}
