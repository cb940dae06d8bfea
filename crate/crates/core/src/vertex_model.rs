//! Vertex conditions at the central vertex and the negative-eigenvalue
//! classification they induce.
//!
//! The coupling is written as `P U = 0`, `Q U' = T Q U` with the trace
//! vectors `U = (u_s(ε), u_e(1))` and `U' = (-u_s'(ε), -u_e'(1))`. It is
//! parametrized by the rank of the orthogonal projection `P`:
//!
//! - rank 2: `P = I` (Dirichlet on both edges at the vertex);
//! - rank 1: `P` projects onto `(1, z̄)`, `z ∈ ℂ ∪ {∞}`, and `T = μ`;
//! - rank 0: `P = 0` and `T = [[a, c], [c̄, b]]` (generalized Robin).

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::hyperbolic::solve_x_coth_x;
use crate::{Error, Result};

/// 2×2 complex matrix, row major.
pub type Mat2 = [[Complex64; 2]; 2];

/// The parameter `z` of a rank-one projection. Infinity is its own tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZParam {
    Finite(Complex64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexCondition {
    Rank2,
    Rank1 { z: ZParam, mu: f64 },
    Rank0 { a: f64, b: f64, c: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EigKind {
    /// Bounded: `λ → -α`.
    B,
    /// Square-root type: `λ ~ -α ε^{-1}`.
    S,
    /// Cubic-root type: `λ ~ -α ε^{-2/3}`.
    C,
}

impl EigKind {
    /// Exponent `p` in `|λ| ~ α ε^{p}`.
    pub fn rate(self) -> f64 {
        match self {
            EigKind::B => 0.0,
            EigKind::S => -1.0,
            EigKind::C => -2.0 / 3.0,
        }
    }

    pub fn rate_label(self) -> &'static str {
        match self {
            EigKind::B => "ε^0",
            EigKind::S => "ε^{-1}",
            EigKind::C => "ε^{-2/3}",
        }
    }
}

impl fmt::Display for EigKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EigKind::B => "B",
            EigKind::S => "S",
            EigKind::C => "C",
        };
        f.write_str(s)
    }
}

/// One predicted negative eigenvalue: its type and the leading coefficient
/// `α` of `|λ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigPrediction {
    pub kind: EigKind,
    pub alpha: f64,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl VertexCondition {
    pub fn rank(&self) -> u8 {
        match self {
            VertexCondition::Rank2 => 2,
            VertexCondition::Rank1 { .. } => 1,
            VertexCondition::Rank0 { .. } => 0,
        }
    }

    /// Neumann–Kirchhoff coupling, `z = -1`, `μ = 0`.
    pub fn kirchhoff() -> Self {
        VertexCondition::Rank1 {
            z: ZParam::Finite(real(-1.0)),
            mu: 0.0,
        }
    }

    /// Checks finiteness and returns the condition unchanged.
    ///
    /// A very large finite `z` stays finite; only the explicit infinity tag
    /// selects the `z = ∞` branch.
    pub fn validate(self) -> Result<Self> {
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {x} is not finite")))
            }
        };
        match self {
            VertexCondition::Rank2 => {}
            VertexCondition::Rank1 { z, mu } => {
                finite("mu", mu)?;
                if let ZParam::Finite(z) = z {
                    finite("z.re", z.re)?;
                    finite("z.im", z.im)?;
                }
            }
            VertexCondition::Rank0 { a, b, c } => {
                finite("a", a)?;
                finite("b", b)?;
                finite("c.re", c.re)?;
                finite("c.im", c.im)?;
            }
        }
        Ok(self)
    }

    /// The orthogonal projection `P`. For `z = ∞` this is the limit
    /// `diag(0, 1)`.
    pub fn projection(&self) -> Mat2 {
        let zero = real(0.0);
        match *self {
            VertexCondition::Rank2 => [[real(1.0), zero], [zero, real(1.0)]],
            VertexCondition::Rank1 { z: ZParam::Infinite, .. } => {
                [[zero, zero], [zero, real(1.0)]]
            }
            VertexCondition::Rank1 { z: ZParam::Finite(z), .. } => {
                let n = 1.0 + z.norm_sqr();
                [
                    [real(1.0 / n), z / n],
                    [z.conj() / n, real(z.norm_sqr() / n)],
                ]
            }
            VertexCondition::Rank0 { .. } => [[zero, zero], [zero, zero]],
        }
    }

    /// `Q = I - P`.
    pub fn complement(&self) -> Mat2 {
        let p = self.projection();
        [
            [real(1.0) - p[0][0], -p[0][1]],
            [-p[1][0], real(1.0) - p[1][1]],
        ]
    }

    /// The operator `T Q` as a 2×2 matrix on `ℂ²`.
    pub fn robin(&self) -> Mat2 {
        let zero = real(0.0);
        match *self {
            VertexCondition::Rank2 => [[zero, zero], [zero, zero]],
            VertexCondition::Rank1 { mu, .. } => {
                let q = self.complement();
                [[q[0][0] * mu, q[0][1] * mu], [q[1][0] * mu, q[1][1] * mu]]
            }
            VertexCondition::Rank0 { a, b, c } => [[real(a), c], [c.conj(), real(b)]],
        }
    }

    /// Negative eigenvalues predicted for small `ε`, one entry per row of
    /// the classification table. At most two entries, never two of the same
    /// kind.
    pub fn classify(&self) -> Result<Vec<EigPrediction>> {
        let vc = self.validate()?;
        let b_pred = |kappa: f64| EigPrediction {
            kind: EigKind::B,
            alpha: kappa * kappa,
        };
        let out = match vc {
            VertexCondition::Rank2 => vec![],
            VertexCondition::Rank1 { z: ZParam::Infinite, mu } => {
                if mu < 0.0 {
                    vec![EigPrediction {
                        kind: EigKind::S,
                        alpha: mu.abs(),
                    }]
                } else {
                    vec![]
                }
            }
            VertexCondition::Rank1 { z: ZParam::Finite(z), mu } => {
                // The boundary μ(1+|z|²) = -1 degenerates to κ = 0 and is
                // treated as "no eigenvalue".
                if mu * (1.0 + z.norm_sqr()) < -1.0 {
                    vec![b_pred(solve_kappa1(ZParam::Finite(z), mu)?)]
                } else {
                    vec![]
                }
            }
            VertexCondition::Rank0 { a, b, c } => {
                let c2 = c.norm_sqr();
                let s_pred = EigPrediction {
                    kind: EigKind::S,
                    alpha: a.abs(),
                };
                if a < 0.0 {
                    if c2 < a * (b + 1.0) {
                        vec![b_pred(solve_kappa0(a, b, c)?), s_pred]
                    } else {
                        vec![s_pred]
                    }
                } else if a == 0.0 {
                    if c2 == 0.0 {
                        if b + 1.0 < 0.0 {
                            vec![b_pred(solve_kappa0(a, b, c)?)]
                        } else {
                            vec![]
                        }
                    } else {
                        vec![EigPrediction {
                            kind: EigKind::C,
                            alpha: c2.powf(2.0 / 3.0),
                        }]
                    }
                } else if c2 > a * (b + 1.0) {
                    vec![b_pred(solve_kappa0(a, b, c)?)]
                } else {
                    vec![]
                }
            }
        };
        Ok(out)
    }

    /// The resonance condition of the boundary-value formulation: false
    /// exactly when a constant on the short edge is compatible with zero
    /// data on the long edge.
    pub fn bls_nonresonant(&self) -> bool {
        !matches!(
            *self,
            VertexCondition::Rank1 { z: ZParam::Infinite, mu } if mu == 0.0
        ) && !matches!(*self, VertexCondition::Rank0 { a, c, .. } if a == 0.0 && c == Complex64::new(0.0, 0.0))
    }

    /// The threshold-resonance condition of the limiting problem with a
    /// half-line lead: false for `z = ∞` and for every Robin coupling.
    pub fn borisov_nonresonant(&self) -> bool {
        !matches!(
            self,
            VertexCondition::Rank1 {
                z: ZParam::Infinite,
                ..
            } | VertexCondition::Rank0 { .. }
        )
    }

    pub fn to_json(&self) -> Value {
        let cjson = |c: Complex64| json!({"re": c.re, "im": c.im});
        match *self {
            VertexCondition::Rank2 => json!({"rank_p": 2}),
            VertexCondition::Rank1 { z, mu } => {
                let z = match z {
                    ZParam::Infinite => json!("inf"),
                    ZParam::Finite(z) => cjson(z),
                };
                json!({"rank_p": 1, "z": z, "mu": mu})
            }
            VertexCondition::Rank0 { a, b, c } => {
                json!({"rank_p": 0, "a": a, "b": b, "c": cjson(c)})
            }
        }
    }

    /// Parses the JSON encoding
    /// `{"rank_p":2} | {"rank_p":1,"z":{"re":x,"im":y}|"inf","mu":m}
    ///  | {"rank_p":0,"a":a,"b":b,"c":{"re":x,"im":y}}`.
    ///
    /// Real parameters may also be written as `{"re":x,"im":0}`; a nonzero
    /// imaginary part on `a`, `b` or `μ` is rejected as non-Hermitian.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidParameter("vertex condition must be an object".into()))?;
        let rank = obj
            .get("rank_p")
            .ok_or_else(|| Error::InvalidRank("missing rank_p".into()))?;
        let rank = rank
            .as_i64()
            .filter(|r| (0..=2).contains(r))
            .ok_or_else(|| Error::InvalidRank(rank.to_string()))?;
        let field = |name: &str| {
            obj.get(name)
                .ok_or_else(|| Error::InvalidParameter(format!("missing field {name}")))
        };
        let vc = match rank {
            2 => VertexCondition::Rank2,
            1 => {
                let z = match field("z")? {
                    Value::String(s) if s.eq_ignore_ascii_case("inf") => ZParam::Infinite,
                    other => ZParam::Finite(parse_complex("z", other)?),
                };
                let mu = parse_real("mu", field("mu")?)?;
                VertexCondition::Rank1 { z, mu }
            }
            _ => VertexCondition::Rank0 {
                a: parse_real("a", field("a")?)?,
                b: parse_real("b", field("b")?)?,
                c: parse_complex("c", field("c")?)?,
            },
        };
        vc.validate()
    }
}

fn parse_complex(name: &str, v: &Value) -> Result<Complex64> {
    let bad = || Error::InvalidParameter(format!("{name} must be a number or {{\"re\",\"im\"}}"));
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().ok_or_else(bad)?, 0.0)),
        Value::Object(m) => {
            let part = |k: &str| -> Result<f64> {
                match m.get(k) {
                    None => Ok(0.0),
                    Some(x) => x.as_f64().ok_or_else(bad),
                }
            };
            Ok(Complex64::new(part("re")?, part("im")?))
        }
        _ => Err(bad()),
    }
}

fn parse_real(name: &str, v: &Value) -> Result<f64> {
    let z = parse_complex(name, v)?;
    if z.im != 0.0 {
        return Err(Error::NonHermitian(format!(
            "{name} must be real, got imaginary part {}",
            z.im
        )));
    }
    Ok(z.re)
}

impl fmt::Display for VertexCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// Root of `κ coth κ = -μ(1+|z|²)` (for `z = ∞` no such root exists).
pub fn solve_kappa1(z: ZParam, mu: f64) -> Result<f64> {
    match z {
        ZParam::Infinite => Err(Error::WrongBranch(
            "z = ∞ yields a square-root type eigenvalue, not κ1".into(),
        )),
        ZParam::Finite(z) => solve_x_coth_x(-mu * (1.0 + z.norm_sqr())),
    }
}

/// Root of `κ coth κ = (|c|² - ab)/a` for `a ≠ 0`, or of `κ coth κ = -b`
/// when `a = c = 0`.
pub fn solve_kappa0(a: f64, b: f64, c: Complex64) -> Result<f64> {
    let c2 = c.norm_sqr();
    if a != 0.0 {
        solve_x_coth_x((c2 - a * b) / a)
    } else if c2 == 0.0 {
        solve_x_coth_x(-b)
    } else {
        Err(Error::WrongBranch(
            "a = 0 with c ≠ 0 gives a cubic-root eigenvalue without κ0".into(),
        ))
    }
}
