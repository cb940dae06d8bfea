//! Spectral theory of the Laplacian on a two-edge metric graph whose first
//! edge has length `ε → 0`.
//!
//! The graph consists of a short edge `s_ε = (0, ε)` with a Neumann condition
//! at its free end and a unit edge `e = (0, 1)` with a Dirichlet condition at
//! its free end. The edges meet at a central vertex carrying an arbitrary
//! self-adjoint coupling `P U = 0, Q U' = T Q U`, see [`VertexCondition`].
//!
//! The crate provides
//! - classification of negative eigenvalues into bounded (`B`), square-root
//!   (`S`, `λ ~ -α/ε`) and cubic-root (`C`, `λ ~ -α ε^{-2/3}`) types,
//! - root finding for the characteristic equations and rate fitting,
//! - explicit resolvent application on sampled functions,
//! - explicit eigenfunctions and their edge localization,
//! - the matrix-inertia eigenvalue count for Robin-type couplings,
//! - an independent finite-element oracle,
//! - the acceptance checks bundled as [`acceptance`].

pub mod acceptance;
pub mod counting;
pub mod eigenmodes;
mod error;
pub mod fd_oracle;
pub mod grid;
pub mod hyperbolic;
pub mod resolvent;
pub mod roots;
pub mod secular;
pub mod vertex_model;

pub use error::{Error, Result};
pub use vertex_model::{EigKind, EigPrediction, VertexCondition, ZParam};

pub use num_complex::Complex64;
