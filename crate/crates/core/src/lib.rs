//! Arbitrary-order finite elements and stable generalized finite elements
//! (SGFEM) for one-dimensional elliptic interface problems.
//!
//! The crate covers both the source problem `-(kappa u')' = f` and the
//! eigenvalue problem `-(kappa u')' = lambda u` on `(0, 1)` with homogeneous
//! Dirichlet conditions and a coefficient that jumps at an interface
//! `gamma`. Exact reference solutions, interface-aware error norms and
//! refinement sweeps are included.

pub mod analytic;
pub mod assembly;
pub mod basis;
pub mod densela;
pub mod error;
pub mod errors;
pub mod mesh;
pub mod quadrature;
pub mod sweep;

pub use error::{Error, Result};
