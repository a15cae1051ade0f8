//! Numerical laboratory for reflection positivity through planes and spheres
//! and the sharp (logarithmic) Hardy-Littlewood-Sobolev constants.
//!
//! The crate is organized around a small closed function algebra
//! ([`functional::FuncExpr`]) on which Riesz and logarithmic pair energies are
//! evaluated by adaptive quadrature, together with two independent spectral
//! routes (Laplace transforms on half-spaces, harmonic moments against
//! Gegenbauer coupling weights on balls) that cross-check every energy.

pub mod error;
pub mod functional;
pub mod geometry;
pub mod quad;
pub mod specfun;
pub mod sharp;
pub mod sweep;
pub mod spectral;

pub use error::{Error, Result};
pub use quad::{QuadResult, Tol};
