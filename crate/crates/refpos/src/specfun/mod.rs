//! Self-contained special functions: log-gamma, digamma, Gegenbauer
//! polynomials (including the order-0 limit family), coupling coefficients,
//! Funk-Hecke eigenvalues, kappa constants, and low-dimensional spherical
//! harmonics. All operations are pure and stateless.

mod coupling;
mod gamma;
mod gegenbauer;
mod harmonics;

pub use coupling::{coupling_closed, coupling_quadrature, kappa, CouplingTable};
pub use gamma::{digamma, log_gamma, log_gamma_signed, pochhammer};
pub use gegenbauer::{gegenbauer, gegenbauer_at_one, GegenbauerIndex};
pub use harmonics::{
    funk_hecke_eigenvalue, spherical_harmonic, surface_quadrature, HarmonicIndex,
};
