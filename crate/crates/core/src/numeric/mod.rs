//! Extended-range scalars, the flat stretch primitives and finite differences.

mod big;
mod fd;
mod flat;
mod log;
mod real;
mod tolerance;

pub use big::{BigScalar, DEFAULT_BITS};
pub use fd::{fd_derivative, fd_derivative_stencil, FdConfig, FdEstimate, Stencil};
pub use flat::{conjugate_transverse_stable, phi, phi2, phi_inv, stable_conjugate_linear};
pub use log::LogScalar;
pub use real::{Real, LOG_SWITCH};
pub use tolerance::TolerancePolicy;
