//! Smoothing of glued group actions on manifolds with boundary.
//!
//! The crate builds the stretch conjugacy that makes boundary-glued actions
//! smooth, the Heisenberg-group actions on the sphere, disk, annulus and
//! torus, and a numerical harness that checks seam smoothness, flatness,
//! blow-up functoriality and distortion.

pub mod blowup;
pub mod error;
pub mod geometry;
pub mod glue;
pub mod heisenberg;
pub mod numeric;
pub mod par;
pub mod stretch;
pub mod verify;

pub use error::{Error, Result};
