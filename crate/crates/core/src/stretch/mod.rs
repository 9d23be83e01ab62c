//! The smoothing conjugacy: the profile `chi`, the collar stretch `Psi` and conjugation.

pub mod profile;
pub mod psi;

pub use profile::{build_chi, Blend, ChiProfile, MonotonicityCertificate, StretchProfile};
pub use psi::{
    build_psi, build_psi_all, conjugate, eval_conjugate, seam_flip, stretch_conjugate, stretch_maps, CollarSpec, Side,
    StretchMaps,
};
