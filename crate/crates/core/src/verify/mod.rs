//! The verification harness: seam smoothness, flatness, orbits and density.

pub mod decay;
pub mod orbit;
pub mod seam;

pub use decay::{fit_line, flatness_defect, measure_flatness, sandwich_check, DecayConfig, DecayReport, LineFit, SandwichReport};
pub use orbit::{
    density_by_word_length, density_check, glued_orbit, glued_position, omega_estimate, orbit, orbit_batch,
    DensityReport, OmegaEstimate, OrbitData, WordDensity,
};
pub use seam::{
    seam_straddle_defect, verify_cr_at_seam, OrderCheck, SeamCheckConfig, SeamLocation, SmoothnessReport, Verdict,
};
