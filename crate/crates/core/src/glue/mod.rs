//! Glued surfaces, glued maps, the smoothed gluing and the double.

pub mod action;
pub mod manifold;
pub mod map;

pub use action::GluedAction;
pub use manifold::{BoundaryGluing, GluedManifold, GluingPair, PiecePort, Seam, TaggedPoint, SEAM_EPS};
pub use map::{
    check_compatibility, compatibility_tol, double, double_host, functoriality_defect, glue_maps, piece_psis,
    smooth_glue, CompatibilityReport, GluedMap,
};
