//! The discrete Heisenberg group: exact arithmetic, word metric, distortion
//! of the center, and the concrete actions.

pub mod action;
pub mod group;
pub mod metric;

pub use action::{
    blown_up_projective, build_action, check_irrational, default_alpha, element_map, evaluate_word_action,
    picture_point, relation_defect, ActionSpec, ActionTarget,
};
pub use group::{Gen, HeisElem, Word};
pub use metric::{
    central_witness, distortion_profile, word_length, write_distortion_csv, CayleyBall, DistortionProfile,
    DistortionRow,
};
