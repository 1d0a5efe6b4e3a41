//! Operator spaces inside `M_n` and linear maps between them.

mod ascent;
mod cb;
pub mod cp;
mod map;
mod paulsen;
pub(crate) mod space;

pub use ascent::{level_bounds, level_norm_lower_bound, LevelBound};
pub use cb::{
    find_violation, is_complete_isometry, is_complete_isometry_seeded, is_completely_contractive,
    is_completely_contractive_seeded, CbCertificate, CbVerdict, IsometryCertificate, Witness,
};
pub use cp::{
    choi_cp_test, choi_matrix, cp_extension_feasible, ChoiTest, Feasibility, FeasibilityReport,
};
pub use map::{MapRepr, SpaceMap};
pub use paulsen::{paulsen_map, paulsen_system};
pub use space::{OperatorSpace, SpaceRepr, MEMBERSHIP_TOL, SPAN_TOL};
