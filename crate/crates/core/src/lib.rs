//! Numerical noncommutative functional analysis on matrix spaces.
//!
//! The crate works with operator spaces realized concretely inside `M_n`:
//!
//! * [`matcore`]: dense complex matrices, operator norms, Hermitian
//!   eigendecomposition, Kronecker products and the PSD-cone projection.
//! * [`opspace`]: operator spaces, linear maps between them, level-`k`
//!   amplifications, Paulsen systems and complete contractivity/isometry
//!   decisions through completely positive extensions.
//! * [`staralg`]: C*-algebras generated by matrix sets, their Wedderburn
//!   block decomposition, block ideals and quotients by compression.
//! * [`envelope`]: the C*-envelope of a unital operator space obtained by
//!   eliminating redundant blocks of the generated C*-algebra.
//! * [`banachstone`]: decompositions `T(a)e = u π(a)` of complete isometries
//!   together with their spatial and commutative forms.

pub mod banachstone;
pub mod envelope;
pub mod error;
pub mod matcore;
pub mod opspace;
pub mod random;
pub mod staralg;

pub use error::{Error, Result};
pub use matcore::{CMatrix, HermEig, C64};
