//! Hypersurfaces: symmetric forms, evaluation on jet sections, the
//! multilinear forms Psi_j, iterated differences and smoothness.

pub mod form;
pub mod multilinear;
pub mod smooth;

pub use form::{eval_form, eval_form_jet, gradient, FormSpec, SymmetricForm};
pub use multilinear::{difference_apply, multilinear_psi, multilinear_psi_or_zero, RingElem};
pub use smooth::{smoothness_check, SmoothnessReport};
