//! Exact point counts on jet spaces of moduli of rational curves on
//! hypersurfaces, and numerical checks of circle-method estimates over
//! F_p[t].
//!
//! The crate is organised bottom-up: [`arith`] provides F_p, truncated power
//! series and Z[zeta_p]; [`sections`] the sections of O(r) on P^1 with jet
//! coefficients; [`geometry`] the forms; [`counting`] exact counts;
//! [`circle`] the exponential sums and the checks built on them;
//! [`certifier`] the exact rational bookkeeping of the final inequalities.

pub mod arith;
pub mod budget;
pub mod certifier;
pub mod circle;
pub mod counting;
pub(crate) mod enumerate;
pub mod error;
pub mod geometry;
pub mod report;
pub mod sections;

pub use budget::Budget;
pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
