//! Finite fields, truncated power series and exact cyclotomic arithmetic.

pub mod cyclo;
pub mod field;
pub mod interval;
pub mod jet;
pub mod linalg;
pub mod poly;

pub use cyclo::{psi_m, CyclotomicSum};
pub use field::PrimeField;
pub use interval::{cyclo_magnitude, RealInterval};
pub use jet::JetScalar;
