//! Exact rational bookkeeping of the final inequalities: the closed forms
//! for s, A, M and A', the n-thresholds and e_0, grid certificates, and
//! the identities the bound chains evaluate at e_0.

pub mod chains;
pub mod formulas;
pub mod identities;
pub mod sweep;

pub use chains::{bound_value, canonical_case, terminal_case, Bound};
pub use formulas::{a_prime, a_quantity, e0, f_g, m_quantity, mu_dims, s_value, thresholds, MCase, Mode, Threshold, Q};
pub use identities::{reproduce_paper_identities, IdentityReport, SpotCheck};
pub use sweep::{certify, default_spans, Certificate, Span};
