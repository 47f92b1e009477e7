//! Exponential sums over jet spaces and the circle-method identities and
//! inequalities built on them.

pub mod arcs;
pub mod expsum;
pub mod weyl;

pub use arcs::{
    check_major_identity, check_major_identity_pairs, check_orthogonality, check_orthogonality_pairs, check_t_vanishing,
    classify_arc, classify_pair, ArcClass, MajorRoute, MajorTable,
};
pub use expsum::{histogram, s_alpha, s_alpha_beta, s_alpha_direct, t_major, Histogram, PairSpectrum, PairSumMode, Spectrum, TMode};
pub use weyl::{
    alpha_sample, check_shrink, check_weyl, dioph_audit, dioph_threshold, minor_arc_mass, n_count, n_single, DiophAudit, NMode,
    WeylPairSetup, WeylSetup, DEFAULT_PRECISION_CAP,
};
