//! Certified Newton iteration, the derivative-zero locator and sublevel covers.

mod lemma;
mod locator;
mod split;

pub use lemma::{
    check_conditions, iterate, iterate_with, ClaimRecord, HenselCertificate, HenselConditions, IterateOptions,
    Thresholds,
};
pub use locator::{locate_derivative_zero, CaseConstants, DerivativeLocator, Located, LocatorCase};
pub use split::{
    sample_sublevel, sublevel_split_k, sublevel_split_k1, ClassCover, DiscCover, SplitOptions, SplitReport,
};
