//! Moment-curve and sparse phases viewed as functions of their coefficients.

mod level;
mod necessity;
mod phase;
mod scan;

pub use level::{h_at_most, h_exact, Cubic, EXACT_DEGREE};
pub use necessity::{fresnel_constant, necessity_probe, FresnelConstant, NecessityParams, NecessityProbe, MAX_PROBE_LEVEL};
pub use phase::{
    assemble, coefficient_h, coefficient_integral, taylor_map, validate_exponents, CoefficientPhase, MomentPhase,
    SparsePhase,
};
pub use scan::{
    box_constant, box_cover_check, dyadic_family, dyadic_tail, scan_family, sparse_scaling, sublevel_scaling, BoxCover,
    DyadicResult, Family, ScanResult, MAX_Q, MAX_SCAN_SAMPLES, MAX_SHELL,
};
