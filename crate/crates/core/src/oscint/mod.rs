//! Oscillatory integrals `∫ e(f(z)) φ(z) dz` over `C^n` (n <= 2), bumps with exact
//! derivatives, decay fits, covering diagnostics and the sublevel duality check.

mod analysis;
mod bump;
mod duality;
mod jet;
mod quad;

pub use analysis::{
    covering_decomposition, decay_fit, log_grid, thm_bound_check, Covering, DecayFit, DecaySample, ThmRatio,
    COVERING_EPS_MAX,
};
pub use bump::{bump_eval, cn_norm, smooth_step, BumpKind, BumpSpec, MAX_BUMP_ORDER};
pub use duality::{duality_check, DualityCheck, DualityOptions, PlateauTransform, TAIL_LIMIT};
pub use jet::{Jet, JetSpace};
pub use quad::{integrate, OscResult, Phase, QuadRule, QuadSpec, NYQUIST_FACTOR, POINT_BUDGET};
