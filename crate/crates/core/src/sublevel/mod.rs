//! Sublevel-set measures, disc covers around derived zeros, the cluster sandwich,
//! power bases for multivariate derivatives and the slicing estimate.

mod basis;
mod cover;
mod measure;
mod slice;

pub use crate::hensel::DiscCover;
pub use basis::{basis_dim, build_power_basis, pairing, rotate_to_e1, PowerBasis, UnitaryMap, MAX_BASIS_DIM};
pub use cover::{
    h_sublevel_equivalence, kw_sandwich, sample_local_sublevel, verify_disc_cover, DiscCoverCheck, HEquivalence,
    KwSandwich,
};
pub use measure::{
    local_sublevel_predicate, measure_grid, measure_mc, measure_quadtree, region_volume, sample_region, Bound,
    Constraint, MeasureEstimate, Method, OperatorTerm, PlanarDomain, QuadtreeOptions,
};
pub use slice::{slice_measure_nd, SliceComparison};
