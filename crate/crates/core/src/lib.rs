//! Ghost-series slope combinatorics in exact arithmetic.
//!
//! Everything is computed over `Q ∪ {∞}` with arbitrary-precision rationals: ghost
//! polynomials and their zero sets, Newton polygons at generic weights, derivative polygons,
//! near-Steinberg breakpoint tests, k-thresholds, predicted L-invariant slopes and the
//! equidistribution statistics built from them.

pub mod distribution;
pub mod error;
pub mod ghost;
pub mod polygon;
pub mod prediction;
pub mod render;
pub mod slopes;
pub mod valuation;
pub mod verify;
pub mod wedge;

pub use error::{GhostError, Result};
pub use ghost::{DimensionTriple, GhostContext, GhostPolynomial, GhostZeroSet, Mode, WeightIndex};
pub use polygon::{dual_graph, lower_hull, DualGraph, DualSegment, RationalPolygon};
pub use slopes::{
    breakpoints_by_criterion, derivative_polygon, global_stretch, is_near_steinberg, k_newslopes, k_thresholds,
    model_radius, newton_polygon_at, slope_window, sweep_threshold, DerivativePolygon, Provenance, SlopeWindow,
    ThresholdVector, WeightPoint,
};
pub use valuation::{parse_rational, vp_int, weight_distance, Rational, Valuation};
