//! Distribution-shape analysis and the regret-theory evaluators.

mod bounds;
mod gaps;
mod shape;
mod survival;

pub use bounds::{balanced_alpha, max_tail_check, regret_bound_from_pulls, suboptimal_pulls_bound, MaxTailReport};
pub use gaps::{estimate_gaps, GapEstimate};
pub use shape::{
    estimate_shape_constants, linear_grid, probe_shape_constants, sample_std, ShapeConstants, DEFAULT_GRID_SIZE,
    DEGENERATE_STD, MIN_SHAPE_SAMPLES,
};
pub use survival::SurvivalEstimate;
