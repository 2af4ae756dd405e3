//! Multi-scale analysis: good cylinders, pruning of bad subtrees, good paths
//! and the ball chain around an escape ray.

mod ballchain;
mod cylinder;
mod params;
mod tree;

pub use ballchain::{
    check_ball_chain_events, evaluate_ball_chain, plan_ball_chain, BallChainEvents, BallChainPlan,
    LevelEvents,
};
pub use cylinder::{
    check_good_cylinder, path_time, windows, CheckBudgets, CheckMode, Coverage, CylinderVerdict,
    Violation, Windows,
};
pub use params::{beta, derive_scale_params, eta, ScaleFlags, ScaleParams};
pub use tree::{
    analyze_good_paths, count_minimal_cutsets, find_good_path, prune_bad_subtrees, prune_to_depth,
    voronoi_cells, BadCylinder, GoodPathResult,
};
