//! Rotationally symmetric model geometries and their comparison deficits.

pub mod ball;
pub mod comparison;
pub mod deficit;
pub mod grid;
pub mod profile;

pub use ball::{ricci_pair, unit_ball_volume, ModelBall};
pub use comparison::{
    ball_volume, curvature_report, hessian_r2_deficit, laplacian_distance, laplacian_distance_deficit,
    laplacian_r2_deficit, polar_distortion, sphere_area,
};
pub use deficit::{DeficitEntry, DeficitReport};
pub use grid::{RadialGrid, SpacingPolicy, DEFAULT_H_MAX_FRACTION};
pub use profile::{make_profile, ProfileDescriptor, QuinticHermite, WarpingProfile, TOL_CURV, TOL_ORIGIN};
