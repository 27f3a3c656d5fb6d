//! Shared fixtures for the benchmarks.

use warplab_core::geometry::{ModelBall, WarpingProfile};
use warplab_core::parabolic::{BoundaryCondition, HeatProblem, InitialData};

/// Unit ball on the κ = 1 sphere with `m` uniform intervals.
pub fn sphere_ball(n: usize, m: usize) -> ModelBall {
    ModelBall::uniform(WarpingProfile::sphere(1.0).expect("valid curvature"), n, 1.0, m).expect("valid ball")
}

/// Heat kernel evolved on truncated flat space.
pub fn kernel_problem(n: usize, intervals: usize, steps: usize) -> HeatProblem {
    HeatProblem {
        profile: WarpingProfile::euclidean(),
        n,
        radius: 4.0,
        boundary: BoundaryCondition::WholeSpace,
        initial: InitialData::HeatKernel { mass: 1.0 },
        t_start: 0.1,
        t_end: 0.5,
        steps,
        intervals,
        time_origin: None,
    }
}
