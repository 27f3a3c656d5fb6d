//! Radial heat flow on model balls, the Li–Yau quantities and the sharp
//! Harnack ratio.

mod harnack;
mod kernel;
mod li_yau;
mod solver;

pub use harnack::{harnack_check, harnack_ratio, HarnackConfig, HarnackEvaluation, HarnackReport};
pub use kernel::{euclidean_heat_kernel, ConstantSolution, EuclideanKernel, HeatSolution, LogDerivatives};
pub use li_yau::{
    li_yau_g_quantity, li_yau_quantity, li_yau_refinement, li_yau_refinement_from, li_yau_scan, LiYauQuantity,
    LiYauRefinement, LiYauReport, ScanWindow,
};
pub use solver::{
    heat_solve_radial, kernel_error, truncation_error_estimate, BoundaryCondition, HeatField, HeatProblem, InitialData,
    SchemeInfo,
};
