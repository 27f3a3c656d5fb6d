//! Harmonic functions, Cheng–Yau quantities and radial Green's functions.

pub mod cheng_yau;
pub mod green;
pub mod harmonic;
pub mod modes;

pub use cheng_yau::{
    cheng_yau_deficit, cheng_yau_stability_functional, quotient_field, v_inequality_residual, QuotientField,
    StabilityFunctional, VInequalityCheck,
};
pub use green::{
    b_function_boundary_gradient, euclidean_green, green_comparison, green_self_test, green_table_csv, radial_green,
    BoundaryGradient, RadialGreen, SelfTestResult, TestFunction,
};
pub use harmonic::{
    harmonic_from_boundary, harmonic_on_lattice, log_gradient, poisson_kernel_flat, BoundaryData, EvalLattice,
    FourierCoefficient, FourierHarmonic, PointValue, PositivityCertificate,
};
pub use modes::{solve_mode, solve_mode_with_limit, ModeProfile, DEFAULT_K_MAX};
