#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical laboratory for sharp gradient estimates on rotationally
//! symmetric model balls.
//!
//! The [`geometry`] module builds warped-product balls and their comparison
//! deficits, [`elliptic`] handles harmonic functions and Green's functions
//! in that setting, and [`parabolic`] evolves heat solutions and evaluates
//! the Li–Yau and Harnack quantities.

pub mod elliptic;
pub mod error;
pub mod format;
pub mod geometry;
pub mod ode;
pub mod parabolic;
pub mod quadrature;
pub mod stats;
pub mod tridiag;

pub use error::{LabError, Result};
pub use geometry::{DeficitEntry, DeficitReport, ModelBall, ProfileDescriptor, RadialGrid, WarpingProfile};
