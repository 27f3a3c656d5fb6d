use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::quadrature::simpson_weights;

use super::grid::RadialGrid;
use super::profile::{WarpingProfile, TOL_CURV};

/// Volume `ω_n` of the Euclidean unit ball in `ℝⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    // ω_0 = 1, ω_1 = 2, ω_n = (2π/n) ω_{n-2}
    let mut w = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if n.is_multiple_of(2) { 2 } else { 3 };
    while k <= n {
        w *= 2.0 * PI / k as f64;
        k += 2;
    }
    w
}

/// A geodesic ball `B_R(p)` in an `n`-dimensional warped model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBall {
    profile: WarpingProfile,
    n: usize,
    radius: f64,
    grid: RadialGrid,
    sphere_const: f64,
    volume_weights: Vec<f64>,
}

impl ModelBall {
    pub fn new(profile: WarpingProfile, n: usize, grid: RadialGrid) -> Result<Self> {
        if n < 2 {
            return Err(LabError::InvalidBall(format!("dimension must be ≥ 2, got {n}")));
        }
        let radius = grid.radius();
        if radius > profile.domain_max() {
            return Err(LabError::InvalidBall(format!(
                "radius {radius} exceeds the profile domain {}",
                profile.domain_max()
            )));
        }
        for &r in &grid.nodes()[1..] {
            let (f, df, d2f) = profile.eval(r);
            if !(f > 0.0) {
                return Err(LabError::InvalidProfile { at: r, reason: format!("f = {f} is not positive") });
            }
            if d2f > TOL_CURV {
                return Err(LabError::InvalidProfile {
                    at: r,
                    reason: format!("f'' = {d2f:.3e} > 0 (concavity fails)"),
                });
            }
            if n >= 3 {
                let (rad, tan) = ricci_pair(n, f, df, d2f);
                if rad < -TOL_CURV || tan < -TOL_CURV {
                    return Err(LabError::InvalidProfile {
                        at: r,
                        reason: format!("negative Ricci curvature (radial {rad:.3e}, tangential {tan:.3e})"),
                    });
                }
            }
        }
        let sphere_const = n as f64 * unit_ball_volume(n);
        let simpson = simpson_weights(grid.nodes());
        let volume_weights = grid
            .nodes()
            .iter()
            .zip(&simpson)
            .map(|(&r, w)| w * sphere_const * profile.f(r).powi(n as i32 - 1))
            .collect();
        Ok(Self { profile, n, radius, grid, sphere_const, volume_weights })
    }

    /// Ball on a uniform grid with `m` intervals.
    pub fn uniform(profile: WarpingProfile, n: usize, radius: f64, m: usize) -> Result<Self> {
        Self::new(profile, n, RadialGrid::uniform(radius, m)?)
    }

    pub fn profile(&self) -> &WarpingProfile {
        &self.profile
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    /// `nω_n`, the area of the unit sphere `S^{n-1}`.
    pub fn sphere_constant(&self) -> f64 {
        self.sphere_const
    }

    /// Area `A(r) = nω_n f(r)^{n-1}` of the geodesic sphere of radius `r`.
    pub fn area(&self, r: f64) -> f64 {
        self.sphere_const * self.profile.f(r).powi(self.n as i32 - 1)
    }

    /// Simpson weights times `A(r_i)`: `Σ wᵢ gᵢ ≈ ∫_B g dV` for radial `g`.
    pub fn volume_weights(&self) -> &[f64] {
        &self.volume_weights
    }

    /// Volume average `⨍_B g dV` of nodal values (Simpson quadrature).
    pub fn volume_average(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.volume_weights.len());
        let (num, den) = values.iter().zip(&self.volume_weights).fold((0.0, 0.0), |(a, b), (v, w)| (a + v * w, b + w));
        num / den
    }

    /// Same ball with a different grid.
    pub fn with_grid(&self, grid: RadialGrid) -> Result<Self> {
        Self::new(self.profile.clone(), self.n, grid)
    }
}

/// Radial and tangential Ricci curvatures `(-(n-1)f''/f, -f''/f + (n-2)(1-f'²)/f²)`.
pub fn ricci_pair(n: usize, f: f64, df: f64, d2f: f64) -> (f64, f64) {
    let m = n as f64;
    (-(m - 1.0) * d2f / f, -d2f / f + (m - 2.0) * (1.0 - df * df) / (f * f))
}
