use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{LabError, Result};

/// Default resolution bound as a fraction of the radius: `r₁ ≤ R/512`.
pub const DEFAULT_H_MAX_FRACTION: f64 = 1.0 / 512.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum SpacingPolicy {
    Uniform,
    /// Smooth stretching `r = R(ξ − β sin(2πξ)/(2π))`, refined by the factor
    /// `1 − β` at both ends.
    Clustered {
        beta: f64,
    },
    /// Caller-supplied nodes.
    Explicit,
}

/// Radial nodes `0 = r₀ < r₁ < … < r_m = R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    policy: SpacingPolicy,
}

impl RadialGrid {
    /// `m` equal intervals, checked against the default resolution bound.
    pub fn uniform(radius: f64, m: usize) -> Result<Self> {
        Self::with_policy(radius, m, SpacingPolicy::Uniform, radius * DEFAULT_H_MAX_FRACTION)
    }

    pub fn with_policy(radius: f64, m: usize, policy: SpacingPolicy, h_max: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(LabError::InvalidGrid(format!("radius must be positive, got {radius}")));
        }
        if m < 4 {
            return Err(LabError::InvalidGrid(format!("need at least 4 intervals, got {m}")));
        }
        let nodes: Vec<f64> = match policy {
            SpacingPolicy::Uniform => (0..=m).map(|i| radius * i as f64 / m as f64).collect(),
            SpacingPolicy::Clustered { beta } => {
                if !(0.0..1.0).contains(&beta) {
                    return Err(LabError::InvalidGrid(format!("clustering factor must lie in [0, 1), got {beta}")));
                }
                (0..=m)
                    .map(|i| {
                        let xi = i as f64 / m as f64;
                        radius * (xi - beta * (2.0 * PI * xi).sin() / (2.0 * PI))
                    })
                    .collect()
            }
            SpacingPolicy::Explicit => {
                return Err(LabError::InvalidGrid("explicit grids are built with RadialGrid::from_nodes".into()));
            }
        };
        let mut nodes = nodes;
        nodes[m] = radius;
        Self::from_nodes_checked(nodes, policy, h_max)
    }

    /// Adopt explicit nodes after validation.
    pub fn from_nodes(nodes: Vec<f64>, h_max: f64) -> Result<Self> {
        Self::from_nodes_checked(nodes, SpacingPolicy::Explicit, h_max)
    }

    fn from_nodes_checked(nodes: Vec<f64>, policy: SpacingPolicy, h_max: f64) -> Result<Self> {
        if nodes.len() < 5 {
            return Err(LabError::InvalidGrid("need at least 5 nodes".into()));
        }
        if nodes[0] != 0.0 {
            return Err(LabError::InvalidGrid(format!("first node must be 0, got {}", nodes[0])));
        }
        if let Some(i) = (1..nodes.len()).find(|&i| !(nodes[i] > nodes[i - 1])) {
            return Err(LabError::InvalidGrid(format!("nodes not strictly increasing at index {i}")));
        }
        if nodes[1] > h_max * (1.0 + 1e-12) {
            return Err(LabError::InvalidGrid(format!(
                "first node r1 = {} exceeds the resolution bound {h_max}",
                nodes[1]
            )));
        }
        Ok(Self { nodes, policy })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of intervals `m`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn radius(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn policy(&self) -> SpacingPolicy {
        self.policy
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn is_uniform(&self) -> bool {
        let h = self.nodes[1];
        self.nodes.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-10 * h)
    }

    /// Index of the last node `≤ r`, clamped so that `[i, i+1]` is an interval.
    pub fn locate(&self, r: f64) -> usize {
        let p = self.nodes.partition_point(|&x| x <= r);
        p.saturating_sub(1).min(self.nodes.len() - 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_shape() {
        let g = RadialGrid::uniform(2.0, 1024).unwrap();
        assert_eq!(g.intervals(), 1024);
        assert_eq!(g.radius(), 2.0);
        assert!((g.nodes()[1] - 2.0 / 1024.0).abs() < 1e-16);
        assert!(g.is_uniform());
    }

    #[test]
    fn coarse_grid_violates_resolution_bound() {
        assert!(RadialGrid::uniform(1.0, 256).is_err());
        assert!(RadialGrid::with_policy(1.0, 256, SpacingPolicy::Uniform, 1.0 / 256.0).is_ok());
    }

    #[test]
    fn clustered_grid_refines_both_ends() {
        let g = RadialGrid::with_policy(1.0, 512, SpacingPolicy::Clustered { beta: 0.5 }, 1.0 / 512.0).unwrap();
        let n = g.nodes();
        let mid = n[257] - n[256];
        assert!(n[1] < 0.6 * mid);
        assert!(n[512] - n[511] < 0.6 * mid);
        assert!(!g.is_uniform());
    }

    #[test]
    fn locate_clamps() {
        let g = RadialGrid::uniform(1.0, 512).unwrap();
        assert_eq!(g.locate(0.0), 0);
        assert_eq!(g.locate(1.0), 511);
        assert_eq!(g.locate(0.5 + 1e-9), 256);
    }
}
