use std::f64::consts::PI;

use crate::error::{LabError, Result};

/// `(4πt)^{−n/2} exp(−d²/(4t))`.
pub fn euclidean_heat_kernel(n: usize, d: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(LabError::InvalidParameter(format!("heat kernel needs t > 0, got {t}")));
    }
    Ok((4.0 * PI * t).powf(-(n as f64) / 2.0) * (-d * d / (4.0 * t)).exp())
}

/// Log-derivatives of a positive radial heat solution at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDerivatives {
    /// `(ln u)_t`
    pub dt: f64,
    /// `∂_r ln u`, which equals `|∇ ln u|` up to sign for radial solutions.
    pub dr: f64,
    /// `Δ ln u`
    pub laplacian: f64,
}

/// A positive heat solution that can report values and log-derivatives.
pub trait HeatSolution {
    fn dim(&self) -> usize;

    /// `u(r, t)` on the ray through the pole at distance `r`.
    fn value(&self, r: f64, t: f64) -> Result<f64>;

    fn log_derivatives(&self, r: f64, t: f64) -> Result<LogDerivatives>;

    /// Whether the solution lives on a complete model (no boundary caveat).
    fn complete(&self) -> bool;

    /// Start of the solution's life; the estimates use elapsed time `t − origin`.
    fn time_origin(&self) -> f64 {
        0.0
    }
}

/// The Euclidean heat kernel centered at the pole, scaled by `mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanKernel {
    pub n: usize,
    pub mass: f64,
}

impl HeatSolution for EuclideanKernel {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, r: f64, t: f64) -> Result<f64> {
        Ok(self.mass * euclidean_heat_kernel(self.n, r, t)?)
    }

    fn log_derivatives(&self, r: f64, t: f64) -> Result<LogDerivatives> {
        if !(t > 0.0) {
            return Err(LabError::InvalidParameter(format!("t must be > 0, got {t}")));
        }
        let nf = self.n as f64;
        Ok(LogDerivatives {
            dt: -nf / (2.0 * t) + r * r / (4.0 * t * t),
            dr: -r / (2.0 * t),
            laplacian: -nf / (2.0 * t),
        })
    }

    fn complete(&self) -> bool {
        true
    }
}

/// `u ≡ c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSolution {
    pub n: usize,
    pub c: f64,
}

impl HeatSolution for ConstantSolution {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, _r: f64, _t: f64) -> Result<f64> {
        Ok(self.c)
    }

    fn log_derivatives(&self, _r: f64, t: f64) -> Result<LogDerivatives> {
        if !(t > 0.0) {
            return Err(LabError::InvalidParameter(format!("t must be > 0, got {t}")));
        }
        Ok(LogDerivatives { dt: 0.0, dr: 0.0, laplacian: 0.0 })
    }

    fn complete(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_ball_volume;
    use crate::quadrature::{integrate, QuadOptions};

    #[test]
    fn kernel_values() {
        assert!((euclidean_heat_kernel(2, 0.0, 1.0 / (4.0 * PI)).unwrap() - 1.0).abs() < 1e-15);
        assert!((euclidean_heat_kernel(1, 0.0, 1.0).unwrap() - 0.282_094_791_773_878_1).abs() < 1e-15);
        assert!(euclidean_heat_kernel(3, 1.0, 0.0).is_err());
    }

    #[test]
    fn kernel_has_unit_mass() {
        for n in 1..=4usize {
            for &t in &[0.01f64, 0.3, 2.0] {
                // radial integral ∫ nω_n r^{n−1} H dr over a truncated range, Gaussian oracle
                let area = n as f64 * unit_ball_volume(n);
                let cut = 40.0 * t.sqrt();
                let m = integrate(
                    |r| area * r.powi(n as i32 - 1) * euclidean_heat_kernel(n, r, t).unwrap(),
                    0.0,
                    cut,
                    QuadOptions::default(),
                )
                .unwrap();
                assert!((m.value - 1.0).abs() < 1e-8, "n={n} t={t} mass={}", m.value);
            }
        }
    }

    #[test]
    fn kernel_log_derivatives_match_finite_differences() {
        let k = EuclideanKernel { n: 3, mass: 1.0 };
        let (r, t, e) = (0.7, 0.4, 1e-5);
        let l = |r: f64, t: f64| k.value(r, t).unwrap().ln();
        let d = k.log_derivatives(r, t).unwrap();
        assert!((d.dt - (l(r, t + e) - l(r, t - e)) / (2.0 * e)).abs() < 1e-8);
        assert!((d.dr - (l(r + e, t) - l(r - e, t)) / (2.0 * e)).abs() < 1e-8);
    }
}
