use serde::Serialize;

use crate::error::{LabError, Result};
use crate::format::to_json;

use super::kernel::HeatSolution;

/// Two space–time points on the radial ray(s) through the pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarnackConfig {
    pub r1: f64,
    pub t1: f64,
    pub r2: f64,
    pub t2: f64,
    /// Points on opposite rays, so `d = r₁ + r₂` instead of `|r₁ − r₂|`.
    pub antipodal: bool,
}

impl HarnackConfig {
    pub fn distance(&self) -> f64 {
        if self.antipodal {
            self.r1 + self.r2
        } else {
            (self.r1 - self.r2).abs()
        }
    }

    /// `x₁ = p + (t₁/t₂)(x₂ − p)` with `t₁ = 1`, `t₂ = 2`, `|x₂ − p| = 1`.
    pub fn kernel_equality() -> Self {
        Self { r1: 0.5, t1: 1.0, r2: 1.0, t2: 2.0, antipodal: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnackEvaluation {
    pub config: HarnackConfig,
    pub u1: f64,
    pub u2: f64,
    /// `u(x₂,t₂)(t₂/t₁)^{n/2} exp(d²/(4(t₂−t₁)))`.
    pub bound: f64,
    /// `bound / u(x₁,t₁)`; at least 1 when the inequality holds, 1 in the equality case.
    pub ratio: f64,
    pub caveat: Option<String>,
}

/// Evaluate the sharp Harnack ratio `bound / u(x₁,t₁)`; times enter through
/// their elapsed values since the solution's origin.
pub fn harnack_ratio(u: &dyn HeatSolution, config: HarnackConfig) -> Result<HarnackEvaluation> {
    let HarnackConfig { r1, t1, r2, t2, .. } = config;
    if !(t1 > u.time_origin() && t2 > t1) {
        return Err(LabError::InvalidParameter(format!("need origin < t1 < t2, got t1 = {t1}, t2 = {t2}")));
    }
    let d = config.distance();
    let n = u.dim() as f64;
    let u1 = u.value(r1, t1)?;
    let u2 = u.value(r2, t2)?;
    let origin = u.time_origin();
    let bound = u2 * ((t2 - origin) / (t1 - origin)).powf(n / 2.0) * (d * d / (4.0 * (t2 - t1))).exp();
    let caveat =
        (!u.complete()).then(|| "domain-truncation caveat: inequality is stated on complete manifolds".to_string());
    Ok(HarnackEvaluation { config, u1, u2, bound, ratio: bound / u1, caveat })
}

/// Ratios of one configuration set on a coarse and a refined field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnackReport {
    pub quantity: &'static str,
    pub min: f64,
    pub argmin: HarnackConfig,
    /// `max |ratio_coarse / ratio_fine − 1|` over all configurations; relative
    /// because the exponential factor spans many decades.
    pub tol_pde: f64,
    pub evaluated: usize,
    pub caveats: Vec<String>,
}

impl HarnackReport {
    pub fn passes(&self) -> bool {
        self.min >= 1.0 - self.tol_pde
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Check every configuration on `fine`, with the tolerance taken from the
/// coarse-to-fine change of the ratio.
pub fn harnack_check(
    coarse: &dyn HeatSolution,
    fine: &dyn HeatSolution,
    configs: &[HarnackConfig],
) -> Result<HarnackReport> {
    if configs.is_empty() {
        return Err(LabError::InvalidParameter("no harnack configurations".into()));
    }
    let mut min = f64::INFINITY;
    let mut argmin = configs[0];
    let mut tol = 0.0f64;
    let mut caveats = Vec::new();
    for &c in configs {
        let f = harnack_ratio(fine, c)?;
        let g = harnack_ratio(coarse, c)?;
        tol = tol.max((g.ratio / f.ratio - 1.0).abs());
        if f.ratio < min {
            min = f.ratio;
            argmin = c;
        }
        if let Some(msg) = f.caveat {
            if !caveats.contains(&msg) {
                caveats.push(msg);
            }
        }
    }
    Ok(HarnackReport { quantity: "harnack_ratio", min, argmin, tol_pde: tol, evaluated: configs.len(), caveats })
}
