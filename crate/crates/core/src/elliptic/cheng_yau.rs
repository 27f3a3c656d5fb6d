//! Sharp gradient bound for positive harmonic functions on 2-D balls.
//!
//! On a ball of radius `R` all quantities are taken after rescaling to the
//! unit ball: with `ρ = r/R` the bound reads `(1 − ρ²)·R|∇ln u|/2 ≤ 1`, and
//! the differential inequality `Δv ≥ 2e^v` for `v = ln|∇ln u|²` is reported
//! as `R²(Δv − 2e^v)`.

use serde::Serialize;

use crate::geometry::{DeficitEntry, DeficitReport};
use crate::quadrature::simpson_weights;

use super::harmonic::FourierHarmonic;

/// Allowance for mode-solve error and series truncation in the quotient.
pub const CHENG_YAU_TOL: f64 = 1e-8;
/// Points with `|∇ln u| ≤ EPS_LOG` are excluded from the stability functional.
pub const EPS_LOG: f64 = 1e-12;
/// Points with `Q ≤ EPS_Q` are excluded from the `v` inequality.
pub const EPS_Q: f64 = 1e-10;
/// Fraction of excluded lattice points above which results are unreliable.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.01;
/// Inner radius (fraction of `R`) of the annulus carrying the `v` stencil.
pub const V_INNER_FRACTION: f64 = 0.05;

/// Quotient `(1 − ρ²)R|∇ln u|/2` on the evaluation lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientField {
    pub radii: Vec<f64>,
    pub thetas: Vec<f64>,
    /// Row-major over (radius, angle).
    pub values: Vec<f64>,
}

impl QuotientField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.thetas.len() + j]
    }

    /// Quotients along the lattice ray with angle index `j`.
    pub fn ray(&self, j: usize) -> Vec<(f64, f64)> {
        self.radii.iter().enumerate().map(|(i, &r)| (r, self.at(i, j))).collect()
    }
}

/// Rescaled `R|∇ln u|` on the lattice, row-major.
fn scaled_log_gradients(u: &FourierHarmonic) -> Vec<f64> {
    let radius = u.ball().radius();
    let nodes = u.ball().nodes();
    let nt = u.thetas().len();
    u.lattice_values().iter().enumerate().map(|(idx, pv)| radius * u.log_gradient_of(nodes[1 + idx / nt], pv)).collect()
}

pub fn quotient_field(u: &FourierHarmonic) -> QuotientField {
    let radius = u.ball().radius();
    let radii: Vec<f64> = u.ball().nodes()[1..=u.last_lattice_node()].to_vec();
    let nt = u.thetas().len();
    let values = scaled_log_gradients(u)
        .iter()
        .enumerate()
        .map(|(idx, g)| {
            let rho = radii[idx / nt] / radius;
            0.5 * (1.0 - rho * rho) * g
        })
        .collect();
    QuotientField { radii, thetas: u.thetas().to_vec(), values }
}

/// Area weights of the lattice points (Simpson in `r` with `f dr`, uniform in `θ`),
/// row-major, normalized to sum to 1.
fn disk_weights(u: &FourierHarmonic) -> Vec<f64> {
    let nodes = &u.ball().nodes()[..=u.last_lattice_node()];
    let radial = simpson_weights(nodes);
    let p = u.ball().profile();
    let nt = u.thetas().len();
    let mut w = Vec::with_capacity((nodes.len() - 1) * nt);
    for i in 1..nodes.len() {
        let wi = radial[i] * p.f(nodes[i]);
        w.extend(std::iter::repeat_n(wi, nt));
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Sup of the Cheng–Yau quotient over the lattice (must be `≤ 1 + tol`).
pub fn cheng_yau_deficit(u: &FourierHarmonic) -> DeficitReport {
    let q = quotient_field(u);
    let w = disk_weights(u);
    let mean = q.values.iter().zip(&w).map(|(a, b)| a * b).sum();
    let nt = q.thetas.len();
    let samples = q.values.iter().enumerate().map(|(idx, &v)| (vec![q.radii[idx / nt], q.thetas[idx % nt]], v));
    let entry =
        DeficitEntry::from_samples("cheng_yau_quotient", samples, mean, CHENG_YAU_TOL, |v| v > 1.0 + CHENG_YAU_TOL);
    DeficitReport::new(vec![entry])
}

/// Volume-averaged stability functional with its exclusion bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityFunctional {
    pub value: f64,
    pub excluded_points: usize,
    pub excluded_fraction: f64,
    pub reliable: bool,
}

/// `⨍ [4/(1−ρ²)² − R²|∇ln u|² + ln(2/((1−ρ²)R|∇ln u|))]` over the lattice disk.
pub fn cheng_yau_stability_functional(u: &FourierHarmonic) -> StabilityFunctional {
    let g = scaled_log_gradients(u);
    let w = disk_weights(u);
    let radius = u.ball().radius();
    let nodes = u.ball().nodes();
    let nt = u.thetas().len();
    let (mut num, mut den, mut excluded) = (0.0, 0.0, 0usize);
    for (idx, (&gi, &wi)) in g.iter().zip(&w).enumerate() {
        if gi / radius <= EPS_LOG {
            excluded += 1;
            continue;
        }
        let rho = nodes[1 + idx / nt] / radius;
        let s = 1.0 - rho * rho;
        let integrand = 4.0 / (s * s) - gi * gi + (2.0 / (s * gi)).ln();
        num += wi * integrand;
        den += wi;
    }
    let fraction = excluded as f64 / g.len() as f64;
    StabilityFunctional {
        value: if den > 0.0 { num / den } else { f64::NAN },
        excluded_points: excluded,
        excluded_fraction: fraction,
        reliable: fraction <= MAX_EXCLUDED_FRACTION,
    }
}

/// Result of the `Δv ≥ 2e^v` check with its stencil-refinement certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VInequalityCheck {
    /// Entry `v_inequality`: sup of `2e^v − Δv` (unit-ball scaling).
    pub report: DeficitReport,
    /// `min(Δv − 2e^v)` at the finest stencil.
    pub min_residual: f64,
    /// Stencil error bound `max|R_{2h} − R_h|`.
    pub tol_fd: f64,
    /// `max|R_{4h} − R_{2h}| / max|R_{2h} − R_h|` (≈ 4 for a second-order stencil).
    pub difference_ratio: f64,
    /// `max(0, −min residual)` at stencil spacings `4h, 2h, h` on common points.
    pub worst_violation: [f64; 3],
    pub evaluated_points: usize,
    pub excluded_points: usize,
}

impl VInequalityCheck {
    pub fn passes(&self) -> bool {
        self.evaluated_points == 0 || self.min_residual >= -self.tol_fd
    }
}

/// Evaluate `R²(Δv − 2e^v)` with the 5-point flux-form stencil on the annulus
/// `V_INNER_FRACTION·R ≤ r ≤ ρR` at stencil spacings `h`, `2h`, `4h`.
pub fn v_inequality_residual(u: &FourierHarmonic) -> VInequalityCheck {
    let ball = u.ball();
    let nodes = ball.nodes();
    let m = nodes.len() - 1;
    let radius = ball.radius();
    let p = ball.profile();
    let nt = u.thetas().len();
    let dtheta = 2.0 * std::f64::consts::PI / nt as f64;

    let lo = nodes.partition_point(|&r| r < V_INNER_FRACTION * radius).max(4);
    let hi = u.last_lattice_node().min(m - 4);
    let vacuous = |excluded| VInequalityCheck {
        report: DeficitReport::new(vec![DeficitEntry::from_samples("v_inequality", Vec::new(), f64::NAN, 0.0, |_| {
            false
        })]),
        min_residual: f64::NAN,
        tol_fd: 0.0,
        difference_ratio: f64::NAN,
        worst_violation: [0.0; 3],
        evaluated_points: 0,
        excluded_points: excluded,
    };
    if hi <= lo {
        return vacuous(0);
    }

    // Q and v on nodes lo-4 ..= hi+4 at every lattice angle
    let first = lo - 4;
    let rows: Vec<usize> = (first..=hi + 4).collect();
    let pv = u.node_values(&rows, u.thetas());
    let q: Vec<f64> = pv
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let g = u.log_gradient_of(nodes[rows[idx / nt]], v);
            g * g
        })
        .collect();
    let at = |i: usize, j: usize| q[(i - first) * nt + (j % nt)];

    let residual = |i: usize, j: usize, s: usize| -> Option<f64> {
        let jm = j + nt - s;
        let jp = j + s;
        let pts = [at(i, j), at(i - s, j), at(i + s, j), at(i, jm), at(i, jp)];
        if pts.iter().any(|&x| x <= EPS_Q / (radius * radius)) {
            return None;
        }
        let v: Vec<f64> = pts.iter().map(|x| x.ln()).collect();
        let (r0, rm, rp) = (nodes[i], nodes[i - s], nodes[i + s]);
        let (hm, hp) = (r0 - rm, rp - r0);
        let (fm, fp, f0) = (p.f(0.5 * (r0 + rm)), p.f(0.5 * (r0 + rp)), p.f(r0));
        let radial = (fp * (v[2] - v[0]) / hp - fm * (v[0] - v[1]) / hm) / (f0 * 0.5 * (hp + hm));
        let ds = s as f64 * dtheta;
        let angular = (v[4] - 2.0 * v[0] + v[3]) / (f0 * f0 * ds * ds);
        Some(radius * radius * (radial + angular - 2.0 * pts[0]))
    };

    let mut samples = Vec::new();
    let mut min_res = f64::INFINITY;
    let mut excluded = 0usize;
    let mut tol_fd = 0.0f64;
    let mut diff_coarse = 0.0f64;
    let mut diff_fine = 0.0f64;
    let mut worst = [0.0f64; 3];
    for i in lo..=hi {
        for j in 0..nt {
            let Some(r1) = residual(i, j, 1) else {
                excluded += 1;
                continue;
            };
            min_res = min_res.min(r1);
            samples.push((vec![nodes[i], u.thetas()[j]], -r1));
            if i % 2 == 0 && j % 2 == 0 {
                if let Some(r2) = residual(i, j, 2) {
                    tol_fd = tol_fd.max((r2 - r1).abs());
                    if i % 4 == 0 && j % 4 == 0 {
                        if let Some(r4) = residual(i, j, 4) {
                            diff_coarse = diff_coarse.max((r4 - r2).abs());
                            diff_fine = diff_fine.max((r2 - r1).abs());
                            worst[0] = worst[0].max(-r4);
                            worst[1] = worst[1].max(-r2);
                            worst[2] = worst[2].max(-r1);
                        }
                    }
                }
            }
        }
    }
    if samples.is_empty() {
        return vacuous(excluded);
    }
    let evaluated = samples.len();
    let entry = DeficitEntry::from_samples("v_inequality", samples, f64::NAN, tol_fd, |d| d > tol_fd);
    VInequalityCheck {
        report: DeficitReport::new(vec![entry]),
        min_residual: min_res,
        tol_fd,
        difference_ratio: diff_coarse / diff_fine,
        worst_violation: worst,
        evaluated_points: evaluated,
        excluded_points: excluded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::harmonic::{harmonic_from_boundary, BoundaryData};
    use crate::geometry::{ModelBall, WarpingProfile};

    fn ball(p: WarpingProfile) -> ModelBall {
        ModelBall::uniform(p, 2, 1.0, 1024).unwrap()
    }

    fn poisson(p: WarpingProfile) -> FourierHarmonic {
        harmonic_from_boundary(&ball(p), &BoundaryData::PoissonKernel { pole: 0.0 }, 64).unwrap()
    }

    #[test]
    fn constant_function_is_degenerate() {
        let u = harmonic_from_boundary(&ball(WarpingProfile::euclidean()), &BoundaryData::constant(2.0), 64).unwrap();
        let rep = cheng_yau_deficit(&u);
        assert_eq!(rep.entries[0].sup, 0.0);
        let s = cheng_yau_stability_functional(&u);
        assert!(s.value.is_nan() && !s.reliable);
        let v = v_inequality_residual(&u);
        assert_eq!(v.evaluated_points, 0);
        assert!(v.passes());
    }

    #[test]
    fn flat_poisson_attains_the_bound() {
        let u = poisson(WarpingProfile::euclidean());
        let q = quotient_field(&u);
        for (_, v) in q.ray(0) {
            assert!((v - 1.0).abs() < 1e-8);
        }
        let rep = cheng_yau_deficit(&u);
        assert!((rep.entries[0].sup - 1.0).abs() < 1e-8);
        assert_eq!(rep.entries[0].violations, 0);
        let s = cheng_yau_stability_functional(&u);
        assert!(s.value.abs() < 1e-7 && s.reliable, "{s:?}");
    }

    #[test]
    fn unit_sphere_has_strict_margin() {
        let u = poisson(WarpingProfile::sphere(1.0).unwrap());
        let rep = cheng_yau_deficit(&u);
        assert!(rep.entries[0].sup < 1.0 - 1e-3);
        assert!(cheng_yau_stability_functional(&u).value > 0.0);
    }

    #[test]
    fn v_inequality_on_flat_and_curved_balls() {
        let flat = v_inequality_residual(&poisson(WarpingProfile::euclidean()));
        assert!(flat.passes(), "{flat:?}");
        assert!((flat.difference_ratio - 4.0).abs() < 0.5);
        let data = BoundaryData::fourier(&[(0, 1.0, 0.0), (1, 0.3, 0.0)]);
        let u = harmonic_from_boundary(&ball(WarpingProfile::sphere(1.0).unwrap()), &data, 64).unwrap();
        let curved = v_inequality_residual(&u);
        assert!(curved.passes() && curved.min_residual > 0.0);
        assert_eq!(curved.report.total_violations(), 0);
    }
}
