//! Positive harmonic functions on 2-D model balls as truncated Fourier series
//! `u(r,θ) = Σ_k φ_k(r)(a_k cos kθ + b_k sin kθ)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::format::{csv_line, num, parse_numeric_csv};
use crate::geometry::ModelBall;

use super::modes::{solve_mode_with_limit, ModeProfile};

/// Boundary points used to certify positivity of function data.
pub const BOUNDARY_CHECK_POINTS: usize = 4096;
/// Default outer radius of the evaluation lattice as a fraction of `R`.
pub const DEFAULT_RHO_EVAL: f64 = 11.0 / 16.0;
/// `u` values at or below this are treated as nonpositive.
pub const U_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierCoefficient {
    pub k: usize,
    pub a: f64,
    pub b: f64,
}

/// Dirichlet data on `∂B_R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryData {
    /// A trigonometric polynomial, positive on the boundary.
    Fourier { coefficients: Vec<FourierCoefficient> },
    /// The Dirac mass at angle `pole`, whose harmonic extension on the flat
    /// disk is the Poisson kernel. Truncated at `K_max`.
    PoissonKernel { pole: f64 },
}

impl BoundaryData {
    pub fn constant(c: f64) -> Self {
        BoundaryData::Fourier { coefficients: vec![FourierCoefficient { k: 0, a: c, b: 0.0 }] }
    }

    /// Data `a0 + a1 cos θ` style shorthand: `terms` are `(k, a, b)`.
    pub fn fourier(terms: &[(usize, f64, f64)]) -> Self {
        BoundaryData::Fourier { coefficients: terms.iter().map(|&(k, a, b)| FourierCoefficient { k, a, b }).collect() }
    }

    /// Parse a `k,a_k,b_k` CSV table.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut coefficients = Vec::new();
        for (line, row) in parse_numeric_csv(text)? {
            if row.len() != 3 {
                return Err(LabError::Parse { line, msg: format!("expected 3 columns k,a,b, found {}", row.len()) });
            }
            if row[0] < 0.0 || row[0].fract() != 0.0 {
                return Err(LabError::Parse {
                    line,
                    msg: format!("mode index must be a nonnegative integer, got {}", row[0]),
                });
            }
            coefficients.push(FourierCoefficient { k: row[0] as usize, a: row[1], b: row[2] });
        }
        if coefficients.is_empty() {
            return Err(LabError::Parse { line: 1, msg: "no coefficient rows".into() });
        }
        Ok(BoundaryData::Fourier { coefficients })
    }

    pub fn to_csv(&self, k_max: usize) -> String {
        let mut out = csv_line(["k", "a_k", "b_k"]);
        for c in self.coefficients(k_max) {
            out.push_str(&csv_line([c.k.to_string(), num(c.a), num(c.b)]));
        }
        out
    }

    /// Merged coefficients up to `k_max` (Poisson data is expanded).
    pub fn coefficients(&self, k_max: usize) -> Vec<FourierCoefficient> {
        match self {
            BoundaryData::Fourier { coefficients } => {
                let top = coefficients.iter().map(|c| c.k).max().unwrap_or(0);
                let mut merged: Vec<FourierCoefficient> =
                    (0..=top).map(|k| FourierCoefficient { k, a: 0.0, b: 0.0 }).collect();
                for c in coefficients {
                    merged[c.k].a += c.a;
                    merged[c.k].b += c.b;
                }
                merged.retain(|c| c.a != 0.0 || c.b != 0.0);
                merged
            }
            &BoundaryData::PoissonKernel { pole } => {
                // P(x, y) = (1/2π)(1 + 2Σ r^k cos k(θ − y))
                (0..=k_max)
                    .map(|k| {
                        if k == 0 {
                            FourierCoefficient { k, a: 1.0 / (2.0 * PI), b: 0.0 }
                        } else {
                            let (s, c) = (k as f64 * pole).sin_cos();
                            FourierCoefficient { k, a: c / PI, b: s / PI }
                        }
                    })
                    .collect()
            }
        }
    }

    /// Angle where lattices are anchored: the pole for Poisson data, else 0.
    pub fn anchor_angle(&self) -> f64 {
        match self {
            BoundaryData::PoissonKernel { pole } => *pole,
            BoundaryData::Fourier { .. } => 0.0,
        }
    }

    /// Minimum of function data over an equispaced boundary lattice.
    pub fn boundary_minimum(&self, points: usize) -> Option<(f64, f64)> {
        let BoundaryData::Fourier { coefficients } = self else {
            return None;
        };
        (0..points)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / points as f64;
                let v: f64 = coefficients
                    .iter()
                    .map(|c| {
                        let (s, co) = (c.k as f64 * th).sin_cos();
                        c.a * co + c.b * s
                    })
                    .sum();
                (v, th)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }
}

/// Flat Poisson kernel `P(x, y) = (1 − r²)/(2π|x − y|²)` of the unit disk, `|y| = 1`.
pub fn poisson_kernel_flat(r: f64, theta: f64, y_angle: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(LabError::OutOfDomain(format!("Poisson kernel needs 0 ≤ r < 1, got {r}")));
    }
    let d2 = 1.0 - 2.0 * r * (theta - y_angle).cos() + r * r;
    Ok((1.0 - r * r) / (2.0 * PI * d2))
}

/// Polar lattice `{r_i ≤ ρR, r_i > 0} × {anchor + 2πj/N_θ}` on grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalLattice {
    pub rho: f64,
    pub n_theta: usize,
}

impl Default for EvalLattice {
    fn default() -> Self {
        Self { rho: DEFAULT_RHO_EVAL, n_theta: 128 }
    }
}

/// `u` and its first derivatives at one lattice point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub u: f64,
    pub u_r: f64,
    pub u_theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityCertificate {
    pub min_u: f64,
    pub at_r: f64,
    pub at_theta: f64,
}

/// A positive harmonic function on a 2-D model ball.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierHarmonic {
    ball: ModelBall,
    data: BoundaryData,
    k_max: usize,
    coefficients: Vec<FourierCoefficient>,
    modes: Vec<ModeProfile>,
    lattice: EvalLattice,
    thetas: Vec<f64>,
    /// Grid indices of lattice radii, `1..=last`.
    last_node: usize,
    values: Vec<PointValue>,
    positivity: PositivityCertificate,
}

/// Build the harmonic extension of `data` on the default lattice.
pub fn harmonic_from_boundary(ball: &ModelBall, data: &BoundaryData, k_max: usize) -> Result<FourierHarmonic> {
    harmonic_on_lattice(ball, data, k_max, EvalLattice::default())
}

/// Build the harmonic extension of `data`, certifying positivity on `lattice`.
pub fn harmonic_on_lattice(
    ball: &ModelBall,
    data: &BoundaryData,
    k_max: usize,
    lattice: EvalLattice,
) -> Result<FourierHarmonic> {
    if ball.dim() != 2 {
        return Err(LabError::InvalidBall(format!(
            "harmonic functions are built on 2-D balls, got n = {}",
            ball.dim()
        )));
    }
    if !(lattice.rho > 0.0 && lattice.rho <= 1.0) || lattice.n_theta < 8 || !lattice.n_theta.is_multiple_of(4) {
        return Err(LabError::InvalidParameter("lattice needs 0 < rho ≤ 1 and n_theta ≥ 8 divisible by 4".into()));
    }
    if let Some((min, at)) = data.boundary_minimum(BOUNDARY_CHECK_POINTS) {
        if min <= 0.0 {
            return Err(LabError::NotPositive { min, location: format!("boundary angle {at:.6}") });
        }
    }
    let coefficients = data.coefficients(k_max);
    if let Some(c) = coefficients.iter().find(|c| c.k > k_max) {
        return Err(LabError::ModeLimit { k: c.k, limit: k_max });
    }
    let modes = coefficients.iter().map(|c| solve_mode_with_limit(ball, c.k, k_max)).collect::<Result<Vec<_>>>()?;

    let anchor = data.anchor_angle();
    let thetas: Vec<f64> =
        (0..lattice.n_theta).map(|j| anchor + 2.0 * PI * j as f64 / lattice.n_theta as f64).collect();
    let cut = lattice.rho * ball.radius() * (1.0 + 1e-12);
    let last_node = ball.nodes().partition_point(|&r| r <= cut) - 1;
    if last_node < 2 {
        return Err(LabError::InvalidParameter("evaluation lattice holds fewer than two radii".into()));
    }

    let mut u = FourierHarmonic {
        ball: ball.clone(),
        data: data.clone(),
        k_max,
        coefficients,
        modes,
        lattice,
        thetas,
        last_node,
        values: Vec::new(),
        positivity: PositivityCertificate { min_u: f64::INFINITY, at_r: 0.0, at_theta: 0.0 },
    };
    let nodes: Vec<usize> = (1..=last_node).collect();
    u.values = u.node_values(&nodes, &u.thetas);

    let center = u.coefficients.iter().find(|c| c.k == 0).map_or(0.0, |c| c.a);
    let mut cert = PositivityCertificate { min_u: center, at_r: 0.0, at_theta: 0.0 };
    for (idx, pv) in u.values.iter().enumerate() {
        if pv.u < cert.min_u {
            let (i, j) = (idx / u.thetas.len(), idx % u.thetas.len());
            cert = PositivityCertificate { min_u: pv.u, at_r: u.ball.nodes()[nodes[i]], at_theta: u.thetas[j] };
        }
    }
    if !(cert.min_u > U_FLOOR) {
        return Err(LabError::NotPositive {
            min: cert.min_u,
            location: format!("r = {:.6}, theta = {:.6}", cert.at_r, cert.at_theta),
        });
    }
    u.positivity = cert;
    Ok(u)
}

impl FourierHarmonic {
    pub fn ball(&self) -> &ModelBall {
        &self.ball
    }

    pub fn data(&self) -> &BoundaryData {
        &self.data
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn coefficients(&self) -> &[FourierCoefficient] {
        &self.coefficients
    }

    pub fn modes(&self) -> &[ModeProfile] {
        &self.modes
    }

    pub fn lattice(&self) -> EvalLattice {
        self.lattice
    }

    pub fn positivity(&self) -> PositivityCertificate {
        self.positivity
    }

    /// Lattice angles.
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Grid index of the outermost lattice radius.
    pub fn last_lattice_node(&self) -> usize {
        self.last_node
    }

    /// Values on the lattice, row-major over (radius index `1..=last`, angle).
    pub fn lattice_values(&self) -> &[PointValue] {
        &self.values
    }

    /// Largest ODE residual among the stored modes.
    pub fn max_mode_residual(&self) -> f64 {
        self.modes.iter().map(|m| m.residual()).fold(0.0, f64::max)
    }

    /// `u`, `u_r`, `u_θ` at grid nodes `nodes` and angles `thetas`, row-major.
    pub fn node_values(&self, nodes: &[usize], thetas: &[f64]) -> Vec<PointValue> {
        let trig: Vec<Vec<(f64, f64)>> =
            thetas.iter().map(|&th| self.coefficients.iter().map(|c| (c.k as f64 * th).sin_cos()).collect()).collect();
        let mut out = Vec::with_capacity(nodes.len() * thetas.len());
        for &i in nodes {
            let radial: Vec<(f64, f64)> = self.modes.iter().map(|m| (m.values()[i], m.derivatives()[i])).collect();
            for tj in &trig {
                out.push(self.combine(&radial, tj));
            }
        }
        out
    }

    fn combine(&self, radial: &[(f64, f64)], trig: &[(f64, f64)]) -> PointValue {
        let mut pv = PointValue { u: 0.0, u_r: 0.0, u_theta: 0.0 };
        for ((c, &(phi, dphi)), &(s, co)) in self.coefficients.iter().zip(radial).zip(trig) {
            let ang = c.a * co + c.b * s;
            let dang = c.k as f64 * (c.b * co - c.a * s);
            pv.u += phi * ang;
            pv.u_r += dphi * ang;
            pv.u_theta += phi * dang;
        }
        pv
    }

    /// `u`, `u_r`, `u_θ` at an arbitrary point of the ball.
    pub fn eval(&self, r: f64, theta: f64) -> Result<PointValue> {
        if !(0.0..=self.ball.radius() * (1.0 + 1e-14)).contains(&r) {
            return Err(LabError::OutOfDomain(format!("r = {r} outside the ball of radius {}", self.ball.radius())));
        }
        let radial: Vec<(f64, f64)> = self.modes.iter().map(|m| m.eval(self.ball.profile(), r)).collect();
        let trig: Vec<(f64, f64)> = self.coefficients.iter().map(|c| (c.k as f64 * theta).sin_cos()).collect();
        Ok(self.combine(&radial, &trig))
    }

    /// `|∇ ln u|` from point values at radius `r`.
    pub fn log_gradient_of(&self, r: f64, pv: &PointValue) -> f64 {
        let f = self.ball.profile().f(r);
        let tangential = if r == 0.0 { 0.0 } else { pv.u_theta / f };
        (pv.u_r * pv.u_r + tangential * tangential).sqrt() / pv.u
    }
}

/// `|∇ ln u|(r, θ)` with `|∇u|² = u_r² + u_θ²/f²`.
pub fn log_gradient(u: &FourierHarmonic, r: f64, theta: f64) -> Result<f64> {
    let pv = u.eval(r, theta)?;
    if !(pv.u > U_FLOOR) {
        return Err(LabError::NotPositive { min: pv.u, location: format!("r = {r}, theta = {theta}") });
    }
    if r == 0.0 {
        // only the k = 1 mode has a gradient at the pole
        let g = u
            .coefficients
            .iter()
            .zip(&u.modes)
            .find(|(c, _)| c.k == 1)
            .map_or(0.0, |(c, m)| m.leading_coefficient() * c.a.hypot(c.b));
        return Ok(g / pv.u);
    }
    Ok(u.log_gradient_of(r, &pv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WarpingProfile;
    use crate::quadrature::{integrate, QuadOptions};

    fn flat_disk() -> ModelBall {
        ModelBall::uniform(WarpingProfile::euclidean(), 2, 1.0, 1024).unwrap()
    }

    #[test]
    fn poisson_kernel_values() {
        assert!((poisson_kernel_flat(0.0, 1.3, 0.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!((poisson_kernel_flat(0.5, 0.2, 0.2).unwrap() - 3.0 / (2.0 * PI)).abs() < 1e-15);
        let total =
            integrate(|t| poisson_kernel_flat(0.7, t, 0.0).unwrap(), 0.0, 2.0 * PI, QuadOptions::default()).unwrap();
        assert!((total.value - 1.0).abs() < 1e-10);
        assert!(poisson_kernel_flat(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn constant_data_gives_constant_function() {
        let u = harmonic_from_boundary(&flat_disk(), &BoundaryData::constant(1.0), 64).unwrap();
        assert!(u.lattice_values().iter().all(|p| p.u == 1.0 && p.u_r == 0.0 && p.u_theta == 0.0));
        assert_eq!(log_gradient(&u, 0.4, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn truncated_poisson_series_error_bound() {
        let u = harmonic_from_boundary(&flat_disk(), &BoundaryData::PoissonKernel { pole: 0.0 }, 40).unwrap();
        for &(r, th) in &[(0.3, 0.0), (0.5, 1.0), (0.6875, 0.1), (0.2, 3.0)] {
            let exact = poisson_kernel_flat(r, th, 0.0).unwrap();
            let got = u.eval(r, th).unwrap().u;
            // tail Σ_{k>40} r^k/π = r^41/(π(1−r))
            let tail = r.powi(41) / (PI * (1.0 - r));
            assert!((got - exact).abs() <= tail + 1e-12, "r={r} th={th}");
        }
    }

    #[test]
    fn poisson_log_gradient_is_extremal() {
        let u = harmonic_from_boundary(&flat_disk(), &BoundaryData::PoissonKernel { pole: 0.0 }, 64).unwrap();
        let toward = log_gradient(&u, 0.3, 0.0).unwrap();
        assert!((toward - 2.0 / 0.91).abs() < 1e-9);
        assert!((toward - 2.1978).abs() < 1e-4);
        // the identity |∇ ln P| = 2/(1 − r²) also holds off the ray
        let away = log_gradient(&u, 0.3, PI).unwrap();
        assert!((away - 2.0 / 0.91).abs() < 1e-9);
    }

    #[test]
    fn curved_ball_mode_bound() {
        let ball = ModelBall::uniform(WarpingProfile::sphere(0.5).unwrap(), 2, 1.0, 1024).unwrap();
        let u = harmonic_from_boundary(&ball, &BoundaryData::fourier(&[(0, 1.0, 0.0), (1, 0.3, 0.0)]), 64).unwrap();
        let max_phi1 = u.modes()[1].values().iter().copied().fold(0.0, f64::max);
        assert!(u.positivity().min_u >= 1.0 - 0.3 * max_phi1);
        assert!(u.max_mode_residual() < 1e-8);
    }

    #[test]
    fn nonpositive_data_rejected() {
        let data = BoundaryData::fourier(&[(0, 1.0, 0.0), (2, 1.2, 0.0)]);
        assert!(matches!(harmonic_from_boundary(&flat_disk(), &data, 64), Err(LabError::NotPositive { .. })));
        let data = BoundaryData::fourier(&[(0, 1.0, 0.0), (70, 0.1, 0.0)]);
        assert!(matches!(harmonic_from_boundary(&flat_disk(), &data, 64), Err(LabError::ModeLimit { .. })));
    }

    #[test]
    fn boundary_csv_parsing() {
        let d = BoundaryData::from_csv("k,a,b\n0,1.0,0\n1,0.3,0\n").unwrap();
        assert_eq!(d, BoundaryData::fourier(&[(0, 1.0, 0.0), (1, 0.3, 0.0)]));
        assert!(BoundaryData::from_csv("0,1\n").is_err());
        assert!(BoundaryData::from_csv("1.5,1,0\n").is_err());
        assert!(d.to_csv(8).starts_with("k,a_k,b_k\n0,1.00000000000e0,"));
    }
}
