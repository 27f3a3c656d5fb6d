//! Radial Dirichlet Green's functions of model balls.
//!
//! With pole at the center, `G(r) = ∫_r^R dt / (nω_n f(t)^{n-1})`, so that
//! `A(r)|G'(r)| = 1` and `ΔG = −δ_p`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::format::{csv_line, num};
use crate::geometry::{unit_ball_volume, DeficitEntry, DeficitReport, ModelBall};
use crate::quadrature::{integrate, QuadOptions};

/// Sign tolerance for `G ≥ Ḡ`.
pub const GREEN_TOL: f64 = 1e-8;
/// Tolerance of the `∫ G Δψ dV = −ψ(0)` self-test.
pub const SELF_TEST_TOL: f64 = 1e-6;

fn quad_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-16, rel_tol: 1e-13, max_intervals: 2000 }
}

/// `G` sampled on the grid (`+∞` at the pole) with exact derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGreen {
    ball: ModelBall,
    values: Vec<f64>,
    /// `nω_n`.
    normalization: f64,
    /// Summed quadrature error estimate.
    quadrature_error: f64,
}

/// Build `G` by adaptive Gauss–Kronrod quadrature on each grid interval,
/// accumulated inward from `G(R) = 0`.
pub fn radial_green(ball: &ModelBall) -> Result<RadialGreen> {
    let nodes = ball.nodes();
    let m = nodes.len() - 1;
    let mut values = vec![0.0; m + 1];
    values[0] = f64::INFINITY;
    let mut err = 0.0;
    for i in (1..m).rev() {
        let piece = integrate(|t| 1.0 / ball.area(t), nodes[i], nodes[i + 1], quad_opts()).map_err(|e| match e {
            LabError::Nonconvergence { achieved, .. } => LabError::Nonconvergence {
                what: format!("Green quadrature on [{}, {}]", nodes[i], nodes[i + 1]),
                achieved,
            },
            other => other,
        })?;
        values[i] = values[i + 1] + piece.value;
        err += piece.error;
    }
    Ok(RadialGreen { ball: ball.clone(), values, normalization: ball.sphere_constant(), quadrature_error: err })
}

impl RadialGreen {
    pub fn ball(&self) -> &ModelBall {
        &self.ball
    }

    /// Nodal values; the pole entry is `+∞`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn quadrature_error(&self) -> f64 {
        self.quadrature_error
    }

    /// `G(r)` for `0 < r ≤ R`, integrating from the next node outward.
    pub fn value(&self, r: f64) -> Result<f64> {
        let radius = self.ball.radius();
        if !(r > 0.0 && r <= radius * (1.0 + 1e-14)) {
            return Err(LabError::OutOfDomain(format!("G is evaluated on (0, {radius}], got r = {r}")));
        }
        let nodes = self.ball.nodes();
        let j = nodes.partition_point(|&x| x < r).min(nodes.len() - 1);
        if nodes[j] == r {
            return Ok(self.values[j]);
        }
        let piece = integrate(|t| 1.0 / self.ball.area(t), r, nodes[j], quad_opts())?;
        Ok(self.values[j] + piece.value)
    }

    /// Exact `G'(r) = −1/A(r)`.
    pub fn derivative(&self, r: f64) -> f64 {
        -1.0 / self.ball.area(r)
    }

    /// `A(r)|G'(r)|`, identically 1.
    pub fn flux(&self, r: f64) -> f64 {
        self.ball.area(r) * self.derivative(r).abs()
    }
}

/// Green's function `Ḡ(d)` of the flat unit ball `B₁(0) ⊂ ℝⁿ` with pole at 0.
pub fn euclidean_green(n: usize, d: f64) -> Result<f64> {
    if n < 2 {
        return Err(LabError::InvalidParameter(format!("dimension must be ≥ 2, got {n}")));
    }
    if !(d > 0.0 && d <= 1.0) {
        return Err(LabError::OutOfDomain(format!("flat Green's function needs 0 < d ≤ 1, got {d}")));
    }
    if n == 2 {
        return Ok(-d.ln() / (2.0 * PI));
    }
    let nf = n as f64;
    Ok((d.powf(2.0 - nf) - 1.0) / (nf * (nf - 2.0) * unit_ball_volume(n)))
}

fn require_unit_radius(ball: &ModelBall) -> Result<()> {
    if (ball.radius() - 1.0).abs() > 1e-14 {
        return Err(LabError::InvalidBall(format!("comparison is normalized to R = 1, got R = {}", ball.radius())));
    }
    Ok(())
}

/// `G − Ḡ` on the grid of a unit-radius ball.
pub fn green_comparison(green: &RadialGreen) -> Result<DeficitReport> {
    let ball = green.ball();
    require_unit_radius(ball)?;
    let n = ball.dim();
    let nodes = ball.nodes();
    let mut diff = vec![0.0; nodes.len()];
    for i in 1..nodes.len() {
        diff[i] = green.values[i] - euclidean_green(n, nodes[i])?;
    }
    let abs: Vec<f64> = diff.iter().map(|d| d.abs()).collect();
    let lower = DeficitEntry::from_samples(
        "green_below_flat",
        (1..nodes.len()).map(|i| (vec![nodes[i]], -diff[i])),
        f64::NAN,
        GREEN_TOL,
        |v| v > GREEN_TOL,
    );
    let deficit = DeficitEntry::from_samples(
        "green_deficit",
        (1..nodes.len()).map(|i| (vec![nodes[i]], abs[i])),
        ball.volume_average(&abs),
        GREEN_TOL,
        |_| false,
    );
    Ok(DeficitReport::new(vec![lower, deficit]))
}

/// CSV table `r, G, G_bar, deficit` over the positive grid nodes.
pub fn green_table_csv(green: &RadialGreen) -> Result<String> {
    let ball = green.ball();
    require_unit_radius(ball)?;
    let mut out = csv_line(["r", "G", "G_bar", "deficit"]);
    for (i, &r) in ball.nodes().iter().enumerate().skip(1) {
        let gb = euclidean_green(ball.dim(), r)?;
        let g = green.values[i];
        out.push_str(&csv_line([num(r), num(g), num(gb), num(g - gb)]));
    }
    Ok(out)
}

/// One radial test function for the self-test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// `1 − ρ²`
    Paraboloid,
    /// `cos(πρ/2)`
    Cosine,
    /// `(1 − ρ²)²`
    Biquadratic,
}

impl TestFunction {
    pub const ALL: [TestFunction; 3] = [TestFunction::Paraboloid, TestFunction::Cosine, TestFunction::Biquadratic];

    /// `(ψ, ψ', ψ'')` at `ρ = r/R`, derivatives in `r`.
    fn eval(self, r: f64, radius: f64) -> (f64, f64, f64) {
        let x = r / radius;
        let (p, dp, ddp) = match self {
            TestFunction::Paraboloid => (1.0 - x * x, -2.0 * x, -2.0),
            TestFunction::Cosine => {
                let a = PI / 2.0;
                ((a * x).cos(), -a * (a * x).sin(), -a * a * (a * x).cos())
            }
            TestFunction::Biquadratic => {
                let s = 1.0 - x * x;
                (s * s, -4.0 * x * s, -4.0 * s + 8.0 * x * x)
            }
        };
        (p, dp / radius, ddp / (radius * radius))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfTestResult {
    pub function: TestFunction,
    pub integral: f64,
    pub expected: f64,
    pub error: f64,
    pub passed: bool,
}

/// Check `∫_B G Δψ dV = −ψ(0)` for radial `ψ` with `ψ(R) = 0`.
pub fn green_self_test(green: &RadialGreen, psi: TestFunction) -> Result<SelfTestResult> {
    let ball = green.ball();
    let radius = ball.radius();
    let p = ball.profile();
    let n1 = ball.dim() as f64 - 1.0;
    let laplacian = |r: f64| {
        let (_, dpsi, ddpsi) = psi.eval(r, radius);
        let (f, df, _) = p.eval(r);
        ddpsi + n1 * df / f * dpsi
    };
    let nodes = ball.nodes();
    let mut total = 0.0;
    for i in 0..nodes.len() - 1 {
        let (a, b) = (nodes[i], nodes[i + 1]);
        // G on the interval from its right endpoint value
        let inner = |r: f64| -> f64 {
            let tail = integrate(|t| 1.0 / ball.area(t), r, b, quad_opts()).map(|q| q.value).unwrap_or(f64::NAN);
            green.values[i + 1] + tail
        };
        let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-11, max_intervals: 500 };
        total += integrate(|r| inner(r) * laplacian(r) * ball.area(r), a, b, opts)?.value;
    }
    let expected = -psi.eval(0.0, radius).0;
    let error = (total - expected).abs();
    Ok(SelfTestResult { function: psi, integral: total, expected, error, passed: error <= SELF_TEST_TOL })
}

/// Boundary gradient of `b = (C(n)G + 1)^{1/(2−n)}`, `C(n) = (2−n)nω_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryGradient {
    /// `sup_{∂B} |∇b|`.
    pub sup_grad: f64,
    /// `nω_n / A(1)`.
    pub bound: f64,
    /// `sup_grad ≤ 1`, which for radial models happens only for the flat profile.
    pub flat_flag: bool,
}

/// `|∇b|` on `∂B₁` for a unit ball in dimension `n ≥ 3`.
pub fn b_function_boundary_gradient(green: &RadialGreen) -> Result<BoundaryGradient> {
    let ball = green.ball();
    let n = ball.dim();
    if n < 3 {
        return Err(LabError::InvalidBall("the b-function needs n ≥ 3".into()));
    }
    require_unit_radius(ball)?;
    let nf = n as f64;
    let c = (2.0 - nf) * green.normalization();
    let g1 = green.values[green.values.len() - 1];
    let dg = green.derivative(1.0);
    // b' = (1/(2−n))(CG + 1)^{1/(2−n) − 1} C G'
    let sup_grad = ((c * g1 + 1.0).powf(1.0 / (2.0 - nf) - 1.0) * c * dg / (2.0 - nf)).abs();
    let bound = green.normalization() / ball.area(1.0);
    Ok(BoundaryGradient { sup_grad, bound, flat_flag: sup_grad <= 1.0 + 1e-12 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WarpingProfile;

    fn green(p: WarpingProfile, n: usize) -> RadialGreen {
        radial_green(&ModelBall::uniform(p, n, 1.0, 1024).unwrap()).unwrap()
    }

    #[test]
    fn flat_green_matches_closed_form() {
        let g2 = green(WarpingProfile::euclidean(), 2);
        assert!((g2.value(0.5).unwrap() - 0.5f64.ln().abs() / (2.0 * PI)).abs() < 1e-10);
        assert!((g2.value(0.5).unwrap() - 0.11032).abs() < 1e-5);
        let g3 = green(WarpingProfile::euclidean(), 3);
        assert!((g3.value(0.5).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-10);
        assert!((g3.value(0.5).unwrap() - 0.079577).abs() < 1e-6);
        assert!((g3.value(0.123_4).unwrap() - euclidean_green(3, 0.123_4).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn sphere_green_log_tangent() {
        let g = green(WarpingProfile::sphere(1.0).unwrap(), 2);
        let oracle = ((0.5f64).tan().ln() - (0.25f64).tan().ln()) / (2.0 * PI);
        assert!((g.value(0.5).unwrap() - oracle).abs() < 1e-10);
        assert!((oracle - 0.1211).abs() < 1e-4);
    }

    #[test]
    fn euclidean_green_values() {
        assert_eq!(euclidean_green(2, 1.0).unwrap(), 0.0);
        assert!((euclidean_green(3, 0.5).unwrap() - 0.079_577_471_545_947_67).abs() < 1e-15);
        assert!((euclidean_green(2, (-2.0 * PI).exp()).unwrap() - 1.0).abs() < 1e-14);
        assert!(euclidean_green(2, 0.0).is_err());
        assert!(euclidean_green(3, 1.5).is_err());
    }

    #[test]
    fn flux_and_monotonicity() {
        let g = green(WarpingProfile::smoothed_cone(0.5, 1.0).unwrap(), 3);
        for &r in &g.ball().nodes()[1..] {
            assert!((g.flux(r) - 1.0).abs() < 1e-14);
        }
        assert!(g.values().windows(2).all(|w| w[0] > w[1]));
        assert_eq!(g.values()[g.values().len() - 1], 0.0);
    }

    #[test]
    fn pole_ratio_tends_to_one() {
        let g = green(WarpingProfile::sphere(1.0).unwrap(), 3);
        let ratio = |r: f64| g.value(r).unwrap() / euclidean_green(3, r).unwrap();
        let (a, b) = (ratio(1e-2), ratio(1e-4));
        assert!((b - 1.0).abs() < (a - 1.0).abs());
        assert!((b - 1.0).abs() < 1e-3);
    }

    #[test]
    fn self_test_passes_for_all_test_functions() {
        for (p, n) in [(WarpingProfile::euclidean(), 2), (WarpingProfile::sphere(1.0).unwrap(), 3)] {
            let g = green(p, n);
            for psi in TestFunction::ALL {
                let res = green_self_test(&g, psi).unwrap();
                assert!(res.passed, "{res:?}");
            }
        }
    }

    #[test]
    fn sphere_comparison_strictly_positive() {
        let g = green(WarpingProfile::sphere(1.0).unwrap(), 2);
        let rep = green_comparison(&g).unwrap();
        assert_eq!(rep.total_violations(), 0);
        let d = g.value(0.5).unwrap() - euclidean_green(2, 0.5).unwrap();
        assert!((d - 0.0107).abs() < 5e-4);
        let csv = green_table_csv(&g).unwrap();
        assert!(csv.starts_with("r,G,G_bar,deficit\n"));
    }

    #[test]
    fn b_function_gradients() {
        let flat = b_function_boundary_gradient(&green(WarpingProfile::euclidean(), 3)).unwrap();
        assert!((flat.sup_grad - 1.0).abs() < 1e-14 && (flat.bound - 1.0).abs() < 1e-14 && flat.flat_flag);
        let s = b_function_boundary_gradient(&green(WarpingProfile::sphere(1.0).unwrap(), 3)).unwrap();
        let oracle = 1.0 / 1f64.sin().powi(2);
        assert!((s.sup_grad - oracle).abs() < 1e-12 && (s.bound - oracle).abs() < 1e-12);
        assert!((oracle - 1.4123).abs() < 1e-4 && !s.flat_flag);
        assert!(b_function_boundary_gradient(&green(WarpingProfile::euclidean(), 2)).is_err());
    }

    #[test]
    fn cone_b_function_with_prescribed_boundary_width() {
        // choose the smoothing width so that f(1) = 0.85 for α = 0.8
        let (mut lo, mut hi) = (0.05, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let f1 = WarpingProfile::smoothed_cone(0.8, mid).unwrap().f(1.0);
            if f1 > 0.85 {
                hi = mid
            } else {
                lo = mid
            }
        }
        let p = WarpingProfile::smoothed_cone(0.8, 0.5 * (lo + hi)).unwrap();
        assert!((p.f(1.0) - 0.85).abs() < 1e-12);
        let b = b_function_boundary_gradient(&green(p, 4)).unwrap();
        assert!((b.sup_grad - 0.85f64.powi(-3)).abs() < 1e-9);
        assert!((b.sup_grad - 1.628).abs() < 1e-3);
    }
}
