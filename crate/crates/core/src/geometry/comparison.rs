//! Comparison-geometry quantities of a model ball.
//!
//! On `dr² + f² g_sphere` the distance function has `Δr = (n-1)f'/f` and
//! `∇²(r²) = 2dr⊗dr + 2r(f'/f)(g − dr⊗dr)`. Every deficit below is a
//! function of the single ratio `r f'/f`, which equals 1 on flat space.

use crate::error::{LabError, Result};
use crate::quadrature::{integrate, QuadOptions};

use super::ball::{ricci_pair, ModelBall};
use super::deficit::{DeficitEntry, DeficitReport};
use super::profile::TOL_CURV;

/// Tolerance for sign checks of comparison inequalities on the grid.
pub const TOL_COMPARISON: f64 = 1e-9;

fn positive_nodes(ball: &ModelBall) -> impl Iterator<Item = (usize, f64)> + '_ {
    ball.nodes().iter().copied().enumerate().skip(1)
}

/// Sign-flipped Ricci curvatures: `sup(−Ric)` must stay `≤ tol_curv`.
pub fn curvature_report(ball: &ModelBall) -> DeficitReport {
    let n = ball.dim();
    let p = ball.profile();
    let m = ball.nodes().len();
    let mut radial = vec![0.0; m];
    let mut tangential = vec![0.0; m];
    for (i, r) in positive_nodes(ball) {
        let (f, df, d2f) = p.eval(r);
        let (a, b) = ricci_pair(n, f, df, d2f);
        radial[i] = -a;
        tangential[i] = -b;
    }
    let entry = |id: &str, vals: &[f64]| {
        DeficitEntry::from_samples(
            id,
            positive_nodes(ball).map(|(i, r)| (vec![r], vals[i])),
            ball.volume_average(vals),
            TOL_CURV,
            |v| v > TOL_CURV,
        )
    };
    DeficitReport::new(vec![entry("neg_ricci_radial", &radial), entry("neg_ricci_tangential", &tangential)])
}

/// `Δr = (n-1) f'(r)/f(r)` for `0 < r ≤ R`.
pub fn laplacian_distance(ball: &ModelBall, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(LabError::OutOfDomain(format!("Δr is singular at the pole (r = {r})")));
    }
    if r > ball.radius() * (1.0 + 1e-14) {
        return Err(LabError::OutOfDomain(format!("r = {r} outside the ball of radius {}", ball.radius())));
    }
    let (f, df, _) = ball.profile().eval(r);
    Ok((ball.dim() as f64 - 1.0) * df / f)
}

fn ratio_deficits(ball: &ModelBall, pointwise: impl Fn(f64) -> f64) -> Vec<f64> {
    let p = ball.profile();
    ball.nodes().iter().map(|&r| if r == 0.0 { 0.0 } else { pointwise(p.r_df_over_f(r)) }).collect()
}

fn report_one(ball: &ModelBall, id: &str, vals: &[f64], check_sign: bool) -> DeficitReport {
    let entry = DeficitEntry::from_samples(
        id,
        positive_nodes(ball).map(|(i, r)| (vec![r], vals[i])),
        ball.volume_average(vals),
        TOL_COMPARISON,
        |v| check_sign && v < -TOL_COMPARISON,
    );
    DeficitReport::new(vec![entry])
}

/// `(n-1)/r − Δr ≥ 0` on the grid (Laplacian comparison).
pub fn laplacian_distance_deficit(ball: &ModelBall) -> DeficitReport {
    let n1 = ball.dim() as f64 - 1.0;
    let p = ball.profile();
    let vals: Vec<f64> =
        ball.nodes().iter().map(|&r| if r == 0.0 { 0.0 } else { n1 * (1.0 - p.r_df_over_f(r)) / r }).collect();
    report_one(ball, "laplacian_distance", &vals, true)
}

/// `|∇²(r²) − 2g| = 2√(n-1)·|r f'/f − 1|` and its volume average.
pub fn hessian_r2_deficit(ball: &ModelBall) -> DeficitReport {
    let c = 2.0 * (ball.dim() as f64 - 1.0).sqrt();
    let vals = ratio_deficits(ball, |q| c * (q - 1.0).abs());
    report_one(ball, "hessian_r2", &vals, false)
}

/// `2n − Δ(r²) = 2(n-1)(1 − r f'/f)`, nonnegative for admitted profiles.
pub fn laplacian_r2_deficit(ball: &ModelBall) -> DeficitReport {
    let c = 2.0 * (ball.dim() as f64 - 1.0);
    let vals = ratio_deficits(ball, |q| c * (1.0 - q));
    report_one(ball, "laplacian_r2", &vals, true)
}

/// Area `nω_n f(r)^{n-1}` of the geodesic sphere of radius `r ∈ [0, R]`.
pub fn sphere_area(ball: &ModelBall, r: f64) -> Result<f64> {
    check_radius(ball, r)?;
    Ok(ball.area(r))
}

/// Volume `∫₀^r A(t) dt` by adaptive quadrature.
pub fn ball_volume(ball: &ModelBall, r: f64) -> Result<f64> {
    check_radius(ball, r)?;
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-13, ..Default::default() };
    Ok(integrate(|t| ball.area(t), 0.0, r, opts)?.value)
}

fn check_radius(ball: &ModelBall, r: f64) -> Result<()> {
    if !(0.0..=ball.radius() * (1.0 + 1e-14)).contains(&r) {
        return Err(LabError::OutOfDomain(format!("r = {r} outside [0, {}]", ball.radius())));
    }
    Ok(())
}

/// Distortion `sup_grid |f(r)/r − 1|` of the polar identification with the
/// flat ball. A coordinate-map bound, not a Gromov–Hausdorff distance.
pub fn polar_distortion(ball: &ModelBall) -> f64 {
    let p = ball.profile();
    ball.nodes().iter().map(|&r| (p.f_over_r(r) - 1.0).abs()).fold(0.0, f64::max)
}
