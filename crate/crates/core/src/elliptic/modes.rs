//! Radial Fourier modes of harmonic functions on 2-D model balls.
//!
//! Separating `u = φ(r) cos kθ` in `Δ = ∂²_r + (f'/f)∂_r + f⁻²∂²_θ` gives
//! `φ'' + (f'/f)φ' − (k²/f²)φ = 0`. The solver integrates the Riccati pair
//! `ℓ = ln φ`, `w = fφ'/φ`, which satisfies
//!
//! ```text
//! ℓ' = w/f,    w' = (k² − w²)/f,
//! ```
//!
//! launched at the first grid node from the two-term Frobenius expansion
//! `φ ≈ r^k (1 + c r²)` and normalized so that `φ(R) = 1`.

use crate::error::{LabError, Result};
use crate::geometry::ModelBall;
use crate::geometry::WarpingProfile;
use crate::ode::{integrate_radau, RadauOptions, StiffSystem};

/// Default highest admissible Fourier mode.
pub const DEFAULT_K_MAX: usize = 64;

struct RiccatiSystem<'a> {
    profile: &'a WarpingProfile,
    k2: f64,
}

impl StiffSystem<2> for RiccatiSystem<'_> {
    fn rhs(&self, r: f64, y: &[f64; 2]) -> [f64; 2] {
        let f = self.profile.f(r);
        [y[1] / f, (self.k2 - y[1] * y[1]) / f]
    }

    fn jacobian(&self, r: f64, y: &[f64; 2]) -> [[f64; 2]; 2] {
        let f = self.profile.f(r);
        [[0.0, 1.0 / f], [0.0, -2.0 * y[1] / f]]
    }
}

/// A solved radial mode `φ_k` on the ball's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    k: usize,
    nodes: Vec<f64>,
    /// `ln φ` relative to `ln φ(R) = 0`; `-∞` at the pole for `k ≥ 1`.
    ell: Vec<f64>,
    w: Vec<f64>,
    f: Vec<f64>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    /// Frobenius coefficient `c` in `φ ≈ a r^k (1 + c r²)` near the pole.
    series_c: f64,
    /// `a` in the same expansion.
    leading: f64,
    residual: f64,
}

impl ModeProfile {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Samples `φ_k(r_i)` on the grid.
    pub fn values(&self) -> &[f64] {
        &self.phi
    }

    /// Exact derivatives `φ_k'(r_i) = φ w / f`.
    pub fn derivatives(&self) -> &[f64] {
        &self.dphi
    }

    /// Leading coefficient `a` of `φ_k ≈ a r^k` at the pole.
    pub fn leading_coefficient(&self) -> f64 {
        self.leading
    }

    /// Sup-norm of the mode ODE residual at interval midpoints.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `(φ, φ')` at any `r ∈ [0, R]`, cubic Hermite in `(ln φ, w)` between nodes.
    pub fn eval(&self, profile: &WarpingProfile, r: f64) -> (f64, f64) {
        if self.k == 0 {
            return (1.0, 0.0);
        }
        let k = self.k as f64;
        let r1 = self.nodes[1];
        if r <= r1 {
            if r <= 0.0 {
                let d = if self.k == 1 { self.leading } else { 0.0 };
                return (0.0, d);
            }
            // Frobenius series inside the first interval
            let c = self.series_c;
            let phi = self.leading * r.powi(self.k as i32) * (1.0 + c * r * r);
            let dphi = self.leading * r.powi(self.k as i32 - 1) * (k * (1.0 + c * r * r) + 2.0 * c * r * r);
            return (phi, dphi);
        }
        let m = self.nodes.len() - 1;
        let i = self.nodes.partition_point(|&x| x <= r).saturating_sub(1).min(m - 1);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let h = x1 - x0;
        let s = (r - x0) / h;
        let k2 = k * k;
        let dl0 = self.w[i] / self.f[i];
        let dl1 = self.w[i + 1] / self.f[i + 1];
        let dw0 = (k2 - self.w[i] * self.w[i]) / self.f[i];
        let dw1 = (k2 - self.w[i + 1] * self.w[i + 1]) / self.f[i + 1];
        let ell = cubic_hermite(s, h, self.ell[i], dl0, self.ell[i + 1], dl1);
        let w = cubic_hermite(s, h, self.w[i], dw0, self.w[i + 1], dw1);
        let phi = ell.exp();
        (phi, phi * w / profile.f(r))
    }
}

fn cubic_hermite(s: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1
}

/// Quintic Hermite interpolant of `w` at the interval midpoint, returning `(w, w')`.
fn quintic_mid(h: f64, y: [f64; 2], d: [f64; 2], dd: [f64; 2]) -> (f64, f64) {
    // basis values and first derivatives (in s) at s = 1/2
    let v = [0.5, 5.0 / 32.0, 1.0 / 64.0, 1.0 / 64.0, -5.0 / 32.0, 0.5];
    let dv = [-15.0 / 8.0, -7.0 / 16.0, -1.0 / 32.0, 1.0 / 32.0, -7.0 / 16.0, 15.0 / 8.0];
    let c = [y[0], h * d[0], h * h * dd[0], h * h * dd[1], h * d[1], y[1]];
    let val = c.iter().zip(&v).map(|(a, b)| a * b).sum();
    let der: f64 = c.iter().zip(&dv).map(|(a, b)| a * b).sum();
    (val, der / h)
}

/// Solve for `φ_k` on a 2-D ball with `K_max = DEFAULT_K_MAX`.
pub fn solve_mode(ball: &ModelBall, k: usize) -> Result<ModeProfile> {
    solve_mode_with_limit(ball, k, DEFAULT_K_MAX)
}

/// Solve for `φ_k`; modes above `k_max` are rejected rather than truncated.
pub fn solve_mode_with_limit(ball: &ModelBall, k: usize, k_max: usize) -> Result<ModeProfile> {
    if ball.dim() != 2 {
        return Err(LabError::InvalidBall(format!("mode solves need a 2-D ball, got n = {}", ball.dim())));
    }
    if k > k_max {
        return Err(LabError::ModeLimit { k, limit: k_max });
    }
    let nodes = ball.nodes().to_vec();
    let m = nodes.len() - 1;
    let profile = ball.profile();
    let f: Vec<f64> = nodes.iter().map(|&r| profile.f(r)).collect();
    if k == 0 {
        return Ok(ModeProfile {
            k,
            ell: vec![0.0; m + 1],
            w: vec![0.0; m + 1],
            phi: vec![1.0; m + 1],
            dphi: vec![0.0; m + 1],
            nodes,
            f,
            series_c: 0.0,
            leading: 1.0,
            residual: 0.0,
        });
    }

    let kf = k as f64;
    let c = -kf * profile.cubic_coefficient() / 2.0;
    let r1 = nodes[1];
    let ell1 = kf * r1.ln() + (c * r1 * r1).ln_1p();
    let w1 = f[1] * (kf / r1 + 2.0 * c * r1 / (1.0 + c * r1 * r1));
    let sys = RiccatiSystem { profile, k2: kf * kf };
    let opts = RadauOptions { initial_step: (nodes[2] - nodes[1]) * 0.25, ..Default::default() };
    let (states, _) = integrate_radau(&sys, r1, [ell1, w1], &nodes[2..], opts).map_err(|e| match e {
        LabError::Nonconvergence { what, achieved } => {
            LabError::Nonconvergence { what: format!("mode k = {k}: {what}"), achieved }
        }
        other => other,
    })?;

    let mut ell = vec![f64::NEG_INFINITY; m + 1];
    let mut w = vec![kf; m + 1];
    ell[1] = ell1;
    w[1] = w1;
    for (i, s) in states.iter().enumerate() {
        ell[i + 2] = s[0];
        w[i + 2] = s[1];
    }
    let ell_r = ell[m];
    for e in ell.iter_mut().skip(1) {
        *e -= ell_r;
    }
    let phi: Vec<f64> = ell.iter().map(|e| e.exp()).collect();
    let mut dphi: Vec<f64> = (0..=m).map(|i| if i == 0 { 0.0 } else { phi[i] * w[i] / f[i] }).collect();
    let leading = (ell1 - ell_r).exp() / (r1.powi(k as i32) * (1.0 + c * r1 * r1));
    if k == 1 {
        dphi[0] = leading;
    }

    // residual φ'' + (f'/f)φ' − k²φ/f² = (φ/f)(w' + (w² − k²)/f) at midpoints
    let k2 = kf * kf;
    let mut residual = 0.0f64;
    for i in 1..m {
        let h = nodes[i + 1] - nodes[i];
        let mut wd = [0.0; 2];
        let mut wdd = [0.0; 2];
        for (j, idx) in [i, i + 1].into_iter().enumerate() {
            let (fv, dfv, _) = profile.eval(nodes[idx]);
            let wv = w[idx];
            wd[j] = (k2 - wv * wv) / fv;
            wdd[j] = (-2.0 * wv * wd[j] * fv - (k2 - wv * wv) * dfv) / (fv * fv);
        }
        let (wm, dwm) = quintic_mid(h, [w[i], w[i + 1]], wd, wdd);
        let rm = 0.5 * (nodes[i] + nodes[i + 1]);
        let fm = profile.f(rm);
        let ellm = cubic_hermite(0.5, h, ell[i], w[i] / f[i], ell[i + 1], w[i + 1] / f[i + 1]);
        let res = ellm.exp() / fm * (dwm + (wm * wm - k2) / fm);
        residual = residual.max(res.abs());
    }

    Ok(ModeProfile { k, nodes, ell, w, f, phi, dphi, series_c: c, leading, residual })
}
