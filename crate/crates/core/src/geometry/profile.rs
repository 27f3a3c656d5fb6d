//! Warping profiles `f(r)` of rotationally symmetric metrics `dr² + f(r)² g_sphere`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{LabError, Result};

/// Concavity tolerance: profiles with `f'' ≤ TOL_CURV` everywhere are admitted.
pub const TOL_CURV: f64 = 1e-10;
/// Tolerance on `f(0) = 0` and `f'(0) = 1` for sampled profiles.
pub const TOL_ORIGIN: f64 = 1e-8;

/// User-facing description of a profile, validated by [`make_profile`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileDescriptor {
    Euclidean,
    /// `f(r) = sin(√κ r)/√κ`.
    Sphere {
        kappa: f64,
    },
    /// `f(r) = α r + (1-α) w tanh(r/w)`: slope 1 at the pole, asymptotic slope α.
    SmoothedCone {
        alpha: f64,
        width: f64,
    },
    /// Sampled data. Missing derivative columns are finite-differenced at
    /// fourth order, which needs uniformly spaced nodes.
    Custom {
        r: Vec<f64>,
        f: Vec<f64>,
        df: Option<Vec<f64>>,
        d2f: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Euclidean,
    Sphere { kappa: f64, sqrt_kappa: f64 },
    SmoothedCone { alpha: f64, width: f64 },
    Custom(Arc<QuinticHermite>),
}

/// A validated warping function with its first two derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpingProfile {
    kind: Kind,
    domain_max: f64,
}

/// `C²` piecewise quintic Hermite interpolant through `(f, f', f'')` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct QuinticHermite {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
    d2y: Vec<f64>,
}

impl QuinticHermite {
    pub fn new(x: Vec<f64>, y: Vec<f64>, dy: Vec<f64>, d2y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || dy.len() != n || d2y.len() != n {
            return Err(LabError::InvalidParameter("spline columns must have equal length ≥ 2".into()));
        }
        if let Some(i) = (1..n).find(|&i| x[i] <= x[i - 1]) {
            return Err(LabError::InvalidProfile {
                at: x[i],
                reason: "spline nodes must be strictly increasing".into(),
            });
        }
        Ok(Self { x, y, dy, d2y })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    /// Value and first two derivatives at `t` (clamped to the node range).
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        let t = t.clamp(self.x[0], self.x[n - 1]);
        let i = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (s2, s3, s4, s5) = (s * s, s * s * s, s.powi(4), s.powi(5));

        let h0 = [
            1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
            -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
            -60.0 * s + 180.0 * s2 - 120.0 * s3,
        ];
        let h1 = [
            s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
            1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
            -36.0 * s + 96.0 * s2 - 60.0 * s3,
        ];
        let h2 = [
            0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
            0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
            0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3),
        ];
        let h3 = [
            0.5 * (s3 - 2.0 * s4 + s5),
            0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4),
            0.5 * (6.0 * s - 24.0 * s2 + 20.0 * s3),
        ];
        let h4 =
            [-4.0 * s3 + 7.0 * s4 - 3.0 * s5, -12.0 * s2 + 28.0 * s3 - 15.0 * s4, -24.0 * s + 84.0 * s2 - 60.0 * s3];
        let h5 =
            [10.0 * s3 - 15.0 * s4 + 6.0 * s5, 30.0 * s2 - 60.0 * s3 + 30.0 * s4, 60.0 * s - 180.0 * s2 + 120.0 * s3];

        let coeff = [
            self.y[i],
            h * self.dy[i],
            h * h * self.d2y[i],
            h * h * self.d2y[i + 1],
            h * self.dy[i + 1],
            self.y[i + 1],
        ];
        let basis = [h0, h1, h2, h3, h4, h5];
        let mut out = [0.0; 3];
        for (c, b) in coeff.iter().zip(basis.iter()) {
            for d in 0..3 {
                out[d] += c * b[d];
            }
        }
        (out[0], out[1] / h, out[2] / (h * h))
    }
}

/// Fourth-order finite-difference first and second derivatives on uniform nodes.
fn fd_derivatives(f: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = f.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        if i >= 2 && i + 2 < n {
            d1[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
            d2[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h);
        } else {
            // one-sided stencils, mirrored at the right end
            let (sign, g): (f64, Vec<f64>) =
                if i < 2 { (1.0, f[i..i + 6].to_vec()) } else { (-1.0, (0..6).map(|k| f[i - k]).collect()) };
            let offset_one = i == 1 || i + 2 == n;
            if offset_one {
                // node sits one step in from the end: use g[-1] as well
                let gm = if sign > 0.0 { f[i - 1] } else { f[i + 1] };
                d1[i] = sign * (-3.0 * gm - 10.0 * g[0] + 18.0 * g[1] - 6.0 * g[2] + g[3]) / (12.0 * h);
                d2[i] = (10.0 * gm - 15.0 * g[0] - 4.0 * g[1] + 14.0 * g[2] - 6.0 * g[3] + g[4]) / (12.0 * h * h);
            } else {
                d1[i] = sign * (-25.0 * g[0] + 48.0 * g[1] - 36.0 * g[2] + 16.0 * g[3] - 3.0 * g[4]) / (12.0 * h);
                d2[i] = (45.0 * g[0] - 154.0 * g[1] + 214.0 * g[2] - 156.0 * g[3] + 61.0 * g[4] - 10.0 * g[5])
                    / (12.0 * h * h);
            }
        }
    }
    (d1, d2)
}

/// Validate a descriptor and build the profile.
pub fn make_profile(desc: &ProfileDescriptor) -> Result<WarpingProfile> {
    match desc {
        ProfileDescriptor::Euclidean => Ok(WarpingProfile { kind: Kind::Euclidean, domain_max: f64::INFINITY }),
        &ProfileDescriptor::Sphere { kappa } => {
            if !(kappa > 0.0 && kappa.is_finite()) {
                return Err(LabError::InvalidParameter("kappa must be > 0".into()));
            }
            let s = kappa.sqrt();
            // f vanishes at the antipodal point π/√κ
            Ok(WarpingProfile { kind: Kind::Sphere { kappa, sqrt_kappa: s }, domain_max: (1.0 - 1e-6) * PI / s })
        }
        &ProfileDescriptor::SmoothedCone { alpha, width } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(LabError::InvalidParameter("alpha must lie in (0, 1]".into()));
            }
            if !(width > 0.0 && width.is_finite()) {
                return Err(LabError::InvalidParameter("cone smoothing width must be > 0".into()));
            }
            Ok(WarpingProfile { kind: Kind::SmoothedCone { alpha, width }, domain_max: f64::INFINITY })
        }
        ProfileDescriptor::Custom { r, f, df, d2f } => make_custom(r, f, df.as_deref(), d2f.as_deref()),
    }
}

fn make_custom(r: &[f64], f: &[f64], df: Option<&[f64]>, d2f: Option<&[f64]>) -> Result<WarpingProfile> {
    let n = r.len();
    if n < 6 || f.len() != n {
        return Err(LabError::InvalidParameter("custom profile needs ≥ 6 nodes with matching f column".into()));
    }
    if let Some(i) = (1..n).find(|&i| r[i] <= r[i - 1]) {
        return Err(LabError::InvalidProfile { at: r[i], reason: "nodes must be strictly increasing".into() });
    }
    if r[0].abs() > 0.0 {
        return Err(LabError::InvalidProfile { at: r[0], reason: "first node must be the pole r = 0".into() });
    }
    let needs_fd = df.is_none() || d2f.is_none();
    let h = r[1] - r[0];
    if needs_fd {
        let uniform = r.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        if !uniform {
            return Err(LabError::InvalidParameter(
                "finite-differenced derivatives need uniformly spaced nodes".into(),
            ));
        }
    }
    let (fd1, fd2) = if needs_fd { fd_derivatives(f, h) } else { (Vec::new(), Vec::new()) };
    let d1 = df.map(<[f64]>::to_vec).unwrap_or(fd1);
    let d2 = d2f.map(<[f64]>::to_vec).unwrap_or(fd2);
    if d1.len() != n || d2.len() != n {
        return Err(LabError::InvalidParameter("derivative columns must match the node count".into()));
    }

    if f[0].abs() > TOL_ORIGIN {
        return Err(LabError::InvalidProfile { at: 0.0, reason: format!("f(0) = {} but must be 0", f[0]) });
    }
    if (d1[0] - 1.0).abs() > TOL_ORIGIN {
        return Err(LabError::InvalidProfile { at: 0.0, reason: format!("f'(0) = {} but must be 1", d1[0]) });
    }
    for i in 1..n {
        if f[i] <= 0.0 {
            return Err(LabError::InvalidProfile { at: r[i], reason: format!("f = {} is not positive", f[i]) });
        }
        if f[i] <= f[i - 1] {
            return Err(LabError::InvalidProfile {
                at: r[i],
                reason: "spline data must be monotone increasing".into(),
            });
        }
    }
    if let Some(i) = (0..n).find(|&i| d2[i] > TOL_CURV) {
        return Err(LabError::InvalidProfile {
            at: r[i],
            reason: format!("f'' = {:.3e} > 0 violates concavity (negative curvature)", d2[i]),
        });
    }
    let spline = QuinticHermite::new(r.to_vec(), f.to_vec(), d1, d2)?;
    Ok(WarpingProfile { kind: Kind::Custom(Arc::new(spline)), domain_max: r[n - 1] })
}

impl WarpingProfile {
    pub fn euclidean() -> Self {
        WarpingProfile { kind: Kind::Euclidean, domain_max: f64::INFINITY }
    }

    pub fn sphere(kappa: f64) -> Result<Self> {
        make_profile(&ProfileDescriptor::Sphere { kappa })
    }

    pub fn smoothed_cone(alpha: f64, width: f64) -> Result<Self> {
        make_profile(&ProfileDescriptor::SmoothedCone { alpha, width })
    }

    /// Largest admissible radius.
    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, Kind::Euclidean)
    }

    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Euclidean => "euclidean".into(),
            Kind::Sphere { kappa, .. } => format!("sphere(kappa={kappa})"),
            Kind::SmoothedCone { alpha, width } => format!("smoothed-cone(alpha={alpha},width={width})"),
            Kind::Custom(s) => format!("custom({} nodes)", s.nodes().len()),
        }
    }

    /// `(f, f', f'')` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        match &self.kind {
            Kind::Euclidean => (r, 1.0, 0.0),
            Kind::Sphere { sqrt_kappa: s, .. } => {
                let (sn, cs) = (s * r).sin_cos();
                (sn / s, cs, -s * sn)
            }
            Kind::SmoothedCone { alpha, width } => {
                let x = r / width;
                let th = x.tanh();
                let sech2 = 1.0 - th * th;
                (
                    alpha * r + (1.0 - alpha) * width * th,
                    alpha + (1.0 - alpha) * sech2,
                    -2.0 * (1.0 - alpha) / width * sech2 * th,
                )
            }
            Kind::Custom(s) => s.eval(r),
        }
    }

    pub fn f(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    pub fn df(&self, r: f64) -> f64 {
        self.eval(r).1
    }

    pub fn d2f(&self, r: f64) -> f64 {
        self.eval(r).2
    }

    /// `r f'(r) / f(r)`, with its limit 1 at the pole.
    pub fn r_df_over_f(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 1.0;
        }
        match &self.kind {
            Kind::Sphere { sqrt_kappa: s, .. } => {
                let x = s * r;
                if x < 1e-4 {
                    1.0 - x * x / 3.0 - x.powi(4) / 45.0
                } else {
                    x / x.tan()
                }
            }
            _ => {
                let (f, df, _) = self.eval(r);
                r * df / f
            }
        }
    }

    /// `f(r)/r`, with its limit 1 at the pole.
    pub fn f_over_r(&self, r: f64) -> f64 {
        if r == 0.0 {
            1.0
        } else {
            self.f(r) / r
        }
    }

    /// Coefficient `c₃` of the pole expansion `f(r) = r + c₃ r³ + O(r⁵)`.
    pub fn cubic_coefficient(&self) -> f64 {
        match &self.kind {
            Kind::Euclidean => 0.0,
            Kind::Sphere { kappa, .. } => -kappa / 6.0,
            Kind::SmoothedCone { alpha, width } => -(1.0 - alpha) / (3.0 * width * width),
            Kind::Custom(s) => {
                // f''(r) ≈ 6 c₃ r near the pole
                let r = s.nodes()[1];
                s.eval(r).2 / (6.0 * r)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_is_identity() {
        let p = make_profile(&ProfileDescriptor::Euclidean).unwrap();
        assert_eq!(p.eval(0.7), (0.7, 1.0, 0.0));
    }

    #[test]
    fn unit_sphere_matches_sine_series() {
        let p = WarpingProfile::sphere(1.0).unwrap();
        // independent oracle: Taylor series of sin to many terms
        let x: f64 = 0.5;
        let mut series = 0.0;
        let mut term = x;
        for k in 0..12 {
            series += term;
            term *= -x * x / ((2 * k + 2) as f64 * (2 * k + 3) as f64);
        }
        assert!((p.f(0.5) - series).abs() < 1e-15);
        assert!((p.f(0.5) - 0.479_425_538_604_203).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_profile(&ProfileDescriptor::Sphere { kappa: -1.0 }).is_err());
        assert!(make_profile(&ProfileDescriptor::SmoothedCone { alpha: 1.5, width: 1.0 }).is_err());
        assert!(make_profile(&ProfileDescriptor::SmoothedCone { alpha: 0.0, width: 1.0 }).is_err());
    }

    #[test]
    fn cone_is_concave_with_unit_slope_at_pole() {
        let p = WarpingProfile::smoothed_cone(0.5, 1.0).unwrap();
        let (f0, d0, _) = p.eval(0.0);
        assert_eq!(f0, 0.0);
        assert!((d0 - 1.0).abs() < 1e-15);
        for i in 0..200 {
            let r = i as f64 * 0.05;
            assert!(p.d2f(r) <= 0.0);
        }
        assert!((p.df(50.0) - 0.5).abs() < 1e-12);
    }

    fn sampled_sine(n: usize, with_derivs: bool) -> ProfileDescriptor {
        let r: Vec<f64> = (0..n).map(|i| i as f64 * 1.2 / (n - 1) as f64).collect();
        let f = r.iter().map(|x| x.sin()).collect();
        let (df, d2f) = if with_derivs {
            (Some(r.iter().map(|x| x.cos()).collect()), Some(r.iter().map(|x| -x.sin()).collect()))
        } else {
            (None, None)
        };
        ProfileDescriptor::Custom { r, f, df, d2f }
    }

    #[test]
    fn custom_spline_reproduces_sine() {
        let p = make_profile(&sampled_sine(41, true)).unwrap();
        for i in 0..100 {
            let r = i as f64 * 0.012;
            let (f, df, d2f) = p.eval(r);
            assert!((f - r.sin()).abs() < 1e-10, "r={r}");
            assert!((df - r.cos()).abs() < 1e-8);
            assert!((d2f + r.sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn finite_differenced_derivatives_are_fourth_order() {
        let err = |n: usize| {
            let desc = sampled_sine(n, false);
            let p = make_profile(&desc).unwrap();
            let ProfileDescriptor::Custom { r, .. } = desc else { unreachable!() };
            r.iter().map(|&x| (p.df(x) - x.cos()).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(201), err(401));
        assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn convex_node_is_reported() {
        let ProfileDescriptor::Custom { r, f, df, mut d2f } = sampled_sine(21, true) else { unreachable!() };
        let star = 7;
        d2f.as_mut().unwrap()[star] = 0.1;
        let err = make_profile(&ProfileDescriptor::Custom { r: r.clone(), f, df, d2f }).unwrap_err();
        match err {
            LabError::InvalidProfile { at, .. } => assert_eq!(at, r[star]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_pole_slope_is_rejected() {
        let ProfileDescriptor::Custom { r, f, d2f, .. } = sampled_sine(21, true) else { unreachable!() };
        let df = Some(r.iter().map(|x| 1.1 * x.cos()).collect());
        let err = make_profile(&ProfileDescriptor::Custom { r, f, df, d2f }).unwrap_err();
        assert!(matches!(err, LabError::InvalidProfile { at, .. } if at == 0.0));
    }
}
