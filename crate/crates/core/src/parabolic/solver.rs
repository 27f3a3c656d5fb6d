//! Finite-volume solver for radial heat flow `u_t = u_rr + (n−1)(f'/f)u_r`.
//!
//! Cells surround the uniform nodes `r_i = ih`; cell volumes are integrated
//! exactly from `A(r) = nω_n f^{n−1}` and fluxes use face areas
//! `A(r_{i±1/2})`. Time stepping is Crank–Nicolson; a step whose result is
//! not strictly positive is redone with backward Euler, whose M-matrix keeps
//! positivity, and counted.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::format::{csv_line, num};
use crate::geometry::{ModelBall, RadialGrid, WarpingProfile};
use crate::quadrature::{integrate, QuadOptions};
use crate::tridiag::solve_tridiagonal;

use super::kernel::{euclidean_heat_kernel, HeatSolution, LogDerivatives};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    /// `u = 0` at `r = R`.
    Dirichlet,
    /// Zero flux at `r = R`.
    Neumann,
    /// Emulated complete model: Neumann far field at `max(R, 8√t_end)`.
    WholeSpace,
}

/// Initial data at `t_start`, as a function of `r` on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Constant(f64),
    /// `mass·(4πt_start)^{−n/2} exp(−r²/(4t_start))`.
    HeatKernel {
        mass: f64,
    },
    /// `1 + amplitude·cos(πr/L)`.
    CosineRipple {
        amplitude: f64,
    },
    /// `cos(πr/(2L))`, vanishing at the boundary.
    CosineBump,
    /// `1 + amplitude·exp(−r²/width²)`; compatible with a Neumann wall to
    /// roundoff when `width ≪ L`.
    GaussianBump {
        amplitude: f64,
        width: f64,
    },
    /// `floor + (4πt_start)^{−n/2} exp(−r²/(4t_start))`.
    KernelOverFloor {
        floor: f64,
    },
    /// Nodal values on the solver grid.
    Samples(Vec<f64>),
}

impl InitialData {
    /// Time at which the solution provably started. Constants, and kernel
    /// data on the flat model, extend back to 0; anything else starts at `t_start`.
    pub fn time_origin(&self, profile: &WarpingProfile, t_start: f64) -> f64 {
        match self {
            InitialData::Constant(_) => 0.0,
            InitialData::HeatKernel { .. } | InitialData::KernelOverFloor { .. } if profile.is_euclidean() => 0.0,
            _ => t_start,
        }
    }

    fn eval(&self, r: f64, n: usize, t0: f64, l: f64) -> f64 {
        match self {
            InitialData::Constant(c) => *c,
            InitialData::HeatKernel { mass } => mass * euclidean_heat_kernel(n, r, t0).unwrap_or(f64::NAN),
            InitialData::CosineRipple { amplitude } => 1.0 + amplitude * (std::f64::consts::PI * r / l).cos(),
            InitialData::CosineBump => (std::f64::consts::PI * r / (2.0 * l)).cos(),
            InitialData::GaussianBump { amplitude, width } => 1.0 + amplitude * (-(r / width).powi(2)).exp(),
            InitialData::KernelOverFloor { floor } => floor + euclidean_heat_kernel(n, r, t0).unwrap_or(f64::NAN),
            InitialData::Samples(_) => f64::NAN,
        }
    }
}

/// A radial heat problem on a model ball.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatProblem {
    pub profile: WarpingProfile,
    pub n: usize,
    pub radius: f64,
    pub boundary: BoundaryCondition,
    pub initial: InitialData,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub intervals: usize,
    /// Override for the clock used by the estimates (see [`InitialData::time_origin`]).
    pub time_origin: Option<f64>,
}

impl HeatProblem {
    pub fn time_origin(&self) -> f64 {
        self.time_origin.unwrap_or_else(|| self.initial.time_origin(&self.profile, self.t_start))
    }

    /// Outer radius actually discretized.
    pub fn domain_radius(&self) -> f64 {
        match self.boundary {
            BoundaryCondition::WholeSpace => self.radius.max(8.0 * self.t_end.sqrt()),
            _ => self.radius,
        }
    }

    /// Same problem with `h` and `Δt` divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self { steps: self.steps * factor, intervals: self.intervals * factor, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeInfo {
    pub scheme: &'static str,
    pub h: f64,
    pub dt: f64,
    pub fallback_steps: usize,
    pub domain_radius: f64,
}

/// A positive heat solution sampled on a uniform space–time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatField {
    ball: ModelBall,
    boundary: BoundaryCondition,
    times: Vec<f64>,
    /// Row-major over (time, node).
    values: Vec<f64>,
    volumes: Vec<f64>,
    conductance: Vec<f64>,
    scheme: SchemeInfo,
    masses: Vec<f64>,
    time_origin: f64,
}

fn cell_geometry(ball: &ModelBall) -> Result<(Vec<f64>, Vec<f64>)> {
    let nodes = ball.nodes();
    let m = nodes.len() - 1;
    let h = nodes[1];
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-14, ..Default::default() };
    let mut volumes = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let a = if i == 0 { 0.0 } else { nodes[i] - 0.5 * h };
        let b = if i == m { nodes[m] } else { nodes[i] + 0.5 * h };
        volumes.push(integrate(|r| ball.area(r), a, b, opts)?.value);
    }
    // conductance[i] couples nodes i and i+1
    let conductance = (0..m).map(|i| ball.area(nodes[i] + 0.5 * h) / h).collect();
    Ok((volumes, conductance))
}

/// Evolve `problem` with Crank–Nicolson (backward-Euler fallback).
pub fn heat_solve_radial(problem: &HeatProblem) -> Result<HeatField> {
    let HeatProblem { n, t_start, t_end, steps, intervals, .. } = *problem;
    if !(t_start > 0.0) {
        return Err(LabError::InvalidParameter(format!("t_start must be > 0, got {t_start}")));
    }
    if !(t_end > t_start) {
        return Err(LabError::InvalidParameter("t_end must exceed t_start".into()));
    }
    if !(problem.time_origin() <= t_start) {
        return Err(LabError::InvalidParameter("time origin must not exceed t_start".into()));
    }
    if steps < 2 || intervals < 8 {
        return Err(LabError::InvalidParameter("need at least 2 time steps and 8 intervals".into()));
    }
    let l = problem.domain_radius();
    let h = l / intervals as f64;
    let nodes: Vec<f64> = (0..=intervals).map(|i| if i == intervals { l } else { i as f64 * h }).collect();
    let ball = ModelBall::new(problem.profile.clone(), n, RadialGrid::from_nodes(nodes, h)?)?;
    let (volumes, conductance) = cell_geometry(&ball)?;
    let m = intervals;

    let mut u: Vec<f64> = match &problem.initial {
        InitialData::Samples(v) => {
            if v.len() != m + 1 {
                return Err(LabError::InvalidParameter(format!("expected {} initial samples, got {}", m + 1, v.len())));
            }
            v.clone()
        }
        other => ball.nodes().iter().map(|&r| other.eval(r, n, t_start, l)).collect(),
    };
    let dirichlet = problem.boundary == BoundaryCondition::Dirichlet;
    if dirichlet {
        u[m] = 0.0;
    }
    let unknowns = if dirichlet { m } else { m + 1 };
    if let Some(i) = (0..unknowns).find(|&i| !(u[i] > 0.0)) {
        return Err(LabError::NotPositive { min: u[i], location: format!("initial data at r = {}", ball.nodes()[i]) });
    }

    let dt = (t_end - t_start) / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity((steps + 1) * (m + 1));
    let mut masses = Vec::with_capacity(steps + 1);
    let mass = |u: &[f64]| u.iter().zip(&volumes).map(|(a, b)| a * b).sum::<f64>();
    times.push(t_start);
    values.extend_from_slice(&u);
    masses.push(mass(&u));

    // stiffness K: (Ku)_i = −c_{i}(u_{i+1}−u_i) + c_{i−1}(u_i−u_{i−1})
    let k_diag: Vec<f64> = (0..unknowns)
        .map(|i| {
            let left = if i > 0 { conductance[i - 1] } else { 0.0 };
            let right = if i < m { conductance[i] } else { 0.0 };
            left + right
        })
        .collect();
    let k_lower: Vec<f64> = (0..unknowns).map(|i| if i > 0 { -conductance[i - 1] } else { 0.0 }).collect();
    let k_upper: Vec<f64> = (0..unknowns).map(|i| if i < m { -conductance[i] } else { 0.0 }).collect();

    let mut fallback = 0;
    for step in 1..=steps {
        let apply_k = |u: &[f64], i: usize| {
            let mut s = k_diag[i] * u[i];
            if i > 0 {
                s += k_lower[i] * u[i - 1];
            }
            if i + 1 < unknowns || (i + 1 == m && dirichlet) {
                s += k_upper[i] * u[i + 1];
            }
            s
        };
        let (mut diag, mut rhs) = (vec![0.0; unknowns], vec![0.0; unknowns]);
        for i in 0..unknowns {
            let mv = volumes[i] / dt;
            diag[i] = mv + 0.5 * k_diag[i];
            rhs[i] = mv * u[i] - 0.5 * apply_k(&u, i);
        }
        let half = |v: &[f64]| v.iter().map(|x| 0.5 * x).collect::<Vec<_>>();
        let mut next = solve_tridiagonal(&half(&k_lower), &diag, &half(&k_upper), &rhs)?;
        if next.iter().any(|&x| !(x > 0.0)) {
            fallback += 1;
            for i in 0..unknowns {
                let mv = volumes[i] / dt;
                diag[i] = mv + k_diag[i];
                rhs[i] = mv * u[i];
            }
            next = solve_tridiagonal(&k_lower, &diag, &k_upper, &rhs)?;
            if let Some(i) = (0..unknowns).find(|&i| !(next[i] > 0.0)) {
                return Err(LabError::NotPositive {
                    min: next[i],
                    location: format!("r = {}, step {step}", ball.nodes()[i]),
                });
            }
        }
        u[..unknowns].copy_from_slice(&next);
        times.push(t_start + step as f64 * dt);
        values.extend_from_slice(&u);
        masses.push(mass(&u));
    }

    let scheme = SchemeInfo { scheme: "crank-nicolson", h, dt, fallback_steps: fallback, domain_radius: l };
    let time_origin = problem.time_origin();
    Ok(HeatField { ball, boundary: problem.boundary, times, values, volumes, conductance, scheme, masses, time_origin })
}

impl HeatField {
    pub fn ball(&self) -> &ModelBall {
        &self.ball
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.boundary
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn nodes(&self) -> &[f64] {
        self.ball.nodes()
    }

    pub fn scheme(&self) -> SchemeInfo {
        self.scheme
    }

    /// `∫ u dV` at each stored time.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Volume of the finite-volume cell around node `i`.
    pub fn cell_volume(&self, i: usize) -> f64 {
        self.volumes[i]
    }

    /// `u(r_i, t_j)`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nodes().len() + i]
    }

    /// Snapshot at time index `j`.
    pub fn snapshot(&self, j: usize) -> &[f64] {
        let w = self.nodes().len();
        &self.values[j * w..(j + 1) * w]
    }

    /// Largest nodes index used for interior evaluation (excludes a Dirichlet boundary).
    pub fn last_interior(&self) -> usize {
        let m = self.nodes().len() - 1;
        if self.boundary == BoundaryCondition::Dirichlet {
            m - 1
        } else {
            m
        }
    }

    /// Index of the stored time equal to `t` (within roundoff).
    pub fn time_index(&self, t: f64) -> Result<usize> {
        let dt = self.scheme.dt;
        let j = ((t - self.times[0]) / dt).round();
        if j < 0.0 || j as usize >= self.times.len() || (self.times[j as usize] - t).abs() > 1e-9 * dt {
            return Err(LabError::OutOfDomain(format!("t = {t} is not a stored time node")));
        }
        Ok(j as usize)
    }

    /// Index of the node equal to `r` (within roundoff), if any.
    pub fn node_index(&self, r: f64) -> Option<usize> {
        let h = self.scheme.h;
        let i = (r / h).round();
        (i >= 0.0 && (i as usize) < self.nodes().len() && (self.nodes()[i as usize] - r).abs() <= 1e-9 * h)
            .then_some(i as usize)
    }

    /// Discrete `Δ ln u` at node `i`, time index `j`, consistent with the scheme.
    fn log_laplacian(&self, i: usize, j: usize) -> f64 {
        let l = |k: usize| self.at(k, j).ln();
        let m = self.nodes().len() - 1;
        let mut flux = 0.0;
        if i < m {
            flux += self.conductance[i] * (l(i + 1) - l(i));
        }
        if i > 0 {
            flux -= self.conductance[i - 1] * (l(i) - l(i - 1));
        }
        flux / self.volumes[i]
    }

    /// Log-derivatives at node `i`, interior time index `j` (central differences).
    pub fn log_derivatives_at(&self, i: usize, j: usize) -> Result<LogDerivatives> {
        let t_count = self.times.len();
        if j == 0 || j + 1 >= t_count {
            return Err(LabError::OutOfDomain(
                "log-derivatives need an interior time node (central differences)".into(),
            ));
        }
        if i > self.last_interior() {
            return Err(LabError::OutOfDomain("node lies on the Dirichlet boundary".into()));
        }
        let m = self.nodes().len() - 1;
        if i == m {
            return Err(LabError::OutOfDomain("no centered radial stencil at the outer node".into()));
        }
        let dt = (self.at(i, j + 1).ln() - self.at(i, j - 1).ln()) / (2.0 * self.scheme.dt);
        let dr = if i == 0 { 0.0 } else { (self.at(i + 1, j).ln() - self.at(i - 1, j).ln()) / (2.0 * self.scheme.h) };
        Ok(LogDerivatives { dt, dr, laplacian: self.log_laplacian(i, j) })
    }

    /// Field export rows `r, t, u`.
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(["r", "t", "u"]);
        for (j, &t) in self.times.iter().enumerate() {
            for (i, &r) in self.nodes().iter().enumerate() {
                out.push_str(&csv_line([num(r), num(t), num(self.at(i, j))]));
            }
        }
        out
    }
}

impl HeatSolution for HeatField {
    fn dim(&self) -> usize {
        self.ball.dim()
    }

    /// Stored time nodes only; cubic interpolation of `ln u` in `r`.
    fn value(&self, r: f64, t: f64) -> Result<f64> {
        let j = self.time_index(t)?;
        let m = self.nodes().len() - 1;
        if !(0.0..=self.nodes()[m]).contains(&r) {
            return Err(LabError::OutOfDomain(format!("r = {r} outside the field")));
        }
        if let Some(i) = self.node_index(r) {
            return Ok(self.at(i, j));
        }
        let h = self.scheme.h;
        let last = self.last_interior();
        let base = ((r / h).floor() as isize - 1).clamp(-1, last as isize - 3);
        // even reflection through the pole
        let lu = |k: isize| self.at(k.unsigned_abs(), j).ln();
        let xs: Vec<f64> = (0..4).map(|q| (base + q) as f64 * h).collect();
        let mut acc = 0.0;
        for a in 0..4 {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (r - xs[b]) / (xs[a] - xs[b]);
                }
            }
            acc += w * lu(base + a as isize);
        }
        Ok(acc.exp())
    }

    fn log_derivatives(&self, r: f64, t: f64) -> Result<LogDerivatives> {
        let j = self.time_index(t)?;
        let i = self
            .node_index(r)
            .ok_or_else(|| LabError::OutOfDomain(format!("r = {r} is not a grid node of the field")))?;
        self.log_derivatives_at(i, j)
    }

    fn complete(&self) -> bool {
        self.boundary == BoundaryCondition::WholeSpace
    }

    fn time_origin(&self) -> f64 {
        self.time_origin
    }
}

/// Spatial `L∞` error against the Euclidean kernel at the final time over `r ≤ window`.
pub fn kernel_error(field: &HeatField, mass: f64, window: f64) -> Result<f64> {
    let j = field.times().len() - 1;
    let t = field.times()[j];
    let n = field.dim();
    let mut err = 0.0f64;
    for (i, &r) in field.nodes().iter().enumerate() {
        if r > window {
            break;
        }
        err = err.max((field.at(i, j) - mass * euclidean_heat_kernel(n, r, t)?).abs());
    }
    Ok(err)
}

/// Far-field truncation estimate: `max |u_L − u_{2L}|` on `r ≤ window` at the final time.
pub fn truncation_error_estimate(problem: &HeatProblem, window: f64) -> Result<f64> {
    let base = heat_solve_radial(problem)?;
    let l = base.scheme().domain_radius;
    let doubled = HeatProblem {
        radius: 2.0 * l,
        boundary: if problem.boundary == BoundaryCondition::WholeSpace {
            BoundaryCondition::Neumann
        } else {
            problem.boundary
        },
        intervals: problem.intervals * 2,
        ..problem.clone()
    };
    let wide = heat_solve_radial(&doubled)?;
    let jb = base.times().len() - 1;
    let jw = wide.times().len() - 1;
    let mut diff = 0.0f64;
    for (i, &r) in base.nodes().iter().enumerate() {
        if r > window {
            break;
        }
        diff = diff.max((base.at(i, jb) - wide.at(i, jw)).abs());
    }
    Ok(diff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_kernel_problem(intervals: usize, steps: usize) -> HeatProblem {
        HeatProblem {
            profile: WarpingProfile::euclidean(),
            n: 2,
            radius: 1.0,
            boundary: BoundaryCondition::WholeSpace,
            initial: InitialData::HeatKernel { mass: 1.0 },
            t_start: 0.1,
            t_end: 0.5,
            steps,
            intervals,
            time_origin: None,
        }
    }

    #[test]
    fn whole_space_kernel_is_reproduced_at_second_order() {
        let errs: Vec<f64> = [1usize, 2, 4]
            .iter()
            .map(|&f| {
                let field = heat_solve_radial(&flat_kernel_problem(128 * f, 40 * f)).unwrap();
                assert_eq!(field.scheme().fallback_steps, 0);
                kernel_error(&field, 1.0, 2.0).unwrap()
            })
            .collect();
        let (o1, o2) = ((errs[0] / errs[1]).log2(), (errs[1] / errs[2]).log2());
        assert!((o1 - 2.0).abs() < 0.3 && (o2 - 2.0).abs() < 0.3, "{errs:?}");
        assert!(errs[2] < 1e-4);
    }

    #[test]
    fn constant_stays_constant_under_neumann() {
        let p = HeatProblem {
            initial: InitialData::Constant(1.0),
            boundary: BoundaryCondition::Neumann,
            ..flat_kernel_problem(64, 20)
        };
        let f = heat_solve_radial(&p).unwrap();
        let j = f.times().len() - 1;
        assert!(f.snapshot(j).iter().all(|&v| (v - 1.0).abs() < 1e-13));
    }

    #[test]
    fn dirichlet_bump_on_sphere_decays_and_stays_positive() {
        let p = HeatProblem {
            profile: WarpingProfile::sphere(1.0).unwrap(),
            n: 2,
            radius: 1.0,
            boundary: BoundaryCondition::Dirichlet,
            initial: InitialData::CosineBump,
            t_start: 0.01,
            t_end: 1.0,
            steps: 200,
            intervals: 128,
            time_origin: None,
        };
        let f = heat_solve_radial(&p).unwrap();
        assert!(f.masses().windows(2).all(|w| w[1] <= w[0] + 1e-10));
        for j in 0..f.times().len() {
            assert!(f.snapshot(j)[..128].iter().all(|&v| v > 0.0));
        }
        // discrete maximum principle: the maximum never grows
        let maxes: Vec<f64> = (0..f.times().len()).map(|j| f.snapshot(j).iter().copied().fold(0.0, f64::max)).collect();
        assert!(maxes.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    }

    #[test]
    fn neumann_conserves_mass() {
        let p = HeatProblem {
            profile: WarpingProfile::sphere(1.0).unwrap(),
            boundary: BoundaryCondition::Neumann,
            initial: InitialData::CosineRipple { amplitude: 0.5 },
            ..flat_kernel_problem(128, 50)
        };
        let f = heat_solve_radial(&p).unwrap();
        let m0 = f.masses()[0];
        assert!(f.masses().iter().all(|m| (m - m0).abs() < 1e-12 * m0));
    }

    #[test]
    fn rejects_bad_setups() {
        let p = flat_kernel_problem(64, 10);
        assert!(heat_solve_radial(&HeatProblem { t_start: 0.0, ..p.clone() }).is_err());
        assert!(heat_solve_radial(&HeatProblem { t_end: 0.05, ..p.clone() }).is_err());
        assert!(heat_solve_radial(&HeatProblem { initial: InitialData::Constant(-1.0), ..p }).is_err());
    }

    #[test]
    fn off_node_values_interpolate_log() {
        let field = heat_solve_radial(&flat_kernel_problem(256, 80)).unwrap();
        let t = field.times()[80];
        for &r in &[0.001, 0.1234, 1.0101] {
            let exact = euclidean_heat_kernel(2, r, t).unwrap();
            assert!((field.value(r, t).unwrap() / exact - 1.0).abs() < 1e-3);
        }
        assert!(field.value(0.1, t + 1e-3).is_err());
    }

    #[test]
    fn truncation_estimate_is_small() {
        let p = flat_kernel_problem(128, 20);
        let e = truncation_error_estimate(&p, 2.0).unwrap();
        assert!(e < 1e-10, "{e}");
    }
}
