use serde::Serialize;

use crate::error::{LabError, Result};
use crate::format::to_json;

use super::kernel::HeatSolution;
use super::solver::{heat_solve_radial, BoundaryCondition, HeatField, HeatProblem};

/// `(ln u)_t − |∇ln u|² + n/(2τ)` with `τ = t − origin`; nonnegative for
/// positive heat solutions.
pub fn li_yau_quantity(u: &dyn HeatSolution, r: f64, t: f64) -> Result<f64> {
    let d = u.log_derivatives(r, t)?;
    Ok(d.dt - d.dr * d.dr + u.dim() as f64 / (2.0 * (t - u.time_origin())))
}

/// `τΔf − n/2` with `f = −ln u`; nonpositive, identically zero for the kernel.
pub fn li_yau_g_quantity(u: &dyn HeatSolution, r: f64, t: f64) -> Result<f64> {
    let d = u.log_derivatives(r, t)?;
    Ok(-(t - u.time_origin()) * d.laplacian - u.dim() as f64 / 2.0)
}

/// Which pointwise quantity a scan evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiYauQuantity {
    LiYau,
    LiYauG,
}

impl LiYauQuantity {
    fn at(self, field: &HeatField, i: usize, j: usize) -> Result<f64> {
        let d = field.log_derivatives_at(i, j)?;
        let t = field.times()[j] - field.time_origin();
        let n = field.ball().dim() as f64;
        Ok(match self {
            LiYauQuantity::LiYau => d.dt - d.dr * d.dr + n / (2.0 * t),
            LiYauQuantity::LiYauG => -t * d.laplacian - n / 2.0,
        })
    }
}

/// Spatial window for scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ScanWindow {
    /// Gaussian window for whole-space fields, the full ball otherwise.
    #[default]
    Auto,
    /// `r ≤ min(4√t, L/2)`, where a kernel-like tail is resolved and the
    /// far-field wall is invisible.
    Gaussian,
    /// `r ≤ L − margin`.
    Ball { margin: f64 },
}

impl ScanWindow {
    fn r_max(&self, field: &HeatField, t: f64) -> f64 {
        let l = field.scheme().domain_radius;
        let gaussian = (4.0 * t.sqrt()).min(0.5 * l);
        match self {
            ScanWindow::Auto if field.boundary() == BoundaryCondition::WholeSpace => gaussian,
            ScanWindow::Auto => l,
            ScanWindow::Gaussian => gaussian,
            ScanWindow::Ball { margin } => l - margin,
        }
    }
}

/// Interior grid points `(i, j)` covered by a scan on `field`.
fn scan_points(field: &HeatField, window: ScanWindow) -> Vec<(usize, usize)> {
    let t_count = field.times().len();
    let m = field.nodes().len() - 1;
    let mut pts = Vec::new();
    for j in 1..t_count - 1 {
        let r_max = window.r_max(field, field.times()[j]);
        for i in 0..m.min(field.last_interior() + 1) {
            if field.nodes()[i] > r_max + 1e-12 {
                break;
            }
            pts.push((i, j));
        }
    }
    pts
}

/// Minimum/maximum of a quantity over a field, as reported to users.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiYauReport {
    pub quantity: LiYauQuantity,
    pub min: f64,
    /// `(r, t)` of the minimum.
    pub argmin: [f64; 2],
    pub max: f64,
    pub argmax: [f64; 2],
    /// Volume-weighted mean over the scan window.
    pub mean: f64,
    pub tol_pde: f64,
    pub evaluated_points: usize,
    pub fallback_steps: usize,
    pub caveats: Vec<String>,
}

impl LiYauReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// The sign condition at tolerance: `min ≥ −tol` for the Li–Yau quantity,
    /// `max ≤ tol` for `G`.
    pub fn passes(&self) -> bool {
        match self.quantity {
            LiYauQuantity::LiYau => self.min >= -self.tol_pde,
            LiYauQuantity::LiYauG => self.max <= self.tol_pde,
        }
    }
}

fn caveats_for(field: &HeatField) -> Vec<String> {
    let mut c = Vec::new();
    match field.boundary() {
        BoundaryCondition::Dirichlet => {
            c.push("dirichlet boundary: the estimate is stated for complete or convex-Neumann domains".into())
        }
        BoundaryCondition::Neumann => c.push("neumann ball: relies on convexity of the ball".into()),
        BoundaryCondition::WholeSpace => {
            c.push(format!("whole space truncated at L = {} with a neumann far field", field.scheme().domain_radius))
        }
    }
    if field.scheme().fallback_steps > 0 {
        c.push(format!("{} backward-euler fallback steps", field.scheme().fallback_steps));
    }
    c
}

/// Scan `quantity` over the interior grid of a single field. `tol_pde` is
/// supplied by the caller (see [`li_yau_refinement`]).
pub fn li_yau_scan(
    field: &HeatField,
    quantity: LiYauQuantity,
    window: ScanWindow,
    tol_pde: f64,
) -> Result<LiYauReport> {
    let pts = scan_points(field, window);
    if pts.is_empty() {
        return Err(LabError::InvalidGrid("scan window contains no interior space-time points".into()));
    }
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut argmin, mut argmax) = ([0.0; 2], [0.0; 2]);
    let (mut acc, mut weight) = (0.0, 0.0);
    for &(i, j) in &pts {
        let q = quantity.at(field, i, j)?;
        let at = [field.nodes()[i], field.times()[j]];
        if q < min {
            min = q;
            argmin = at;
        }
        if q > max {
            max = q;
            argmax = at;
        }
        let w = field.cell_volume(i);
        acc += w * q;
        weight += w;
    }
    Ok(LiYauReport {
        quantity,
        min,
        argmin,
        max,
        argmax,
        mean: acc / weight,
        tol_pde,
        evaluated_points: pts.len(),
        fallback_steps: field.scheme().fallback_steps,
        caveats: caveats_for(field),
    })
}

/// Three-level refinement study of a quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiYauRefinement {
    /// `(h, Δt)` per level, coarse to fine.
    pub steps: Vec<[f64; 2]>,
    /// `max |Q_k − Q_{k+1}|` on the coarse points, for consecutive levels.
    pub differences: Vec<f64>,
    /// Observed convergence order from the two differences.
    pub observed_order: Option<f64>,
    /// `differences[k] / (h_k² + Δt_k²)`; stable when the scheme is in its asymptotic regime.
    pub fitted_constants: Vec<f64>,
    /// Report on the finest field with `tol_pde = differences.last()`.
    pub finest: LiYauReport,
    /// Report on the middle field with `tol_pde = differences[0]`.
    pub middle: LiYauReport,
}

impl LiYauRefinement {
    pub fn shrink_factor(&self) -> f64 {
        self.differences[0] / self.differences[1]
    }
}

/// Solve `problem` at `(h, Δt)`, `/2`, `/4` and certify `tol_pde` from the
/// differences of the quantity on shared grid points.
pub fn li_yau_refinement(
    problem: &HeatProblem,
    quantity: LiYauQuantity,
    window: ScanWindow,
) -> Result<LiYauRefinement> {
    let fields: Vec<HeatField> =
        [1, 2, 4].iter().map(|&k| heat_solve_radial(&problem.refined(k))).collect::<Result<_>>()?;
    li_yau_refinement_from(&fields, quantity, window)
}

/// As [`li_yau_refinement`] on already-solved fields refined by 2 at each level.
pub fn li_yau_refinement_from(
    fields: &[HeatField],
    quantity: LiYauQuantity,
    window: ScanWindow,
) -> Result<LiYauRefinement> {
    if fields.len() != 3 {
        return Err(LabError::InvalidParameter("refinement needs exactly three fields".into()));
    }
    let coarse_pts = scan_points(&fields[0], window);
    let mut differences = Vec::new();
    for level in 0..2 {
        let (a, b) = (&fields[level], &fields[level + 1]);
        let mut diff = 0.0f64;
        for &(i, j) in &coarse_pts {
            let s_a = 1 << level;
            let s_b = 2 << level;
            diff = diff.max((quantity.at(a, i * s_a, j * s_a)? - quantity.at(b, i * s_b, j * s_b)?).abs());
        }
        differences.push(diff);
    }
    let steps: Vec<[f64; 2]> = fields.iter().map(|f| [f.scheme().h, f.scheme().dt]).collect();
    let fitted_constants = (0..2).map(|k| differences[k] / (steps[k][0].powi(2) + steps[k][1].powi(2))).collect();
    let observed = (differences[1] > 0.0).then(|| (differences[0] / differences[1]).log2());
    let middle = li_yau_scan(&fields[1], quantity, window, differences[0])?;
    let finest = li_yau_scan(&fields[2], quantity, window, differences[1])?;
    Ok(LiYauRefinement { steps, differences, observed_order: observed, fitted_constants, finest, middle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WarpingProfile;
    use crate::parabolic::kernel::{ConstantSolution, EuclideanKernel};
    use crate::parabolic::solver::InitialData;

    #[test]
    fn constant_solution_quantities() {
        let c = ConstantSolution { n: 3, c: 1.0 };
        assert_eq!(li_yau_quantity(&c, 0.3, 2.0).unwrap(), 0.75);
        assert_eq!(li_yau_g_quantity(&c, 0.3, 2.0).unwrap(), -1.5);
    }

    #[test]
    fn kernel_is_the_equality_case() {
        for n in 1..=4 {
            let k = EuclideanKernel { n, mass: 2.5 };
            for &(r, t) in &[(0.0, 0.1), (1.3, 0.2), (4.0, 3.0)] {
                assert!(li_yau_quantity(&k, r, t).unwrap().abs() < 1e-12);
                assert!(li_yau_g_quantity(&k, r, t).unwrap().abs() < 1e-12);
            }
        }
    }

    fn ripple_on_sphere() -> HeatProblem {
        HeatProblem {
            profile: WarpingProfile::sphere(1.0).unwrap(),
            n: 2,
            radius: 1.0,
            boundary: BoundaryCondition::Neumann,
            initial: InitialData::CosineRipple { amplitude: 0.5 },
            t_start: 0.05,
            t_end: 0.5,
            steps: 45,
            intervals: 64,
            time_origin: None,
        }
    }

    #[test]
    fn field_quantity_rejects_end_times() {
        let f = heat_solve_radial(&ripple_on_sphere()).unwrap();
        let (t0, t1) = (f.times()[0], *f.times().last().unwrap());
        assert!(li_yau_quantity(&f, 0.0, t0).is_err());
        assert!(li_yau_quantity(&f, 0.0, t1).is_err());
        assert!(li_yau_quantity(&f, 0.0, f.times()[3]).is_ok());
    }

    #[test]
    fn sphere_neumann_field_satisfies_the_estimate_with_margin() {
        let p = ripple_on_sphere();
        let ly = li_yau_refinement(&p, LiYauQuantity::LiYau, ScanWindow::default()).unwrap();
        assert!(ly.finest.passes(), "{:?}", ly.finest);
        let g = li_yau_refinement(&p, LiYauQuantity::LiYauG, ScanWindow::default()).unwrap();
        assert!(g.finest.max < -g.finest.tol_pde, "{:?}", g.finest);
    }

    #[test]
    fn whole_space_kernel_tolerance_shrinks_at_second_order() {
        let p = HeatProblem {
            profile: WarpingProfile::euclidean(),
            n: 2,
            radius: 1.0,
            boundary: BoundaryCondition::WholeSpace,
            initial: InitialData::HeatKernel { mass: 1.0 },
            t_start: 0.1,
            t_end: 0.5,
            steps: 40,
            intervals: 128,
            time_origin: None,
        };
        let ly = li_yau_refinement(&p, LiYauQuantity::LiYau, ScanWindow::default()).unwrap();
        assert!(ly.finest.passes(), "{:?}", ly.finest);
        let order = ly.observed_order.unwrap();
        assert!((order - 2.0).abs() < 0.3, "{ly:?}");
    }

    #[test]
    fn kernel_profile_on_sphere_converges_at_second_order() {
        let p = HeatProblem {
            profile: WarpingProfile::sphere(1.0).unwrap(),
            n: 2,
            radius: 1.5,
            boundary: BoundaryCondition::Neumann,
            initial: InitialData::HeatKernel { mass: 1.0 },
            t_start: 0.01,
            t_end: 0.035,
            steps: 25,
            intervals: 96,
            time_origin: None,
        };
        for q in [LiYauQuantity::LiYau, LiYauQuantity::LiYauG] {
            let r = li_yau_refinement(&p, q, ScanWindow::Gaussian).unwrap();
            assert!((r.observed_order.unwrap() - 2.0).abs() < 0.1, "{r:?}");
            assert!(r.finest.passes());
        }
    }
}
