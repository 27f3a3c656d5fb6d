//! Quadrature rules used across the lab.
//!
//! Two families live here: an adaptive Gauss–Kronrod (7/15) integrator for
//! integrals with steep or integrable-singular endpoints (Green's functions,
//! volumes), and composite Simpson weights on arbitrary radial grids for
//! volume averages of sampled quantities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{LabError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 4000 }
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate meets `max(abs_tol, rel_tol * |I|)`. Endpoints are never
/// evaluated, so integrable endpoint singularities are admissible.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(LabError::InvalidParameter(format!("integration bounds must be finite: [{a}, {b}]")));
    }
    let (sign, lo, hi) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };

    let (v, e) = gauss_kronrod(&f, lo, hi);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a: lo, b: hi, value: v, error: e });
    let mut total = v;
    let mut total_err = e;

    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(LabError::Nonconvergence {
                what: format!("adaptive quadrature on [{lo}, {hi}]"),
                achieved: total_err,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at roundoff width; its error cannot be reduced further
            heap.push(worst);
            let achieved = total_err;
            if achieved <= 1e3 * target {
                break;
            }
            return Err(LabError::Nonconvergence {
                what: format!("adaptive quadrature on [{lo}, {hi}] (roundoff limit)"),
                achieved,
            });
        }
        let (v1, e1) = gauss_kronrod(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        if !total.is_finite() {
            return Err(LabError::Nonconvergence {
                what: format!("adaptive quadrature on [{lo}, {hi}] (non-finite integrand)"),
                achieved: f64::INFINITY,
            });
        }
    }
    // re-sum to limit drift from the running updates
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(Integral { value: sign * value, error, evaluations })
}

/// Integral over `[lo, hi]` of the quadratic Lagrange basis through `x`,
/// computed with two-point Gauss–Legendre (exact for cubics).
fn quadratic_basis_integrals(x: [f64; 3], lo: f64, hi: f64) -> [f64; 3] {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let g = 1.0 / 3f64.sqrt();
    let mut w = [0.0; 3];
    for t in [c - h * g, c + h * g] {
        for (j, wj) in w.iter_mut().enumerate() {
            let mut l = 1.0;
            for (m, xm) in x.iter().enumerate() {
                if m != j {
                    l *= (t - xm) / (x[j] - xm);
                }
            }
            *wj += h * l;
        }
    }
    w
}

/// Composite Simpson weights on an arbitrary strictly increasing node set.
///
/// Pairs of intervals use the nonuniform three-point rule. With an odd
/// number of intervals the last one integrates the quadratic through the
/// final three nodes. Needs at least two nodes.
pub fn simpson_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    if n == 2 {
        let h = nodes[1] - nodes[0];
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let intervals = n - 1;
    let paired = intervals - intervals % 2;
    let mut i = 0;
    while i < paired {
        let x = [nodes[i], nodes[i + 1], nodes[i + 2]];
        let b = quadratic_basis_integrals(x, x[0], x[2]);
        for j in 0..3 {
            w[i + j] += b[j];
        }
        i += 2;
    }
    if intervals % 2 == 1 {
        let x = [nodes[n - 3], nodes[n - 2], nodes[n - 1]];
        let b = quadratic_basis_integrals(x, x[1], x[2]);
        for j in 0..3 {
            w[n - 3 + j] += b[j];
        }
    }
    w
}

/// Trapezoid weights, used where the integrand is only piecewise smooth.
pub fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = nodes[i + 1] - nodes[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}
