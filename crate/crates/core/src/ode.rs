//! Implicit Runge–Kutta integration for small stiff systems.
//!
//! Three-stage Radau IIA (order 5, L-stable) with full Newton iterations on
//! the stage equations and step-doubling error control. The integrator lands
//! exactly on every requested output abscissa.

use crate::error::{LabError, Result};

/// A stiff system `y' = F(t, y)` with an analytic Jacobian.
pub trait StiffSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
    fn jacobian(&self, t: f64, y: &[f64; N]) -> [[f64; N]; N];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadauOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for RadauOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-14, initial_step: 1e-6, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RadauStats {
    pub accepted: usize,
    pub rejected: usize,
}

const SQ6: f64 = 2.449_489_742_783_178;

fn tableau() -> ([f64; 3], [[f64; 3]; 3]) {
    let c = [(4.0 - SQ6) / 10.0, (4.0 + SQ6) / 10.0, 1.0];
    let a = [
        [(88.0 - 7.0 * SQ6) / 360.0, (296.0 - 169.0 * SQ6) / 1800.0, (-2.0 + 3.0 * SQ6) / 225.0],
        [(296.0 + 169.0 * SQ6) / 1800.0, (88.0 + 7.0 * SQ6) / 360.0, (-2.0 - 3.0 * SQ6) / 225.0],
        [(16.0 - SQ6) / 36.0, (16.0 + SQ6) / 36.0, 1.0 / 9.0],
    ];
    (c, a)
}

/// Dense Gaussian elimination with partial pivoting; `a` is row-major `n×n`.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<()> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col] == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        for row in col + 1..n {
            let m = a[row * n + col] / a[col * n + col];
            if m != 0.0 {
                for k in col..n {
                    a[row * n + k] -= m * a[col * n + k];
                }
                b[row] -= m * b[col];
            }
        }
    }
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row * n + k] * b[k];
        }
        b[row] = s / a[row * n + row];
    }
    Some(())
}

/// One Radau IIA step; `None` when Newton fails to converge.
fn radau_step<const N: usize, S: StiffSystem<N>>(sys: &S, t: f64, y: &[f64; N], h: f64) -> Option<[f64; N]> {
    let (c, a) = tableau();
    let dim = 3 * N;
    // stage increments z_i = Y_i - y
    let mut z = vec![0.0; dim];
    let f0 = sys.rhs(t, y);
    for i in 0..3 {
        for k in 0..N {
            z[i * N + k] = c[i] * h * f0[k];
        }
    }
    let scale: f64 = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for _iter in 0..12 {
        let mut stage_f = [[0.0; N]; 3];
        let mut stage_j = [[[0.0; N]; N]; 3];
        for i in 0..3 {
            let mut yi = *y;
            for k in 0..N {
                yi[k] += z[i * N + k];
            }
            stage_f[i] = sys.rhs(t + c[i] * h, &yi);
            stage_j[i] = sys.jacobian(t + c[i] * h, &yi);
        }
        // residual G(z) = z - h A F(Y)
        let mut res = vec![0.0; dim];
        let mut jac = vec![0.0; dim * dim];
        for i in 0..3 {
            for k in 0..N {
                let mut s = z[i * N + k];
                for j in 0..3 {
                    s -= h * a[i][j] * stage_f[j][k];
                }
                res[i * N + k] = -s;
            }
            for j in 0..3 {
                for k in 0..N {
                    for l in 0..N {
                        let row = i * N + k;
                        let col = j * N + l;
                        let mut v = -h * a[i][j] * stage_j[j][k][l];
                        if row == col {
                            v += 1.0;
                        }
                        jac[row * dim + col] = v;
                    }
                }
            }
        }
        solve_dense(&mut jac, &mut res, dim)?;
        let mut step_norm = 0.0f64;
        for (zi, di) in z.iter_mut().zip(&res) {
            *zi += di;
            step_norm = step_norm.max(di.abs());
        }
        if !step_norm.is_finite() {
            return None;
        }
        if step_norm <= 1e-15 * scale {
            let mut out = *y;
            for k in 0..N {
                out[k] += z[2 * N + k];
            }
            return Some(out);
        }
    }
    None
}

/// Integrate from `(t0, y0)` through the increasing abscissae `outputs`,
/// returning the state at each of them.
pub fn integrate_radau<const N: usize, S: StiffSystem<N>>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    outputs: &[f64],
    opts: RadauOptions,
) -> Result<(Vec<[f64; N]>, RadauStats)> {
    let mut stats = RadauStats::default();
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.initial_step;
    let mut out = Vec::with_capacity(outputs.len());
    for &target in outputs {
        if target < t {
            return Err(LabError::InvalidParameter(format!("output abscissa {target} precedes the current point {t}")));
        }
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(LabError::Nonconvergence {
                    what: format!("Radau IIA integration (stalled at t = {t})"),
                    achieved: h,
                });
            }
            let remaining = target - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let step = if last { remaining } else { h };

            let full = radau_step(sys, t, &y, step);
            let half1 = radau_step(sys, t, &y, 0.5 * step);
            let half2 = half1.and_then(|m| radau_step(sys, t + 0.5 * step, &m, 0.5 * step));
            let (Some(full), Some(fine)) = (full, half2) else {
                stats.rejected += 1;
                h = 0.25 * step;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(LabError::Nonconvergence {
                        what: format!("Radau IIA Newton iteration at t = {t}"),
                        achieved: h,
                    });
                }
                continue;
            };
            let mut err = 0.0f64;
            for k in 0..N {
                let tol = opts.abs_tol + opts.rel_tol * y[k].abs().max(fine[k].abs());
                err = err.max((fine[k] - full[k]).abs() / 31.0 / tol);
            }
            let factor = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-1.0 / 6.0)).clamp(0.2, 4.0) };
            if err <= 1.0 {
                stats.accepted += 1;
                t = if last { target } else { t + step };
                y = fine;
                if !last || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                stats.rejected += 1;
                h = step * factor.min(0.9);
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}
