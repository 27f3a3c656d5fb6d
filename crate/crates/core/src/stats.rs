//! Small fitting helpers for convergence and scaling studies.

/// Least-squares slope and intercept of `ln y` against `ln x`.
///
/// Returns `None` with fewer than two usable (positive, finite) pairs.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Observed order `log₂(|q_h − q_{h/2}| / |q_{h/2} − q_{h/4}|)` from three
/// successive halvings.
pub fn observed_order(coarse: f64, mid: f64, fine: f64) -> f64 {
    ((coarse - mid).abs() / (mid - fine).abs()).log2()
}

/// Direction of a sequence: `Some(true)` nondecreasing, `Some(false)`
/// nonincreasing, `None` otherwise. `slack` absorbs roundoff.
pub fn monotone_direction(values: &[f64], slack: f64) -> Option<bool> {
    let up = values.windows(2).all(|w| w[1] >= w[0] - slack);
    let down = values.windows(2).all(|w| w[1] <= w[0] + slack);
    match (up, down) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        (true, true) => Some(true),
        _ => None,
    }
}
