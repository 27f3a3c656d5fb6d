use serde::Serialize;

use crate::format::{csv_line, num, to_json};

/// One named scalar deficit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficitEntry {
    pub id: String,
    /// Pointwise supremum over the evaluation set.
    pub sup: f64,
    /// Coordinates of the supremum (`[r]` or `[r, θ]`).
    pub sup_at: Vec<f64>,
    /// Volume average; `NaN` when not defined for the quantity.
    pub mean: f64,
    /// Points where the inequality fails beyond `tol`.
    pub violations: usize,
    pub tol: f64,
}

impl DeficitEntry {
    /// Scan `(location, value)` samples for their supremum.
    pub fn from_samples<I>(id: &str, samples: I, mean: f64, tol: f64, violated: impl Fn(f64) -> bool) -> Self
    where
        I: IntoIterator<Item = (Vec<f64>, f64)>,
    {
        let mut sup = f64::NEG_INFINITY;
        let mut sup_at = Vec::new();
        let mut violations = 0;
        for (at, v) in samples {
            if violated(v) {
                violations += 1;
            }
            if v > sup || sup_at.is_empty() {
                sup = v;
                sup_at = at;
            }
        }
        if sup_at.is_empty() {
            sup = f64::NAN;
        }
        Self { id: id.to_string(), sup, sup_at, mean, violations, tol }
    }

    pub fn is_finite(&self) -> bool {
        self.sup.is_finite() && (self.mean.is_finite() || self.mean.is_nan())
    }
}

/// Named scalar deficits together with the tolerances used.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DeficitReport {
    pub entries: Vec<DeficitEntry>,
}

impl DeficitReport {
    pub fn new(entries: Vec<DeficitEntry>) -> Self {
        Self { entries }
    }

    pub fn get(&self, id: &str) -> Option<&DeficitEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn total_violations(&self) -> usize {
        self.entries.iter().map(|e| e.violations).sum()
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Header plus one row per entry; `sup_at` coordinates joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(["id", "sup", "sup_at", "mean", "violations", "tol"]);
        for e in &self.entries {
            let at = e.sup_at.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";");
            out.push_str(&csv_line([e.id.clone(), num(e.sup), at, num(e.mean), e.violations.to_string(), num(e.tol)]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_and_violations() {
        let samples = vec![(vec![0.1], 0.5), (vec![0.2], 2.0), (vec![0.3], 1.5)];
        let e = DeficitEntry::from_samples("q", samples, 1.0, 1e-9, |v| v > 1.0 + 1e-9);
        assert_eq!(e.sup, 2.0);
        assert_eq!(e.sup_at, vec![0.2]);
        assert_eq!(e.violations, 2);
        let r = DeficitReport::new(vec![e]);
        let csv = r.to_csv();
        assert!(csv.starts_with("id,sup,sup_at,mean,violations,tol\n"));
        assert!(csv.contains("q,2.00000000000e0,2.00000000000e-1,1.00000000000e0,2,"));
        let json = r.to_json();
        for key in ["\"id\"", "\"sup\"", "\"sup_at\"", "\"mean\"", "\"violations\"", "\"tol\""] {
            assert!(json.contains(key));
        }
    }

    #[test]
    fn empty_sample_set_is_vacuous() {
        let e = DeficitEntry::from_samples("none", Vec::new(), f64::NAN, 0.0, |_| true);
        assert!(e.sup.is_nan());
        assert_eq!(e.violations, 0);
    }
}
