use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub label: String,
    pub linf: f64,
    pub l2: f64,
}

/// Errors on a refinement sequence and the observed orders between levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub label: String,
    pub spacings: Vec<f64>,
    pub errors: Vec<f64>,
    /// `orders[i]` compares levels `i` and `i + 1`; `None` when either error
    /// is exactly zero.
    pub orders: Vec<Option<f64>>,
    pub monotone: bool,
}

impl ConvergenceTable {
    pub fn new(label: &str, spacings: Vec<f64>, errors: Vec<f64>) -> Result<Self> {
        if spacings.len() != errors.len() {
            return Err(Error::Invalid(format!(
                "{} spacings for {} errors",
                spacings.len(),
                errors.len()
            )));
        }
        if spacings.len() < 3 {
            return Err(Error::Invalid(format!(
                "convergence order needs at least 3 levels, got {}",
                spacings.len()
            )));
        }
        let orders = spacings
            .windows(2)
            .zip(errors.windows(2))
            .map(|(h, e)| {
                if e[0] > 0.0 && e[1] > 0.0 {
                    Some((e[0] / e[1]).ln() / (h[0] / h[1]).ln())
                } else {
                    None
                }
            })
            .collect();
        let monotone = errors.windows(2).all(|e| e[1] <= e[0]);
        Ok(ConvergenceTable {
            label: label.to_string(),
            spacings,
            errors,
            orders,
            monotone,
        })
    }

    /// Order between the two finest levels.
    pub fn finest_order(&self) -> Option<f64> {
        self.orders.last().copied().flatten()
    }

    pub fn finest_error(&self) -> f64 {
        *self.errors.last().unwrap_or(&f64::NAN)
    }
}

/// Residual norms per equation plus optional refinement studies.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
    pub warnings: Vec<String>,
    pub convergence: Vec<ConvergenceTable>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, label: &str, norms: (f64, f64)) {
        self.entries.push(ResidualEntry {
            label: label.to_string(),
            linf: norms.0,
            l2: norms.1,
        });
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        log::warn!("{msg}");
        self.warnings.push(msg);
    }

    pub fn get(&self, label: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    /// Largest L∞ over all entries.
    pub fn max_linf(&self) -> f64 {
        self.entries.iter().map(|e| e.linf).fold(0.0, f64::max)
    }

    pub fn merge(&mut self, prefix: &str, other: ResidualReport) {
        for mut e in other.entries {
            e.label = format!("{prefix}{}", e.label);
            self.entries.push(e);
        }
        self.warnings.extend(other.warnings);
        self.convergence.extend(other.convergence);
    }

    /// Plain-text table.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let w = self.entries.iter().map(|e| e.label.len()).max().unwrap_or(5).max(5);
        let _ = writeln!(s, "{:<w$}  {:>12}  {:>12}", "label", "linf", "l2");
        for e in &self.entries {
            let _ = writeln!(s, "{:<w$}  {:>12.4e}  {:>12.4e}", e.label, e.linf, e.l2);
        }
        for t in &self.convergence {
            let _ = writeln!(s, "convergence: {}", t.label);
            for (i, (h, e)) in t.spacings.iter().zip(&t.errors).enumerate() {
                let ord = match i.checked_sub(1).map(|j| t.orders[j]) {
                    None => String::new(),
                    Some(Some(p)) => format!("{p:.3}"),
                    Some(None) => "NA".to_string(),
                };
                let _ = writeln!(s, "  h={h:<12.5e} err={e:<12.5e} order={ord}");
            }
            if !t.monotone {
                let _ = writeln!(s, "  (non-monotone)");
            }
        }
        for wmsg in &self.warnings {
            let _ = writeln!(s, "warning: {wmsg}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn needs_three_levels() {
        assert!(ConvergenceTable::new("a", vec![0.1, 0.05], vec![1.0, 0.25]).is_err());
    }

    #[test]
    fn second_order_sequence() {
        let t = ConvergenceTable::new("a", vec![0.4, 0.2, 0.1], vec![1.6, 0.4, 0.1]).unwrap();
        for o in &t.orders {
            assert!((o.unwrap() - 2.0).abs() < 1e-12);
        }
        assert!(t.monotone);
    }

    #[test]
    fn zero_errors_and_non_monotone() {
        let t = ConvergenceTable::new("z", vec![0.4, 0.2, 0.1], vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(t.orders, vec![None, None]);
        let t = ConvergenceTable::new("n", vec![0.4, 0.2, 0.1], vec![1.0, 2.0, 0.5]).unwrap();
        assert!(!t.monotone);
        assert!(t.render_contains_flag());
    }

    impl ConvergenceTable {
        fn render_contains_flag(&self) -> bool {
            let r = ResidualReport {
                convergence: vec![self.clone()],
                ..Default::default()
            };
            r.render().contains("non-monotone")
        }
    }
}
