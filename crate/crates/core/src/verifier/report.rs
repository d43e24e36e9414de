use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The search found nothing conclusive; never counts as a pass.
    Inconclusive,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// One signed quantity of a check. It passes when `margin <= tolerance`;
/// `value` is the raw number the margin was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub margin: f64,
    pub tolerance: f64,
}

impl Metric {
    pub fn new(name: impl Into<String>, value: f64, margin: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            margin,
            tolerance,
        }
    }

    /// `value <= bound + tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, value, value - bound, tolerance)
    }

    /// `value >= bound - tolerance`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, value, bound - value, tolerance)
    }

    pub fn passes(&self) -> bool {
        self.margin <= self.tolerance
    }
}

/// The configuration behind the worst margin of a check.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    pub points: Vec<Point>,
    pub params: BTreeMap<String, f64>,
}

impl Witness {
    pub fn new(description: impl Into<String>, points: Vec<Point>) -> Self {
        Self {
            description: description.into(),
            points,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

/// One row of the per-configuration margin table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginRecord {
    pub check: String,
    pub case: String,
    pub source: Point,
    pub target: Point,
    pub t: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Verdict,
    /// Margin of the metric closest to (or furthest past) its tolerance.
    pub worst_margin: f64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
    pub grid: BTreeMap<String, f64>,
    pub metrics: Vec<Metric>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub records: Vec<MarginRecord>,
}

impl CheckReport {
    /// Verdict is pass iff every metric passes; the headline metric is the
    /// one with the largest `margin - tolerance`.
    pub fn from_metrics(name: impl Into<String>, metrics: Vec<Metric>) -> Self {
        let headline = metrics
            .iter()
            .max_by(|a, b| (a.margin - a.tolerance).total_cmp(&(b.margin - b.tolerance)));
        let (worst_margin, tolerance) = headline.map_or((f64::NEG_INFINITY, 0.0), |m| (m.margin, m.tolerance));
        let pass = !metrics.is_empty() && metrics.iter().all(Metric::passes);
        Self {
            name: name.into(),
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            worst_margin,
            tolerance,
            witness: None,
            grid: BTreeMap::new(),
            metrics,
            notes: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_grid(mut self, key: &str, value: f64) -> Self {
        self.grid.insert(key.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_records(mut self, records: Vec<MarginRecord>) -> Self {
        self.records = records;
        self
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_worst_metric() {
        let r = CheckReport::from_metrics(
            "demo",
            vec![
                Metric::at_most("a", 0.5, 1.0, 0.0),
                Metric::at_least("b", 2.0, 2.1, 0.2),
            ],
        );
        assert!(r.passed());
        assert!((r.worst_margin - 0.1).abs() < 1e-12);
        let r = CheckReport::from_metrics("demo", vec![Metric::at_most("a", 1.5, 1.0, 0.1)]);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!CheckReport::from_metrics("empty", vec![]).passed());
    }
}
