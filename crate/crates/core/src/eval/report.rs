use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::models::LearningCurve;

/// Loss label of the rows computed on the raw training data.
pub const BASELINE: &str = "baseline";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReportKey {
    pub run: usize,
    pub epochs: usize,
    pub loss: String,
    pub metric: String,
}

/// One `(epochs, loss, metric)` cell across runs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub epochs: usize,
    pub loss: String,
    pub metric: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub run: usize,
    pub loss: String,
    pub epochs: usize,
    pub curve: LearningCurve,
    /// Training frequency of each encoded feature, `None` for numeric ones.
    pub frequencies: Vec<Option<f64>>,
}

/// Long-format metric table. Rows are keyed, so runs can be merged in any
/// order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    rows: BTreeMap<ReportKey, f64>,
    pub curves: Vec<CurveRecord>,
}

impl ExperimentReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, run: usize, epochs: usize, loss: &str, metric: &str, value: f64) -> Result<()> {
        let key = ReportKey {
            run,
            epochs,
            loss: loss.into(),
            metric: metric.into(),
        };
        if self.rows.contains_key(&key) {
            return Err(Error::InvalidConfig(format!(
                "duplicate report cell run {run}, epochs {epochs}, loss {loss}, metric {metric}"
            )));
        }
        self.rows.insert(key, value);
        Ok(())
    }

    pub fn merge(&mut self, other: ExperimentReport) -> Result<()> {
        for (k, v) in other.rows {
            self.insert(k.run, k.epochs, &k.loss, &k.metric, v)?;
        }
        self.curves.extend(other.curves);
        self.curves.sort_by(|a, b| (a.run, &a.loss, a.epochs).cmp(&(b.run, &b.loss, b.epochs)));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&ReportKey, f64)> {
        self.rows.iter().map(|(k, v)| (k, *v))
    }

    pub fn get(&self, run: usize, epochs: usize, loss: &str, metric: &str) -> Option<f64> {
        self.rows
            .get(&ReportKey {
                run,
                epochs,
                loss: loss.into(),
                metric: metric.into(),
            })
            .copied()
    }

    /// Values of one cell in run order.
    pub fn values(&self, epochs: usize, loss: &str, metric: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|(k, _)| k.epochs == epochs && k.loss == loss && k.metric == metric)
            .map(|(_, v)| *v)
            .collect()
    }

    pub fn median(&self, epochs: usize, loss: &str, metric: &str) -> Option<f64> {
        median(&self.values(epochs, loss, metric))
    }

    pub fn aggregates(&self) -> BTreeMap<CellKey, Aggregate> {
        let mut cells: BTreeMap<CellKey, Vec<f64>> = BTreeMap::new();
        for (k, v) in &self.rows {
            cells
                .entry(CellKey {
                    epochs: k.epochs,
                    loss: k.loss.clone(),
                    metric: k.metric.clone(),
                })
                .or_default()
                .push(*v);
        }
        cells.into_iter().map(|(k, v)| (k, aggregate(&v))).collect()
    }
}

pub fn aggregate(values: &[f64]) -> Aggregate {
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let std = if count > 1 {
        libm::sqrt(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64)
    } else {
        0.0
    };
    Aggregate { mean, std, count }
}

/// Midpoint median; `None` for an empty slice.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregates_match_rows() {
        let mut r = ExperimentReport::new();
        r.insert(0, 10, "standard", "msem", 1.0).unwrap();
        r.insert(1, 10, "standard", "msem", 3.0).unwrap();
        r.insert(0, 10, "balanced", "msem", 2.0).unwrap();
        assert!(r.insert(0, 10, "balanced", "msem", 2.0).is_err());
        let a = r.aggregates();
        let cell = a[&CellKey {
            epochs: 10,
            loss: "standard".into(),
            metric: "msem".into(),
        }];
        assert_eq!((cell.mean, cell.count), (2.0, 2));
        assert!((cell.std - libm::sqrt(2.0)).abs() < 1e-15);
        assert_eq!(r.median(10, "standard", "msem"), Some(2.0));
    }

    #[test]
    fn merge_is_order_insensitive() {
        let mut a = ExperimentReport::new();
        a.insert(0, 1, "x", "m", 0.5).unwrap();
        let mut b = ExperimentReport::new();
        b.insert(1, 1, "x", "m", 0.7).unwrap();
        let mut ab = a.clone();
        ab.merge(b.clone()).unwrap();
        let mut ba = b;
        ba.merge(a).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
