use alloc::format;
use alloc::vec::Vec;

use super::schema::{ColumnKind, Schema};
use crate::error::{Error, Result};
use crate::rng::SeedRng;

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    /// Category indices into the schema's category list.
    Categorical(Vec<usize>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn select(&self, rows: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&i| v[i]).collect()),
            ColumnData::Categorical(v) => ColumnData::Categorical(rows.iter().map(|&i| v[i]).collect()),
        }
    }
}

/// Column-oriented table. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    n: usize,
    columns: Vec<ColumnData>,
    target: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(schema: Schema, columns: Vec<ColumnData>, target: Option<Vec<f64>>) -> Result<Self> {
        if columns.len() != schema.len() {
            return Err(Error::Shape(format!(
                "{} columns supplied for a schema of {}",
                columns.len(),
                schema.len()
            )));
        }
        let n = columns
            .first()
            .map(ColumnData::len)
            .or_else(|| target.as_ref().map(Vec::len))
            .unwrap_or(0);
        for (col, data) in schema.columns().iter().zip(&columns) {
            if data.len() != n {
                return Err(Error::Shape(format!(
                    "column `{}` has {} rows, expected {n}",
                    col.name,
                    data.len()
                )));
            }
            match (&col.kind, data) {
                (ColumnKind::Numeric, ColumnData::Numeric(_)) => {}
                (ColumnKind::Categorical { categories }, ColumnData::Categorical(idx)) => {
                    if let Some(bad) = idx.iter().find(|&&k| k >= categories.len()) {
                        return Err(Error::Shape(format!(
                            "category index {bad} out of range for column `{}`",
                            col.name
                        )));
                    }
                }
                _ => {
                    return Err(Error::SchemaMismatch(format!(
                        "column `{}` data kind does not match its schema",
                        col.name
                    )))
                }
            }
        }
        match (schema.target(), &target) {
            (Some(_), Some(t)) if t.len() != n => {
                return Err(Error::Shape(format!("target has {} rows, expected {n}", t.len())))
            }
            (Some(_), None) | (None, Some(_)) => {
                return Err(Error::SchemaMismatch(
                    "target presence differs between schema and data".into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            schema,
            n,
            columns,
            target,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of feature variables.
    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[ColumnData] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &ColumnData {
        &self.columns[j]
    }

    pub fn numeric(&self, j: usize) -> Option<&[f64]> {
        match &self.columns[j] {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Categorical(_) => None,
        }
    }

    pub fn categorical(&self, j: usize) -> Option<&[usize]> {
        match &self.columns[j] {
            ColumnData::Categorical(v) => Some(v),
            ColumnData::Numeric(_) => None,
        }
    }

    pub fn target(&self) -> Option<&[f64]> {
        self.target.as_deref()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            n: rows.len(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            target: self.target.as_ref().map(|t| rows.iter().map(|&i| t[i]).collect()),
        }
    }

    pub fn without_target(&self) -> Dataset {
        Dataset {
            schema: self.schema.features_only(),
            n: self.n,
            columns: self.columns.clone(),
            target: None,
        }
    }

    pub fn with_target(&self, name: &str, values: Vec<f64>) -> Result<Dataset> {
        let schema = self.schema.with_target(Some(name.into()))?;
        Dataset::new(schema, self.columns.clone(), Some(values))
    }
}

/// Uniform random partition into `(train, test)` with
/// `round(n * test_fraction)` test rows. Row order inside each part follows
/// the original order.
pub fn split(data: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let n = data.n();
    let out_of_range = Error::FractionOutOfRange {
        fraction: test_fraction,
        n,
    };
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(out_of_range);
    }
    let n_test = libm::round(n as f64 * test_fraction) as usize;
    if n_test == 0 || n_test >= n {
        return Err(out_of_range);
    }
    let mut order: Vec<usize> = (0..n).collect();
    SeedRng::new(seed).shuffle(&mut order);
    let mut test_rows = order[..n_test].to_vec();
    let mut train_rows = order[n_test..].to_vec();
    test_rows.sort_unstable();
    train_rows.sort_unstable();
    Ok((data.select_rows(&train_rows), data.select_rows(&test_rows)))
}
