//! Min-max scaling of numeric columns and one-hot expansion of categorical
//! ones, fitted on a training split.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::dataset::{ColumnData, Dataset};
use super::schema::{ColumnKind, Schema};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// What an encoded column stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSlot {
    Numeric { column: usize },
    Category { column: usize, category: usize },
}

/// Contiguous run of one-hot columns belonging to one categorical variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CategoryGroup {
    pub column: usize,
    pub start: usize,
    pub len: usize,
}

impl CategoryGroup {
    pub fn range(&self) -> core::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderState {
    schema: Schema,
    n: usize,
    /// `(min, max)` for numeric columns, `None` for categorical ones.
    ranges: Vec<Option<(f64, f64)>>,
    /// Per-category counts for categorical columns, empty for numeric ones.
    counts: Vec<Vec<usize>>,
    feature_map: Vec<FeatureSlot>,
    groups: Vec<CategoryGroup>,
    numeric_features: Vec<usize>,
}

impl EncoderState {
    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Row count of the fitting split.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Encoded width: numeric columns plus total category count.
    pub fn width(&self) -> usize {
        self.feature_map.len()
    }

    pub fn feature_map(&self) -> &[FeatureSlot] {
        &self.feature_map
    }

    pub fn groups(&self) -> &[CategoryGroup] {
        &self.groups
    }

    /// Encoded indices of numeric features.
    pub fn numeric_features(&self) -> &[usize] {
        &self.numeric_features
    }

    pub fn range(&self, column: usize) -> Option<(f64, f64)> {
        self.ranges[column]
    }

    pub fn counts(&self, column: usize) -> &[usize] {
        &self.counts[column]
    }

    pub fn frequency(&self, column: usize, category: usize) -> f64 {
        self.counts[column][category] as f64 / self.n as f64
    }

    pub fn is_categorical_feature(&self, j: usize) -> bool {
        matches!(self.feature_map[j], FeatureSlot::Category { .. })
    }

    /// Training frequency of the category behind encoded feature `j`.
    pub fn feature_frequency(&self, j: usize) -> Option<f64> {
        match self.feature_map[j] {
            FeatureSlot::Category { column, category } => Some(self.frequency(column, category)),
            FeatureSlot::Numeric { .. } => None,
        }
    }

    /// `column` for numeric features, `column=category` for one-hot ones.
    pub fn feature_name(&self, j: usize) -> String {
        let cols = self.schema.columns();
        match self.feature_map[j] {
            FeatureSlot::Numeric { column } => cols[column].name.clone(),
            FeatureSlot::Category { column, category } => {
                let cats = cols[column].categories().expect("categorical slot");
                format!("{}={}", cols[column].name, cats[category])
            }
        }
    }

    pub fn feature_names(&self) -> Vec<String> {
        (0..self.width()).map(|j| self.feature_name(j)).collect()
    }

    /// Scales a numeric value of `column` into `[0, 1]`, clipping.
    pub fn scale(&self, column: usize, x: f64) -> f64 {
        let (lo, hi) = self.ranges[column].expect("numeric column");
        ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    pub fn unscale(&self, column: usize, s: f64) -> f64 {
        let (lo, hi) = self.ranges[column].expect("numeric column");
        lo + s * (hi - lo)
    }
}

/// Encoded table, one row per observation and [`EncoderState::width`] columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedMatrix {
    pub values: Matrix,
}

impl EncodedMatrix {
    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }
}

/// Fits scaling ranges and category counts on `train`.
pub fn fit_encoder(train: &Dataset) -> Result<EncoderState> {
    let n = train.n();
    if n < 2 {
        return Err(Error::Shape(format!("encoder needs at least 2 rows, got {n}")));
    }
    let schema = train.schema().features_only();
    let mut ranges = Vec::with_capacity(schema.len());
    let mut counts = Vec::with_capacity(schema.len());
    let mut feature_map = Vec::new();
    let mut groups = Vec::new();
    let mut numeric_features = Vec::new();
    for (j, (col, data)) in schema.columns().iter().zip(train.columns()).enumerate() {
        match (&col.kind, data) {
            (ColumnKind::Numeric, ColumnData::Numeric(v)) => {
                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if hi <= lo {
                    return Err(Error::ConstantNumeric {
                        column: col.name.clone(),
                    });
                }
                ranges.push(Some((lo, hi)));
                counts.push(Vec::new());
                numeric_features.push(feature_map.len());
                feature_map.push(FeatureSlot::Numeric { column: j });
            }
            (ColumnKind::Categorical { categories }, ColumnData::Categorical(v)) => {
                let mut c = vec![0usize; categories.len()];
                for &k in v {
                    c[k] += 1;
                }
                if let Some(empty) = c.iter().position(|&m| m == 0) {
                    return Err(Error::EmptyCategory {
                        column: col.name.clone(),
                        category: categories[empty].clone(),
                    });
                }
                groups.push(CategoryGroup {
                    column: j,
                    start: feature_map.len(),
                    len: categories.len(),
                });
                for k in 0..categories.len() {
                    feature_map.push(FeatureSlot::Category { column: j, category: k });
                }
                ranges.push(None);
                counts.push(c);
            }
            _ => unreachable!("dataset columns are validated against the schema"),
        }
    }
    Ok(EncoderState {
        schema,
        n,
        ranges,
        counts,
        feature_map,
        groups,
        numeric_features,
    })
}

pub fn encode(data: &Dataset, enc: &EncoderState) -> Result<EncodedMatrix> {
    if data.schema().columns() != enc.schema().columns() {
        return Err(Error::SchemaMismatch("dataset columns differ from the encoder's".into()));
    }
    let width = enc.width();
    let mut m = Matrix::zeros(data.n(), width);
    let mut offset = 0;
    for (j, col) in data.columns().iter().enumerate() {
        match col {
            ColumnData::Numeric(v) => {
                for (i, &x) in v.iter().enumerate() {
                    m[(i, offset)] = enc.scale(j, x);
                }
                offset += 1;
            }
            ColumnData::Categorical(v) => {
                for (i, &k) in v.iter().enumerate() {
                    m[(i, offset + k)] = 1.0;
                }
                offset += enc.counts(j).len();
            }
        }
    }
    Ok(EncodedMatrix { values: m })
}

/// Hard decoding: inverse scaling for numeric features, argmax per category
/// group (ties go to the lowest index). The result carries no target.
pub fn decode(m: &EncodedMatrix, enc: &EncoderState) -> Result<Dataset> {
    if m.cols() != enc.width() {
        return Err(Error::Shape(format!(
            "encoded matrix has {} columns, encoder expects {}",
            m.cols(),
            enc.width()
        )));
    }
    let n = m.rows();
    let mut columns = Vec::with_capacity(enc.schema().len());
    let mut offset = 0;
    for (j, col) in enc.schema().columns().iter().enumerate() {
        match &col.kind {
            ColumnKind::Numeric => {
                columns.push(ColumnData::Numeric(
                    (0..n).map(|i| enc.unscale(j, m.values[(i, offset)])).collect(),
                ));
                offset += 1;
            }
            ColumnKind::Categorical { categories } => {
                let p = categories.len();
                let idx = (0..n)
                    .map(|i| argmax_lowest(&m.values.row(i)[offset..offset + p]))
                    .collect();
                columns.push(ColumnData::Categorical(idx));
                offset += p;
            }
        }
    }
    Dataset::new(enc.schema().clone(), columns, None)
}

pub(crate) fn argmax_lowest(scores: &[f64]) -> usize {
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = k;
        }
    }
    best
}
