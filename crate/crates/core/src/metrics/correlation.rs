//! Pairwise association measures and the mixed correlation matrix.
//!
//! Pairs are scored by kind: Spearman's ρ for numeric-numeric, Cramér's V
//! for categorical-categorical and η² (categorical explaining numeric) for
//! mixed pairs.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tabular::{ColumnData, Dataset};

/// 1-based ranks; tied values share the mean of their ranks.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::ZeroVariance);
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Maps labels to `0..m` in order of first appearance.
fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut seen = BTreeMap::new();
    let out = labels
        .iter()
        .map(|l| {
            let next = seen.len();
            *seen.entry(*l).or_insert(next)
        })
        .collect();
    (out, seen.len())
}

/// `sqrt(χ² / (n · min(r − 1, c − 1)))` over the observed categories, without
/// bias correction.
pub fn cramers_v(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (a, r) = compact(a);
    let (b, c) = compact(b);
    if r < 2 || c < 2 {
        return Err(Error::DegenerateTable(alloc::format!(
            "{r}x{c} table needs at least two observed categories per side"
        )));
    }
    let n = a.len() as f64;
    let mut table = vec![0.0; r * c];
    let mut rows = vec![0.0; r];
    let mut cols = vec![0.0; c];
    for (&i, &j) in a.iter().zip(&b) {
        table[i * c + j] += 1.0;
        rows[i] += 1.0;
        cols[j] += 1.0;
    }
    let mut chi2 = 0.0;
    for i in 0..r {
        for j in 0..c {
            let expected = rows[i] * cols[j] / n;
            let d = table[i * c + j] - expected;
            chi2 += d * d / expected;
        }
    }
    let k = (r.min(c) - 1) as f64;
    Ok(libm::sqrt(chi2 / (n * k)).min(1.0))
}

/// Between-group over total sum of squares. `groups[i] < group_count`; every
/// group must be non-empty.
pub fn eta_squared(x: &[f64], groups: &[usize], group_count: usize) -> Result<f64> {
    if x.len() != groups.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: groups.len(),
        });
    }
    if group_count < 2 {
        return Err(Error::Shape(alloc::format!("η² needs at least 2 groups, got {group_count}")));
    }
    let mut sums = vec![0.0; group_count];
    let mut sizes = vec![0usize; group_count];
    for (&v, &g) in x.iter().zip(groups) {
        if g >= group_count {
            return Err(Error::Shape(alloc::format!("group label {g} >= {group_count}")));
        }
        sums[g] += v;
        sizes[g] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyGroup(empty));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let total: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if total == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let between: f64 = sums
        .iter()
        .zip(&sizes)
        .map(|(s, &m)| {
            let d = s / m as f64 - mean;
            m as f64 * d * d
        })
        .sum();
    Ok((between / total).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    Spearman,
    CramersV,
    EtaSquared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedCorrelationMatrix {
    pub names: Vec<String>,
    pub values: Matrix,
    pub kinds: Vec<PairKind>,
}

impl MixedCorrelationMatrix {
    pub fn p(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn kind(&self, i: usize, j: usize) -> PairKind {
        self.kinds[i * self.p() + j]
    }
}

/// Pair statistic with degenerate inputs (a column collapsed to one value)
/// scored as no association.
fn pair_value(a: &ColumnData, b: &ColumnData) -> (PairKind, f64) {
    let (kind, value) = match (a, b) {
        (ColumnData::Numeric(x), ColumnData::Numeric(y)) => (PairKind::Spearman, spearman(x, y)),
        (ColumnData::Categorical(x), ColumnData::Categorical(y)) => (PairKind::CramersV, cramers_v(x, y)),
        (ColumnData::Numeric(x), ColumnData::Categorical(g)) | (ColumnData::Categorical(g), ColumnData::Numeric(x)) => {
            let (g, m) = compact(g);
            let v = if m < 2 { Err(Error::ZeroVariance) } else { eta_squared(x, &g, m) };
            (PairKind::EtaSquared, v)
        }
    };
    (kind, value.unwrap_or(0.0))
}

pub fn mixed_correlation(data: &Dataset) -> MixedCorrelationMatrix {
    let p = data.p();
    let mut values = Matrix::identity(p);
    let mut kinds = vec![PairKind::Spearman; p * p];
    for i in 0..p {
        kinds[i * p + i] = match data.column(i) {
            ColumnData::Numeric(_) => PairKind::Spearman,
            ColumnData::Categorical(_) => PairKind::CramersV,
        };
        for j in i + 1..p {
            let (kind, v) = pair_value(data.column(i), data.column(j));
            values[(i, j)] = v;
            values[(j, i)] = v;
            kinds[i * p + j] = kind;
            kinds[j * p + i] = kind;
        }
    }
    MixedCorrelationMatrix {
        names: data.schema().columns().iter().map(|c| c.name.clone()).collect(),
        values,
        kinds,
    }
}

/// Sum over unordered variable pairs of the absolute difference between the
/// two mixed correlation matrices.
pub fn mc_distance(d1: &Dataset, d2: &Dataset) -> Result<f64> {
    if d1.schema().columns() != d2.schema().columns() {
        return Err(Error::SchemaMismatch("MC distance needs identical feature columns".into()));
    }
    let (m1, m2) = (mixed_correlation(d1), mixed_correlation(d2));
    Ok(matrix_distance(&m1, &m2))
}

pub(crate) fn matrix_distance(m1: &MixedCorrelationMatrix, m2: &MixedCorrelationMatrix) -> f64 {
    let p = m1.p();
    let mut total = 0.0;
    for i in 0..p {
        for j in i + 1..p {
            total += libm::fabs(m1.get(i, j) - m2.get(i, j));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{Column, Schema};

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((spearman(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(spearman(&x, &[1.0; 4]), Err(Error::ZeroVariance));
    }

    #[test]
    fn cramers_v_examples() {
        let a = [0, 1, 2, 0, 1, 2];
        assert!((cramers_v(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        // 25/25/25/25 table
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for _ in 0..25 {
                x.push(i);
                y.push(j);
            }
        }
        assert!(cramers_v(&x, &y).unwrap().abs() < 1e-12);
        assert!(matches!(cramers_v(&[0, 0], &[0, 1]), Err(Error::DegenerateTable(_))));
    }

    #[test]
    fn eta_squared_examples() {
        assert!((eta_squared(&[1.0, 2.0, 3.0, 4.0], &[0, 0, 1, 1], 2).unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(eta_squared(&[1.0, 1.0, 5.0, 5.0], &[0, 0, 1, 1], 2).unwrap(), 1.0);
        assert_eq!(eta_squared(&[1.0, 3.0, 1.0, 3.0], &[0, 0, 1, 1], 2).unwrap(), 0.0);
        assert_eq!(eta_squared(&[1.0, 2.0], &[0, 0], 2), Err(Error::EmptyGroup(1)));
        assert_eq!(eta_squared(&[1.0, 1.0], &[0, 1], 2), Err(Error::ZeroVariance));
    }

    fn table(a: Vec<f64>, b: Vec<f64>, q: Vec<usize>) -> Dataset {
        let schema = Schema::new(
            vec![
                Column::numeric("a"),
                Column::numeric("b"),
                Column::categorical("q", ["x", "y", "z"]),
            ],
            None,
        )
        .unwrap();
        Dataset::new(
            schema,
            vec![ColumnData::Numeric(a), ColumnData::Numeric(b), ColumnData::Categorical(q)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn matrix_structure() {
        let d = table(
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            vec![2.0, 1.0, 4.0, 3.0, 5.0],
            vec![0, 0, 1, 2, 2],
        );
        let m = mixed_correlation(&d);
        for i in 0..3 {
            assert_eq!(m.get(i, i), 1.0);
            for j in 0..3 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        assert_eq!(m.kind(0, 1), PairKind::Spearman);
        assert_eq!(m.kind(0, 2), PairKind::EtaSquared);
        assert_eq!(m.kind(2, 2), PairKind::CramersV);
        assert_eq!(m.get(0, 1), spearman(d.numeric(0).unwrap(), d.numeric(1).unwrap()).unwrap());
        assert_eq!(
            m.get(2, 0),
            eta_squared(d.numeric(0).unwrap(), d.categorical(2).unwrap(), 3).unwrap()
        );
    }

    #[test]
    fn mc_distance_examples() {
        let d = table(
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            vec![2.0, 1.0, 4.0, 3.0, 5.0],
            vec![0, 0, 1, 2, 2],
        );
        assert_eq!(mc_distance(&d, &d).unwrap(), 0.0);
        // Only the a-b pair changes between the two matrices below.
        let m1 = MixedCorrelationMatrix {
            names: vec!["a".into(), "b".into()],
            values: Matrix::from_rows(&[vec![1.0, 0.8], vec![0.8, 1.0]]).unwrap(),
            kinds: vec![PairKind::Spearman; 4],
        };
        let mut m2 = m1.clone();
        m2.values[(0, 1)] = 0.3;
        m2.values[(1, 0)] = 0.3;
        assert!((matrix_distance(&m1, &m2) - 0.5).abs() < 1e-15);
    }
}
