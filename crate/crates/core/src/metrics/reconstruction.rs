use alloc::vec::Vec;

use super::classification::balanced_accuracy;
use crate::error::{Error, Result};
use crate::tabular::{ColumnData, Dataset, EncoderState};

/// Mixed reconstruction error over the `p` variables:
///
/// ```text
/// (1/p) [ Σ_numeric MSE(scaled x, scaled x̂) + Σ_categorical (1 − BalAcc) ]
/// ```
///
/// where a categorical variable's balanced accuracy is the mean over its
/// categories of the one-vs-rest balanced accuracy. Numeric values are scaled
/// (and clipped) with `enc`.
pub fn msem(original: &Dataset, reconstructed: &Dataset, enc: &EncoderState) -> Result<f64> {
    if original.schema().columns() != reconstructed.schema().columns()
        || original.schema().columns() != enc.schema().columns()
    {
        return Err(Error::SchemaMismatch("MSEM needs identical feature columns".into()));
    }
    if original.n() != reconstructed.n() {
        return Err(Error::LengthMismatch {
            left: original.n(),
            right: reconstructed.n(),
        });
    }
    let n = original.n() as f64;
    let mut total = 0.0;
    for (j, (a, b)) in original.columns().iter().zip(reconstructed.columns()).enumerate() {
        total += match (a, b) {
            (ColumnData::Numeric(x), ColumnData::Numeric(y)) => {
                x.iter()
                    .zip(y)
                    .map(|(&u, &v)| {
                        let d = enc.scale(j, u) - enc.scale(j, v);
                        d * d
                    })
                    .sum::<f64>()
                    / n
            }
            (ColumnData::Categorical(x), ColumnData::Categorical(y)) => {
                let categories = enc.counts(j).len();
                let mut acc = 0.0;
                for k in 0..categories {
                    let truth: Vec<bool> = x.iter().map(|&c| c == k).collect();
                    let pred: Vec<bool> = y.iter().map(|&c| c == k).collect();
                    acc += balanced_accuracy(&truth, &pred)?;
                }
                1.0 - acc / categories as f64
            }
            _ => unreachable!("schemas compared above"),
        };
    }
    Ok(total / original.p() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{fit_encoder, Column, Schema};
    use alloc::vec;

    #[test]
    fn identical_is_zero() {
        let schema = Schema::new(
            vec![Column::numeric("a"), Column::categorical("b", ["x", "y"])],
            None,
        )
        .unwrap();
        let d = Dataset::new(
            schema,
            vec![
                ColumnData::Numeric(vec![1.0, 2.0, 3.0]),
                ColumnData::Categorical(vec![0, 1, 0]),
            ],
            None,
        )
        .unwrap();
        let enc = fit_encoder(&d).unwrap();
        assert_eq!(msem(&d, &d, &enc).unwrap(), 0.0);
    }

    #[test]
    fn all_numeric_is_mean_scaled_mse() {
        let schema = Schema::new(vec![Column::numeric("a"), Column::numeric("b")], None).unwrap();
        let d = Dataset::new(
            schema.clone(),
            vec![ColumnData::Numeric(vec![0.0, 10.0]), ColumnData::Numeric(vec![0.0, 2.0])],
            None,
        )
        .unwrap();
        let r = Dataset::new(
            schema,
            vec![ColumnData::Numeric(vec![5.0, 10.0]), ColumnData::Numeric(vec![0.0, 2.0])],
            None,
        )
        .unwrap();
        let enc = fit_encoder(&d).unwrap();
        // column a: scaled errors (0.5, 0) -> MSE 0.125; column b exact
        assert!((msem(&d, &r, &enc).unwrap() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn constant_majority_binary_scores_half() {
        let schema = Schema::new(vec![Column::categorical("b", ["x", "y"])], None).unwrap();
        let d = Dataset::new(schema.clone(), vec![ColumnData::Categorical(vec![0, 0, 0, 1])], None).unwrap();
        let r = Dataset::new(schema, vec![ColumnData::Categorical(vec![0, 0, 0, 0])], None).unwrap();
        let enc = fit_encoder(&d).unwrap();
        assert_eq!(msem(&d, &r, &enc).unwrap(), 0.5);
    }
}
