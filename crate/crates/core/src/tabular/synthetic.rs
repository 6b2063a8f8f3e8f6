//! Uncorrelated benchmark table: three Gaussian features, five multinomial
//! features with skewed category frequencies, and a Gaussian target whose
//! mean depends on a context-specific set of terms.
//!
//! Category names carry their percentage; repeated percentages inside one
//! variable get a `_1`, `_2`, ... suffix so names stay unique.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use super::dataset::{ColumnData, Dataset};
use super::schema::{Column, Schema};
use crate::error::{Error, Result};
use crate::rng::SeedRng;

pub const SYNTHETIC_COEFF_COUNT: usize = 9;

const TARGET_NOISE_SD: f64 = 0.5;

/// `(mean, standard deviation)` of X1..X3.
const NUMERIC_SPECS: [(&str, f64, f64); 3] = [("X1", 0.0, 1.0), ("X2", 10.0, 2.0), ("X3", 10.0, 2.0)];

/// Category names and probabilities of Q1..Q5.
const CATEGORICAL_SPECS: [(&str, &[(&str, f64)]); 5] = [
    ("Q1", &[("Q1.70", 0.70), ("Q1.30", 0.30)]),
    (
        "Q2",
        &[
            ("Q2.10", 0.10),
            ("Q2.20", 0.20),
            ("Q2.29", 0.29),
            ("Q2.31", 0.31),
            ("Q2.02", 0.02),
            ("Q2.08", 0.08),
        ],
    ),
    ("Q3", &[("Q3.60", 0.60), ("Q3.20", 0.20), ("Q3.17", 0.17), ("Q3.03", 0.03)]),
    (
        "Q4",
        &[
            ("Q4.10_1", 0.10),
            ("Q4.10_2", 0.10),
            ("Q4.10_3", 0.10),
            ("Q4.10_4", 0.10),
            ("Q4.10_5", 0.10),
            ("Q4.15", 0.15),
            ("Q4.05", 0.05),
            ("Q4.30", 0.30),
        ],
    ),
    (
        "Q5",
        &[
            ("Q5.25_1", 0.25),
            ("Q5.25_2", 0.25),
            ("Q5.10_1", 0.10),
            ("Q5.10_2", 0.10),
            ("Q5.05_1", 0.05),
            ("Q5.05_2", 0.05),
            ("Q5.05_3", 0.05),
            ("Q5.05_4", 0.05),
            ("Q5.09", 0.09),
            ("Q5.01", 0.01),
        ],
    ),
];

/// Which terms drive the target mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticContext {
    /// Numeric features plus minority categories.
    Imbalanced,
    /// Numeric features plus majority categories.
    Balanced,
    /// Majority categories only.
    Majority,
}

impl SyntheticContext {
    pub fn name(self) -> &'static str {
        match self {
            SyntheticContext::Imbalanced => "imbalanced",
            SyntheticContext::Balanced => "balanced",
            SyntheticContext::Majority => "majority",
        }
    }

    /// `(variable, category)` indicator behind coefficients 4..9.
    pub fn indicator_terms(self) -> [(usize, usize); 6] {
        match self {
            // Q1.30, Q2.02, Q3.03, Q4.05, Q5.01, Q5.05
            SyntheticContext::Imbalanced => [(0, 1), (1, 4), (2, 3), (3, 6), (4, 9), (4, 4)],
            // Q1.70, Q2.29, Q3.60, Q4.30, Q5.25, Q5.10
            SyntheticContext::Balanced | SyntheticContext::Majority => {
                [(0, 0), (1, 2), (2, 0), (3, 7), (4, 0), (4, 2)]
            }
        }
    }

    pub fn uses_numeric(self) -> bool {
        !matches!(self, SyntheticContext::Majority)
    }
}

impl FromStr for SyntheticContext {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "imbalanced" => Ok(SyntheticContext::Imbalanced),
            "balanced" => Ok(SyntheticContext::Balanced),
            "majority" => Ok(SyntheticContext::Majority),
            other => Err(Error::InvalidContext(String::from(other))),
        }
    }
}

impl core::fmt::Display for SyntheticContext {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn synthetic_schema() -> Schema {
    let mut columns: Vec<Column> = NUMERIC_SPECS.iter().map(|(name, _, _)| Column::numeric(*name)).collect();
    for (name, cats) in CATEGORICAL_SPECS {
        columns.push(Column::categorical(name, cats.iter().map(|(c, _)| *c)));
    }
    Schema::new(columns, Some("y".into())).expect("static schema is valid")
}

/// Draws `n` rows. Each row consumes X1, X2, X3, Q1..Q5 and the target noise
/// from the seeded stream in that order.
pub fn generate_synthetic(context: SyntheticContext, n: usize, seed: u64, coeffs: &[f64]) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Shape("synthetic sample needs n >= 1".into()));
    }
    if coeffs.len() != SYNTHETIC_COEFF_COUNT {
        return Err(Error::InvalidConfig(format!(
            "expected {SYNTHETIC_COEFF_COUNT} coefficients, got {}",
            coeffs.len()
        )));
    }
    let probs: Vec<Vec<f64>> = CATEGORICAL_SPECS
        .iter()
        .map(|(_, cats)| cats.iter().map(|(_, p)| *p).collect())
        .collect();
    let terms = context.indicator_terms();
    let mut rng = SeedRng::new(seed);
    let mut numeric = vec![Vec::with_capacity(n); NUMERIC_SPECS.len()];
    let mut categorical = vec![Vec::with_capacity(n); CATEGORICAL_SPECS.len()];
    let mut target = Vec::with_capacity(n);
    for _ in 0..n {
        let mut mu = 0.0;
        for (j, (_, mean, sd)) in NUMERIC_SPECS.iter().enumerate() {
            let x = rng.gaussian(*mean, *sd);
            if context.uses_numeric() {
                mu += coeffs[j] * x;
            }
            numeric[j].push(x);
        }
        let row: Vec<usize> = probs.iter().map(|p| rng.categorical(p)).collect();
        for (t, &(var, cat)) in terms.iter().enumerate() {
            if row[var] == cat {
                mu += coeffs[3 + t];
            }
        }
        for (j, k) in row.into_iter().enumerate() {
            categorical[j].push(k);
        }
        target.push(rng.gaussian(mu, TARGET_NOISE_SD));
    }
    let columns = numeric
        .into_iter()
        .map(ColumnData::Numeric)
        .chain(categorical.into_iter().map(ColumnData::Categorical))
        .collect();
    Dataset::new(synthetic_schema(), columns, Some(target))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONES: [f64; 9] = [1.0; 9];

    #[test]
    fn schema_shape() {
        let s = synthetic_schema();
        assert_eq!(s.numeric_count(), 3);
        assert_eq!(s.categorical_count(), 5);
        assert_eq!(s.category_total(), 2 + 6 + 4 + 8 + 10);
        for (_, cats) in CATEGORICAL_SPECS {
            let total: f64 = cats.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn indicator_terms_name_the_right_categories() {
        let s = synthetic_schema();
        let name = |(v, c): (usize, usize)| s.columns()[3 + v].categories().unwrap()[c].clone();
        let imb: Vec<String> = SyntheticContext::Imbalanced.indicator_terms().map(name).to_vec();
        assert_eq!(imb, ["Q1.30", "Q2.02", "Q3.03", "Q4.05", "Q5.01", "Q5.05_1"]);
        let bal: Vec<String> = SyntheticContext::Balanced.indicator_terms().map(name).to_vec();
        assert_eq!(bal, ["Q1.70", "Q2.29", "Q3.60", "Q4.30", "Q5.25_1", "Q5.10_1"]);
    }

    #[test]
    fn majority_target_ignores_numeric_features() {
        // Coefficients only on X1..X3: the majority context must be pure noise.
        let coeffs = [100.0, 100.0, 100.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let d = generate_synthetic(SyntheticContext::Majority, 500, 4, &coeffs).unwrap();
        let y = d.target().unwrap();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        assert!(mean.abs() < 0.2);
        let imb = generate_synthetic(SyntheticContext::Imbalanced, 500, 4, &coeffs).unwrap();
        let mean_imb = imb.target().unwrap().iter().sum::<f64>() / 500.0;
        assert!(mean_imb > 1500.0);
    }

    #[test]
    fn imbalanced_target_uses_the_three_percent_category() {
        let mut coeffs = [0.0; 9];
        coeffs[5] = 50.0; // Q3.03
        let d = generate_synthetic(SyntheticContext::Imbalanced, 3000, 5, &coeffs).unwrap();
        let q3 = d.categorical(5).unwrap();
        let y = d.target().unwrap();
        for (k, yi) in q3.iter().zip(y) {
            if *k == 3 {
                assert!(*yi > 45.0);
            } else {
                assert!(*yi < 5.0);
            }
        }
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let a = generate_synthetic(SyntheticContext::Balanced, 100, 1, &ONES).unwrap();
        let b = generate_synthetic(SyntheticContext::Balanced, 100, 1, &ONES).unwrap();
        let c = generate_synthetic(SyntheticContext::Balanced, 100, 2, &ONES).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.schema(), c.schema());
        assert_ne!(a.numeric(0), c.numeric(0));
    }

    #[test]
    fn argument_errors() {
        assert!(generate_synthetic(SyntheticContext::Balanced, 0, 1, &ONES).is_err());
        assert!(generate_synthetic(SyntheticContext::Balanced, 10, 1, &ONES[..8]).is_err());
        assert!(matches!("weird".parse::<SyntheticContext>(), Err(Error::InvalidContext(_))));
        assert_eq!("Imbalanced".parse::<SyntheticContext>().unwrap(), SyntheticContext::Imbalanced);
    }
}
