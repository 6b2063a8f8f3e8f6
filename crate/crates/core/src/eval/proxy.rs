//! Deterministic proxy predictors for downstream scoring: ridge regression
//! and L2-regularized logistic regression (binary and one-vs-rest).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, solve, Matrix};

pub const DEFAULT_RIDGE_LAMBDA: f64 = 1e-3;
pub const LOGISTIC_LAMBDA: f64 = 1e-4;

/// Affine model `intercept + coefficients · x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LinearModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.intercept + dot(&self.coefficients, x)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.coefficients.len() {
            return Err(Error::Shape(format!(
                "{} features for a model of width {}",
                x.cols(),
                self.coefficients.len()
            )));
        }
        Ok((0..x.rows()).map(|i| self.score(x.row(i))).collect())
    }
}

fn check_rows(x: &Matrix, n: usize) -> Result<()> {
    if x.rows() != n {
        return Err(Error::LengthMismatch { left: x.rows(), right: n });
    }
    if n == 0 {
        return Err(Error::Shape("no training rows".into()));
    }
    Ok(())
}

fn column_means(x: &Matrix) -> Vec<f64> {
    let mut means = vec![0.0; x.cols()];
    for i in 0..x.rows() {
        for (m, v) in means.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    let n = x.rows() as f64;
    means.iter_mut().for_each(|m| *m /= n);
    means
}

/// Minimizes `Σ (y − b − w·x)² + λ‖w‖²`. The intercept is not penalized: `X`
/// and `y` are centered, `(XcᵀXc + λI) w = Xcᵀ yc` is solved and
/// `b = ȳ − w·x̄`.
pub fn ridge_fit(x: &Matrix, y: &[f64], lambda: f64) -> Result<LinearModel> {
    check_rows(x, y.len())?;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidConfig(format!("ridge penalty {lambda}")));
    }
    let d = x.cols();
    let means = column_means(x);
    let y_mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut gram = Matrix::zeros(d, d);
    let mut rhs = vec![0.0; d];
    let mut centered = vec![0.0; d];
    for (i, &yi) in y.iter().enumerate() {
        for ((c, v), m) in centered.iter_mut().zip(x.row(i)).zip(&means) {
            *c = v - m;
        }
        let yc = yi - y_mean;
        for a in 0..d {
            rhs[a] += centered[a] * yc;
            let ca = centered[a];
            if ca == 0.0 {
                continue;
            }
            let row = gram.row_mut(a);
            for b in 0..d {
                row[b] += ca * centered[b];
            }
        }
    }
    for a in 0..d {
        gram[(a, a)] += lambda;
    }
    let coefficients = if d == 0 { Vec::new() } else { solve(&gram, &rhs)? };
    let intercept = y_mean - dot(&coefficients, &means);
    Ok(LinearModel { intercept, coefficients })
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + libm::exp(-t))
    } else {
        let e = libm::exp(t);
        e / (1.0 + e)
    }
}

/// `mean log-loss + (λ/2)‖w‖²` and its gradient `(∂b, ∂w)`.
pub fn logistic_objective(model: &LinearModel, x: &Matrix, y: &[bool], lambda: f64) -> (f64, f64, Vec<f64>) {
    let n = x.rows() as f64;
    let mut loss = 0.0;
    let mut g_b = 0.0;
    let mut g_w = vec![0.0; x.cols()];
    for (i, &t) in y.iter().enumerate() {
        let row = x.row(i);
        let s = model.score(row);
        // log(1 + e^s) − t·s, evaluated stably
        loss += if s > 0.0 { s + libm::log1p(libm::exp(-s)) } else { libm::log1p(libm::exp(s)) };
        if t {
            loss -= s;
        }
        let r = sigmoid(s) - f64::from(u8::from(t));
        g_b += r;
        for (g, v) in g_w.iter_mut().zip(row) {
            *g += r * v;
        }
    }
    let penalty: f64 = model.coefficients.iter().map(|w| w * w).sum();
    g_b /= n;
    for (g, w) in g_w.iter_mut().zip(&model.coefficients) {
        *g = *g / n + lambda * w;
    }
    (loss / n + 0.5 * lambda * penalty, g_b, g_w)
}

/// Full-batch gradient descent from zero on [`logistic_objective`] with
/// [`LOGISTIC_LAMBDA`].
pub fn logistic_fit(x: &Matrix, y: &[bool], steps: usize, lr: f64) -> Result<LinearModel> {
    check_rows(x, y.len())?;
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::InvalidConfig(format!("logistic learning rate {lr}")));
    }
    let mut model = LinearModel {
        intercept: 0.0,
        coefficients: vec![0.0; x.cols()],
    };
    for _ in 0..steps {
        let (_, g_b, g_w) = logistic_objective(&model, x, y, LOGISTIC_LAMBDA);
        model.intercept -= lr * g_b;
        for (w, g) in model.coefficients.iter_mut().zip(&g_w) {
            *w -= lr * g;
        }
    }
    Ok(model)
}

pub fn logistic_probabilities(model: &LinearModel, x: &Matrix) -> Result<Vec<f64>> {
    Ok(model.predict(x)?.into_iter().map(sigmoid).collect())
}

/// One binary model per class; prediction is the class with the highest
/// score, ties to the lowest index.
#[derive(Debug, Clone, PartialEq)]
pub struct OneVsRest {
    pub models: Vec<LinearModel>,
}

impl OneVsRest {
    pub fn fit(x: &Matrix, labels: &[usize], classes: usize, steps: usize, lr: f64) -> Result<Self> {
        if classes < 2 {
            return Err(Error::SingleClassTruth);
        }
        let models = (0..classes)
            .map(|c| {
                let y: Vec<bool> = labels.iter().map(|&l| l == c).collect();
                logistic_fit(x, &y, steps, lr)
            })
            .collect::<Result<_>>()?;
        Ok(Self { models })
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>> {
        let scores: Vec<Vec<f64>> = self.models.iter().map(|m| m.predict(x)).collect::<Result<_>>()?;
        Ok((0..x.rows())
            .map(|i| {
                let mut best = 0;
                for c in 1..scores.len() {
                    if scores[c][i] > scores[best][i] {
                        best = c;
                    }
                }
                best
            })
            .collect())
    }
}
