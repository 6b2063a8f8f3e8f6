//! Report, summary and learning-curve files.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use balmse_core::eval::{Aggregate, CurveRecord, ExperimentReport};
use balmse_core::models::LearningCurve;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const REPORT_HEADER: &str = "run,context,epochs,loss,metric,value";

pub fn report_csv(report: &ExperimentReport, context: &str) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for (k, v) in report.rows() {
        let _ = writeln!(out, "{},{context},{},{},{},{v:?}", k.run, k.epochs, k.loss, k.metric);
    }
    out
}

/// Inverse of [`report_csv`]; the context column is returned separately.
pub fn parse_report_csv(text: &str, path: &Path) -> Result<(ExperimentReport, Vec<String>)> {
    let bad = |line: usize, m: &str| CliError::Format {
        path: path.into(),
        message: format!("line {line}: {m}"),
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == REPORT_HEADER => {}
        _ => return Err(bad(1, &format!("expected header `{REPORT_HEADER}`"))),
    }
    let mut report = ExperimentReport::new();
    let mut contexts: Vec<String> = Vec::new();
    for (i, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let [run, context, epochs, loss, metric, value] = cells[..] else {
            return Err(bad(i + 1, "expected 6 cells"));
        };
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad(i + 1, "bad integer"));
        let value: f64 = value.parse().map_err(|_| bad(i + 1, "bad value"))?;
        report
            .insert(num(run)?, num(epochs)?, loss, metric, value)
            .map_err(|e| bad(i + 1, &e.to_string()))?;
        if !contexts.iter().any(|c| c == context) {
            contexts.push(context.to_string());
        }
    }
    Ok((report, contexts))
}

/// `epochs → loss → metric → {mean, std, count}`.
pub fn summary_json(report: &ExperimentReport) -> String {
    #[derive(Serialize)]
    struct Cell {
        mean: f64,
        std: f64,
        count: usize,
    }
    let mut tree: BTreeMap<usize, BTreeMap<String, BTreeMap<String, Cell>>> = BTreeMap::new();
    for (k, Aggregate { mean, std, count }) in report.aggregates() {
        tree.entry(k.epochs)
            .or_default()
            .entry(k.loss)
            .or_default()
            .insert(k.metric, Cell { mean, std, count });
    }
    serde_json::to_string_pretty(&tree).expect("summary serializes") + "\n"
}

pub const CURVE_HEADER: &str = "checkpoint,epoch,feature,error";

/// One row per checkpoint and encoded feature.
pub fn curve_csv(curve: &LearningCurve) -> String {
    let mut out = format!("{CURVE_HEADER}\n");
    write_curve_rows(&mut out, curve, "");
    out
}

fn write_curve_rows(out: &mut String, curve: &LearningCurve, prefix: &str) {
    for (c, point) in curve.points.iter().enumerate() {
        for (name, e) in curve.feature_names.iter().zip(&point.errors) {
            let _ = writeln!(out, "{prefix}{},{},{name},{e:?}", c + 1, point.epoch);
        }
    }
}

/// All curves of one run and loss, one block per epoch budget.
pub fn run_curves_csv(records: &[&CurveRecord]) -> String {
    let mut out = format!("epochs,{CURVE_HEADER}\n");
    for r in records {
        write_curve_rows(&mut out, &r.curve, &format!("{},", r.epochs));
    }
    out
}

/// `run_<id>_<loss>.csv` with `:` in blended labels replaced by `-`.
pub fn curve_file_name(run: usize, loss: &str) -> String {
    format!("run_{run}_{}.csv", loss.replace(':', "-"))
}

/// Groups curves by `(run, loss)` into file name and contents.
pub fn curve_files(report: &ExperimentReport) -> Vec<(String, String)> {
    let mut groups: BTreeMap<(usize, &str), Vec<&CurveRecord>> = BTreeMap::new();
    for r in &report.curves {
        groups.entry((r.run, &r.loss)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((run, loss), mut recs)| {
            recs.sort_by_key(|r| r.epochs);
            (curve_file_name(run, loss), run_curves_csv(&recs))
        })
        .collect()
}

/// Per-metric `epochs,loss,mean,std,count` rows sorted by epochs, then loss.
pub fn plot_data(report: &ExperimentReport) -> BTreeMap<String, String> {
    let mut files: BTreeMap<String, String> = BTreeMap::new();
    let mut cells: Vec<_> = report.aggregates().into_iter().collect();
    cells.sort_by(|a, b| (&a.0.metric, a.0.epochs, &a.0.loss).cmp(&(&b.0.metric, b.0.epochs, &b.0.loss)));
    for (k, a) in cells {
        let out = files
            .entry(k.metric.clone())
            .or_insert_with(|| "epochs,loss,mean,std,count\n".to_string());
        let _ = writeln!(out, "{},{},{:?},{:?},{}", k.epochs, k.loss, a.mean, a.std, a.count);
    }
    files
}

/// Fixed-width console table, one line per `(epochs, loss, metric)` cell.
pub fn table(report: &ExperimentReport) -> String {
    let mut out = format!("{:>7}  {:<14} {:<18} {:>12} {:>12} {:>5}\n", "epochs", "loss", "metric", "mean", "std", "runs");
    for (k, a) in report.aggregates() {
        let _ = writeln!(
            out,
            "{:>7}  {:<14} {:<18} {:>12.6} {:>12.6} {:>5}",
            k.epochs, k.loss, k.metric, a.mean, a.std, a.count
        );
    }
    out
}
