//! Subcommand bodies. Each takes a resolved [`RunConfig`] and writes under
//! its output directory; the binary only parses flags.

use std::fmt::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use balmse_core::eval::{run_single, vae_run_single, DataSource, ExperimentConfig, ExperimentReport};
use balmse_core::models::{train_autoencoder, train_vae};
use balmse_core::rng::derive_seed;
use balmse_core::tabular::{encode, fit_encoder, generate_synthetic, Dataset, SyntheticContext};

use crate::checkpoint::{schema_hash, Checkpoint, Header, FORMAT};
use crate::config::{ModelKind, RunConfig};
use crate::error::Result;
use crate::{io, output};

/// Writes `out` and its schema sidecar. The sample is the one an experiment
/// with the same seed draws.
pub fn generate(context: SyntheticContext, n: usize, seed: u64, coeffs: &[f64], out: &Path) -> Result<Dataset> {
    let data = generate_synthetic(context, n, derive_seed(seed, 0), coeffs)?;
    io::write_csv(&data, out)?;
    io::write_schema(data.schema(), &io::sidecar_path(out))?;
    Ok(data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutput {
    pub checkpoint: PathBuf,
    pub curves: PathBuf,
    pub final_loss: f64,
}

/// Trains on the whole table (no split) and writes `model.ckpt`,
/// `model.schema` and `curves.csv`.
pub fn train(cfg: &RunConfig) -> Result<TrainOutput> {
    let data = cfg.dataset()?;
    let x = data.without_target();
    let enc = fit_encoder(&x)?;
    let dir = cfg.out_dir();
    let (checkpoint, curves) = (dir.join("model.ckpt"), dir.join("curves.csv"));
    let mut header = Header {
        format: FORMAT.into(),
        kind: String::new(),
        seed: cfg.seed,
        loss: cfg.loss()?.to_string(),
        schema_hash: schema_hash(data.schema()),
        config: serde_json::Value::Null,
        networks: Vec::new(),
    };
    let (networks, curve_text, final_loss) = match cfg.model.kind {
        ModelKind::Autoencoder => {
            let model = train_autoencoder(&encode(&x, &enc)?, &enc, &cfg.autoencoder()?)?;
            header.kind = "autoencoder".into();
            header.config = serde_json::to_value(&cfg.model).expect("serializable");
            header.networks = vec!["encoder".into(), "decoder".into()];
            let last = model.curve.last().map_or(f64::NAN, |p| p.errors.iter().sum::<f64>() / p.errors.len() as f64);
            (vec![model.encoder, model.decoder], output::curve_csv(&model.curve), last)
        }
        ModelKind::Vae => {
            let model = train_vae(&data, &enc, &cfg.vae()?)?;
            header.kind = "vae".into();
            header.config = serde_json::to_value(&cfg.vae).expect("serializable");
            header.networks = ["hl1", "hl21", "hl22", "hl3", "hl41", "hl42"].map(String::from).to_vec();
            let mut text = String::from("checkpoint,epoch,loss\n");
            for (c, (epoch, loss)) in model.loss_curve.iter().enumerate() {
                let _ = writeln!(text, "{},{epoch},{loss:?}", c + 1);
            }
            let n = model.nets;
            let last = model.loss_curve.last().map_or(f64::NAN, |p| p.1);
            (vec![n.hl1, n.hl21, n.hl22, n.hl3, n.hl41, n.hl42], text, last)
        }
    };
    io::write_text(&checkpoint, &Checkpoint { header, networks }.to_text())?;
    io::write_schema(data.schema(), &dir.join("model.schema"))?;
    io::write_text(&curves, &curve_text)?;
    Ok(TrainOutput {
        checkpoint,
        curves,
        final_loss,
    })
}

/// Runs `0..cfg.runs` on at most `jobs` threads and merges in run order.
pub fn run_parallel(cfg: &ExperimentConfig, data: &Dataset, kind: ModelKind, jobs: usize) -> Result<ExperimentReport> {
    let runs = cfg.runs;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<balmse_core::Result<ExperimentReport>>>> = Mutex::new((0..runs).map(|_| None).collect());
    let worker = || loop {
        let run = next.fetch_add(1, Ordering::Relaxed);
        if run >= runs {
            break;
        }
        let r = match kind {
            ModelKind::Autoencoder => run_single(cfg, data, run),
            ModelKind::Vae => vae_run_single(cfg, data, run),
        };
        eprintln!("run {run}: {}", if r.is_ok() { "done" } else { "failed" });
        results.lock().expect("no worker panicked")[run] = Some(r);
    };
    thread::scope(|s| {
        for _ in 0..jobs.clamp(1, runs.max(1)) {
            s.spawn(worker);
        }
    });
    let mut report = ExperimentReport::new();
    for r in results.into_inner().expect("no worker panicked") {
        report.merge(r.expect("every run executed")?)?;
    }
    Ok(report)
}

pub fn context_label(cfg: &ExperimentConfig) -> String {
    match &cfg.source {
        DataSource::Synthetic { context, .. } => context.to_string(),
        DataSource::Table(_) => "table".into(),
    }
}

/// `None` on a dry run, after the configuration and data have been checked.
pub fn experiment(cfg: &RunConfig, jobs: usize, dry_run: bool) -> Result<Option<ExperimentReport>> {
    let ecfg = cfg.experiment()?;
    let data = ecfg.dataset()?;
    if dry_run {
        return Ok(None);
    }
    let report = run_parallel(&ecfg, &data, cfg.model.kind, jobs)?;
    let dir = cfg.out_dir();
    io::write_text(&dir.join("report.csv"), &output::report_csv(&report, &context_label(&ecfg)))?;
    io::write_text(&dir.join("summary.json"), &output::summary_json(&report))?;
    for (name, text) in output::curve_files(&report) {
        io::write_text(&dir.join("curves").join(name), &text)?;
    }
    Ok(Some(report))
}

/// Console table; with `plot_dir`, also one `<metric>.csv` per metric.
pub fn report(path: &Path, plot_dir: Option<&Path>) -> Result<String> {
    let (report, _) = output::parse_report_csv(&io::read_text(path)?, path)?;
    if let Some(dir) = plot_dir {
        for (metric, text) in output::plot_data(&report) {
            io::write_text(&dir.join(format!("{metric}.csv")), &text)?;
        }
    }
    Ok(output::table(&report))
}
