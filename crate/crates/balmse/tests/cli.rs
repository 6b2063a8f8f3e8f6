use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use balmse::checkpoint::Checkpoint;
use balmse::RunConfig;

fn balmse(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_balmse"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL_EXPERIMENT: &str = r#"
seed = 5

[data]
context = "balanced"
n = 1500

[experiment]
runs = 2
epochs = [2, 4]
"#;

#[test]
fn generate_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    ok(&balmse(dir.path(), &["generate", "--n", "50", "--seed", "3", "--out", "a.csv"]));
    ok(&balmse(dir.path(), &["generate", "--n", "50", "--seed", "3", "--out", "b.csv"]));
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 51);
    let schema = fs::read_to_string(dir.path().join("a.schema")).unwrap();
    let kinds: Vec<&str> = schema.lines().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(kinds.iter().filter(|&&k| k != "target").count(), 8);
    assert_eq!(kinds.iter().filter(|&&k| k == "numeric").count(), 3);
    assert_eq!(kinds.last(), Some(&"target"));

    let other = balmse(dir.path(), &["generate", "--n", "50", "--seed", "4", "--out", "c.csv"]);
    ok(&other);
    assert_ne!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("c.csv")).unwrap());
}

#[test]
fn train_writes_ten_checkpoints_per_feature() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "seed = 1\n[data]\nn = 1000\n[model]\nloss = \"balanced\"\nepochs = 7\n";
    fs::write(dir.path().join("run.toml"), cfg).unwrap();
    ok(&balmse(dir.path(), &["train", "--config", "run.toml", "--out", "m"]));
    let curves = fs::read_to_string(dir.path().join("m/curves.csv")).unwrap();
    let mut per_feature = std::collections::BTreeMap::<String, usize>::new();
    for line in curves.lines().skip(1) {
        *per_feature.entry(line.split(',').nth(2).unwrap().to_string()).or_default() += 1;
    }
    assert!(per_feature.len() > 30);
    assert!(per_feature.values().all(|&c| c == 10), "{per_feature:?}");
    let ckpt = Checkpoint::parse(&fs::read_to_string(dir.path().join("m/model.ckpt")).unwrap()).unwrap();
    assert_eq!(ckpt.header.kind, "autoencoder");
    assert_eq!(ckpt.header.loss, "balanced");
    assert_eq!(ckpt.networks.len(), 2);
    assert_eq!(ckpt.networks[0].input_width(), ckpt.networks[1].output_width());

    // same inputs, same bytes
    let first = fs::read(dir.path().join("m/model.ckpt")).unwrap();
    ok(&balmse(dir.path(), &["train", "--config", "run.toml", "--out", "m"]));
    assert_eq!(first, fs::read(dir.path().join("m/model.ckpt")).unwrap());
}

#[test]
fn train_vae_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    ok(&balmse(dir.path(), &["generate", "--n", "1000", "--out", "d.csv"]));
    let cfg = "[data]\ninput = \"d.csv\"\n[model]\nkind = \"vae\"\n[vae]\nepochs = 3\n";
    fs::write(dir.path().join("vae.toml"), cfg).unwrap();
    let out = balmse(dir.path(), &["train", "--config", "vae.toml", "--out", "v"]);
    ok(&out);
    let curves = fs::read_to_string(dir.path().join("v/curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 11);
    let ckpt = Checkpoint::parse(&fs::read_to_string(dir.path().join("v/model.ckpt")).unwrap()).unwrap();
    assert_eq!(ckpt.networks.len(), 6);
}

#[test]
fn empty_category_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.csv"), "a,b\n1.0,x\n2.0,y\n3.0,x\n").unwrap();
    fs::write(dir.path().join("t.schema"), "a,numeric\nb,categorical,x|y|z\n").unwrap();
    fs::write(dir.path().join("c.toml"), "[data]\ninput = \"t.csv\"\n[model]\nepochs = 1\n").unwrap();
    let out = balmse(dir.path(), &["train", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = stderr(&out);
    assert!(msg.contains('b') && msg.contains('z'), "{msg}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "[model]\nepoch = 5\n").unwrap();
    let out = balmse(dir.path(), &["train", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("epoch"));
    let out = balmse(dir.path(), &["train", "--config", "missing.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let out = balmse(dir.path(), &["experiment", "--loss", "blended:2", "--dry-run"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_dump_spells_out_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = balmse(dir.path(), &["config", "dump"]);
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["seed", "[data]", "context", "[model]", "learning_rate", "[vae]", "dim_hl", "[experiment]", "runs", "[output]"] {
        assert!(text.contains(key), "missing {key}");
    }
    assert_eq!(RunConfig::parse(&text).unwrap(), RunConfig::default());

    let json = balmse(dir.path(), &["config", "dump", "--json", "--seed", "9"]);
    ok(&json);
    let parsed = RunConfig::parse(&String::from_utf8(json.stdout).unwrap()).unwrap();
    assert_eq!(parsed, RunConfig { seed: 9, ..RunConfig::default() });
}

#[test]
fn dry_run_trains_nothing() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("e.toml"), SMALL_EXPERIMENT).unwrap();
    let out = balmse(dir.path(), &["experiment", "--config", "e.toml", "--dry-run", "--out", "r"]);
    ok(&out);
    assert!(!dir.path().join("r").exists());
}

#[test]
fn experiment_report_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("e.toml"), SMALL_EXPERIMENT).unwrap();
    ok(&balmse(p, &["experiment", "--config", "e.toml", "--out", "r1"]));
    ok(&balmse(p, &["experiment", "--config", "e.toml", "--out", "r2", "--jobs", "2"]));
    for f in ["report.csv", "summary.json", "curves/run_0_standard.csv", "curves/run_1_balanced.csv"] {
        assert_eq!(fs::read(p.join("r1").join(f)).unwrap(), fs::read(p.join("r2").join(f)).unwrap(), "{f}");
    }

    let report = fs::read_to_string(p.join("r1/report.csv")).unwrap();
    let mut cells = std::collections::BTreeSet::new();
    for line in report.lines().skip(1) {
        let c: Vec<&str> = line.split(',').collect();
        assert_eq!(c[1], "balanced");
        cells.insert((c[2].to_string(), c[3].to_string(), c[4].to_string()));
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("r1/summary.json")).unwrap()).unwrap();
    let mut summary_cells = 0;
    for (_, losses) in summary.as_object().unwrap() {
        for (_, metrics) in losses.as_object().unwrap() {
            for (_, cell) in metrics.as_object().unwrap() {
                assert_eq!(cell["count"], 2);
                assert!(cell["mean"].is_f64() && cell["std"].is_f64());
                summary_cells += 1;
            }
        }
    }
    assert_eq!(summary_cells, cells.len());
    assert!(summary["4"]["balanced"]["msem"]["mean"].as_f64().unwrap() > 0.0);

    let curves = fs::read_to_string(p.join("r1/curves/run_0_standard.csv")).unwrap();
    assert!(curves.starts_with("epochs,checkpoint,epoch,feature,error\n"));

    let out = balmse(p, &["report", "r1/report.csv", "--plot-data", "plots"]);
    ok(&out);
    let table = String::from_utf8(out.stdout).unwrap();
    assert_eq!(table.lines().count(), 1 + cells.len());
    let msem = fs::read_to_string(p.join("plots/msem.csv")).unwrap();
    let epochs: Vec<usize> = msem.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(epochs, [2, 2, 4, 4]);
}

#[test]
fn report_on_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = balmse(dir.path(), &["report", "nope.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("nope.csv"));
}
