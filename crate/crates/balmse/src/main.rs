use std::path::PathBuf;
use std::process::ExitCode;

use balmse::config::ModelKind;
use balmse::{commands, CliError, RunConfig};
use balmse_core::losses::LossKind;
use balmse_core::tabular::{SyntheticContext, SYNTHETIC_COEFF_COUNT};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "balmse", version, about = "Balanced-MSE autoencoders for mixed tabular data")]
struct Cli {
    /// TOML or JSON run configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (for `generate`, the CSV path).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic sample and its schema sidecar.
    Generate {
        #[arg(long, default_value = "imbalanced")]
        context: SyntheticContext,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Nine comma-separated target coefficients.
        #[arg(long, value_delimiter = ',')]
        coeffs: Option<Vec<f64>>,
    },
    /// Train one model on the configured data.
    Train(TrainArgs),
    /// Repeated train/test runs per loss; writes report.csv and summary.json.
    Experiment {
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Check the configuration and data, then stop.
        #[arg(long)]
        dry_run: bool,
    },
    /// Summarize a report.csv.
    Report {
        path: PathBuf,
        /// Directory for per-metric `epochs,loss,mean,std,count` files.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Configuration helpers.
    Config {
        #[command(subcommand)]
        action: ConfigAction,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// Epoch budget; experiments take a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    epochs: Option<Vec<usize>>,
    /// standard, balanced, blended:<alpha> or ce; experiments take a list.
    #[arg(long, value_delimiter = ',')]
    loss: Option<Vec<LossKind>>,
}

#[derive(Subcommand)]
enum ConfigAction {
    /// Print the effective configuration with every default spelled out.
    Dump {
        #[arg(long)]
        json: bool,
    },
}

fn single<T: Copy>(values: &[T], flag: &str) -> Result<T, CliError> {
    match values {
        [v] => Ok(*v),
        _ => Err(CliError::Config(format!("--{flag} takes one value here"))),
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.display().to_string();
    }
    Ok(cfg)
}

fn apply_train(cfg: &mut RunConfig, args: &TrainArgs) -> Result<(), CliError> {
    if let Some(e) = &args.epochs {
        let e = single(e, "epochs")?;
        cfg.model.epochs = e;
        cfg.vae.epochs = e;
    }
    if let Some(l) = &args.loss {
        cfg.model.loss = single(l, "loss")?.to_string();
    }
    Ok(())
}

fn apply_experiment(cfg: &mut RunConfig, args: &TrainArgs) -> Result<(), CliError> {
    if let Some(e) = &args.epochs {
        if cfg.model.kind == ModelKind::Vae {
            cfg.vae.epochs = single(e, "epochs")?;
        }
        cfg.experiment.epochs = e.clone();
    }
    if let Some(l) = &args.loss {
        cfg.experiment.losses = l.iter().map(|l| l.to_string()).collect();
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = load(&cli)?;
    match &cli.command {
        Command::Generate { context, n, coeffs } => {
            let coeffs = coeffs.clone().unwrap_or_else(|| vec![1.0; SYNTHETIC_COEFF_COUNT]);
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("data.csv"));
            let data = commands::generate(*context, *n, cfg.seed, &coeffs, &out)?;
            eprintln!("wrote {} rows to {}", data.n(), out.display());
        }
        Command::Train(args) => {
            apply_train(&mut cfg, args)?;
            let t = commands::train(&cfg)?;
            println!("final training loss {:.6}", t.final_loss);
            println!("checkpoint {}", t.checkpoint.display());
            println!("curves {}", t.curves.display());
        }
        Command::Experiment { train, jobs, dry_run } => {
            apply_experiment(&mut cfg, train)?;
            match commands::experiment(&cfg, *jobs, *dry_run)? {
                None => println!("configuration ok"),
                Some(report) => {
                    println!("{} report rows in {}", report.len(), cfg.out_dir().display());
                }
            }
        }
        Command::Report { path, plot_data } => {
            print!("{}", commands::report(path, plot_data.as_deref())?);
        }
        Command::Config {
            action: ConfigAction::Dump { json },
        } => {
            if *json {
                print!("{}", cfg.to_json());
            } else {
                print!("{}", cfg.to_toml());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
