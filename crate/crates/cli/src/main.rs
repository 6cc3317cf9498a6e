use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use ratelab_core::lab::{run, Experiment, ExperimentConfig};

/// Run a convergence-rate experiment and write its CSV and summary.
#[derive(Debug, Parser)]
#[command(name = "ratelab", version)]
struct Cli {
    /// clt | harper | voronovskaja | bound-table
    experiment: String,
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    /// Comma-separated list of n values
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// CSV output path; the summary goes next to it with a .summary.txt suffix
    #[arg(long)]
    out: Option<PathBuf>,
}

fn summary_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.summary.txt"))
}

fn load(cli: &Cli) -> Result<ExperimentConfig, String> {
    let experiment: Experiment = cli.experiment.parse().map_err(|e| format!("{e}"))?;
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?,
        None => String::new(),
    };
    let mut cfg = ExperimentConfig::parse(&text, Some(experiment)).map_err(|e| format!("config: {e}"))?;
    let overrides = [
        ("d", cli.d.map(|v| v.to_string())),
        ("t", cli.t.map(|v| v.to_string())),
        ("n_list", cli.n.clone()),
        ("lambda", cli.lambda.map(|v| v.to_string())),
        ("b", cli.b.map(|v| v.to_string())),
        ("out", cli.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v).map_err(|e| format!("--{key}: {e}"))?;
        }
    }
    cfg.validate().map_err(|e| format!("config: {e}"))?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("ratelab: {msg}");
            return ExitCode::from(1);
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("ratelab: {} failed: {e}", cfg.experiment);
            return ExitCode::from(1);
        }
    };
    let csv = outcome.to_csv();
    let summary = outcome.summary();
    match &cfg.out {
        Some(path) => {
            let sp = summary_path(path);
            let written = fs::write(path, &csv).and_then(|_| fs::write(&sp, &summary));
            if let Err(e) = written {
                eprintln!("ratelab: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            print!("{summary}");
        }
        None => {
            print!("{csv}");
            println!();
            print!("{summary}");
        }
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
