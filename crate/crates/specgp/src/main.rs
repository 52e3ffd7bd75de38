use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use specgp::commands::{cmd_analyze, cmd_classify, cmd_eval_ts, cmd_train};
use specgp::{CliError, ExperimentConfig};
use specgp_core::indices::Baseline;

#[derive(Parser)]
#[command(
    name = "specgp",
    version,
    about = "Evolve and evaluate spectral indices with genetic programming"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve an index on the training window of a pixel CSV.
    Train(Flags),
    /// Classify pixels with one index using a nearest-centroid rule.
    Classify(Flags),
    /// Compare indices on time series with DTW 1-NN and 5x2 cross-validation.
    EvalTs(Flags),
    /// Band and formula-element frequencies of a population or a directory of indices.
    Analyze(Flags),
}

#[derive(Args)]
struct Flags {
    /// key = value config file; flags given here take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["landsat", "modis"])]
    schema: Option<String>,
    /// Pixel CSV: area_id,year_month,label,<bands in schema order>.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Index file; repeatable. For analyze, a population file or directory.
    #[arg(long)]
    index: Vec<PathBuf>,
    /// Built-in index; repeatable.
    #[arg(long, value_parser = Baseline::parse)]
    baseline: Vec<Baseline>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Individuals and element rows to report in analyze.
    #[arg(long)]
    k: Option<usize>,
}

impl Flags {
    fn into_config(self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if self.schema.is_some() {
            cfg.schema = self.schema;
        }
        if self.data.is_some() {
            cfg.data = self.data;
        }
        if !self.index.is_empty() {
            cfg.indices = self.index;
        }
        if !self.baseline.is_empty() {
            cfg.baselines = self.baseline;
        }
        if let Some(seed) = self.seed {
            cfg.gp.seed = seed;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(f) => {
            let r = cmd_train(&f.into_config()?)?;
            println!("best fitness: {}", r.best.score());
            println!("formula: {}", r.formula);
            println!("written: {}", r.index_path.display());
        }
        Command::Classify(f) => {
            let r = cmd_classify(&f.into_config()?)?;
            let pct = |v: Option<f64>| v.map_or("n/a".into(), |x| format!("{:.2}", 100.0 * x));
            println!(
                "{}: normalized accuracy {} over {} pixels (producer {} / {})",
                r.method,
                pct(r.summary.normalized),
                r.eval_rows,
                pct(r.summary.producer[0]),
                pct(r.summary.producer[1])
            );
        }
        Command::EvalTs(f) => {
            let r = cmd_eval_ts(&f.into_config()?)?;
            for (i, m) in r.methods.iter().enumerate() {
                let glyph = if i == 0 {
                    ""
                } else {
                    r.verdicts.comparisons[i - 1].verdict.glyph()
                };
                println!(
                    "{:<20} {:6.2} \u{b1} {:5.2} {glyph}",
                    m.name,
                    100.0 * m.mean,
                    100.0 * m.std
                );
            }
            println!("Friedman p = {:.4e}", r.verdicts.friedman.p_value);
        }
        Command::Analyze(f) => {
            let r = cmd_analyze(&f.into_config()?)?;
            println!("{} individuals ({})", r.individuals, r.schema);
            for (e, n) in &r.elements {
                println!("{n:>5}  {e}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
