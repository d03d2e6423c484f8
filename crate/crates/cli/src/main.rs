//! Command-line front end: train the operator-selection agent, evaluate a
//! checkpoint, run the full baseline comparison, or render report plots.

use clap::{Args, Parser, Subcommand};
use r2moea_core::harness::{self, HarnessError, Settings};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "r2moea", version, about = "R2-ranked multi-objective optimization with a learned operator selector")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Values layer over the config file,
/// which layers over built-in defaults.
#[derive(Args)]
struct Common {
    /// Flat key=value configuration file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Root seed for all derived run seeds
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for reports, checkpoints, and plots
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Independent runs per (problem, algorithm) cell
    #[arg(long)]
    runs: Option<usize>,
    /// Benchmark problem (UF1..UF10)
    #[arg(long)]
    problem: Option<String>,
    /// Restrict compare to one algorithm (r2-rlmoea, r2-eo, ..., random-op)
    #[arg(long)]
    algorithm: Option<String>,
    /// Checkpoint file, or a directory of retained checkpoints to select from
    #[arg(long, value_name = "PATH")]
    checkpoint: Option<PathBuf>,
    /// Skip the trained agent and compare the six baselines only
    #[arg(long)]
    baselines_only: bool,
    /// Write per-run generation logs (operator, reward, state features)
    #[arg(long)]
    episode_logs: bool,
    /// Extra key=value override, repeatable; same keys as the config file
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the selector on one problem and retain the best checkpoints
    Train(Common),
    /// Evaluate a checkpoint on one problem over repeated runs
    Evaluate(Common),
    /// Compare the trained agent against fixed-operator and random baselines
    Compare(Common),
    /// Render box plots and operator-usage charts from an existing report
    Plot(Common),
}

impl Common {
    fn into_settings(self) -> Result<Settings, HarnessError> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            s.apply_file(path)?;
        }
        if let Some(seed) = self.seed {
            s.run.seed = seed;
        }
        if let Some(out) = self.out {
            s.out_dir = out;
        }
        if let Some(runs) = self.runs {
            s.runs = runs;
        }
        if let Some(problem) = &self.problem {
            s.apply_kv("problem", problem)?;
        }
        if let Some(algorithm) = &self.algorithm {
            s.apply_kv("algorithm", algorithm)?;
        }
        if let Some(ckpt) = self.checkpoint {
            s.checkpoint = Some(ckpt);
        }
        if self.baselines_only {
            s.baselines_only = true;
        }
        if self.episode_logs {
            s.episode_logs = true;
        }
        for pair in &self.set {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                HarnessError::Usage(format!("--set expects KEY=VALUE, got {pair:?}"))
            })?;
            s.apply_kv(key.trim(), value.trim())?;
        }
        s.validated()
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Train(common) => {
            let settings = common.into_settings()?;
            let outcome = harness::train(&settings)?;
            println!("wrote {}", outcome.curve_path.display());
            for (path, meta) in &outcome.checkpoints {
                println!(
                    "wrote {} (game {}, total reward {})",
                    path.display(),
                    meta.game_index,
                    meta.total_reward
                );
            }
        }
        Command::Evaluate(common) => {
            let settings = common.into_settings()?;
            let records = harness::evaluate(&settings)?;
            report_means(&records);
            println!("reports in {}", settings.out_dir.display());
        }
        Command::Compare(common) => {
            let settings = common.into_settings()?;
            let records = harness::compare(&settings)?;
            report_means(&records);
            println!("reports in {}", settings.out_dir.display());
        }
        Command::Plot(common) => {
            let settings = common.into_settings()?;
            for path in harness::emit_plots(&settings.out_dir)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

/// Per-cell mean metrics, one line per (problem, algorithm) in first-seen order.
fn report_means(records: &[harness::RunRecord]) {
    for ((problem, algorithm), group) in harness::group_runs(records) {
        let n = group.len() as f64;
        let igd = group.iter().map(|r| r.igd).sum::<f64>() / n;
        let sp = group.iter().map(|r| r.sp).sum::<f64>() / n;
        println!(
            "{problem} {}: mean igd {igd:.6}, mean sp {sp:.6} over {} runs",
            algorithm.label(),
            group.len()
        );
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests exit clean; real parse errors are
            // usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
