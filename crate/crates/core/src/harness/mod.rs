//! Orchestration: training with top-checkpoint retention, offline greedy
//! evaluation, the seven-way algorithm comparison, and the report files
//! they emit.

mod config;
mod plots;
mod report;

pub use config::Settings;
pub use plots::emit_plots;
pub use report::{
    group_runs, read_runs_csv, read_usage_csv, solution_set, usage_by_generation, usage_totals,
    RunRecord,
};

use crate::agent::{
    epsilon_schedule, layer_sizes, load_checkpoint, save_checkpoint, AgentError, CheckpointMeta,
    QNetwork, Trainer,
};
use crate::env::{run_episode, EpisodeLog, Policy};
use crate::metrics::{igd, spacing};
use crate::operators::OperatorId;
use crate::problems::{Problem, ProblemId};
use crate::rng::{derive_seed, fnv1a, stream, Purpose};
use crate::types::RunConfig;
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Seed-derivation tags: algorithms take 0..=6, these take the rest.
const TRAIN_STREAM: u64 = 7;
const VALIDATION_STREAM: u64 = 8;

/// Runs used to pick among retained checkpoints at comparison time.
const VALIDATION_RUNS: usize = 5;

/// Front sample counts for the IGD reference set.
fn front_size(n_obj: usize) -> usize {
    if n_obj == 2 {
        1000
    } else {
        10_000
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> HarnessError {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn checkpoint(path: &Path, err: AgentError) -> HarnessError {
        match err {
            AgentError::Io(e) => HarnessError::io(path, e),
            other => HarnessError::io(
                path,
                std::io::Error::new(std::io::ErrorKind::InvalidData, other.to_string()),
            ),
        }
    }

    /// Process exit code contract: 1 usage, 2 I/O, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 1,
            HarnessError::Io { .. } => 2,
            HarnessError::Numeric(_) => 3,
        }
    }
}

/// The compared algorithms: the trained selector, each operator fixed, and
/// uniform random selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Rlmoea,
    Fixed(OperatorId),
    Random,
}

impl Algorithm {
    /// Comparison row order.
    pub fn all() -> [Algorithm; 7] {
        [
            Algorithm::Rlmoea,
            Algorithm::Fixed(OperatorId::Eo),
            Algorithm::Fixed(OperatorId::Woa),
            Algorithm::Fixed(OperatorId::Tlbo),
            Algorithm::Fixed(OperatorId::Es),
            Algorithm::Fixed(OperatorId::Ga),
            Algorithm::Random,
        ]
    }

    pub fn baselines() -> [Algorithm; 6] {
        [
            Algorithm::Fixed(OperatorId::Eo),
            Algorithm::Fixed(OperatorId::Woa),
            Algorithm::Fixed(OperatorId::Tlbo),
            Algorithm::Fixed(OperatorId::Es),
            Algorithm::Fixed(OperatorId::Ga),
            Algorithm::Random,
        ]
    }

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Rlmoea => "r2-rlmoea",
            Algorithm::Fixed(OperatorId::Eo) => "r2-eo",
            Algorithm::Fixed(OperatorId::Woa) => "r2-woa",
            Algorithm::Fixed(OperatorId::Tlbo) => "r2-tlbo",
            Algorithm::Fixed(OperatorId::Es) => "r2-es",
            Algorithm::Fixed(OperatorId::Ga) => "r2-ga",
            Algorithm::Random => "random-op",
        }
    }

    /// Stable tag separating seed streams per algorithm.
    pub fn seed_tag(self) -> u64 {
        Algorithm::all()
            .iter()
            .position(|a| *a == self)
            .expect("algorithm in roster") as u64
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Algorithm, String> {
        Algorithm::all()
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| {
                let labels: Vec<&str> = Algorithm::all().iter().map(|a| a.label()).collect();
                format!("unknown algorithm {s:?}; expected one of {labels:?}")
            })
    }
}

/// Short fingerprint of the configuration, stored in checkpoint metadata.
pub fn config_hash(cfg: &RunConfig) -> String {
    format!("{:016x}", fnv1a(format!("{cfg:?}").as_bytes()))
}

fn ensure_dir(path: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(path).map_err(|e| HarnessError::io(path, e))
}

pub struct TrainOutcome {
    pub curve_path: PathBuf,
    /// Retained checkpoints, best total reward first.
    pub checkpoints: Vec<(PathBuf, CheckpointMeta)>,
}

/// Trains the selector on one problem for `n_game` episodes. Checkpoint
/// candidacy opens after 80% of the games; the top five episodes by total
/// reward (earlier game wins ties) are kept and written out, alongside a
/// per-game training curve.
pub fn train(settings: &Settings) -> Result<TrainOutcome, HarnessError> {
    let problem_id = settings
        .problem
        .ok_or_else(|| HarnessError::Usage("train requires a problem (problem=UFk)".into()))?;
    let problem = Problem::new(problem_id);
    let cfg = &settings.run;
    ensure_dir(&settings.out_dir)?;

    let mut net_rng = stream(cfg.seed, Purpose::NetInit, 0);
    let mut trainer = Trainer::new(cfg, &mut net_rng);
    let mut curve = String::from("game,total_reward,epsilon\n");
    let mut retained: Vec<(f64, usize, QNetwork)> = Vec::new();
    let window_start = 0.8 * cfg.n_game as f64;

    for game in 0..cfg.n_game {
        let episode_seed = derive_seed(
            cfg.seed,
            &[problem_id as u64, TRAIN_STREAM, game as u64],
        );
        let log = run_episode(
            &problem,
            Policy::Train {
                trainer: &mut trainer,
                game_index: game,
            },
            cfg,
            &settings.params,
            episode_seed,
        )
        .map_err(|e| HarnessError::Numeric(e.to_string()))?;
        curve.push_str(&format!(
            "{game},{},{}\n",
            log.total_reward,
            epsilon_schedule(game, cfg)
        ));
        if game as f64 >= window_start {
            retained.push((log.total_reward, game, trainer.main.clone()));
            retained.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            retained.truncate(5);
        }
    }

    let curve_path = settings.out_dir.join("training_curve.csv");
    std::fs::write(&curve_path, curve).map_err(|e| HarnessError::io(&curve_path, e))?;

    let hash = config_hash(cfg);
    let mut checkpoints = Vec::new();
    for (i, (total_reward, game, net)) in retained.iter().enumerate() {
        let path = settings.out_dir.join(format!("checkpoint_{}.ckpt", i + 1));
        let meta = CheckpointMeta {
            seed: cfg.seed,
            game_index: *game as u64,
            total_reward: *total_reward,
            config_hash: hash.clone(),
        };
        save_checkpoint(&path, net, &meta).map_err(|e| HarnessError::checkpoint(&path, e))?;
        checkpoints.push((path, meta));
    }
    Ok(TrainOutcome {
        curve_path,
        checkpoints,
    })
}

fn check_architecture(net: &QNetwork, cfg: &RunConfig, path: &Path) -> Result<(), HarnessError> {
    let expected = layer_sizes(cfg);
    let mut actual = vec![net.input_width()];
    actual.extend(net.layers.iter().map(|l| l.rows));
    if actual != expected {
        return Err(HarnessError::Usage(format!(
            "{}: checkpoint layer widths {actual:?} do not match configured {expected:?}",
            path.display()
        )));
    }
    Ok(())
}

/// Greedy episodes for one (problem, algorithm) cell, parallel over runs,
/// each with its own derived seed.
fn eval_runs(
    problem: &Problem,
    algorithm: Algorithm,
    net: Option<&QNetwork>,
    settings: &Settings,
) -> Result<Vec<(RunRecord, EpisodeLog)>, HarnessError> {
    let cfg = &settings.run;
    let front = problem.pareto_front_samples(front_size(problem.n_obj()));
    (0..settings.runs)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(
                cfg.seed,
                &[problem.id() as u64, algorithm.seed_tag(), run as u64],
            );
            let policy = match algorithm {
                Algorithm::Rlmoea => Policy::Eval(net.expect("network resolved")),
                Algorithm::Fixed(op) => Policy::FixedOp(op),
                Algorithm::Random => Policy::RandomOp,
            };
            let log = run_episode(problem, policy, cfg, &settings.params, seed)
                .map_err(|e| HarnessError::Numeric(e.to_string()))?;
            let set = solution_set(&log.final_population);
            let igd_value =
                igd(&set, &front).map_err(|e| HarnessError::Numeric(e.to_string()))?;
            // A singleton front has no spread to measure; record zero rather
            // than failing the whole run over it.
            let sp_value = if set.len() < 2 {
                0.0
            } else {
                spacing(&set).map_err(|e| HarnessError::Numeric(e.to_string()))?
            };
            Ok((
                RunRecord {
                    problem: problem.id(),
                    algorithm,
                    run,
                    seed,
                    igd: igd_value,
                    sp: sp_value,
                },
                log,
            ))
        })
        .collect()
}

/// Evaluates one checkpoint on one problem over `runs` greedy episodes and
/// writes the per-run and summary CSVs.
pub fn evaluate(settings: &Settings) -> Result<Vec<RunRecord>, HarnessError> {
    let problem_id = settings
        .problem
        .ok_or_else(|| HarnessError::Usage("evaluate requires a problem (problem=UFk)".into()))?;
    let path = settings
        .checkpoint
        .as_ref()
        .ok_or_else(|| HarnessError::Usage("evaluate requires a checkpoint path".into()))?;
    let (net, _) = load_checkpoint(path).map_err(|e| HarnessError::checkpoint(path, e))?;
    check_architecture(&net, &settings.run, path)?;

    let problem = Problem::new(problem_id);
    ensure_dir(&settings.out_dir)?;
    let results = eval_runs(&problem, Algorithm::Rlmoea, Some(&net), settings)?;
    let records: Vec<RunRecord> = results.iter().map(|(r, _)| r.clone()).collect();
    report::write_runs_csv(&settings.out_dir.join("runs.csv"), &records)?;
    report::write_summary_csv(&settings.out_dir.join("summary.csv"), &records)?;
    if settings.episode_logs {
        for (r, log) in &results {
            report::write_episode_log(&settings.out_dir, r.problem, r.algorithm, r.run, log)?;
        }
    }
    Ok(records)
}

/// Picks a concrete network for a problem: a file loads directly; a
/// directory of retained checkpoints is swept with a small validation run
/// set and the lowest mean IGD wins, the choice logged to
/// checkpoint_selection.csv.
fn resolve_checkpoint(
    path: &Path,
    problem: &Problem,
    settings: &Settings,
    selection_log: &mut String,
) -> Result<QNetwork, HarnessError> {
    if !path.is_dir() {
        let (net, _) = load_checkpoint(path).map_err(|e| HarnessError::checkpoint(path, e))?;
        check_architecture(&net, &settings.run, path)?;
        return Ok(net);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| HarnessError::io(path, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("checkpoint_") && n.ends_with(".ckpt"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(HarnessError::io(
            path,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no checkpoint_*.ckpt files in directory",
            ),
        ));
    }

    let cfg = &settings.run;
    let front = problem.pareto_front_samples(front_size(problem.n_obj()));
    let mut best: Option<(f64, usize, QNetwork, CheckpointMeta)> = None;
    let mut rows = Vec::new();
    for (idx, file) in files.iter().enumerate() {
        let (net, meta) = load_checkpoint(file).map_err(|e| HarnessError::checkpoint(file, e))?;
        check_architecture(&net, cfg, file)?;
        let igds: Vec<f64> = (0..VALIDATION_RUNS)
            .into_par_iter()
            .map(|k| {
                let seed = derive_seed(
                    cfg.seed,
                    &[problem.id() as u64, VALIDATION_STREAM, k as u64],
                );
                let log = run_episode(problem, Policy::Eval(&net), cfg, &settings.params, seed)
                    .map_err(|e| HarnessError::Numeric(e.to_string()))?;
                igd(&solution_set(&log.final_population), &front)
                    .map_err(|e| HarnessError::Numeric(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let mean = igds.iter().sum::<f64>() / igds.len() as f64;
        rows.push((file.clone(), meta.game_index, mean));
        let better = match &best {
            None => true,
            Some((b, _, _, _)) => mean < *b,
        };
        if better {
            best = Some((mean, idx, net, meta));
        }
    }
    let (_, chosen_idx, net, _) = best.expect("at least one checkpoint");
    for (i, (file, game, mean)) in rows.iter().enumerate() {
        selection_log.push_str(&format!(
            "{},{},{game},{mean},{}\n",
            problem.id(),
            file.file_name().unwrap().to_string_lossy(),
            i == chosen_idx
        ));
    }
    Ok(net)
}

/// Runs the full comparison: every algorithm on every requested problem,
/// emitting per-run, summary, Friedman, and operator-usage CSVs.
pub fn compare(settings: &Settings) -> Result<Vec<RunRecord>, HarnessError> {
    let problems: Vec<ProblemId> = match settings.problem {
        Some(p) => vec![p],
        None => ProblemId::all().to_vec(),
    };
    let algorithms: Vec<Algorithm> = match (settings.algorithm, settings.baselines_only) {
        (Some(Algorithm::Rlmoea), true) => {
            return Err(HarnessError::Usage(
                "algorithm=r2-rlmoea contradicts baselines_only".into(),
            ))
        }
        (Some(a), _) => vec![a],
        (None, true) => Algorithm::baselines().to_vec(),
        (None, false) => Algorithm::all().to_vec(),
    };
    let needs_checkpoint = algorithms.contains(&Algorithm::Rlmoea);
    if needs_checkpoint && settings.checkpoint.is_none() {
        return Err(HarnessError::Usage(
            "compare requires a checkpoint (or baselines_only=true)".into(),
        ));
    }
    ensure_dir(&settings.out_dir)?;

    let mut all_records: Vec<RunRecord> = Vec::new();
    let mut usage_files: Vec<(Algorithm, String)> = algorithms
        .iter()
        .map(|&a| (a, format!("{}\n", report::USAGE_HEADER)))
        .collect();
    let mut totals_csv = String::from("problem,algorithm,pct_eo,pct_woa,pct_tlbo,pct_es,pct_ga\n");
    let mut selection_log = String::from("problem,checkpoint,game_index,mean_igd,selected\n");
    let mut wrote_selection = false;

    for &problem_id in &problems {
        let problem = Problem::new(problem_id);
        for &algorithm in &algorithms {
            let net = if algorithm == Algorithm::Rlmoea {
                let path = settings.checkpoint.as_ref().unwrap();
                if path.is_dir() {
                    wrote_selection = true;
                }
                Some(resolve_checkpoint(path, &problem, settings, &mut selection_log)?)
            } else {
                None
            };
            let results = eval_runs(&problem, algorithm, net.as_ref(), settings)?;
            let logs: Vec<&EpisodeLog> = results.iter().map(|(_, l)| l).collect();
            let rows = usage_by_generation(&logs);
            let buf = &mut usage_files
                .iter_mut()
                .find(|(a, _)| *a == algorithm)
                .unwrap()
                .1;
            report::push_usage_rows(buf, problem_id, &rows);
            let totals = usage_totals(&logs);
            totals_csv.push_str(&format!("{problem_id},{}", algorithm.label()));
            for v in totals {
                totals_csv.push_str(&format!(",{v}"));
            }
            totals_csv.push('\n');
            if settings.episode_logs {
                for (r, log) in &results {
                    report::write_episode_log(&settings.out_dir, r.problem, r.algorithm, r.run, log)?;
                }
            }
            all_records.extend(results.into_iter().map(|(r, _)| r));
        }
    }

    report::write_runs_csv(&settings.out_dir.join("runs.csv"), &all_records)?;
    report::write_summary_csv(&settings.out_dir.join("summary.csv"), &all_records)?;
    // A rank test over a single column is vacuous, so the restricted
    // single-algorithm mode skips it.
    if algorithms.len() >= 2 {
        report::write_friedman_csv(
            &settings.out_dir.join("friedman.csv"),
            &all_records,
            &algorithms,
        )?;
    }
    for (algorithm, buf) in usage_files {
        let path = settings
            .out_dir
            .join(format!("operator_usage_{}.csv", algorithm.label()));
        std::fs::write(&path, buf).map_err(|e| HarnessError::io(&path, e))?;
    }
    let totals_path = settings.out_dir.join("operator_usage_totals.csv");
    std::fs::write(&totals_path, totals_csv).map_err(|e| HarnessError::io(&totals_path, e))?;
    if wrote_selection {
        let sel_path = settings.out_dir.join("checkpoint_selection.csv");
        std::fs::write(&sel_path, selection_log).map_err(|e| HarnessError::io(&sel_path, e))?;
    }
    Ok(all_records)
}
