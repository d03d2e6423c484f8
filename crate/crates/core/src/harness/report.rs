//! Persisted run artifacts: per-run and summary CSVs, Friedman tables, and
//! operator-usage accounting. Every aggregate is recomputable from the
//! per-run file alone.

use super::{Algorithm, HarnessError};
use crate::env::EpisodeLog;
use crate::metrics::{friedman, summarize};
use crate::operators::N_OPERATORS;
use crate::problems::ProblemId;
use crate::types::{Individual, Population};
use std::path::Path;

/// One evaluated episode.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: ProblemId,
    pub algorithm: Algorithm,
    pub run: usize,
    pub seed: u64,
    pub igd: f64,
    pub sp: f64,
}

/// a dominates b: no objective worse, at least one strictly better.
fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// The measured solution set: rank-1 members of the final population,
/// filtered to the mutually non-dominated subset, exact objective
/// duplicates collapsed, objectives unnormalized.
pub fn solution_set(pop: &Population) -> Vec<Vec<f64>> {
    let rank_one: Vec<&Individual> = pop.members.iter().filter(|m| m.r2_rank == 1).collect();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (i, ind) in rank_one.iter().enumerate() {
        let dominated = rank_one
            .iter()
            .enumerate()
            .any(|(j, other)| j != i && dominates(&other.f, &ind.f));
        if dominated {
            continue;
        }
        let dup = out.iter().any(|f| {
            f.len() == ind.f.len() && f.iter().zip(&ind.f).all(|(a, b)| a.to_bits() == b.to_bits())
        });
        if !dup {
            out.push(ind.f.clone());
        }
    }
    out
}

pub fn write_runs_csv(path: &Path, records: &[RunRecord]) -> Result<(), HarnessError> {
    let mut out = String::from("problem,algorithm,run,seed,igd,sp\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.problem,
            r.algorithm.label(),
            r.run,
            r.seed,
            r.igd,
            r.sp
        ));
    }
    std::fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != "problem,algorithm,run,seed,igd,sp" {
        return Err(HarnessError::Usage(format!(
            "{}: unexpected header {header:?}",
            path.display()
        )));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(HarnessError::Usage(format!(
                "{}:{}: expected 6 fields, got {}",
                path.display(),
                lineno + 2,
                fields.len()
            )));
        }
        let bad = |what: &str| {
            HarnessError::Usage(format!(
                "{}:{}: invalid {what}: {line:?}",
                path.display(),
                lineno + 2
            ))
        };
        records.push(RunRecord {
            problem: fields[0].parse().map_err(|_| bad("problem"))?,
            algorithm: fields[1].parse().map_err(|_| bad("algorithm"))?,
            run: fields[2].parse().map_err(|_| bad("run"))?,
            seed: fields[3].parse().map_err(|_| bad("seed"))?,
            igd: fields[4].parse().map_err(|_| bad("igd"))?,
            sp: fields[5].parse().map_err(|_| bad("sp"))?,
        });
    }
    Ok(records)
}

/// Groups records by (problem, algorithm) in first-appearance order.
pub fn group_runs(records: &[RunRecord]) -> Vec<((ProblemId, Algorithm), Vec<&RunRecord>)> {
    let mut groups: Vec<((ProblemId, Algorithm), Vec<&RunRecord>)> = Vec::new();
    for r in records {
        let key = (r.problem, r.algorithm);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
}

pub fn write_summary_csv(path: &Path, records: &[RunRecord]) -> Result<(), HarnessError> {
    let mut out =
        String::from("problem,algorithm,igd_mean,igd_min,igd_std,sp_mean,sp_min,sp_std\n");
    for ((problem, algorithm), rows) in group_runs(records) {
        let igds: Vec<f64> = rows.iter().map(|r| r.igd).collect();
        let sps: Vec<f64> = rows.iter().map(|r| r.sp).collect();
        let (im, ilo, istd) = summarize(&igds).expect("nonempty group");
        let (sm, slo, sstd) = summarize(&sps).expect("nonempty group");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            problem,
            algorithm.label(),
            im,
            ilo,
            istd,
            sm,
            slo,
            sstd
        ));
    }
    std::fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

/// Friedman tests per problem (blocks are runs) for both metrics, plus an
/// across-problems test on per-problem mean IGD/SP when several problems
/// are present. Columns follow `algorithms` order.
pub fn write_friedman_csv(
    path: &Path,
    records: &[RunRecord],
    algorithms: &[Algorithm],
) -> Result<(), HarnessError> {
    let mut out = String::from("problem,metric,statistic");
    for a in algorithms {
        out.push_str(&format!(",rank_{}", a.label()));
    }
    out.push('\n');

    let problems: Vec<ProblemId> = {
        let mut seen = Vec::new();
        for r in records {
            if !seen.contains(&r.problem) {
                seen.push(r.problem);
            }
        }
        seen
    };

    let pick = |p: ProblemId, a: Algorithm, metric: fn(&RunRecord) -> f64| -> Vec<f64> {
        let mut vals: Vec<(usize, f64)> = records
            .iter()
            .filter(|r| r.problem == p && r.algorithm == a)
            .map(|r| (r.run, metric(r)))
            .collect();
        vals.sort_by_key(|(run, _)| *run);
        vals.into_iter().map(|(_, v)| v).collect()
    };

    let mut emit = |label: String, table: &[Vec<f64>]| -> Result<(), HarnessError> {
        let (stat, ranks) = friedman(table).map_err(|e| HarnessError::Numeric(e.to_string()))?;
        out.push_str(&label);
        out.push_str(&format!(",{stat}"));
        for r in ranks {
            out.push_str(&format!(",{r}"));
        }
        out.push('\n');
        Ok(())
    };

    for metric_name in ["igd", "sp"] {
        let metric: fn(&RunRecord) -> f64 = match metric_name {
            "igd" => |r| r.igd,
            _ => |r| r.sp,
        };
        for &p in &problems {
            let per_alg: Vec<Vec<f64>> = algorithms.iter().map(|&a| pick(p, a, metric)).collect();
            let runs = per_alg[0].len();
            if runs < 2 || per_alg.iter().any(|v| v.len() != runs) {
                continue;
            }
            // Rows are runs, columns algorithms.
            let table: Vec<Vec<f64>> = (0..runs)
                .map(|r| per_alg.iter().map(|v| v[r]).collect())
                .collect();
            emit(format!("{p},{metric_name}"), &table)?;
        }
        if problems.len() >= 2 {
            let table: Vec<Vec<f64>> = problems
                .iter()
                .map(|&p| {
                    algorithms
                        .iter()
                        .map(|&a| {
                            let vals = pick(p, a, metric);
                            vals.iter().sum::<f64>() / vals.len() as f64
                        })
                        .collect()
                })
                .collect();
            emit(format!("all,{metric_name}"), &table)?;
        }
    }
    std::fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

/// Per-generation operator-selection percentages over a set of episodes of
/// equal length. Row k sums to 100 across the five operators.
pub fn usage_by_generation(logs: &[&EpisodeLog]) -> Vec<[f64; N_OPERATORS]> {
    let g_max = logs.first().map_or(0, |l| l.records.len());
    let mut rows = vec![[0.0; N_OPERATORS]; g_max];
    for log in logs {
        for r in &log.records {
            rows[r.generation][r.operator.index()] += 1.0;
        }
    }
    let n = logs.len() as f64;
    for row in &mut rows {
        for v in row.iter_mut() {
            *v = *v * 100.0 / n;
        }
    }
    rows
}

/// Aggregate share of each operator over all generations and runs.
pub fn usage_totals(logs: &[&EpisodeLog]) -> [f64; N_OPERATORS] {
    let mut counts = [0usize; N_OPERATORS];
    let mut total = 0usize;
    for log in logs {
        for r in &log.records {
            counts[r.operator.index()] += 1;
            total += 1;
        }
    }
    let mut out = [0.0; N_OPERATORS];
    if total > 0 {
        for (o, c) in out.iter_mut().zip(counts) {
            *o = 100.0 * c as f64 / total as f64;
        }
    }
    out
}

pub const USAGE_HEADER: &str = "problem,generation,pct_eo,pct_woa,pct_tlbo,pct_es,pct_ga";

/// Appends one problem's per-generation usage rows to `out`.
pub fn push_usage_rows(out: &mut String, problem: ProblemId, rows: &[[f64; N_OPERATORS]]) {
    for (g, row) in rows.iter().enumerate() {
        out.push_str(&format!("{problem},{g}"));
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
}

/// Per-generation operator-usage fractions, grouped by problem.
pub type UsageByProblem = Vec<(ProblemId, Vec<[f64; N_OPERATORS]>)>;

/// Reads a usage CSV back into (problem, generation rows) groups.
pub fn read_usage_csv(path: &Path) -> Result<UsageByProblem, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != USAGE_HEADER {
        return Err(HarnessError::Usage(format!(
            "{}: unexpected header {header:?}",
            path.display()
        )));
    }
    let mut groups: Vec<(ProblemId, Vec<[f64; N_OPERATORS]>)> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 + N_OPERATORS {
            return Err(HarnessError::Usage(format!(
                "{}:{}: expected {} fields",
                path.display(),
                lineno + 2,
                2 + N_OPERATORS
            )));
        }
        let problem: ProblemId = fields[0].parse().map_err(|_| {
            HarnessError::Usage(format!("{}:{}: bad problem", path.display(), lineno + 2))
        })?;
        let mut row = [0.0; N_OPERATORS];
        for (v, s) in row.iter_mut().zip(&fields[2..]) {
            *v = s.parse().map_err(|_| {
                HarnessError::Usage(format!("{}:{}: bad percentage", path.display(), lineno + 2))
            })?;
        }
        match groups.iter_mut().find(|(p, _)| *p == problem) {
            Some((_, rows)) => rows.push(row),
            None => groups.push((problem, vec![row])),
        }
    }
    Ok(groups)
}

/// Writes an episode trace CSV next to the other artifacts.
pub fn write_episode_log(
    dir: &Path,
    problem: ProblemId,
    algorithm: Algorithm,
    run: usize,
    log: &EpisodeLog,
) -> Result<(), HarnessError> {
    let path = dir.join(format!("episode_{problem}_{}_run{run}.csv", algorithm.label()));
    let mut buf = Vec::new();
    log.write_csv(&mut buf).map_err(|e| HarnessError::io(&path, e))?;
    std::fs::write(&path, buf).map_err(|e| HarnessError::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{GenerationRecord, Policy};
    use crate::operators::OperatorId;
    use crate::operators::OperatorParams;
    use crate::problems::Problem;
    use crate::types::RunConfig;

    fn record(problem: ProblemId, algorithm: Algorithm, run: usize, igd: f64) -> RunRecord {
        RunRecord {
            problem,
            algorithm,
            run,
            seed: 1000 + run as u64,
            igd,
            sp: igd / 2.0,
        }
    }

    #[test]
    fn runs_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        let records = vec![
            record(ProblemId::Uf1, Algorithm::Rlmoea, 0, 0.25),
            record(ProblemId::Uf1, Algorithm::Random, 1, 0.5),
        ];
        write_runs_csv(&path, &records).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("problem,algorithm,run,seed,igd,sp\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_runs_csv(&path).unwrap(), records);
    }

    #[test]
    fn summary_rows_match_summarize() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.csv");
        let records = vec![
            record(ProblemId::Uf2, Algorithm::Rlmoea, 0, 1.0),
            record(ProblemId::Uf2, Algorithm::Rlmoea, 1, 3.0),
        ];
        write_summary_csv(&path, &records).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let data = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = data.split(',').collect();
        assert_eq!(fields[0], "UF2");
        assert_eq!(fields[1], "r2-rlmoea");
        assert_eq!(fields[2], "2");
        assert_eq!(fields[3], "1");
        let std: f64 = fields[4].parse().unwrap();
        assert!((std - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn solution_set_keeps_only_non_dominated_rank_one() {
        let problem = Problem::new(ProblemId::Uf1);
        let cfg = RunConfig {
            n_pop: 12,
            g_max: 4,
            ..RunConfig::default()
        };
        let log = crate::env::run_episode(
            &problem,
            Policy::RandomOp,
            &cfg,
            &OperatorParams::default(),
            5,
        )
        .unwrap();
        let set = solution_set(&log.final_population);
        assert!(!set.is_empty());
        for (i, a) in set.iter().enumerate() {
            for (j, b) in set.iter().enumerate() {
                if i != j {
                    assert!(!dominates(a, b), "solution set contains a dominated point");
                }
            }
        }
    }

    #[test]
    fn usage_rows_sum_to_one_hundred() {
        let problem = Problem::new(ProblemId::Uf1);
        let cfg = RunConfig {
            n_pop: 8,
            g_max: 5,
            ..RunConfig::default()
        };
        let logs: Vec<_> = (0..3)
            .map(|s| {
                crate::env::run_episode(
                    &problem,
                    Policy::RandomOp,
                    &cfg,
                    &OperatorParams::default(),
                    s,
                )
                .unwrap()
            })
            .collect();
        let refs: Vec<&crate::env::EpisodeLog> = logs.iter().collect();
        for row in usage_by_generation(&refs) {
            let sum: f64 = row.iter().sum();
            assert!((sum - 100.0).abs() < 1e-9);
        }
        let totals = usage_totals(&refs);
        assert!((totals.iter().sum::<f64>() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn fixed_operator_usage_is_all_one_operator() {
        let log = crate::env::EpisodeLog {
            records: (0..4)
                .map(|g| GenerationRecord {
                    generation: g,
                    operator: OperatorId::Tlbo,
                    reward: 0.0,
                    quartile_mean: 0.0,
                    state: [0.0; crate::agent::N_STATES],
                })
                .collect(),
            final_population: Population {
                members: Vec::new(),
                generation: 4,
                z_star: vec![0.0; 2],
                z_nad: vec![1.0; 2],
            },
            total_reward: 0.0,
        };
        let totals = usage_totals(&[&log]);
        assert_eq!(totals[OperatorId::Tlbo.index()], 100.0);
        assert_eq!(totals.iter().sum::<f64>(), 100.0);
    }

    #[test]
    fn friedman_csv_emits_per_problem_and_overall_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("friedman.csv");
        let algorithms = [Algorithm::Rlmoea, Algorithm::Random];
        let mut records = Vec::new();
        for (pi, p) in [ProblemId::Uf1, ProblemId::Uf2].into_iter().enumerate() {
            for run in 0..3 {
                records.push(record(p, Algorithm::Rlmoea, run, 0.1 + run as f64));
                records.push(record(p, Algorithm::Random, run, 0.2 + (pi + run) as f64));
            }
        }
        write_friedman_csv(&path, &records, &algorithms).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("problem,metric,statistic,rank_r2-rlmoea,rank_random-op\n"));
        assert!(text.contains("UF1,igd,"));
        assert!(text.contains("UF2,sp,"));
        assert!(text.contains("all,igd,"));
    }

    #[test]
    fn usage_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("usage.csv");
        let rows = vec![[20.0, 20.0, 20.0, 20.0, 20.0], [50.0, 0.0, 0.0, 0.0, 50.0]];
        let mut out = String::from(USAGE_HEADER);
        out.push('\n');
        push_usage_rows(&mut out, ProblemId::Uf5, &rows);
        std::fs::write(&path, out).unwrap();
        let groups = read_usage_csv(&path).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].0, ProblemId::Uf5);
        assert_eq!(groups[0].1, rows);
    }
}
