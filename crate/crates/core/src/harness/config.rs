//! Run settings: a flat key=value file format plus programmatic overrides,
//! shared by every subcommand.

use super::{Algorithm, HarnessError};
use crate::operators::OperatorParams;
use crate::problems::ProblemId;
use crate::types::{RewardDirection, RunConfig};
use std::path::{Path, PathBuf};

/// Everything a subcommand needs: the run configuration, operator
/// parameters, and the orchestration choices around them.
#[derive(Debug, Clone)]
pub struct Settings {
    pub run: RunConfig,
    pub params: OperatorParams,
    pub problem: Option<ProblemId>,
    pub algorithm: Option<Algorithm>,
    pub out_dir: PathBuf,
    pub runs: usize,
    pub checkpoint: Option<PathBuf>,
    pub baselines_only: bool,
    pub episode_logs: bool,
}

impl Default for Settings {
    fn default() -> Settings {
        Settings {
            run: RunConfig::default(),
            params: OperatorParams::default(),
            problem: None,
            algorithm: None,
            out_dir: PathBuf::from("out"),
            runs: 30,
            checkpoint: None,
            baselines_only: false,
            episode_logs: false,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Usage(format!("invalid value {value:?} for key {key:?}")))
}

impl Settings {
    /// Applies one configuration pair; unknown keys are rejected so typos
    /// surface instead of silently using defaults.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        match key {
            "n_pop" => self.run.n_pop = parse(key, value)?,
            "g_max" => self.run.g_max = parse(key, value)?,
            "n_game" => self.run.n_game = parse(key, value)?,
            "gamma" => self.run.gamma = parse(key, value)?,
            "replay_size" => self.run.replay_size = parse(key, value)?,
            "batch_size" => self.run.batch_size = parse(key, value)?,
            "hidden_nodes" => self.run.hidden_nodes = parse(key, value)?,
            "hidden_layers" => self.run.hidden_layers = parse(key, value)?,
            "eps_initial" => self.run.eps_initial = parse(key, value)?,
            "eps_final" => self.run.eps_final = parse(key, value)?,
            "power_p" => self.run.power_p = parse(key, value)?,
            "target_sync" => self.run.target_sync = parse(key, value)?,
            "reward_c_initial" => self.run.reward_c_initial = parse(key, value)?,
            "reward_c_final" => self.run.reward_c_final = parse(key, value)?,
            "learning_rate" => self.run.learning_rate = parse(key, value)?,
            "reward_direction" => {
                self.run.reward_direction = value
                    .parse::<RewardDirection>()
                    .map_err(HarnessError::Usage)?
            }
            "epsilon_ref" => self.run.epsilon_ref = parse(key, value)?,
            "seed" => self.run.seed = parse(key, value)?,
            "ga_crossover_prob" => self.params.ga.crossover_prob = parse(key, value)?,
            "ga_crossover_index" => self.params.ga.crossover_index = parse(key, value)?,
            "ga_mutation_prob" => self.params.ga.mutation_prob = Some(parse(key, value)?),
            "ga_mutation_index" => self.params.ga.mutation_index = parse(key, value)?,
            "es_parent_fraction" => self.params.es.parent_fraction = parse(key, value)?,
            "es_sigma_initial" => self.params.es.sigma_initial = parse(key, value)?,
            "es_learning_rate" => self.params.es.learning_rate = Some(parse(key, value)?),
            "woa_spiral_b" => self.params.woa.spiral_b = parse(key, value)?,
            "eo_a1" => self.params.eo.a1 = parse(key, value)?,
            "eo_a2" => self.params.eo.a2 = parse(key, value)?,
            "eo_gp" => self.params.eo.gp = parse(key, value)?,
            "problem" => {
                self.problem = Some(value.parse().map_err(|e: String| HarnessError::Usage(e))?)
            }
            "algorithm" => {
                self.algorithm = Some(value.parse().map_err(|e: String| HarnessError::Usage(e))?)
            }
            "out_dir" => self.out_dir = PathBuf::from(value),
            "runs" => self.runs = parse(key, value)?,
            "checkpoint" => self.checkpoint = Some(PathBuf::from(value)),
            "baselines_only" => self.baselines_only = parse(key, value)?,
            "episode_logs" => self.episode_logs = parse(key, value)?,
            _ => return Err(HarnessError::Usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Loads a flat key=value file: one pair per line, `#` comments and
    /// blank lines ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Usage(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.apply_kv(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Validates the run configuration, surfacing problems as usage errors.
    pub fn validated(self) -> Result<Settings, HarnessError> {
        self.run
            .validate()
            .map_err(|e| HarnessError::Usage(e.to_string()))?;
        if self.runs == 0 {
            return Err(HarnessError::Usage("runs must be at least 1".into()));
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn file_pairs_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "# comment line").unwrap();
        writeln!(f, "n_pop = 24").unwrap();
        writeln!(f).unwrap();
        writeln!(f, "gamma=0.5").unwrap();
        writeln!(f, "problem=UF3").unwrap();
        writeln!(f, "algorithm=r2-ga").unwrap();
        writeln!(f, "ga_crossover_prob=0.7").unwrap();
        drop(f);
        let mut s = Settings::default();
        s.apply_file(&path).unwrap();
        assert_eq!(s.run.n_pop, 24);
        assert_eq!(s.run.gamma, 0.5);
        assert_eq!(s.problem, Some(ProblemId::Uf3));
        assert_eq!(s.algorithm, Some(Algorithm::Fixed(crate::operators::OperatorId::Ga)));
        assert_eq!(s.params.ga.crossover_prob, 0.7);
    }

    #[test]
    fn later_pairs_win() {
        let mut s = Settings::default();
        s.apply_kv("seed", "1").unwrap();
        s.apply_kv("seed", "2").unwrap();
        assert_eq!(s.run.seed, 2);
    }

    #[test]
    fn unknown_and_malformed_keys_are_usage_errors() {
        let mut s = Settings::default();
        assert!(matches!(
            s.apply_kv("n_pops", "100"),
            Err(HarnessError::Usage(_))
        ));
        assert!(matches!(
            s.apply_kv("gamma", "not-a-number"),
            Err(HarnessError::Usage(_))
        ));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.conf");
        std::fs::write(&path, "just words\n").unwrap();
        assert!(matches!(
            Settings::default().apply_file(&path),
            Err(HarnessError::Usage(_))
        ));
    }

    #[test]
    fn missing_file_is_io_error_with_path() {
        let mut s = Settings::default();
        let err = s.apply_file(Path::new("/nonexistent/x.conf")).unwrap_err();
        match err {
            HarnessError::Io { path, .. } => {
                assert!(path.to_string_lossy().contains("nonexistent"))
            }
            other => panic!("expected io error, got {other:?}"),
        }
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut s = Settings::default();
        s.apply_kv("gamma", "1.5").unwrap();
        assert!(matches!(s.validated(), Err(HarnessError::Usage(_))));
        let mut s = Settings::default();
        s.apply_kv("runs", "0").unwrap();
        assert!(matches!(s.validated(), Err(HarnessError::Usage(_))));
    }
}
