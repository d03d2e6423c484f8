//! Domain types shared by every other module: decision vectors with box
//! bounds, evaluated individuals, populations, and the run configuration.

use crate::problems::Problem;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Per-dimension box constraints. Lower and upper always have equal length
/// and `lower[i] <= upper[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len(), "bound vectors must align");
        for (l, u) in lower.iter().zip(&upper) {
            assert!(l <= u, "lower bound {l} above upper bound {u}");
        }
        Bounds { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Componentwise clamp into the box. NaN components collapse to the lower
    /// bound so a misbehaving operator can never leak NaN into a population.
    pub fn clip(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        if x.len() != self.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| if v.is_nan() { l } else { v.clamp(l, u) })
            .collect())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&l, &u))| v >= l && v <= u)
    }

    /// Uniform sample inside the box.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| if l == u { l } else { rng.gen_range(l..u) })
            .collect()
    }
}

/// One candidate solution. `l2_norm` is always the Euclidean norm of `f`;
/// `r2_rank` is 0 until the population has been ranked (ranks start at 1),
/// and `performance` is NaN until then.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub r2_rank: usize,
    pub l2_norm: f64,
    pub performance: f64,
}

impl Individual {
    pub fn new(x: Vec<f64>, f: Vec<f64>) -> Self {
        let l2_norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        Individual {
            x,
            f,
            r2_rank: 0,
            l2_norm,
            performance: f64::NAN,
        }
    }
}

/// A generation of individuals plus the reference points used to normalize
/// their objectives. `z_star` stays componentwise at or below everything seen
/// this episode; `z_nad` at or above the current members.
#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
    pub z_star: Vec<f64>,
    pub z_nad: Vec<f64>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n_obj(&self) -> usize {
        self.z_star.len()
    }

    /// True once every member carries a rank and the members are sorted by
    /// the `(r2_rank, l2_norm)` key.
    pub fn is_ranked(&self) -> bool {
        self.members.iter().all(|m| m.r2_rank >= 1)
            && self
                .members
                .windows(2)
                .all(|w| (w[0].r2_rank, w[0].l2_norm) <= (w[1].r2_rank, w[1].l2_norm))
    }
}

/// Uniform random population inside the problem's bounds, fully evaluated,
/// with reference points seeded from the sampled objectives.
pub fn random_population(problem: &Problem, n_pop: usize, rng: &mut ChaCha8Rng) -> Population {
    assert!(n_pop >= 1, "population needs at least one member");
    let members: Vec<Individual> = (0..n_pop)
        .map(|_| {
            let x = problem.bounds().sample(rng);
            let f = problem.evaluate(&x).expect("in-bounds vector evaluates");
            Individual::new(x, f)
        })
        .collect();
    let m = problem.n_obj();
    let mut z_star = vec![f64::INFINITY; m];
    let mut z_nad = vec![f64::NEG_INFINITY; m];
    for ind in &members {
        for i in 0..m {
            z_star[i] = z_star[i].min(ind.f[i]);
            z_nad[i] = z_nad[i].max(ind.f[i]);
        }
    }
    Population {
        members,
        generation: 0,
        z_star,
        z_nad,
    }
}

/// Which direction of quartile-mean movement counts as an improvement for
/// the reward and success counters. All objectives are minimized, so the
/// default treats a decrease as improvement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RewardDirection {
    Decrease,
    Increase,
}

impl std::str::FromStr for RewardDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "decrease" => Ok(RewardDirection::Decrease),
            "increase" => Ok(RewardDirection::Increase),
            other => Err(format!("unknown reward direction {other:?}")),
        }
    }
}

/// Everything a run needs to be reproducible. Defaults are the reference
/// hyperparameters; `n_game` defaults to a desk-scale 2000 games.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunConfig {
    pub n_pop: usize,
    pub g_max: usize,
    pub n_game: usize,
    pub gamma: f64,
    pub replay_size: usize,
    pub batch_size: usize,
    pub hidden_nodes: usize,
    pub hidden_layers: usize,
    pub eps_initial: f64,
    pub eps_final: f64,
    pub power_p: f64,
    pub target_sync: u64,
    pub reward_c_initial: f64,
    pub reward_c_final: f64,
    pub learning_rate: f64,
    pub reward_direction: RewardDirection,
    pub epsilon_ref: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_pop: 100,
            g_max: 100,
            n_game: 2000,
            gamma: 0.9,
            replay_size: 100_000,
            batch_size: 64,
            hidden_nodes: 100,
            hidden_layers: 2,
            eps_initial: 0.9,
            eps_final: 1e-3,
            power_p: 3.0,
            target_sync: 1_000,
            reward_c_initial: 1.0,
            reward_c_final: 5.0,
            learning_rate: 1e-3,
            reward_direction: RewardDirection::Decrease,
            epsilon_ref: 1e-4,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Rejects configurations the algorithms cannot run on: ES needs an even
    /// split into parents, the quartile state needs at least four members,
    /// and the schedules need sane endpoints.
    // The negated float comparisons are deliberate: they also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), CoreError> {
        let fail = |msg: String| Err(CoreError::InvalidConfig(msg));
        if self.n_pop < 4 || !self.n_pop.is_multiple_of(2) {
            return fail(format!("n_pop must be even and >= 4, got {}", self.n_pop));
        }
        if self.g_max == 0 || self.n_game == 0 {
            return fail("g_max and n_game must be positive".into());
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return fail(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if !(0.0 <= self.eps_final && self.eps_final <= self.eps_initial && self.eps_initial <= 1.0)
        {
            return fail(format!(
                "need 0 <= eps_final <= eps_initial <= 1, got {} and {}",
                self.eps_final, self.eps_initial
            ));
        }
        if self.batch_size == 0 || self.batch_size > self.replay_size {
            return fail(format!(
                "batch_size must be in 1..=replay_size, got {}",
                self.batch_size
            ));
        }
        if self.hidden_layers == 0 || self.hidden_nodes == 0 {
            return fail("network needs at least one hidden layer and node".into());
        }
        if self.target_sync == 0 {
            return fail("target_sync must be positive".into());
        }
        if !(self.learning_rate > 0.0) {
            return fail(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(self.epsilon_ref >= 0.0) {
            return fail(format!("epsilon_ref must be >= 0, got {}", self.epsilon_ref));
        }
        Ok(())
    }
}
