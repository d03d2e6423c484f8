//! The learning environment around the evolutionary loop: the 20-feature
//! observation encoding, the generation-indexed reward, per-episode
//! bookkeeping, and the episode driver shared by training, greedy
//! evaluation, and the fixed/random-operator baselines.

use crate::agent::{
    epsilon_schedule, greedy_action, select_action, AgentError, QNetwork, Trainer, Transition,
    N_STATES,
};
use crate::metrics::quartiles;
use crate::operators::{random_select, step, OperatorId, OperatorParams, N_OPERATORS};
use crate::problems::Problem;
use crate::r2rank::{divisions_for, generate_weights, rank_population, ReferenceState};
use crate::rng::{stream, Purpose};
use crate::types::{random_population, Population, RewardDirection, RunConfig};
use std::io::Write;

/// Observation vector, ordered s1..s20: normalized performance quartiles,
/// spread ratio, remaining-generation fraction, quartile-to-best decision
/// distances, operator usage fractions, operator success ratios.
pub type StateVector = [f64; N_STATES];

const EPS_RANGE: f64 = 1e-12;
const EPS_COUNT: f64 = 1e-6;

/// Per-episode bookkeeping feeding the state encoding and the reward.
#[derive(Debug, Clone)]
pub struct EpisodeStats {
    /// Best (lowest) performance seen this episode and its decision vector.
    pub f_min: f64,
    pub x_min: Vec<f64>,
    /// Worst performance seen this episode and its decision vector.
    pub f_max: f64,
    pub x_max: Vec<f64>,
    /// Times each operator was selected, indexed by `OperatorId`.
    pub counts: [usize; N_OPERATORS],
    /// Times each operator improved the quartile mean.
    pub successes: [usize; N_OPERATORS],
    /// Quartile mean of the previous generation.
    pub q_mean_prev: f64,
}

impl EpisodeStats {
    /// Seeds the episode extremes and the improvement baseline from the
    /// freshly initialized, ranked population.
    pub fn new(pop: &Population) -> EpisodeStats {
        let mut stats = EpisodeStats {
            f_min: f64::INFINITY,
            x_min: Vec::new(),
            f_max: f64::NEG_INFINITY,
            x_max: Vec::new(),
            counts: [0; N_OPERATORS],
            successes: [0; N_OPERATORS],
            q_mean_prev: quartile_mean(pop),
        };
        stats.observe(pop);
        stats
    }

    /// Folds a generation's performances into the episode extremes.
    pub fn observe(&mut self, pop: &Population) {
        for ind in &pop.members {
            if ind.performance < self.f_min {
                self.f_min = ind.performance;
                self.x_min = ind.x.clone();
            }
            if ind.performance > self.f_max {
                self.f_max = ind.performance;
                self.x_max = ind.x.clone();
            }
        }
    }
}

/// Average of the three interpolated performance quartiles.
pub fn quartile_mean(pop: &Population) -> f64 {
    let perfs: Vec<f64> = pop.members.iter().map(|m| m.performance).collect();
    let (q1, q2, q3) = quartiles(&perfs);
    (q1 + q2 + q3) / 3.0
}

fn improved(q_mean_t: f64, q_mean_prev: f64, direction: RewardDirection) -> bool {
    match direction {
        RewardDirection::Decrease => q_mean_t < q_mean_prev,
        RewardDirection::Increase => q_mean_t > q_mean_prev,
    }
}

/// Reward magnitude at generation `g_t`: glides from `reward_c_initial` at
/// the first generation up to `reward_c_final` at the last.
pub fn reward_value(g_t: usize, g_max: usize, cfg: &RunConfig) -> f64 {
    let remaining = (g_max.saturating_sub(g_t)) as f64 / g_max as f64;
    remaining.powf(cfg.power_p) * (cfg.reward_c_initial - cfg.reward_c_final)
        + cfg.reward_c_final
}

/// The generation's reward: the schedule value on improvement, zero
/// otherwise.
pub fn compute_reward(
    q_mean_t: f64,
    q_mean_prev: f64,
    g_t: usize,
    g_max: usize,
    cfg: &RunConfig,
) -> f64 {
    if improved(q_mean_t, q_mean_prev, cfg.reward_direction) {
        reward_value(g_t, g_max, cfg)
    } else {
        0.0
    }
}

/// Counts the selection, and the success when the quartile mean improved.
pub fn update_success(
    stats: &mut EpisodeStats,
    op: OperatorId,
    q_mean_t: f64,
    q_mean_prev: f64,
    direction: RewardDirection,
) {
    stats.counts[op.index()] += 1;
    if improved(q_mean_t, q_mean_prev, direction) {
        stats.successes[op.index()] += 1;
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Member whose performance sits nearest `target`; ties keep the earliest.
fn nearest_by_performance(pop: &Population, target: f64) -> &crate::types::Individual {
    let mut best = 0;
    let mut best_gap = f64::INFINITY;
    for (i, m) in pop.members.iter().enumerate() {
        let gap = (m.performance - target).abs();
        if gap < best_gap {
            best_gap = gap;
            best = i;
        }
    }
    &pop.members[best]
}

/// Population standard deviation (divisor n).
fn population_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Encodes the observation for the decision at generation `g_t`.
///
/// The performance scale is the episode's running [f_min, f_max]; spreads
/// with a range under 1e-12 zero out the affected features rather than
/// divide by noise.
pub fn encode_state(
    pop: &Population,
    stats: &EpisodeStats,
    g_t: usize,
    g_max: usize,
) -> StateVector {
    debug_assert!(pop.is_ranked());
    let mut s = [0.0; N_STATES];
    let perfs: Vec<f64> = pop.members.iter().map(|m| m.performance).collect();
    let (q1, q2, q3) = quartiles(&perfs);
    let q_mean = (q1 + q2 + q3) / 3.0;
    let range = stats.f_max - stats.f_min;

    if range >= EPS_RANGE {
        s[0] = ((q1 - stats.f_min) / range).clamp(0.0, 1.0);
        s[1] = ((q2 - stats.f_min) / range).clamp(0.0, 1.0);
        s[2] = ((q3 - stats.f_min) / range).clamp(0.0, 1.0);
        s[3] = ((q_mean - stats.f_min) / range).clamp(0.0, 1.0);
        // Spread relative to the most-spread population on the same scale:
        // half the members at f_min, half at f_max.
        let n = perfs.len();
        let mut extremes = vec![stats.f_min; n / 2];
        extremes.extend(std::iter::repeat_n(stats.f_max, n - n / 2));
        let sd_extremes = population_sd(&extremes);
        s[4] = (population_sd(&perfs) / sd_extremes).clamp(0.0, 1.0);
    }

    s[5] = (g_max.saturating_sub(g_t)) as f64 / g_max as f64;

    let base = euclid(&stats.x_max, &stats.x_min);
    if base >= EPS_RANGE {
        for (k, target) in [q1, q2, q3, q_mean].into_iter().enumerate() {
            let ind = nearest_by_performance(pop, target);
            s[6 + k] = euclid(&ind.x, &stats.x_min) / base;
        }
    }

    for i in 0..N_OPERATORS {
        s[10 + i] = stats.counts[i] as f64 / g_max as f64;
        s[15 + i] = stats.successes[i] as f64 / (stats.counts[i] as f64 + EPS_COUNT);
    }
    s
}

/// How the episode chooses its operator each generation.
pub enum Policy<'a> {
    /// Epsilon-greedy on the online network, learning as it goes; epsilon
    /// follows the game-indexed schedule.
    Train {
        trainer: &'a mut Trainer,
        game_index: usize,
    },
    /// Greedy on a frozen network.
    Eval(&'a QNetwork),
    /// Always the same operator.
    FixedOp(OperatorId),
    /// Uniform over the five operators.
    RandomOp,
}

/// One generation's log entry; `state` is the observation the decision was
/// made from.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub operator: OperatorId,
    pub reward: f64,
    pub quartile_mean: f64,
    pub state: StateVector,
}

/// Complete trace of one episode.
#[derive(Debug, Clone)]
pub struct EpisodeLog {
    pub records: Vec<GenerationRecord>,
    pub final_population: Population,
    pub total_reward: f64,
}

impl EpisodeLog {
    /// One row per generation: generation, operator, reward, quartile mean,
    /// then the 20 state features.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "generation,operator,reward,quartile_mean")?;
        for i in 1..=N_STATES {
            write!(w, ",s{i}")?;
        }
        writeln!(w)?;
        for r in &self.records {
            write!(
                w,
                "{},{},{},{}",
                r.generation,
                r.operator.label(),
                r.reward,
                r.quartile_mean
            )?;
            for v in r.state {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Runs one full episode: initialize, rank, then `g_max` generations of
/// observe, select, step, re-rank, reward. Training mode also records
/// transitions (the last one terminal) and takes one gradient step per
/// generation once the replay buffer can fill a batch.
pub fn run_episode(
    problem: &Problem,
    mut policy: Policy,
    cfg: &RunConfig,
    params: &OperatorParams,
    episode_seed: u64,
) -> Result<EpisodeLog, AgentError> {
    let mut pop_rng = stream(episode_seed, Purpose::PopInit, 0);
    let mut op_rng = stream(episode_seed, Purpose::Operator, 0);
    let mut action_rng = stream(episode_seed, Purpose::Action, 0);
    let mut replay_rng = stream(episode_seed, Purpose::Replay, 0);

    let weights = generate_weights(
        problem.n_obj(),
        divisions_for(problem.n_obj(), cfg.n_pop),
    );
    let mut refs = ReferenceState::new(problem.n_obj(), cfg.epsilon_ref);

    let mut pop = random_population(problem, cfg.n_pop, &mut pop_rng);
    refs.update(&mut pop);
    let mut pop = rank_population(pop, &weights);
    refs.update(&mut pop);
    let mut stats = EpisodeStats::new(&pop);
    let mut state = encode_state(&pop, &stats, 0, cfg.g_max);

    let mut records = Vec::with_capacity(cfg.g_max);
    let mut total_reward = 0.0;

    for t in 0..cfg.g_max {
        let op = match &mut policy {
            Policy::Train {
                trainer,
                game_index,
            } => {
                let eps = epsilon_schedule(*game_index, cfg);
                let q = trainer.main.forward(&state)?;
                select_action(&q, eps, &mut action_rng)
            }
            Policy::Eval(net) => greedy_action(&net.forward(&state)?),
            Policy::FixedOp(id) => *id,
            Policy::RandomOp => random_select(&mut action_rng),
        };

        pop = step(op, &pop, &weights, params, problem, cfg.g_max, &mut op_rng);
        refs.update(&mut pop);
        pop = rank_population(pop, &weights);

        let q_mean_t = quartile_mean(&pop);
        let q_mean_prev = stats.q_mean_prev;
        let reward = compute_reward(q_mean_t, q_mean_prev, t, cfg.g_max, cfg);
        update_success(&mut stats, op, q_mean_t, q_mean_prev, cfg.reward_direction);
        stats.observe(&pop);
        let next_state = encode_state(&pop, &stats, t + 1, cfg.g_max);

        records.push(GenerationRecord {
            generation: t,
            operator: op,
            reward,
            quartile_mean: q_mean_t,
            state,
        });
        total_reward += reward;
        stats.q_mean_prev = q_mean_t;

        if let Policy::Train { trainer, .. } = &mut policy {
            trainer.observe(Transition {
                state,
                action: op,
                reward,
                next_state,
                terminal: t + 1 == cfg.g_max,
            });
            trainer.maybe_train(&mut replay_rng);
        }
        state = next_state;
    }

    Ok(EpisodeLog {
        records,
        final_population: pop,
        total_reward,
    })
}
