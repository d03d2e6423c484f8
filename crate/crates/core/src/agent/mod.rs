//! The operator-selection agent: a small fully connected Q-network trained
//! with double-deep-Q-learning on uniformly replayed transitions, plus the
//! epsilon and action plumbing around it.

mod checkpoint;
mod network;
mod replay;

pub use checkpoint::{
    load_checkpoint, save_checkpoint, CheckpointMeta, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use network::{apply_sgd, compute_gradients, train_on_batch, Gradients, Layer, QNetwork};
pub use replay::{ReplayBuffer, Transition};

use crate::operators::{random_select, OperatorId, N_OPERATORS};
use crate::types::RunConfig;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Width of the encoded observation vector.
pub const N_STATES: usize = 20;

/// One Q-value output per operator.
pub const N_ACTIONS: usize = N_OPERATORS;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("network expects input width {expected}, got {got}")]
    WrongInputWidth { expected: usize, got: usize },
    #[error("replay buffer holds {len} transitions, cannot sample {requested}")]
    BufferUnderfull { len: usize, requested: usize },
    #[error("malformed checkpoint at byte {offset}: {reason}")]
    Checkpoint { offset: u64, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Layer widths for the given configuration: state width, the hidden stack,
/// one Q-value per action.
pub fn layer_sizes(cfg: &RunConfig) -> Vec<usize> {
    let mut sizes = vec![N_STATES];
    sizes.extend(std::iter::repeat_n(cfg.hidden_nodes, cfg.hidden_layers));
    sizes.push(N_ACTIONS);
    sizes
}

/// Exploration rate after `game_index` games: a cubic (power `power_p`)
/// glide from `eps_initial` down to `eps_final` over `n_game` games.
pub fn epsilon_schedule(game_index: usize, cfg: &RunConfig) -> f64 {
    let remaining = (cfg.n_game.saturating_sub(game_index)) as f64 / cfg.n_game as f64;
    remaining.powf(cfg.power_p) * (cfg.eps_initial - cfg.eps_final) + cfg.eps_final
}

/// Epsilon-greedy choice over the Q-values: one uniform draw decides
/// exploration; exploring picks uniformly, otherwise the argmax wins with
/// ties going to the lowest index.
pub fn select_action(q_values: &[f64], epsilon: f64, rng: &mut ChaCha8Rng) -> OperatorId {
    debug_assert_eq!(q_values.len(), N_ACTIONS);
    if rng.gen::<f64>() < epsilon {
        return random_select(rng);
    }
    greedy_action(q_values)
}

/// Argmax with ties resolved to the lowest index.
pub fn greedy_action(q_values: &[f64]) -> OperatorId {
    let mut best = 0;
    for (i, &q) in q_values.iter().enumerate() {
        if q > q_values[best] {
            best = i;
        }
    }
    OperatorId::from_index(best)
}

/// Double-DQN target: the online network picks the next action, the target
/// network prices it. Terminal transitions collapse to the bare reward.
pub fn ddqn_target(
    tr: &Transition,
    main: &QNetwork,
    target: &QNetwork,
    gamma: f64,
) -> Result<f64, AgentError> {
    if tr.terminal {
        return Ok(tr.reward);
    }
    let q_main = main.forward(&tr.next_state)?;
    let a = greedy_action(&q_main).index();
    let q_target = target.forward(&tr.next_state)?;
    Ok(tr.reward + gamma * q_target[a])
}

/// One optimization step: sample a batch uniformly with replacement, build
/// double-DQN targets, and descend the mean squared error on the taken
/// actions. Returns the pre-update loss.
pub fn train_step(
    main: &mut QNetwork,
    target: &QNetwork,
    buffer: &ReplayBuffer,
    batch_size: usize,
    learning_rate: f64,
    gamma: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64, AgentError> {
    let batch = buffer.sample(batch_size, rng)?;
    let mut examples = Vec::with_capacity(batch.len());
    for tr in batch {
        let t = ddqn_target(tr, main, target, gamma)?;
        examples.push((tr.state, tr.action.index(), t));
    }
    Ok(train_on_batch(main, &examples, learning_rate))
}

/// Copies the online parameters into the target network whenever the update
/// counter hits a multiple of `every` (counter zero is the initial state and
/// does not sync).
pub fn sync_target(target: &mut QNetwork, main: &QNetwork, counter: u64, every: u64) {
    if counter != 0 && counter.is_multiple_of(every) {
        target.clone_from(main);
    }
}

/// Bundles the online/target pair, the replay memory, and the update
/// counter for the training loop.
#[derive(Debug, Clone)]
pub struct Trainer {
    pub main: QNetwork,
    pub target: QNetwork,
    pub buffer: ReplayBuffer,
    pub steps: u64,
    gamma: f64,
    learning_rate: f64,
    batch_size: usize,
    target_sync: u64,
}

impl Trainer {
    pub fn new(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Trainer {
        let main = QNetwork::init(&layer_sizes(cfg), rng);
        let target = main.clone();
        Trainer {
            main,
            target,
            buffer: ReplayBuffer::new(cfg.replay_size),
            steps: 0,
            gamma: cfg.gamma,
            learning_rate: cfg.learning_rate,
            batch_size: cfg.batch_size,
            target_sync: cfg.target_sync,
        }
    }

    pub fn observe(&mut self, tr: Transition) {
        self.buffer.push(tr);
    }

    /// Trains once if the buffer can fill a batch; returns the loss when a
    /// step ran.
    pub fn maybe_train(&mut self, rng: &mut ChaCha8Rng) -> Option<f64> {
        if self.buffer.len() < self.batch_size {
            return None;
        }
        let loss = train_step(
            &mut self.main,
            &self.target,
            &self.buffer,
            self.batch_size,
            self.learning_rate,
            self.gamma,
            rng,
        )
        .expect("buffer length checked");
        self.steps += 1;
        sync_target(&mut self.target, &self.main, self.steps, self.target_sync);
        Some(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    fn toy_cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn epsilon_endpoints_and_midpoint() {
        let cfg = toy_cfg();
        assert!((epsilon_schedule(0, &cfg) - 0.9).abs() < 1e-12);
        assert!((epsilon_schedule(cfg.n_game, &cfg) - 1e-3).abs() < 1e-15);
        let mid = epsilon_schedule(cfg.n_game / 2, &cfg);
        assert!((mid - 0.113375).abs() < 1e-12);
    }

    #[test]
    fn epsilon_is_monotone_decreasing() {
        let cfg = toy_cfg();
        let mut prev = f64::INFINITY;
        for n in (0..=cfg.n_game).step_by(50) {
            let e = epsilon_schedule(n, &cfg);
            assert!(e <= prev);
            prev = e;
        }
    }

    #[test]
    fn greedy_action_breaks_ties_low() {
        assert_eq!(greedy_action(&[1.0, 1.0, 0.0, 1.0, 0.5]), OperatorId::Eo);
        assert_eq!(greedy_action(&[0.0, 2.0, 2.0, 1.0, 0.5]), OperatorId::Woa);
    }

    #[test]
    fn select_action_is_greedy_at_epsilon_zero() {
        let mut rng = stream(1, Purpose::Action, 0);
        let q = [0.0, 0.1, 0.9, 0.2, 0.3];
        for _ in 0..20 {
            assert_eq!(select_action(&q, 0.0, &mut rng), OperatorId::Tlbo);
        }
    }

    #[test]
    fn select_action_explores_at_epsilon_one() {
        let mut rng = stream(2, Purpose::Action, 0);
        let q = [9.0, 0.0, 0.0, 0.0, 0.0];
        let mut seen = [false; N_ACTIONS];
        for _ in 0..300 {
            seen[select_action(&q, 1.0, &mut rng).index()] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn ddqn_target_uses_online_argmax_and_target_value() {
        // Constant networks: zero weights, biases set to the desired
        // Q-vectors, so the example is exact.
        let mut main = QNetwork::zeros(&[N_STATES, 2]);
        main.layers[0].b = vec![0.1, 0.5];
        let mut target = QNetwork::zeros(&[N_STATES, 2]);
        target.layers[0].b = vec![0.2, 0.3];
        let tr = Transition {
            state: [0.0; N_STATES],
            action: OperatorId::Eo,
            reward: 1.0,
            next_state: [0.0; N_STATES],
            terminal: false,
        };
        let t = ddqn_target(&tr, &main, &target, 0.9).unwrap();
        assert_eq!(t, 1.0 + 0.9 * 0.3);
    }

    #[test]
    fn terminal_target_is_bare_reward() {
        let main = QNetwork::zeros(&[N_STATES, 2]);
        let target = QNetwork::zeros(&[N_STATES, 2]);
        let tr = Transition {
            state: [0.0; N_STATES],
            action: OperatorId::Eo,
            reward: 2.5,
            next_state: [0.0; N_STATES],
            terminal: true,
        };
        assert_eq!(ddqn_target(&tr, &main, &target, 0.9).unwrap(), 2.5);
    }

    #[test]
    fn sync_copies_exactly_on_multiples() {
        let cfg = toy_cfg();
        let mut rng = stream(5, Purpose::NetInit, 0);
        let main = QNetwork::init(&layer_sizes(&cfg), &mut rng);
        let mut target = QNetwork::init(&layer_sizes(&cfg), &mut rng);
        let before = target.clone();
        sync_target(&mut target, &main, 999, 1000);
        assert_eq!(target, before, "early sync must not copy");
        sync_target(&mut target, &main, 1000, 1000);
        assert_eq!(target, main, "sync at the boundary must be bit-exact");
    }
}
