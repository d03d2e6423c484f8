//! Fixed-capacity experience memory with uniform sampling.

use super::{AgentError, N_STATES};
use crate::operators::OperatorId;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One environment step as stored for replay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: [f64; N_STATES],
    pub action: OperatorId,
    pub reward: f64,
    pub next_state: [f64; N_STATES],
    pub terminal: bool,
}

/// Ring buffer: once full, each push evicts the oldest transition.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    buf: Vec<Transition>,
    head: usize,
    capacity: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> ReplayBuffer {
        assert!(capacity > 0);
        ReplayBuffer {
            buf: Vec::new(),
            head: 0,
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, tr: Transition) {
        if self.buf.len() < self.capacity {
            self.buf.push(tr);
        } else {
            self.buf[self.head] = tr;
        }
        self.head = (self.head + 1) % self.capacity;
    }

    /// Uniform sample with replacement. The buffer must already hold at
    /// least `k` transitions.
    pub fn sample(&self, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<&Transition>, AgentError> {
        if self.buf.len() < k {
            return Err(AgentError::BufferUnderfull {
                len: self.buf.len(),
                requested: k,
            });
        }
        Ok((0..k)
            .map(|_| &self.buf[rng.gen_range(0..self.buf.len())])
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    fn tr(tag: f64) -> Transition {
        Transition {
            state: [tag; N_STATES],
            action: OperatorId::Ga,
            reward: tag,
            next_state: [tag; N_STATES],
            terminal: false,
        }
    }

    #[test]
    fn eviction_drops_oldest_first() {
        let mut b = ReplayBuffer::new(3);
        for i in 0..5 {
            b.push(tr(i as f64));
        }
        assert_eq!(b.len(), 3);
        let rewards: Vec<f64> = b.buf.iter().map(|t| t.reward).collect();
        // Slots 0 and 1 were overwritten by 3 and 4.
        assert_eq!(rewards, vec![3.0, 4.0, 2.0]);
    }

    #[test]
    fn sample_requires_enough_entries() {
        let mut b = ReplayBuffer::new(10);
        b.push(tr(0.0));
        let mut rng = stream(0, Purpose::Replay, 0);
        assert!(matches!(
            b.sample(2, &mut rng),
            Err(AgentError::BufferUnderfull {
                len: 1,
                requested: 2
            })
        ));
        assert!(b.sample(1, &mut rng).is_ok());
    }

    #[test]
    fn sampling_is_uniform_enough_and_with_replacement() {
        let mut b = ReplayBuffer::new(8);
        for i in 0..8 {
            b.push(tr(i as f64));
        }
        let mut rng = stream(42, Purpose::Replay, 0);
        let mut counts = [0usize; 8];
        for _ in 0..200 {
            for t in b.sample(4, &mut rng).unwrap() {
                counts[t.reward as usize] += 1;
            }
        }
        // 800 draws over 8 slots: every slot must appear, none can dominate.
        assert!(counts.iter().all(|&c| c > 40 && c < 200), "{counts:?}");
        // With replacement: a sample as large as the buffer drawn repeatedly
        // will eventually repeat an element within one draw.
        let mut saw_repeat = false;
        for _ in 0..50 {
            let s = b.sample(8, &mut rng).unwrap();
            let mut tags: Vec<u64> = s.iter().map(|t| t.reward.to_bits()).collect();
            tags.sort_unstable();
            tags.dedup();
            if tags.len() < 8 {
                saw_repeat = true;
                break;
            }
        }
        assert!(saw_repeat);
    }
}
