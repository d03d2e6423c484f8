//! Scalarization machinery that turns the multi-objective search into a
//! single scalar fitness: a simplex-lattice weight set, the achievement
//! scalarizing function, the R2 indicator, the population ranking, and the
//! adaptive ideal/nadir reference points used for normalization.

use crate::types::{Individual, Population};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("empty set")]
    EmptySet,
    #[error("weight component {index} is not positive")]
    NonPositiveWeight { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Smallest component a weight may hold after the zero shift.
const WEIGHT_FLOOR: f64 = 1e-6;

/// Guard for degenerate normalization ranges.
const RANGE_FLOOR: f64 = 1e-12;

/// Simplex-lattice weight vectors with `divisions` steps per axis. Zero
/// components are lifted to 1e-6 and each vector renormalized to unit L1 sum
/// so the scalarizing function never divides by zero.
pub fn generate_weights(n_obj: usize, divisions: usize) -> Vec<Vec<f64>> {
    assert!(n_obj >= 2 && divisions >= 1);
    let mut out = Vec::new();
    let mut current = vec![0usize; n_obj];
    lattice_rec(n_obj, divisions, 0, divisions, &mut current, &mut out);
    for w in &mut out {
        for c in w.iter_mut() {
            if *c == 0.0 {
                *c = WEIGHT_FLOOR;
            }
        }
        let sum: f64 = w.iter().sum();
        for c in w.iter_mut() {
            *c /= sum;
        }
    }
    out
}

fn lattice_rec(
    n_obj: usize,
    divisions: usize,
    depth: usize,
    remaining: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<f64>>,
) {
    if depth == n_obj - 1 {
        current[depth] = remaining;
        out.push(
            current
                .iter()
                .map(|&u| u as f64 / divisions as f64)
                .collect(),
        );
        return;
    }
    for units in 0..=remaining {
        current[depth] = units;
        lattice_rec(n_obj, divisions, depth + 1, remaining - units, current, out);
    }
}

/// Lattice divisions giving at least `n_pop` weight vectors: the smallest
/// `d` with C(d + m - 1, m - 1) >= n_pop. For two objectives that is exactly
/// `n_pop - 1` divisions and `n_pop` weights.
pub fn divisions_for(n_obj: usize, n_pop: usize) -> usize {
    let mut d = 1;
    while lattice_size(n_obj, d) < n_pop as u64 {
        d += 1;
    }
    d
}

fn lattice_size(n_obj: usize, divisions: usize) -> u64 {
    // C(divisions + n_obj - 1, n_obj - 1)
    let mut c: u64 = 1;
    for i in 1..n_obj as u64 {
        c = c * (divisions as u64 + i) / i;
    }
    c
}

/// Achievement scalarizing function: the worst weighted axis distance from
/// the reference point, `max_i |f_i - z_i| / w_i`.
pub fn asf(f: &[f64], w: &[f64], z_star: &[f64]) -> Result<f64, RankError> {
    if f.len() != w.len() || f.len() != z_star.len() {
        return Err(RankError::DimensionMismatch {
            expected: f.len(),
            got: w.len().min(z_star.len()),
        });
    }
    let mut best = f64::NEG_INFINITY;
    for (i, ((&fi, &wi), &zi)) in f.iter().zip(w).zip(z_star).enumerate() {
        if wi <= 0.0 {
            return Err(RankError::NonPositiveWeight { index: i });
        }
        best = best.max((fi - zi).abs() / wi);
    }
    Ok(best)
}

/// R2 indicator of a point set: the mean over weights of the best (lowest)
/// scalarized value any point attains. Lower is better; a set containing the
/// reference point itself scores exactly zero.
pub fn r2_indicator(
    points: &[Vec<f64>],
    weights: &[Vec<f64>],
    z_star: &[f64],
) -> Result<f64, RankError> {
    if points.is_empty() || weights.is_empty() {
        return Err(RankError::EmptySet);
    }
    let mut total = 0.0;
    for w in weights {
        let mut best = f64::INFINITY;
        for p in points {
            best = best.min(asf(p, w, z_star)?);
        }
        total += best;
    }
    Ok(total / weights.len() as f64)
}

/// Per-member ranking result, aligned with the input order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankScore {
    pub r2_rank: usize,
    pub l2_norm: f64,
    pub performance: f64,
}

/// Computes rank scores for a slice of members without reordering them.
///
/// Objectives are normalized to `(f - z_star) / (z_nad - z_star)` (ranges
/// below 1e-12 are widened to 1e-12). For every weight the members are
/// ordered by the scalarized value of the normalized objectives against
/// reference zero, ties broken by `l2_norm` (stable, so equal keys keep
/// their slice order). A member's rank is one plus the best position it
/// attains under any weight; its performance is `rank + l2_norm`.
pub fn rank_scores(
    members: &[Individual],
    z_star: &[f64],
    z_nad: &[f64],
    weights: &[Vec<f64>],
) -> Vec<RankScore> {
    assert!(!members.is_empty(), "cannot rank an empty population");
    assert!(!weights.is_empty(), "cannot rank without weights");
    let m = z_star.len();
    let p = members.len();

    let mut ranges = vec![0.0; m];
    for k in 0..m {
        ranges[k] = (z_nad[k] - z_star[k]).max(RANGE_FLOOR);
    }
    let normalized: Vec<Vec<f64>> = members
        .iter()
        .map(|ind| (0..m).map(|k| (ind.f[k] - z_star[k]) / ranges[k]).collect())
        .collect();
    let l2: Vec<f64> = members
        .iter()
        .map(|ind| ind.f.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    let mut best_pos = vec![usize::MAX; p];
    let mut order: Vec<usize> = (0..p).collect();
    let mut svals = vec![0.0; p];
    for w in weights {
        for i in 0..p {
            let mut worst = f64::NEG_INFINITY;
            for k in 0..m {
                worst = worst.max(normalized[i][k].abs() / w[k]);
            }
            svals[i] = worst;
        }
        order.sort_by(|&a, &b| {
            (svals[a], l2[a])
                .partial_cmp(&(svals[b], l2[b]))
                .expect("scalarized values are finite")
        });
        for (pos, &idx) in order.iter().enumerate() {
            best_pos[idx] = best_pos[idx].min(pos);
        }
        // Restore index order so the next weight's stable sort sees the
        // original member order, keeping tie-breaks weight-independent.
        order.sort_unstable();
    }

    (0..p)
        .map(|i| {
            let r2_rank = 1 + best_pos[i];
            RankScore {
                r2_rank,
                l2_norm: l2[i],
                performance: r2_rank as f64 + l2[i],
            }
        })
        .collect()
}

/// Ranks a population through the weight set and returns it sorted by
/// `(r2_rank, l2_norm)`, stamps refreshed from [`rank_scores`].
pub fn rank_population(mut pop: Population, weights: &[Vec<f64>]) -> Population {
    let scores = rank_scores(&pop.members, &pop.z_star, &pop.z_nad, weights);
    for (ind, s) in pop.members.iter_mut().zip(&scores) {
        ind.r2_rank = s.r2_rank;
        ind.l2_norm = s.l2_norm;
        ind.performance = s.performance;
    }
    pop.members.sort_by(|a, b| {
        (a.r2_rank, a.l2_norm)
            .partial_cmp(&(b.r2_rank, b.l2_norm))
            .expect("ranks and norms are finite")
    });
    pop
}

/// Adaptive ideal and nadir points, owned by the episode loop.
///
/// The ideal `z_star` only ever moves down: each component tracks the lowest
/// objective seen this episode minus `epsilon_ref`. The nadir covers the
/// current population componentwise while at least `n_obj` members hold rank
/// one; when the rank-one set collapses below that, it relaxes to the
/// historical componentwise maximum so the normalization range cannot pinch
/// shut.
#[derive(Debug, Clone)]
pub struct ReferenceState {
    pub z_star: Vec<f64>,
    pub z_nad: Vec<f64>,
    hist_max: Vec<f64>,
    epsilon_ref: f64,
}

impl ReferenceState {
    pub fn new(n_obj: usize, epsilon_ref: f64) -> Self {
        ReferenceState {
            z_star: vec![f64::INFINITY; n_obj],
            z_nad: vec![f64::NEG_INFINITY; n_obj],
            hist_max: vec![f64::NEG_INFINITY; n_obj],
            epsilon_ref,
        }
    }

    /// Refreshes the reference points from the population and stamps them
    /// onto it. Repeated calls on an unchanged population are a fixed point.
    pub fn update(&mut self, pop: &mut Population) {
        assert!(!pop.is_empty());
        let m = self.z_star.len();
        let mut mins = vec![f64::INFINITY; m];
        let mut maxs = vec![f64::NEG_INFINITY; m];
        for ind in &pop.members {
            for k in 0..m {
                mins[k] = mins[k].min(ind.f[k]);
                maxs[k] = maxs[k].max(ind.f[k]);
            }
        }
        let rank_one = pop.members.iter().filter(|i| i.r2_rank == 1).count();
        for k in 0..m {
            self.hist_max[k] = self.hist_max[k].max(maxs[k]);
            self.z_star[k] = self.z_star[k].min(mins[k] - self.epsilon_ref);
            self.z_nad[k] = if rank_one >= m {
                maxs[k]
            } else {
                self.hist_max[k]
            };
            self.z_nad[k] = self.z_nad[k].max(self.z_star[k]);
        }
        pop.z_star.clone_from(&self.z_star);
        pop.z_nad.clone_from(&self.z_nad);
    }
}
