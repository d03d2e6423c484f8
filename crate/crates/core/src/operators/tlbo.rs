//! Teaching-learning-based optimization: a teacher phase pulling everyone
//! toward the best member and away from the mean, then a learner phase of
//! pairwise attraction/repulsion. Each phase accepts a candidate only if it
//! outranks the incumbent when both are scored in one joint ranking.

use super::make_individual;
use crate::problems::Problem;
use crate::r2rank::rank_scores;
use crate::types::{Individual, Population};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(super) fn offspring(
    pop: &Population,
    weights: &[Vec<f64>],
    problem: &Problem,
    rng: &mut ChaCha8Rng,
) -> Vec<Individual> {
    let n = pop.len();
    let dim = problem.dim();

    // Teacher phase. The population is sorted, so the teacher is in front.
    let teacher = pop.members[0].x.clone();
    let mut mean = vec![0.0; dim];
    for ind in &pop.members {
        for (m, xi) in mean.iter_mut().zip(&ind.x) {
            *m += xi;
        }
    }
    for v in &mut mean {
        *v /= n as f64;
    }
    let candidates: Vec<Individual> = pop
        .members
        .iter()
        .map(|ind| {
            let tf = rng.gen_range(1..=2) as f64;
            let r: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
            make_individual(tlbo_teacher_move(&ind.x, &teacher, &mean, &r, tf), problem)
        })
        .collect();
    let interim = greedy_accept(&pop.members, candidates, pop, weights);

    // Learner phase, comparing by a fresh ranking of the interim class.
    let scores = rank_scores(&interim, &pop.z_star, &pop.z_nad, weights);
    let candidates: Vec<Individual> = (0..n)
        .map(|i| {
            let mut j = rng.gen_range(0..n);
            while j == i && n > 1 {
                j = rng.gen_range(0..n);
            }
            let r: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
            let i_better = scores[i].performance < scores[j].performance;
            make_individual(
                tlbo_learner_move(&interim[i].x, &interim[j].x, &r, i_better),
                problem,
            )
        })
        .collect();
    greedy_accept(&interim, candidates, pop, weights)
}

/// Teacher-phase move: `x + r * (teacher - tf * mean)` componentwise.
pub fn tlbo_teacher_move(x: &[f64], teacher: &[f64], mean: &[f64], r: &[f64], tf: f64) -> Vec<f64> {
    x.iter()
        .zip(r)
        .enumerate()
        .map(|(i, (&xi, &ri))| xi + ri * (teacher[i] - tf * mean[i]))
        .collect()
}

/// Learner-phase move: step toward the better of the pair, away from the
/// worse. `i_better` says whether `x` outperforms the partner `other`.
pub fn tlbo_learner_move(x: &[f64], other: &[f64], r: &[f64], i_better: bool) -> Vec<f64> {
    x.iter()
        .zip(other)
        .zip(r)
        .map(|((&xi, &oi), &ri)| {
            if i_better {
                xi + ri * (xi - oi)
            } else {
                xi + ri * (oi - xi)
            }
        })
        .collect()
}

/// Per-slot greedy acceptance: rank incumbents and candidates together and
/// keep, for each slot, whichever scores strictly better (ties keep the
/// incumbent).
fn greedy_accept(
    incumbents: &[Individual],
    candidates: Vec<Individual>,
    pop: &Population,
    weights: &[Vec<f64>],
) -> Vec<Individual> {
    let n = incumbents.len();
    let mut joint: Vec<Individual> = incumbents.to_vec();
    joint.extend(candidates);
    let scores = rank_scores(&joint, &pop.z_star, &pop.z_nad, weights);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if scores[n + i].performance < scores[i].performance {
            out.push(joint[n + i].clone());
        } else {
            out.push(joint[i].clone());
        }
    }
    out
}
