//! Genetic algorithm variation: binary tournament selection, simulated
//! binary crossover, polynomial mutation.

use super::{make_individual, tournament, GaParams};
use crate::problems::Problem;
use crate::types::{Individual, Population};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(super) fn offspring(
    pop: &Population,
    params: &GaParams,
    problem: &Problem,
    rng: &mut ChaCha8Rng,
) -> Vec<Individual> {
    let n = pop.len();
    let dim = problem.dim();
    let p_mut = params.mutation_prob.unwrap_or(1.0 / dim as f64);
    let mut kids = Vec::with_capacity(n);
    while kids.len() < n {
        let p1 = tournament(pop, rng).x.clone();
        let p2 = tournament(pop, rng).x.clone();
        let (mut c1, mut c2) = sbx(&p1, &p2, params.crossover_prob, params.crossover_index, rng);
        polynomial_mutation(&mut c1, problem, p_mut, params.mutation_index, rng);
        polynomial_mutation(&mut c2, problem, p_mut, params.mutation_index, rng);
        kids.push(make_individual(c1, problem));
        if kids.len() < n {
            kids.push(make_individual(c2, problem));
        }
    }
    kids
}

/// Simulated binary crossover. With probability `prob` the pair is crossed;
/// each variable then participates with probability 0.5, spreading children
/// around the parents with density controlled by the distribution index.
fn sbx(x1: &[f64], x2: &[f64], prob: f64, eta: f64, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = x1.to_vec();
    let mut c2 = x2.to_vec();
    if rng.gen::<f64>() >= prob {
        return (c1, c2);
    }
    for i in 0..x1.len() {
        if rng.gen::<f64>() >= 0.5 || (x1[i] - x2[i]).abs() < 1e-14 {
            continue;
        }
        let u: f64 = rng.gen();
        let beta = if u <= 0.5 {
            (2.0 * u).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
        };
        c1[i] = 0.5 * ((1.0 + beta) * x1[i] + (1.0 - beta) * x2[i]);
        c2[i] = 0.5 * ((1.0 - beta) * x1[i] + (1.0 + beta) * x2[i]);
    }
    (c1, c2)
}

/// Polynomial mutation: each variable mutates with probability `p_mut`,
/// perturbed by a polynomially distributed step scaled to the bound width.
fn polynomial_mutation(
    x: &mut [f64],
    problem: &Problem,
    p_mut: f64,
    eta: f64,
    rng: &mut ChaCha8Rng,
) {
    let lower = problem.bounds().lower();
    let upper = problem.bounds().upper();
    for i in 0..x.len() {
        if rng.gen::<f64>() >= p_mut {
            continue;
        }
        let u: f64 = rng.gen();
        let delta = if u < 0.5 {
            (2.0 * u).powf(1.0 / (eta + 1.0)) - 1.0
        } else {
            1.0 - (2.0 * (1.0 - u)).powf(1.0 / (eta + 1.0))
        };
        x[i] += delta * (upper[i] - lower[i]);
    }
}
