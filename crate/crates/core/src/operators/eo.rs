//! Equilibrium optimizer: each concentration relaxes toward a member of the
//! equilibrium pool (the four best solutions and their average) with an
//! exponential mixing term and an occasional generation-rate kick.

use super::{make_individual, EoParams};
use crate::problems::Problem;
use crate::types::{Individual, Population};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(super) fn offspring(
    pop: &Population,
    params: &EoParams,
    problem: &Problem,
    g_max: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Individual> {
    let n = pop.len();
    let dim = problem.dim();

    // Equilibrium pool: four best by performance plus their centroid.
    let mut pool: Vec<Vec<f64>> = pop.members[..4].iter().map(|m| m.x.clone()).collect();
    let avg: Vec<f64> = (0..dim)
        .map(|i| pool.iter().map(|p| p[i]).sum::<f64>() / 4.0)
        .collect();
    pool.push(avg);

    let g = pop.generation as f64;
    let t = (1.0 - g / g_max as f64).powf(params.a2 * g / g_max as f64);

    (0..n)
        .map(|i| {
            let c_eq = &pool[rng.gen_range(0..pool.len())];
            let lambda: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
            let r: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
            let f: Vec<f64> = lambda
                .iter()
                .zip(&r)
                .map(|(&lj, &rj)| params.a1 * (rj - 0.5).signum() * ((-lj * t).exp() - 1.0))
                .collect();
            let r1: f64 = rng.gen();
            let r2: f64 = rng.gen();
            let gcp = if r2 >= params.gp { 0.5 * r1 } else { 0.0 };
            let x = eo_candidate(&pop.members[i].x, c_eq, &lambda, &f, gcp);
            make_individual(x, problem)
        })
        .collect()
}

/// One concentration update: `C_eq + (C - C_eq) F + (G / lambda)(1 - F)`
/// with the generation rate `G = GCP (C_eq - lambda C) F` and unit volume.
pub fn eo_candidate(c: &[f64], c_eq: &[f64], lambda: &[f64], f: &[f64], gcp: f64) -> Vec<f64> {
    c.iter()
        .zip(c_eq)
        .zip(lambda.iter().zip(f))
        .map(|((&cj, &ej), (&lj, &fj))| {
            let g0 = gcp * (ej - lj * cj);
            ej + (cj - ej) * fj + (g0 * fj / lj) * (1.0 - fj)
        })
        .collect()
}
