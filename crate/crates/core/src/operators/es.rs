//! Evolution strategy variation: intermediate recombination of two parents
//! from the elite pool, then Gaussian mutation with a log-normally
//! self-adapted per-offspring step size.

use super::{make_individual, standard_normal, EsParams};
use crate::problems::Problem;
use crate::types::{Individual, Population};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(super) fn offspring(
    pop: &Population,
    params: &EsParams,
    problem: &Problem,
    rng: &mut ChaCha8Rng,
) -> Vec<Individual> {
    let n = pop.len();
    let dim = problem.dim();
    // The population is sorted by performance key, so the parent pool is a
    // prefix.
    let mu = ((n as f64 * params.parent_fraction).round() as usize).clamp(2, n);
    let tau = params
        .learning_rate
        .unwrap_or(1.0 / (2.0 * dim as f64).sqrt());
    let lower = problem.bounds().lower();
    let upper = problem.bounds().upper();

    (0..n)
        .map(|_| {
            let a = rng.gen_range(0..mu);
            let mut b = rng.gen_range(0..mu);
            while b == a && mu > 1 {
                b = rng.gen_range(0..mu);
            }
            let pa = &pop.members[a].x;
            let pb = &pop.members[b].x;
            let sigma = params.sigma_initial * (tau * standard_normal(rng)).exp();
            let x: Vec<f64> = (0..dim)
                .map(|i| {
                    let base = 0.5 * (pa[i] + pb[i]);
                    base + sigma * (upper[i] - lower[i]) * standard_normal(rng)
                })
                .collect();
            make_individual(x, problem)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::tests::ranked_test_population;
    use super::*;
    use crate::problems::ProblemId;
    use crate::rng::{stream, Purpose};

    #[test]
    fn zero_step_size_yields_exact_recombinations() {
        let problem = Problem::new(ProblemId::Uf1);
        let (pop, _) = ranked_test_population(&problem, 8, 15);
        let params = EsParams {
            parent_fraction: 0.5,
            sigma_initial: 0.0,
            learning_rate: None,
        };
        let mut rng = stream(2, Purpose::Operator, 0);
        let kids = offspring(&pop, &params, &problem, &mut rng);
        for kid in &kids {
            let is_midpoint = (0..4).any(|a| {
                (0..4).any(|b| {
                    a != b
                        && kid.x.iter().enumerate().all(|(i, &v)| {
                            let mid = 0.5 * (pop.members[a].x[i] + pop.members[b].x[i]);
                            // Clipping cannot move a midpoint of two feasible
                            // points, so equality is exact.
                            v == mid
                        })
                })
            });
            assert!(is_midpoint, "offspring is not a parent midpoint");
        }
    }

    #[test]
    fn parents_come_from_the_elite_prefix() {
        // With a tiny step size every offspring stays near a midpoint of the
        // first half of the population.
        let problem = Problem::new(ProblemId::Uf1);
        let (pop, _) = ranked_test_population(&problem, 8, 16);
        let params = EsParams {
            parent_fraction: 0.5,
            sigma_initial: 1e-9,
            learning_rate: Some(0.0),
        };
        let mut rng = stream(4, Purpose::Operator, 0);
        let kids = offspring(&pop, &params, &problem, &mut rng);
        for kid in &kids {
            let near_elite_mid = (0..4).any(|a| {
                (0..4).any(|b| {
                    a != b
                        && kid.x.iter().enumerate().all(|(i, &v)| {
                            let mid = 0.5 * (pop.members[a].x[i] + pop.members[b].x[i]);
                            (v - mid).abs() < 1e-6
                        })
                })
            });
            assert!(near_elite_mid);
        }
    }
}
