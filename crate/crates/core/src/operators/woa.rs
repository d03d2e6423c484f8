//! Whale optimization: encircling the best member, spiral attack, or a
//! random-whale search, chosen per individual. The contraction coefficient
//! `a` falls linearly from 2 to 0 over the generation budget.

use super::{make_individual, WoaParams};
use crate::problems::Problem;
use crate::types::{Individual, Population};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub(super) fn offspring(
    pop: &Population,
    params: &WoaParams,
    problem: &Problem,
    g_max: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Individual> {
    let n = pop.len();
    let best = pop.members[0].x.clone();
    let a = 2.0 * (1.0 - pop.generation as f64 / g_max as f64).max(0.0);
    (0..n)
        .map(|i| {
            let big_a = 2.0 * a * rng.gen::<f64>() - a;
            let big_c = 2.0 * rng.gen::<f64>();
            let p: f64 = rng.gen();
            let l: f64 = rng.gen_range(-1.0..1.0);
            let partner = pop.members[rng.gen_range(0..n)].x.clone();
            let x = woa_move(
                &pop.members[i].x,
                &best,
                &partner,
                big_a,
                big_c,
                p,
                l,
                params.spiral_b,
            );
            make_individual(x, problem)
        })
        .collect()
}

/// One whale position update. With `p < 0.5` the whale encircles the best
/// position when `|A| < 1` and chases a random partner otherwise; with
/// `p >= 0.5` it spirals in around the best.
#[allow(clippy::too_many_arguments)]
pub fn woa_move(
    x: &[f64],
    best: &[f64],
    partner: &[f64],
    big_a: f64,
    big_c: f64,
    p: f64,
    l: f64,
    b: f64,
) -> Vec<f64> {
    if p < 0.5 {
        let leader = if big_a.abs() < 1.0 { best } else { partner };
        x.iter()
            .zip(leader)
            .map(|(&xi, &li)| li - big_a * (big_c * li - xi).abs())
            .collect()
    } else {
        let swirl = (b * l).exp() * (2.0 * PI * l).cos();
        x.iter()
            .zip(best)
            .map(|(&xi, &bi)| (bi - xi).abs() * swirl + bi)
            .collect()
    }
}
