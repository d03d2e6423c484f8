//! The five single-objective evolutionary operators, lifted to the ranked
//! population: wherever a source algorithm compares scalar fitness, it
//! compares `performance = r2_rank + l2_norm` (lower is better).
//!
//! Every operator follows one contract: take a ranked population of size N,
//! produce N offspring (clipped into bounds and evaluated), then keep the
//! best N of parents-plus-offspring under a fresh ranking. Offspring that
//! duplicate an existing decision vector bitwise are dropped before the
//! survival ranking, so a no-op variation leaves the population unchanged.

mod eo;
mod es;
mod ga;
mod tlbo;
mod woa;

pub use eo::eo_candidate;
pub use tlbo::{tlbo_learner_move, tlbo_teacher_move};
pub use woa::woa_move;

use crate::problems::Problem;
use crate::r2rank::rank_population;
use crate::types::{Individual, Population};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::f64::consts::PI;

pub const N_OPERATORS: usize = 5;

/// Action identities, in the order the agent's output layer and all usage
/// reports use them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum OperatorId {
    Eo = 0,
    Woa = 1,
    Tlbo = 2,
    Es = 3,
    Ga = 4,
}

impl OperatorId {
    pub const ALL: [OperatorId; N_OPERATORS] = [
        OperatorId::Eo,
        OperatorId::Woa,
        OperatorId::Tlbo,
        OperatorId::Es,
        OperatorId::Ga,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> OperatorId {
        Self::ALL[i]
    }

    pub fn label(self) -> &'static str {
        match self {
            OperatorId::Eo => "eo",
            OperatorId::Woa => "woa",
            OperatorId::Tlbo => "tlbo",
            OperatorId::Es => "es",
            OperatorId::Ga => "ga",
        }
    }
}

impl std::fmt::Display for OperatorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    pub crossover_prob: f64,
    pub crossover_index: f64,
    /// Per-variable mutation probability; `None` means `1 / dim`.
    pub mutation_prob: Option<f64>,
    pub mutation_index: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsParams {
    /// Fraction of the population used as the parent pool.
    pub parent_fraction: f64,
    /// Base mutation step, as a fraction of each variable's bound width.
    pub sigma_initial: f64,
    /// Log-normal self-adaptation rate; `None` means `1 / sqrt(2 * dim)`.
    pub learning_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WoaParams {
    pub spiral_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EoParams {
    pub a1: f64,
    pub a2: f64,
    pub gp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorParams {
    pub ga: GaParams,
    pub es: EsParams,
    pub woa: WoaParams,
    pub eo: EoParams,
}

impl Default for OperatorParams {
    fn default() -> Self {
        OperatorParams {
            ga: GaParams {
                crossover_prob: 0.9,
                crossover_index: 20.0,
                mutation_prob: None,
                mutation_index: 20.0,
            },
            es: EsParams {
                parent_fraction: 0.5,
                sigma_initial: 0.5,
                learning_rate: None,
            },
            woa: WoaParams { spiral_b: 1.0 },
            eo: EoParams {
                a1: 2.0,
                a2: 1.0,
                gp: 0.5,
            },
        }
    }
}

/// Uniform draw over the five operators.
pub fn random_select(rng: &mut ChaCha8Rng) -> OperatorId {
    OperatorId::from_index(rng.gen_range(0..N_OPERATORS))
}

/// Runs one generation of the chosen operator. The input must be ranked;
/// the result is the best `pop.len()` of parents and offspring under a
/// fresh ranking, with the generation counter advanced.
pub fn step(
    op: OperatorId,
    pop: &Population,
    weights: &[Vec<f64>],
    params: &OperatorParams,
    problem: &Problem,
    g_max: usize,
    rng: &mut ChaCha8Rng,
) -> Population {
    debug_assert!(pop.is_ranked(), "operators require a ranked population");
    let offspring = match op {
        OperatorId::Eo => eo::offspring(pop, &params.eo, problem, g_max, rng),
        OperatorId::Woa => woa::offspring(pop, &params.woa, problem, g_max, rng),
        OperatorId::Tlbo => tlbo::offspring(pop, weights, problem, rng),
        OperatorId::Es => es::offspring(pop, &params.es, problem, rng),
        OperatorId::Ga => ga::offspring(pop, &params.ga, problem, rng),
    };
    survivors(pop, offspring, weights)
}

/// Mu-plus-lambda survival: rank parents and offspring together (bitwise
/// duplicate decision vectors dropped, first occurrence kept) and retain the
/// best `n`. Falls back to cloning front members in the vanishingly unlikely
/// case deduplication leaves fewer than `n` candidates.
fn survivors(parents: &Population, offspring: Vec<Individual>, weights: &[Vec<f64>]) -> Population {
    let n = parents.len();
    let mut members = parents.members.clone();
    members.extend(offspring);
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(members.len());
    members.retain(|ind| seen.insert(ind.x.iter().map(|v| v.to_bits()).collect()));

    let union = Population {
        members,
        generation: parents.generation + 1,
        z_star: parents.z_star.clone(),
        z_nad: parents.z_nad.clone(),
    };
    let mut ranked = rank_population(union, weights);
    if ranked.len() > n {
        ranked.members.truncate(n);
    } else {
        while ranked.len() < n {
            let fill = ranked.members[ranked.len() % ranked.members.len().max(1)].clone();
            ranked.members.push(fill);
        }
        ranked.members.sort_by(|a, b| {
            (a.r2_rank, a.l2_norm)
                .partial_cmp(&(b.r2_rank, b.l2_norm))
                .expect("ranks and norms are finite")
        });
    }
    ranked
}

/// Evaluates a raw offspring vector: clip into bounds, then score.
fn make_individual(x: Vec<f64>, problem: &Problem) -> Individual {
    let clipped = problem.bounds().clip(&x).expect("operator preserves dimension");
    let f = problem.evaluate(&clipped).expect("clipped vector evaluates");
    Individual::new(clipped, f)
}

/// Standard normal via Box-Muller; keeps the operator modules free of
/// distribution dependencies.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Binary tournament on performance; ties keep the first pick.
fn tournament<'a>(pop: &'a Population, rng: &mut ChaCha8Rng) -> &'a Individual {
    let a = &pop.members[rng.gen_range(0..pop.len())];
    let b = &pop.members[rng.gen_range(0..pop.len())];
    if b.performance < a.performance {
        b
    } else {
        a
    }
}
