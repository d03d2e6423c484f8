//! The unconstrained UF1-UF10 benchmark suite (30 decision variables;
//! UF1-UF7 have two objectives, UF8-UF10 three) plus analytic Pareto-front
//! samplers used as IGD reference sets.

use crate::types::{Bounds, CoreError};
use std::collections::HashSet;
use std::f64::consts::PI;

pub const PROBLEM_DIM: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    Uf1,
    Uf2,
    Uf3,
    Uf4,
    Uf5,
    Uf6,
    Uf7,
    Uf8,
    Uf9,
    Uf10,
}

impl ProblemId {
    pub fn all() -> [ProblemId; 10] {
        use ProblemId::*;
        [Uf1, Uf2, Uf3, Uf4, Uf5, Uf6, Uf7, Uf8, Uf9, Uf10]
    }

    pub fn name(&self) -> &'static str {
        use ProblemId::*;
        match self {
            Uf1 => "UF1",
            Uf2 => "UF2",
            Uf3 => "UF3",
            Uf4 => "UF4",
            Uf5 => "UF5",
            Uf6 => "UF6",
            Uf7 => "UF7",
            Uf8 => "UF8",
            Uf9 => "UF9",
            Uf10 => "UF10",
        }
    }

    pub fn n_obj(&self) -> usize {
        use ProblemId::*;
        match self {
            Uf8 | Uf9 | Uf10 => 3,
            _ => 2,
        }
    }
}

impl std::str::FromStr for ProblemId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.to_ascii_uppercase();
        ProblemId::all()
            .into_iter()
            .find(|p| p.name() == up)
            .ok_or_else(|| format!("unknown problem {s:?} (expected UF1..UF10)"))
    }
}

impl std::fmt::Display for ProblemId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    id: ProblemId,
    dim: usize,
    bounds: Bounds,
}

impl Problem {
    pub fn new(id: ProblemId) -> Self {
        let dim = PROBLEM_DIM;
        let bounds = bounds_for(id, dim);
        Problem { id, dim, bounds }
    }

    pub fn id(&self) -> ProblemId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_obj(&self) -> usize {
        self.id.n_obj()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    /// Objective values at `x`. Callers clip into bounds first; only the
    /// dimension is checked here.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        if x.len() != self.dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(evaluate_uf(self.id, x))
    }

    /// About `k` points on the analytic Pareto front. Two-objective fronts
    /// are sampled uniformly in f1 (UF5's front is 21 isolated points, so at
    /// most 21 come back; UF6 splits points across its two segments plus the
    /// isolated point (0,1)). Three-objective fronts use a floor(sqrt(k))
    /// square grid over the surface parameterization with exact duplicates
    /// removed.
    pub fn pareto_front_samples(&self, k: usize) -> Vec<Vec<f64>> {
        assert!(k >= 2, "need at least two reference points");
        use ProblemId::*;
        match self.id {
            Uf1 | Uf2 | Uf3 => linspace(0.0, 1.0, k)
                .map(|t| vec![t, 1.0 - t.sqrt()])
                .collect(),
            Uf4 => linspace(0.0, 1.0, k).map(|t| vec![t, 1.0 - t * t]).collect(),
            Uf5 => {
                let n = 21.min(k);
                (0..n).map(|i| {
                    let t = i as f64 / 20.0;
                    vec![t, 1.0 - t]
                }).collect()
            }
            Uf6 => {
                let mut pts = vec![vec![0.0, 1.0]];
                let rest = k - 1;
                let first = rest - rest / 2;
                for t in linspace(0.25, 0.5, first) {
                    pts.push(vec![t, 1.0 - t]);
                }
                for t in linspace(0.75, 1.0, rest / 2) {
                    pts.push(vec![t, 1.0 - t]);
                }
                pts
            }
            Uf7 => linspace(0.0, 1.0, k).map(|t| vec![t, 1.0 - t]).collect(),
            Uf8 | Uf10 => {
                let s = isqrt(k);
                let mut pts = Vec::with_capacity(s * s);
                for u in linspace(0.0, 1.0, s) {
                    for v in linspace(0.0, 1.0, s) {
                        let (su, cu) = (0.5 * PI * u).sin_cos();
                        let (sv, cv) = (0.5 * PI * v).sin_cos();
                        pts.push(vec![cu * cv, cu * sv, su]);
                    }
                }
                dedupe_exact(pts)
            }
            Uf9 => {
                let s = isqrt(k);
                let half = s - s / 2;
                let mut a_grid: Vec<f64> = linspace(0.0, 0.25, half).collect();
                a_grid.extend(linspace(0.75, 1.0, s / 2));
                let mut pts = Vec::with_capacity(s * s);
                for &a in &a_grid {
                    for c in linspace(0.0, 1.0, s) {
                        pts.push(vec![a * (1.0 - c), (1.0 - a) * (1.0 - c), c]);
                    }
                }
                dedupe_exact(pts)
            }
        }
    }
}

fn bounds_for(id: ProblemId, dim: usize) -> Bounds {
    use ProblemId::*;
    let (head, tail) = match id {
        Uf1 | Uf2 | Uf5 | Uf6 | Uf7 => (1, 1.0),
        Uf3 => {
            return Bounds::new(vec![0.0; dim], vec![1.0; dim]);
        }
        Uf4 => (1, 2.0),
        Uf8 | Uf9 | Uf10 => (2, 2.0),
    };
    let mut lower = vec![0.0; dim];
    let mut upper = vec![1.0; dim];
    for i in head..dim {
        lower[i] = -tail;
        upper[i] = tail;
    }
    Bounds::new(lower, upper)
}

/// Iterator over `n` evenly spaced points from `a` to `b` inclusive.
fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (b - a) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if n > 1 && i == n - 1 { b } else { a + step * i as f64 })
}

fn isqrt(k: usize) -> usize {
    let mut s = (k as f64).sqrt() as usize;
    while (s + 1) * (s + 1) <= k {
        s += 1;
    }
    while s * s > k {
        s -= 1;
    }
    s.max(2)
}

/// Removes bitwise-exact duplicate points, keeping first occurrences in
/// order (grid parameterizations collapse entire rows at the poles).
fn dedupe_exact(pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(pts.len());
    pts.into_iter()
        .filter(|p| seen.insert(p.iter().map(|v| v.to_bits()).collect()))
        .collect()
}

/// Odd (1-based) tail indices `j` with `2 <= j <= n`, as 0-based offsets.
fn two_obj_split(n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut j1 = Vec::new();
    let mut j2 = Vec::new();
    for j in 2..=n {
        if j % 2 == 1 {
            j1.push(j);
        } else {
            j2.push(j);
        }
    }
    (j1, j2)
}

/// Tail indices for three objectives: `j-1`, `j-2`, `j` multiples of 3.
fn three_obj_split(n: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut j1 = Vec::new();
    let mut j2 = Vec::new();
    let mut j3 = Vec::new();
    for j in 3..=n {
        match j % 3 {
            1 => j1.push(j),
            2 => j2.push(j),
            _ => j3.push(j),
        }
    }
    (j1, j2, j3)
}

fn evaluate_uf(id: ProblemId, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let nf = n as f64;
    let x1 = x[0];
    use ProblemId::*;
    match id {
        Uf1 => {
            let (j1, j2) = two_obj_split(n);
            let term = |js: &[usize]| {
                js.iter()
                    .map(|&j| {
                        let y = x[j - 1] - (6.0 * PI * x1 + j as f64 * PI / nf).sin();
                        y * y
                    })
                    .sum::<f64>()
            };
            vec![
                x1 + 2.0 / j1.len() as f64 * term(&j1),
                1.0 - x1.sqrt() + 2.0 / j2.len() as f64 * term(&j2),
            ]
        }
        Uf2 => {
            let (j1, j2) = two_obj_split(n);
            let y = |j: usize, odd: bool| {
                let a = 6.0 * PI * x1 + j as f64 * PI / nf;
                let shape = 0.3 * x1 * x1 * (24.0 * PI * x1 + 4.0 * j as f64 * PI / nf).cos()
                    + 0.6 * x1;
                x[j - 1] - shape * if odd { a.cos() } else { a.sin() }
            };
            let s1: f64 = j1.iter().map(|&j| y(j, true).powi(2)).sum();
            let s2: f64 = j2.iter().map(|&j| y(j, false).powi(2)).sum();
            vec![
                x1 + 2.0 / j1.len() as f64 * s1,
                1.0 - x1.sqrt() + 2.0 / j2.len() as f64 * s2,
            ]
        }
        Uf3 => {
            let (j1, j2) = two_obj_split(n);
            let y = |j: usize| {
                x[j - 1] - x1.powf(0.5 * (1.0 + 3.0 * (j as f64 - 2.0) / (nf - 2.0)))
            };
            let bracket = |js: &[usize]| {
                let sum: f64 = js.iter().map(|&j| y(j).powi(2)).sum();
                let prod: f64 = js
                    .iter()
                    .map(|&j| (20.0 * y(j) * PI / (j as f64).sqrt()).cos())
                    .product();
                4.0 * sum - 2.0 * prod + 2.0
            };
            vec![
                x1 + 2.0 / j1.len() as f64 * bracket(&j1),
                1.0 - x1.sqrt() + 2.0 / j2.len() as f64 * bracket(&j2),
            ]
        }
        Uf4 => {
            let (j1, j2) = two_obj_split(n);
            let h = |t: f64| t.abs() / (1.0 + (2.0 * t.abs()).exp());
            let term = |js: &[usize]| {
                js.iter()
                    .map(|&j| h(x[j - 1] - (6.0 * PI * x1 + j as f64 * PI / nf).sin()))
                    .sum::<f64>()
            };
            vec![
                x1 + 2.0 / j1.len() as f64 * term(&j1),
                1.0 - x1 * x1 + 2.0 / j2.len() as f64 * term(&j2),
            ]
        }
        Uf5 => {
            let (j1, j2) = two_obj_split(n);
            let (big_n, eps) = (10.0, 0.1);
            let h = |t: f64| 2.0 * t * t - (4.0 * PI * t).cos() + 1.0;
            let term = |js: &[usize]| {
                js.iter()
                    .map(|&j| h(x[j - 1] - (6.0 * PI * x1 + j as f64 * PI / nf).sin()))
                    .sum::<f64>()
            };
            let spike = (1.0 / (2.0 * big_n) + eps) * (2.0 * big_n * PI * x1).sin().abs();
            vec![
                x1 + spike + 2.0 / j1.len() as f64 * term(&j1),
                1.0 - x1 + spike + 2.0 / j2.len() as f64 * term(&j2),
            ]
        }
        Uf6 => {
            let (j1, j2) = two_obj_split(n);
            let (big_n, eps) = (2.0, 0.1);
            let y = |j: usize| x[j - 1] - (6.0 * PI * x1 + j as f64 * PI / nf).sin();
            let bracket = |js: &[usize]| {
                let sum: f64 = js.iter().map(|&j| y(j).powi(2)).sum();
                let prod: f64 = js
                    .iter()
                    .map(|&j| (20.0 * y(j) * PI / (j as f64).sqrt()).cos())
                    .product();
                4.0 * sum - 2.0 * prod + 2.0
            };
            let spike =
                (2.0 * (1.0 / (2.0 * big_n) + eps) * (2.0 * big_n * PI * x1).sin()).max(0.0);
            vec![
                x1 + spike + 2.0 / j1.len() as f64 * bracket(&j1),
                1.0 - x1 + spike + 2.0 / j2.len() as f64 * bracket(&j2),
            ]
        }
        Uf7 => {
            let (j1, j2) = two_obj_split(n);
            let term = |js: &[usize]| {
                js.iter()
                    .map(|&j| {
                        let y = x[j - 1] - (6.0 * PI * x1 + j as f64 * PI / nf).sin();
                        y * y
                    })
                    .sum::<f64>()
            };
            let root = x1.powf(0.2);
            vec![
                root + 2.0 / j1.len() as f64 * term(&j1),
                1.0 - root + 2.0 / j2.len() as f64 * term(&j2),
            ]
        }
        Uf8 | Uf10 => {
            let x2 = x[1];
            let (j1, j2, j3) = three_obj_split(n);
            let y = |j: usize| x[j - 1] - 2.0 * x2 * (2.0 * PI * x1 + j as f64 * PI / nf).sin();
            let term = |js: &[usize]| -> f64 {
                js.iter()
                    .map(|&j| {
                        let v = y(j);
                        if id == Uf8 {
                            v * v
                        } else {
                            4.0 * v * v - (8.0 * PI * v).cos() + 1.0
                        }
                    })
                    .sum()
            };
            let (c1, c2) = ((0.5 * x1 * PI).cos(), (0.5 * x2 * PI).cos());
            let (s1, s2) = ((0.5 * x1 * PI).sin(), (0.5 * x2 * PI).sin());
            vec![
                c1 * c2 + 2.0 / j1.len() as f64 * term(&j1),
                c1 * s2 + 2.0 / j2.len() as f64 * term(&j2),
                s1 + 2.0 / j3.len() as f64 * term(&j3),
            ]
        }
        Uf9 => {
            let x2 = x[1];
            let (j1, j2, j3) = three_obj_split(n);
            let eps = 0.1;
            let y = |j: usize| x[j - 1] - 2.0 * x2 * (2.0 * PI * x1 + j as f64 * PI / nf).sin();
            let term = |js: &[usize]| js.iter().map(|&j| y(j).powi(2)).sum::<f64>();
            let hump = ((1.0 + eps) * (1.0 - 4.0 * (2.0 * x1 - 1.0).powi(2))).max(0.0);
            vec![
                0.5 * (hump + 2.0 * x1) * x2 + 2.0 / j1.len() as f64 * term(&j1),
                0.5 * (hump - 2.0 * x1 + 2.0) * x2 + 2.0 / j2.len() as f64 * term(&j2),
                1.0 - x2 + 2.0 / j3.len() as f64 * term(&j3),
            ]
        }
    }
}
