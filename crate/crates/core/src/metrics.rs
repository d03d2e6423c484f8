//! Quality indicators and the rank statistics used to compare algorithms:
//! inverted generational distance, the spacing dispersion measure, per-run
//! summaries, and the Friedman test.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("metric requires a nonempty point set")]
    EmptySet,
    #[error("points have mismatched dimensions: {a} vs {b}")]
    DimensionMismatch { a: usize, b: usize },
    #[error("spacing requires at least 2 points, got {n}")]
    TooFewPoints { n: usize },
    #[error("spacing is undefined when all nearest-neighbor distances are 0")]
    ZeroMeanDistance,
    #[error("rank table needs at least 2 runs and 2 algorithms, got {rows}x{cols}")]
    DegenerateTable { rows: usize, cols: usize },
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn check_dims(points: &[Vec<f64>]) -> Result<usize, MetricError> {
    let d = points.first().ok_or(MetricError::EmptySet)?.len();
    for p in points {
        if p.len() != d {
            return Err(MetricError::DimensionMismatch { a: d, b: p.len() });
        }
    }
    Ok(d)
}

/// Mean, over the reference set, of the distance to the nearest obtained
/// solution. Lower is better; zero means the reference set is covered.
pub fn igd(solutions: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<f64, MetricError> {
    let ds = check_dims(solutions)?;
    let dr = check_dims(reference)?;
    if ds != dr {
        return Err(MetricError::DimensionMismatch { a: ds, b: dr });
    }
    let total: f64 = reference
        .iter()
        .map(|r| {
            solutions
                .iter()
                .map(|s| euclid(s, r))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference.len() as f64)
}

/// Each point's Euclidean distance to its nearest distinct neighbor.
fn nearest_neighbor_distances(points: &[Vec<f64>]) -> Vec<f64> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| euclid(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Dispersion of nearest-neighbor distances, normalized by n times their
/// mean: sqrt(sum (D_i - D_m)^2) / (n * D_m). Zero for perfectly even
/// spacing.
pub fn spacing(solutions: &[Vec<f64>]) -> Result<f64, MetricError> {
    check_dims(solutions)?;
    let n = solutions.len();
    if n < 2 {
        return Err(MetricError::TooFewPoints { n });
    }
    let d = nearest_neighbor_distances(solutions);
    let d_m = d.iter().sum::<f64>() / n as f64;
    if d_m == 0.0 {
        return Err(MetricError::ZeroMeanDistance);
    }
    let ss: f64 = d.iter().map(|di| (di - d_m) * (di - d_m)).sum();
    Ok(ss.sqrt() / (n as f64 * d_m))
}

/// Classical spacing variant: sample variance of the same nearest-neighbor
/// distances, sqrt((1/(n-1)) * sum (D_i - D_m)^2). Kept as a cross-check;
/// reports use `spacing`.
pub fn schott_spacing(solutions: &[Vec<f64>]) -> Result<f64, MetricError> {
    check_dims(solutions)?;
    let n = solutions.len();
    if n < 2 {
        return Err(MetricError::TooFewPoints { n });
    }
    let d = nearest_neighbor_distances(solutions);
    let d_m = d.iter().sum::<f64>() / n as f64;
    let ss: f64 = d.iter().map(|di| (di - d_m) * (di - d_m)).sum();
    Ok((ss / (n - 1) as f64).sqrt())
}

/// Mean, minimum, and sample standard deviation (divisor R-1; zero for a
/// single value) of a run's metric values.
pub fn summarize(values: &[f64]) -> Result<(f64, f64, f64), MetricError> {
    if values.is_empty() {
        return Err(MetricError::EmptySet);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let std = if values.len() < 2 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    };
    Ok((mean, min, std))
}

/// Ranks one row ascending (rank 1 is the smallest value) with mid-rank
/// ties.
fn row_ranks(row: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..row.len()).collect();
    idx.sort_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap());
    let mut ranks = vec![0.0; row.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && row[idx[j + 1]] == row[idx[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share the mid-rank.
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = mid;
        }
        i = j + 1;
    }
    ranks
}

/// Friedman chi-square over an R x A score table (rows are runs or
/// problems, columns are algorithms, lower scores rank better). Returns the
/// statistic and the per-column mean ranks.
pub fn friedman(scores: &[Vec<f64>]) -> Result<(f64, Vec<f64>), MetricError> {
    let rows = scores.len();
    let cols = scores.first().map_or(0, |r| r.len());
    if rows < 2 || cols < 2 {
        return Err(MetricError::DegenerateTable { rows, cols });
    }
    for r in scores {
        if r.len() != cols {
            return Err(MetricError::DegenerateTable { rows, cols });
        }
    }
    let mut rank_sums = vec![0.0; cols];
    for row in scores {
        for (s, r) in rank_sums.iter_mut().zip(row_ranks(row)) {
            *s += r;
        }
    }
    let (rf, af) = (rows as f64, cols as f64);
    // Centered form of the chi-square: exactly zero when every column ties.
    let expected = rf * (af + 1.0) / 2.0;
    let ss: f64 = rank_sums.iter().map(|s| (s - expected) * (s - expected)).sum();
    let statistic = 12.0 / (rf * af * (af + 1.0)) * ss;
    let mean_ranks = rank_sums.iter().map(|s| s / rf).collect();
    Ok((statistic, mean_ranks))
}

/// Linear-interpolation percentile of an ascending-sorted slice, at
/// fractional position q * (n - 1).
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&q));
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// First quartile, median, third quartile of a value set, interpolated the
/// same way everywhere they are drawn (state features, box plots).
pub fn quartiles(values: &[f64]) -> (f64, f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (
        percentile_sorted(&sorted, 0.25),
        percentile_sorted(&sorted, 0.5),
        percentile_sorted(&sorted, 0.75),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn igd_of_identical_sets_is_zero() {
        let pts = vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]];
        assert_eq!(igd(&pts, &pts).unwrap(), 0.0);
    }

    #[test]
    fn igd_hand_example() {
        let reference = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let solutions = vec![vec![0.0, 0.0]];
        let got = igd(&solutions, &reference).unwrap();
        assert!((got - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn igd_matches_double_loop_oracle() {
        let mut rng = crate::rng::stream(7, crate::rng::Purpose::PopInit, 0);
        for _ in 0..20 {
            let gen = |n: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<f64>> {
                (0..n)
                    .map(|_| (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect())
                    .collect()
            };
            let p = gen(8, &mut rng);
            let r = gen(11, &mut rng);
            let mut total = 0.0;
            for rp in &r {
                let mut best = f64::INFINITY;
                for sp in &p {
                    let d: f64 = rp
                        .iter()
                        .zip(sp)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    best = best.min(d);
                }
                total += best;
            }
            let oracle = total / r.len() as f64;
            assert!((igd(&p, &r).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn igd_is_translation_invariant_and_monotone_in_solutions() {
        let reference = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.3, 0.6]];
        let solutions = vec![vec![0.2, 0.9], vec![0.8, 0.4]];
        let base = igd(&solutions, &reference).unwrap();
        let shift = |s: &[Vec<f64>]| -> Vec<Vec<f64>> {
            s.iter()
                .map(|p| p.iter().map(|v| v + 3.25).collect())
                .collect()
        };
        let shifted = igd(&shift(&solutions), &shift(&reference)).unwrap();
        assert!((base - shifted).abs() < 1e-12);

        let mut bigger = solutions.clone();
        bigger.push(vec![50.0, 50.0]);
        assert!(igd(&bigger, &reference).unwrap() <= base + 1e-15);
    }

    #[test]
    fn igd_rejects_empty_and_mismatched() {
        let pts = vec![vec![0.0, 1.0]];
        assert_eq!(igd(&[], &pts), Err(MetricError::EmptySet));
        assert_eq!(igd(&pts, &[]), Err(MetricError::EmptySet));
        let three = vec![vec![0.0, 1.0, 2.0]];
        assert!(matches!(
            igd(&pts, &three),
            Err(MetricError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spacing_of_even_grid_is_zero() {
        let pts: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 0.0]).collect();
        assert_eq!(spacing(&pts).unwrap(), 0.0);
    }

    #[test]
    fn spacing_hand_example() {
        // D = (1, 1, 2), mean 4/3: sqrt(1/9 + 1/9 + 4/9) / (3 * 4/3).
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]];
        let expected = (2.0f64 / 3.0).sqrt() / 4.0;
        assert!((spacing(&pts).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn spacing_is_scale_and_translation_invariant() {
        let pts = vec![vec![0.0, 0.1], vec![0.9, 0.2], vec![1.7, 1.3], vec![2.0, 3.0]];
        let base = spacing(&pts).unwrap();
        let transformed: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| p.iter().map(|v| 7.5 * v - 2.0).collect())
            .collect();
        assert!((spacing(&transformed).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn spacing_rejects_degenerate_sets() {
        assert_eq!(
            spacing(&[vec![1.0, 2.0]]),
            Err(MetricError::TooFewPoints { n: 1 })
        );
        let coincident = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        assert_eq!(spacing(&coincident), Err(MetricError::ZeroMeanDistance));
    }

    #[test]
    fn schott_variant_on_hand_example() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]];
        let expected = ((2.0f64 / 3.0) / 2.0).sqrt();
        assert!((schott_spacing(&pts).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn summarize_hand_examples() {
        assert_eq!(summarize(&[2.0]).unwrap(), (2.0, 2.0, 0.0));
        let (mean, min, std) = summarize(&[1.0, 3.0]).unwrap();
        assert_eq!((mean, min), (2.0, 1.0));
        assert!((std - std::f64::consts::SQRT_2).abs() < 1e-15);
        let (_, _, flat) = summarize(&[4.0; 6]).unwrap();
        assert_eq!(flat, 0.0);
        assert_eq!(summarize(&[]), Err(MetricError::EmptySet));
    }

    #[test]
    fn friedman_textbook_example() {
        // Rank sums 3, 7, 8; expected sum 6 each; chi-square 14/3.
        let table = vec![
            vec![1.0, 2.0, 3.0],
            vec![1.0, 3.0, 2.0],
            vec![1.0, 2.0, 3.0],
        ];
        let (stat, ranks) = friedman(&table).unwrap();
        let expected = 12.0 / (3.0 * 3.0 * 4.0) * (9.0 + 1.0 + 4.0);
        assert_eq!(stat, expected);
        assert!((stat - 14.0 / 3.0).abs() < 1e-12);
        assert_eq!(ranks, vec![1.0, 7.0 / 3.0, 8.0 / 3.0]);
    }

    #[test]
    fn friedman_identical_columns_scores_exactly_zero() {
        let table = vec![vec![5.0; 4]; 3];
        let (stat, ranks) = friedman(&table).unwrap();
        assert_eq!(stat, 0.0);
        assert!(ranks.iter().all(|&r| r == 2.5));
    }

    #[test]
    fn friedman_dominant_column_takes_best_rank() {
        let table = vec![
            vec![0.1, 2.0, 3.0],
            vec![0.2, 5.0, 4.0],
            vec![0.3, 2.5, 2.6],
            vec![0.1, 9.0, 1.5],
        ];
        let (_, ranks) = friedman(&table).unwrap();
        assert_eq!(ranks[0], 1.0);
        assert!(ranks.iter().skip(1).all(|&r| r > 1.0));
    }

    #[test]
    fn friedman_mid_ranks_ties() {
        let ranks = row_ranks(&[2.0, 1.0, 2.0, 5.0]);
        assert_eq!(ranks, vec![2.5, 1.0, 2.5, 4.0]);
    }

    #[test]
    fn friedman_rejects_degenerate_shapes() {
        assert!(matches!(
            friedman(&[vec![1.0, 2.0]]),
            Err(MetricError::DegenerateTable { rows: 1, cols: 2 })
        ));
        assert!(matches!(
            friedman(&[vec![1.0], vec![2.0]]),
            Err(MetricError::DegenerateTable { rows: 2, cols: 1 })
        ));
        assert!(matches!(
            friedman(&[vec![1.0, 2.0], vec![2.0]]),
            Err(MetricError::DegenerateTable { .. })
        ));
    }

    #[test]
    fn percentile_interpolates_linearly() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile_sorted(&v, 0.0), 1.0);
        assert_eq!(percentile_sorted(&v, 1.0), 4.0);
        assert_eq!(percentile_sorted(&v, 0.5), 2.5);
        assert_eq!(percentile_sorted(&v, 0.25), 1.75);
        let (q1, med, q3) = quartiles(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!((q1, med, q3), (1.75, 2.5, 3.25));
    }
}
