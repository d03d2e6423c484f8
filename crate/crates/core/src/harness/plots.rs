//! Minimal SVG emission for the two report figures: per-problem box plots
//! of IGD and SP across algorithms, and per-problem stacked-area charts of
//! operator usage over generations. Hand-built markup, no styling beyond
//! what the data needs.

use super::report::{read_runs_csv, read_usage_csv, RunRecord};
use super::{Algorithm, HarnessError};
use crate::metrics::quartiles;
use crate::operators::{OperatorId, N_OPERATORS};
use crate::problems::ProblemId;
use std::path::{Path, PathBuf};

/// Tukey box-plot statistics: quartiles, whiskers clamped to the most
/// extreme data points within 1.5 IQR of the box, the rest outliers.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outliers: Vec<f64>,
}

pub fn box_stats(values: &[f64]) -> BoxStats {
    assert!(!values.is_empty());
    let (q1, median, q3) = quartiles(values);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let whisker_lo = values
        .iter()
        .copied()
        .filter(|v| *v >= lo_fence)
        .fold(f64::INFINITY, f64::min);
    let whisker_hi = values
        .iter()
        .copied()
        .filter(|v| *v <= hi_fence)
        .fold(f64::NEG_INFINITY, f64::max);
    let outliers = values
        .iter()
        .copied()
        .filter(|v| *v < lo_fence || *v > hi_fence)
        .collect();
    BoxStats {
        q1,
        median,
        q3,
        whisker_lo,
        whisker_hi,
        outliers,
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const OPERATOR_FILLS: [&str; N_OPERATORS] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
];

struct YScale {
    lo: f64,
    hi: f64,
    top: f64,
    bottom: f64,
}

impl YScale {
    fn new(lo: f64, hi: f64, top: f64, bottom: f64) -> YScale {
        let (lo, hi) = if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = (hi - lo) * 0.05;
            (lo - pad, hi + pad)
        };
        YScale {
            lo,
            hi,
            top,
            bottom,
        }
    }

    fn y(&self, v: f64) -> f64 {
        self.bottom - (v - self.lo) / (self.hi - self.lo) * (self.bottom - self.top)
    }
}

fn box_panel(
    svg: &mut String,
    title: &str,
    x0: f64,
    x1: f64,
    groups: &[(Algorithm, Vec<f64>)],
) {
    let (top, bottom) = (40.0, 330.0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, vals) in groups {
        for v in vals {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    let scale = YScale::new(lo, hi, top, bottom);

    svg.push_str(&format!(
        "<text x=\"{}\" y=\"25\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        (x0 + x1) / 2.0,
        esc(title)
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{top}\" x2=\"{x0}\" y2=\"{bottom}\" stroke=\"black\"/>\n"
    ));
    for t in [scale.lo, (scale.lo + scale.hi) / 2.0, scale.hi] {
        let y = scale.y(t);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{x0}\" y2=\"{y}\" stroke=\"black\"/>\n",
            x0 - 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"9\">{t:.4}</text>\n",
            x0 - 6.0,
            y + 3.0
        ));
    }

    let slot = (x1 - x0) / groups.len() as f64;
    for (i, (alg, vals)) in groups.iter().enumerate() {
        let cx = x0 + slot * (i as f64 + 0.5);
        let stats = box_stats(vals);
        let half = (slot * 0.3).min(14.0);
        let (yq1, ymed, yq3) = (scale.y(stats.q1), scale.y(stats.median), scale.y(stats.q3));
        let (ylo, yhi) = (scale.y(stats.whisker_lo), scale.y(stats.whisker_hi));
        // Whisker stem and caps.
        svg.push_str(&format!(
            "<line x1=\"{cx}\" y1=\"{ylo}\" x2=\"{cx}\" y2=\"{yhi}\" stroke=\"black\"/>\n"
        ));
        for y in [ylo, yhi] {
            svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"black\"/>\n",
                cx - half / 2.0,
                cx + half / 2.0
            ));
        }
        // Box with median bar; a degenerate box is a zero-height rect
        // rendered by the median line alone.
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{yq3}\" width=\"{}\" height=\"{}\" fill=\"white\" stroke=\"black\"/>\n",
            cx - half,
            2.0 * half,
            yq1 - yq3
        ));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ymed}\" x2=\"{}\" y2=\"{ymed}\" stroke=\"black\" stroke-width=\"2\"/>\n",
            cx - half,
            cx + half
        ));
        for v in &stats.outliers {
            svg.push_str(&format!(
                "<circle cx=\"{cx}\" cy=\"{}\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n",
                scale.y(*v)
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{cx}\" y=\"{}\" text-anchor=\"middle\" font-size=\"9\">{}</text>\n",
            bottom + 14.0,
            esc(alg.label())
        ));
    }
}

fn boxplot_svg(problem: ProblemId, records: &[&RunRecord]) -> String {
    let mut algorithms: Vec<Algorithm> = Vec::new();
    for r in records {
        if !algorithms.contains(&r.algorithm) {
            algorithms.push(r.algorithm);
        }
    }
    let collect = |metric: fn(&RunRecord) -> f64| -> Vec<(Algorithm, Vec<f64>)> {
        algorithms
            .iter()
            .map(|&a| {
                (
                    a,
                    records
                        .iter()
                        .filter(|r| r.algorithm == a)
                        .map(|r| metric(r))
                        .collect(),
                )
            })
            .collect()
    };
    let mut svg = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"380\" \
         viewBox=\"0 0 960 380\" font-family=\"sans-serif\">\n",
    );
    svg.push_str(&format!(
        "<text x=\"480\" y=\"372\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
        esc(&problem.to_string())
    ));
    box_panel(&mut svg, "IGD", 70.0, 460.0, &collect(|r| r.igd));
    box_panel(&mut svg, "SP", 560.0, 950.0, &collect(|r| r.sp));
    svg.push_str("</svg>\n");
    svg
}

fn usage_svg(problem: ProblemId, algorithm: Algorithm, rows: &[[f64; N_OPERATORS]]) -> String {
    let (x0, x1, top, bottom) = (60.0, 900.0, 40.0, 330.0);
    let n = rows.len().max(2);
    let x_of = |g: usize| x0 + (x1 - x0) * g as f64 / (n - 1) as f64;
    let y_of = |pct: f64| bottom - (bottom - top) * pct / 100.0;

    let mut svg = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"380\" \
         viewBox=\"0 0 960 380\" font-family=\"sans-serif\">\n",
    );
    svg.push_str(&format!(
        "<text x=\"480\" y=\"25\" text-anchor=\"middle\" font-size=\"14\">{} operator usage ({})</text>\n",
        esc(&problem.to_string()),
        esc(algorithm.label())
    ));

    // Stacked cumulative bands, bottom-up in operator order.
    let mut lower: Vec<f64> = vec![0.0; rows.len()];
    for op in OperatorId::ALL {
        let k = op.index();
        let upper: Vec<f64> = rows
            .iter()
            .zip(&lower)
            .map(|(row, lo)| lo + row[k])
            .collect();
        let mut points = String::new();
        for (g, u) in upper.iter().enumerate() {
            points.push_str(&format!("{},{} ", x_of(g), y_of(*u)));
        }
        for (g, l) in lower.iter().enumerate().rev() {
            points.push_str(&format!("{},{} ", x_of(g), y_of(*l)));
        }
        svg.push_str(&format!(
            "<polygon points=\"{}\" fill=\"{}\" stroke=\"none\"/>\n",
            points.trim_end(),
            OPERATOR_FILLS[k]
        ));
        lower = upper;
    }

    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{bottom}\" x2=\"{x1}\" y2=\"{bottom}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{top}\" x2=\"{x0}\" y2=\"{bottom}\" stroke=\"black\"/>\n"
    ));
    for pct in [0.0, 50.0, 100.0] {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"9\">{pct}%</text>\n",
            x0 - 6.0,
            y_of(pct) + 3.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">generation</text>\n",
        (x0 + x1) / 2.0,
        bottom + 24.0
    ));
    for op in OperatorId::ALL {
        let k = op.index();
        let lx = x0 + 120.0 * k as f64;
        svg.push_str(&format!(
            "<rect x=\"{lx}\" y=\"352\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            OPERATOR_FILLS[k]
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"361\" font-size=\"10\">{}</text>\n",
            lx + 14.0,
            esc(op.label())
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Renders SVGs from the CSV artifacts in `report_dir`: one box-plot figure
/// per problem in runs.csv, and one stacked usage figure per problem in
/// each operator_usage_{algorithm}.csv. Returns the written paths.
pub fn emit_plots(report_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let runs_path = report_dir.join("runs.csv");
    if !runs_path.exists() {
        return Err(HarnessError::io(
            &runs_path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "required input is missing"),
        ));
    }
    let records = read_runs_csv(&runs_path)?;
    let mut written = Vec::new();

    let mut problems: Vec<ProblemId> = Vec::new();
    for r in &records {
        if !problems.contains(&r.problem) {
            problems.push(r.problem);
        }
    }
    for &p in &problems {
        let rows: Vec<&RunRecord> = records.iter().filter(|r| r.problem == p).collect();
        let path = report_dir.join(format!("boxplot_{p}.svg"));
        std::fs::write(&path, boxplot_svg(p, &rows)).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
    }

    for algorithm in Algorithm::all() {
        let usage_path = report_dir.join(format!("operator_usage_{}.csv", algorithm.label()));
        if !usage_path.exists() {
            continue;
        }
        for (problem, rows) in read_usage_csv(&usage_path)? {
            let path = report_dir.join(format!("usage_{problem}_{}.svg", algorithm.label()));
            std::fs::write(&path, usage_svg(problem, algorithm, &rows))
                .map_err(|e| HarnessError::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}
