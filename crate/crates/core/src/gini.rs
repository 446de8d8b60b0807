//! Gini indices of caterpillar trees and Lorenz curves.
//!
//! Type I measures the inequality of vertex depths over all `m + n` vertices,
//! rooted at the leftmost spine vertex. Type II measures the inequality of
//! leaf counts over the `m` spine vertices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{pa_cov, pa_mean};
use crate::simulate::GrowthModel;
use crate::tree::{initial_degrees, CaterpillarTree};

fn sort_ascending(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
}

/// `Σ_u Σ_v |x_u - x_v|` over ordered pairs, for values already in ascending
/// order: `2 Σ_i (2i - N - 1) x_(i)` with 1-based `i`.
pub fn pairwise_abs_diff_sum_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    2.0 * sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum::<f64>()
}

/// `Σ_u Σ_v |x_u - x_v|` over ordered pairs in O(N log N).
pub fn pairwise_abs_diff_sum(values: &[f64]) -> f64 {
    pairwise_abs_diff_sum_sorted(&sort_ascending(values))
}

/// Pairwise Gini index `Σ|x_u - x_v| / (2 N Σ x)`.
pub fn gini(values: &[f64]) -> Result<f64> {
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Undefined("Gini index of values with zero total"));
    }
    Ok(pairwise_abs_diff_sum(values) / (2.0 * values.len() as f64 * total))
}

/// Type I Gini index: inequality of vertex depths.
pub fn gini_type1(tree: &CaterpillarTree) -> Result<f64> {
    let depths = tree.depths();
    let total = depths.total();
    if total == 0 {
        return Err(Error::Undefined("type I Gini index with all depths zero"));
    }
    // Histogram form of the sorted-prefix identity: vertices at depth d occupy
    // ranks start+1..=start+c, and Σ (2i - N - 1) over that block is
    // c (2 start + c + 1 - N - 1).
    let big_n = depths.len() as f64;
    let mut start = 0.0;
    let mut numerator = 0.0;
    for (d, &c) in depths.counts().iter().enumerate() {
        let c = c as f64;
        numerator += 2.0 * d as f64 * c * (2.0 * start + c - big_n);
        start += c;
    }
    Ok(numerator / (2.0 * big_n * total as f64))
}

/// Type II Gini index: inequality of leaf counts on the spine.
pub fn gini_type2(tree: &CaterpillarTree) -> Result<f64> {
    if tree.n() == 0 {
        return Err(Error::Undefined(
            "type II Gini index of a tree without leaves",
        ));
    }
    let leaves: Vec<f64> = tree.leaves().iter().map(|&l| l as f64).collect();
    Ok(pairwise_abs_diff_sum(&leaves) / (2.0 * tree.m() as f64 * tree.n() as f64))
}

/// Two algebraically distinct closed forms of the type I estimator for uniform trees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformClosedForms {
    /// The expanded rational function (canonical).
    pub expanded: f64,
    /// The factored form shown alongside the limit.
    pub factored: f64,
}

impl UniformClosedForms {
    pub fn discrepancy(&self) -> f64 {
        self.expanded - self.factored
    }
}

/// Closed-form type I estimator for uniform trees at time `n`. The factored
/// form divides by zero at `m = 2, n = 0`.
pub fn gini1_hat_uniform_closed(m: usize, n: u64) -> UniformClosedForms {
    let (m, n) = (m as f64, n as f64);
    let (m2, m3, m4) = (m * m, m * m * m, m * m * m * m);
    let expanded = ((2.0 * m2 - 2.0) * n * n + (m3 + 4.0 * m2 - m + 2.0) * n + 2.0 * m4 - 2.0 * m2)
        / ((6.0 * m2 + 6.0 * m) * n * n + 12.0 * m3 * n + 6.0 * m4 - 6.0 * m3);
    let factored = (m - 1.0) * ((m + 1.0) * n * n + (m2 + 3.0 * m - 1.0) * n + m3 + m2)
        / (3.0 * m * (n + m) * ((m + 1.0) * n + m2 - 2.0 * m));
    UniformClosedForms { expanded, factored }
}

/// Closed-form type I estimator for preferential-attachment trees at time `n`.
pub fn gini1_hat_pa_closed(m: usize, n: u64) -> f64 {
    let (m, n) = (m as f64, n as f64);
    let numerator = 2.0 * (m - 1.0) * (2.0 * m * m - 7.0 * m + 9.0) * n * n
        + (4.0 * m.powi(4) - 12.0 * m.powi(3) + 23.0 * m * m - 9.0 * m + 6.0) * n
        + 2.0 * m * (m - 1.0).powi(2) * (2.0 * m - 1.0) * (m + 1.0);
    let denominator = 6.0 * (2.0 * m - 1.0) * (m - 1.0) * (n + m) * (m * n + n + m * m - m);
    numerator / denominator
}

/// Large-`n` limit of the type I estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Gini1Limit {
    Uniform {
        limit: f64,
    },
    Pa {
        /// `(2m² - 7m + 9) / (6m² + 3m - 1)`, the limit as usually quoted.
        stated: f64,
        /// Ratio of leading `n²` coefficients of the PA closed form,
        /// `(2m² - 7m + 9) / (6m² + 3m - 3)`.
        leading_ratio: f64,
    },
}

pub fn gini1_limit(model: GrowthModel, m: usize) -> Result<Gini1Limit> {
    if m < 2 {
        return Err(Error::SpineTooShort(m));
    }
    let m = m as f64;
    Ok(match model {
        GrowthModel::Uniform => Gini1Limit::Uniform {
            limit: (m - 1.0) / (3.0 * m),
        },
        GrowthModel::PreferentialAttachment => {
            let numerator = 2.0 * m * m - 7.0 * m + 9.0;
            Gini1Limit::Pa {
                stated: numerator / (6.0 * m * m + 3.0 * m - 1.0),
                leading_ratio: numerator / (6.0 * m * m + 3.0 * m - 3.0),
            }
        }
    })
}

/// The type I estimator `Σ_u Σ_v E|d_u - d_v| / (2 E[N]² E[d])` evaluated
/// exactly from the first two moments of the leaf counts.
///
/// Vertices group into spine vertex `i` (depth `i - 1`) and the leaves of `i`
/// (depth `i`), so the numerator is quadratic in the leaf counts and only
/// needs `E[L_i]` and `E[L_i L_j]`.
pub fn gini1_hat_from_moments(model: GrowthModel, m: usize, n: u64) -> Result<f64> {
    if m < 2 {
        return Err(Error::SpineTooShort(m));
    }
    let nf = n as f64;
    let mf = m as f64;
    let (mean, second): (Vec<f64>, Vec<Vec<f64>>) = match model {
        GrowthModel::Uniform => {
            let mean = vec![nf / mf; m];
            let second = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            let base = nf * (nf - 1.0) / (mf * mf);
                            if i == j {
                                base + nf / mf
                            } else {
                                base
                            }
                        })
                        .collect()
                })
                .collect();
            (mean, second)
        }
        GrowthModel::PreferentialAttachment => {
            let mean: Vec<f64> = pa_mean(m, n)?
                .into_iter()
                .zip(initial_degrees(m))
                .map(|(d, o)| d - o as f64)
                .collect();
            let cov = pa_cov(m, n)?;
            let second = (0..m)
                .map(|i| (0..m).map(|j| cov[i][j] + mean[i] * mean[j]).collect())
                .collect();
            (mean, second)
        }
    };

    let gap = |a: usize, b: usize| (a as f64 - b as f64).abs();
    let mut numerator = 0.0;
    for i in 0..m {
        for j in 0..m {
            numerator += gap(i, j);
            numerator += 2.0 * gap(i, j + 1) * mean[j];
            numerator += gap(i, j) * second[i][j];
        }
    }
    let total_depth: f64 = (0..m).map(|i| i as f64 + (i as f64 + 1.0) * mean[i]).sum();
    Ok(numerator / (2.0 * (mf + nf) * total_depth))
}

/// Points `(population share, wealth share)` of a Lorenz curve, starting at
/// `(0, 0)` and ending at `(1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LorenzCurve {
    pub points: Vec<(f64, f64)>,
}

impl LorenzCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest vertical gap to another curve on the same population grid.
    pub fn max_gap(&self, other: &LorenzCurve) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0, f64::max))
    }
}

/// Lorenz curve of values already sorted ascending.
pub fn lorenz_sorted(sorted: &[f64]) -> Result<LorenzCurve> {
    let total: f64 = sorted.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Undefined("Lorenz curve of values with zero total"));
    }
    let big_n = sorted.len() as f64;
    let mut points = Vec::with_capacity(sorted.len() + 1);
    points.push((0.0, 0.0));
    let mut partial = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        partial += x;
        points.push(((k + 1) as f64 / big_n, partial / total));
    }
    // Pin the endpoint against rounding in the running sum.
    if let Some(last) = points.last_mut() {
        *last = (1.0, 1.0);
    }
    Ok(LorenzCurve { points })
}

pub fn lorenz(values: &[f64]) -> Result<LorenzCurve> {
    if values.iter().any(|v| *v < 0.0) {
        return Err(Error::Undefined("Lorenz curve of negative wealth"));
    }
    lorenz_sorted(&sort_ascending(values))
}

/// `1 - 2 × (trapezoid area under the curve)`.
pub fn gini_from_lorenz(curve: &LorenzCurve) -> f64 {
    let area: f64 = curve
        .points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum();
    1.0 - 2.0 * area
}
