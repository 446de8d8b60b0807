//! Monte-Carlo experiments over replicated trees.
//!
//! Every replication is grown from its own derived seed, and per-replication
//! results are reduced in replication order, so a given configuration always
//! produces bit-identical output whatever the thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};
use crate::exact::{beta_marginal_params, MomentSummary};
use crate::gini::{gini_from_lorenz, gini_type1, gini_type2, LorenzCurve};
use crate::simulate::{grow, GrowthModel, SeedSpec};
use crate::tree::CaterpillarTree;

/// Replications reduced together before partial results are combined.
const CHUNK: u64 = 64;

/// Quantity an experiment reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    GiniI,
    GiniII,
    Moments,
    Lorenz,
    Marginal,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::GiniI => "gini1",
            Metric::GiniII => "gini2",
            Metric::Moments => "moments",
            Metric::Lorenz => "lorenz",
            Metric::Marginal => "marginal",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gini1" => Ok(Metric::GiniI),
            "gini2" => Ok(Metric::GiniII),
            "moments" => Ok(Metric::Moments),
            "lorenz" => Ok(Metric::Lorenz),
            "marginal" => Ok(Metric::Marginal),
            other => Err(format!(
                "unknown metric `{other}` (expected gini1, gini2, lorenz, moments or marginal)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub models: Vec<GrowthModel>,
    pub m_values: Vec<usize>,
    pub n: u64,
    pub replications: usize,
    pub base_seed: u64,
    pub metric: Metric,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidConfig(
                "replication count must be >= 1".into(),
            ));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidConfig("no models given".into()));
        }
        if self.m_values.is_empty() {
            return Err(Error::InvalidConfig("no spine lengths given".into()));
        }
        if let Some(&m) = self.m_values.iter().find(|&&m| m < 2) {
            return Err(Error::SpineTooShort(m));
        }
        Ok(())
    }
}

/// One CSV row: `model,m,n,R,metric,mean,stderr,seed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub model: GrowthModel,
    pub m: usize,
    pub n: u64,
    pub replications: usize,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub base_seed: u64,
    pub version: &'static str,
}

/// Mean and standard error of the mean (`sd / sqrt(R)`, 0 when `R = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

impl SampleStats {
    pub fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        let r = count as f64;
        let mean = values.iter().sum::<f64>() / r;
        let stderr = if count > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
            (var / r).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            stderr,
            count,
        }
    }
}

/// Grows `replications` trees and maps each to a value, in replication order.
pub fn map_replications<T, F>(
    model: GrowthModel,
    m: usize,
    n: u64,
    replications: usize,
    base_seed: u64,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&CaterpillarTree) -> Result<T> + Sync,
{
    (0..replications as u64)
        .into_par_iter()
        .map(|r| f(&grow(model, m, n, SeedSpec::replication(base_seed, r))?))
        .collect()
}

/// Mean and standard error of a per-tree Gini index.
pub fn gini_stats(
    model: GrowthModel,
    metric: Metric,
    m: usize,
    n: u64,
    replications: usize,
    base_seed: u64,
) -> Result<SampleStats> {
    let index = match metric {
        Metric::GiniI => gini_type1,
        Metric::GiniII => gini_type2,
        other => {
            return Err(Error::InvalidConfig(format!(
                "{other} is not a Gini metric"
            )))
        }
    };
    let values = map_replications(model, m, n, replications, base_seed, index)?;
    Ok(SampleStats::from_values(&values))
}

/// For every (model, m): grow R trees at time n and report the mean Gini
/// index with its standard error.
pub fn run_gini_sweep(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let mut rows = Vec::new();
    for &model in &config.models {
        for &m in &config.m_values {
            let stats = gini_stats(
                model,
                config.metric,
                m,
                config.n,
                config.replications,
                config.base_seed,
            )?;
            rows.push(ResultRow {
                model,
                m,
                n: config.n,
                replications: config.replications,
                metric: config.metric.as_str().to_string(),
                mean: stats.mean,
                stderr: stats.stderr,
            });
        }
    }
    Ok(ExperimentResult {
        rows,
        base_seed: config.base_seed,
        version: crate::VERSION,
    })
}

/// Which wealth a Lorenz curve is drawn over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LorenzView {
    /// Vertex depths (type I).
    Depths,
    /// Leaf counts on the spine (type II).
    Leaves,
}

impl LorenzView {
    pub fn as_str(self) -> &'static str {
        match self {
            LorenzView::Depths => "gini1",
            LorenzView::Leaves => "gini2",
        }
    }
}

/// Wealth shares of one tree at population shares `k / N`, `k = 0..=N`.
fn wealth_shares(tree: &CaterpillarTree, view: LorenzView) -> Result<Vec<f64>> {
    match view {
        LorenzView::Depths => {
            let depths = tree.depths();
            let total = depths.total() as f64;
            if total == 0.0 {
                return Err(Error::Undefined("Lorenz curve of values with zero total"));
            }
            let mut shares = Vec::with_capacity(depths.len() as usize + 1);
            shares.push(0.0);
            let mut partial = 0u64;
            for d in depths.iter() {
                partial += d;
                shares.push(partial as f64 / total);
            }
            Ok(shares)
        }
        LorenzView::Leaves => {
            if tree.n() == 0 {
                return Err(Error::Undefined("Lorenz curve of a tree without leaves"));
            }
            let mut sorted = tree.leaves().to_vec();
            sorted.sort_unstable();
            let total = tree.n() as f64;
            let mut shares = Vec::with_capacity(sorted.len() + 1);
            shares.push(0.0);
            let mut partial = 0u64;
            for l in sorted {
                partial += l;
                shares.push(partial as f64 / total);
            }
            Ok(shares)
        }
    }
}

/// Pointwise mean Lorenz curve of R trees. All trees share the population
/// grid `k / N` because `N` is `m + n` (depths) or `m` (leaves).
pub fn mean_lorenz_curve(
    model: GrowthModel,
    m: usize,
    n: u64,
    replications: usize,
    base_seed: u64,
    view: LorenzView,
) -> Result<LorenzCurve> {
    if replications == 0 {
        return Err(Error::InvalidConfig(
            "replication count must be >= 1".into(),
        ));
    }
    let r = replications as u64;
    let chunks: Vec<Vec<f64>> = (0..r.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc: Option<Vec<f64>> = None;
            for rep in c * CHUNK..((c + 1) * CHUNK).min(r) {
                let tree = grow(model, m, n, SeedSpec::replication(base_seed, rep))?;
                let shares = wealth_shares(&tree, view)?;
                match acc.as_mut() {
                    None => acc = Some(shares),
                    Some(a) => a.iter_mut().zip(&shares).for_each(|(a, s)| *a += s),
                }
            }
            Ok(acc.expect("chunk is non-empty"))
        })
        .collect::<Result<_>>()?;

    let mut iter = chunks.into_iter();
    let mut sum = iter.next().expect("at least one chunk");
    for chunk in iter {
        sum.iter_mut().zip(&chunk).for_each(|(a, c)| *a += c);
    }
    let big_n = (sum.len() - 1) as f64;
    let mut points: Vec<(f64, f64)> = sum
        .iter()
        .enumerate()
        .map(|(k, s)| (k as f64 / big_n, s / replications as f64))
        .collect();
    if let Some(last) = points.last_mut() {
        *last = (1.0, 1.0);
    }
    Ok(LorenzCurve { points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LorenzEntry {
    pub model: GrowthModel,
    pub m: usize,
    pub view: LorenzView,
    pub curve: LorenzCurve,
}

/// Mean Lorenz curves for every (model, m) in both views.
pub fn run_lorenz_batch(config: &ExperimentConfig) -> Result<Vec<LorenzEntry>> {
    config.validate()?;
    let mut entries = Vec::new();
    for &m in &config.m_values {
        for view in [LorenzView::Depths, LorenzView::Leaves] {
            for &model in &config.models {
                let curve = mean_lorenz_curve(
                    model,
                    m,
                    config.n,
                    config.replications,
                    config.base_seed,
                    view,
                )?;
                entries.push(LorenzEntry {
                    model,
                    m,
                    view,
                    curve,
                });
            }
        }
    }
    Ok(entries)
}

/// Summary rows for a Lorenz batch: the Gini index of each mean curve.
pub fn lorenz_rows(config: &ExperimentConfig, entries: &[LorenzEntry]) -> ExperimentResult {
    let rows = entries
        .iter()
        .map(|e| ResultRow {
            model: e.model,
            m: e.m,
            n: config.n,
            replications: config.replications,
            metric: format!("lorenz_{}", e.view.as_str()),
            mean: gini_from_lorenz(&e.curve),
            stderr: 0.0,
        })
        .collect();
    ExperimentResult {
        rows,
        base_seed: config.base_seed,
        version: crate::VERSION,
    }
}

/// Sample moments of degree vectors. The covariance is kept as an exact
/// integer numerator over `R (R - 1)`, so deterministic totals show up as
/// rows summing to exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMoments {
    pub replications: usize,
    pub summary: MomentSummary,
    pub mean_stderr: Vec<f64>,
    pub cov_stderr: Vec<Vec<f64>>,
    pub cov_numerator: Vec<Vec<i128>>,
    pub cov_denominator: i128,
}

impl EmpiricalMoments {
    pub fn exact_row_sums(&self) -> Vec<i128> {
        self.cov_numerator
            .iter()
            .map(|row| row.iter().sum())
            .collect()
    }
}

fn moments_of(vectors: &[Vec<u64>]) -> Result<EmpiricalMoments> {
    let first = vectors
        .first()
        .ok_or(Error::Undefined("moments of an empty collection"))?;
    let m = first.len();
    if vectors.iter().any(|v| v.len() != m) {
        return Err(Error::MixedShapes);
    }
    let r = vectors.len();
    let rf = r as f64;
    let ri = r as i128;

    let sums: Vec<i128> = (0..m)
        .map(|i| vectors.iter().map(|v| v[i] as i128).sum())
        .collect();
    let mean: Vec<f64> = sums.iter().map(|&s| s as f64 / rf).collect();

    let mut cov_numerator = vec![vec![0i128; m]; m];
    let mut cov = vec![vec![0.0; m]; m];
    let mut cov_stderr = vec![vec![0.0; m]; m];
    let cov_denominator = ri * (ri - 1).max(1);
    for i in 0..m {
        for j in 0..m {
            let cross: i128 = vectors.iter().map(|v| v[i] as i128 * v[j] as i128).sum();
            let num = ri * cross - sums[i] * sums[j];
            cov_numerator[i][j] = num;
            cov[i][j] = num as f64 / cov_denominator as f64;

            // Standard error of the mean of the centered products.
            if r > 1 {
                let products: Vec<f64> = vectors
                    .iter()
                    .map(|v| (v[i] as f64 - mean[i]) * (v[j] as f64 - mean[j]))
                    .collect();
                cov_stderr[i][j] = SampleStats::from_values(&products).stderr;
            }
        }
    }
    let mean_stderr = (0..m)
        .map(|i| if r > 1 { (cov[i][i] / rf).sqrt() } else { 0.0 })
        .collect();

    Ok(EmpiricalMoments {
        replications: r,
        summary: MomentSummary { mean, cov },
        mean_stderr,
        cov_stderr,
        cov_numerator,
        cov_denominator,
    })
}

/// Sample mean and covariance of the degree vectors of `trees`.
pub fn empirical_moments(trees: &[CaterpillarTree]) -> Result<EmpiricalMoments> {
    let first = trees
        .first()
        .ok_or(Error::Undefined("moments of an empty collection"))?;
    if trees
        .iter()
        .any(|t| t.m() != first.m() || t.n() != first.n())
    {
        return Err(Error::MixedShapes);
    }
    let degrees: Vec<Vec<u64>> = trees.iter().map(|t| t.degrees().into_vec()).collect();
    moments_of(&degrees)
}

/// Sample mean and covariance of the leaf-count vectors of `trees`.
pub fn empirical_leaf_moments(trees: &[CaterpillarTree]) -> Result<EmpiricalMoments> {
    let first = trees
        .first()
        .ok_or(Error::Undefined("moments of an empty collection"))?;
    if trees
        .iter()
        .any(|t| t.m() != first.m() || t.n() != first.n())
    {
        return Err(Error::MixedShapes);
    }
    let leaves: Vec<Vec<u64>> = trees.iter().map(|t| t.leaves().to_vec()).collect();
    moments_of(&leaves)
}

/// Rows `mean_D{i}` and `var_D{i}` for every (model, m).
pub fn run_moments(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let mut rows = Vec::new();
    for &model in &config.models {
        for &m in &config.m_values {
            let trees = crate::simulate::replicate(
                model,
                m,
                config.n,
                config.replications,
                config.base_seed,
            )?;
            let moments = empirical_moments(&trees)?;
            let row = |metric: String, mean: f64, stderr: f64| ResultRow {
                model,
                m,
                n: config.n,
                replications: config.replications,
                metric,
                mean,
                stderr,
            };
            for i in 0..m {
                rows.push(row(
                    format!("mean_D{}", i + 1),
                    moments.summary.mean[i],
                    moments.mean_stderr[i],
                ));
            }
            for i in 0..m {
                rows.push(row(
                    format!("var_D{}", i + 1),
                    moments.summary.cov[i][i],
                    moments.cov_stderr[i][i],
                ));
            }
        }
    }
    Ok(ExperimentResult {
        rows,
        base_seed: config.base_seed,
        version: crate::VERSION,
    })
}

/// Two-sided Kolmogorov–Smirnov distance `sup |F_R(x) - F(x)|`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let r = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / r) - f).max(f - i as f64 / r)
        })
        .fold(0.0, f64::max)
}

/// Grows R preferential-attachment trees and returns the KS distance between
/// `D_{i,n} / n` and its limiting `Beta(τ_i, τ_0 - τ_i)` law.
pub fn marginal_convergence_check(
    m: usize,
    n: u64,
    replications: usize,
    base_seed: u64,
    vertex: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Undefined("scaled degree D/n at n = 0"));
    }
    if replications == 0 {
        return Err(Error::InvalidConfig(
            "replication count must be >= 1".into(),
        ));
    }
    let (a, b) = beta_marginal_params(m, vertex)?;
    let beta = Beta::new(a, b).expect("positive Beta parameters");
    let samples = map_replications(
        GrowthModel::PreferentialAttachment,
        m,
        n,
        replications,
        base_seed,
        |t| Ok(t.degrees()[vertex] as f64 / n as f64),
    )?;
    Ok(ks_distance(&samples, |x| beta.cdf(x.clamp(0.0, 1.0))))
}

/// Rows `ks_D{i}` for every spine vertex. The model list is ignored: the
/// Dirichlet limit only concerns preferential attachment.
pub fn run_marginal(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let mut rows = Vec::new();
    for &m in &config.m_values {
        for vertex in 1..=m {
            let ks = marginal_convergence_check(
                m,
                config.n,
                config.replications,
                config.base_seed,
                vertex,
            )?;
            rows.push(ResultRow {
                model: GrowthModel::PreferentialAttachment,
                m,
                n: config.n,
                replications: config.replications,
                metric: format!("ks_D{vertex}"),
                mean: ks,
                stderr: 0.0,
            });
        }
    }
    Ok(ExperimentResult {
        rows,
        base_seed: config.base_seed,
        version: crate::VERSION,
    })
}
