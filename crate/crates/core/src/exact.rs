//! Exact and limiting laws of the degree profile.
//!
//! Everything combinatorial is evaluated in log space; probabilities are only
//! exponentiated on the way out.

use statrs::function::factorial::ln_factorial;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::tree::initial_degrees;

/// Below this length a rising factorial is summed term by term, which avoids
/// the cancellation in `lnΓ(x + k) - lnΓ(x)` when `x` is large.
const DIRECT_POCHHAMMER_MAX: u64 = 64;

/// `log(x (x+1) ... (x+k-1))`.
pub fn log_pochhammer(x: f64, k: u64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonPositive {
            what: "x",
            value: x,
        });
    }
    if k <= DIRECT_POCHHAMMER_MAX {
        Ok((0..k).map(|j| (x + j as f64).ln()).sum())
    } else {
        Ok(ln_gamma(x + k as f64) - ln_gamma(x))
    }
}

/// `log(n! / (c_1! ... c_m!))` with `n = Σ c_i`.
pub fn log_multinomial_coeff(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    ln_factorial(n) - counts.iter().map(|&c| ln_factorial(c)).sum::<f64>()
}

/// Every composition of `n` into `m` non-negative parts, in lexicographic
/// order. Intended for small exhaustive checks.
pub fn compositions(n: u64, m: usize) -> Vec<Vec<u64>> {
    fn fill(rest: u64, slot: usize, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slot + 1 == current.len() {
            current[slot] = rest;
            out.push(current.clone());
            return;
        }
        for take in (0..=rest).rev() {
            current[slot] = take;
            fill(rest - take, slot + 1, current, out);
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    fill(n, 0, &mut vec![0; m], &mut out);
    out
}

/// Multinomial law of the leaf counts of a uniform tree:
/// `C(n; l) (1/m)^n`.
pub fn uniform_leaf_pmf(m: usize, leaves: &[u64]) -> Result<f64> {
    if leaves.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: leaves.len(),
        });
    }
    let n: u64 = leaves.iter().sum();
    Ok((log_multinomial_coeff(leaves) - n as f64 * (m as f64).ln()).exp())
}

fn in_degree_support(degrees: &[u64]) -> bool {
    let m = degrees.len();
    degrees
        .iter()
        .zip(initial_degrees(m))
        .all(|(&d, offset)| d >= offset)
}

/// The uniform-model degree law as a multinomial over degrees,
/// `C(n + 2m - 2; d) (1/m)^(n + 2m - 2)`, for a degree vector at time `n`.
///
/// This is not the image of [`uniform_leaf_pmf`] under `d = l + (1,2,...,2,1)`;
/// see [`uniform_degree_pmf_pushforward`] for that.
pub fn uniform_degree_pmf(m: usize, degrees: &[u64], n: u64) -> Result<f64> {
    if degrees.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: degrees.len(),
        });
    }
    let trials = n + 2 * m as u64 - 2;
    if !in_degree_support(degrees) || degrees.iter().sum::<u64>() != trials {
        return Ok(0.0);
    }
    Ok((log_multinomial_coeff(degrees) - trials as f64 * (m as f64).ln()).exp())
}

/// Degree law of the uniform model obtained by shifting the leaf law.
pub fn uniform_degree_pmf_pushforward(m: usize, degrees: &[u64], n: u64) -> Result<f64> {
    if degrees.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: degrees.len(),
        });
    }
    if !in_degree_support(degrees) || degrees.iter().sum::<u64>() != n + 2 * m as u64 - 2 {
        return Ok(0.0);
    }
    let leaves: Vec<u64> = degrees
        .iter()
        .zip(initial_degrees(m))
        .map(|(&d, o)| d - o)
        .collect();
    uniform_leaf_pmf(m, &leaves)
}

/// Mean vector with a dispersion matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

impl MomentSummary {
    pub fn row_sums(&self) -> Vec<f64> {
        self.cov.iter().map(|row| row.iter().sum()).collect()
    }
}

fn check_spine(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::SpineTooShort(m));
    }
    Ok(())
}

/// Limiting covariance of `(L_n - n p) / sqrt(n)` for the uniform model,
/// together with the mean-per-step vector `p = (1/m, ..., 1/m)`.
pub fn uniform_asymptotic_cov(m: usize) -> Result<MomentSummary> {
    check_spine(m)?;
    let mf = m as f64;
    let m2 = mf * mf;
    let cov = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { (mf - 1.0) / m2 } else { -1.0 / m2 })
                .collect()
        })
        .collect();
    Ok(MomentSummary {
        mean: vec![1.0 / mf; m],
        cov,
    })
}

fn is_endpoint(m: usize, slot: usize) -> bool {
    slot == 0 || slot + 1 == m
}

/// Expected spine degrees of a preferential-attachment tree at time `n`.
pub fn pa_mean(m: usize, n: u64) -> Result<Vec<f64>> {
    check_spine(m)?;
    let growth = n as f64 / (m as f64 - 1.0);
    Ok((0..m)
        .map(|slot| {
            if is_endpoint(m, slot) {
                growth / 2.0 + 1.0
            } else {
                growth + 2.0
            }
        })
        .collect())
}

/// Dispersion matrix of the preferential-attachment degree vector at time `n`.
pub fn pa_cov(m: usize, n: u64) -> Result<Vec<Vec<f64>>> {
    check_spine(m)?;
    let mf = m as f64;
    let nf = n as f64;
    let base = (mf - 1.0) * (mf - 1.0) * (2.0 * mf - 1.0);
    let interior_var = ((mf - 2.0) * nf * nf + 2.0 * (mf - 2.0) * (mf - 1.0) * nf) / base;
    let endpoint_var =
        ((2.0 * mf - 3.0) * nf * nf + (2.0 * mf - 3.0) * (2.0 * mf - 2.0) * nf) / (4.0 * base);
    let cross = -(nf * nf + 2.0 * (mf - 1.0) * nf) / base;

    Ok((0..m)
        .map(|i| {
            (0..m)
                .map(|j| match (i == j, is_endpoint(m, i), is_endpoint(m, j)) {
                    (true, true, _) => endpoint_var,
                    (true, false, _) => interior_var,
                    (false, true, true) => cross / 4.0,
                    (false, true, false) | (false, false, true) => cross / 2.0,
                    (false, false, false) => cross,
                })
                .collect()
        })
        .collect())
}

pub fn pa_moments(m: usize, n: u64) -> Result<MomentSummary> {
    Ok(MomentSummary {
        mean: pa_mean(m, n)?,
        cov: pa_cov(m, n)?,
    })
}

/// Initial ball counts of a Pólya–Eggenberger urn.
#[derive(Debug, Clone, PartialEq)]
pub struct UrnComposition {
    tau: Vec<f64>,
    total: f64,
}

impl UrnComposition {
    pub fn new(tau: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = tau.iter().find(|&&t| !(t > 0.0)) {
            return Err(Error::NonPositive {
                what: "ball count",
                value: bad,
            });
        }
        let total = tau.iter().sum();
        Ok(Self { tau, total })
    }

    /// The urn that tracks preferential-attachment degrees: `(1, 2, ..., 2, 1)`.
    pub fn caterpillar(m: usize) -> Result<Self> {
        check_spine(m)?;
        Self::new(initial_degrees(m).into_iter().map(|d| d as f64).collect())
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Log-probability that color `i` is drawn `draws[i]` times in
    /// `Σ draws` steps.
    pub fn log_pmf(&self, draws: &[u64]) -> Result<f64> {
        if draws.len() != self.tau.len() {
            return Err(Error::DimensionMismatch {
                expected: self.tau.len(),
                got: draws.len(),
            });
        }
        let n: u64 = draws.iter().sum();
        let mut log_p = log_multinomial_coeff(draws) - log_pochhammer(self.total, n)?;
        for (&t, &s) in self.tau.iter().zip(draws) {
            log_p += log_pochhammer(t, s)?;
        }
        Ok(log_p)
    }

    /// Probability of one specific draw sequence (colors 0-based).
    pub fn sequence_probability(&self, sequence: &[usize]) -> f64 {
        let mut balls = self.tau.clone();
        let mut total = self.total;
        let mut p = 1.0;
        for &color in sequence {
            p *= balls[color] / total;
            balls[color] += 1.0;
            total += 1.0;
        }
        p
    }
}

/// Log of the exact joint law of the degree increments `s` of a
/// preferential-attachment tree.
pub fn pa_joint_log_pmf(m: usize, draws: &[u64]) -> Result<f64> {
    UrnComposition::caterpillar(m)?.log_pmf(draws)
}

/// `P(D_n = (1,2,...,2,1) + s)` for a preferential-attachment tree with
/// `n = Σ s`.
pub fn pa_joint_pmf(m: usize, draws: &[u64]) -> Result<f64> {
    Ok(pa_joint_log_pmf(m, draws)?.exp())
}

/// The martingale transform `2(m - 1) d / (n + 2m - 2)` of a spine degree.
pub fn martingale_value(m: usize, n: u64, degree: f64) -> f64 {
    let scale = 2.0 * (m as f64 - 1.0);
    scale * degree / (n as f64 + scale)
}

/// Dirichlet parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    alpha: Vec<f64>,
}

/// Tolerance on `Σ θ = 1` when evaluating a density.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::SpineTooShort(alpha.len()));
        }
        if let Some(&bad) = alpha.iter().find(|&&a| !(a > 0.0)) {
            return Err(Error::NonPositive {
                what: "concentration",
                value: bad,
            });
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn log_density(&self, theta: &[f64]) -> Result<f64> {
        dirichlet_log_density(self, theta)
    }
}

/// Limit law of `D_n / n` for preferential attachment: `Dir(1, 2, ..., 2, 1)`.
pub fn dirichlet_limit_params(m: usize) -> Result<DirichletParams> {
    let urn = UrnComposition::caterpillar(m)?;
    DirichletParams::new(urn.tau)
}

pub fn dirichlet_log_density(params: &DirichletParams, theta: &[f64]) -> Result<f64> {
    let alpha = params.alpha();
    if theta.len() != alpha.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            got: theta.len(),
        });
    }
    if theta.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::OffSimplex(format!(
            "negative coordinate in {theta:?}"
        )));
    }
    let sum: f64 = theta.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
        return Err(Error::OffSimplex(format!("coordinates sum to {sum}")));
    }
    let total: f64 = alpha.iter().sum();
    let mut log_density = ln_gamma(total);
    for (&a, &t) in alpha.iter().zip(theta) {
        log_density -= ln_gamma(a);
        // 0^0 = 1 on a face of the simplex.
        if a != 1.0 {
            log_density += (a - 1.0) * t.ln();
        }
    }
    Ok(log_density)
}

/// Beta marginal `(τ_i, τ_0 - τ_i)` of the limiting Dirichlet law for spine
/// vertex `index` (1-based).
pub fn beta_marginal_params(m: usize, index: usize) -> Result<(f64, f64)> {
    let urn = UrnComposition::caterpillar(m)?;
    if index == 0 || index > m {
        return Err(Error::SpineIndexOutOfRange { index, m });
    }
    let a = urn.tau[index - 1];
    Ok((a, urn.total - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(log_pochhammer(3.7, 0).unwrap(), 0.0);
        assert!(close(log_pochhammer(1.0, 3).unwrap(), 6f64.ln(), 1e-14));
        assert!(close(log_pochhammer(2.0, 2).unwrap(), 6f64.ln(), 1e-14));
        assert!(log_pochhammer(0.0, 2).is_err());
        assert!(log_pochhammer(-1.0, 2).is_err());
    }

    #[test]
    fn pochhammer_branches_agree() {
        // Direct sum vs log-gamma difference around the switch-over point.
        for &x in &[1.0, 2.0, 8.0, 398.0] {
            let k = DIRECT_POCHHAMMER_MAX + 1;
            let direct: f64 = (0..k).map(|j| (x + j as f64).ln()).sum();
            let gamma = log_pochhammer(x, k).unwrap();
            assert!(close(direct, gamma, 1e-9 * direct.abs().max(1.0)), "x={x}");
        }
    }

    #[test]
    fn multinomial_coefficients() {
        assert_eq!(log_multinomial_coeff(&[7, 0, 0]), 0.0);
        assert!(close(log_multinomial_coeff(&[1, 1]), 2f64.ln(), 1e-14));
        assert!(close(
            log_multinomial_coeff(&[2, 1, 2, 0, 1]),
            180f64.ln(),
            1e-13
        ));
    }

    #[test]
    fn compositions_count() {
        // C(n + m - 1, m - 1)
        assert_eq!(compositions(4, 3).len(), 15);
        assert_eq!(compositions(0, 4), vec![vec![0, 0, 0, 0]]);
        assert!(compositions(6, 4)
            .iter()
            .all(|c| c.iter().sum::<u64>() == 6));
    }

    #[test]
    fn uniform_leaf_law() {
        assert!(close(uniform_leaf_pmf(2, &[1, 1]).unwrap(), 0.5, 1e-15));
        assert_eq!(uniform_leaf_pmf(3, &[0, 0, 0]).unwrap(), 1.0);
        let total: f64 = compositions(4, 3)
            .iter()
            .map(|l| uniform_leaf_pmf(3, l).unwrap())
            .sum();
        assert!(close(total, 1.0, 1e-12));
        assert!(uniform_leaf_pmf(3, &[1, 1]).is_err());
    }

    #[test]
    fn uniform_degree_law_support() {
        assert_eq!(uniform_degree_pmf(4, &[1, 1, 2, 1], 0).unwrap(), 0.0);
        // sums to n + 2m - 3
        assert_eq!(uniform_degree_pmf(3, &[1, 2, 1], 1).unwrap(), 0.0);
        assert_eq!(
            uniform_degree_pmf_pushforward(3, &[1, 2, 1], 1).unwrap(),
            0.0
        );
    }

    #[test]
    fn uniform_degree_law_direct_vs_pushforward() {
        // At n = 0 the direct form gives C(2; 1, 1) / 4 = 1/2 while the
        // shifted leaf law puts all mass on (1, 1).
        let direct = uniform_degree_pmf(2, &[1, 1], 0).unwrap();
        let shifted = uniform_degree_pmf_pushforward(2, &[1, 1], 0).unwrap();
        assert!(close(direct, 0.5, 1e-15));
        assert_eq!(shifted, 1.0);
    }

    #[test]
    fn uniform_cov() {
        let s = uniform_asymptotic_cov(2).unwrap();
        assert_eq!(s.cov, vec![vec![0.25, -0.25], vec![-0.25, 0.25]]);
        let s3 = uniform_asymptotic_cov(3).unwrap();
        assert!(close(s3.cov[1][1], 2.0 / 9.0, 1e-15));
        for m in 2..30 {
            let s = uniform_asymptotic_cov(m).unwrap();
            assert!(s.row_sums().iter().all(|r| r.abs() < 1e-15));
        }
        assert!(uniform_asymptotic_cov(1).is_err());
    }

    #[test]
    fn pa_mean_values() {
        assert_eq!(pa_mean(5, 0).unwrap(), vec![1.0, 2.0, 2.0, 2.0, 1.0]);
        assert_eq!(pa_mean(2, 1).unwrap(), vec![1.5, 1.5]);
        let mean = pa_mean(3, 3).unwrap();
        assert_eq!(mean, vec![1.75, 3.5, 1.75]);
        assert_eq!(mean.iter().sum::<f64>(), 7.0);
    }

    #[test]
    fn pa_cov_values() {
        assert!(pa_cov(4, 0).unwrap().iter().flatten().all(|&c| c == 0.0));
        assert!(close(pa_cov(2, 1).unwrap()[0][0], 0.25, 1e-15));
        for m in 2..12 {
            for n in [0, 1, 7, 100, 5000] {
                let cov = pa_cov(m, n).unwrap();
                for (i, row) in cov.iter().enumerate() {
                    let sum: f64 = row.iter().sum();
                    let scale = row.iter().map(|c| c.abs()).sum::<f64>().max(1.0);
                    assert!(sum.abs() <= 1e-12 * scale, "m={m} n={n} row {i}: {sum}");
                    assert!(row[i] >= 0.0);
                    for (j, &c) in row.iter().enumerate() {
                        assert_eq!(c, cov[j][i]);
                    }
                }
            }
        }
    }

    #[test]
    fn pa_moments_symmetric_under_reversal() {
        for m in 2..10 {
            let mean = pa_mean(m, 37).unwrap();
            let cov = pa_cov(m, 37).unwrap();
            for i in 0..m {
                assert_eq!(mean[i], mean[m - 1 - i]);
                for j in 0..m {
                    assert_eq!(cov[i][j], cov[m - 1 - i][m - 1 - j]);
                }
            }
        }
    }

    #[test]
    fn pa_pmf_small_cases() {
        assert!(close(pa_joint_pmf(2, &[2, 0]).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(close(pa_joint_pmf(2, &[1, 1]).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(close(pa_joint_pmf(2, &[0, 2]).unwrap(), 1.0 / 3.0, 1e-15));
        for m in 2..8 {
            assert_eq!(pa_joint_pmf(m, &vec![0; m]).unwrap(), 1.0);
        }
        assert!(pa_joint_pmf(3, &[1, 1]).is_err());
    }

    #[test]
    fn pa_pmf_does_not_overflow() {
        // <τ_0>_n alone overflows f64 here.
        let m = 50;
        let mut s = vec![10u64; m];
        s[0] = 0;
        let lp = pa_joint_log_pmf(m, &s).unwrap();
        assert!(lp.is_finite() && lp < 0.0);
    }

    #[test]
    fn sequence_probability_matches_exchangeable_form() {
        let urn = UrnComposition::caterpillar(2).unwrap();
        assert!(close(urn.sequence_probability(&[0, 0]), 1.0 / 3.0, 1e-15));
        assert!(close(urn.sequence_probability(&[0, 1]), 1.0 / 6.0, 1e-15));
        assert!(close(urn.sequence_probability(&[1, 0]), 1.0 / 6.0, 1e-15));
    }

    #[test]
    fn martingale_values() {
        assert_eq!(martingale_value(2, 0, 1.0), 1.0);
        for m in 2..20 {
            assert_eq!(martingale_value(m, 0, 2.0), 2.0);
        }
    }

    #[test]
    fn dirichlet_params() {
        assert_eq!(dirichlet_limit_params(2).unwrap().alpha(), &[1.0, 1.0]);
        assert_eq!(
            dirichlet_limit_params(5).unwrap().alpha(),
            &[1.0, 2.0, 2.0, 2.0, 1.0]
        );
        for m in 2..20 {
            let total: f64 = dirichlet_limit_params(m).unwrap().alpha().iter().sum();
            assert_eq!(total, 2.0 * m as f64 - 2.0);
        }
        assert!(DirichletParams::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn dirichlet_density_values() {
        let flat = dirichlet_limit_params(2).unwrap();
        for t in [0.01, 0.3, 0.5, 0.99] {
            assert!(close(flat.log_density(&[t, 1.0 - t]).unwrap(), 0.0, 1e-14));
        }
        let p3 = dirichlet_limit_params(3).unwrap();
        let ld = p3.log_density(&[0.25, 0.5, 0.25]).unwrap();
        assert!(close(ld, 3f64.ln(), 1e-13));
        assert!(p3.log_density(&[0.3, 0.3, 0.3]).is_err());
        assert!(p3.log_density(&[-0.1, 0.6, 0.5]).is_err());
        assert!(p3.log_density(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn dirichlet_density_integrates_to_one() {
        // Midpoint rule over the triangle θ1 + θ2 ≤ 1, θ3 = 1 - θ1 - θ2.
        let p3 = dirichlet_limit_params(3).unwrap();
        let steps = 2000;
        let h = 1.0 / steps as f64;
        let mut integral = 0.0;
        for a in 0..steps {
            for b in 0..steps - a {
                // Lower-left triangles of each grid cell, evaluated at centroids.
                let (x, y) = ((a as f64 + 1.0 / 3.0) * h, (b as f64 + 1.0 / 3.0) * h);
                integral += 0.5 * h * h * p3.log_density(&[x, y, 1.0 - x - y]).unwrap().exp();
                if b + 1 < steps - a {
                    let (x, y) = ((a as f64 + 2.0 / 3.0) * h, (b as f64 + 2.0 / 3.0) * h);
                    integral += 0.5 * h * h * p3.log_density(&[x, y, 1.0 - x - y]).unwrap().exp();
                }
            }
        }
        assert!(close(integral, 1.0, 1e-6), "integral {integral}");
    }

    #[test]
    fn beta_marginals() {
        assert_eq!(beta_marginal_params(2, 1).unwrap(), (1.0, 1.0));
        assert_eq!(beta_marginal_params(5, 3).unwrap(), (2.0, 6.0));
        for m in 2..15 {
            for i in 1..=m {
                let (a, b) = beta_marginal_params(m, i).unwrap();
                assert_eq!(a + b, 2.0 * m as f64 - 2.0);
            }
        }
        assert!(beta_marginal_params(5, 6).is_err());
        assert!(beta_marginal_params(5, 0).is_err());
    }
}
