//! Exact rational oracles shared by the integration tests. Nothing in here
//! calls into the log-space code paths it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().expect("finite rational")
}

pub fn offsets(m: usize) -> Vec<i64> {
    (0..m)
        .map(|i| if i == 0 || i + 1 == m { 1 } else { 2 })
        .collect()
}

/// Law of the leaf-count vector after `n` preferential-attachment steps,
/// obtained by walking every attachment sequence with the degree-proportional
/// transition rule.
pub fn pa_law_by_sequences(m: usize, n: usize) -> BTreeMap<Vec<u64>, Q> {
    let mut law = BTreeMap::new();
    let mut leaves = vec![0u64; m];
    walk(m, n, &mut leaves, Q::one(), &mut law);
    law
}

fn walk(m: usize, remaining: usize, leaves: &mut Vec<u64>, p: Q, law: &mut BTreeMap<Vec<u64>, Q>) {
    if remaining == 0 {
        let entry = law.entry(leaves.clone()).or_insert_with(Q::zero);
        *entry += p;
        return;
    }
    let off = offsets(m);
    let total: i64 = leaves.iter().map(|&l| l as i64).sum::<i64>() + off.iter().sum::<i64>();
    for i in 0..m {
        let degree = leaves[i] as i64 + off[i];
        leaves[i] += 1;
        walk(
            m,
            remaining - 1,
            leaves,
            p.clone() * Q::new(degree.into(), total.into()),
            law,
        );
        leaves[i] -= 1;
    }
}

/// Law of the leaf-count vector of the uniform model, by sequences.
pub fn uniform_law_by_sequences(m: usize, n: usize) -> BTreeMap<Vec<u64>, Q> {
    let mut law = BTreeMap::new();
    fn rec(
        m: usize,
        remaining: usize,
        leaves: &mut Vec<u64>,
        p: Q,
        law: &mut BTreeMap<Vec<u64>, Q>,
    ) {
        if remaining == 0 {
            *law.entry(leaves.clone()).or_insert_with(Q::zero) += p;
            return;
        }
        for i in 0..m {
            leaves[i] += 1;
            rec(
                m,
                remaining - 1,
                leaves,
                p.clone() * Q::new(1.into(), (m as i64).into()),
                law,
            );
            leaves[i] -= 1;
        }
    }
    rec(m, n, &mut vec![0; m], Q::one(), &mut law);
    law
}

/// Exact mean and covariance of the degree vector under a leaf-count law.
pub fn degree_moments(m: usize, law: &BTreeMap<Vec<u64>, Q>) -> (Vec<Q>, Vec<Vec<Q>>) {
    let off = offsets(m);
    let degree = |l: &Vec<u64>, i: usize| q(l[i] as i64 + off[i]);
    let mean: Vec<Q> = (0..m)
        .map(|i| law.iter().map(|(l, p)| p * degree(l, i)).sum())
        .collect();
    let cov = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let second: Q = law
                        .iter()
                        .map(|(l, p)| p * degree(l, i) * degree(l, j))
                        .sum();
                    second - &mean[i] * &mean[j]
                })
                .collect()
        })
        .collect();
    (mean, cov)
}

/// Rising factorial, exactly.
pub fn pochhammer(x: i64, k: u64) -> BigInt {
    (0..k as i64).map(|j| BigInt::from(x + j)).product()
}

pub fn factorial(k: u64) -> BigInt {
    (1..=k as i64).map(BigInt::from).product()
}

/// Exchangeable urn formula evaluated in exact arithmetic.
pub fn pa_pmf_exact(m: usize, s: &[u64]) -> Q {
    let n: u64 = s.iter().sum();
    let off = offsets(m);
    let mut num = factorial(n);
    let mut den = pochhammer(2 * m as i64 - 2, n);
    for (&si, &o) in s.iter().zip(&off) {
        num *= pochhammer(o, si);
        den *= factorial(si);
    }
    Q::new(num, den)
}

/// All color sequences of length `n` over `m` colors.
pub fn sequences(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|seq| {
                (0..m).map(move |c| {
                    let mut next = seq.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    out
}

/// Exact probability of one PA attachment sequence (0-based spine slots).
pub fn pa_sequence_probability(m: usize, seq: &[usize]) -> Q {
    let mut degrees = offsets(m);
    let mut total: i64 = degrees.iter().sum();
    let mut p = Q::one();
    for &c in seq {
        p *= Q::new(degrees[c].into(), total.into());
        degrees[c] += 1;
        total += 1;
    }
    p
}

/// Σ_u Σ_v |d_u - d_v| and Σ_v d_v of a caterpillar with the given leaves,
/// by listing every vertex depth.
pub fn depth_sums(leaves: &[u64]) -> (i64, i64) {
    let m = leaves.len();
    let mut depths: Vec<i64> = (0..m as i64).collect();
    for (i, &l) in leaves.iter().enumerate() {
        depths.extend(std::iter::repeat_n(i as i64 + 1, l as usize));
    }
    let pairwise = depths
        .iter()
        .flat_map(|a| depths.iter().map(move |b| (a - b).abs()))
        .sum();
    (pairwise, depths.iter().sum())
}

/// The type I estimator `E[Σ|d_u - d_v|] / (2 N E[Σ d])` under a leaf law.
pub fn gini1_estimator_exact(law: &BTreeMap<Vec<u64>, Q>) -> Q {
    let mut pair = Q::zero();
    let mut total = Q::zero();
    let mut size = 0;
    for (leaves, p) in law {
        let (a, b) = depth_sums(leaves);
        pair += p * q(a);
        total += p * q(b);
        size = leaves.len() as i64 + leaves.iter().sum::<u64>() as i64;
    }
    pair / (q(2 * size) * total)
}
