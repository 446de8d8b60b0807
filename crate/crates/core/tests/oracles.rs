mod common;

use caterpillar::exact::{
    compositions, martingale_value, pa_cov, pa_joint_pmf, pa_mean, uniform_degree_pmf,
    uniform_degree_pmf_pushforward, uniform_leaf_pmf, UrnComposition,
};
use caterpillar::gini::gini1_hat_from_moments;
use caterpillar::GrowthModel;
use common::*;
use num_traits::{One, Zero};

#[test]
fn pa_pmf_matches_sequence_enumeration() {
    for n in 0..=5 {
        let law = pa_law_by_sequences(3, n);
        for s in compositions(n as u64, 3) {
            let expected = law.get(&s).map(to_f64).unwrap_or(0.0);
            let got = pa_joint_pmf(3, &s).unwrap();
            assert!(
                (got - expected).abs() < 1e-12,
                "s={s:?}: {got} vs {expected}"
            );
        }
    }
}

#[test]
fn pa_pmf_matches_exact_formula() {
    for m in 2..=4 {
        for n in 0..=6u64 {
            for s in compositions(n, m) {
                let exact = to_f64(&pa_pmf_exact(m, &s));
                let got = pa_joint_pmf(m, &s).unwrap();
                assert!((got - exact).abs() < 1e-13 * exact.max(1.0), "{m} {s:?}");
            }
        }
    }
}

#[test]
fn exact_pmfs_are_normalized() {
    for m in 2..=4 {
        for n in 0..=6u64 {
            let comps = compositions(n, m);
            let exact: Q = comps.iter().map(|s| pa_pmf_exact(m, s)).sum();
            assert!(exact.is_one());
            let pa: f64 = comps.iter().map(|s| pa_joint_pmf(m, s).unwrap()).sum();
            let uni: f64 = comps.iter().map(|s| uniform_leaf_pmf(m, s).unwrap()).sum();
            assert!((pa - 1.0).abs() < 1e-12, "pa m={m} n={n}: {pa}");
            assert!((uni - 1.0).abs() < 1e-12, "uniform m={m} n={n}: {uni}");
        }
    }
}

#[test]
fn uniform_leaf_pmf_matches_sequence_enumeration() {
    for n in 0..=5 {
        let law = uniform_law_by_sequences(3, n);
        for s in compositions(n as u64, 3) {
            let expected = to_f64(&law[&s]);
            let got = uniform_leaf_pmf(3, &s).unwrap();
            assert!((got - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn sequences_are_exchangeable() {
    let urn = UrnComposition::caterpillar(3).unwrap();
    for n in 0..=5 {
        for seq in sequences(3, n) {
            let exact = pa_sequence_probability(3, &seq);
            let mut s = vec![0u64; 3];
            seq.iter().for_each(|&c| s[c] += 1);
            // every ordering of the same composition is equally likely
            let multinomial = to_f64(&(pa_pmf_exact(3, &s) / exact.clone()));
            assert!((multinomial.round() - multinomial).abs() < 1e-9);
            assert!((urn.sequence_probability(&seq) - to_f64(&exact)).abs() < 1e-14);
        }
    }
}

#[test]
fn pa_moments_equal_exhaustive_moments() {
    for m in 2..=4 {
        for n in 0..=6 {
            let (mean, cov) = degree_moments(m, &pa_law_by_sequences(m, n));
            let got_mean = pa_mean(m, n as u64).unwrap();
            let got_cov = pa_cov(m, n as u64).unwrap();
            for i in 0..m {
                assert!((got_mean[i] - to_f64(&mean[i])).abs() < 1e-12);
                for j in 0..m {
                    assert!(
                        (got_cov[i][j] - to_f64(&cov[i][j])).abs() < 1e-12,
                        "m={m} n={n} ({i},{j}): {} vs {}",
                        got_cov[i][j],
                        to_f64(&cov[i][j])
                    );
                }
            }
        }
    }
}

#[test]
fn pa_mean_small_case() {
    assert_eq!(pa_mean(3, 3).unwrap(), vec![1.75, 3.5, 1.75]);
}

#[test]
fn martingale_one_step_identity() {
    for m in 2..=5usize {
        let off = offsets(m);
        for n in 0..=10u64 {
            let total = n as i64 + 2 * m as i64 - 2;
            for s in compositions(n, m) {
                for i in 0..m {
                    let d = s[i] as i64 + off[i];
                    // E[D_{i,n+1} | D_{i,n} = d] = d + d / total
                    let next_exact = (q(d) + Q::new(d.into(), total.into()))
                        * Q::new((2 * (m as i64 - 1)).into(), (total + 1).into());
                    let current_exact = Q::new((2 * (m as i64 - 1) * d).into(), total.into());
                    assert_eq!(next_exact, current_exact);

                    let p = d as f64 / total as f64;
                    let next = p * martingale_value(m, n + 1, (d + 1) as f64)
                        + (1.0 - p) * martingale_value(m, n + 1, d as f64);
                    let current = martingale_value(m, n, d as f64);
                    assert!((next - current).abs() < 1e-12, "m={m} n={n} d={d}");
                }
            }
        }
    }
}

#[test]
fn uniform_degree_forms_disagree_on_small_cases() {
    // Pushforward of the leaf law is the reference; the direct degree-space form carries
    // an extra factor and only coincides on part of the support.
    for m in 2..=4 {
        for n in 0..=4u64 {
            let off = offsets(m);
            let mut pushforward = 0.0;
            for s in compositions(n, m) {
                let d: Vec<u64> = s.iter().zip(&off).map(|(&l, &o)| l + o as u64).collect();
                let p = uniform_degree_pmf_pushforward(m, &d, n).unwrap();
                assert!((p - uniform_leaf_pmf(m, &s).unwrap()).abs() < 1e-15);
                pushforward += p;
                assert!(uniform_degree_pmf(m, &d, n).unwrap().is_finite());
            }
            assert!((pushforward - 1.0).abs() < 1e-12);
        }
    }
    let direct = uniform_degree_pmf(2, &[1, 1], 0).unwrap();
    let pushforward = uniform_degree_pmf_pushforward(2, &[1, 1], 0).unwrap();
    assert_eq!((direct, pushforward), (0.5, 1.0));
}

#[test]
fn gini1_estimator_from_moments_is_exact() {
    for m in 2..=4 {
        for n in 0..=6 {
            for (model, law) in [
                (GrowthModel::Uniform, uniform_law_by_sequences(m, n)),
                (
                    GrowthModel::PreferentialAttachment,
                    pa_law_by_sequences(m, n),
                ),
            ] {
                let exact = gini1_estimator_exact(&law);
                assert!(!exact.is_zero());
                let got = gini1_hat_from_moments(model, m, n as u64).unwrap();
                assert!(
                    (got - to_f64(&exact)).abs() < 1e-12,
                    "{model} m={m} n={n}: {got} vs {}",
                    to_f64(&exact)
                );
            }
        }
    }
}
