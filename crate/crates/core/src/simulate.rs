//! Growth of random caterpillar trees.
//!
//! Randomness comes from ChaCha8 seeded with a 64-bit value. A replication's
//! seed is `splitmix64(base_seed ^ splitmix64(index))`, so every replication
//! owns an independent stream that does not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{spine_offset, CaterpillarTree};

/// Attachment rule for new leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GrowthModel {
    Uniform,
    PreferentialAttachment,
}

impl GrowthModel {
    pub const ALL: [GrowthModel; 2] = [GrowthModel::Uniform, GrowthModel::PreferentialAttachment];

    pub fn as_str(self) -> &'static str {
        match self {
            GrowthModel::Uniform => "uniform",
            GrowthModel::PreferentialAttachment => "pa",
        }
    }
}

impl fmt::Display for GrowthModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for GrowthModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl FromStr for GrowthModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "u" => Ok(GrowthModel::Uniform),
            "pa" | "preferential" | "p" => Ok(GrowthModel::PreferentialAttachment),
            other => Err(format!("unknown model `{other}` (expected uniform or pa)")),
        }
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Base seed plus an optional replication index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub base_seed: u64,
    pub replication: Option<u64>,
}

impl SeedSpec {
    pub fn new(base_seed: u64) -> Self {
        Self {
            base_seed,
            replication: None,
        }
    }

    pub fn replication(base_seed: u64, index: u64) -> Self {
        Self {
            base_seed,
            replication: Some(index),
        }
    }

    /// The seed handed to the generator. Without a replication index the base
    /// seed is used as is.
    pub fn derived(&self) -> u64 {
        match self.replication {
            None => self.base_seed,
            Some(r) => splitmix64(self.base_seed ^ splitmix64(r)),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derived())
    }
}

/// Draws a spine slot (0-based) uniformly. `random_range` rejects to stay
/// free of modulo bias.
pub fn select_uniform<R: Rng + ?Sized>(m: usize, rng: &mut R) -> usize {
    rng.random_range(0..m)
}

/// Sum of spine degrees, `n + 2m - 2`.
pub fn pa_total_weight(tree: &CaterpillarTree) -> u64 {
    tree.n() + 2 * tree.m() as u64 - 2
}

/// Draws a spine slot (0-based) with probability proportional to degree: one
/// uniform integer in `[0, n + 2m - 2)`, then a scan of cumulative degrees.
pub fn select_pa<R: Rng + ?Sized>(tree: &CaterpillarTree, rng: &mut R) -> usize {
    let m = tree.m();
    let target = rng.random_range(0..pa_total_weight(tree));
    let mut cumulative = 0;
    for (slot, &l) in tree.leaves().iter().enumerate() {
        cumulative += l + spine_offset(m, slot + 1);
        if target < cumulative {
            return slot;
        }
    }
    unreachable!("target {target} beyond total degree {cumulative}")
}

pub fn step_uniform<R: Rng + ?Sized>(tree: &mut CaterpillarTree, rng: &mut R) {
    let slot = select_uniform(tree.m(), rng);
    tree.push_leaf(slot);
}

pub fn step_pa<R: Rng + ?Sized>(tree: &mut CaterpillarTree, rng: &mut R) {
    let slot = select_pa(tree, rng);
    tree.push_leaf(slot);
}

pub fn step<R: Rng + ?Sized>(model: GrowthModel, tree: &mut CaterpillarTree, rng: &mut R) {
    match model {
        GrowthModel::Uniform => step_uniform(tree, rng),
        GrowthModel::PreferentialAttachment => step_pa(tree, rng),
    }
}

/// Grows a tree from the bare spine of `m` vertices for `n` steps.
pub fn grow(model: GrowthModel, m: usize, n: u64, seed: SeedSpec) -> Result<CaterpillarTree> {
    let mut tree = CaterpillarTree::new(m)?;
    let mut rng = seed.rng();
    for _ in 0..n {
        step(model, &mut tree, &mut rng);
    }
    Ok(tree)
}

/// `R` independent trees; tree `r` is grown from replication seed `r`.
/// The output order is by replication index whatever the thread count.
pub fn replicate(
    model: GrowthModel,
    m: usize,
    n: u64,
    replications: usize,
    base_seed: u64,
) -> Result<Vec<CaterpillarTree>> {
    if replications == 0 {
        return Err(Error::InvalidConfig(
            "replication count must be >= 1".into(),
        ));
    }
    CaterpillarTree::new(m)?;
    (0..replications as u64)
        .into_par_iter()
        .map(|r| grow(model, m, n, SeedSpec::replication(base_seed, r)))
        .collect()
}
