//! Caterpillar tree data model.
//!
//! A caterpillar tree with a spine of `m` vertices is fully described by how
//! many leaves hang off each spine vertex. Spine indices are 1-based at every
//! public entry point; storage is 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of spine edges incident to spine vertex `index` (1-based): 1 at the
/// two endpoints, 2 in the interior.
pub fn spine_offset(m: usize, index: usize) -> u64 {
    if index == 1 || index == m {
        1
    } else {
        2
    }
}

/// The offset vector `(1, 2, ..., 2, 1)` that turns leaf counts into degrees.
pub fn initial_degrees(m: usize) -> Vec<u64> {
    (1..=m).map(|i| spine_offset(m, i)).collect()
}

fn check_spine(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::SpineTooShort(m));
    }
    Ok(())
}

/// A caterpillar tree at time `n`: `leaves[i]` leaves attached to spine
/// vertex `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CaterpillarTree {
    n: u64,
    leaves: Vec<u64>,
}

impl CaterpillarTree {
    /// Bare spine of `m` vertices at time 0.
    pub fn new(m: usize) -> Result<Self> {
        check_spine(m)?;
        Ok(Self {
            n: 0,
            leaves: vec![0; m],
        })
    }

    /// Builds the tree `C(l_1, ..., l_m)`.
    pub fn from_leaves(leaves: Vec<u64>) -> Result<Self> {
        check_spine(leaves.len())?;
        let n = leaves.iter().sum();
        Ok(Self { n, leaves })
    }

    pub fn m(&self) -> usize {
        self.leaves.len()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn leaves(&self) -> &[u64] {
        &self.leaves
    }

    /// Returns a new tree with one more leaf on spine vertex `index`.
    pub fn attach_leaf(&self, index: usize) -> Result<Self> {
        let mut next = self.clone();
        next.attach_leaf_in_place(index)?;
        Ok(next)
    }

    /// In-place variant of [`attach_leaf`](Self::attach_leaf) used by the
    /// growth loop.
    pub fn attach_leaf_in_place(&mut self, index: usize) -> Result<()> {
        if index == 0 || index > self.m() {
            return Err(Error::SpineIndexOutOfRange { index, m: self.m() });
        }
        self.push_leaf(index - 1);
        Ok(())
    }

    // 0-based, unchecked beyond the slice bound.
    pub(crate) fn push_leaf(&mut self, slot: usize) {
        self.leaves[slot] += 1;
        self.n += 1;
    }

    /// Degrees of the spine vertices.
    pub fn degrees(&self) -> DegreeVector {
        let m = self.m();
        DegreeVector(
            self.leaves
                .iter()
                .enumerate()
                .map(|(i, &l)| l + spine_offset(m, i + 1))
                .collect(),
        )
    }

    /// Depths of all `m + n` vertices, rooted at the leftmost spine vertex.
    pub fn depths(&self) -> DepthMultiset {
        let m = self.m();
        // Spine vertex i sits at depth i - 1, its leaves at depth i.
        let counts = (0..=m)
            .map(|depth| {
                let spine = u64::from(depth < m);
                let leaves = if depth >= 1 {
                    self.leaves[depth - 1]
                } else {
                    0
                };
                spine + leaves
            })
            .collect();
        DepthMultiset { counts }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TreeDocument::from(self)).expect("tree document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TreeDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// Wire form of a tree: `{"m":5,"n":6,"leaves":[2,1,2,0,1]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeDocument {
    pub m: usize,
    pub n: u64,
    pub leaves: Vec<u64>,
}

impl From<&CaterpillarTree> for TreeDocument {
    fn from(tree: &CaterpillarTree) -> Self {
        TreeDocument {
            m: tree.m(),
            n: tree.n,
            leaves: tree.leaves.clone(),
        }
    }
}

impl TryFrom<TreeDocument> for CaterpillarTree {
    type Error = Error;

    fn try_from(doc: TreeDocument) -> Result<Self> {
        check_spine(doc.m)?;
        if doc.leaves.len() != doc.m {
            return Err(Error::LeafLengthMismatch {
                len: doc.leaves.len(),
                m: doc.m,
            });
        }
        let sum = doc
            .leaves
            .iter()
            .try_fold(0u64, |acc, &l| acc.checked_add(l))
            .unwrap_or(u64::MAX);
        if sum != doc.n {
            return Err(Error::LeafSumMismatch { sum, n: doc.n });
        }
        Ok(CaterpillarTree {
            n: doc.n,
            leaves: doc.leaves,
        })
    }
}

/// Degrees of the `m` spine vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeVector(Vec<u64>);

impl DegreeVector {
    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }
}

impl std::ops::Index<usize> for DegreeVector {
    type Output = u64;

    /// 1-based spine index.
    fn index(&self, index: usize) -> &u64 {
        &self.0[index - 1]
    }
}

/// Vertex depths stored as a histogram: `counts[d]` vertices at depth `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthMultiset {
    counts: Vec<u64>,
}

impl DepthMultiset {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of vertices.
    pub fn len(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sum of all depths.
    pub fn total(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(d, &c)| d as u64 * c)
            .sum()
    }

    /// Depths in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(d, &c)| std::iter::repeat_n(d as u64, c as usize))
    }

    pub fn to_sorted_vec(&self) -> Vec<f64> {
        self.iter().map(|d| d as f64).collect()
    }
}
