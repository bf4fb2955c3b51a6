//! Set partitions of `{1, …, n}`, index tuples and their kernels.
//!
//! Internally elements are `0..n`; the textual and JSON forms are 1-based.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Deref;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::DEFAULT_ENUMERATION_CAP;

/// A partition of `{0, …, n-1}` in canonical form: blocks sorted by their
/// minimum, elements ascending inside each block.
///
/// The restricted growth string (`rgs[k]` = index of the block holding `k`)
/// is kept alongside and serves as the equality/hash key.
#[derive(Clone, Debug)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
    rgs: Vec<usize>,
}

impl SetPartition {
    /// Builds a partition from arbitrary 0-based blocks, validating coverage.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in block {
                if x >= n {
                    return Err(Error::InvalidPartition(format!(
                        "element {} outside 1..={n}",
                        x + 1
                    )));
                }
                if owner[x] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "element {} appears twice",
                        x + 1
                    )));
                }
                owner[x] = b;
            }
        }
        if let Some(x) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "element {} not covered",
                x + 1
            )));
        }
        Ok(Self::from_labels(&owner))
    }

    /// Builds a partition from 1-based blocks; `n` is the total element count.
    pub fn from_one_based<B: AsRef<[usize]>>(blocks: &[B]) -> Result<Self> {
        let n = blocks.iter().map(|b| b.as_ref().len()).sum();
        let mut zero_based = Vec::with_capacity(blocks.len());
        for b in blocks {
            let mut v = Vec::with_capacity(b.as_ref().len());
            for &x in b.as_ref() {
                if x == 0 {
                    return Err(Error::InvalidPartition("element 0 in 1-based input".into()));
                }
                v.push(x - 1);
            }
            zero_based.push(v);
        }
        Self::new(n, zero_based)
    }

    /// Canonicalizes any labelling: positions with equal labels share a block.
    pub fn from_labels<T: Eq + Copy>(labels: &[T]) -> Self {
        let mut seen: Vec<T> = Vec::new();
        let mut rgs = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (k, &l) in labels.iter().enumerate() {
            let b = match seen.iter().position(|&s| s == l) {
                Some(b) => b,
                None => {
                    seen.push(l);
                    blocks.push(Vec::new());
                    seen.len() - 1
                }
            };
            rgs.push(b);
            blocks[b].push(k);
        }
        SetPartition { blocks, rgs }
    }

    pub fn empty() -> Self {
        SetPartition {
            blocks: Vec::new(),
            rgs: Vec::new(),
        }
    }

    /// `{{1}, {2}, …, {n}}`
    pub fn discrete(n: usize) -> Self {
        SetPartition {
            blocks: (0..n).map(|k| vec![k]).collect(),
            rgs: (0..n).collect(),
        }
    }

    /// `{{1, …, n}}`
    pub fn full(n: usize) -> Self {
        if n == 0 {
            return Self::empty();
        }
        SetPartition {
            blocks: vec![(0..n).collect()],
            rgs: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.rgs.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Restricted growth string view.
    pub fn rgs(&self) -> &[usize] {
        &self.rgs
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.rgs[x]
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.rgs[x] == self.rgs[y]
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|x| x + 1).collect())
            .collect()
    }

    pub fn has_singleton(&self) -> bool {
        self.blocks.iter().any(|b| b.len() == 1)
    }

    /// True iff no `a < b < c < d` with `a ~ c`, `b ~ d` and `a ≁ b`.
    pub fn is_noncrossing(&self) -> bool {
        // A block revisited after another block opened must be the innermost
        // open block.
        let last: Vec<usize> = self.blocks.iter().map(|b| *b.last().unwrap()).collect();
        let mut stack: Vec<usize> = Vec::new();
        for (x, &b) in self.rgs.iter().enumerate() {
            let first = self.blocks[b][0] == x;
            if !first && stack.last() != Some(&b) {
                return false;
            }
            if first && last[b] != x {
                stack.push(b);
            } else if !first && last[b] == x {
                stack.pop();
            }
        }
        true
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &SetPartition) -> Result<bool> {
        if self.n() != other.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(self.blocks.iter().all(|b| {
            let target = other.rgs[b[0]];
            b.iter().all(|&x| other.rgs[x] == target)
        }))
    }

    /// Indices of blocks made of consecutive integers.
    pub fn interval_blocks(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b[b.len() - 1] - b[0] + 1 == b.len())
            .map(|(i, _)| i)
    }

    /// Drops block `idx` and renumbers the remaining elements to `0..n'`.
    pub fn remove_block(&self, idx: usize) -> SetPartition {
        let labels: Vec<usize> = self.rgs.iter().copied().filter(|&b| b != idx).collect();
        SetPartition::from_labels(&labels)
    }

    /// The partition obtained by swapping the points `k` and `k + 1`.
    pub fn swap_adjacent(&self, k: usize) -> SetPartition {
        let mut labels = self.rgs.clone();
        labels.swap(k, k + 1);
        SetPartition::from_labels(&labels)
    }

    /// Inserts a new singleton block at position `pos` (0-based), shifting
    /// later elements up by one.
    pub fn insert_singleton(&self, pos: usize) -> SetPartition {
        let mut labels = self.rgs.clone();
        labels.insert(pos, usize::MAX);
        SetPartition::from_labels(&labels)
    }
}

impl PartialEq for SetPartition {
    fn eq(&self, other: &Self) -> bool {
        self.rgs == other.rgs
    }
}

impl Eq for SetPartition {}

impl Hash for SetPartition {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rgs.hash(state);
    }
}

impl PartialOrd for SetPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SetPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.blocks.cmp(&other.blocks)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", x + 1)?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(deserializer)?;
        SetPartition::from_one_based(&blocks).map_err(serde::de::Error::custom)
    }
}

/// A sequence of algebra labels `(i(1), …, i(n))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexTuple(Vec<usize>);

impl IndexTuple {
    pub fn new(entries: Vec<usize>) -> Self {
        IndexTuple(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// Positions carrying equal labels form the blocks.
    pub fn kernel(&self) -> SetPartition {
        SetPartition::from_labels(&self.0)
    }

    pub fn max_label(&self) -> Option<usize> {
        self.0.iter().copied().max()
    }
}

impl Deref for IndexTuple {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for IndexTuple {
    fn from(v: Vec<usize>) -> Self {
        IndexTuple(v)
    }
}

impl From<&[usize]> for IndexTuple {
    fn from(v: &[usize]) -> Self {
        IndexTuple(v.to_vec())
    }
}

/// `ker 𝐢` as a free function.
pub fn kernel(i: &IndexTuple) -> SetPartition {
    i.kernel()
}

pub fn is_noncrossing(p: &SetPartition) -> bool {
    p.is_noncrossing()
}

pub fn refines(p: &SetPartition, q: &SetPartition) -> Result<bool> {
    p.refines(q)
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::EnumerationLimit { n, cap })
    } else {
        Ok(())
    }
}

/// Walks all restricted growth strings of length `n` in lexicographic order.
/// `allow(prefix, block)` may veto appending `block` to `prefix`.
pub(crate) fn for_each_rgs<A, F>(n: usize, mut allow: A, mut visit: F)
where
    A: FnMut(&[usize], usize) -> bool,
    F: FnMut(&[usize], usize),
{
    fn go<A, F>(rgs: &mut Vec<usize>, blocks: usize, n: usize, allow: &mut A, visit: &mut F)
    where
        A: FnMut(&[usize], usize) -> bool,
        F: FnMut(&[usize], usize),
    {
        if rgs.len() == n {
            visit(rgs, blocks);
            return;
        }
        for b in 0..=blocks {
            if !allow(rgs, b) {
                continue;
            }
            rgs.push(b);
            go(rgs, blocks.max(b + 1), n, allow, visit);
            rgs.pop();
        }
    }
    let mut rgs = Vec::with_capacity(n);
    go(&mut rgs, 0, n, &mut allow, &mut visit);
}

/// Whether appending element `x = prefix.len()` to existing block `b` keeps
/// the prefix non-crossing.
pub(crate) fn nc_extension_ok(prefix: &[usize], b: usize) -> bool {
    let x = prefix.len();
    let Some(last_b) = prefix.iter().rposition(|&c| c == b) else {
        return true;
    };
    (last_b + 1..x).all(|y| {
        let c = prefix[y];
        // c has an element strictly between last_b and x; it must not have
        // one before last_b.
        prefix[..last_b].iter().all(|&z| z != c)
    })
}

/// All partitions of `{1, …, n}` (Bell(n) of them) under the default cap.
pub fn enumerate_set_partitions(n: usize) -> Result<Vec<SetPartition>> {
    enumerate_set_partitions_capped(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_set_partitions_capped(n: usize, cap: usize) -> Result<Vec<SetPartition>> {
    check_cap(n, cap)?;
    let mut out = Vec::new();
    for_each_rgs(
        n,
        |_, _| true,
        |rgs, _| out.push(SetPartition::from_labels(rgs)),
    );
    Ok(out)
}

/// All non-crossing partitions of `{1, …, n}` (Catalan(n) of them).
pub fn enumerate_noncrossing(n: usize) -> Result<Vec<SetPartition>> {
    enumerate_noncrossing_capped(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_noncrossing_capped(n: usize, cap: usize) -> Result<Vec<SetPartition>> {
    check_cap(n, cap)?;
    let mut out = Vec::new();
    for_each_rgs(n, nc_extension_ok, |rgs, _| {
        out.push(SetPartition::from_labels(rgs))
    });
    Ok(out)
}
