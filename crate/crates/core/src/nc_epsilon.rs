//! The ε-non-crossing partitions `NC^ε[𝐢]`: the pairwise crossing test, the
//! reduction search (interval-block removal plus ε-allowed adjacent swaps)
//! kept as a cross-check, and blockwise enumeration.

use std::collections::HashMap;

use crate::epsilon::EpsilonMatrix;
use crate::error::{Error, Result};
use crate::partition::{for_each_rgs, nc_extension_ok, IndexTuple, SetPartition};
use crate::DEFAULT_ENUMERATION_CAP;

/// Whether two disjoint sorted blocks cross, i.e. interleave as `a b a b`.
pub fn blocks_cross(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    let mut runs = 0;
    let mut current = None;
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i] < b[j]);
        if take_a {
            i += 1;
        } else {
            j += 1;
        }
        if current != Some(take_a) {
            current = Some(take_a);
            runs += 1;
            if runs >= 4 {
                return true;
            }
        }
    }
    false
}

fn check_sizes(p: &SetPartition, i: &IndexTuple, e: &EpsilonMatrix) -> Result<()> {
    if p.n() != i.len() {
        return Err(Error::Dimension {
            expected: i.len(),
            found: p.n(),
        });
    }
    e.check_tuple(i)
}

/// `π ≤ ker 𝐢` and every crossing between two blocks happens between labels
/// with `ε = 1`.
pub fn is_epsilon_noncrossing(p: &SetPartition, i: &IndexTuple, e: &EpsilonMatrix) -> Result<bool> {
    check_sizes(p, i, e)?;
    if !p.refines(&i.kernel())? {
        return Ok(false);
    }
    let blocks = p.blocks();
    for (x, bx) in blocks.iter().enumerate() {
        for by in &blocks[x + 1..] {
            if !e.get(i[bx[0]], i[by[0]]) && blocks_cross(bx, by) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

type State = (Vec<u8>, Vec<u8>);

fn canonical_rgs(labels: &[u8]) -> Vec<u8> {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    labels
        .iter()
        .map(|&l| {
            if map[l as usize] == u8::MAX {
                map[l as usize] = next;
                next += 1;
            }
            map[l as usize]
        })
        .collect()
}

/// Memoized search over `(partition, tuple)` states deciding whether a
/// partition reduces to the empty one. The memo is keyed on canonical states
/// and may be reused across queries for the same matrix.
pub struct ReductionSearch<'a> {
    eps: &'a EpsilonMatrix,
    memo: HashMap<State, bool>,
}

impl<'a> ReductionSearch<'a> {
    pub fn new(eps: &'a EpsilonMatrix) -> Self {
        ReductionSearch {
            eps,
            memo: HashMap::new(),
        }
    }

    pub fn states_visited(&self) -> usize {
        self.memo.len()
    }

    pub fn is_reducible(&mut self, p: &SetPartition, i: &IndexTuple) -> Result<bool> {
        check_sizes(p, i, self.eps)?;
        if self.eps.size() > 255 || p.n() > 255 {
            return Err(Error::Domain(
                "reduction search supports at most 255 labels and points".into(),
            ));
        }
        if !p.refines(&i.kernel())? {
            return Err(Error::Domain(format!(
                "{p} is not below the kernel of the tuple"
            )));
        }
        let tuple: Vec<u8> = i.iter().map(|&l| l as u8).collect();
        let rgs: Vec<u8> = p.rgs().iter().map(|&b| b as u8).collect();
        Ok(self.solve((tuple, rgs)))
    }

    fn solve(&mut self, start: State) -> bool {
        if start.0.is_empty() {
            return true;
        }
        if let Some(&known) = self.memo.get(&start) {
            return known;
        }
        // Swaps are reversible, so every state of the swap component shares
        // the answer.
        let n = start.0.len();
        let mut component = vec![start.clone()];
        let mut seen: HashMap<State, ()> = HashMap::new();
        seen.insert(start, ());
        let mut head = 0;
        while head < component.len() {
            let (t, r) = component[head].clone();
            head += 1;
            for k in 0..n - 1 {
                if !self.eps.get(t[k] as usize, t[k + 1] as usize) {
                    continue;
                }
                let mut t2 = t.clone();
                let mut r2 = r.clone();
                t2.swap(k, k + 1);
                r2.swap(k, k + 1);
                let next = (t2, canonical_rgs(&r2));
                if !seen.contains_key(&next) {
                    seen.insert(next.clone(), ());
                    component.push(next);
                }
            }
        }

        let mut result = false;
        'outer: for (t, r) in &component {
            let blocks = r.iter().copied().max().map_or(0, |m| m as usize + 1);
            for b in 0..blocks as u8 {
                let first = r.iter().position(|&x| x == b).unwrap();
                let last = r.iter().rposition(|&x| x == b).unwrap();
                if r[first..=last].iter().any(|&x| x != b) {
                    continue;
                }
                let mut t2 = t.clone();
                t2.drain(first..=last);
                let mut r2 = r.clone();
                r2.drain(first..=last);
                if self.solve((t2, canonical_rgs(&r2))) {
                    result = true;
                    break 'outer;
                }
            }
        }
        for s in component {
            self.memo.insert(s, result);
        }
        result
    }
}

/// Decides membership by searching for a reduction to the empty partition.
pub fn reduction_membership(p: &SetPartition, i: &IndexTuple, e: &EpsilonMatrix) -> Result<bool> {
    ReductionSearch::new(e).is_reducible(p, i)
}

/// Partitions of one kernel block (given by its global positions) that can
/// occur inside an element of `NC^ε`: non-crossing ones under the free
/// diagonal convention, all of them under the classical one.
pub(crate) fn kernel_block_candidates(
    positions: &[usize],
    classical: bool,
) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let allow = |prefix: &[usize], b: usize| classical || nc_extension_ok(prefix, b);
    for_each_rgs(positions.len(), allow, |rgs, nb| {
        let mut blocks = vec![Vec::new(); nb];
        for (k, &b) in rgs.iter().enumerate() {
            blocks[b].push(positions[k]);
        }
        out.push(blocks);
    });
    out
}

/// Walks the cartesian product of per-kernel-block choices, calling `visit`
/// with the chosen index per kernel block whenever no forbidden crossing
/// between different kernel blocks occurs.
pub(crate) fn for_each_compatible<F>(
    labels: &[usize],
    choices: &[Vec<Vec<Vec<usize>>>],
    e: &EpsilonMatrix,
    mut visit: F,
) where
    F: FnMut(&[usize]),
{
    let m = choices.len();
    if choices.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut pick = vec![0usize; m];
    loop {
        let ok = (0..m).all(|a| {
            (a + 1..m).all(|b| {
                e.get(labels[a], labels[b])
                    || choices[a][pick[a]]
                        .iter()
                        .all(|va| choices[b][pick[b]].iter().all(|vb| !blocks_cross(va, vb)))
            })
        });
        if ok {
            visit(&pick);
        }
        // odometer, last kernel block fastest
        let mut k = m;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
        }
    }
}

/// Every partition below `ker 𝐢` (products of arbitrary partitions of the
/// kernel blocks), in no particular order.
pub fn partitions_below_kernel(i: &IndexTuple) -> Vec<SetPartition> {
    let ker = i.kernel();
    let choices: Vec<_> = ker
        .blocks()
        .iter()
        .map(|b| kernel_block_candidates(b, true))
        .collect();
    let everything = EpsilonMatrix::independent(ker.num_blocks());
    let labels: Vec<usize> = (0..ker.num_blocks()).collect();
    let mut out = Vec::new();
    for_each_compatible(&labels, &choices, &everything, |pick| {
        out.push(assemble(i.len(), &choices, pick));
    });
    out
}

fn assemble(n: usize, choices: &[Vec<Vec<Vec<usize>>>], pick: &[usize]) -> SetPartition {
    let mut owner = vec![0usize; n];
    let mut id = 0;
    for (c, &k) in choices.iter().zip(pick) {
        for block in &c[k] {
            for &x in block {
                owner[x] = id;
            }
            id += 1;
        }
    }
    SetPartition::from_labels(&owner)
}

/// All of `NC^ε[𝐢]`, sorted lexicographically on the canonical form.
pub fn enumerate_nc_epsilon(i: &IndexTuple, e: &EpsilonMatrix) -> Result<Vec<SetPartition>> {
    enumerate_nc_epsilon_capped(i, e, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_nc_epsilon_capped(
    i: &IndexTuple,
    e: &EpsilonMatrix,
    cap: usize,
) -> Result<Vec<SetPartition>> {
    if i.len() > cap {
        return Err(Error::EnumerationLimit { n: i.len(), cap });
    }
    e.check_tuple(i)?;
    let ker = i.kernel();
    let labels: Vec<usize> = ker.blocks().iter().map(|b| i[b[0]]).collect();
    let choices: Vec<_> = ker
        .blocks()
        .iter()
        .zip(&labels)
        .map(|(b, &l)| kernel_block_candidates(b, e.diagonal(l)))
        .collect();
    let n = i.len();
    let mut out = Vec::new();
    for_each_compatible(&labels, &choices, e, |pick| {
        out.push(assemble(n, &choices, pick))
    });
    out.sort();
    Ok(out)
}
