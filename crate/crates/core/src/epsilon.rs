//! The independence prescription ε and admissibility of index tuples.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::IndexTuple;

/// Symmetric 0/1 matrix over labels `0..size`.
///
/// Off-diagonal `1` means the two algebras are classically independent (and
/// commute), `0` means free. The diagonal selects free (`0`, default) or
/// classical (`1`) cumulants for each label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpsilonMatrix {
    size: usize,
    entries: Vec<bool>,
}

impl EpsilonMatrix {
    /// All zero: pure freeness.
    pub fn free(size: usize) -> Self {
        EpsilonMatrix {
            size,
            entries: vec![false; size * size],
        }
    }

    /// All off-diagonal entries one: pure classical independence.
    pub fn independent(size: usize) -> Self {
        let mut e = Self::free(size);
        for i in 0..size {
            for j in 0..size {
                e.entries[i * size + j] = i != j;
            }
        }
        e
    }

    /// `ε_ij = 1` exactly for the listed pairs (symmetrized), diagonal zero.
    pub fn from_edge_list(size: usize, independent_pairs: &[(usize, usize)]) -> Result<Self> {
        let mut e = Self::free(size);
        for &(a, b) in independent_pairs {
            for l in [a, b] {
                if l >= size {
                    return Err(Error::LabelOutOfRange { label: l, size });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            e.entries[a * size + b] = true;
            e.entries[b * size + a] = true;
        }
        Ok(e)
    }

    /// From a full 0/1 matrix, diagonal included.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let size = rows.len();
        let mut e = Self::free(size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Dimension {
                    expected: size,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::InvalidMatrix(format!("entry ({i},{j}) = {v}")));
                }
                e.entries[i * size + j] = v == 1;
            }
        }
        for i in 0..size {
            for j in 0..i {
                if e.get(i, j) != e.get(j, i) {
                    return Err(Error::InvalidMatrix(format!(
                        "({i},{j}) differs from ({j},{i})"
                    )));
                }
            }
        }
        Ok(e)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.size + j]
    }

    /// `ε_ij` as 0 or 1.
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.get(i, j) as u8
    }

    pub fn diagonal(&self, i: usize) -> bool {
        self.get(i, i)
    }

    pub fn with_diagonal(mut self, i: usize, classical: bool) -> Self {
        self.entries[i * self.size + i] = classical;
        self
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.entries[i * self.size + j] = value;
        self.entries[j * self.size + i] = value;
    }

    /// Every off-diagonal entry is zero (diagonal ignored).
    pub fn is_all_free(&self) -> bool {
        (0..self.size).all(|i| (0..self.size).all(|j| i == j || !self.get(i, j)))
    }

    /// Every off-diagonal entry is one (diagonal ignored).
    pub fn is_all_independent(&self) -> bool {
        (0..self.size).all(|i| (0..self.size).all(|j| i == j || self.get(i, j)))
    }

    /// Unordered independent pairs `(i, j)` with `i < j`.
    pub fn independent_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.size {
            for j in i + 1..self.size {
                if self.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn check_tuple(&self, i: &[usize]) -> Result<()> {
        match i.iter().find(|&&l| l >= self.size) {
            Some(&label) => Err(Error::LabelOutOfRange {
                label,
                size: self.size,
            }),
            None => Ok(()),
        }
    }
}

/// Membership in `I_n^ε`: equal labels at `k < l` are always separated by
/// some `p` strictly between carrying a different label free from `i(k)`.
pub fn is_admissible_tuple(i: &IndexTuple, e: &EpsilonMatrix) -> bool {
    let t = i.entries();
    for k in 0..t.len() {
        for l in k + 1..t.len() {
            if t[k] != t[l] {
                continue;
            }
            let separated = (k + 1..l).any(|p| t[p] != t[k] && !e.get(t[k], t[p]));
            if !separated {
                return false;
            }
        }
    }
    true
}

/// JSON graph description with named labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub labels: Vec<String>,
    #[serde(default)]
    pub independent_pairs: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<BTreeMap<String, u8>>,
}

/// An ε-matrix together with the names of its labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledGraph {
    pub names: Vec<String>,
    pub matrix: EpsilonMatrix,
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<LabelledGraph> {
        let names = self.labels.clone();
        for (k, n) in names.iter().enumerate() {
            if names[..k].contains(n) {
                return Err(Error::Parse(format!("duplicate label {n:?}")));
            }
        }
        let lookup = |n: &str| {
            names
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| Error::Parse(format!("unknown label {n:?}")))
        };
        let mut pairs = Vec::with_capacity(self.independent_pairs.len());
        for (a, b) in &self.independent_pairs {
            pairs.push((lookup(a)?, lookup(b)?));
        }
        let mut matrix = EpsilonMatrix::from_edge_list(names.len(), &pairs)?;
        if let Some(diag) = &self.diagonal {
            for (name, &v) in diag {
                if v > 1 {
                    return Err(Error::Parse(format!(
                        "diagonal entry for {name:?} must be 0 or 1"
                    )));
                }
                let l = lookup(name)?;
                matrix = matrix.with_diagonal(l, v == 1);
            }
        }
        Ok(LabelledGraph { names, matrix })
    }
}

impl LabelledGraph {
    pub fn label(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| Error::Parse(format!("unknown label {name:?}")))
    }

    /// Parses `"a,b,c"` into dense labels.
    pub fn parse_tuple(&self, text: &str) -> Result<IndexTuple> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(IndexTuple::default());
        }
        text.split(',')
            .map(|s| self.label(s.trim()))
            .collect::<Result<Vec<_>>>()
            .map(IndexTuple::new)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_cycle() -> EpsilonMatrix {
        let cycle = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let mut pairs = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                if !cycle.contains(&(i, j)) && !cycle.contains(&(j, i)) {
                    pairs.push((i, j));
                }
            }
        }
        EpsilonMatrix::from_edge_list(5, &pairs).unwrap()
    }

    #[test]
    fn edge_list_examples() {
        let free = EpsilonMatrix::from_edge_list(2, &[]).unwrap();
        assert_eq!(free, EpsilonMatrix::free(2));
        let ind = EpsilonMatrix::from_edge_list(2, &[(0, 1)]).unwrap();
        assert_eq!(ind.entry(0, 1), 1);
        assert_eq!(ind.entry(1, 0), 1);
        assert_eq!(ind.entry(0, 0), 0);
        assert_eq!(ind, EpsilonMatrix::independent(2));

        let c = five_cycle();
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)] {
            assert_eq!(c.entry(a, b), 0);
        }
        assert_eq!(
            c.independent_pairs(),
            vec![(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)]
        );
        assert!((0..5).all(|i| !c.diagonal(i)));
    }

    #[test]
    fn edge_list_errors() {
        assert_eq!(
            EpsilonMatrix::from_edge_list(2, &[(0, 2)]),
            Err(Error::LabelOutOfRange { label: 2, size: 2 })
        );
        assert_eq!(
            EpsilonMatrix::from_edge_list(3, &[(1, 1)]),
            Err(Error::SelfLoop(1))
        );
    }

    #[test]
    fn from_rows_validates() {
        assert!(EpsilonMatrix::from_rows(&[vec![0, 1], vec![0, 0]]).is_err());
        assert!(EpsilonMatrix::from_rows(&[vec![0, 2], vec![2, 0]]).is_err());
        let e = EpsilonMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).unwrap();
        assert!(e.diagonal(0) && !e.diagonal(1) && e.get(0, 1));
    }

    #[test]
    fn admissibility_examples() {
        let t = IndexTuple::new(vec![0, 1, 0]);
        assert!(is_admissible_tuple(&t, &EpsilonMatrix::free(2)));
        assert!(!is_admissible_tuple(&t, &EpsilonMatrix::independent(2)));
        for e in [
            EpsilonMatrix::free(1),
            EpsilonMatrix::free(1).with_diagonal(0, true),
        ] {
            assert!(!is_admissible_tuple(&IndexTuple::new(vec![0, 0]), &e));
        }
    }

    fn all_matrices(size: usize) -> Vec<EpsilonMatrix> {
        let pairs: Vec<(usize, usize)> = (0..size)
            .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
            .collect();
        (0..1u32 << pairs.len())
            .map(|mask| {
                let chosen: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                EpsilonMatrix::from_edge_list(size, &chosen).unwrap()
            })
            .collect()
    }

    fn tuples(labels: usize, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..labels).map(move |l| {
                        let mut t = t.clone();
                        t.push(l);
                        t
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn admissibility_invariant_under_commuting_swaps() {
        for e in all_matrices(4) {
            for n in 2..=6 {
                for t in tuples(4, n) {
                    let adm = is_admissible_tuple(&IndexTuple::new(t.clone()), &e);
                    for k in 0..n - 1 {
                        if t[k] != t[k + 1] && e.get(t[k], t[k + 1]) {
                            let mut s = t.clone();
                            s.swap(k, k + 1);
                            assert_eq!(adm, is_admissible_tuple(&IndexTuple::new(s), &e));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn distinct_and_free_cases() {
        let e = EpsilonMatrix::independent(4);
        assert!(is_admissible_tuple(&IndexTuple::new(vec![3, 1, 0, 2]), &e));
        let free = EpsilonMatrix::free(3);
        for n in 0..=5 {
            for t in tuples(3, n) {
                let no_repeat = t.windows(2).all(|w| w[0] != w[1]);
                assert_eq!(no_repeat, is_admissible_tuple(&IndexTuple::new(t), &free));
            }
        }
    }

    #[test]
    fn graph_spec_json() {
        let text = r#"{"labels":["x","y","z"],"independent_pairs":[["x","z"]],"diagonal":{"y":1}}"#;
        let g = GraphSpec::from_json(text).unwrap().build().unwrap();
        assert!(g.matrix.get(0, 2) && !g.matrix.get(0, 1) && g.matrix.diagonal(1));
        assert_eq!(g.parse_tuple("x, z,x").unwrap().entries(), &[0, 2, 0]);
        assert!(g.parse_tuple("x,w").is_err());

        let bad = r#"{"labels":["x"],"independent_pairs":[["x","x"]]}"#;
        assert_eq!(
            GraphSpec::from_json(bad).unwrap().build(),
            Err(Error::SelfLoop(0))
        );
        assert!(GraphSpec::from_json(r#"{"labels":["x","x"]}"#)
            .unwrap()
            .build()
            .is_err());
        assert!(GraphSpec::from_json("{\"labels\": [1]}").is_err());
    }
}
