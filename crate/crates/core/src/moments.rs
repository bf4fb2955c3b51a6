//! Mixed moments: the cumulant sum over `NC^ε[𝐢]`, the centering recursion
//! built directly on the vanishing condition, and the factorization shortcut
//! for tuples whose kernel is itself ε-non-crossing.

use std::collections::HashMap;

use num_traits::Zero;

use crate::cumulants::{MomentSequence, TableSet};
use crate::epsilon::EpsilonMatrix;
use crate::error::{Error, Result};
use crate::nc_epsilon::{for_each_compatible, is_epsilon_noncrossing, kernel_block_candidates};
use crate::partition::IndexTuple;
use crate::scalar::{one, Scalar};
use crate::{DEFAULT_DEFINITION_CAP, DEFAULT_ENUMERATION_CAP};

/// `Σ_{π ∈ NC^ε[𝐢]} κ_π(a_1, …, a_n)`.
///
/// Candidates are built per kernel block and those containing a block with
/// vanishing cumulant are dropped before the crossing test, since they
/// contribute zero.
pub fn mixed_moment_cumulant(
    i: &IndexTuple,
    e: &EpsilonMatrix,
    tables: &TableSet,
) -> Result<Scalar> {
    mixed_moment_cumulant_capped(i, e, tables, DEFAULT_ENUMERATION_CAP)
}

pub fn mixed_moment_cumulant_capped(
    i: &IndexTuple,
    e: &EpsilonMatrix,
    tables: &TableSet,
    cap: usize,
) -> Result<Scalar> {
    if i.len() > cap {
        return Err(Error::EnumerationLimit { n: i.len(), cap });
    }
    e.check_tuple(i)?;
    let ker = i.kernel();
    let mut labels = Vec::with_capacity(ker.num_blocks());
    let mut choices = Vec::with_capacity(ker.num_blocks());
    let mut weights: Vec<Vec<Scalar>> = Vec::with_capacity(ker.num_blocks());
    for block in ker.blocks() {
        let label = i[block[0]];
        let table = tables.get_for(label, e)?;
        table.cumulant(block.len())?;
        let mut kept = Vec::new();
        let mut w = Vec::new();
        for cand in kernel_block_candidates(block, e.diagonal(label)) {
            let mut prod = one();
            for b in &cand {
                let k = table.cumulant(b.len())?;
                if k.is_zero() {
                    prod = Scalar::zero();
                    break;
                }
                prod *= k;
            }
            if !prod.is_zero() {
                kept.push(cand);
                w.push(prod);
            }
        }
        labels.push(label);
        choices.push(kept);
        weights.push(w);
    }
    let mut total = Scalar::zero();
    for_each_compatible(&labels, &choices, e, |pick| {
        let mut prod = one();
        for (w, &k) in weights.iter().zip(pick) {
            prod *= &w[k];
        }
        total += prod;
    });
    Ok(total)
}

/// A tuple brought into admissible form, with the original (0-based)
/// positions merged into each factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedWord {
    pub tuple: IndexTuple,
    pub groups: Vec<Vec<usize>>,
}

/// Repeatedly takes the violating pair `(k, l)` with the smallest gap (then
/// smallest `k`), slides `l` left next to `k` through commuting neighbours
/// and merges the two factors. The result is admissible.
pub fn normalize_tuple(i: &IndexTuple, e: &EpsilonMatrix) -> Result<NormalizedWord> {
    e.check_tuple(i)?;
    let mut labels: Vec<usize> = i.to_vec();
    let mut groups: Vec<Vec<usize>> = (0..i.len()).map(|k| vec![k]).collect();
    while let Some((k, l)) = violating_pair(&labels, e) {
        labels.remove(l);
        let moved = groups.remove(l);
        groups[k].extend(moved);
    }
    Ok(NormalizedWord {
        tuple: IndexTuple::new(labels),
        groups,
    })
}

fn violating_pair(labels: &[usize], e: &EpsilonMatrix) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for k in 0..labels.len() {
        let Some(off) = labels[k + 1..].iter().position(|&x| x == labels[k]) else {
            continue;
        };
        let l = k + 1 + off;
        if best.is_some_and(|(bk, bl)| bl - bk <= l - k) {
            continue;
        }
        if labels[k + 1..l].iter().all(|&x| e.get(labels[k], x)) {
            best = Some((k, l));
        }
    }
    best
}

/// Evaluates mixed moments of powers `x_{i(1)}^{p_1} ⋯ x_{i(m)}^{p_m}` from
/// the per-label moments alone, by centering each factor and using that
/// centered admissible products vanish. Results are memoized on normalized
/// words, so one evaluator can serve many tuples for the same data.
pub struct DefinitionEvaluator<'a> {
    eps: &'a EpsilonMatrix,
    moments: &'a [MomentSequence],
    cap: usize,
    memo: HashMap<Vec<(usize, usize)>, Scalar>,
}

impl<'a> DefinitionEvaluator<'a> {
    pub fn new(eps: &'a EpsilonMatrix, moments: &'a [MomentSequence]) -> Self {
        Self::with_cap(eps, moments, DEFAULT_DEFINITION_CAP)
    }

    pub fn with_cap(eps: &'a EpsilonMatrix, moments: &'a [MomentSequence], cap: usize) -> Self {
        DefinitionEvaluator {
            eps,
            moments,
            cap,
            memo: HashMap::new(),
        }
    }

    pub fn evaluate(&mut self, i: &IndexTuple) -> Result<Scalar> {
        if i.len() > self.cap {
            return Err(Error::LengthCap {
                what: "the centering evaluator",
                len: i.len(),
                cap: self.cap,
            });
        }
        self.eps.check_tuple(i)?;
        if let Some(&l) = i.iter().find(|&&l| l >= self.moments.len()) {
            return Err(Error::MissingTable(l));
        }
        let word: Vec<(usize, usize)> = i.iter().map(|&l| (l, 1)).collect();
        self.word(word)
    }

    fn moment(&self, label: usize, power: usize) -> Result<Scalar> {
        let seq = &self.moments[label];
        seq.get(power).ok_or(Error::OrderOverflow {
            label,
            order: power,
            max: seq.max_order(),
        })
    }

    fn word(&mut self, word: Vec<(usize, usize)>) -> Result<Scalar> {
        let labels = IndexTuple::new(word.iter().map(|&(l, _)| l).collect());
        let norm = normalize_tuple(&labels, self.eps)?;
        let word: Vec<(usize, usize)> = norm
            .tuple
            .iter()
            .zip(&norm.groups)
            .map(|(&l, g)| (l, g.iter().map(|&k| word[k].1).sum()))
            .collect();
        match word.len() {
            0 => return Ok(one()),
            1 => return self.moment(word[0].0, word[0].1),
            _ => {}
        }
        if let Some(v) = self.memo.get(&word) {
            return Ok(v.clone());
        }
        // 0 = φ(Π (a_k - φ(a_k))) = Σ_S Π_{k∉S} (-φ(a_k)) φ(Π_{k∈S} a_k)
        let m = word.len();
        let neg_means: Vec<Scalar> = word
            .iter()
            .map(|&(l, p)| self.moment(l, p).map(|x| -x))
            .collect::<Result<_>>()?;
        let full = (1u32 << m) - 1;
        let mut acc = Scalar::zero();
        for mask in 0..full {
            let mut coeff = one();
            for (k, nm) in neg_means.iter().enumerate() {
                if mask >> k & 1 == 0 {
                    coeff *= nm;
                }
            }
            if coeff.is_zero() {
                continue;
            }
            let sub: Vec<(usize, usize)> = (0..m)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| word[k])
                .collect();
            acc += coeff * self.word(sub)?;
        }
        let value = -acc;
        self.memo.insert(word, value.clone());
        Ok(value)
    }
}

/// `φ(a_1⋯a_n)` by the centering recursion.
pub fn mixed_moment_by_definition(
    i: &IndexTuple,
    e: &EpsilonMatrix,
    moments: &[MomentSequence],
) -> Result<Scalar> {
    DefinitionEvaluator::new(e, moments).evaluate(i)
}

/// `Π_{V ∈ ker 𝐢} φ(x_V^{|V|})` when `ker 𝐢 ∈ NC^ε[𝐢]`, `None` otherwise.
pub fn factorization_shortcut(
    i: &IndexTuple,
    e: &EpsilonMatrix,
    tables: &TableSet,
) -> Result<Option<Scalar>> {
    let ker = i.kernel();
    if !is_epsilon_noncrossing(&ker, i, e)? {
        return Ok(None);
    }
    let mut prod = one();
    for block in ker.blocks() {
        prod *= tables.get_for(i[block[0]], e)?.moment(block.len())?;
    }
    Ok(Some(prod))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::{kappa_pi, CumulantKind, CumulantTable};
    use crate::distribution::Distribution;
    use crate::epsilon::is_admissible_tuple;
    use crate::nc_epsilon::enumerate_nc_epsilon;
    use crate::scalar::{int, ratio};
    use proptest::prelude::*;

    fn t(v: &[usize]) -> IndexTuple {
        IndexTuple::new(v.to_vec())
    }

    fn semicircles(e: &EpsilonMatrix, order: usize) -> (TableSet, Vec<MomentSequence>) {
        let d = Distribution::standard_semicircle();
        let m: Vec<_> = (0..e.size()).map(|_| d.moments(order).unwrap()).collect();
        let tables = (0..e.size()).map(|l| {
            CumulantTable::from_moments(l, CumulantKind::for_diagonal(e.diagonal(l)), &m[l])
                .unwrap()
        });
        (TableSet::from_tables(tables), m)
    }

    #[test]
    fn cumulant_route_examples() {
        let i = t(&[0, 1, 0, 1]);
        let free = EpsilonMatrix::free(2);
        let ind = EpsilonMatrix::independent(2);
        assert_eq!(
            mixed_moment_cumulant(&i, &free, &semicircles(&free, 4).0).unwrap(),
            int(0)
        );
        assert_eq!(
            mixed_moment_cumulant(&i, &ind, &semicircles(&ind, 4).0).unwrap(),
            int(1)
        );
        assert_eq!(
            mixed_moment_cumulant(&t(&[0; 4]), &free, &semicircles(&free, 4).0).unwrap(),
            int(2)
        );
        assert_eq!(
            mixed_moment_cumulant(&t(&[]), &free, &semicircles(&free, 4).0).unwrap(),
            int(1)
        );
    }

    #[test]
    fn cumulant_route_errors() {
        let e = EpsilonMatrix::free(2);
        let tables = TableSet::from_tables([CumulantTable::from_cumulants(
            0,
            CumulantKind::Free,
            vec![int(0), int(1)],
        )]);
        assert_eq!(
            mixed_moment_cumulant(&t(&[0, 1]), &e, &tables),
            Err(Error::MissingTable(1))
        );
        assert!(matches!(
            mixed_moment_cumulant(&t(&[0, 0, 0]), &e, &tables),
            Err(Error::OrderOverflow { order: 3, .. })
        ));
        assert!(matches!(
            mixed_moment_cumulant(&t(&[0, 2]), &e, &tables),
            Err(Error::LabelOutOfRange { label: 2, .. })
        ));
    }

    #[test]
    fn definition_route_examples() {
        let i = t(&[0, 1, 0, 1]);
        let ind = EpsilonMatrix::independent(2);
        let free = EpsilonMatrix::free(2);
        assert_eq!(
            mixed_moment_by_definition(&i, &ind, &semicircles(&ind, 4).1).unwrap(),
            int(1)
        );
        assert_eq!(
            mixed_moment_by_definition(&i, &free, &semicircles(&free, 4).1).unwrap(),
            int(0)
        );
        let m = vec![MomentSequence::new(vec![
            ratio(1, 2),
            int(3),
            ratio(-5, 4),
            int(7),
        ])];
        for n in 0..=4 {
            let want = m[0].get(n).unwrap();
            assert_eq!(
                mixed_moment_by_definition(&t(&vec![0; n]), &EpsilonMatrix::free(1), &m).unwrap(),
                want
            );
        }
    }

    #[test]
    fn definition_route_errors() {
        let e = EpsilonMatrix::free(2);
        let m = vec![MomentSequence::new(vec![int(0), int(1)])];
        assert_eq!(
            mixed_moment_by_definition(&t(&[0, 1]), &e, &m),
            Err(Error::MissingTable(1))
        );
        assert!(matches!(
            mixed_moment_by_definition(&t(&[0, 0, 0]), &e, &m),
            Err(Error::OrderOverflow { .. })
        ));
        assert!(matches!(
            mixed_moment_by_definition(&t(&[0; 11]), &e, &m),
            Err(Error::LengthCap { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        let ind = EpsilonMatrix::independent(2);
        let free = EpsilonMatrix::free(2);
        let n = normalize_tuple(&t(&[0, 1, 0]), &ind).unwrap();
        assert_eq!(n.tuple, t(&[0, 1]));
        assert_eq!(n.groups, vec![vec![0, 2], vec![1]]);
        let n = normalize_tuple(&t(&[0, 1, 0]), &free).unwrap();
        assert_eq!(n.tuple, t(&[0, 1, 0]));
        assert_eq!(n.groups, vec![vec![0], vec![1], vec![2]]);
        for e in [ind, free] {
            let n = normalize_tuple(&t(&[0, 0, 1]), &e).unwrap();
            assert_eq!(n.tuple, t(&[0, 1]));
            assert_eq!(n.groups, vec![vec![0, 1], vec![2]]);
        }
    }

    #[test]
    fn factorization_examples() {
        let ind = EpsilonMatrix::independent(2);
        let free = EpsilonMatrix::free(2);
        let i = t(&[0, 1, 0, 1]);
        assert_eq!(
            factorization_shortcut(&i, &ind, &semicircles(&ind, 4).0).unwrap(),
            Some(int(1))
        );
        assert_eq!(
            factorization_shortcut(&i, &free, &semicircles(&free, 4).0).unwrap(),
            None
        );
        for e in [ind, free] {
            let v = factorization_shortcut(&t(&[0, 0, 1, 1]), &e, &semicircles(&e, 4).0).unwrap();
            assert_eq!(v, Some(int(1)));
        }
    }

    fn matrix(size: usize) -> impl Strategy<Value = EpsilonMatrix> {
        let pairs = size * (size - 1) / 2;
        (
            prop::collection::vec(any::<bool>(), pairs),
            prop::collection::vec(any::<bool>(), size),
        )
            .prop_map(move |(off, diag)| {
                let mut e = EpsilonMatrix::free(size);
                let mut it = off.into_iter();
                for a in 0..size {
                    for b in a + 1..size {
                        e.set(a, b, it.next().unwrap());
                    }
                }
                for (l, d) in diag.into_iter().enumerate() {
                    e = e.with_diagonal(l, d);
                }
                e
            })
    }

    fn rational() -> impl Strategy<Value = Scalar> {
        (-20i64..=20, 1i64..=20).prop_map(|(p, q)| ratio(p, q))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn normalization_terminates_admissibly(e in matrix(4), labels in prop::collection::vec(0usize..4, 0..9)) {
            let n = normalize_tuple(&IndexTuple::new(labels.clone()), &e).unwrap();
            prop_assert!(is_admissible_tuple(&n.tuple, &e));
            let mut all: Vec<usize> = n.groups.concat();
            all.sort();
            prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
            for (g, &l) in n.groups.iter().zip(n.tuple.iter()) {
                prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(g.iter().all(|&k| labels[k] == l));
            }
        }

        #[test]
        fn pruned_sum_matches_plain_sum(e in matrix(3), labels in prop::collection::vec(0usize..3, 0..7),
                                         data in prop::collection::vec(rational(), 18)) {
            let tables = TableSet::from_tables((0..3).map(|l| {
                let mut k = data[6 * l..6 * l + 6].to_vec();
                k[2] = Scalar::zero();
                CumulantTable::from_cumulants(l, CumulantKind::for_diagonal(e.diagonal(l)), k)
            }));
            let i = IndexTuple::new(labels);
            let plain: Scalar = enumerate_nc_epsilon(&i, &e).unwrap().iter()
                .map(|p| kappa_pi(p, &i, &tables, &e).unwrap()).sum();
            prop_assert_eq!(mixed_moment_cumulant(&i, &e, &tables).unwrap(), plain);
        }

        #[test]
        fn commuting_swaps_leave_moment_unchanged(e in matrix(3), labels in prop::collection::vec(0usize..3, 2..7),
                                                  data in prop::collection::vec(rational(), 18)) {
            let tables = TableSet::from_tables((0..3).map(|l| {
                CumulantTable::from_cumulants(l, CumulantKind::for_diagonal(e.diagonal(l)), data[6 * l..6 * l + 6].to_vec())
            }));
            let i = IndexTuple::new(labels.clone());
            let base = mixed_moment_cumulant(&i, &e, &tables).unwrap();
            for k in 0..labels.len() - 1 {
                if labels[k] != labels[k + 1] && e.get(labels[k], labels[k + 1]) {
                    let mut s = labels.clone();
                    s.swap(k, k + 1);
                    prop_assert_eq!(&mixed_moment_cumulant(&IndexTuple::new(s), &e, &tables).unwrap(), &base);
                }
            }
        }
    }
}
