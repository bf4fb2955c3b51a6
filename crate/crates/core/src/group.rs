//! Graph products of cyclic groups (right-angled Artin groups for `ℤ`),
//! their reduced words, Cartier–Foata normal forms and the canonical trace on
//! the group algebra.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::epsilon::EpsilonMatrix;
use crate::error::{Error, Result};
use crate::partition::IndexTuple;
use crate::scalar::{int, one, Scalar};
use crate::DEFAULT_GROUP_WORD_CAP;

/// Sequence of syllables `(label, exponent)`. Values produced by
/// [`GraphProduct`] are reduced and in normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupWord {
    syllables: Vec<(usize, i64)>,
}

impl GroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Raw, unreduced syllables.
    pub fn from_syllables(syllables: Vec<(usize, i64)>) -> Self {
        GroupWord { syllables }
    }

    pub fn generator(label: usize, exponent: i64) -> Self {
        GroupWord {
            syllables: vec![(label, exponent)],
        }
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }
}

/// The vertex group placed at every label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexGroup {
    Integers,
    /// `ℤ/m`, exponents kept in `1..m`.
    Cyclic(u32),
}

impl VertexGroup {
    fn normalize(self, x: i64) -> i64 {
        match self {
            VertexGroup::Integers => x,
            VertexGroup::Cyclic(m) => x.rem_euclid(m as i64),
        }
    }
}

/// How each position of a generator moment contributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExponentPattern {
    /// `u_{i(k)} + u_{i(k)}⁻¹` at every position.
    SelfAdjointSum,
    /// `u_{i(k)}^{e_k}` with the given exponents.
    Powers(Vec<i64>),
}

/// `⋆_ε G_i` with every `G_i` equal to the same cyclic group.
#[derive(Clone, Copy, Debug)]
pub struct GraphProduct<'a> {
    eps: &'a EpsilonMatrix,
    vertex: VertexGroup,
}

impl<'a> GraphProduct<'a> {
    /// Right-angled Artin group: copies of `ℤ`.
    pub fn raag(eps: &'a EpsilonMatrix) -> Self {
        GraphProduct {
            eps,
            vertex: VertexGroup::Integers,
        }
    }

    pub fn new(eps: &'a EpsilonMatrix, vertex: VertexGroup) -> Self {
        GraphProduct { eps, vertex }
    }

    /// Only off-diagonal entries matter here.
    fn commute(&self, a: usize, b: usize) -> bool {
        a != b && self.eps.get(a, b)
    }

    /// Appends one syllable to a reduced word, keeping it reduced: it merges
    /// with the last syllable of the same label if everything after that
    /// syllable commutes with it.
    fn push(&self, word: &mut Vec<(usize, i64)>, (label, exp): (usize, i64)) {
        let exp = self.vertex.normalize(exp);
        if exp == 0 {
            return;
        }
        for idx in (0..word.len()).rev() {
            let (b, y) = word[idx];
            if b == label {
                let merged = self.vertex.normalize(y + exp);
                if merged == 0 {
                    word.remove(idx);
                } else {
                    word[idx].1 = merged;
                }
                return;
            }
            if !self.commute(label, b) {
                break;
            }
        }
        word.push((label, exp));
    }

    /// Layered normal form: repeatedly peel off every syllable with no
    /// non-commuting syllable before it, sorted within the layer.
    fn normal_form(&self, mut rest: Vec<(usize, i64)>) -> GroupWord {
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut layer = Vec::new();
            let mut keep = Vec::new();
            for (j, &s) in rest.iter().enumerate() {
                let blocked = rest[..j].iter().any(|&(b, _)| !self.commute(b, s.0));
                if blocked {
                    keep.push(s);
                } else {
                    layer.push(s);
                }
            }
            layer.sort();
            out.extend(layer);
            rest = keep;
        }
        GroupWord { syllables: out }
    }

    pub fn check(&self, w: &GroupWord) -> Result<()> {
        match w.syllables.iter().find(|s| s.0 >= self.eps.size()) {
            Some(&(label, _)) => Err(Error::LabelOutOfRange {
                label,
                size: self.eps.size(),
            }),
            None => Ok(()),
        }
    }

    pub fn reduce(&self, w: &GroupWord) -> GroupWord {
        let mut acc = Vec::with_capacity(w.len());
        for &s in &w.syllables {
            self.push(&mut acc, s);
        }
        self.normal_form(acc)
    }

    pub fn multiply(&self, a: &GroupWord, b: &GroupWord) -> GroupWord {
        let mut acc = Vec::with_capacity(a.len() + b.len());
        for &s in a.syllables.iter().chain(&b.syllables) {
            self.push(&mut acc, s);
        }
        self.normal_form(acc)
    }

    pub fn inverse(&self, w: &GroupWord) -> GroupWord {
        let inv: Vec<_> = w.syllables.iter().rev().map(|&(l, x)| (l, -x)).collect();
        self.reduce(&GroupWord { syllables: inv })
    }

    pub fn is_identity(&self, w: &GroupWord) -> bool {
        let mut acc = Vec::with_capacity(w.len());
        for &s in &w.syllables {
            self.push(&mut acc, s);
        }
        acc.is_empty()
    }

    pub fn mixed_moment(&self, i: &IndexTuple, pattern: &ExponentPattern) -> Result<Scalar> {
        self.mixed_moment_capped(i, pattern, DEFAULT_GROUP_WORD_CAP)
    }

    /// `τ(Π_k g_k)` where `g_k` is given by `pattern` at label `i(k)`.
    pub fn mixed_moment_capped(
        &self,
        i: &IndexTuple,
        pattern: &ExponentPattern,
        cap: usize,
    ) -> Result<Scalar> {
        self.eps.check_tuple(i)?;
        if i.len() > cap {
            return Err(Error::LengthCap {
                what: "the group sign-pattern expansion",
                len: i.len(),
                cap,
            });
        }
        match pattern {
            ExponentPattern::Powers(exps) => {
                if exps.len() != i.len() {
                    return Err(Error::Dimension {
                        expected: i.len(),
                        found: exps.len(),
                    });
                }
                let w = GroupWord {
                    syllables: i.iter().copied().zip(exps.iter().copied()).collect(),
                };
                Ok(if self.is_identity(&w) {
                    one()
                } else {
                    Scalar::zero()
                })
            }
            ExponentPattern::SelfAdjointSum => Ok(int(self.count_trivial(i, 0, &[]) as i64)),
        }
    }

    /// Number of sign patterns from position `k` on that reduce `word` to
    /// the identity.
    fn count_trivial(&self, i: &[usize], k: usize, word: &[(usize, i64)]) -> u64 {
        if k == i.len() {
            return word.is_empty() as u64;
        }
        // the remaining letters cannot cancel a longer word
        if word.len() > i.len() - k {
            return 0;
        }
        let mut total = 0;
        for sign in [1, -1] {
            let mut next = word.to_vec();
            self.push(&mut next, (i[k], sign));
            total += self.count_trivial(i, k + 1, &next);
        }
        total
    }

    /// `u_l + u_l⁻¹` in the group algebra.
    pub fn self_adjoint_generator(&self, label: usize) -> GroupAlgebraElement {
        GroupAlgebraElement::from_word(GroupWord::generator(label, 1), one())
            + GroupAlgebraElement::from_word(GroupWord::generator(label, -1), one())
    }

    pub fn multiply_elements(
        &self,
        a: &GroupAlgebraElement,
        b: &GroupAlgebraElement,
    ) -> GroupAlgebraElement {
        let mut out = GroupAlgebraElement::zero();
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                out.add_term(self.multiply(wa, wb), ca * cb);
            }
        }
        out
    }
}

/// Product in the right-angled Artin group, reduced to normal form.
pub fn multiply_reduce(w1: &GroupWord, w2: &GroupWord, e: &EpsilonMatrix) -> GroupWord {
    GraphProduct::raag(e).multiply(w1, w2)
}

/// Trace of `Π_k g_k` for RAAG generators, see [`GraphProduct::mixed_moment`].
pub fn generator_mixed_moment(
    i: &IndexTuple,
    pattern: &ExponentPattern,
    e: &EpsilonMatrix,
) -> Result<Scalar> {
    GraphProduct::raag(e).mixed_moment(i, pattern)
}

/// Finitely supported combination of normal-form words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    terms: BTreeMap<GroupWord, Scalar>,
}

impl GroupAlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_word(GroupWord::identity(), one())
    }

    pub fn from_word(word: GroupWord, coeff: Scalar) -> Self {
        let mut x = Self::zero();
        x.add_term(word, coeff);
        x
    }

    pub fn add_term(&mut self, word: GroupWord, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupWord, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &GroupWord) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Coefficient of the neutral element.
    pub fn trace(&self) -> Scalar {
        self.coefficient(&GroupWord::identity())
    }
}

impl Add for GroupAlgebraElement {
    type Output = GroupAlgebraElement;

    fn add(mut self, rhs: GroupAlgebraElement) -> GroupAlgebraElement {
        for (w, c) in rhs.terms {
            self.add_term(w, c);
        }
        self
    }
}

impl Mul<&Scalar> for GroupAlgebraElement {
    type Output = GroupAlgebraElement;

    fn mul(self, rhs: &Scalar) -> GroupAlgebraElement {
        let mut out = GroupAlgebraElement::zero();
        for (w, c) in self.terms {
            out.add_term(w, c * rhs);
        }
        out
    }
}

pub fn trace(x: &GroupAlgebraElement) -> Scalar {
    x.trace()
}
