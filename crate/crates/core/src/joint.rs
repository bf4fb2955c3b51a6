//! Multivariate free cumulants inside one algebra, computed from a joint
//! moment oracle, and the identity expressing a cumulant whose first argument
//! is a product `b_1 b̃_1`.

use std::collections::HashMap;

use num_traits::Zero;
use rand::Rng;

use crate::cumulants::MomentSequence;
use crate::error::{Error, Result};
use crate::partition::{enumerate_noncrossing, SetPartition};
use crate::scalar::{one, ratio, Scalar};

/// Joint moments `φ(b_{w_1} ⋯ b_{w_m})` of finitely many variables.
pub trait JointMomentOracle {
    /// Longest word the oracle can evaluate.
    fn max_length(&self) -> usize;

    fn moment(&self, word: &[usize]) -> Result<Scalar>;
}

/// Moments stored explicitly for every word up to a length bound.
#[derive(Clone, Debug)]
pub struct WordMoments {
    vars: usize,
    max_len: usize,
    values: HashMap<Vec<usize>, Scalar>,
}

impl WordMoments {
    /// Independent random rationals `p/q`, `|p| ≤ bound`, `1 ≤ q ≤ bound`,
    /// for every non-empty word.
    pub fn random<R: Rng>(vars: usize, max_len: usize, bound: i64, rng: &mut R) -> Self {
        let mut values = HashMap::new();
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * vars);
            for w in &layer {
                for v in 0..vars {
                    let mut w2 = w.clone();
                    w2.push(v);
                    values.insert(
                        w2.clone(),
                        ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound)),
                    );
                    next.push(w2);
                }
            }
            layer = next;
        }
        WordMoments {
            vars,
            max_len,
            values,
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }
}

impl JointMomentOracle for WordMoments {
    fn max_length(&self) -> usize {
        self.max_len
    }

    fn moment(&self, word: &[usize]) -> Result<Scalar> {
        if word.is_empty() {
            return Ok(one());
        }
        if word.len() > self.max_len {
            return Err(Error::OracleOrder {
                needed: word.len(),
                available: self.max_len,
            });
        }
        self.values
            .get(word)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("variable out of range in {word:?}")))
    }
}

/// A single variable `x` with the given moments; every letter means `x`.
pub struct SingleVariable(pub MomentSequence);

impl JointMomentOracle for SingleVariable {
    fn max_length(&self) -> usize {
        self.0.max_order()
    }

    fn moment(&self, word: &[usize]) -> Result<Scalar> {
        self.0.get(word.len()).ok_or(Error::OracleOrder {
            needed: word.len(),
            available: self.0.max_order(),
        })
    }
}

/// Variable `0` is the unit; variable `k + 1` is the inner oracle's `k`.
pub struct WithUnit<O>(pub O);

impl<O: JointMomentOracle> JointMomentOracle for WithUnit<O> {
    fn max_length(&self) -> usize {
        self.0.max_length()
    }

    fn moment(&self, word: &[usize]) -> Result<Scalar> {
        let inner: Vec<usize> = word.iter().filter(|&&v| v != 0).map(|&v| v - 1).collect();
        self.0.moment(&inner)
    }
}

/// Multivariate free cumulants `κ_n(w_1, …, w_n)` whose arguments are words
/// (products of variables), via `κ_n = φ(w_1⋯w_n) − Σ_{π ≠ 1_n} κ_π`.
pub struct JointCumulants<'a, O: ?Sized> {
    oracle: &'a O,
    memo: HashMap<Vec<Vec<usize>>, Scalar>,
    lattices: HashMap<usize, Vec<SetPartition>>,
}

impl<'a, O: JointMomentOracle + ?Sized> JointCumulants<'a, O> {
    pub fn new(oracle: &'a O) -> Self {
        JointCumulants {
            oracle,
            memo: HashMap::new(),
            lattices: HashMap::new(),
        }
    }

    pub fn cumulant(&mut self, args: &[Vec<usize>]) -> Result<Scalar> {
        let total: usize = args.iter().map(Vec::len).sum();
        if total > self.oracle.max_length() {
            return Err(Error::OracleOrder {
                needed: total,
                available: self.oracle.max_length(),
            });
        }
        self.cumulant_inner(args)
    }

    fn cumulant_inner(&mut self, args: &[Vec<usize>]) -> Result<Scalar> {
        if let Some(v) = self.memo.get(args) {
            return Ok(v.clone());
        }
        let n = args.len();
        if n == 0 {
            return Ok(one());
        }
        let concat: Vec<usize> = args.concat();
        let mut value = self.oracle.moment(&concat)?;
        if n > 1 {
            if let std::collections::hash_map::Entry::Vacant(slot) = self.lattices.entry(n) {
                slot.insert(enumerate_noncrossing(n)?);
            }
            let lattice = self.lattices[&n].clone();
            for p in lattice.iter().filter(|p| p.num_blocks() > 1) {
                let mut prod = one();
                for block in p.blocks() {
                    let sub: Vec<Vec<usize>> = block.iter().map(|&k| args[k].clone()).collect();
                    prod *= self.cumulant_inner(&sub)?;
                    if prod.is_zero() {
                        break;
                    }
                }
                value -= prod;
            }
        }
        self.memo.insert(args.to_vec(), value.clone());
        Ok(value)
    }
}

/// Both sides of
/// `κ_{p+1}(b_1 b̃_1, b_{r(1)}, …, b_{r(p)}) = κ_{p+2}(b_1, b̃_1, b_{r(1)}, …)
///   + Σ_{q=0}^{p} κ_{p-q+1}(b_1, b_{r(q+1)}, …, b_{r(p)}) κ_{q+1}(b̃_1, b_{r(1)}, …, b_{r(q)})`.
///
/// `positions` names the variables `[b_1, b̃_1, b_{r(1)}, …, b_{r(p)}]`.
pub fn product_as_arguments_sides<O: JointMomentOracle + ?Sized>(
    p: usize,
    oracle: &O,
    positions: &[usize],
) -> Result<(Scalar, Scalar)> {
    if positions.len() != p + 2 {
        return Err(Error::Dimension {
            expected: p + 2,
            found: positions.len(),
        });
    }
    if p + 2 > oracle.max_length() {
        return Err(Error::OracleOrder {
            needed: p + 2,
            available: oracle.max_length(),
        });
    }
    let (b1, bt, rest) = (positions[0], positions[1], &positions[2..]);
    let single = |v: usize| vec![v];
    let mut kc = JointCumulants::new(oracle);

    let mut lhs_args = vec![vec![b1, bt]];
    lhs_args.extend(rest.iter().copied().map(single));
    let lhs = kc.cumulant(&lhs_args)?;

    let mut full = vec![single(b1), single(bt)];
    full.extend(rest.iter().copied().map(single));
    let mut rhs = kc.cumulant(&full)?;
    for q in 0..=p {
        let mut first = vec![single(b1)];
        first.extend(rest[q..].iter().copied().map(single));
        let mut second = vec![single(bt)];
        second.extend(rest[..q].iter().copied().map(single));
        rhs += kc.cumulant(&first)? * kc.cumulant(&second)?;
    }
    Ok((lhs, rhs))
}

/// Whether the product-argument identity holds for the given oracle.
pub fn product_as_arguments_check<O: JointMomentOracle + ?Sized>(
    p: usize,
    oracle: &O,
    positions: &[usize],
) -> Result<bool> {
    let (lhs, rhs) = product_as_arguments_sides(p, oracle, positions)?;
    Ok(lhs == rhs)
}
