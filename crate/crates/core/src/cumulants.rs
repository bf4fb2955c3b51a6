//! Moment/cumulant conversions (free and classical) and the block products
//! `κ_π` entering the mixed-moment formula.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::epsilon::EpsilonMatrix;
use crate::error::{Error, Result};
use crate::partition::{IndexTuple, SetPartition};
use crate::scalar::{binomial, one, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CumulantKind {
    /// Sum over non-crossing partitions; goes with `ε_ii = 0`.
    Free,
    /// Sum over all partitions; goes with `ε_ii = 1`.
    Classical,
}

impl CumulantKind {
    pub fn for_diagonal(classical: bool) -> Self {
        if classical {
            CumulantKind::Classical
        } else {
            CumulantKind::Free
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CumulantKind::Free => "free",
            CumulantKind::Classical => "classical",
        }
    }
}

/// Moments `m_1, …, m_N` of one variable; `m_0 = 1` is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MomentSequence(Vec<Scalar>);

impl MomentSequence {
    pub fn new(moments: Vec<Scalar>) -> Self {
        MomentSequence(moments)
    }

    pub fn max_order(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Scalar] {
        &self.0
    }

    /// `m_k`, or `None` beyond the stored order.
    pub fn get(&self, k: usize) -> Option<Scalar> {
        if k == 0 {
            Some(one())
        } else {
            self.0.get(k - 1).cloned()
        }
    }
}

/// `coeffs[s][d]` = `[z^d] M(z)^s` for `M(z) = Σ_j m_j z^j`, `m_0 = 1`.
fn moment_series_powers(m: &[Scalar], max_power: usize, max_degree: usize) -> Vec<Vec<Scalar>> {
    let get = |j: usize| if j == 0 { one() } else { m[j - 1].clone() };
    let mut coeffs = Vec::with_capacity(max_power + 1);
    let mut unit = vec![Scalar::zero(); max_degree + 1];
    unit[0] = one();
    coeffs.push(unit);
    for s in 1..=max_power {
        let prev: &Vec<Scalar> = &coeffs[s - 1];
        let next: Vec<Scalar> = (0..=max_degree)
            .map(|d| {
                let mut acc = Scalar::zero();
                for j in 0..=d {
                    if j > m.len() || prev[d - j].is_zero() {
                        continue;
                    }
                    acc += get(j) * &prev[d - j];
                }
                acc
            })
            .collect();
        coeffs.push(next);
    }
    coeffs
}

/// Free cumulants from moments by peeling off the block containing 1:
/// `m_n = Σ_s κ_s Σ_{i_1+…+i_s = n-s} m_{i_1}⋯m_{i_s}`.
pub fn moments_to_free_cumulants(moments: &[Scalar]) -> Result<Vec<Scalar>> {
    if moments.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = moments.len();
    let powers = moment_series_powers(&moments[..n - 1], n, n);
    let mut kappa: Vec<Scalar> = Vec::with_capacity(n);
    for order in 1..=n {
        let mut k = moments[order - 1].clone();
        for s in 1..order {
            k -= &kappa[s - 1] * &powers[s][order - s];
        }
        kappa.push(k);
    }
    Ok(kappa)
}

pub fn free_cumulants_to_moments(cumulants: &[Scalar]) -> Vec<Scalar> {
    let n = cumulants.len();
    let mut moments: Vec<Scalar> = Vec::with_capacity(n);
    for order in 1..=n {
        // [z^(order-s)] M^s only involves m_1 … m_{order-1}
        let powers = moment_series_powers(&moments, order, order);
        let mut m = cumulants[order - 1].clone();
        for s in 1..order {
            m += &cumulants[s - 1] * &powers[s][order - s];
        }
        moments.push(m);
    }
    moments
}

/// Classical cumulants: `m_n = Σ_s C(n-1, s-1) κ_s m_{n-s}`.
pub fn moments_to_classical_cumulants(moments: &[Scalar]) -> Result<Vec<Scalar>> {
    if moments.is_empty() {
        return Err(Error::EmptyInput);
    }
    let m = |j: usize| {
        if j == 0 {
            one()
        } else {
            moments[j - 1].clone()
        }
    };
    let mut kappa: Vec<Scalar> = Vec::with_capacity(moments.len());
    for n in 1..=moments.len() {
        let mut k = m(n);
        for s in 1..n {
            let c = Scalar::from_integer(binomial((n - 1) as u64, (s - 1) as u64));
            k -= c * &kappa[s - 1] * m(n - s);
        }
        kappa.push(k);
    }
    Ok(kappa)
}

pub fn classical_cumulants_to_moments(cumulants: &[Scalar]) -> Vec<Scalar> {
    let mut moments: Vec<Scalar> = Vec::with_capacity(cumulants.len());
    for n in 1..=cumulants.len() {
        let mut acc = Scalar::zero();
        for s in 1..=n {
            let prev = if n == s {
                one()
            } else {
                moments[n - s - 1].clone()
            };
            let c = Scalar::from_integer(binomial((n - 1) as u64, (s - 1) as u64));
            acc += c * &cumulants[s - 1] * prev;
        }
        moments.push(acc);
    }
    moments
}

pub fn moments_to_cumulants(kind: CumulantKind, moments: &[Scalar]) -> Result<Vec<Scalar>> {
    match kind {
        CumulantKind::Free => moments_to_free_cumulants(moments),
        CumulantKind::Classical => moments_to_classical_cumulants(moments),
    }
}

pub fn cumulants_to_moments(kind: CumulantKind, cumulants: &[Scalar]) -> Vec<Scalar> {
    match kind {
        CumulantKind::Free => free_cumulants_to_moments(cumulants),
        CumulantKind::Classical => classical_cumulants_to_moments(cumulants),
    }
}

/// Cumulant sequence `κ_1 … κ_N` of the distinguished variable of one label,
/// with the matching moments cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulantTable {
    pub label: usize,
    pub kind: CumulantKind,
    cumulants: Vec<Scalar>,
    moments: Vec<Scalar>,
}

impl CumulantTable {
    pub fn from_moments(
        label: usize,
        kind: CumulantKind,
        moments: &MomentSequence,
    ) -> Result<Self> {
        let cumulants = moments_to_cumulants(kind, moments.as_slice())?;
        Ok(CumulantTable {
            label,
            kind,
            cumulants,
            moments: moments.as_slice().to_vec(),
        })
    }

    pub fn from_cumulants(label: usize, kind: CumulantKind, cumulants: Vec<Scalar>) -> Self {
        let moments = cumulants_to_moments(kind, &cumulants);
        CumulantTable {
            label,
            kind,
            cumulants,
            moments,
        }
    }

    pub fn max_order(&self) -> usize {
        self.cumulants.len()
    }

    pub fn cumulants(&self) -> &[Scalar] {
        &self.cumulants
    }

    pub fn moments(&self) -> MomentSequence {
        MomentSequence(self.moments.clone())
    }

    pub fn cumulant(&self, order: usize) -> Result<&Scalar> {
        if order == 0 || order > self.cumulants.len() {
            return Err(Error::OrderOverflow {
                label: self.label,
                order,
                max: self.cumulants.len(),
            });
        }
        Ok(&self.cumulants[order - 1])
    }

    pub fn moment(&self, order: usize) -> Result<Scalar> {
        if order > self.moments.len() {
            return Err(Error::OrderOverflow {
                label: self.label,
                order,
                max: self.moments.len(),
            });
        }
        Ok(if order == 0 {
            one()
        } else {
            self.moments[order - 1].clone()
        })
    }

    pub fn is_centered(&self) -> bool {
        self.cumulants.first().is_none_or(Zero::is_zero)
    }
}

/// Per-label cumulant tables, indexed by dense label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableSet {
    tables: Vec<Option<CumulantTable>>,
}

impl TableSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tables(tables: impl IntoIterator<Item = CumulantTable>) -> Self {
        let mut set = Self::new();
        for t in tables {
            set.insert(t);
        }
        set
    }

    pub fn insert(&mut self, table: CumulantTable) {
        let l = table.label;
        if self.tables.len() <= l {
            self.tables.resize(l + 1, None);
        }
        self.tables[l] = Some(table);
    }

    pub fn get(&self, label: usize) -> Result<&CumulantTable> {
        self.tables
            .get(label)
            .and_then(Option::as_ref)
            .ok_or(Error::MissingTable(label))
    }

    /// Table for `label`, checked against that label's diagonal convention.
    pub fn get_for(&self, label: usize, e: &EpsilonMatrix) -> Result<&CumulantTable> {
        let table = self.get(label)?;
        let diag = e.diagonal(label);
        if table.kind != CumulantKind::for_diagonal(diag) {
            return Err(Error::KindMismatch {
                label,
                table: table.kind.name(),
                diagonal: diag as u8,
            });
        }
        Ok(table)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CumulantTable> {
        self.tables.iter().flatten()
    }
}

/// `κ_π(a_1, …, a_n) = Π_{V ∈ π} κ_{|V|}` with each block's cumulant taken
/// from the table of its label.
pub fn kappa_pi(
    p: &SetPartition,
    i: &IndexTuple,
    tables: &TableSet,
    e: &EpsilonMatrix,
) -> Result<Scalar> {
    if p.n() != i.len() {
        return Err(Error::Dimension {
            expected: i.len(),
            found: p.n(),
        });
    }
    e.check_tuple(i)?;
    if !p.refines(&i.kernel())? {
        return Err(Error::Domain(format!(
            "{p} is not below the kernel of the tuple"
        )));
    }
    let factors = p
        .blocks()
        .iter()
        .map(|block| tables.get_for(i[block[0]], e)?.cumulant(block.len()))
        .collect::<Result<Vec<_>>>()?;
    if factors.iter().any(|k| k.is_zero()) {
        return Ok(Scalar::zero());
    }
    Ok(factors.into_iter().product())
}
