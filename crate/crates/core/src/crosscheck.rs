//! Exhaustive cross-validation suites shared by the command line and the
//! acceptance tests. Each suite walks every tuple of a [`TupleDomain`] and
//! compares two independent evaluations.

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::cumulants::{CumulantKind, CumulantTable, MomentSequence, TableSet};
use crate::distribution::Distribution;
use crate::epsilon::{is_admissible_tuple, EpsilonMatrix};
use crate::error::Result;
use crate::group::{ExponentPattern, GraphProduct};
use crate::moments::{factorization_shortcut, mixed_moment_cumulant, DefinitionEvaluator};
use crate::nc_epsilon::{is_epsilon_noncrossing, partitions_below_kernel, ReductionSearch};
use crate::partition::IndexTuple;
use crate::scalar::{format_scalar, ratio, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: u64,
    pub failed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        CheckOutcome {
            name: name.to_string(),
            cases: 0,
            failed: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    /// Folds another run of the same check into this one.
    pub fn absorb(&mut self, other: CheckOutcome) {
        self.cases += other.cases;
        self.failed += other.failed;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }
}

/// All tuples over `labels` labels of length `min_len..=max_len` using at
/// most `max_distinct` distinct labels.
#[derive(Clone, Copy, Debug)]
pub struct TupleDomain {
    pub labels: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub max_distinct: usize,
}

impl TupleDomain {
    pub fn new(labels: usize, max_len: usize) -> Self {
        TupleDomain {
            labels,
            min_len: 0,
            max_len,
            max_distinct: labels,
        }
    }

    pub fn with_max_distinct(mut self, k: usize) -> Self {
        self.max_distinct = k;
        self
    }

    pub fn with_min_len(mut self, n: usize) -> Self {
        self.min_len = n;
        self
    }

    pub fn for_each(&self, mut f: impl FnMut(&[usize])) {
        if self.labels == 0 {
            if self.min_len == 0 {
                f(&[]);
            }
            return;
        }
        for n in self.min_len..=self.max_len {
            let mut t = vec![0usize; n];
            'next: loop {
                if distinct(&t) <= self.max_distinct {
                    f(&t);
                }
                let mut k = n;
                loop {
                    if k == 0 {
                        break 'next;
                    }
                    k -= 1;
                    t[k] += 1;
                    if t[k] < self.labels {
                        continue 'next;
                    }
                    t[k] = 0;
                }
            }
        }
    }
}

fn distinct(t: &[usize]) -> usize {
    let mut seen = 0u64;
    for &x in t {
        seen |= 1 << (x % 64);
    }
    seen.count_ones() as usize
}

fn show(i: &[usize]) -> String {
    format!("{i:?}")
}

/// Reduction search against the pairwise crossing test for every
/// `π ≤ ker 𝐢`.
pub fn membership_equivalence(e: &EpsilonMatrix, domain: TupleDomain) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("membership_equivalence");
    let mut search = ReductionSearch::new(e);
    let mut err = None;
    domain.for_each(|t| {
        if err.is_some() {
            return;
        }
        let i = IndexTuple::from(t);
        for p in partitions_below_kernel(&i) {
            let (a, b) = match (
                search.is_reducible(&p, &i),
                is_epsilon_noncrossing(&p, &i, e),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(x), _) | (_, Err(x)) => {
                    err = Some(x);
                    return;
                }
            };
            out.record(a == b, || {
                format!(
                    "tuple {} partition {p}: reduction {a}, pairwise {b}",
                    show(t)
                )
            });
        }
    });
    err.map_or(Ok(out), Err)
}

/// Cumulant formula against the centering recursion.
pub fn oracle_equivalence(
    e: &EpsilonMatrix,
    domain: TupleDomain,
    tables: &TableSet,
    moments: &[MomentSequence],
) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("oracle_equivalence");
    let mut eval = DefinitionEvaluator::with_cap(e, moments, domain.max_len.max(1));
    let mut err = None;
    domain.for_each(|t| {
        if err.is_some() {
            return;
        }
        let i = IndexTuple::from(t);
        match (mixed_moment_cumulant(&i, e, tables), eval.evaluate(&i)) {
            (Ok(a), Ok(b)) => out.record(a == b, || {
                format!(
                    "tuple {}: cumulant {}, definition {}",
                    show(t),
                    format_scalar(&a),
                    format_scalar(&b)
                )
            }),
            (Err(x), _) | (_, Err(x)) => err = Some(x),
        }
    });
    err.map_or(Ok(out), Err)
}

/// Traces of products of `u + u⁻¹` in the right-angled Artin group against
/// the cumulant formula with arcsine tables.
pub fn group_model(e: &EpsilonMatrix, domain: TupleDomain) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("group_model");
    let (tables, _) = named_tables(e, &Distribution::standard_arcsine(), domain.max_len.max(1))?;
    let group = GraphProduct::raag(e);
    let mut err = None;
    domain.for_each(|t| {
        if err.is_some() {
            return;
        }
        let i = IndexTuple::from(t);
        let g =
            group.mixed_moment_capped(&i, &ExponentPattern::SelfAdjointSum, domain.max_len.max(1));
        match (g, mixed_moment_cumulant(&i, e, &tables)) {
            (Ok(a), Ok(b)) => out.record(a == b, || {
                format!(
                    "tuple {}: group trace {}, cumulant {}",
                    show(t),
                    format_scalar(&a),
                    format_scalar(&b)
                )
            }),
            (Err(x), _) | (_, Err(x)) => err = Some(x),
        }
    });
    err.map_or(Ok(out), Err)
}

/// Wherever `ker 𝐢 ∈ NC^ε[𝐢]`, the product of block moments equals the
/// cumulant sum. `cases` counts the tuples where the shortcut applied.
pub fn factorization(
    e: &EpsilonMatrix,
    domain: TupleDomain,
    tables: &TableSet,
) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("factorization");
    let mut err = None;
    domain.for_each(|t| {
        if err.is_some() {
            return;
        }
        let i = IndexTuple::from(t);
        match factorization_shortcut(&i, e, tables) {
            Ok(None) => {}
            Ok(Some(f)) => match mixed_moment_cumulant(&i, e, tables) {
                Ok(m) => out.record(f == m, || {
                    format!(
                        "tuple {}: factorized {}, cumulant {}",
                        show(t),
                        format_scalar(&f),
                        format_scalar(&m)
                    )
                }),
                Err(x) => err = Some(x),
            },
            Err(x) => err = Some(x),
        }
    });
    err.map_or(Ok(out), Err)
}

/// With centered tables, every admissible tuple has vanishing moment.
/// `cases` counts admissible tuples.
pub fn vanishing(
    e: &EpsilonMatrix,
    domain: TupleDomain,
    tables: &TableSet,
) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("vanishing");
    let mut err = None;
    domain.for_each(|t| {
        if err.is_some() || t.is_empty() {
            return;
        }
        let i = IndexTuple::from(t);
        if !is_admissible_tuple(&i, e) {
            return;
        }
        match mixed_moment_cumulant(&i, e, tables) {
            Ok(m) => out.record(m.is_zero(), || {
                format!("tuple {}: moment {}", show(t), format_scalar(&m))
            }),
            Err(x) => err = Some(x),
        }
    });
    err.map_or(Ok(out), Err)
}

/// Tables of one named law for every label, kinds following the diagonal.
pub fn named_tables(
    e: &EpsilonMatrix,
    d: &Distribution,
    order: usize,
) -> Result<(TableSet, Vec<MomentSequence>)> {
    let m = d.moments(order)?;
    let moments = vec![m; e.size()];
    let tables = tables_from_moments(e, &moments)?;
    Ok((tables, moments))
}

pub fn tables_from_moments(e: &EpsilonMatrix, moments: &[MomentSequence]) -> Result<TableSet> {
    moments
        .iter()
        .enumerate()
        .map(|(l, m)| CumulantTable::from_moments(l, CumulantKind::for_diagonal(e.diagonal(l)), m))
        .collect::<Result<Vec<_>>>()
        .map(TableSet::from_tables)
}

pub fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> Scalar {
    ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

/// Random moment data per label; `centered` forces `m_1 = 0`.
pub fn random_moments<R: Rng>(
    rng: &mut R,
    labels: usize,
    order: usize,
    bound: i64,
    centered: bool,
) -> Vec<MomentSequence> {
    (0..labels)
        .map(|_| {
            let mut m: Vec<Scalar> = (0..order).map(|_| random_rational(rng, bound)).collect();
            if centered && !m.is_empty() {
                m[0] = Scalar::zero();
            }
            MomentSequence::new(m)
        })
        .collect()
}

/// Uniformly random off-diagonal pattern; diagonal entries random too when
/// `random_diagonal` is set.
pub fn random_epsilon<R: Rng>(rng: &mut R, size: usize, random_diagonal: bool) -> EpsilonMatrix {
    let mut e = EpsilonMatrix::free(size);
    for a in 0..size {
        for b in a + 1..size {
            e.set(a, b, rng.gen_bool(0.5));
        }
        if random_diagonal {
            e = e.with_diagonal(a, rng.gen_bool(0.5));
        }
    }
    e
}

/// Every ε on `size` labels with zero diagonal, in mask order.
pub fn all_epsilon(size: usize) -> Vec<EpsilonMatrix> {
    let pairs: Vec<(usize, usize)> = (0..size)
        .flat_map(|a| (a + 1..size).map(move |b| (a, b)))
        .collect();
    (0..1u64 << pairs.len())
        .map(|mask| {
            let mut e = EpsilonMatrix::free(size);
            for (k, &(a, b)) in pairs.iter().enumerate() {
                e.set(a, b, mask >> k & 1 == 1);
            }
            e
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn domain_counts() {
        let mut n = 0;
        TupleDomain::new(3, 3).for_each(|_| n += 1);
        assert_eq!(n, 1 + 3 + 9 + 27);
        let mut m = 0;
        TupleDomain::new(5, 5)
            .with_min_len(5)
            .with_max_distinct(4)
            .for_each(|_| m += 1);
        // 5^5 minus the 5! surjective tuples
        assert_eq!(m, 3125 - 120);
        let mut z = 0;
        TupleDomain::new(0, 3).for_each(|t| {
            assert!(t.is_empty());
            z += 1
        });
        assert_eq!(z, 1);
    }

    #[test]
    fn suites_pass_on_small_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for e in all_epsilon(3) {
            let d = TupleDomain::new(3, 4);
            assert!(membership_equivalence(&e, d).unwrap().passed());
            let m = random_moments(&mut rng, 3, 4, 20, false);
            let tables = tables_from_moments(&e, &m).unwrap();
            assert!(oracle_equivalence(&e, d, &tables, &m).unwrap().passed());
            assert!(factorization(&e, d, &tables).unwrap().passed());
            assert!(group_model(&e, d).unwrap().passed());
            let c = random_moments(&mut rng, 3, 4, 20, true);
            assert!(vanishing(&e, d, &tables_from_moments(&e, &c).unwrap())
                .unwrap()
                .passed());
        }
    }

    #[test]
    fn corrupted_table_is_detected() {
        let e = EpsilonMatrix::free(2);
        let (tables, moments) = named_tables(&e, &Distribution::standard_semicircle(), 4).unwrap();
        let mut k = tables.get(1).unwrap().cumulants().to_vec();
        k[1] += Scalar::from_integer(1.into());
        let mut bad = tables.clone();
        bad.insert(CumulantTable::from_cumulants(1, CumulantKind::Free, k));
        let out = oracle_equivalence(&e, TupleDomain::new(2, 4), &bad, &moments).unwrap();
        assert!(!out.passed());
        assert!(out.first_failure.is_some());
    }
}
