use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, Result};
use epsfree::crosscheck::{
    factorization, group_model, membership_equivalence, named_tables, oracle_equivalence,
    random_moments, tables_from_moments, vanishing, CheckOutcome, TupleDomain,
};
use epsfree::moments::{factorization_shortcut, mixed_moment_cumulant_capped, DefinitionEvaluator};
use epsfree::nc_epsilon::{blocks_cross, enumerate_nc_epsilon_capped, is_epsilon_noncrossing};
use epsfree::partition::{enumerate_noncrossing, enumerate_set_partitions};
use epsfree::scalar::{format_scalar, int};
use epsfree::{
    is_admissible_tuple, Distribution, EpsilonMatrix, IndexTuple, LabelledGraph, MomentSequence,
    SetPartition, DEFAULT_DEFINITION_CAP, DEFAULT_ENUMERATION_CAP,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::{load_distributions, load_graph};
use crate::Method;

pub struct Output {
    pub table: bool,
    pub cap: Option<usize>,
}

impl Output {
    fn emit<T: Serialize>(&self, value: &T, table: impl FnOnce() -> String) -> Result<()> {
        if self.table {
            print!("{}", table());
        } else {
            println!("{}", serde_json::to_string_pretty(value)?);
        }
        Ok(())
    }
}

fn names<'a>(graph: &'a LabelledGraph, i: &IndexTuple) -> Vec<&'a str> {
    i.iter().map(|&l| graph.names[l].as_str()).collect()
}

fn distinct(i: &IndexTuple) -> Vec<usize> {
    i.iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[derive(Serialize)]
struct PartitionEntry {
    blocks: SetPartition,
    crossings: usize,
}

#[derive(Serialize)]
struct IdentityCheck {
    name: &'static str,
    holds: bool,
}

#[derive(Serialize)]
struct EnumerateReport<'a> {
    tuple: Vec<&'a str>,
    admissible: bool,
    kernel: SetPartition,
    kernel_member: bool,
    regime: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    identity: Option<IdentityCheck>,
    count: usize,
    max_crossings: usize,
    partitions: Vec<PartitionEntry>,
}

fn crossings(p: &SetPartition) -> usize {
    let b = p.blocks();
    (0..b.len())
        .flat_map(|x| (x + 1..b.len()).map(move |y| (x, y)))
        .filter(|&(x, y)| blocks_cross(&b[x], &b[y]))
        .count()
}

/// `free`, `tensor` or `mixed` according to the off-diagonal entries among
/// the labels present; `single` for one label.
fn regime(e: &EpsilonMatrix, used: &[usize]) -> &'static str {
    let pairs: Vec<bool> = used
        .iter()
        .enumerate()
        .flat_map(|(k, &a)| used[k + 1..].iter().map(move |&b| e.get(a, b)))
        .collect();
    if pairs.is_empty() {
        "single"
    } else if pairs.iter().all(|&x| !x) {
        "free"
    } else if pairs.iter().all(|&x| x) {
        "tensor"
    } else {
        "mixed"
    }
}

/// The closed form `NC^ε[𝐢]` takes in the extreme regimes, built without the
/// crossing test: `{π ∈ NC(n) : π ≤ ker 𝐢}` when everything is free, and the
/// product over kernel blocks otherwise.
fn extreme_case(
    e: &EpsilonMatrix,
    i: &IndexTuple,
    regime: &str,
) -> Result<Option<(&'static str, BTreeSet<SetPartition>)>> {
    let ker = i.kernel();
    let used = distinct(i);
    let all_free_diag = used.iter().all(|&l| !e.diagonal(l));
    if regime == "free" && all_free_diag {
        let set = enumerate_noncrossing(i.len())?
            .into_iter()
            .filter(|p| p.refines(&ker).unwrap_or(false))
            .collect();
        return Ok(Some(("nc-zero", set)));
    }
    if regime != "tensor" && regime != "single" {
        return Ok(None);
    }
    let mut owners: Vec<Vec<usize>> = vec![vec![0; i.len()]];
    for (b, block) in ker.blocks().iter().enumerate() {
        let local = if e.diagonal(i[block[0]]) {
            enumerate_set_partitions(block.len())?
        } else {
            enumerate_noncrossing(block.len())?
        };
        owners = owners
            .into_iter()
            .flat_map(|o| {
                local.iter().map(move |q| {
                    let mut o = o.clone();
                    for (k, &x) in block.iter().enumerate() {
                        o[x] = b * i.len() + q.block_of(k);
                    }
                    o
                })
            })
            .collect();
    }
    let set = owners
        .iter()
        .map(|o| SetPartition::from_labels(o))
        .collect();
    Ok(Some(("nc-fact", set)))
}

pub fn enumerate(out: &Output, graph: &Path, tuple: &str) -> Result<bool> {
    let graph = load_graph(graph)?;
    let e = &graph.matrix;
    let i = graph.parse_tuple(tuple)?;
    let parts = enumerate_nc_epsilon_capped(&i, e, out.cap.unwrap_or(DEFAULT_ENUMERATION_CAP))?;
    let kernel = i.kernel();
    let kernel_member = is_epsilon_noncrossing(&kernel, &i, e)?;
    let regime = regime(e, &distinct(&i));
    let identity = extreme_case(e, &i, regime)?.map(|(name, want)| IdentityCheck {
        name,
        holds: parts.iter().cloned().collect::<BTreeSet<_>>() == want,
    });
    let ok = identity.as_ref().is_none_or(|c| c.holds);
    let partitions: Vec<PartitionEntry> = parts
        .into_iter()
        .map(|p| PartitionEntry {
            crossings: crossings(&p),
            blocks: p,
        })
        .collect();
    let report = EnumerateReport {
        tuple: names(&graph, &i),
        admissible: is_admissible_tuple(&i, e),
        kernel,
        kernel_member,
        regime,
        count: partitions.len(),
        max_crossings: partitions.iter().map(|p| p.crossings).max().unwrap_or(0),
        identity,
        partitions,
    };
    out.emit(&report, || {
        let mut s = String::new();
        for p in &report.partitions {
            s += &format!("{}\t{}\n", p.blocks, p.crossings);
        }
        s += &format!("count\t{}\n", report.count);
        s += &format!("kernel\t{}\t{}\n", report.kernel, report.kernel_member);
        s += &format!("regime\t{}\n", report.regime);
        if let Some(c) = &report.identity {
            s += &format!("identity\t{}\t{}\n", c.name, c.holds);
        }
        s
    })?;
    Ok(ok)
}

#[derive(Serialize)]
struct MomentReport<'a> {
    tuple: Vec<&'a str>,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cumulant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    definition: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agree: Option<bool>,
    factorizes: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    factorized: Option<String>,
}

pub fn moment(
    out: &Output,
    graph: &Path,
    tuple: &str,
    dist: &Path,
    method: Method,
) -> Result<bool> {
    let graph = load_graph(graph)?;
    let e = &graph.matrix;
    let i = graph.parse_tuple(tuple)?;
    e.check_tuple(&i)?;
    let data = load_distributions(dist, &graph, &distinct(&i), i.len().max(1))?;

    let cumulant = match method {
        Method::Definition => None,
        _ => Some(mixed_moment_cumulant_capped(
            &i,
            e,
            &data.tables,
            out.cap.unwrap_or(DEFAULT_ENUMERATION_CAP),
        )?),
    };
    let definition = match method {
        Method::Cumulant => None,
        _ => {
            let cap = out.cap.unwrap_or(DEFAULT_DEFINITION_CAP);
            Some(DefinitionEvaluator::with_cap(e, &data.moments, cap).evaluate(&i)?)
        }
    };
    let factorized = factorization_shortcut(&i, e, &data.tables)?;

    let mut values: Vec<_> = cumulant.iter().chain(&definition).collect();
    values.extend(&factorized);
    let ok = values.windows(2).all(|w| w[0] == w[1]);
    let report = MomentReport {
        tuple: names(&graph, &i),
        method: match method {
            Method::Cumulant => "cumulant",
            Method::Definition => "definition",
            Method::Both => "both",
        },
        agree: match (&cumulant, &definition) {
            (Some(a), Some(b)) => Some(a == b),
            _ => None,
        },
        cumulant: cumulant.as_ref().map(format_scalar),
        definition: definition.as_ref().map(format_scalar),
        factorizes: factorized.is_some(),
        factorized: factorized.as_ref().map(format_scalar),
    };
    out.emit(&report, || {
        let mut s = String::new();
        for (k, v) in [
            ("cumulant", &report.cumulant),
            ("definition", &report.definition),
            ("factorized", &report.factorized),
        ] {
            if let Some(v) = v {
                s += &format!("{k}\t{v}\n");
            }
        }
        if let Some(a) = report.agree {
            s += &format!("agree\t{a}\n");
        }
        s
    })?;
    Ok(ok)
}

#[derive(Serialize)]
struct CrosscheckReport<'a> {
    labels: &'a [String],
    max_n: usize,
    seed: u64,
    checks: Vec<CheckOutcome>,
    cases: u64,
    failed: u64,
    passed: bool,
}

fn renamed(mut c: CheckOutcome, name: &str) -> CheckOutcome {
    c.name = name.to_string();
    c
}

pub fn crosscheck(
    out: &Output,
    graph: &Path,
    max_n: usize,
    seed: u64,
    dist: Option<&Path>,
    corrupt: bool,
) -> Result<bool> {
    let graph = load_graph(graph)?;
    let e = &graph.matrix;
    let cap = out.cap.unwrap_or(DEFAULT_DEFINITION_CAP);
    if max_n > cap {
        bail!("--max-n {max_n} exceeds the length cap of {cap}");
    }
    let size = e.size();
    let domain = TupleDomain::new(size, max_n);
    let order = max_n.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = vec![membership_equivalence(e, domain)?];

    let (semi_tables, semi_moments) = named_tables(e, &Distribution::standard_semicircle(), order)?;
    checks.push(renamed(
        oracle_equivalence(e, domain, &semi_tables, &semi_moments)?,
        "oracle_equivalence/semicircle",
    ));

    let moments = random_moments(&mut rng, size, order, 20, false);
    let mut table_moments = moments.clone();
    if corrupt {
        if let Some(m) = table_moments.first_mut() {
            let mut v = m.as_slice().to_vec();
            v[0] += int(1);
            *m = MomentSequence::new(v);
        }
    }
    let tables = tables_from_moments(e, &table_moments)?;
    checks.push(renamed(
        oracle_equivalence(e, domain, &tables, &moments)?,
        "oracle_equivalence/random",
    ));

    if let Some(path) = dist {
        let all: Vec<usize> = (0..size).collect();
        let data = load_distributions(path, &graph, &all, order)?;
        checks.push(renamed(
            oracle_equivalence(e, domain, &data.tables, &data.moments)?,
            "oracle_equivalence/dist",
        ));
    }

    checks.push(group_model(e, domain)?);
    checks.push(factorization(e, domain, &tables)?);
    let centered = random_moments(&mut rng, size, order, 20, true);
    checks.push(vanishing(e, domain, &tables_from_moments(e, &centered)?)?);

    let report = CrosscheckReport {
        labels: &graph.names,
        max_n,
        seed,
        cases: checks.iter().map(|c| c.cases).sum(),
        failed: checks.iter().map(|c| c.failed).sum(),
        passed: checks.iter().all(|c| c.passed()),
        checks,
    };
    out.emit(&report, || {
        let mut s = String::new();
        for c in &report.checks {
            s += &format!("{}\t{}\t{}\n", c.name, c.cases, c.failed);
        }
        s += &format!("total\t{}\t{}\n", report.cases, report.failed);
        s
    })?;
    Ok(report.passed)
}
