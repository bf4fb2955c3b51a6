use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use epsfree::distribution::parse_distribution_specs;
use epsfree::{
    CumulantKind, CumulantTable, DistributionSpec, GraphSpec, LabelledGraph, MomentSequence,
    TableSet,
};

/// Reads a file, or stdin when the path is `-`.
pub fn read_source(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_graph(path: &Path) -> Result<LabelledGraph> {
    let text = read_source(path)?;
    let spec = GraphSpec::from_json(&text).with_context(|| format!("graph {}", path.display()))?;
    Ok(spec.build()?)
}

/// Per-label tables and raw moments. Labels without a distribution get no
/// table and an empty moment sequence; `required` lists the labels that must
/// be covered.
pub struct LabelData {
    pub tables: TableSet,
    pub moments: Vec<MomentSequence>,
}

pub fn load_distributions(
    path: &Path,
    graph: &LabelledGraph,
    required: &[usize],
    order: usize,
) -> Result<LabelData> {
    let text = read_source(path)?;
    let specs = parse_distribution_specs(&text)
        .with_context(|| format!("distributions {}", path.display()))?;
    resolve(&specs, graph, required, order)
}

fn spec_for<'a>(specs: &'a [DistributionSpec], name: &str) -> Result<Option<&'a DistributionSpec>> {
    let named: Vec<_> = specs
        .iter()
        .filter(|s| s.label.as_deref() == Some(name))
        .collect();
    let defaults: Vec<_> = specs.iter().filter(|s| s.label.is_none()).collect();
    if named.len() > 1 {
        bail!("label {name:?} has {} distributions", named.len());
    }
    if defaults.len() > 1 {
        bail!("more than one distribution without a label");
    }
    Ok(named.first().or(defaults.first()).copied())
}

pub fn resolve(
    specs: &[DistributionSpec],
    graph: &LabelledGraph,
    required: &[usize],
    order: usize,
) -> Result<LabelData> {
    for s in specs {
        if let Some(name) = &s.label {
            graph.label(name)?;
        }
    }
    let e = &graph.matrix;
    let mut tables = TableSet::new();
    let mut moments = Vec::with_capacity(graph.names.len());
    for (l, name) in graph.names.iter().enumerate() {
        let Some(spec) = spec_for(specs, name)? else {
            if required.contains(&l) {
                bail!("no distribution for label {name:?}");
            }
            moments.push(MomentSequence::default());
            continue;
        };
        let kind = CumulantKind::for_diagonal(e.diagonal(l));
        if let Some(k) = spec.kind {
            if k != kind {
                bail!(
                    "label {name:?}: distribution kind {} but the graph diagonal selects {}",
                    k.name(),
                    kind.name()
                );
            }
        }
        let d = spec
            .distribution()
            .with_context(|| format!("label {name:?}"))?;
        let available = d.max_order().map_or(order, |m| m.min(order));
        let m = d.moments(available)?;
        if m.max_order() > 0 {
            tables.insert(CumulantTable::from_moments(l, kind, &m)?);
        } else {
            tables.insert(CumulantTable::from_cumulants(l, kind, Vec::new()));
        }
        moments.push(m);
    }
    Ok(LabelData { tables, moments })
}
