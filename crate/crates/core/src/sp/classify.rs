//! Dispatch classification over the tractable special cases.

use crate::graph::{reach_backward, reach_forward, spanned_mask, topo_order, VertexSet};
use crate::instance::{reverse_instance, Instance, VertexId};
use crate::sp::are_parallel;
use crate::sp::labels::{label_tree_on, labels_on};
use crate::sp::pearl::pearl_order;
use crate::sp::tree::{build_sp_tree, build_sp_tree_masked};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceClass {
    Pearl,
    UniqueSourceUniqueSink {
        source: VertexId,
        sink: VertexId,
    },
    UniqueSourceParallelSinks {
        source: VertexId,
        sinks: Vec<VertexId>,
    },
    ParallelSourcesUniqueSink {
        sources: Vec<VertexId>,
        sink: VertexId,
    },
    ParallelSourcesParallelSinksConnected(ParallelSplit),
    General {
        reason: String,
    },
}

impl InstanceClass {
    pub fn tag(&self) -> &'static str {
        match self {
            InstanceClass::Pearl => "pearl",
            InstanceClass::UniqueSourceUniqueSink { .. } => "unique-source-unique-sink",
            InstanceClass::UniqueSourceParallelSinks { .. } => "unique-source-parallel-sinks",
            InstanceClass::ParallelSourcesUniqueSink { .. } => "parallel-sources-unique-sink",
            InstanceClass::ParallelSourcesParallelSinksConnected(_) => {
                "parallel-sources-parallel-sinks"
            }
            InstanceClass::General { .. } => "general",
        }
    }
}

/// Evidence for the parallel-sources/parallel-sinks split: `first` is the
/// earliest vertex reachable from every source, `last` the latest vertex
/// reaching every sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelSplit {
    pub sources: Vec<VertexId>,
    pub sinks: Vec<VertexId>,
    pub first: VertexId,
    pub last: VertexId,
}

fn disjoint_terminals(instance: &Instance) -> Result<(Vec<VertexId>, Vec<VertexId>), String> {
    let sources = instance.sources();
    let sinks = instance.sinks();
    if sources.is_empty() || sinks.is_empty() {
        return Err("no supply or no demand in any scenario".into());
    }
    if let Some(v) = sources.iter().find(|v| sinks.contains(v)) {
        return Err(format!(
            "vertex {} is both a source and a sink",
            instance.vertex_name(*v)
        ));
    }
    Ok((sources, sinks))
}

/// Unique source `s`, unique sink `t`, and the subgraph spanned by them is SP.
pub fn check_unique_source_sink(instance: &Instance) -> Result<(VertexId, VertexId), String> {
    let (sources, sinks) = disjoint_terminals(instance)?;
    if sources.len() != 1 || sinks.len() != 1 {
        return Err("source or sink is not unique".into());
    }
    let (s, t) = (sources[0], sinks[0]);
    let mask = spanned_mask(instance, s, t, None);
    if !mask[s] {
        return Err("sink is not reachable from the source".into());
    }
    let tree =
        build_sp_tree_masked(instance, &mask).map_err(|e| format!("spanned subgraph: {e}"))?;
    if tree.origin() != s || tree.target() != t {
        return Err("spanned subgraph has unexpected terminals".into());
    }
    Ok((s, t))
}

/// Unique source `s` whose reachable subgraph is SP with origin `s` and
/// contains pairwise parallel sinks. Returns the reachable vertex set.
pub fn check_unique_source_parallel_sinks(
    instance: &Instance,
) -> Result<(VertexId, Vec<VertexId>, VertexSet), String> {
    let (sources, sinks) = disjoint_terminals(instance)?;
    if sources.len() != 1 {
        return Err("source is not unique".into());
    }
    let s = sources[0];
    let mask = reach_forward(instance, &[s], None);
    if let Some(t) = sinks.iter().find(|&&t| !mask[t]) {
        return Err(format!(
            "sink {} is not reachable from the source",
            instance.vertex_name(*t)
        ));
    }
    if !are_parallel(instance, &sinks) {
        return Err("sinks are not parallel".into());
    }
    let tree =
        build_sp_tree_masked(instance, &mask).map_err(|e| format!("reachable subgraph: {e}"))?;
    if tree.origin() != s {
        return Err("source is not the origin of its reachable subgraph".into());
    }
    let labels = labels_on(instance, &mask, &sinks);
    label_tree_on(instance, &mask, s, &labels).map_err(|e| e.to_string())?;
    Ok((s, sinks, mask))
}

/// Mirror image of [`check_unique_source_parallel_sinks`].
pub fn check_parallel_sources_unique_sink(
    instance: &Instance,
) -> Result<(Vec<VertexId>, VertexId), String> {
    let reversed = reverse_instance(instance);
    let (t, sources, _) = check_unique_source_parallel_sinks(&reversed)?;
    Ok((sources, t))
}

/// Whole digraph SP, parallel sources and sinks, every source reaching every
/// sink, and a unique first/last vertex pair with `first` reaching `last`.
pub fn check_parallel_sources_parallel_sinks(instance: &Instance) -> Result<ParallelSplit, String> {
    let (sources, sinks) = disjoint_terminals(instance)?;
    build_sp_tree(instance).map_err(|e| format!("digraph: {e}"))?;
    if !are_parallel(instance, &sources) {
        return Err("sources are not parallel".into());
    }
    if !are_parallel(instance, &sinks) {
        return Err("sinks are not parallel".into());
    }
    let n = instance.vertex_count();
    let mut common_fwd = vec![true; n];
    for &a in &sources {
        let r = reach_forward(instance, &[a], None);
        if sinks.iter().any(|&t| !r[t]) {
            return Err(format!(
                "source {} does not reach every sink",
                instance.vertex_name(a)
            ));
        }
        for v in 0..n {
            common_fwd[v] &= r[v];
        }
    }
    let mut common_bwd = vec![true; n];
    for &t in &sinks {
        let r = reach_backward(instance, &[t], None);
        for v in 0..n {
            common_bwd[v] &= r[v];
        }
    }
    let order = topo_order(instance, None).ok_or("digraph has a cycle")?;
    let first = *order
        .iter()
        .find(|&&v| common_fwd[v])
        .ok_or("no vertex is reachable from all sources")?;
    let last = *order
        .iter()
        .rev()
        .find(|&&v| common_bwd[v])
        .ok_or("no vertex reaches all sinks")?;
    let from_first = reach_forward(instance, &[first], None);
    if (0..n).any(|v| common_fwd[v] && !from_first[v]) {
        return Err("first vertex reachable from all sources is not unique".into());
    }
    let to_last = reach_backward(instance, &[last], None);
    if (0..n).any(|v| common_bwd[v] && !to_last[v]) {
        return Err("last vertex reaching all sinks is not unique".into());
    }
    if !from_first[last] {
        return Err("first common vertex does not reach the last common vertex".into());
    }
    for v in [first, last] {
        if instance.scenarios().iter().any(|s| s.balances[v] != 0) {
            return Err(format!(
                "split vertex {} has a nonzero balance",
                instance.vertex_name(v)
            ));
        }
    }
    Ok(ParallelSplit {
        sources,
        sinks,
        first,
        last,
    })
}

/// First matching class in the order Pearl, unique/unique, unique/parallel,
/// parallel/unique, parallel/parallel, general.
pub fn classify_instance(instance: &Instance) -> InstanceClass {
    if instance.sources().is_empty() {
        return InstanceClass::General {
            reason: "no scenario has a supply".into(),
        };
    }
    if pearl_order(instance).is_some() {
        return InstanceClass::Pearl;
    }
    let mut reasons = Vec::new();
    match check_unique_source_sink(instance) {
        Ok((source, sink)) => return InstanceClass::UniqueSourceUniqueSink { source, sink },
        Err(e) => reasons.push(e),
    }
    match check_unique_source_parallel_sinks(instance) {
        Ok((source, sinks, _)) => {
            return InstanceClass::UniqueSourceParallelSinks { source, sinks }
        }
        Err(e) => reasons.push(e),
    }
    match check_parallel_sources_unique_sink(instance) {
        Ok((sources, sink)) => return InstanceClass::ParallelSourcesUniqueSink { sources, sink },
        Err(e) => reasons.push(e),
    }
    match check_parallel_sources_parallel_sinks(instance) {
        Ok(split) => return InstanceClass::ParallelSourcesParallelSinksConnected(split),
        Err(e) => reasons.push(e),
    }
    reasons.dedup();
    InstanceClass::General {
        reason: reasons.join("; "),
    }
}
