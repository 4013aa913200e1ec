//! Sink labels, last vertices and the label tree.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{full_mask, reach_backward, reach_forward, spanned_mask};
use crate::instance::{ArcIdx, Instance, VertexId};

/// Set of sinks, as a bitset over positions in [`SinkLabelMap::sinks`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Label(Vec<u64>);

impl Label {
    fn empty(width: usize) -> Self {
        Label(vec![0; width.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Label) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn is_strict_subset(&self, other: &Label) -> bool {
        self != other && self.is_subset(other)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(|&i| self.contains(i))
    }
}

/// Reachable-sink label of every vertex in the considered vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkLabelMap {
    /// Sink vertices, ascending.
    pub sinks: Vec<VertexId>,
    /// Label per vertex; `None` outside the considered vertex set.
    pub labels: Vec<Option<Label>>,
}

impl SinkLabelMap {
    pub fn label(&self, v: VertexId) -> Option<&Label> {
        self.labels[v].as_ref()
    }

    /// Sink vertices in the label of `v`.
    pub fn sink_set(&self, v: VertexId) -> Vec<VertexId> {
        self.labels[v]
            .as_ref()
            .map(|l| l.iter().map(|i| self.sinks[i]).collect())
            .unwrap_or_default()
    }
}

/// Labels over the whole digraph; sinks are vertices with negative balance in some scenario.
pub fn compute_sink_labels(instance: &Instance) -> SinkLabelMap {
    labels_on(instance, &full_mask(instance), &instance.sinks())
}

/// Labels restricted to the subgraph induced by `mask`.
pub fn labels_on(instance: &Instance, mask: &[bool], sinks: &[VertexId]) -> SinkLabelMap {
    let mut sinks: Vec<VertexId> = sinks.iter().copied().filter(|&t| mask[t]).collect();
    sinks.sort_unstable();
    sinks.dedup();
    let mut labels: Vec<Option<Label>> = (0..instance.vertex_count())
        .map(|v| mask[v].then(|| Label::empty(sinks.len())))
        .collect();
    for (i, &t) in sinks.iter().enumerate() {
        let back = reach_backward(instance, &[t], Some(mask));
        for (v, &hit) in back.iter().enumerate() {
            if hit {
                if let Some(l) = labels[v].as_mut() {
                    l.insert(i);
                }
            }
        }
    }
    SinkLabelMap { sinks, labels }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelTreeError {
    #[error("instance does not have a unique source")]
    NotUniqueSource,
    #[error("sinks are not parallel")]
    NotParallelSinks,
    #[error("label structure is degenerate: {0}")]
    Degenerate(String),
}

/// Tree over the source and all last vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTree {
    pub root: VertexId,
    /// Root first, then last vertices ascending.
    pub nodes: Vec<VertexId>,
    /// Parent-child pairs, ordered by (parent, child).
    pub arcs: Vec<(VertexId, VertexId)>,
    /// Vertex set the tree was built on.
    pub mask: Vec<bool>,
}

impl LabelTree {
    pub fn children(&self, v: VertexId) -> Vec<VertexId> {
        self.arcs
            .iter()
            .filter(|(p, _)| *p == v)
            .map(|(_, c)| *c)
            .collect()
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .nodes
            .iter()
            .copied()
            .filter(|&v| self.arcs.iter().all(|(p, _)| *p != v))
            .collect();
        out.sort_unstable();
        out
    }

    /// Arcs inside the union of the subgraphs spanned by tree arcs.
    pub fn covered_arcs(&self, instance: &Instance) -> Vec<bool> {
        let mut covered = vec![false; instance.arc_count()];
        for &(v, w) in &self.arcs {
            let m = spanned_mask(instance, v, w, Some(&self.mask));
            for (a, arc) in instance.arcs().iter().enumerate() {
                if m[arc.tail] && m[arc.head] {
                    covered[a] = true;
                }
            }
        }
        covered
    }
}

/// Whether `v` is a last vertex: nonempty label, and every arc into a vertex
/// with a nonempty label steps to a consecutive label.
fn is_last(
    instance: &Instance,
    mask: &[bool],
    labels: &SinkLabelMap,
    distinct: &[Label],
    v: VertexId,
) -> bool {
    let Some(lv) = labels.label(v) else {
        return false;
    };
    if lv.is_empty() {
        return false;
    }
    instance.out_arcs(v).iter().all(|&a: &ArcIdx| {
        let w = instance.arc(a).head;
        if !mask[w] {
            return true;
        }
        let lw = labels.label(w).expect("masked vertex has a label");
        if lw.is_empty() {
            return true;
        }
        lw.is_strict_subset(lv)
            && !distinct
                .iter()
                .any(|z| lw.is_strict_subset(z) && z.is_strict_subset(lv))
    })
}

/// Builds the label tree of the instance from its unique source.
pub fn build_label_tree(
    instance: &Instance,
    labels: &SinkLabelMap,
) -> Result<LabelTree, LabelTreeError> {
    let sources = instance.sources();
    if sources.len() != 1 {
        return Err(LabelTreeError::NotUniqueSource);
    }
    let s = sources[0];
    if !crate::sp::are_parallel(instance, &labels.sinks) {
        return Err(LabelTreeError::NotParallelSinks);
    }
    let mask = reach_forward(instance, &[s], None);
    let restricted = SinkLabelMap {
        sinks: labels.sinks.clone(),
        labels: labels
            .labels
            .iter()
            .enumerate()
            .map(|(v, l)| if mask[v] { l.clone() } else { None })
            .collect(),
    };
    label_tree_on(instance, &mask, s, &restricted)
}

/// Label tree on the subgraph induced by `mask`, rooted at `s`.
pub fn label_tree_on(
    instance: &Instance,
    mask: &[bool],
    s: VertexId,
    labels: &SinkLabelMap,
) -> Result<LabelTree, LabelTreeError> {
    let mut distinct: Vec<Label> = (0..instance.vertex_count())
        .filter(|&v| mask[v])
        .filter_map(|v| labels.label(v).cloned())
        .filter(|l| !l.is_empty())
        .collect();
    distinct.sort();
    distinct.dedup();

    let mut last_of: BTreeMap<Label, VertexId> = BTreeMap::new();
    for v in (0..instance.vertex_count()).filter(|&v| mask[v]) {
        if is_last(instance, mask, labels, &distinct, v) {
            let l = labels.label(v).unwrap().clone();
            if let Some(prev) = last_of.insert(l, v) {
                return Err(LabelTreeError::Degenerate(format!(
                    "vertices {} and {} are both last vertices of one label",
                    instance.vertex_name(prev),
                    instance.vertex_name(v)
                )));
            }
        }
    }
    if let Some(missing) = distinct.iter().find(|l| !last_of.contains_key(*l)) {
        return Err(LabelTreeError::Degenerate(format!(
            "label of size {} has no last vertex",
            missing.len()
        )));
    }
    let root_label = labels.label(s).cloned().unwrap_or_default();
    if root_label.is_empty() {
        return Err(LabelTreeError::Degenerate("source reaches no sink".into()));
    }

    let mut arcs = Vec::new();
    let root_last = last_of[&root_label];
    if root_last != s {
        arcs.push((s, root_last));
    }
    for (l, &w) in &last_of {
        if *l == root_label {
            continue;
        }
        let parents: Vec<&Label> = distinct
            .iter()
            .filter(|z| l.is_strict_subset(z))
            .filter(|z| {
                !distinct
                    .iter()
                    .any(|y| l.is_strict_subset(y) && y.is_strict_subset(z))
            })
            .collect();
        if parents.len() != 1 {
            return Err(LabelTreeError::Degenerate(format!(
                "label of {} has {} minimal superset labels",
                instance.vertex_name(w),
                parents.len()
            )));
        }
        arcs.push((last_of[parents[0]], w));
    }
    arcs.sort_unstable();

    let mut nodes: Vec<VertexId> = last_of.values().copied().filter(|&v| v != s).collect();
    nodes.sort_unstable();
    nodes.insert(0, s);
    let tree = LabelTree {
        root: s,
        nodes,
        arcs,
        mask: mask.to_vec(),
    };
    let mut expected_leaves = labels.sinks.clone();
    expected_leaves.sort_unstable();
    if tree.leaves() != expected_leaves {
        return Err(LabelTreeError::Degenerate(
            "leaves differ from the sink set".into(),
        ));
    }
    Ok(tree)
}
