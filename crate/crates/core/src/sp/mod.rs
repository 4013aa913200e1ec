//! Series-parallel structure: recognition, spanned subgraphs, sink labels,
//! label trees, pearls and instance classification.

mod classify;
mod labels;
mod pearl;
mod tree;

pub use classify::{
    check_parallel_sources_parallel_sinks, check_parallel_sources_unique_sink,
    check_unique_source_parallel_sinks, check_unique_source_sink, classify_instance, InstanceClass,
    ParallelSplit,
};
pub use labels::{
    build_label_tree, compute_sink_labels, label_tree_on, labels_on, Label, LabelTree,
    LabelTreeError, SinkLabelMap,
};
pub use pearl::{is_pearl, pearl_order, pearl_shrink, BundleMap};
pub use tree::{
    build_sp_tree, build_sp_tree_masked, spanned_sp_tree, SpError, SpKind, SpNode, SpTree,
};

use crate::graph::{masked_arcs, reach_forward, spanned_mask};
use crate::instance::{ArcIdx, Instance, Scenario, VertexId};

/// True iff no directed path joins two distinct members of `set`.
pub fn are_parallel(instance: &Instance, set: &[VertexId]) -> bool {
    let mut member = vec![false; instance.vertex_count()];
    for &v in set {
        member[v] = true;
    }
    set.iter().all(|&v| {
        let reach = reach_forward(instance, &[v], None);
        set.iter().all(|&w| w == v || !reach[w])
    })
}

/// Vertices and arcs of the subgraph spanned by two vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub vertices: Vec<VertexId>,
    pub arcs: Vec<ArcIdx>,
}

impl Subgraph {
    /// The subgraph as a standalone instance with zero balances; arc ids, costs
    /// and kinds are retained.
    pub fn to_instance(&self, host: &Instance) -> Instance {
        let mut index = vec![usize::MAX; host.vertex_count()];
        for (i, &v) in self.vertices.iter().enumerate() {
            index[v] = i;
        }
        let arcs = self
            .arcs
            .iter()
            .map(|&a| {
                let mut arc = host.arc(a).clone();
                arc.tail = index[arc.tail];
                arc.head = index[arc.head];
                arc
            })
            .collect();
        let scenarios = host
            .scenarios()
            .iter()
            .map(|s| Scenario {
                name: s.name.clone(),
                balances: vec![0; self.vertices.len()],
            })
            .collect();
        Instance::new(
            self.vertices
                .iter()
                .map(|&v| host.vertex_name(v).to_string())
                .collect(),
            arcs,
            scenarios,
        )
        .expect("induced subgraph of a valid instance")
    }
}

/// Subgraph induced by the vertices lying on some (v,w)-path. For `v == w`
/// this is the single vertex with no arcs.
pub fn spanned_subgraph(
    instance: &Instance,
    v: VertexId,
    w: VertexId,
) -> Result<Subgraph, SpError> {
    let mask = spanned_mask(instance, v, w, None);
    if !mask[v] {
        return Err(SpError::NoPath(
            instance.vertex_name(v).to_string(),
            instance.vertex_name(w).to_string(),
        ));
    }
    let arcs = if v == w {
        Vec::new()
    } else {
        masked_arcs(instance, &mask)
    };
    let vertices = if v == w {
        vec![v]
    } else {
        crate::graph::members(&mask)
    };
    Ok(Subgraph { vertices, arcs })
}
