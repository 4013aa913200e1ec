//! Two-terminal series-parallel recognition by iterative reduction.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{full_mask, masked_arcs, spanned_mask};
use crate::instance::{ArcIdx, Instance, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpKind {
    Leaf(ArcIdx),
    Series(usize, usize),
    Parallel(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpNode {
    pub kind: SpKind,
    pub origin: VertexId,
    pub target: VertexId,
}

/// Binary decomposition tree stored as an arena; `root` indexes `nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpTree {
    pub nodes: Vec<SpNode>,
    pub root: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpError {
    #[error("digraph has no arcs")]
    Empty,
    #[error("digraph does not have a unique origin and a unique target")]
    MultipleTerminals,
    #[error("digraph is not two-terminal series-parallel")]
    NotSeriesParallel,
    #[error("no path from `{0}` to `{1}`")]
    NoPath(String, String),
    #[error("digraph is not a pearl")]
    NotPearl,
}

impl SpTree {
    pub fn origin(&self) -> VertexId {
        self.nodes[self.root].origin
    }

    pub fn target(&self) -> VertexId {
        self.nodes[self.root].target
    }

    /// Arcs at the leaves, left to right.
    pub fn leaves(&self) -> Vec<ArcIdx> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            match self.nodes[x].kind {
                SpKind::Leaf(a) => out.push(a),
                SpKind::Series(l, r) | SpKind::Parallel(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }

    /// Checks terminal bookkeeping of every node against the instance.
    pub fn is_consistent(&self, instance: &Instance) -> bool {
        self.nodes.iter().all(|node| match node.kind {
            SpKind::Leaf(a) => {
                let arc = instance.arc(a);
                arc.tail == node.origin && arc.head == node.target
            }
            SpKind::Series(l, r) => {
                let (l, r) = (&self.nodes[l], &self.nodes[r]);
                l.target == r.origin && node.origin == l.origin && node.target == r.target
            }
            SpKind::Parallel(l, r) => {
                let (l, r) = (&self.nodes[l], &self.nodes[r]);
                l.origin == r.origin
                    && l.target == r.target
                    && node.origin == l.origin
                    && node.target == l.target
            }
        })
    }

    /// True iff some P node has an S child.
    pub fn has_parallel_over_series(&self) -> bool {
        self.nodes.iter().any(|node| match node.kind {
            SpKind::Parallel(l, r) => {
                matches!(self.nodes[l].kind, SpKind::Series(..))
                    || matches!(self.nodes[r].kind, SpKind::Series(..))
            }
            _ => false,
        })
    }
}

/// Decomposes the whole digraph of `instance`.
pub fn build_sp_tree(instance: &Instance) -> Result<SpTree, SpError> {
    build_sp_tree_masked(instance, &full_mask(instance))
}

/// Decomposes the subgraph spanned by `v` and `w`; the terminals are `v` and `w`.
pub fn spanned_sp_tree(instance: &Instance, v: VertexId, w: VertexId) -> Result<SpTree, SpError> {
    let mask = spanned_mask(instance, v, w, None);
    if !mask[v] {
        return Err(SpError::NoPath(
            instance.vertex_name(v).to_string(),
            instance.vertex_name(w).to_string(),
        ));
    }
    build_sp_tree_masked(instance, &mask)
}

struct Edge {
    u: VertexId,
    v: VertexId,
    node: usize,
    alive: bool,
}

struct Reducer {
    nodes: Vec<SpNode>,
    edges: Vec<Edge>,
    out_list: Vec<Vec<usize>>,
    in_list: Vec<Vec<usize>>,
    by_pair: HashMap<(VertexId, VertexId), usize>,
    alive_out: Vec<usize>,
    alive_in: Vec<usize>,
    alive_edges: usize,
    work: Vec<VertexId>,
}

impl Reducer {
    fn new(n: usize, arcs: usize) -> Self {
        Reducer {
            nodes: Vec::with_capacity(2 * arcs),
            edges: Vec::with_capacity(2 * arcs),
            out_list: vec![Vec::new(); n],
            in_list: vec![Vec::new(); n],
            by_pair: HashMap::with_capacity(arcs),
            alive_out: vec![0; n],
            alive_in: vec![0; n],
            alive_edges: 0,
            work: Vec::new(),
        }
    }

    fn push_node(&mut self, kind: SpKind, origin: VertexId, target: VertexId) -> usize {
        self.nodes.push(SpNode {
            kind,
            origin,
            target,
        });
        self.nodes.len() - 1
    }

    /// Adds an edge carrying `node`, fusing it with an existing parallel edge.
    fn insert(&mut self, u: VertexId, v: VertexId, node: usize) {
        if let Some(&e) = self.by_pair.get(&(u, v)) {
            let merged = self.push_node(SpKind::Parallel(self.edges[e].node, node), u, v);
            self.edges[e].node = merged;
        } else {
            let e = self.edges.len();
            self.edges.push(Edge {
                u,
                v,
                node,
                alive: true,
            });
            self.out_list[u].push(e);
            self.in_list[v].push(e);
            self.by_pair.insert((u, v), e);
            self.alive_out[u] += 1;
            self.alive_in[v] += 1;
            self.alive_edges += 1;
        }
        self.work.push(u);
        self.work.push(v);
    }

    fn kill(&mut self, e: usize) {
        let (u, v) = (self.edges[e].u, self.edges[e].v);
        self.edges[e].alive = false;
        self.by_pair.remove(&(u, v));
        self.alive_out[u] -= 1;
        self.alive_in[v] -= 1;
        self.alive_edges -= 1;
    }

    fn first_alive(list: &mut Vec<usize>, edges: &[Edge]) -> usize {
        list.retain(|&e| edges[e].alive);
        list[0]
    }

    /// Replaces the path u -> x -> v through a degree-(1,1) vertex by one edge.
    fn contract(&mut self, x: VertexId) -> Result<(), SpError> {
        let e1 = Self::first_alive(&mut self.in_list[x], &self.edges);
        let e2 = Self::first_alive(&mut self.out_list[x], &self.edges);
        let (u, v) = (self.edges[e1].u, self.edges[e2].v);
        if u == v {
            return Err(SpError::NotSeriesParallel);
        }
        self.kill(e1);
        self.kill(e2);
        let series = self.push_node(
            SpKind::Series(self.edges[e1].node, self.edges[e2].node),
            u,
            v,
        );
        self.insert(u, v, series);
        Ok(())
    }
}

/// Decomposes the subgraph induced by `mask`.
pub fn build_sp_tree_masked(instance: &Instance, mask: &[bool]) -> Result<SpTree, SpError> {
    let arcs = masked_arcs(instance, mask);
    if arcs.is_empty() {
        return Err(SpError::Empty);
    }
    let n = instance.vertex_count();
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for &a in &arcs {
        let arc = instance.arc(a);
        if arc.tail == arc.head {
            return Err(SpError::NotSeriesParallel);
        }
        outdeg[arc.tail] += 1;
        indeg[arc.head] += 1;
    }
    let origins: Vec<VertexId> = (0..n).filter(|&v| mask[v] && indeg[v] == 0).collect();
    let targets: Vec<VertexId> = (0..n).filter(|&v| mask[v] && outdeg[v] == 0).collect();
    if origins.len() != 1 || targets.len() != 1 || origins[0] == targets[0] {
        return Err(SpError::MultipleTerminals);
    }
    let (origin, target) = (origins[0], targets[0]);

    let mut r = Reducer::new(n, arcs.len());
    for &a in &arcs {
        let arc = instance.arc(a);
        let leaf = r.push_node(SpKind::Leaf(a), arc.tail, arc.head);
        r.insert(arc.tail, arc.head, leaf);
    }
    while let Some(x) = r.work.pop() {
        if x != origin && x != target && r.alive_in[x] == 1 && r.alive_out[x] == 1 {
            r.contract(x)?;
        }
    }
    if r.alive_edges != 1 {
        return Err(SpError::NotSeriesParallel);
    }
    let e = r
        .by_pair
        .get(&(origin, target))
        .copied()
        .ok_or(SpError::NotSeriesParallel)?;
    Ok(SpTree {
        root: r.edges[e].node,
        nodes: r.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceBuilder;

    #[test]
    fn single_arc_is_a_leaf() {
        let g = InstanceBuilder::new()
            .free("a", "o", "q", 1)
            .scenario("1", &[])
            .build()
            .unwrap();
        let t = build_sp_tree(&g).unwrap();
        assert_eq!(t.nodes[t.root].kind, SpKind::Leaf(0));
    }

    #[test]
    fn two_parallel_arcs() {
        let g = InstanceBuilder::new()
            .free("a", "o", "q", 1)
            .fixed("b", "o", "q", 1)
            .scenario("1", &[])
            .build()
            .unwrap();
        let t = build_sp_tree(&g).unwrap();
        let SpKind::Parallel(l, r) = t.nodes[t.root].kind else {
            panic!("expected a parallel root");
        };
        assert!(matches!(t.nodes[l].kind, SpKind::Leaf(_)));
        assert!(matches!(t.nodes[r].kind, SpKind::Leaf(_)));
    }

    #[test]
    fn diamond_round_trip() {
        let g = InstanceBuilder::new()
            .free("a", "o", "x", 1)
            .free("b", "x", "q", 1)
            .free("c", "o", "y", 1)
            .free("d", "y", "q", 1)
            .free("e", "o", "q", 1)
            .scenario("1", &[])
            .build()
            .unwrap();
        let t = build_sp_tree(&g).unwrap();
        assert!(t.is_consistent(&g));
        let mut leaves = t.leaves();
        leaves.sort();
        assert_eq!(leaves, vec![0, 1, 2, 3, 4]);
        assert!(t.has_parallel_over_series());
    }

    #[test]
    fn wheatstone_bridge_is_rejected() {
        let g = InstanceBuilder::new()
            .free("a", "o", "x", 1)
            .free("b", "o", "y", 1)
            .free("c", "x", "y", 1)
            .free("d", "x", "q", 1)
            .free("e", "y", "q", 1)
            .scenario("1", &[])
            .build()
            .unwrap();
        assert_eq!(build_sp_tree(&g), Err(SpError::NotSeriesParallel));
    }

    #[test]
    fn two_targets_are_rejected() {
        let g = InstanceBuilder::new()
            .free("a", "o", "x", 1)
            .free("b", "o", "y", 1)
            .scenario("1", &[])
            .build()
            .unwrap();
        assert_eq!(build_sp_tree(&g), Err(SpError::MultipleTerminals));
    }

    #[test]
    fn long_chain_does_not_recurse() {
        let mut b = InstanceBuilder::new();
        for i in 0..50_000 {
            b.free(
                &format!("a{i}"),
                &format!("v{i}"),
                &format!("v{}", i + 1),
                1,
            );
        }
        let g = b.scenario("1", &[]).build().unwrap();
        let t = build_sp_tree(&g).unwrap();
        assert_eq!(t.leaves().len(), 50_000);
    }
}
