//! Reachability and ordering helpers over (masked) instance digraphs.
//!
//! A mask selects a vertex subset; arcs count only when both endpoints are
//! selected, so every masked view is an induced subgraph.

use std::collections::VecDeque;

use crate::instance::{ArcIdx, Instance, VertexId};

pub type VertexSet = Vec<bool>;

pub fn full_mask(instance: &Instance) -> VertexSet {
    vec![true; instance.vertex_count()]
}

fn inside(mask: Option<&[bool]>, v: VertexId) -> bool {
    mask.is_none_or(|m| m[v])
}

/// Arcs of the subgraph induced by `mask`, in index order.
pub fn masked_arcs(instance: &Instance, mask: &[bool]) -> Vec<ArcIdx> {
    (0..instance.arc_count())
        .filter(|&a| {
            let arc = instance.arc(a);
            mask[arc.tail] && mask[arc.head]
        })
        .collect()
}

/// Vertices reachable from any of `from` (inclusive).
pub fn reach_forward(instance: &Instance, from: &[VertexId], mask: Option<&[bool]>) -> VertexSet {
    search(instance, from, mask, true)
}

/// Vertices from which some vertex of `to` is reachable (inclusive).
pub fn reach_backward(instance: &Instance, to: &[VertexId], mask: Option<&[bool]>) -> VertexSet {
    search(instance, to, mask, false)
}

fn search(
    instance: &Instance,
    start: &[VertexId],
    mask: Option<&[bool]>,
    forward: bool,
) -> VertexSet {
    let mut seen = vec![false; instance.vertex_count()];
    let mut queue = VecDeque::new();
    for &v in start {
        if inside(mask, v) && !seen[v] {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        let arcs = if forward {
            instance.out_arcs(v)
        } else {
            instance.in_arcs(v)
        };
        for &a in arcs {
            let arc = instance.arc(a);
            let next = if forward { arc.head } else { arc.tail };
            if inside(mask, next) && !seen[next] {
                seen[next] = true;
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Vertices lying on some (v,w)-path; empty when no such path exists.
pub fn spanned_mask(
    instance: &Instance,
    v: VertexId,
    w: VertexId,
    mask: Option<&[bool]>,
) -> VertexSet {
    let fwd = reach_forward(instance, &[v], mask);
    if !fwd[w] {
        return vec![false; instance.vertex_count()];
    }
    let bwd = reach_backward(instance, &[w], mask);
    fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect()
}

/// Topological order of the masked subgraph, or `None` if it has a cycle.
pub fn topo_order(instance: &Instance, mask: Option<&[bool]>) -> Option<Vec<VertexId>> {
    let n = instance.vertex_count();
    let mut indeg = vec![0usize; n];
    let mut count = 0;
    for v in 0..n {
        if !inside(mask, v) {
            continue;
        }
        count += 1;
        for &a in instance.out_arcs(v) {
            let h = instance.arc(a).head;
            if inside(mask, h) {
                indeg[h] += 1;
            }
        }
    }
    let mut order = Vec::with_capacity(count);
    let mut stack: Vec<VertexId> = (0..n)
        .rev()
        .filter(|&v| inside(mask, v) && indeg[v] == 0)
        .collect();
    while let Some(v) = stack.pop() {
        order.push(v);
        for &a in instance.out_arcs(v) {
            let h = instance.arc(a).head;
            if inside(mask, h) {
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    stack.push(h);
                }
            }
        }
    }
    (order.len() == count).then_some(order)
}

pub fn is_acyclic(instance: &Instance) -> bool {
    topo_order(instance, None).is_some()
}

pub fn members(mask: &[bool]) -> Vec<VertexId> {
    mask.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(v, _)| v)
        .collect()
}
