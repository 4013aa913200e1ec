//! Pearl digraphs: paths of parallel arc bundles.

use crate::instance::{Arc, ArcIdx, Instance, RobustFlow, VertexId};
use crate::sp::tree::{build_sp_tree, SpError};

/// Vertex order v1..vn of a pearl, or `None` if the digraph is not a pearl.
///
/// Every vertex except the last must send all its arcs to its successor, and
/// every vertex must appear exactly once.
pub fn pearl_order(instance: &Instance) -> Option<Vec<VertexId>> {
    let n = instance.vertex_count();
    if n < 2 || instance.arc_count() == 0 {
        return None;
    }
    let origins: Vec<VertexId> = (0..n).filter(|&v| instance.in_arcs(v).is_empty()).collect();
    if origins.len() != 1 {
        return None;
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut v = origins[0];
    loop {
        if seen[v] {
            return None;
        }
        seen[v] = true;
        order.push(v);
        let out = instance.out_arcs(v);
        if out.is_empty() {
            break;
        }
        let next = instance.arc(out[0]).head;
        if out.iter().any(|&a| instance.arc(a).head != next) {
            return None;
        }
        v = next;
    }
    (order.len() == n).then_some(order)
}

/// True iff the digraph is series-parallel and no P node of its SP tree has an S child.
pub fn is_pearl(instance: &Instance) -> bool {
    match build_sp_tree(instance) {
        Ok(tree) => !tree.has_parallel_over_series(),
        Err(_) => false,
    }
}

/// For every arc of a shrunk pearl, the original arc and bundle it stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleMap {
    pub original: Vec<ArcIdx>,
    pub bundle: Vec<usize>,
}

impl BundleMap {
    /// Moves a flow on the shrunk instance back onto the original arcs.
    pub fn lift(&self, original: &Instance, shrunk_flow: &RobustFlow) -> RobustFlow {
        let mut flow = RobustFlow::zero(original);
        for (lambda, f) in shrunk_flow.per_scenario.iter().enumerate() {
            for (a, &x) in f.iter().enumerate() {
                flow.per_scenario[lambda][self.original[a]] += x;
            }
        }
        flow
    }
}

fn cheapest<'a>(arcs: impl Iterator<Item = (ArcIdx, &'a Arc)>) -> Option<(ArcIdx, &'a Arc)> {
    arcs.min_by(|(_, x), (_, y)| (x.cost, &x.id).cmp(&(y.cost, &y.id)))
}

/// Keeps per bundle the cheapest free arc, and the cheapest fixed arc only
/// when it is strictly cheaper than every free arc. Ties go to the lowest id.
pub fn pearl_shrink(instance: &Instance) -> Result<(Instance, BundleMap), SpError> {
    let order = pearl_order(instance).ok_or(SpError::NotPearl)?;
    let mut arcs = Vec::new();
    let mut map = BundleMap {
        original: Vec::new(),
        bundle: Vec::new(),
    };
    for (i, &v) in order[..order.len() - 1].iter().enumerate() {
        let bundle = || instance.out_arcs(v).iter().map(|&a| (a, instance.arc(a)));
        let free = cheapest(bundle().filter(|(_, a)| !a.is_fixed()));
        let fixed = cheapest(bundle().filter(|(_, a)| a.is_fixed()));
        let keep_fixed = match (fixed, free) {
            (Some((_, f)), Some((_, g))) => f.cost < g.cost,
            (Some(_), None) => true,
            _ => false,
        };
        let mut kept: Vec<(ArcIdx, &Arc)> = Vec::new();
        if keep_fixed {
            kept.push(fixed.unwrap());
        }
        kept.extend(free);
        for (a, arc) in kept {
            arcs.push(arc.clone());
            map.original.push(a);
            map.bundle.push(i);
        }
    }
    let shrunk = Instance::new(
        instance.vertices().to_vec(),
        arcs,
        instance.scenarios().to_vec(),
    )
    .expect("subset of a valid instance");
    Ok((shrunk, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceBuilder;

    #[test]
    fn shrink_keeps_cheaper_fixed_and_cheapest_free() {
        let g = InstanceBuilder::new()
            .fixed("f3", "a", "b", 3)
            .fixed("f5", "a", "b", 5)
            .free("g4", "a", "b", 4)
            .scenario("1", &[])
            .build()
            .unwrap();
        let (s, map) = pearl_shrink(&g).unwrap();
        let ids: Vec<&str> = s.arcs().iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, vec!["f3", "g4"]);
        assert_eq!(map.original, vec![0, 2]);
    }

    #[test]
    fn shrink_drops_fixed_on_equal_cost() {
        let g = InstanceBuilder::new()
            .fixed("f", "a", "b", 4)
            .free("g", "a", "b", 4)
            .scenario("1", &[])
            .build()
            .unwrap();
        let (s, _) = pearl_shrink(&g).unwrap();
        assert_eq!(s.arc_count(), 1);
        assert_eq!(s.arc(0).id, "g");
    }

    #[test]
    fn shrink_ties_break_by_id() {
        let g = InstanceBuilder::new()
            .free("z", "a", "b", 1)
            .free("b", "a", "b", 1)
            .scenario("1", &[])
            .build()
            .unwrap();
        let (s, _) = pearl_shrink(&g).unwrap();
        assert_eq!(s.arc(0).id, "b");
    }

    #[test]
    fn single_arc_is_pearl() {
        let g = InstanceBuilder::new()
            .free("a", "x", "y", 1)
            .scenario("1", &[])
            .build()
            .unwrap();
        assert!(is_pearl(&g));
        assert_eq!(pearl_order(&g).unwrap().len(), 2);
    }

    #[test]
    fn diamond_is_not_pearl() {
        let g = InstanceBuilder::new()
            .free("a", "o", "x", 1)
            .free("b", "x", "q", 1)
            .free("c", "o", "q", 1)
            .scenario("1", &[])
            .build()
            .unwrap();
        assert!(!is_pearl(&g));
        assert!(pearl_order(&g).is_none());
    }
}
