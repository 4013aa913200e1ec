//! Seeded random instances for sweeps, property tests and timing runs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{reach_forward, topo_order};
use crate::instance::{reverse_instance, Arc, ArcKind, Instance, Scenario, VertexId};
use crate::sp::{are_parallel, classify_instance, InstanceClass};

/// Size limits for generated instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomParams {
    pub max_vertices: usize,
    pub max_arcs: usize,
    pub max_scenarios: usize,
    /// Upper bound on the total supply of each scenario.
    pub max_supply: i64,
    pub max_cost: i64,
    pub fixed_probability: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            max_vertices: 14,
            max_arcs: 14,
            max_scenarios: 3,
            max_supply: 4,
            max_cost: 6,
            fixed_probability: 0.35,
        }
    }
}

/// The tractable classes a generator can aim for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetClass {
    Pearl,
    UniqueSourceUniqueSink,
    UniqueSourceParallelSinks,
    ParallelSourcesUniqueSink,
    ParallelSourcesParallelSinks,
}

impl TargetClass {
    pub const ALL: [TargetClass; 5] = [
        TargetClass::Pearl,
        TargetClass::UniqueSourceUniqueSink,
        TargetClass::UniqueSourceParallelSinks,
        TargetClass::ParallelSourcesUniqueSink,
        TargetClass::ParallelSourcesParallelSinks,
    ];

    pub fn matches(self, class: &InstanceClass) -> bool {
        matches!(
            (self, class),
            (TargetClass::Pearl, InstanceClass::Pearl)
                | (
                    TargetClass::UniqueSourceUniqueSink,
                    InstanceClass::UniqueSourceUniqueSink { .. }
                )
                | (
                    TargetClass::UniqueSourceParallelSinks,
                    InstanceClass::UniqueSourceParallelSinks { .. }
                )
                | (
                    TargetClass::ParallelSourcesUniqueSink,
                    InstanceClass::ParallelSourcesUniqueSink { .. }
                )
                | (
                    TargetClass::ParallelSourcesParallelSinks,
                    InstanceClass::ParallelSourcesParallelSinksConnected(_)
                )
        )
    }
}

/// Two-terminal SP multigraph grown from one arc 0 -> 1 by random series
/// subdivisions and parallel duplications. Returns the vertex count and arcs.
pub fn random_sp_edges<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
    max_arcs: usize,
) -> (usize, Vec<(usize, usize)>) {
    let mut n = 2;
    let mut edges = vec![(0, 1)];
    let target = rng.gen_range(1..=max_arcs.max(1));
    while edges.len() < target {
        let i = rng.gen_range(0..edges.len());
        let (u, v) = edges[i];
        if n < max_vertices && rng.gen_bool(0.55) {
            edges[i] = (u, n);
            edges.push((n, v));
            n += 1;
        } else {
            edges.push((u, v));
        }
    }
    (n, edges)
}

fn random_arcs<R: Rng>(rng: &mut R, edges: &[(usize, usize)], p: &RandomParams) -> Vec<Arc> {
    edges
        .iter()
        .enumerate()
        .map(|(k, &(tail, head))| Arc {
            id: format!("a{k}"),
            tail,
            head,
            cost: rng.gen_range(0..=p.max_cost),
            kind: if rng.gen_bool(p.fixed_probability) {
                ArcKind::Fixed
            } else {
                ArcKind::Free
            },
        })
        .collect()
}

/// Splits `units` randomly over `slots` entries.
fn spread<R: Rng>(rng: &mut R, units: i64, slots: usize) -> Vec<i64> {
    let mut out = vec![0; slots];
    for _ in 0..units {
        out[rng.gen_range(0..slots)] += 1;
    }
    out
}

/// One scenario per draw: `units` leave `sources` and reach `sinks`.
fn terminal_scenarios<R: Rng>(
    rng: &mut R,
    n: usize,
    sources: &[VertexId],
    sinks: &[VertexId],
    p: &RandomParams,
) -> Vec<Scenario> {
    let k = rng.gen_range(1..=p.max_scenarios.max(1));
    (0..k)
        .map(|lambda| {
            let units = rng.gen_range(if lambda == 0 { 1 } else { 0 }..=p.max_supply.max(1));
            let mut balances = vec![0; n];
            for (&v, x) in sources.iter().zip(spread(rng, units, sources.len())) {
                balances[v] += x;
            }
            for (&v, x) in sinks.iter().zip(spread(rng, units, sinks.len())) {
                balances[v] -= x;
            }
            Scenario {
                name: format!("{}", lambda + 1),
                balances,
            }
        })
        .collect()
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Random antichain of `size` vertices drawn from `pool`.
fn antichain<R: Rng>(rng: &mut R, g: &Instance, pool: &[VertexId], size: usize) -> Vec<VertexId> {
    let mut pool = pool.to_vec();
    pool.shuffle(rng);
    let mut chosen: Vec<VertexId> = Vec::new();
    for v in pool {
        if chosen.len() == size {
            break;
        }
        let mut with = chosen.clone();
        with.push(v);
        if are_parallel(g, &with) {
            chosen = with;
        }
    }
    chosen.sort_unstable();
    chosen
}

fn pearl<R: Rng>(rng: &mut R, p: &RandomParams) -> Instance {
    let n = rng.gen_range(2..=p.max_vertices.clamp(2, 8));
    let mut edges = Vec::new();
    for i in 0..n - 1 {
        for _ in 0..rng.gen_range(1..=3) {
            edges.push((i, i + 1));
        }
    }
    let arcs = random_arcs(rng, &edges, p);
    let k = rng.gen_range(1..=p.max_scenarios.max(1));
    let scenarios = (0..k)
        .map(|lambda| {
            let mut balances = vec![0; n];
            for _ in 0..rng.gen_range(if lambda == 0 { 1 } else { 0 }..=p.max_supply.max(1)) {
                let a = rng.gen_range(0..n - 1);
                let b = rng.gen_range(a + 1..n);
                balances[a] += 1;
                balances[b] -= 1;
            }
            Scenario {
                name: format!("{}", lambda + 1),
                balances,
            }
        })
        .collect();
    Instance::new(names(n), arcs, scenarios).expect("generated pearl is valid")
}

fn sp_graph<R: Rng>(rng: &mut R, p: &RandomParams) -> Instance {
    let (n, edges) = random_sp_edges(rng, p.max_vertices, p.max_arcs);
    let arcs = random_arcs(rng, &edges, p);
    let empty = vec![Scenario {
        name: "1".into(),
        balances: vec![0; n],
    }];
    Instance::new(names(n), arcs, empty).expect("generated digraph is valid")
}

fn unique_unique<R: Rng>(rng: &mut R, p: &RandomParams) -> Instance {
    let g = sp_graph(rng, p);
    let n = g.vertex_count();
    // Usually the terminals; sometimes an inner pair to exercise spanned subgraphs.
    let (s, t) = if rng.gen_bool(0.7) {
        (0, 1)
    } else {
        let order = topo_order(&g, None).expect("acyclic");
        let s = order[rng.gen_range(0..n)];
        let reach = reach_forward(&g, &[s], None);
        let cands: Vec<VertexId> = (0..n).filter(|&v| v != s && reach[v]).collect();
        match cands.choose(rng) {
            Some(&t) => (s, t),
            None => (0, 1),
        }
    };
    let scenarios = terminal_scenarios(rng, n, &[s], &[t], p);
    g.with_scenarios(scenarios).expect("balanced")
}

fn unique_parallel<R: Rng>(rng: &mut R, p: &RandomParams) -> Instance {
    let g = sp_graph(rng, p);
    let n = g.vertex_count();
    let pool: Vec<VertexId> = (1..n).collect();
    let size = rng.gen_range(2..=3);
    let sinks = antichain(rng, &g, &pool, size);
    let scenarios = terminal_scenarios(rng, n, &[0], &sinks, p);
    g.with_scenarios(scenarios).expect("balanced")
}

/// Sources on distinct branches out of an origin that merge in a joint, a
/// random middle, then sinks on distinct branches into a final vertex. Every
/// piece is a small random SP graph, so the whole digraph is SP.
fn parallel_parallel<R: Rng>(rng: &mut R, p: &RandomParams) -> Instance {
    let (ks, kt) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
    // 0 origin, 1 and 2 the joints, 3 the final vertex, then sources and sinks.
    let sources: Vec<VertexId> = (4..4 + ks).collect();
    let sinks: Vec<VertexId> = (4 + ks..4 + ks + kt).collect();
    let mut n = 4 + ks + kt;
    let mut spare_vertices = p.max_vertices.saturating_sub(n);
    let mut spare_arcs = p.max_arcs.saturating_sub(2 * ks + 2 * kt + 1);
    let mut edges = Vec::new();
    let mut piece = |rng: &mut R, u: usize, v: usize, edges: &mut Vec<(usize, usize)>| {
        let extra_v = rng.gen_range(0..=spare_vertices.min(2));
        let extra_a = rng.gen_range(0..=spare_arcs.min(2));
        let (k, part) = random_sp_edges(rng, 2 + extra_v, 1 + extra_a);
        let fresh = n;
        let map = |x: usize| match x {
            0 => u,
            1 => v,
            x => fresh + x - 2,
        };
        edges.extend(part.iter().map(|&(a, b)| (map(a), map(b))));
        n += k - 2;
        spare_vertices -= k - 2;
        spare_arcs -= part.len() - 1;
    };
    for &a in &sources {
        edges.push((0, a));
        piece(rng, a, 1, &mut edges);
    }
    piece(rng, 1, 2, &mut edges);
    for &b in &sinks {
        piece(rng, 2, b, &mut edges);
        edges.push((b, 3));
    }
    let arcs = random_arcs(rng, &edges, p);
    let scenarios = terminal_scenarios(rng, n, &sources, &sinks, p);
    Instance::new(names(n), arcs, scenarios).expect("generated digraph is valid")
}

/// Draws instances until one classifies as `class`. Panics after many misses.
pub fn random_instance<R: Rng>(rng: &mut R, class: TargetClass, params: &RandomParams) -> Instance {
    for _ in 0..100_000 {
        let g = match class {
            TargetClass::Pearl => pearl(rng, params),
            TargetClass::UniqueSourceUniqueSink => unique_unique(rng, params),
            TargetClass::UniqueSourceParallelSinks => unique_parallel(rng, params),
            TargetClass::ParallelSourcesUniqueSink => {
                reverse_instance(&unique_parallel(rng, params))
            }
            TargetClass::ParallelSourcesParallelSinks => parallel_parallel(rng, params),
        };
        if class.matches(&classify_instance(&g)) {
            return g;
        }
    }
    panic!("no {class:?} instance found within the attempt limit");
}

/// Series chain of `arcs` arcs alternating free and fixed parallel pairs,
/// with one scenario per entry of `supplies`.
pub fn long_sp_chain<R: Rng>(rng: &mut R, arcs: usize, supplies: &[i64]) -> Instance {
    let bundles = arcs / 2;
    let n = bundles + 1;
    let mut list = Vec::with_capacity(arcs);
    for i in 0..bundles {
        for (j, kind) in [ArcKind::Free, ArcKind::Fixed].into_iter().enumerate() {
            list.push(Arc {
                id: format!("a{i}_{j}"),
                tail: i,
                head: i + 1,
                cost: rng.gen_range(0..10),
                kind,
            });
        }
    }
    let scenarios = supplies
        .iter()
        .enumerate()
        .map(|(lambda, &b)| {
            let mut balances = vec![0; n];
            balances[0] = b;
            balances[n - 1] = -b;
            Scenario {
                name: format!("{}", lambda + 1),
                balances,
            }
        })
        .collect();
    Instance::new(names(n), list, scenarios).expect("chain is valid")
}

/// Pearl on `vertices` vertices with two arcs per bundle (one fixed, one
/// free) and `scenarios` scenarios of random unit moves.
pub fn large_pearl<R: Rng>(rng: &mut R, vertices: usize, scenarios: usize) -> Instance {
    let mut arcs = Vec::with_capacity(2 * vertices);
    for i in 0..vertices - 1 {
        for (j, kind) in [ArcKind::Fixed, ArcKind::Free].into_iter().enumerate() {
            arcs.push(Arc {
                id: format!("a{i}_{j}"),
                tail: i,
                head: i + 1,
                cost: rng.gen_range(0..10),
                kind,
            });
        }
    }
    let scenarios = (0..scenarios)
        .map(|lambda| {
            let mut balances = vec![0i64; vertices];
            for _ in 0..vertices / 4 {
                let a = rng.gen_range(0..vertices - 1);
                let b = rng.gen_range(a + 1..vertices);
                balances[a] += 1;
                balances[b] -= 1;
            }
            Scenario {
                name: format!("{}", lambda + 1),
                balances,
            }
        })
        .collect();
    Instance::new(names(vertices), arcs, scenarios).expect("pearl is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generators_hit_their_class() {
        let mut rng = StdRng::seed_from_u64(7);
        for class in TargetClass::ALL {
            for _ in 0..5 {
                let g = random_instance(&mut rng, class, &RandomParams::default());
                assert!(g.vertex_count() <= 16, "{class:?}");
            }
        }
    }

    #[test]
    fn sp_edges_reduce() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let (n, edges) = random_sp_edges(&mut rng, 14, 20);
            assert!(n <= 14);
            let g = Instance::new(
                names(n),
                edges
                    .iter()
                    .enumerate()
                    .map(|(k, &(t, h))| Arc {
                        id: format!("a{k}"),
                        tail: t,
                        head: h,
                        cost: 0,
                        kind: ArcKind::Free,
                    })
                    .collect(),
                vec![Scenario {
                    name: "1".into(),
                    balances: vec![0; n],
                }],
            )
            .unwrap();
            let tree = crate::sp::build_sp_tree(&g).unwrap();
            assert_eq!((tree.origin(), tree.target()), (0, 1));
        }
    }
}
