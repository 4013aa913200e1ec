#![allow(dead_code)]

use std::path::PathBuf;

use cflow::format::parse_instance;
use cflow::graph::reach_forward;
use cflow::instance::{reverse_instance, scenario_cost, Arc, ArcKind, Instance, Scenario};
use cflow::oracle::{brute_force_optimal, enumerate_feasible, OracleOptions};
use cflow::random::{random_instance, random_sp_edges, RandomParams, TargetClass};
use cflow::solvers::{solve_with, Method, SolveOptions};
use cflow::sp::{
    build_label_tree, build_sp_tree, compute_sink_labels, is_pearl, pearl_order, pearl_shrink,
    Label,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Instance {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    parse_instance(&text).expect("fixture parses")
}

pub fn v(g: &Instance, name: &str) -> usize {
    g.vertex(name).unwrap_or_else(|| panic!("no vertex {name}"))
}

pub fn seeded(class: TargetClass, seed: u64) -> Instance {
    random_instance(
        &mut StdRng::seed_from_u64(seed),
        class,
        &RandomParams::default(),
    )
}

/// Random two-terminal SP multigraph with random kinds, costs and a single
/// origin-to-target scenario pair.
pub fn seeded_sp(seed: u64) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let (n, edges) = random_sp_edges(&mut rng, 12, 14);
    let arcs = edges
        .iter()
        .enumerate()
        .map(|(i, &(t, h))| Arc {
            id: format!("e{i}"),
            tail: t,
            head: h,
            cost: rng.gen_range(0..6),
            kind: if rng.gen_bool(0.4) {
                ArcKind::Fixed
            } else {
                ArcKind::Free
            },
        })
        .collect();
    let scenarios = (0..2)
        .map(|l| {
            let mut balances = vec![0; n];
            let b = rng.gen_range(1..=3);
            balances[0] = b;
            balances[1] = -b;
            Scenario {
                name: format!("{}", l + 1),
                balances,
            }
        })
        .collect();
    Instance::new((0..n).map(|i| format!("n{i}")).collect(), arcs, scenarios).expect("valid")
}

pub fn method_for(class: TargetClass) -> Method {
    match class {
        TargetClass::Pearl => Method::Pearl,
        TargetClass::UniqueSourceUniqueSink => Method::UniqueSourceUniqueSink,
        TargetClass::UniqueSourceParallelSinks => Method::UniqueSourceParallelSinks,
        TargetClass::ParallelSourcesUniqueSink => Method::ParallelSourcesUniqueSink,
        TargetClass::ParallelSourcesParallelSinks => Method::ParallelSourcesParallelSinks,
    }
}

fn forced(g: &Instance, method: Method) -> Result<cflow::SolveResult, String> {
    let options = SolveOptions {
        force: Some(method),
        ..SolveOptions::default()
    };
    solve_with(g, &options).map_err(|e| format!("{method}: {e}"))
}

/// Each label tree arc steps to a strictly smaller label.
pub fn label_inclusion(g: &Instance) -> Result<(), String> {
    let labels = compute_sink_labels(g);
    let tree = build_label_tree(g, &labels).map_err(|e| e.to_string())?;
    for &(p, c) in &tree.arcs {
        let (lp, lc) = (labels.label(p).unwrap(), labels.label(c).unwrap());
        let ok = if p == tree.root {
            lc.is_subset(lp)
        } else {
            lc.is_strict_subset(lp)
        };
        if !ok {
            return Err(format!(
                "label of {} does not shrink toward {}",
                g.vertex_name(p),
                g.vertex_name(c)
            ));
        }
    }
    Ok(())
}

/// Every nonempty label value reachable from the source has exactly one last vertex.
pub fn last_vertex_uniqueness(g: &Instance) -> Result<(), String> {
    let labels = compute_sink_labels(g);
    let tree = build_label_tree(g, &labels).map_err(|e| e.to_string())?;
    let s = tree.root;
    // The source is itself the last vertex of its label unless a tree arc
    // (s, w) hands that label to w.
    let mut last: Vec<&Label> = tree.nodes[1..]
        .iter()
        .map(|&x| labels.label(x).unwrap())
        .collect();
    let root_label = labels.label(s).unwrap();
    if !last.contains(&root_label) {
        last.push(root_label);
    }
    let reach = reach_forward(g, &[s], None);
    let mut values: Vec<&Label> = (0..g.vertex_count())
        .filter(|&x| reach[x])
        .filter_map(|x| labels.label(x))
        .filter(|l| !l.is_empty())
        .collect();
    values.sort();
    values.dedup();
    for l in values {
        let count = last.iter().filter(|&&m| m == l).count();
        if count != 1 {
            return Err(format!(
                "label {:?} has {count} last vertices",
                l.iter().collect::<Vec<_>>()
            ));
        }
    }
    Ok(())
}

/// The parallel-sinks solver sends nothing outside the union of spanned subgraphs.
pub fn zero_beyond_covered(g: &Instance) -> Result<(), String> {
    let labels = compute_sink_labels(g);
    let tree = build_label_tree(g, &labels).map_err(|e| e.to_string())?;
    let covered = tree.covered_arcs(g);
    let Ok(r) = forced(g, Method::UniqueSourceParallelSinks) else {
        return Ok(());
    };
    for (a, &c) in covered.iter().enumerate() {
        if !c && (0..g.scenario_count()).any(|l| r.flow.get(l, a) != 0) {
            return Err(format!(
                "arc {} carries flow outside the covered subgraph",
                g.arc(a).id
            ));
        }
    }
    Ok(())
}

/// Reversing twice is the identity and reversal keeps the optimal cost.
pub fn reversal(g: &Instance) -> Result<(), String> {
    let r = reverse_instance(g);
    if reverse_instance(&r) != *g {
        return Err("double reversal changed the instance".into());
    }
    let a = brute_force_optimal(g, None).map(|x| x.cost).ok();
    let b = brute_force_optimal(&r, None).map(|x| x.cost).ok();
    if a != b {
        return Err(format!("optimum {a:?} before reversal, {b:?} after"));
    }
    Ok(())
}

/// Shrinking every bundle to its cheapest fixed and free arc keeps the optimum,
/// and lifting the shrunk optimum gives a flow of the same cost.
pub fn pearl_shrink_preserves_cost(g: &Instance) -> Result<(), String> {
    let (shrunk, map) = pearl_shrink(g).map_err(|e| e.to_string())?;
    let a = brute_force_optimal(g, None);
    let b = brute_force_optimal(&shrunk, None);
    match (a, b) {
        (Ok(a), Ok(b)) => {
            if a.cost != b.cost {
                return Err(format!(
                    "optimum {} before shrinking, {} after",
                    a.cost, b.cost
                ));
            }
            let lifted = map.lift(g, &b.flow);
            let c = cflow::instance::robust_cost(g, &lifted).map_err(|e| e.to_string())?;
            if c != b.cost {
                return Err(format!("lifted flow costs {c}, shrunk optimum {}", b.cost));
            }
            Ok(())
        }
        (Err(_), Err(_)) => Ok(()),
        (a, b) => Err(format!(
            "feasibility differs: {:?} vs {:?}",
            a.map(|r| r.cost),
            b.map(|r| r.cost)
        )),
    }
}

/// The SP tree has one leaf per arc and composes back to the digraph.
pub fn sp_round_trip(g: &Instance) -> Result<(), String> {
    let tree = build_sp_tree(g).map_err(|e| e.to_string())?;
    let mut leaves = tree.leaves();
    leaves.sort_unstable();
    if leaves != (0..g.arc_count()).collect::<Vec<_>>() {
        return Err("leaves are not the arc set".into());
    }
    if !tree.is_consistent(g) {
        return Err("tree does not compose to the digraph".into());
    }
    Ok(())
}

/// Pearl recognition agrees with the tree criterion: no parallel node over a series node.
pub fn pearl_recognition(g: &Instance) -> Result<(), String> {
    let tree = build_sp_tree(g).map_err(|e| e.to_string())?;
    let by_tree = !tree.has_parallel_over_series();
    if is_pearl(g) != by_tree || pearl_order(g).is_some() != by_tree {
        return Err(format!(
            "pearl test disagrees with the SP tree (tree says {by_tree})"
        ));
    }
    Ok(())
}

/// Classified solver cost equals the oracle optimum.
pub fn oracle_equivalence(g: &Instance, class: TargetClass) -> Result<(), String> {
    let r = forced(g, method_for(class));
    let o = brute_force_optimal(g, None);
    match (r, o) {
        (Ok(r), Ok(o)) if r.cost == o.cost => Ok(()),
        (Ok(r), Ok(o)) => Err(format!("solver {} vs oracle {}", r.cost, o.cost)),
        (Err(_), Err(_)) => Ok(()),
        (r, o) => Err(format!(
            "feasibility differs: solver {:?}, oracle {:?}",
            r.map(|x| x.cost),
            o.map(|x| x.cost)
        )),
    }
}

/// The two-path solver is no worse in any scenario than any feasible fixed
/// assignment with per-scenario cheapest completions. Returns the number of
/// assignments compared.
pub fn two_path_dominance(g: &Instance) -> Result<u64, String> {
    let Ok(r) = forced(g, Method::UniqueSourceUniqueSink) else {
        return Ok(0);
    };
    let mut compared = 0;
    let mut failure = None;
    let options = OracleOptions::default();
    enumerate_feasible(g, &options, |fa, flow| {
        compared += 1;
        for l in 0..g.scenario_count() {
            let c = scenario_cost(g, flow, l).unwrap();
            if r.scenario_costs[l] > c && failure.is_none() {
                failure = Some(format!(
                    "scenario {} costs {} but assignment {:?} achieves {c}",
                    l + 1,
                    r.scenario_costs[l],
                    fa.by_id(g)
                ));
            }
        }
    })
    .map_err(|e| e.to_string())?;
    match failure {
        Some(f) => Err(f),
        None => Ok(compared),
    }
}
