mod common;

use cflow::instance::{robust_cost, scenario_cost};
use cflow::oracle::{brute_force_optimal, solve_with_fixed_values, FixedAssignment};
use cflow::solvers::{compute_states, solve, Method};
use cflow::sp::{
    are_parallel, build_label_tree, classify_instance, compute_sink_labels, spanned_subgraph,
    InstanceClass,
};
use common::{fixture, v};

fn names(g: &cflow::Instance, vs: &[usize]) -> Vec<String> {
    let mut out: Vec<String> = vs.iter().map(|&x| g.vertex_name(x).to_string()).collect();
    out.sort();
    out
}

#[test]
fn triangle_with_two_sinks_costs_four() {
    let g = fixture("fig1.json");
    let r = solve(&g, true).unwrap();
    assert_eq!(r.cost, 4);
    assert_eq!(r.scenario_costs, vec![0, 4]);
    assert_eq!(brute_force_optimal(&g, None).unwrap().cost, 4);
    let st1 = g.arc_by_id("st1").unwrap();
    let st2 = g.arc_by_id("st2").unwrap();
    assert_eq!(r.flow.get(0, st1), 1);
    assert_eq!(r.flow.get(1, st2), 1);
}

#[test]
fn triangle_with_two_sinks_is_not_series_parallel() {
    // The reachable subgraph keeps both sinks as targets and no completion
    // makes it series-parallel, so dispatch falls through to the oracle.
    let g = fixture("fig1.json");
    assert!(matches!(
        classify_instance(&g),
        InstanceClass::General { .. }
    ));
    assert_eq!(solve(&g, true).unwrap().method, Method::Oracle);
    assert!(are_parallel(&g, &[v(&g, "t1"), v(&g, "t2")]));
}

#[test]
fn triangle_with_fixed_value_one_still_costs_four() {
    let g = fixture("fig1.json");
    let fa = FixedAssignment::from_ids(&g, &[("sv", 1)]).unwrap();
    let flow = solve_with_fixed_values(&g, &fa).unwrap();
    assert_eq!(scenario_cost(&g, &flow, 0).unwrap(), 4);
    assert_eq!(scenario_cost(&g, &flow, 1).unwrap(), 2);
    assert_eq!(robust_cost(&g, &flow).unwrap(), 4);
}

#[test]
fn label_example_labels() {
    let g = fixture("fig7.json");
    let labels = compute_sink_labels(&g);
    let label = |x: &str| names(&g, &labels.sink_set(v(&g, x)));
    let all = vec!["t1_1", "t1_2", "t1_3", "t2_1", "t2_2", "t2_3"];
    assert_eq!(label("s"), all);
    assert_eq!(label("v1"), all);
    assert_eq!(label("v2"), vec!["t1_1", "t2_1"]);
    assert_eq!(label("v3"), vec!["t1_2", "t1_3", "t2_2", "t2_3"]);
    assert_eq!(label("v5"), label("v3"));
    assert_eq!(label("v4"), vec!["t1_2", "t2_2"]);
    assert_eq!(label("v6"), vec!["t1_3", "t2_3"]);
    assert_eq!(label("v7"), vec!["t1_2"]);
    assert_eq!(label("t1_2"), vec!["t1_2"]);
    for x in ["v8", "v9", "v10", "v11"] {
        assert!(label(x).is_empty(), "{x}");
    }
}

#[test]
fn label_example_tree() {
    let g = fixture("fig7.json");
    let labels = compute_sink_labels(&g);
    let tree = build_label_tree(&g, &labels).unwrap();
    let mut arcs: Vec<(String, String)> = tree
        .arcs
        .iter()
        .map(|&(a, b)| (g.vertex_name(a).to_string(), g.vertex_name(b).to_string()))
        .collect();
    arcs.sort();
    let mut expected: Vec<(String, String)> = [
        ("s", "v1"),
        ("v1", "v2"),
        ("v1", "v5"),
        ("v2", "t1_1"),
        ("v2", "t2_1"),
        ("v5", "v4"),
        ("v5", "v6"),
        ("v4", "t1_2"),
        ("v4", "t2_2"),
        ("v6", "t1_3"),
        ("v6", "t2_3"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    expected.sort();
    assert_eq!(arcs, expected);
}

#[test]
fn label_example_spanned_subgraph() {
    let g = fixture("fig7.json");
    let sub = spanned_subgraph(&g, v(&g, "v1"), v(&g, "v5")).unwrap();
    assert_eq!(names(&g, &sub.vertices), vec!["v1", "v3", "v5"]);
    let mut ids: Vec<&str> = sub.arcs.iter().map(|&a| g.arc(a).id.as_str()).collect();
    ids.sort();
    assert_eq!(ids, vec!["v1-v3", "v1-v3x", "v1-v5", "v3-v5"]);
}

#[test]
fn label_example_solves_to_oracle_optimum() {
    let g = fixture("fig7.json");
    assert!(matches!(
        classify_instance(&g),
        InstanceClass::UniqueSourceParallelSinks { .. }
    ));
    let r = solve(&g, false).unwrap();
    assert_eq!(r.method, Method::UniqueSourceParallelSinks);
    // Frozen from the oracle.
    assert_eq!(r.cost, 91);
    assert_eq!(brute_force_optimal(&g, None).unwrap().cost, r.cost);
}

#[test]
fn pearl_example_states() {
    let g = fixture("fig8.json");
    let t = compute_states(&g).unwrap();
    assert_eq!(names(&g, &t.order), names(&g, &(0..9).collect::<Vec<_>>()));
    assert_eq!(t.sigma[0], vec![4, 6, 6, 5, 6, 6, 6, 5, 0]);
    assert_eq!(t.sigma[1], vec![3, 9, 6, 6, 6, 3, 0, 0, 0]);
    assert_eq!(t.sigma_min, vec![3, 6, 6, 5, 6, 3, 0, 0, 0]);
}

#[test]
fn pearl_example_flows() {
    let g = fixture("fig8.json");
    let r = solve(&g, false).unwrap();
    assert_eq!(r.method, Method::Pearl);
    let at = |id: &str, l: usize| r.flow.get(l, g.arc_by_id(id).unwrap());
    for l in 0..2 {
        let fixed: Vec<i64> = ["b1-fixed", "b2-fixed", "b4-fixed", "b5-fixed", "b6-fixed"]
            .iter()
            .map(|id| at(id, l))
            .collect();
        assert_eq!(fixed, vec![3, 6, 5, 6, 3]);
        // Fixed arcs no cheaper than the free arc beside them stay empty.
        assert_eq!(at("b7-fixed", l), 0);
        assert_eq!(at("b8-fixed", l), 0);
    }
    let free1: Vec<i64> = ["b1-free", "b2-free", "b4-free", "b5-free", "b6-free"]
        .iter()
        .map(|id| at(id, 0))
        .collect();
    assert_eq!(free1, vec![1, 0, 0, 0, 3]);
    assert_eq!(
        (at("b3-free", 0), at("b7-free", 0), at("b8-free", 0)),
        (6, 6, 5)
    );
    assert_eq!(r.cost, brute_force_optimal(&g, None).unwrap().cost);
    assert_eq!(r.cost, 59);
}
