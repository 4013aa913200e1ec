//! Tree-shaped cases: one source fanning out to parallel sinks, its mirror
//! image, and the three-way split for parallel sources and sinks.

use serde_json::{json, Value};

use crate::graph::{reach_backward, reach_forward, spanned_mask};
use crate::instance::{reverse_instance, total_supply, Instance, RobustFlow, VertexId};
use crate::solvers::unique::route_single;
use crate::solvers::{Method, SolveError, SolveResult};
use crate::sp::{
    check_parallel_sources_parallel_sinks, check_parallel_sources_unique_sink,
    check_unique_source_parallel_sinks, label_tree_on, labels_on,
};

/// Routes flow from `s` to the sinks inside `mask`, one two-path problem per
/// label tree arc. `balances[λ]` is indexed by vertex; only masked vertices
/// other than `s` are read as demands. Flow is added to `out`.
pub(crate) fn route_tree(
    g: &Instance,
    mask: &[bool],
    s: VertexId,
    balances: &[Vec<i64>],
    out: &mut [Vec<i64>],
) -> Result<Value, SolveError> {
    let n = g.vertex_count();
    let sinks: Vec<VertexId> = (0..n)
        .filter(|&v| v != s && mask[v] && balances.iter().any(|b| b[v] != 0))
        .collect();
    if let Some(&v) = sinks.iter().find(|&&v| balances.iter().any(|b| b[v] > 0)) {
        return Err(SolveError::NotThisCase(format!(
            "vertex {} supplies flow but is not the source",
            g.vertex_name(v)
        )));
    }
    if sinks.is_empty() {
        return Ok(json!({ "label_tree": [] }));
    }
    let labels = labels_on(g, mask, &sinks);
    let tree =
        label_tree_on(g, mask, s, &labels).map_err(|e| SolveError::NotThisCase(e.to_string()))?;
    let mut arcs_diag = Vec::new();
    for &(v, w) in &tree.arcs {
        let demand: Vec<i64> = balances
            .iter()
            .map(|b| -labels.sink_set(w).iter().map(|&t| b[t]).sum::<i64>())
            .collect();
        let sub = spanned_mask(g, v, w, Some(mask));
        let report = route_single(g, &sub, v, w, &demand, out)?;
        let mut entry = report.to_json();
        entry["from"] = json!(g.vertex_name(v));
        entry["to"] = json!(g.vertex_name(w));
        entry["amount"] = json!(demand);
        arcs_diag.push(entry);
    }
    Ok(json!({ "label_tree": arcs_diag }))
}

fn scenario_balances(g: &Instance) -> Vec<Vec<i64>> {
    g.scenarios().iter().map(|s| s.balances.clone()).collect()
}

/// Unique source whose reachable subgraph is SP, with parallel sinks.
pub fn solve_unique_source_parallel_sinks(instance: &Instance) -> Result<SolveResult, SolveError> {
    let (s, _, mask) =
        check_unique_source_parallel_sinks(instance).map_err(SolveError::NotThisCase)?;
    let mut flow = RobustFlow::zero(instance);
    let diag = route_tree(
        instance,
        &mask,
        s,
        &scenario_balances(instance),
        &mut flow.per_scenario,
    )?;
    SolveResult::new(instance, flow, Method::UniqueSourceParallelSinks, diag)
}

/// Parallel sources and a unique sink, solved on the reversed digraph.
pub fn solve_parallel_sources_unique_sink(instance: &Instance) -> Result<SolveResult, SolveError> {
    check_parallel_sources_unique_sink(instance).map_err(SolveError::NotThisCase)?;
    let reversed = reverse_instance(instance);
    let (t, _, mask) =
        check_unique_source_parallel_sinks(&reversed).map_err(SolveError::NotThisCase)?;
    let mut flow = RobustFlow::zero(instance);
    let diag = route_tree(
        &reversed,
        &mask,
        t,
        &scenario_balances(&reversed),
        &mut flow.per_scenario,
    )?;
    SolveResult::new(
        instance,
        flow,
        Method::ParallelSourcesUniqueSink,
        json!({ "reversed": diag }),
    )
}

/// Parallel sources and parallel sinks joined through a common first and
/// last vertex. The instance splits into a gathering tree into the first
/// vertex, a two-path problem between the two, and a distribution tree.
pub fn solve_parallel_sources_parallel_sinks(
    instance: &Instance,
) -> Result<SolveResult, SolveError> {
    let split = check_parallel_sources_parallel_sinks(instance).map_err(SolveError::NotThisCase)?;
    let (v1, v2) = (split.first, split.last);
    let totals: Vec<i64> = (0..instance.scenario_count())
        .map(|l| total_supply(instance, l))
        .collect();
    let mut flow = RobustFlow::zero(instance);

    let reversed = reverse_instance(instance);
    let gather_mask = reach_backward(instance, &[v1], None);
    let mut gather_bal = scenario_balances(&reversed);
    for (b, &total) in gather_bal.iter_mut().zip(&totals) {
        b[v1] = total;
    }
    let gather = route_tree(
        &reversed,
        &gather_mask,
        v1,
        &gather_bal,
        &mut flow.per_scenario,
    )?;

    let middle = if v1 != v2 {
        let mask = spanned_mask(instance, v1, v2, None);
        route_single(instance, &mask, v1, v2, &totals, &mut flow.per_scenario)?.to_json()
    } else {
        Value::Null
    };

    let spread_mask = reach_forward(instance, &[v2], None);
    let mut spread_bal = scenario_balances(instance);
    for (b, &total) in spread_bal.iter_mut().zip(&totals) {
        b[v2] = total;
    }
    let spread = route_tree(
        instance,
        &spread_mask,
        v2,
        &spread_bal,
        &mut flow.per_scenario,
    )?;

    let diag = json!({
        "first": instance.vertex_name(v1),
        "last": instance.vertex_name(v2),
        "gather": gather,
        "middle": middle,
        "spread": spread,
    });
    SolveResult::new(instance, flow, Method::ParallelSourcesParallelSinks, diag)
}
