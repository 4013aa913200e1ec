//! Unique source and unique sink: two shortest paths suffice.

use serde_json::json;

use crate::graph::{spanned_mask, topo_order};
use crate::instance::{ArcIdx, Instance, RobustFlow, VertexId};
use crate::solvers::{Method, SolveError, SolveResult};
use crate::sp::check_unique_source_sink;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Path {
    pub cost: i128,
    pub arcs: Vec<ArcIdx>,
}

/// Cheapest (s,t)-path inside `mask`, optionally avoiding fixed arcs. Among
/// equal-cost paths the lexicographically smallest arc-id sequence wins.
pub(crate) fn shortest_path(
    g: &Instance,
    mask: &[bool],
    order: &[VertexId],
    s: VertexId,
    t: VertexId,
    allow_fixed: bool,
) -> Option<Path> {
    let n = g.vertex_count();
    let mut dist: Vec<Option<i128>> = vec![None; n];
    let mut next: Vec<Option<ArcIdx>> = vec![None; n];
    dist[t] = Some(0);
    for &x in order.iter().rev() {
        if x == t {
            continue;
        }
        for &a in g.out_arcs(x) {
            let arc = g.arc(a);
            if !mask[arc.head] || (arc.is_fixed() && !allow_fixed) {
                continue;
            }
            let Some(dh) = dist[arc.head] else { continue };
            let cand = dh + arc.cost as i128;
            let better = match (dist[x], next[x]) {
                (Some(d), Some(b)) => cand < d || (cand == d && arc.id < g.arc(b).id),
                _ => true,
            };
            if better {
                dist[x] = Some(cand);
                next[x] = Some(a);
            }
        }
    }
    let cost = dist[s]?;
    let mut arcs = Vec::new();
    let mut v = s;
    while v != t {
        let a = next[v]?;
        arcs.push(a);
        v = g.arc(a).head;
    }
    Some(Path { cost, arcs })
}

/// What the two-path routine decided, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RouteReport {
    pub fixed_path_cost: Option<i128>,
    pub free_path_cost: Option<i128>,
    pub fixed_branch: bool,
}

impl RouteReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "fixed_path_cost": self.fixed_path_cost,
            "free_path_cost": self.free_path_cost,
            "fixed_branch": self.fixed_branch,
            "path_cost_tie": self.fixed_path_cost.is_some() && self.fixed_path_cost == self.free_path_cost,
        })
    }
}

/// Routes `supply[λ]` units from `s` to `t` inside `mask` (an acyclic
/// subgraph spanned by `s` and `t`) and adds the result to `out`.
///
/// The smallest supply travels on the cheapest path overall if that path is
/// strictly cheaper than the cheapest free path; the excess of every other
/// scenario takes the free path.
pub(crate) fn route_single(
    g: &Instance,
    mask: &[bool],
    s: VertexId,
    t: VertexId,
    supply: &[i64],
    out: &mut [Vec<i64>],
) -> Result<RouteReport, SolveError> {
    let mut report = RouteReport {
        fixed_path_cost: None,
        free_path_cost: None,
        fixed_branch: false,
    };
    if supply.iter().all(|&b| b == 0) {
        return Ok(report);
    }
    if supply.iter().any(|&b| b < 0) {
        return Err(SolveError::Internal(
            "negative supply at a unique source".into(),
        ));
    }
    let order = topo_order(g, Some(mask))
        .ok_or_else(|| SolveError::NotThisCase("subgraph has a cycle".into()))?;
    let p_fix = shortest_path(g, mask, &order, s, t, true).ok_or_else(|| {
        SolveError::Infeasible(format!(
            "no path from {} to {}",
            g.vertex_name(s),
            g.vertex_name(t)
        ))
    })?;
    let p_free = shortest_path(g, mask, &order, s, t, false);
    report.fixed_path_cost = Some(p_fix.cost);
    report.free_path_cost = p_free.as_ref().map(|p| p.cost);
    let min_supply = *supply.iter().min().unwrap();
    report.fixed_branch = p_free.as_ref().is_none_or(|p| p_fix.cost < p.cost);
    if report.fixed_branch {
        if p_free.is_none() && supply.iter().any(|&b| b != min_supply) {
            return Err(SolveError::Infeasible(format!(
                "supplies differ across scenarios but every path from {} to {} uses a fixed arc",
                g.vertex_name(s),
                g.vertex_name(t)
            )));
        }
        for (lambda, &b) in supply.iter().enumerate() {
            for &a in &p_fix.arcs {
                out[lambda][a] += min_supply;
            }
            if let Some(p) = &p_free {
                for &a in &p.arcs {
                    out[lambda][a] += b - min_supply;
                }
            }
        }
    } else {
        let p = p_free.expect("free branch has a free path");
        for (lambda, &b) in supply.iter().enumerate() {
            for &a in &p.arcs {
                out[lambda][a] += b;
            }
        }
    }
    Ok(report)
}

/// Unique source, unique sink, series-parallel spanned subgraph.
pub fn solve_unique_source_sink(instance: &Instance) -> Result<SolveResult, SolveError> {
    let (s, t) = check_unique_source_sink(instance).map_err(SolveError::NotThisCase)?;
    let mask = spanned_mask(instance, s, t, None);
    let supply: Vec<i64> = (0..instance.scenario_count())
        .map(|l| instance.balance(l, s))
        .collect();
    let mut flow = RobustFlow::zero(instance);
    let report = route_single(instance, &mask, s, t, &supply, &mut flow.per_scenario)?;
    SolveResult::new(
        instance,
        flow,
        Method::UniqueSourceUniqueSink,
        report.to_json(),
    )
}
