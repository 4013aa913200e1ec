//! Exact solver for arbitrary instances at desk scale.
//!
//! Once the flow on every fixed arc is known, the scenarios decouple into
//! independent transshipment problems on the free arcs. The oracle enumerates
//! fixed-arc values depth first in lexicographic order and completes each
//! assignment with a min-cost flow. Partial assignments are pruned by solving
//! every scenario with the unassigned fixed arcs relaxed to capacity `U`: an
//! infeasible relaxation discards the subtree, and the largest relaxed
//! scenario cost is a lower bound on the subtree's robust cost.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde_json::json;

use crate::graph::is_acyclic;
use crate::instance::{robust_cost, total_supply, ArcIdx, Instance, RobustFlow};
use crate::solvers::{Method, SolveError, SolveResult};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// An arc of a standalone transshipment problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransArc {
    pub tail: usize,
    pub head: usize,
    pub cost: i64,
    /// `None` means uncapacitated.
    pub capacity: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transshipment {
    pub flow: Vec<i64>,
    pub cost: i128,
}

struct Residual {
    head: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i128>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Residual {
            head: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, u: usize, v: usize, cap: i64, cost: i128) -> usize {
        let e = self.head.len();
        self.head.extend([v, u]);
        self.cap.extend([cap, 0]);
        self.cost.extend([cost, -cost]);
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
        e
    }
}

/// Integral min-cost flow meeting every balance, or `None` if infeasible.
///
/// Successive shortest paths with node potentials. Uncapacitated arcs are
/// capped at the total supply, which no acyclic optimum exceeds. Among
/// equal-cost optima the one with the fewest arc-units is preferred, so
/// results do not wander onto zero-cost detours.
pub fn min_cost_transshipment(
    vertex_count: usize,
    arcs: &[TransArc],
    balances: &[i64],
) -> Option<Transshipment> {
    let supply: i64 = balances.iter().filter(|&&b| b > 0).sum();
    if balances.iter().map(|&b| b as i128).sum::<i128>() != 0 {
        return None;
    }
    let n = vertex_count + 2;
    let (src, snk) = (vertex_count, vertex_count + 1);
    let scale = arcs.len() as i128 * supply.max(1) as i128 + 1;
    let mut g = Residual::new(n);
    let ids: Vec<usize> = arcs
        .iter()
        .map(|a| {
            let cap = a.capacity.unwrap_or(supply).min(supply);
            g.add(a.tail, a.head, cap, a.cost as i128 * scale + 1)
        })
        .collect();
    for (v, &b) in balances.iter().enumerate() {
        if b > 0 {
            g.add(src, v, b, 0);
        } else if b < 0 {
            g.add(v, snk, -b, 0);
        }
    }

    let mut potential = vec![0i128; n];
    let mut sent = 0i64;
    let mut dist = vec![i128::MAX; n];
    let mut via = vec![usize::MAX; n];
    while sent < supply {
        dist.iter_mut().for_each(|d| *d = i128::MAX);
        via.iter_mut().for_each(|e| *e = usize::MAX);
        dist[src] = 0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0i128, src)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &e in &g.adj[u] {
                if g.cap[e] == 0 {
                    continue;
                }
                let v = g.head[e];
                let nd = d + g.cost[e] + potential[u] - potential[v];
                if nd < dist[v] {
                    dist[v] = nd;
                    via[v] = e;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        if dist[snk] == i128::MAX {
            return None;
        }
        for v in 0..n {
            potential[v] += dist[v].min(dist[snk]);
        }
        let mut push = supply - sent;
        let mut v = snk;
        while v != src {
            let e = via[v];
            push = push.min(g.cap[e]);
            v = g.head[e ^ 1];
        }
        let mut v = snk;
        while v != src {
            let e = via[v];
            g.cap[e] -= push;
            g.cap[e ^ 1] += push;
            v = g.head[e ^ 1];
        }
        sent += push;
    }
    let flow: Vec<i64> = ids.iter().map(|&e| g.cap[e ^ 1]).collect();
    let cost = arcs
        .iter()
        .zip(&flow)
        .map(|(a, &f)| a.cost as i128 * f as i128)
        .sum();
    Some(Transshipment { flow, cost })
}

/// Values for the fixed arcs, aligned with [`Instance::fixed_arcs`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FixedAssignment {
    pub arcs: Vec<ArcIdx>,
    pub values: Vec<i64>,
}

impl FixedAssignment {
    pub fn new(instance: &Instance, values: Vec<i64>) -> Self {
        let arcs = instance.fixed_arcs();
        assert_eq!(arcs.len(), values.len(), "one value per fixed arc");
        FixedAssignment { arcs, values }
    }

    /// Assignment from (arc id, value) pairs; unmentioned fixed arcs get 0.
    pub fn from_ids(instance: &Instance, pairs: &[(&str, i64)]) -> Option<Self> {
        let arcs = instance.fixed_arcs();
        let mut values = vec![0; arcs.len()];
        for (id, v) in pairs {
            let a = instance.arc_by_id(id)?;
            let pos = arcs.iter().position(|&x| x == a)?;
            values[pos] = *v;
        }
        Some(FixedAssignment { arcs, values })
    }

    pub fn by_id(&self, instance: &Instance) -> BTreeMap<String, i64> {
        self.arcs
            .iter()
            .zip(&self.values)
            .map(|(&a, &v)| (instance.arc(a).id.clone(), v))
            .collect()
    }
}

/// Per-scenario solve with the fixed arcs pinned (`Some`) or relaxed to
/// capacity `cap` (`None`).
struct ScenarioSolver<'a> {
    instance: &'a Instance,
    fixed: Vec<ArcIdx>,
    free: Vec<ArcIdx>,
    solves: u64,
    budget: u64,
}

impl<'a> ScenarioSolver<'a> {
    fn new(instance: &'a Instance, budget: u64) -> Self {
        let fixed = instance.fixed_arcs();
        let free = (0..instance.arc_count())
            .filter(|&a| !instance.arc(a).is_fixed())
            .collect();
        ScenarioSolver {
            instance,
            fixed,
            free,
            solves: 0,
            budget,
        }
    }

    /// Returns the scenario flow over all arcs and its cost.
    fn solve(
        &mut self,
        lambda: usize,
        values: &[Option<i64>],
        cap: i64,
    ) -> Result<Option<(Vec<i64>, i128)>, SolveError> {
        self.solves += 1;
        if self.solves > self.budget {
            return Err(SolveError::BudgetExceeded {
                solves: self.solves,
            });
        }
        let inst = self.instance;
        let mut balances = inst.balances(lambda).to_vec();
        let mut arcs = Vec::with_capacity(inst.arc_count());
        let mut owner = Vec::with_capacity(inst.arc_count());
        for (&a, value) in self.fixed.iter().zip(values) {
            let arc = inst.arc(a);
            match value {
                Some(x) => {
                    balances[arc.tail] -= x;
                    balances[arc.head] += x;
                }
                None => {
                    arcs.push(TransArc {
                        tail: arc.tail,
                        head: arc.head,
                        cost: arc.cost,
                        capacity: Some(cap),
                    });
                    owner.push(a);
                }
            }
        }
        for &a in &self.free {
            let arc = inst.arc(a);
            arcs.push(TransArc {
                tail: arc.tail,
                head: arc.head,
                cost: arc.cost,
                capacity: None,
            });
            owner.push(a);
        }
        if !repairable(inst, &balances, &arcs) {
            return Ok(None);
        }
        let Some(t) = min_cost_transshipment(inst.vertex_count(), &arcs, &balances) else {
            return Ok(None);
        };
        let mut flow = vec![0i64; inst.arc_count()];
        for (&a, &x) in owner.iter().zip(&t.flow) {
            flow[a] = x;
        }
        let mut cost = t.cost;
        for (&a, value) in self.fixed.iter().zip(values) {
            if let Some(x) = value {
                flow[a] = *x;
                cost += inst.arc(a).cost as i128 * *x as i128;
            }
        }
        Ok(Some((flow, cost)))
    }
}

/// Quick conservation check: a vertex with residual supply needs an outgoing
/// arc, a vertex with residual demand an incoming one.
fn repairable(instance: &Instance, balances: &[i64], arcs: &[TransArc]) -> bool {
    let mut has_out = vec![false; instance.vertex_count()];
    let mut has_in = vec![false; instance.vertex_count()];
    for a in arcs {
        has_out[a.tail] = true;
        has_in[a.head] = true;
    }
    balances
        .iter()
        .enumerate()
        .all(|(v, &b)| (b <= 0 || has_out[v]) && (b >= 0 || has_in[v]))
}

/// Completes a fixed assignment by solving each scenario separately on the free arcs.
pub fn solve_with_fixed_values(
    instance: &Instance,
    fa: &FixedAssignment,
) -> Result<RobustFlow, SolveError> {
    if fa.arcs != instance.fixed_arcs() {
        return Err(SolveError::NotThisCase(
            "assignment does not key exactly the fixed arcs".into(),
        ));
    }
    if fa.values.iter().any(|&v| v < 0) {
        return Err(SolveError::Infeasible("negative fixed-arc value".into()));
    }
    let mut solver = ScenarioSolver::new(instance, u64::MAX);
    let values: Vec<Option<i64>> = fa.values.iter().map(|&v| Some(v)).collect();
    let mut flow = RobustFlow::zero(instance);
    for lambda in 0..instance.scenario_count() {
        match solver.solve(lambda, &values, 0)? {
            Some((f, _)) => flow.per_scenario[lambda] = f,
            None => {
                return Err(SolveError::Infeasible(format!(
                    "scenario {} has no completion",
                    instance.scenarios()[lambda].name
                )))
            }
        }
    }
    Ok(flow)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Upper bound `U` on fixed-arc values; defaults to the largest scenario supply.
    pub bound: Option<i64>,
    /// Maximum number of per-scenario transshipment solves.
    pub budget: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            bound: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Effective enumeration bound. On acyclic digraphs no arc can carry more
/// than the supply of any single scenario, so the smallest supply suffices.
pub fn enumeration_bound(instance: &Instance, bound: Option<i64>) -> i64 {
    let supplies: Vec<i64> = (0..instance.scenario_count())
        .map(|l| total_supply(instance, l))
        .collect();
    let mut u = bound.unwrap_or_else(|| supplies.iter().copied().max().unwrap_or(0));
    if is_acyclic(instance) {
        u = u.min(supplies.iter().copied().min().unwrap_or(0));
    }
    u.max(0)
}

struct Search<'a> {
    solver: ScenarioSolver<'a>,
    bound: i64,
    values: Vec<Option<i64>>,
    nodes: u64,
}

/// Per-scenario flows with the worst scenario cost.
type Relaxed = (Vec<Vec<i64>>, i128);

impl Search<'_> {
    /// Solves all scenarios under the current partial assignment.
    fn relax(&mut self) -> Result<Option<Relaxed>, SolveError> {
        let k = self.solver.instance.scenario_count();
        let mut flows = Vec::with_capacity(k);
        let mut worst = 0i128;
        for lambda in 0..k {
            let values = self.values.clone();
            match self.solver.solve(lambda, &values, self.bound)? {
                Some((f, c)) => {
                    worst = worst.max(c);
                    flows.push(f);
                }
                None => return Ok(None),
            }
        }
        Ok(Some((flows, worst)))
    }

    /// Visits feasible complete assignments in lexicographic order. `visit`
    /// returns a cost threshold: subtrees whose bound reaches it are skipped.
    fn run(
        &mut self,
        depth: usize,
        threshold: &mut Option<i128>,
        visit: &mut dyn FnMut(&[i64], Relaxed) -> Option<i128>,
    ) -> Result<(), SolveError> {
        self.nodes += 1;
        let Some((flows, lower)) = self.relax()? else {
            return Ok(());
        };
        if threshold.is_some_and(|t| lower >= t) {
            return Ok(());
        }
        if depth == self.values.len() {
            let values: Vec<i64> = self.values.iter().map(|v| v.unwrap()).collect();
            if let Some(t) = visit(&values, (flows, lower)) {
                *threshold = Some(threshold.map_or(t, |old| old.min(t)));
            }
            return Ok(());
        }
        for x in 0..=self.bound {
            self.values[depth] = Some(x);
            self.run(depth + 1, threshold, visit)?;
        }
        self.values[depth] = None;
        Ok(())
    }
}

/// Statistics of an enumeration run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub bound: i64,
    pub nodes: u64,
    pub solves: u64,
}

fn search<'a>(instance: &'a Instance, options: &OracleOptions) -> Search<'a> {
    let bound = enumeration_bound(instance, options.bound);
    let fixed = instance.fixed_arcs().len();
    Search {
        solver: ScenarioSolver::new(instance, options.budget),
        bound,
        values: vec![None; fixed],
        nodes: 0,
    }
}

/// Calls `visit` for every feasible fixed assignment with the per-scenario
/// cheapest completion of each scenario.
pub fn enumerate_feasible(
    instance: &Instance,
    options: &OracleOptions,
    mut visit: impl FnMut(&FixedAssignment, &RobustFlow),
) -> Result<SearchStats, SolveError> {
    let mut s = search(instance, options);
    let fixed = instance.fixed_arcs();
    let mut threshold = None;
    s.run(0, &mut threshold, &mut |values, (flows, _)| {
        let fa = FixedAssignment {
            arcs: fixed.clone(),
            values: values.to_vec(),
        };
        visit(
            &fa,
            &RobustFlow {
                per_scenario: flows,
            },
        );
        None
    })?;
    Ok(SearchStats {
        bound: s.bound,
        nodes: s.nodes,
        solves: s.solver.solves,
    })
}

/// Minimum robust cost over all fixed assignments with values in `0..=U`.
/// Among optimal assignments the lexicographically smallest is returned.
pub fn brute_force_optimal(
    instance: &Instance,
    bound: Option<i64>,
) -> Result<SolveResult, SolveError> {
    brute_force_optimal_with(
        instance,
        &OracleOptions {
            bound,
            ..OracleOptions::default()
        },
    )
}

pub fn brute_force_optimal_with(
    instance: &Instance,
    options: &OracleOptions,
) -> Result<SolveResult, SolveError> {
    let mut s = search(instance, options);
    let mut best: Option<(i128, Vec<i64>, Vec<Vec<i64>>)> = None;
    let mut threshold = None;
    s.run(0, &mut threshold, &mut |values, (flows, cost)| {
        if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
            best = Some((cost, values.to_vec(), flows));
        }
        Some(cost)
    })?;
    let stats = SearchStats {
        bound: s.bound,
        nodes: s.nodes,
        solves: s.solver.solves,
    };
    let Some((cost, values, flows)) = best else {
        return Err(SolveError::Infeasible(format!(
            "no fixed-arc assignment with values up to {} admits a feasible flow",
            stats.bound
        )));
    };
    let flow = RobustFlow {
        per_scenario: flows,
    };
    debug_assert_eq!(robust_cost(instance, &flow).ok(), Some(cost));
    let fa = FixedAssignment {
        arcs: instance.fixed_arcs(),
        values,
    };
    let diagnostics = json!({
        "bound": stats.bound,
        "search_nodes": stats.nodes,
        "transshipment_solves": stats.solves,
        "fixed_values": fa.by_id(instance),
    });
    SolveResult::new(instance, flow, Method::Oracle, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceBuilder;

    fn fig1() -> Instance {
        InstanceBuilder::new()
            .fixed("sv", "s", "v", 2)
            .free("vt1", "v", "t1", 2)
            .free("vt2", "v", "t2", 0)
            .free("st1", "s", "t1", 0)
            .free("st2", "s", "t2", 4)
            .scenario("1", &[("s", 1), ("t1", -1)])
            .scenario("2", &[("s", 1), ("t2", -1)])
            .build()
            .unwrap()
    }

    #[test]
    fn single_arc_transshipment() {
        let arcs = [TransArc {
            tail: 0,
            head: 1,
            cost: 5,
            capacity: None,
        }];
        let t = min_cost_transshipment(2, &arcs, &[2, -2]).unwrap();
        assert_eq!(t.flow, vec![2]);
        assert_eq!(t.cost, 10);
        assert!(min_cost_transshipment(2, &arcs, &[-2, 2]).is_none());
    }

    #[test]
    fn second_scenario_of_fig1_alone() {
        let g = fig1();
        let arcs: Vec<TransArc> = g
            .arcs()
            .iter()
            .map(|a| TransArc {
                tail: a.tail,
                head: a.head,
                cost: a.cost,
                capacity: None,
            })
            .collect();
        let t = min_cost_transshipment(g.vertex_count(), &arcs, g.balances(1)).unwrap();
        assert_eq!(t.cost, 2);
        let free_only: Vec<TransArc> = arcs
            .iter()
            .zip(g.arcs())
            .filter(|(_, a)| !a.is_fixed())
            .map(|(t, _)| *t)
            .collect();
        let t = min_cost_transshipment(g.vertex_count(), &free_only, g.balances(1)).unwrap();
        assert_eq!(t.cost, 4);
    }

    #[test]
    fn fixed_zero_on_fig1() {
        let g = fig1();
        let fa = FixedAssignment::from_ids(&g, &[("sv", 0)]).unwrap();
        let f = solve_with_fixed_values(&g, &fa).unwrap();
        assert_eq!(f.get(0, g.arc_by_id("st1").unwrap()), 1);
        assert_eq!(f.get(1, g.arc_by_id("st2").unwrap()), 1);
        assert_eq!(robust_cost(&g, &f).unwrap(), 4);
    }

    #[test]
    fn fixed_one_on_fig1() {
        let g = fig1();
        let fa = FixedAssignment::from_ids(&g, &[("sv", 1)]).unwrap();
        let f = solve_with_fixed_values(&g, &fa).unwrap();
        assert_eq!(crate::instance::scenario_cost(&g, &f, 0).unwrap(), 4);
        assert_eq!(crate::instance::scenario_cost(&g, &f, 1).unwrap(), 2);
        assert_eq!(robust_cost(&g, &f).unwrap(), 4);
    }

    #[test]
    fn fixed_value_above_supply_is_infeasible() {
        let g = fig1();
        let fa = FixedAssignment::from_ids(&g, &[("sv", 2)]).unwrap();
        assert!(matches!(
            solve_with_fixed_values(&g, &fa),
            Err(SolveError::Infeasible(_))
        ));
    }

    #[test]
    fn fig1_optimum_and_lexicographic_argmin() {
        let g = fig1();
        let r = brute_force_optimal(&g, None).unwrap();
        assert_eq!(r.cost, 4);
        assert_eq!(r.flow.get(0, g.arc_by_id("sv").unwrap()), 0);
    }

    #[test]
    fn budget_is_enforced() {
        let g = fig1();
        let r = brute_force_optimal_with(
            &g,
            &OracleOptions {
                bound: None,
                budget: 1,
            },
        );
        assert!(matches!(r, Err(SolveError::BudgetExceeded { .. })));
    }

    #[test]
    fn zero_balances_give_zero_flow() {
        let g = InstanceBuilder::new()
            .fixed("a", "x", "y", 3)
            .scenario("1", &[])
            .build()
            .unwrap();
        let r = brute_force_optimal(&g, None).unwrap();
        assert_eq!(r.cost, 0);
    }
}
