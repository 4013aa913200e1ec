//! Instances, robust flows, cost evaluation and feasibility checks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense vertex index.
pub type VertexId = usize;
/// Dense arc index (position in [`Instance::arcs`]).
pub type ArcIdx = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcKind {
    Fixed,
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: String,
    pub tail: VertexId,
    pub head: VertexId,
    pub cost: i64,
    pub kind: ArcKind,
}

impl Arc {
    pub fn is_fixed(&self) -> bool {
        self.kind == ArcKind::Fixed
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    /// Balance per vertex: positive is supply, negative is demand.
    pub balances: Vec<i64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance has no scenarios")]
    NoScenarios,
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate arc id `{0}`")]
    DuplicateArc(String),
    #[error("arc `{arc}` references unknown vertex `{vertex}`")]
    UnknownVertex { arc: String, vertex: String },
    #[error("arc `{0}` has a negative cost")]
    NegativeCost(String),
    #[error("scenario `{scenario}` references unknown vertex `{vertex}`")]
    UnknownBalanceVertex { scenario: String, vertex: String },
    #[error("scenario `{scenario}` has {found} balances for {expected} vertices")]
    BalanceLength {
        scenario: String,
        expected: usize,
        found: usize,
    },
    #[error("balances of scenario `{scenario}` sum to {sum}, expected 0")]
    Unbalanced { scenario: String, sum: i128 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("flow has {found} scenarios, instance has {expected}")]
    ScenarioCount { expected: usize, found: usize },
    #[error(
        "scenario {scenario} of the flow has {found} arc values, instance has {expected} arcs"
    )]
    ArcCount {
        scenario: usize,
        expected: usize,
        found: usize,
    },
    #[error("unknown arc id `{0}`")]
    UnknownArc(String),
    #[error("scenario index {0} out of range")]
    ScenarioIndex(usize),
}

/// A validated network with per-scenario balances.
#[derive(Debug, Clone)]
pub struct Instance {
    vertices: Vec<String>,
    arcs: Vec<Arc>,
    scenarios: Vec<Scenario>,
    vertex_index: HashMap<String, VertexId>,
    arc_index: HashMap<String, ArcIdx>,
    out_arcs: Vec<Vec<ArcIdx>>,
    in_arcs: Vec<Vec<ArcIdx>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.arcs == other.arcs
            && self.scenarios == other.scenarios
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new(
        vertices: Vec<String>,
        arcs: Vec<Arc>,
        scenarios: Vec<Scenario>,
    ) -> Result<Self, InstanceError> {
        if scenarios.is_empty() {
            return Err(InstanceError::NoScenarios);
        }
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(InstanceError::DuplicateVertex(v.clone()));
            }
        }
        let n = vertices.len();
        let mut arc_index = HashMap::with_capacity(arcs.len());
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        for (i, a) in arcs.iter().enumerate() {
            if arc_index.insert(a.id.clone(), i).is_some() {
                return Err(InstanceError::DuplicateArc(a.id.clone()));
            }
            for end in [a.tail, a.head] {
                if end >= n {
                    return Err(InstanceError::UnknownVertex {
                        arc: a.id.clone(),
                        vertex: format!("#{end}"),
                    });
                }
            }
            if a.cost < 0 {
                return Err(InstanceError::NegativeCost(a.id.clone()));
            }
            out_arcs[a.tail].push(i);
            in_arcs[a.head].push(i);
        }
        for s in &scenarios {
            if s.balances.len() != n {
                return Err(InstanceError::BalanceLength {
                    scenario: s.name.clone(),
                    expected: n,
                    found: s.balances.len(),
                });
            }
            let sum: i128 = s.balances.iter().map(|&b| b as i128).sum();
            if sum != 0 {
                return Err(InstanceError::Unbalanced {
                    scenario: s.name.clone(),
                    sum,
                });
            }
        }
        Ok(Instance {
            vertices,
            arcs,
            scenarios,
            vertex_index,
            arc_index,
            out_arcs,
            in_arcs,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn scenario_count(&self) -> usize {
        self.scenarios.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: ArcIdx) -> &Arc {
        &self.arcs[a]
    }

    pub fn arc_by_id(&self, id: &str) -> Option<ArcIdx> {
        self.arc_index.get(id).copied()
    }

    pub fn out_arcs(&self, v: VertexId) -> &[ArcIdx] {
        &self.out_arcs[v]
    }

    pub fn in_arcs(&self, v: VertexId) -> &[ArcIdx] {
        &self.in_arcs[v]
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn balances(&self, lambda: usize) -> &[i64] {
        &self.scenarios[lambda].balances
    }

    pub fn balance(&self, lambda: usize, v: VertexId) -> i64 {
        self.scenarios[lambda].balances[v]
    }

    /// Indices of fixed arcs in declaration order.
    pub fn fixed_arcs(&self) -> Vec<ArcIdx> {
        (0..self.arcs.len())
            .filter(|&a| self.arcs[a].is_fixed())
            .collect()
    }

    /// Vertices with positive balance in at least one scenario.
    pub fn sources(&self) -> Vec<VertexId> {
        (0..self.vertex_count())
            .filter(|&v| self.scenarios.iter().any(|s| s.balances[v] > 0))
            .collect()
    }

    /// Vertices with negative balance in at least one scenario.
    pub fn sinks(&self) -> Vec<VertexId> {
        (0..self.vertex_count())
            .filter(|&v| self.scenarios.iter().any(|s| s.balances[v] < 0))
            .collect()
    }

    /// Same network with the scenarios replaced.
    pub fn with_scenarios(&self, scenarios: Vec<Scenario>) -> Result<Instance, InstanceError> {
        Instance::new(self.vertices.clone(), self.arcs.clone(), scenarios)
    }
}

/// Incremental construction by vertex name. Vertices are declared on first use.
#[derive(Debug, Default, Clone)]
pub struct InstanceBuilder {
    vertices: Vec<String>,
    index: HashMap<String, VertexId>,
    arcs: Vec<Arc>,
    scenarios: Vec<(String, Vec<(String, i64)>)>,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: &str) -> VertexId {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = self.vertices.len();
        self.vertices.push(name.to_string());
        self.index.insert(name.to_string(), v);
        v
    }

    pub fn arc(&mut self, id: &str, tail: &str, head: &str, cost: i64, kind: ArcKind) -> &mut Self {
        let tail = self.vertex(tail);
        let head = self.vertex(head);
        self.arcs.push(Arc {
            id: id.to_string(),
            tail,
            head,
            cost,
            kind,
        });
        self
    }

    pub fn fixed(&mut self, id: &str, tail: &str, head: &str, cost: i64) -> &mut Self {
        self.arc(id, tail, head, cost, ArcKind::Fixed)
    }

    pub fn free(&mut self, id: &str, tail: &str, head: &str, cost: i64) -> &mut Self {
        self.arc(id, tail, head, cost, ArcKind::Free)
    }

    pub fn scenario(&mut self, name: &str, balances: &[(&str, i64)]) -> &mut Self {
        self.scenarios.push((
            name.to_string(),
            balances.iter().map(|(v, b)| (v.to_string(), *b)).collect(),
        ));
        self
    }

    pub fn build(&self) -> Result<Instance, InstanceError> {
        let n = self.vertices.len();
        let mut scenarios = Vec::with_capacity(self.scenarios.len());
        for (name, entries) in &self.scenarios {
            let mut balances = vec![0i64; n];
            for (v, b) in entries {
                let Some(&idx) = self.index.get(v) else {
                    return Err(InstanceError::UnknownBalanceVertex {
                        scenario: name.clone(),
                        vertex: v.clone(),
                    });
                };
                balances[idx] += *b;
            }
            scenarios.push(Scenario {
                name: name.clone(),
                balances,
            });
        }
        Instance::new(self.vertices.clone(), self.arcs.clone(), scenarios)
    }
}

/// One integral arc flow per scenario, stored densely by arc index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustFlow {
    pub per_scenario: Vec<Vec<i64>>,
}

impl RobustFlow {
    pub fn zero(instance: &Instance) -> Self {
        RobustFlow {
            per_scenario: vec![vec![0; instance.arc_count()]; instance.scenario_count()],
        }
    }

    /// Builds a flow from sparse per-scenario maps keyed by arc id.
    pub fn from_sparse(
        instance: &Instance,
        maps: &[BTreeMap<String, i64>],
    ) -> Result<Self, FlowError> {
        if maps.len() != instance.scenario_count() {
            return Err(FlowError::ScenarioCount {
                expected: instance.scenario_count(),
                found: maps.len(),
            });
        }
        let mut flow = RobustFlow::zero(instance);
        for (lambda, map) in maps.iter().enumerate() {
            for (id, &value) in map {
                let a = instance
                    .arc_by_id(id)
                    .ok_or_else(|| FlowError::UnknownArc(id.clone()))?;
                flow.per_scenario[lambda][a] = value;
            }
        }
        Ok(flow)
    }

    /// Nonzero entries per scenario, keyed by arc id.
    pub fn to_sparse(&self, instance: &Instance) -> Vec<BTreeMap<String, i64>> {
        self.per_scenario
            .iter()
            .map(|f| {
                f.iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(a, &x)| (instance.arc(a).id.clone(), x))
                    .collect()
            })
            .collect()
    }

    pub fn get(&self, lambda: usize, a: ArcIdx) -> i64 {
        self.per_scenario[lambda][a]
    }

    pub fn scenario_count(&self) -> usize {
        self.per_scenario.len()
    }

    fn check_shape(&self, instance: &Instance) -> Result<(), FlowError> {
        if self.per_scenario.len() != instance.scenario_count() {
            return Err(FlowError::ScenarioCount {
                expected: instance.scenario_count(),
                found: self.per_scenario.len(),
            });
        }
        for (lambda, f) in self.per_scenario.iter().enumerate() {
            if f.len() != instance.arc_count() {
                return Err(FlowError::ArcCount {
                    scenario: lambda,
                    expected: instance.arc_count(),
                    found: f.len(),
                });
            }
        }
        Ok(())
    }
}

/// Cost of the flow of scenario `lambda`.
pub fn scenario_cost(
    instance: &Instance,
    flow: &RobustFlow,
    lambda: usize,
) -> Result<i128, FlowError> {
    flow.check_shape(instance)?;
    let f = flow
        .per_scenario
        .get(lambda)
        .ok_or(FlowError::ScenarioIndex(lambda))?;
    Ok(instance
        .arcs()
        .iter()
        .zip(f)
        .map(|(a, &x)| a.cost as i128 * x as i128)
        .sum())
}

/// Worst scenario cost.
pub fn robust_cost(instance: &Instance, flow: &RobustFlow) -> Result<i128, FlowError> {
    let mut worst = 0i128;
    for lambda in 0..instance.scenario_count() {
        worst = worst.max(scenario_cost(instance, flow, lambda)?);
    }
    Ok(worst)
}

/// Sum of positive balances of scenario `lambda`.
pub fn total_supply(instance: &Instance, lambda: usize) -> i64 {
    instance.balances(lambda).iter().filter(|&&b| b > 0).sum()
}

/// Reverses every arc and negates every balance.
pub fn reverse_instance(instance: &Instance) -> Instance {
    let arcs = instance
        .arcs()
        .iter()
        .map(|a| Arc {
            id: a.id.clone(),
            tail: a.head,
            head: a.tail,
            cost: a.cost,
            kind: a.kind,
        })
        .collect();
    let scenarios = instance
        .scenarios()
        .iter()
        .map(|s| Scenario {
            name: s.name.clone(),
            balances: s.balances.iter().map(|b| -b).collect(),
        })
        .collect();
    Instance::new(instance.vertices().to_vec(), arcs, scenarios)
        .expect("reversal keeps an instance valid")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape(FlowError),
    NegativeFlow {
        scenario: String,
        arc: String,
        value: i64,
    },
    Balance {
        scenario: String,
        vertex: String,
        expected: i64,
        actual: i64,
    },
    Inconsistent {
        arc: String,
        values: Vec<i64>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(e) => write!(f, "malformed flow: {e}"),
            Violation::NegativeFlow { scenario, arc, value } => {
                write!(f, "negative flow {value} on arc {arc} in scenario {scenario}")
            }
            Violation::Balance {
                scenario,
                vertex,
                expected,
                actual,
            } => write!(
                f,
                "flow balance violated at vertex {vertex} in scenario {scenario}: net outflow {actual}, balance {expected}, residual {}",
                actual - expected
            ),
            Violation::Inconsistent { arc, values } => {
                let list: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "consistent flow constraint violated on arc {arc} (flows {})", list.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks flow balance in every scenario and equality of fixed-arc flows.
pub fn validate_robust_flow(instance: &Instance, flow: &RobustFlow) -> ValidationReport {
    let mut report = ValidationReport::default();
    if let Err(e) = flow.check_shape(instance) {
        report.violations.push(Violation::Shape(e));
        return report;
    }
    for (lambda, scenario) in instance.scenarios().iter().enumerate() {
        let f = &flow.per_scenario[lambda];
        let mut net = vec![0i64; instance.vertex_count()];
        for (a, arc) in instance.arcs().iter().enumerate() {
            if f[a] < 0 {
                report.violations.push(Violation::NegativeFlow {
                    scenario: scenario.name.clone(),
                    arc: arc.id.clone(),
                    value: f[a],
                });
            }
            net[arc.tail] += f[a];
            net[arc.head] -= f[a];
        }
        for (v, (&actual, &expected)) in net.iter().zip(&scenario.balances).enumerate() {
            if actual != expected {
                report.violations.push(Violation::Balance {
                    scenario: scenario.name.clone(),
                    vertex: instance.vertex_name(v).to_string(),
                    expected,
                    actual,
                });
            }
        }
    }
    for (a, arc) in instance.arcs().iter().enumerate() {
        if !arc.is_fixed() {
            continue;
        }
        let values: Vec<i64> = flow.per_scenario.iter().map(|f| f[a]).collect();
        if values.windows(2).any(|w| w[0] != w[1]) {
            report.violations.push(Violation::Inconsistent {
                arc: arc.id.clone(),
                values,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn direct_flow(inst: &Instance) -> RobustFlow {
        let mut f = RobustFlow::zero(inst);
        f.per_scenario[0][inst.arc_by_id("st1").unwrap()] = 1;
        f.per_scenario[1][inst.arc_by_id("st2").unwrap()] = 1;
        f
    }

    #[test]
    fn scenario_costs_of_direct_flow() {
        let inst = fig1();
        let f = direct_flow(&inst);
        assert_eq!(scenario_cost(&inst, &f, 0).unwrap(), 0);
        assert_eq!(scenario_cost(&inst, &f, 1).unwrap(), 4);
        assert_eq!(robust_cost(&inst, &f).unwrap(), 4);
        assert_eq!(robust_cost(&inst, &RobustFlow::zero(&inst)).unwrap(), 0);
    }

    #[test]
    fn robust_cost_is_max_of_scenarios() {
        let inst = InstanceBuilder::new()
            .free("a", "x", "y", 1)
            .scenario("1", &[("x", 7), ("y", -7)])
            .scenario("2", &[("x", 3), ("y", -3)])
            .build()
            .unwrap();
        let f = RobustFlow {
            per_scenario: vec![vec![7], vec![3]],
        };
        assert_eq!(robust_cost(&inst, &f).unwrap(), 7);
    }

    #[test]
    fn direct_flow_is_valid() {
        let inst = fig1();
        assert!(validate_robust_flow(&inst, &direct_flow(&inst)).is_ok());
    }

    #[test]
    fn unequal_fixed_flow_is_reported() {
        let inst = fig1();
        let mut f = direct_flow(&inst);
        f.per_scenario[0] = vec![0; inst.arc_count()];
        f.per_scenario[0][inst.arc_by_id("sv").unwrap()] = 1;
        f.per_scenario[0][inst.arc_by_id("vt1").unwrap()] = 1;
        let report = validate_robust_flow(&inst, &f);
        assert_eq!(
            report.violations,
            vec![Violation::Inconsistent {
                arc: "sv".into(),
                values: vec![1, 0]
            }]
        );
        assert!(report.violations[0]
            .to_string()
            .contains("consistent flow constraint violated on arc sv"));
    }

    #[test]
    fn balance_violation_lists_residual() {
        let inst = fig1();
        let mut f = direct_flow(&inst);
        f.per_scenario[1][inst.arc_by_id("st2").unwrap()] = 2;
        let report = validate_robust_flow(&inst, &f);
        assert_eq!(report.violations.len(), 2);
        assert!(matches!(
            &report.violations[0],
            Violation::Balance { vertex, expected: 1, actual: 2, .. } if vertex == "s"
        ));
    }

    #[test]
    fn supply_totals() {
        let inst = fig1();
        assert_eq!(total_supply(&inst, 0), 1);
        let zero = inst
            .with_scenarios(vec![Scenario {
                name: "z".into(),
                balances: vec![0; inst.vertex_count()],
            }])
            .unwrap();
        assert_eq!(total_supply(&zero, 0), 0);
    }

    #[test]
    fn reversal_of_single_arc() {
        let inst = InstanceBuilder::new()
            .free("e", "a", "b", 3)
            .scenario("1", &[("a", 1), ("b", -1)])
            .build()
            .unwrap();
        let rev = reverse_instance(&inst);
        assert_eq!(rev.arc(0).tail, inst.vertex("b").unwrap());
        assert_eq!(rev.arc(0).head, inst.vertex("a").unwrap());
        assert_eq!(rev.balances(0), &[-1, 1]);
        assert_eq!(reverse_instance(&rev), inst);
        assert_eq!(reverse_instance(&reverse_instance(&fig1())), fig1());
    }

    #[test]
    fn construction_rejects_bad_input() {
        let unbalanced = InstanceBuilder::new()
            .free("e", "a", "b", 0)
            .scenario("1", &[("a", 1)])
            .build();
        assert!(matches!(unbalanced, Err(InstanceError::Unbalanced { .. })));
        let dup = InstanceBuilder::new()
            .free("e", "a", "b", 0)
            .free("e", "b", "a", 0)
            .scenario("1", &[])
            .build();
        assert_eq!(dup, Err(InstanceError::DuplicateArc("e".into())));
        let neg = InstanceBuilder::new()
            .free("e", "a", "b", -1)
            .scenario("1", &[])
            .build();
        assert_eq!(neg, Err(InstanceError::NegativeCost("e".into())));
        let none = InstanceBuilder::new().free("e", "a", "b", 0).build();
        assert_eq!(none, Err(InstanceError::NoScenarios));
    }

    #[test]
    fn sparse_round_trip() {
        let inst = fig1();
        let f = direct_flow(&inst);
        let sparse = f.to_sparse(&inst);
        assert_eq!(sparse[0].len(), 1);
        assert_eq!(RobustFlow::from_sparse(&inst, &sparse).unwrap(), f);
        let mut bad = sparse.clone();
        bad[0].insert("nope".into(), 1);
        assert_eq!(
            RobustFlow::from_sparse(&inst, &bad),
            Err(FlowError::UnknownArc("nope".into()))
        );
    }
}
