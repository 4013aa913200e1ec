//! JSON file formats for instances, solutions, max-split layouts and pair lists.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::instance::{Arc, ArcKind, FlowError, Instance, InstanceError, RobustFlow, Scenario};
use crate::reduction::{max_split_instance, MaxSplitLayout, PairPartitionInstance, ReductionError};
use crate::solvers::SolveResult;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("layout does not match the instance: {0}")]
    Layout(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcEntry {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub cost: i64,
    pub kind: ArcKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEntry {
    pub name: String,
    /// Nonzero balances by vertex name; missing vertices have balance 0.
    pub balances: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub vertices: Vec<String>,
    pub arcs: Vec<ArcEntry>,
    pub scenarios: Vec<ScenarioEntry>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let mut index = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(InstanceError::DuplicateVertex(v.clone()).into());
            }
        }
        let lookup = |arc: &str, v: &str| {
            index
                .get(v)
                .copied()
                .ok_or_else(|| InstanceError::UnknownVertex {
                    arc: arc.to_string(),
                    vertex: v.to_string(),
                })
        };
        let arcs = self
            .arcs
            .iter()
            .map(|a| {
                Ok(Arc {
                    id: a.id.clone(),
                    tail: lookup(&a.id, &a.tail)?,
                    head: lookup(&a.id, &a.head)?,
                    cost: a.cost,
                    kind: a.kind,
                })
            })
            .collect::<Result<Vec<_>, InstanceError>>()?;
        let scenarios = self
            .scenarios
            .iter()
            .map(|s| {
                let mut balances = vec![0; self.vertices.len()];
                for (v, &b) in &s.balances {
                    let i = index.get(v.as_str()).ok_or_else(|| {
                        InstanceError::UnknownBalanceVertex {
                            scenario: s.name.clone(),
                            vertex: v.clone(),
                        }
                    })?;
                    balances[*i] = b;
                }
                Ok(Scenario {
                    name: s.name.clone(),
                    balances,
                })
            })
            .collect::<Result<Vec<_>, InstanceError>>()?;
        Ok(Instance::new(self.vertices.clone(), arcs, scenarios)?)
    }

    pub fn from_instance(instance: &Instance) -> Self {
        let name = |v| instance.vertex_name(v).to_string();
        InstanceFile {
            vertices: instance.vertices().to_vec(),
            arcs: instance
                .arcs()
                .iter()
                .map(|a| ArcEntry {
                    id: a.id.clone(),
                    tail: name(a.tail),
                    head: name(a.head),
                    cost: a.cost,
                    kind: a.kind,
                })
                .collect(),
            scenarios: instance
                .scenarios()
                .iter()
                .map(|s| ScenarioEntry {
                    name: s.name.clone(),
                    balances: s
                        .balances
                        .iter()
                        .enumerate()
                        .filter(|(_, &b)| b != 0)
                        .map(|(v, &b)| (name(v), b))
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Reads an instance from JSON text.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    InstanceFile::parse(text)?.to_instance()
}

pub fn instance_to_json(instance: &Instance) -> String {
    pretty(&InstanceFile::from_instance(instance))
}

/// Pretty JSON with a trailing newline.
pub fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub method: String,
    pub cost: i128,
    pub scenario_costs: Vec<i128>,
    /// Per scenario, nonzero arc flows by arc id.
    pub flows: Vec<BTreeMap<String, i64>>,
    #[serde(default)]
    pub diagnostics: Value,
}

impl SolutionFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_result(instance: &Instance, result: &SolveResult) -> Self {
        SolutionFile {
            method: result.method.name().to_string(),
            cost: result.cost,
            scenario_costs: result.scenario_costs.clone(),
            flows: result.flow.to_sparse(instance),
            diagnostics: result.diagnostics.clone(),
        }
    }

    pub fn flow(&self, instance: &Instance) -> Result<RobustFlow, FormatError> {
        Ok(RobustFlow::from_sparse(instance, &self.flows)?)
    }
}

/// Sidecar describing which arcs of a max-split instance play which role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutFile {
    pub pairs: Vec<(i64, i64)>,
    pub n: usize,
    pub w: i64,
    pub f: i64,
    pub detour: Vec<String>,
    pub cross: Vec<String>,
    pub shortcut: Vec<String>,
    pub blocked: String,
}

impl LayoutFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_layout(layout: &MaxSplitLayout) -> Self {
        let ids = |arcs: &[usize]| {
            arcs.iter()
                .map(|&a| layout.instance.arc(a).id.clone())
                .collect()
        };
        LayoutFile {
            pairs: layout.pairs.pairs().to_vec(),
            n: layout.n,
            w: layout.w,
            f: layout.f,
            detour: ids(&layout.detour),
            cross: ids(&layout.cross),
            shortcut: ids(&layout.shortcut),
            blocked: layout.instance.arc(layout.blocked).id.clone(),
        }
    }

    /// Regenerates the layout from the pairs and checks it against `instance`.
    pub fn to_layout(&self, instance: &Instance) -> Result<MaxSplitLayout, FormatError> {
        let layout = max_split_instance(&PairPartitionInstance::new(self.pairs.clone())?)?;
        if LayoutFile::from_layout(&layout) != *self {
            return Err(FormatError::Layout(
                "sidecar fields disagree with its pairs".into(),
            ));
        }
        if layout.instance != *instance {
            return Err(FormatError::Layout(
                "instance is not the construction for these pairs".into(),
            ));
        }
        Ok(layout)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairsFile {
    pub pairs: Vec<(i64, i64)>,
    pub w: i64,
}

impl PairsFile {
    pub fn from_instance(pp: &PairPartitionInstance) -> Self {
        PairsFile {
            pairs: pp.pairs().to_vec(),
            w: pp.w(),
        }
    }
}
