//! Pearls: every bundle carries the running surplus of the vertices before it.

use serde_json::json;
use thiserror::Error;

use crate::instance::{Instance, RobustFlow, VertexId};
use crate::solvers::{Method, SolveError, SolveResult};
use crate::sp::{pearl_order, pearl_shrink};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("digraph is not a pearl")]
    NotPearl,
    #[error("running balance at {vertex} is negative in scenario {scenario}")]
    NegativeState { vertex: String, scenario: String },
}

impl From<StateError> for SolveError {
    fn from(e: StateError) -> Self {
        match e {
            StateError::NotPearl => SolveError::NotThisCase(e.to_string()),
            StateError::NegativeState { .. } => SolveError::Infeasible(e.to_string()),
        }
    }
}

/// Prefix sums of the balances along the pearl order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTable {
    pub order: Vec<VertexId>,
    /// `sigma[λ][i]`: units that must leave the i-th vertex forward in scenario λ.
    pub sigma: Vec<Vec<i64>>,
    /// Per position, the minimum over scenarios.
    pub sigma_min: Vec<i64>,
}

pub fn compute_states(instance: &Instance) -> Result<StateTable, StateError> {
    let order = pearl_order(instance).ok_or(StateError::NotPearl)?;
    let mut sigma = Vec::with_capacity(instance.scenario_count());
    for scenario in instance.scenarios() {
        let mut acc = 0i64;
        let mut row = Vec::with_capacity(order.len());
        for &v in &order {
            acc += scenario.balances[v];
            if acc < 0 {
                return Err(StateError::NegativeState {
                    vertex: instance.vertex_name(v).to_string(),
                    scenario: scenario.name.clone(),
                });
            }
            row.push(acc);
        }
        sigma.push(row);
    }
    let sigma_min = (0..order.len())
        .map(|i| sigma.iter().map(|row| row[i]).min().unwrap_or(0))
        .collect();
    Ok(StateTable {
        order,
        sigma,
        sigma_min,
    })
}

/// Shrinks every bundle to at most one fixed and one free arc, then sends the
/// scenario-wide minimum state over the fixed arc and the rest over the free one.
pub fn solve_pearl(instance: &Instance) -> Result<SolveResult, SolveError> {
    let states = compute_states(instance)?;
    let (shrunk, map) =
        pearl_shrink(instance).map_err(|e| SolveError::NotThisCase(e.to_string()))?;
    let mut flow = RobustFlow::zero(&shrunk);
    let bundles = states.order.len() - 1;
    let mut fixed_of = vec![None; bundles];
    let mut free_of = vec![None; bundles];
    for (a, &i) in map.bundle.iter().enumerate() {
        if shrunk.arc(a).is_fixed() {
            fixed_of[i] = Some(a);
        } else {
            free_of[i] = Some(a);
        }
    }
    for i in 0..bundles {
        let low = states.sigma_min[i];
        for (lambda, row) in states.sigma.iter().enumerate() {
            let f = &mut flow.per_scenario[lambda];
            match (fixed_of[i], free_of[i]) {
                (Some(x), Some(y)) => {
                    f[x] = low;
                    f[y] = row[i] - low;
                }
                (Some(x), None) => {
                    if row[i] != low {
                        return Err(SolveError::Infeasible(format!(
                            "bundle leaving {} has only fixed arcs but its load differs across scenarios",
                            instance.vertex_name(states.order[i])
                        )));
                    }
                    f[x] = low;
                }
                (None, Some(y)) => f[y] = row[i],
                (None, None) => unreachable!("pearl bundles are nonempty"),
            }
        }
    }
    let lifted = map.lift(instance, &flow);
    let diag = json!({
        "order": states.order.iter().map(|&v| instance.vertex_name(v)).collect::<Vec<_>>(),
        "states": states.sigma,
        "min_states": states.sigma_min,
        "kept_arcs": map.original.iter().map(|&a| instance.arc(a).id.as_str()).collect::<Vec<_>>(),
    });
    SolveResult::new(instance, lifted, Method::Pearl, diag)
}
