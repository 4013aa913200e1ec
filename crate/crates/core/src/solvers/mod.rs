//! Polynomial solvers for the tractable cases and the dispatcher.

mod pearl;
mod tree;
mod unique;

pub use pearl::{compute_states, solve_pearl, StateError, StateTable};
pub use tree::{
    solve_parallel_sources_parallel_sinks, solve_parallel_sources_unique_sink,
    solve_unique_source_parallel_sinks,
};
pub use unique::solve_unique_source_sink;

use std::fmt;
use std::str::FromStr;

use serde_json::Value;
use thiserror::Error;

use crate::instance::{robust_cost, scenario_cost, validate_robust_flow, Instance, RobustFlow};
use crate::oracle::{brute_force_optimal_with, OracleOptions};
use crate::sp::{classify_instance, InstanceClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Pearl,
    UniqueSourceUniqueSink,
    UniqueSourceParallelSinks,
    ParallelSourcesUniqueSink,
    ParallelSourcesParallelSinks,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Pearl,
        Method::UniqueSourceUniqueSink,
        Method::UniqueSourceParallelSinks,
        Method::ParallelSourcesUniqueSink,
        Method::ParallelSourcesParallelSinks,
        Method::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pearl => "pearl",
            Method::UniqueSourceUniqueSink => "unique-source-unique-sink",
            Method::UniqueSourceParallelSinks => "unique-source-parallel-sinks",
            Method::ParallelSourcesUniqueSink => "parallel-sources-unique-sink",
            Method::ParallelSourcesParallelSinks => "parallel-sources-parallel-sinks",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("solver does not apply: {0}")]
    NotThisCase(String),
    #[error("instance is not in a tractable class and the oracle is disabled")]
    NeedsOracle,
    #[error("oracle budget exceeded after {solves} transshipment solves")]
    BudgetExceeded { solves: u64 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A robust flow together with its cost and the method that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub flow: RobustFlow,
    pub cost: i128,
    pub scenario_costs: Vec<i128>,
    pub method: Method,
    pub diagnostics: Value,
}

impl SolveResult {
    /// Validates the flow and computes its costs.
    pub fn new(
        instance: &Instance,
        flow: RobustFlow,
        method: Method,
        diagnostics: Value,
    ) -> Result<Self, SolveError> {
        let report = validate_robust_flow(instance, &flow);
        if let Some(v) = report.violations.first() {
            return Err(SolveError::Internal(format!(
                "{method} produced an invalid flow: {v}"
            )));
        }
        let cost = robust_cost(instance, &flow).map_err(|e| SolveError::Internal(e.to_string()))?;
        let scenario_costs = (0..instance.scenario_count())
            .map(|l| scenario_cost(instance, &flow, l).expect("shape checked"))
            .collect();
        Ok(SolveResult {
            flow,
            cost,
            scenario_costs,
            method,
            diagnostics,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub allow_oracle: bool,
    pub oracle: OracleOptions,
    /// Skip classification and run this method.
    pub force: Option<Method>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            allow_oracle: true,
            oracle: OracleOptions::default(),
            force: None,
        }
    }
}

/// Classifies the instance and runs the matching solver.
pub fn solve(instance: &Instance, allow_oracle: bool) -> Result<SolveResult, SolveError> {
    solve_with(
        instance,
        &SolveOptions {
            allow_oracle,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_with(instance: &Instance, options: &SolveOptions) -> Result<SolveResult, SolveError> {
    let method = match options.force {
        Some(m) => m,
        None => match classify_instance(instance) {
            InstanceClass::Pearl => Method::Pearl,
            InstanceClass::UniqueSourceUniqueSink { .. } => Method::UniqueSourceUniqueSink,
            InstanceClass::UniqueSourceParallelSinks { .. } => Method::UniqueSourceParallelSinks,
            InstanceClass::ParallelSourcesUniqueSink { .. } => Method::ParallelSourcesUniqueSink,
            InstanceClass::ParallelSourcesParallelSinksConnected(_) => {
                Method::ParallelSourcesParallelSinks
            }
            InstanceClass::General { .. } if options.allow_oracle => Method::Oracle,
            InstanceClass::General { .. } => return Err(SolveError::NeedsOracle),
        },
    };
    match method {
        Method::Pearl => solve_pearl(instance),
        Method::UniqueSourceUniqueSink => solve_unique_source_sink(instance),
        Method::UniqueSourceParallelSinks => solve_unique_source_parallel_sinks(instance),
        Method::ParallelSourcesUniqueSink => solve_parallel_sources_unique_sink(instance),
        Method::ParallelSourcesParallelSinks => solve_parallel_sources_parallel_sinks(instance),
        Method::Oracle => brute_force_optimal_with(instance, &options.oracle),
    }
}
