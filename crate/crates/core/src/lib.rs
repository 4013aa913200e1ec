//! Robust transshipment with consistent flow constraints.
//!
//! An instance is a multi-digraph whose arcs are either *fixed* (same flow in
//! every scenario) or *free*, together with one integral balance vector per
//! scenario. A robust flow assigns one integral flow per scenario and its cost
//! is the largest scenario cost.
//!
//! The crate provides polynomial solvers for the tractable series-parallel
//! cases, an exact enumeration oracle for everything else, and generators for
//! the two hardness gadgets (maximum split and (3,B2)-SAT).

pub mod cli;
pub mod format;
pub mod graph;
pub mod instance;
pub mod oracle;
pub mod random;
pub mod reduction;
pub mod solvers;
pub mod sp;

pub use instance::{
    reverse_instance, robust_cost, scenario_cost, total_supply, validate_robust_flow, Arc, ArcKind,
    FlowError, Instance, InstanceBuilder, InstanceError, RobustFlow, ValidationReport, Violation,
};
pub use solvers::{solve, Method, SolveError, SolveResult};
pub use sp::{classify_instance, InstanceClass};
