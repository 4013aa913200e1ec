//! Hardness constructions: generators, forward flows, extractors and the
//! structural checker for the maximum split instance.

mod max_split;
mod partition;
mod sat;

pub use max_split::{
    beta_threshold, check_max_split_structure, extract_partition, fixed_arc_cost, max_split_flow,
    max_split_instance, normalize_ties, MaxSplitLayout, Partition, StructureCheck, StructureReport,
    CHECK_FIXED_COST, CHECK_FIXED_VALUES, CHECK_MONOTONE, CHECK_PATHS, CHECK_PATH_COSTS,
};
pub use partition::{has_pair_partition, partition_to_pair_partition, PairPartitionInstance};
pub use sat::{
    brute_force_sat, extract_assignment, sat_forward_flow, sat_reduction_instance, satisfies,
    SatFormula,
};

use thiserror::Error;

use crate::instance::InstanceError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("integers sum to an odd number")]
    OddSum,
    #[error("integers must be positive")]
    NonPositive,
    #[error("pair {0} is not ordered larger-first")]
    Unordered(usize),
    #[error("at least two pairs are required, got {0}")]
    TooFewPairs(usize),
    #[error("construction exceeds the 64-bit integer range")]
    FormulaOverflow,
    #[error("formula is not a (3,B2) instance: {0}")]
    NotB2(String),
    #[error("flow does not meet the threshold structure: {0}")]
    NotThresholdFlow(String),
    #[error("flow does not encode an assignment: {0}")]
    MalformedFlow(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}
