mod common;

use cflow::random::TargetClass;
use common::*;
use proptest::prelude::*;

fn check(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn label_tree_labels_shrink(seed in any::<u64>()) {
        check(label_inclusion(&seeded(TargetClass::UniqueSourceParallelSinks, seed)))?;
    }

    #[test]
    fn one_last_vertex_per_label(seed in any::<u64>()) {
        check(last_vertex_uniqueness(&seeded(TargetClass::UniqueSourceParallelSinks, seed)))?;
    }

    #[test]
    fn parallel_sinks_flow_stays_in_covered_subgraph(seed in any::<u64>()) {
        check(zero_beyond_covered(&seeded(TargetClass::UniqueSourceParallelSinks, seed)))?;
    }

    #[test]
    fn reversal_is_an_involution_keeping_cost(seed in any::<u64>(), pick in 0usize..5) {
        check(reversal(&seeded(TargetClass::ALL[pick], seed)))?;
    }

    #[test]
    fn pearl_shrink_keeps_optimum(seed in any::<u64>()) {
        check(pearl_shrink_preserves_cost(&seeded(TargetClass::Pearl, seed)))?;
    }

    #[test]
    fn sp_tree_round_trips(seed in any::<u64>()) {
        check(sp_round_trip(&seeded_sp(seed)))?;
    }

    #[test]
    fn pearl_recognition_matches_tree(seed in any::<u64>()) {
        check(pearl_recognition(&seeded_sp(seed)))?;
    }

    #[test]
    fn solvers_match_oracle(seed in any::<u64>(), pick in 0usize..5) {
        let class = TargetClass::ALL[pick];
        check(oracle_equivalence(&seeded(class, seed), class))?;
    }

    #[test]
    fn two_path_flow_dominates_per_scenario(seed in any::<u64>()) {
        check(two_path_dominance(&seeded(TargetClass::UniqueSourceUniqueSink, seed)).map(|_| ()))?;
    }
}
