//! One-out-of-a-pair partition and the transform from plain partition.

use serde::{Deserialize, Serialize};

use super::ReductionError;

/// Pairs `(s_{2i-1}, s_{2i})` with the larger element first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPartitionInstance {
    pairs: Vec<(i64, i64)>,
    w: i64,
}

impl PairPartitionInstance {
    pub fn new(pairs: Vec<(i64, i64)>) -> Result<Self, ReductionError> {
        if pairs.iter().any(|&(a, b)| a < 1 || b < 1) {
            return Err(ReductionError::NonPositive);
        }
        if let Some(i) = pairs.iter().position(|&(a, b)| a < b) {
            return Err(ReductionError::Unordered(i + 1));
        }
        let total = pairs
            .iter()
            .try_fold(0i64, |acc, &(a, b)| acc.checked_add(a)?.checked_add(b))
            .ok_or(ReductionError::FormulaOverflow)?;
        if total % 2 != 0 {
            return Err(ReductionError::OddSum);
        }
        Ok(PairPartitionInstance {
            pairs,
            w: total / 2,
        })
    }

    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    /// Number of pairs.
    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    /// Half the total sum.
    pub fn w(&self) -> i64 {
        self.w
    }

    /// The integers in order s_1, s_2, ..., s_{2n}.
    pub fn integers(&self) -> Vec<i64> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// Sum of the elements picked by `first`: `first[i]` selects the larger
    /// element of pair `i`.
    pub fn chosen_sum(&self, first: &[bool]) -> i64 {
        self.pairs
            .iter()
            .zip(first)
            .map(|(&(a, b), &f)| if f { a } else { b })
            .sum()
    }
}

/// Each integer `x` becomes the pair `(x + 1, 1)`; `w` grows by the pair count.
pub fn partition_to_pair_partition(
    integers: &[i64],
) -> Result<PairPartitionInstance, ReductionError> {
    if integers.iter().any(|&x| x < 1) {
        return Err(ReductionError::NonPositive);
    }
    if integers.iter().sum::<i64>() % 2 != 0 {
        return Err(ReductionError::OddSum);
    }
    let pairs = integers
        .iter()
        .map(|&x| {
            x.checked_add(1)
                .map(|y| (y, 1))
                .ok_or(ReductionError::FormulaOverflow)
        })
        .collect::<Result<Vec<_>, _>>()?;
    PairPartitionInstance::new(pairs)
}

/// A choice of one element per pair summing to `w`, by exhaustive search.
/// `choice[i]` is true when the larger element of pair `i` is taken.
pub fn has_pair_partition(pp: &PairPartitionInstance) -> Option<Vec<bool>> {
    let n = pp.n();
    assert!(
        n < 64,
        "exhaustive search is limited to fewer than 64 pairs"
    );
    (0u64..1 << n).find_map(|mask| {
        let choice: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        (pp.chosen_sum(&choice) == pp.w()).then_some(choice)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subset_sum_split(xs: &[i64]) -> bool {
        let total: i64 = xs.iter().sum();
        total % 2 == 0
            && (0u32..1 << xs.len()).any(|m| {
                xs.iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .map(|(_, x)| x)
                    .sum::<i64>()
                    * 2
                    == total
            })
    }

    #[test]
    fn transform_examples() {
        let pp = partition_to_pair_partition(&[1, 1]).unwrap();
        assert_eq!(pp.pairs(), &[(2, 1), (2, 1)]);
        assert_eq!(pp.w(), 3);
        let pp = partition_to_pair_partition(&[3, 1, 2, 2]).unwrap();
        assert_eq!(pp.pairs(), &[(4, 1), (2, 1), (3, 1), (3, 1)]);
        assert_eq!(pp.w(), 8);
        let pp = partition_to_pair_partition(&[]).unwrap();
        assert_eq!(pp.n(), 0);
        assert_eq!(pp.w(), 0);
    }

    #[test]
    fn odd_and_invalid_inputs() {
        assert_eq!(
            partition_to_pair_partition(&[1, 2]),
            Err(ReductionError::OddSum)
        );
        assert_eq!(
            partition_to_pair_partition(&[0, 2]),
            Err(ReductionError::NonPositive)
        );
        assert_eq!(
            PairPartitionInstance::new(vec![(1, 2)]),
            Err(ReductionError::Unordered(1))
        );
    }

    #[test]
    fn transform_preserves_answer_exhaustively() {
        for len in 1..=4u32 {
            for code in 0..4u32.pow(len) {
                let xs: Vec<i64> = (0..len)
                    .map(|i| (code / 4u32.pow(i) % 4 + 1) as i64)
                    .collect();
                if xs.iter().sum::<i64>() % 2 != 0 {
                    continue;
                }
                let pp = partition_to_pair_partition(&xs).unwrap();
                assert_eq!(
                    has_pair_partition(&pp).is_some(),
                    subset_sum_split(&xs),
                    "{xs:?}"
                );
            }
        }
    }
}
