use alloc::vec::Vec;

use crate::experiment::{AssignmentVector, Treatment};
use crate::{Error, Result};

/// Ranks `1..=n`; tied values share the average of the ranks they span.
pub fn rank_midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = alloc::vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let mid = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mid;
        }
        start = end;
    }
    ranks
}

/// Sum of the treatment-1 ranks.
pub fn rank_sum_statistic(ranks: &[f64], assignment: &AssignmentVector) -> Result<f64> {
    if ranks.len() != assignment.len() {
        return Err(Error::LengthMismatch { expected: assignment.len(), found: ranks.len() });
    }
    Ok(ranks
        .iter()
        .zip(assignment.labels())
        .filter(|(_, &t)| t == Treatment::One)
        .map(|(&r, _)| r)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn distinct_and_tied() {
        assert_eq!(rank_midranks(&[10.0, 20.0, 30.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(rank_midranks(&[5.0, 5.0, 9.0]), vec![1.5, 1.5, 3.0]);
        assert_eq!(rank_midranks(&[2.0, 1.0, 2.0, 2.0]), vec![3.0, 1.0, 3.0, 3.0]);
        assert!(rank_midranks(&[]).is_empty());
    }

    #[test]
    fn rank_sum_hand_values() {
        let t = AssignmentVector::from_labels(&[1, 2, 1, 2]).unwrap();
        assert_eq!(rank_sum_statistic(&[1.0, 2.0, 3.0, 4.0], &t).unwrap(), 4.0);
        let t = AssignmentVector::from_labels(&[1, 1, 1, 2, 2]).unwrap();
        assert_eq!(rank_sum_statistic(&[1.0, 2.0, 3.0, 4.0, 5.0], &t).unwrap(), 6.0);
    }

    proptest! {
        #[test]
        fn ranks_sum_to_triangular_number(values in prop::collection::vec(-50i32..50, 1..40)) {
            let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
            let n = v.len() as f64;
            let total: f64 = rank_midranks(&v).iter().sum();
            prop_assert_eq!(total, n * (n + 1.0) / 2.0);
        }

        #[test]
        fn ranks_permutation_equivariant(values in prop::collection::vec(-1e3f64..1e3, 1..30), seed in any::<u64>()) {
            let mut perm: Vec<usize> = (0..values.len()).collect();
            let mut state = seed | 1;
            for i in (1..perm.len()).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                perm.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let permuted: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
            let r = rank_midranks(&values);
            let rp = rank_midranks(&permuted);
            for (k, &i) in perm.iter().enumerate() {
                prop_assert_eq!(rp[k], r[i]);
            }
        }

        #[test]
        fn ranks_invariant_under_monotone_maps(values in prop::collection::vec(-20i32..20, 1..30)) {
            let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
            let mapped: Vec<f64> = v.iter().map(|&x| libm::exp(x / 7.0) * 3.0 - 1.0).collect();
            prop_assert_eq!(rank_midranks(&v), rank_midranks(&mapped));
        }
    }
}
