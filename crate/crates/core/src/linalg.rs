//! Fraction-free (Bareiss) elimination for exact integer rank.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Rank over the rationals of an integer matrix given by rows.
///
/// After `k` pivots every entry is a `(k+1) x (k+1)` minor of the input, so
/// the division by the previous pivot is exact.
pub fn rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let Some(cols) = rows.first().map(|r| r.len()) else { return 0 };
    assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..cols {
                let v = (&pivot * &row[j] - &f * &pivot_row[j]) / &prev;
                row[j] = v;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    rank(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(rank_i64(&[]), 0);
        assert_eq!(rank_i64(&[vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(rank_i64(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank_i64(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]), 2);
        assert_eq!(rank_i64(&[vec![0, 1, 0], vec![0, 0, 1], vec![0, 1, 1], vec![0, 2, 3]]), 2);
        assert_eq!(rank_i64(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 5]]), 3);
    }
}
