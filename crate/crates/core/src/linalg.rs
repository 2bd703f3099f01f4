//! Fraction-free integer linear algebra.

/// Rank of an integer matrix over the rationals, via Bareiss elimination.
///
/// Intermediate values are subdeterminants of the input, held in i128; at
/// the matrix sizes this crate works with they stay far below the i128
/// range and any overflow panics loudly instead of wrapping.
pub fn integer_rank(matrix: &[Vec<i64>]) -> usize {
    if matrix.is_empty() || matrix[0].is_empty() {
        return 0;
    }
    let rows = matrix.len();
    let cols = matrix[0].len();
    debug_assert!(matrix.iter().all(|r| r.len() == cols), "ragged matrix");
    let mut a: Vec<Vec<i128>> =
        matrix.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut rank = 0;
    let mut prev = 1i128;
    let mut col = 0;
    while rank < rows && col < cols {
        // Find a pivot in this column at or below `rank`.
        let pivot_row = (rank..rows).find(|&r| a[r][col] != 0);
        let Some(pivot_row) = pivot_row else {
            col += 1;
            continue;
        };
        a.swap(rank, pivot_row);
        let pivot = a[rank][col];
        for r in (rank + 1)..rows {
            for c in (col + 1)..cols {
                let num = pivot
                    .checked_mul(a[r][c])
                    .and_then(|x| a[r][col].checked_mul(a[rank][c]).map(|y| x - y))
                    .expect("Bareiss intermediate overflow");
                a[r][c] = num / prev;
            }
            a[r][col] = 0;
        }
        prev = pivot;
        rank += 1;
        col += 1;
    }
    rank
}
