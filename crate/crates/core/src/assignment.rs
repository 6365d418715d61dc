//! Dense linear assignment (Hungarian algorithm with potentials) and bipartite
//! perfect-matching feasibility.

use crate::scalar::Scalar;

/// Minimum-cost perfect matching on a square cost matrix.
///
/// Returns `col_of_row` with `col_of_row[r]` the column assigned to row `r`.
/// Shortest augmenting paths with row/column potentials, `O(n³)`.
pub fn hungarian<T: Scalar>(cost: &[Vec<T>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    assert!(cost.iter().all(|row| row.len() == n), "cost matrix must be square");

    // 1-based internals; column 0 is the virtual start
    let inf = T::infinity();
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        row_of_col[0] = row;
        let mut col0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r0 = row_of_col[col0];
            let mut delta = inf;
            let mut col1 = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = cost[r0 - 1][col - 1] - u[r0] - v[col];
                if reduced < minv[col] {
                    minv[col] = reduced;
                    way[col] = col0;
                }
                if minv[col] < delta {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of_col[col]] = u[row_of_col[col]] + delta;
                    v[col] = v[col] - delta;
                } else {
                    minv[col] = minv[col] - delta;
                }
            }
            col0 = col1;
            if row_of_col[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            row_of_col[col0] = row_of_col[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![0usize; n];
    for col in 1..=n {
        col_of_row[row_of_col[col] - 1] = col - 1;
    }
    col_of_row
}

/// Perfect matching in a bipartite graph with `n` rows and `n` columns, if one exists.
///
/// `allowed(r, c)` tells whether the edge exists. Kuhn's augmenting paths.
pub fn perfect_matching(n: usize, allowed: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let mut row_of_col: Vec<Option<usize>> = vec![None; n];
    for row in 0..n {
        let mut visited = vec![false; n];
        if !augment(row, &allowed, &mut visited, &mut row_of_col) {
            return None;
        }
    }
    let mut col_of_row = vec![0; n];
    for (col, row) in row_of_col.into_iter().enumerate() {
        col_of_row[row.expect("perfect")] = col;
    }
    Some(col_of_row)
}

fn augment(
    row: usize,
    allowed: &impl Fn(usize, usize) -> bool,
    visited: &mut [bool],
    row_of_col: &mut [Option<usize>],
) -> bool {
    for col in 0..visited.len() {
        if visited[col] || !allowed(row, col) {
            continue;
        }
        visited[col] = true;
        let free = match row_of_col[col] {
            None => true,
            Some(other) => augment(other, allowed, visited, row_of_col),
        };
        if free {
            row_of_col[col] = Some(row);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(cost: &[Vec<f64>]) -> f64 {
        fn go(row: usize, cost: &[Vec<f64>], used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for c in 0..cost.len() {
                if !used[c] {
                    used[c] = true;
                    best = best.min(cost[row][c] + go(row + 1, cost, used));
                    used[c] = false;
                }
            }
            best
        }
        go(0, cost, &mut vec![false; cost.len()])
    }

    #[test]
    fn matches_enumeration_on_small_matrices() {
        let mut seed = 17u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) as f64 / (1u64 << 31) as f64
        };
        for n in 1..=6 {
            for _ in 0..20 {
                let cost: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| next()).collect()).collect();
                let assignment = hungarian(&cost);
                let total: f64 = assignment.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
                assert!((total - brute_force(&cost)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classic_example() {
        let cost = vec![vec![4.0f32, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = hungarian(&cost);
        let total: f32 = a.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
        assert_eq!(total, 5.0);
    }

    #[test]
    fn feasibility() {
        assert!(perfect_matching(2, |r, c| r == c).is_some());
        assert!(perfect_matching(2, |_, c| c == 0).is_none());
        assert_eq!(perfect_matching(0, |_, _| false), Some(vec![]));
    }
}
