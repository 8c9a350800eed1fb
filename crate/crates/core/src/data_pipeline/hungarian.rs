//! Minimum-cost bipartite assignment (Kuhn-Munkres with potentials).

/// Solves the rectangular assignment problem. Returns, for each row, the
/// column it is assigned to. When there are more rows than columns some
/// rows stay unassigned. Costs must be finite.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<Option<usize>> {
    let rows = cost.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = cost[0].len();
    if cols == 0 {
        return vec![None; rows];
    }
    if rows > cols {
        let transposed: Vec<Vec<f64>> = (0..cols)
            .map(|c| (0..rows).map(|r| cost[r][c]).collect())
            .collect();
        let by_col = solve(&transposed);
        let mut out = vec![None; rows];
        for (c, r) in by_col.into_iter().enumerate() {
            out[r] = Some(c);
        }
        return out;
    }
    solve(cost).into_iter().map(Some).collect()
}

/// rows <= cols. Returns the column of every row.
fn solve(a: &[Vec<f64>]) -> Vec<usize> {
    let n = a.len();
    let m = a[0].len();
    // 1-based arrays; index 0 is the virtual root.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Assignment with gating: entries above `gate` (or non-finite) are
/// forbidden. Maximizes the number of admissible pairs, then minimizes their
/// total cost. Returns `(row, col)` pairs in row order.
pub fn assign_gated(cost: &[Vec<f64>], gate: f64) -> Vec<(usize, usize)> {
    if cost.is_empty() || cost[0].is_empty() {
        return Vec::new();
    }
    let admissible = |c: f64| c.is_finite() && c <= gate;
    let k = cost.len().min(cost[0].len()) as f64;
    let max_ok = cost
        .iter()
        .flatten()
        .copied()
        .filter(|&c| admissible(c))
        .fold(0.0f64, |acc, c| acc.max(c.abs()));
    let big = (k + 1.0) * (max_ok + 1.0) * 2.0;
    let padded: Vec<Vec<f64>> = cost
        .iter()
        .map(|row| row.iter().map(|&c| if admissible(c) { c } else { big }).collect())
        .collect();
    hungarian(&padded)
        .into_iter()
        .enumerate()
        .filter_map(|(r, c)| c.filter(|&c| admissible(cost[r][c])).map(|c| (r, c)))
        .collect()
}
