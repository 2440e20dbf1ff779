/// Genie-aided channel assignment: a one-to-one matching of SUs to
/// PU-free channels that maximizes the total valuation.
///
/// `valuations[i][k]` is SU `i`'s valuation on channel `k`. SUs left without
/// a channel get `None` and stay out.
pub fn ga_assign(valuations: &[Vec<f64>], pu_active: &[bool]) -> Vec<Option<usize>> {
    let n = valuations.len();
    let free: Vec<usize> = (0..pu_active.len()).filter(|&k| !pu_active[k]).collect();
    let mut out = vec![None; n];
    if n == 0 || free.is_empty() {
        return out;
    }
    if n <= free.len() {
        let cost: Vec<Vec<f64>> = valuations
            .iter()
            .map(|row| free.iter().map(|&k| -row[k]).collect())
            .collect();
        for (i, col) in min_cost_assignment(&cost).into_iter().enumerate() {
            out[i] = Some(free[col]);
        }
    } else {
        let cost: Vec<Vec<f64>> = free
            .iter()
            .map(|&k| valuations.iter().map(|row| -row[k]).collect())
            .collect();
        for (c, su) in min_cost_assignment(&cost).into_iter().enumerate() {
            out[su] = Some(free[c]);
        }
    }
    out
}

/// Hungarian method (shortest augmenting paths with potentials) for a
/// rectangular cost matrix with `rows <= cols`. Returns the column assigned
/// to each row.
fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let m = cost[0].len();
    debug_assert!(n <= m);
    // 1-based; index 0 is the virtual source column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut row_of = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
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
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=m {
        if row_of[j] != 0 {
            assignment[row_of[j] - 1] = j - 1;
        }
    }
    assignment
}
