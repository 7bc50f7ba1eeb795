//! Exact transportation simplex on dense cost matrices.
//!
//! Solves `min Σ γᵢⱼ cᵢⱼ` over the transportation polytope with given row
//! and column marginals. The basis is a spanning tree over row and column
//! nodes; entering and leaving variables follow Bland's rule (smallest
//! cell index in row-major order), which rules out cycling on degenerate
//! instances. Intended for the small, well-scaled problems that arise from
//! probability measures; no effort is made to be fast on large inputs.

use nalgebra::DMatrix;

pub(crate) struct TransportSolution {
    /// Basic cells `(row, col, flow)`; flows are nonnegative.
    pub basis: Vec<(usize, usize, f64)>,
    /// Row potentials.
    pub u: Vec<f64>,
    /// Column potentials.
    pub v: Vec<f64>,
    /// Objective value `Σ flow · cost`.
    pub cost: f64,
}

impl TransportSolution {
    /// Most negative reduced cost over all cells (0 if none are negative).
    pub fn dual_infeasibility(&self, cost: &DMatrix<f64>) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..cost.nrows() {
            for j in 0..cost.ncols() {
                worst = worst.min(cost[(i, j)] - self.u[i] - self.v[j]);
            }
        }
        -worst
    }

    /// Largest `|reduced cost|` over basic cells (complementary slackness).
    pub fn slackness_residual(&self, cost: &DMatrix<f64>) -> f64 {
        self.basis
            .iter()
            .map(|&(i, j, _)| (cost[(i, j)] - self.u[i] - self.v[j]).abs())
            .fold(0.0f64, f64::max)
    }
}

/// Northwest-corner initial basis: exactly `m + n − 1` cells forming a
/// staircase, hence a spanning tree.
fn northwest_corner(supply: &[f64], demand: &[f64]) -> (Vec<(usize, usize)>, Vec<f64>) {
    let m = supply.len();
    let n = demand.len();
    let mut a = supply.to_vec();
    let mut b = demand.to_vec();
    let mut cells = Vec::with_capacity(m + n - 1);
    let mut flows = Vec::with_capacity(m + n - 1);
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let q = a[i].min(b[j]).max(0.0);
        cells.push((i, j));
        flows.push(q);
        a[i] -= q;
        b[j] -= q;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if j == n - 1 {
            i += 1;
        } else if i == m - 1 {
            j += 1;
        } else if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    (cells, flows)
}

/// Potentials from the basis tree: fix `u[0] = 0` and propagate
/// `u[i] + v[j] = c[i][j]` along basic cells.
fn potentials(
    m: usize,
    n: usize,
    cells: &[(usize, usize)],
    cost: &DMatrix<f64>,
) -> (Vec<f64>, Vec<f64>) {
    // Node k < m is row k; node m + j is column j.
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m + n];
    for (e, &(i, j)) in cells.iter().enumerate() {
        adjacency[i].push((e, m + j));
        adjacency[m + j].push((e, i));
    }
    let mut u = vec![0.0f64; m];
    let mut v = vec![0.0f64; n];
    let mut seen = vec![false; m + n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(node) = stack.pop() {
        for &(e, other) in &adjacency[node] {
            if seen[other] {
                continue;
            }
            let (i, j) = cells[e];
            if other >= m {
                v[j] = cost[(i, j)] - u[i];
            } else {
                u[i] = cost[(i, j)] - v[j];
            }
            seen[other] = true;
            stack.push(other);
        }
    }
    debug_assert!(seen.iter().all(|&s| s), "basis must span all nodes");
    (u, v)
}

/// Path of basis-edge indices from row node `i0` to column node `j0`.
fn tree_path(m: usize, n: usize, cells: &[(usize, usize)], i0: usize, j0: usize) -> Vec<usize> {
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m + n];
    for (e, &(i, j)) in cells.iter().enumerate() {
        adjacency[i].push((e, m + j));
        adjacency[m + j].push((e, i));
    }
    let target = m + j0;
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    let mut stack = vec![i0];
    seen[i0] = true;
    while let Some(node) = stack.pop() {
        if node == target {
            break;
        }
        for &(e, other) in &adjacency[node] {
            if !seen[other] {
                seen[other] = true;
                parent[other] = Some((node, e));
                stack.push(other);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = target;
    while node != i0 {
        let (prev, e) = parent[node].expect("basis tree connects all nodes");
        path.push(e);
        node = prev;
    }
    path.reverse();
    path
}

/// Solve the balanced transportation problem exactly.
///
/// `supply` and `demand` must be positive and sum to the same total (the
/// caller normalizes); the returned flows satisfy the marginals up to
/// accumulation error.
pub(crate) fn solve(supply: &[f64], demand: &[f64], cost: &DMatrix<f64>) -> TransportSolution {
    let m = supply.len();
    let n = demand.len();
    let (mut cells, mut flows) = northwest_corner(supply, demand);

    // Scale-relative pivot threshold, capped so that termination always
    // lands inside the 1e-9 dual-feasibility certificate.
    let scale = cost.iter().fold(0.0f64, |acc, c| acc.max(c.abs())).max(1.0);
    let enter_tol = (1e-12 * scale).min(1e-10);

    let mut basic = vec![false; m * n];
    for &(i, j) in &cells {
        basic[i * n + j] = true;
    }

    loop {
        let (u, v) = potentials(m, n, &cells, cost);

        // Bland: first cell in row-major order with negative reduced cost.
        let mut entering = None;
        'scan: for i in 0..m {
            for j in 0..n {
                if !basic[i * n + j] && cost[(i, j)] - u[i] - v[j] < -enter_tol {
                    entering = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((ei, ej)) = entering else {
            break;
        };

        // The entering cell closes a unique cycle with the tree path from
        // its row to its column; edges along the path alternate −θ/+θ
        // starting with −θ next to the entering +θ.
        let path = tree_path(m, n, &cells, ei, ej);
        let mut theta = f64::INFINITY;
        for (pos, &e) in path.iter().enumerate() {
            if pos % 2 == 0 {
                theta = theta.min(flows[e]);
            }
        }
        let theta = theta.max(0.0);
        // Leaving variable: among the flow minimizers, the smallest cell
        // index (Bland's tie-break).
        let mut leaving: Option<usize> = None;
        let mut leaving_cell_index = usize::MAX;
        for (pos, &e) in path.iter().enumerate() {
            if pos % 2 == 0 && flows[e] <= theta {
                let (ci, cj) = cells[e];
                let cell_index = ci * n + cj;
                if cell_index < leaving_cell_index {
                    leaving = Some(e);
                    leaving_cell_index = cell_index;
                }
            }
        }
        let leaving = leaving.expect("cycle always has a decreasing edge");

        for (pos, &e) in path.iter().enumerate() {
            if pos % 2 == 0 {
                flows[e] = (flows[e] - theta).max(0.0);
            } else {
                flows[e] += theta;
            }
        }

        let (li, lj) = cells[leaving];
        basic[li * n + lj] = false;
        basic[ei * n + ej] = true;
        cells[leaving] = (ei, ej);
        flows[leaving] = theta;
    }

    let (u, v) = potentials(m, n, &cells, cost);
    let cost_value = cells
        .iter()
        .zip(&flows)
        .map(|(&(i, j), &f)| f * cost[(i, j)])
        .sum();
    TransportSolution {
        basis: cells
            .into_iter()
            .zip(flows)
            .map(|((i, j), f)| (i, j, f))
            .collect(),
        u,
        v,
        cost: cost_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn northwest_corner_counts_cells() {
        let (cells, flows) = northwest_corner(&[0.5, 0.5], &[0.25, 0.25, 0.5]);
        assert_eq!(cells.len(), 4);
        let total: f64 = flows.iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solves_a_known_instance() {
        // Classic 2x2: mass must cross to the cheap diagonal.
        let cost = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let sol = solve(&[0.5, 0.5], &[0.5, 0.5], &cost);
        assert!(sol.cost.abs() < 1e-15);
        assert!(sol.dual_infeasibility(&cost) <= 1e-9);
        assert!(sol.slackness_residual(&cost) <= 1e-9);
    }

    #[test]
    fn handles_degenerate_ties() {
        // Equal partial sums force degenerate pivots.
        let cost = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 3.0, 2.0, 5.0, 1.0, 3.0, 2.0, 2.0]);
        let sol = solve(
            &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            &cost,
        );
        assert!(sol.dual_infeasibility(&cost) <= 1e-9);
        // Optimal assignment: (0,1), (1,2), (2, 0 or 2) -> cost (1+1+3)/3 or... brute force:
        // permutations of {0,1,2}: compute minimum by hand = (1 + 1 + 3)/3 = 5/3? careful:
        // perms: 012:4+5+2=11, 021:4+1+2=7, 102:1+2+2=5, 120:1+1+3=5, 201:3+2+2=7, 210:3+5+3=11.
        // min total 5, scaled by 1/3.
        assert!((sol.cost - 5.0 / 3.0).abs() < 1e-12);
    }
}
