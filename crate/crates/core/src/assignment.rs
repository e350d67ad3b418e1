//! Square min-cost assignment (shortest augmenting paths with potentials)
//! and lexicographic selection among all optimal assignments.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

/// Cost of a forbidden cell. Callers guarantee that a perfect assignment
/// avoiding forbidden cells exists.
pub(crate) const FORBIDDEN: i64 = i64::MAX / 4;

pub(crate) struct CostMatrix {
    n: usize,
    cells: Vec<i64>,
}

impl CostMatrix {
    pub(crate) fn filled(n: usize, value: i64) -> Self {
        Self { n, cells: vec![value; n * n] }
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, cost: i64) {
        self.cells[row * self.n + col] = cost;
    }

    pub(crate) fn get(&self, row: usize, col: usize) -> i64 {
        self.cells[row * self.n + col]
    }
}

/// An optimal assignment with a dual certificate: `row_pot[i] + col_pot[j] <=
/// cost(i, j)` everywhere, with equality on every assigned cell.
pub(crate) struct Solution {
    pub(crate) col_of_row: Vec<usize>,
    row_pot: Vec<i64>,
    col_pot: Vec<i64>,
}

impl Solution {
    /// Cells an optimal assignment may use. By complementary slackness every
    /// optimal assignment uses only tight cells, and any perfect assignment
    /// on tight cells is optimal.
    pub(crate) fn is_tight(&self, costs: &CostMatrix, row: usize, col: usize) -> bool {
        let c = costs.get(row, col);
        c != FORBIDDEN && c - self.row_pot[row] - self.col_pot[col] == 0
    }
}

pub(crate) fn solve(costs: &CostMatrix) -> Solution {
    let n = costs.n;
    // 1-based, column 0 is a virtual source
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = costs.get(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[row_of_col[j] - 1] = j - 1;
    }
    Solution { col_of_row, row_pot: u[1..].to_vec(), col_pot: v[1..].to_vec() }
}

/// Among all optimal assignments, fixes the rows in `order` one at a time to
/// the most preferred column (smallest `col_rank`, then index) for which an
/// optimal completion still exists.
pub(crate) fn lexicographic_optimum(
    costs: &CostMatrix,
    mut solution: Solution,
    order: &[usize],
    col_rank: &[usize],
) -> Vec<usize> {
    let n = costs.n;
    let mut row_of_col = vec![0; n];
    for (row, &col) in solution.col_of_row.iter().enumerate() {
        row_of_col[col] = row;
    }
    let mut col_fixed = vec![false; n];
    for &row in order {
        let mut candidates: Vec<usize> =
            (0..n).filter(|&c| !col_fixed[c] && solution.is_tight(costs, row, c)).collect();
        candidates.sort_by_key(|&c| (col_rank[c], c));
        for col in candidates {
            if solution.col_of_row[row] == col
                || reroute(costs, &solution, &row_of_col, &col_fixed, row, col)
                    .map(|changes| apply(&mut solution.col_of_row, &mut row_of_col, changes))
                    .is_some()
            {
                col_fixed[col] = true;
                break;
            }
        }
        debug_assert!(col_fixed[solution.col_of_row[row]]);
    }
    solution.col_of_row
}

/// Looks for an alternating cycle through the tight cells that moves `row`
/// onto `col` while leaving fixed columns alone. Returns the (row, new col)
/// reassignments.
fn reroute(
    costs: &CostMatrix,
    solution: &Solution,
    row_of_col: &[usize],
    col_fixed: &[bool],
    row: usize,
    col: usize,
) -> Option<Vec<(usize, usize)>> {
    let n = costs.n;
    let displaced = row_of_col[col];
    let freed = solution.col_of_row[row];
    let mut parent_row = vec![usize::MAX; n];
    let mut visited = vec![false; n];
    let mut queue = VecDeque::from([displaced]);
    while let Some(r) = queue.pop_front() {
        for x in 0..n {
            if visited[x] || col_fixed[x] || x == col || !solution.is_tight(costs, r, x) {
                continue;
            }
            visited[x] = true;
            parent_row[x] = r;
            if x == freed {
                let mut changes = vec![(row, col)];
                let mut x = freed;
                loop {
                    let r = parent_row[x];
                    changes.push((r, x));
                    if r == displaced {
                        return Some(changes);
                    }
                    x = solution.col_of_row[r];
                }
            }
            queue.push_back(row_of_col[x]);
        }
    }
    None
}

fn apply(col_of_row: &mut [usize], row_of_col: &mut [usize], changes: Vec<(usize, usize)>) {
    for (row, col) in changes {
        col_of_row[row] = col;
        row_of_col[col] = row;
    }
}
