//! Minimum-cost perfect assignment on square integer matrices.
//!
//! The Hungarian method (shortest augmenting paths with potentials) yields the
//! optimal cost and dual potentials in O(n^3). Every optimal assignment uses
//! only edges with zero reduced cost, so the lexicographically smallest one is
//! then picked greedily on that tight subgraph, repairing the matching with an
//! alternating path per fixed column.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Square matrix of pairwise costs: rows are references, columns hypotheses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<u64>,
}

impl CostMatrix {
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidCostMatrix(format!(
                "matrix must be square: {n} rows but a row of length {}",
                bad.len()
            )));
        }
        Self::from_fn(n, |r, c| rows[r][c])
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> u64) -> Result<Self> {
        let limit = (i64::MAX as u64) / 4 / (n as u64 + 1);
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let v = f(r, c);
                if v > limit {
                    return Err(Error::InvalidCostMatrix(format!(
                        "entry ({r}, {c}) = {v} exceeds the overflow-safe limit {limit}"
                    )));
                }
                entries.push(v);
            }
        }
        Ok(CostMatrix { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.entries[row * self.n + col]
    }
}

/// Result of [`solve_assignment`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentSolution {
    /// `row_for_col[k]` is the reference row matched with hypothesis column `k`.
    pub row_for_col: Vec<usize>,
    pub cost: u64,
}

impl AssignmentSolution {
    pub fn col_for_row(&self) -> Vec<usize> {
        let mut out = vec![0; self.row_for_col.len()];
        for (c, &r) in self.row_for_col.iter().enumerate() {
            out[r] = c;
        }
        out
    }
}

/// Minimizes `sum_k m[pi(k)][k]` over permutations `pi`, returning the
/// lexicographically smallest minimizer.
pub fn solve_assignment(matrix: &CostMatrix) -> AssignmentSolution {
    let n = matrix.n;
    if n == 0 {
        return AssignmentSolution {
            row_for_col: Vec::new(),
            cost: 0,
        };
    }
    // work on the transpose so that "rows" are hypothesis columns and the
    // permutation being minimized lexicographically is indexed by them
    let cost = |k: usize, r: usize| matrix.get(r, k) as i64;
    let (u, v, mut choice) = hungarian(n, cost);
    let tight = |k: usize, r: usize| cost(k, r) - u[k] - v[r] == 0;

    let mut owner = vec![0usize; n];
    for (k, &r) in choice.iter().enumerate() {
        owner[r] = k;
    }

    let mut next = vec![usize::MAX; n];
    let mut reach = vec![false; n];
    let mut queue = VecDeque::new();
    for k in 0..n {
        // columns whose owner (a later row) can be rerouted so that the
        // column currently held by k becomes free
        let root = choice[k];
        reach.iter_mut().for_each(|x| *x = false);
        reach[root] = true;
        queue.clear();
        queue.push_back(root);
        while let Some(target) = queue.pop_front() {
            for x in k + 1..n {
                let col = choice[x];
                if !reach[col] && tight(x, target) {
                    reach[col] = true;
                    next[col] = target;
                    queue.push_back(col);
                }
            }
        }
        let pick = (0..n)
            .find(|&r| reach[r] && tight(k, r))
            .expect("the current column is always reachable and tight");
        if pick != root {
            let mut col = pick;
            let mut moves = Vec::new();
            while col != root {
                moves.push((owner[col], next[col]));
                col = next[col];
            }
            for (x, to) in moves {
                choice[x] = to;
                owner[to] = x;
            }
            choice[k] = pick;
            owner[pick] = k;
        }
    }

    let total = choice
        .iter()
        .enumerate()
        .try_fold(0u64, |acc, (k, &r)| acc.checked_add(matrix.get(r, k)))
        .expect("assignment cost overflows u64");
    AssignmentSolution {
        row_for_col: choice,
        cost: total,
    }
}

/// Shortest-augmenting-path Hungarian method. Returns row potentials, column
/// potentials and the optimal column for each row.
fn hungarian(n: usize, cost: impl Fn(usize, usize) -> i64) -> (Vec<i64>, Vec<i64>, Vec<usize>) {
    const INF: i64 = i64::MAX / 2;
    // 1-based with sentinel column 0
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
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

    let mut col_of_row = vec![0usize; n];
    for j in 1..=n {
        col_of_row[row_of[j] - 1] = j - 1;
    }
    (u[1..].to_vec(), v[1..].to_vec(), col_of_row)
}
