//! Row-banded Levenshtein recursion shared by the plain and time-constrained
//! engines.

use crate::transcript::CostModel;

use super::band::ColumnRange;
use super::{EditCounts, OpKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Diag {
    Forbidden,
    Correct,
    Substitute,
}

/// Value carried through the DP cells.
pub(crate) trait Score: Copy {
    fn origin() -> Self;
    fn cost(&self) -> u64;
    fn then(self, op: OpKind, costs: &CostModel) -> Self;
    fn then_inserts(self, n: usize, costs: &CostModel) -> Self;
}

impl Score for u64 {
    #[inline]
    fn origin() -> Self {
        0
    }

    #[inline]
    fn cost(&self) -> u64 {
        *self
    }

    #[inline]
    fn then(self, op: OpKind, costs: &CostModel) -> Self {
        self + op.cost(costs)
    }

    #[inline]
    fn then_inserts(self, n: usize, costs: &CostModel) -> Self {
        self + n as u64 * costs.insertion as u64
    }
}

/// Cost plus the operation counts along the tie-broken path into a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct Tally {
    pub cost: u64,
    pub counts: EditCounts,
}

impl Score for Tally {
    fn origin() -> Self {
        Tally::default()
    }

    #[inline]
    fn cost(&self) -> u64 {
        self.cost
    }

    #[inline]
    fn then(mut self, op: OpKind, costs: &CostModel) -> Self {
        self.cost += op.cost(costs);
        self.counts.record(op, 1);
        self
    }

    #[inline]
    fn then_inserts(mut self, n: usize, costs: &CostModel) -> Self {
        self.cost += n as u64 * costs.insertion as u64;
        self.counts.record(OpKind::Insert, n as u64);
        self
    }
}

/// Explicit cells `lo..=hi` of one DP row.
#[derive(Debug, Clone)]
pub(crate) struct Row<S> {
    pub lo: usize,
    pub hi: usize,
    pub cells: Vec<S>,
}

impl<S: Score> Row<S> {
    /// Value at column `j >= lo`; right of the band only insertions remain.
    #[inline]
    pub fn get(&self, j: usize, costs: &CostModel) -> S {
        debug_assert!(j >= self.lo);
        if j <= self.hi {
            self.cells[j - self.lo]
        } else {
            self.cells[self.hi - self.lo].then_inserts(j - self.hi, costs)
        }
    }
}

/// Runs the recursion for `n` reference rows and `m` hypothesis columns.
///
/// `band(i)` gives the explicit columns of row `i` (1-based); `diag(i, j)`
/// classifies the diagonal step into cell `(i, j)`. Among equal-cost
/// predecessors the diagonal wins, then deletion, then insertion. Every
/// finished row, starting with row 0, is handed to `on_row`.
pub(crate) fn run<S, B, D, F>(n: usize, m: usize, costs: &CostModel, band: B, diag: D, mut on_row: F) -> S
where
    S: Score,
    B: Fn(usize) -> ColumnRange,
    D: Fn(usize, usize) -> Diag,
    F: FnMut(usize, &Row<S>),
{
    let mut prev = Row {
        lo: 0,
        hi: 0,
        cells: vec![S::origin()],
    };
    on_row(0, &prev);
    let mut cur: Row<S> = Row {
        lo: 0,
        hi: 0,
        cells: Vec::new(),
    };

    for i in 1..=n {
        let ColumnRange { lo, hi } = band(i);
        debug_assert!(lo >= prev.lo && hi <= m);
        cur.lo = lo;
        cur.hi = hi;
        cur.cells.clear();
        cur.cells.push(prev.get(lo, costs).then(OpKind::Delete, costs));

        for j in lo + 1..=hi {
            let del = prev.get(j, costs).then(OpKind::Delete, costs);
            let ins = cur.cells[j - 1 - lo].then(OpKind::Insert, costs);
            let mut best = if del.cost() <= ins.cost() { del } else { ins };
            let op = match diag(i, j) {
                Diag::Forbidden => None,
                Diag::Correct => Some(OpKind::Correct),
                Diag::Substitute => Some(OpKind::Substitute),
            };
            if let Some(op) = op {
                let d = prev.get(j - 1, costs).then(op, costs);
                if d.cost() <= best.cost() {
                    best = d;
                }
            }
            cur.cells.push(best);
        }
        on_row(i, &cur);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev.get(m, costs)
}
