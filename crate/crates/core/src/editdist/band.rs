use crate::transcript::Interval;

use super::Collar;

/// Inclusive range of DP columns evaluated explicitly for one reference row.
///
/// Columns left of `lo` can only be reached by deletions and columns right of
/// `hi` only by insertions, so their values follow from the range edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnRange {
    pub lo: usize,
    pub hi: usize,
}

impl ColumnRange {
    pub fn width(&self) -> usize {
        self.hi - self.lo + 1
    }
}

/// Whether a reference and a hypothesis word may be matched (as correct or
/// substitution) under `collar`: they overlap, or the gap between them is
/// strictly smaller than the collar.
#[inline]
pub fn match_allowed(reference: Interval, hypothesis: Interval, collar: Collar) -> bool {
    let c = collar.seconds();
    hypothesis.begin < reference.end + c && reference.begin < hypothesis.end + c
}

/// Per-row column ranges for the time-constrained DP.
///
/// Row `i` (1-based, one per reference word) covers DP columns
/// `[a_i - 1, max(a_i - 1, b_i)]` where `a_i` is the first and `b_i` the last
/// hypothesis word that could match reference word `i`. Both ends are
/// nondecreasing in `i` and every allowed pair lies inside its row's range.
/// Unsorted times only widen the band; the result stays exact.
pub fn band_bounds(reference: &[Interval], hypothesis: &[Interval], collar: Collar) -> Vec<ColumnRange> {
    let c = collar.seconds();
    let m = hypothesis.len();

    let mut hyp_end_prefix_max = Vec::with_capacity(m);
    let mut acc = f64::NEG_INFINITY;
    for iv in hypothesis {
        acc = acc.max(iv.end);
        hyp_end_prefix_max.push(acc);
    }
    let mut hyp_begin_suffix_min = vec![0.0; m];
    let mut acc = f64::INFINITY;
    for (j, iv) in hypothesis.iter().enumerate().rev() {
        acc = acc.min(iv.begin);
        hyp_begin_suffix_min[j] = acc;
    }
    let mut ref_begin_suffix_min = vec![0.0; reference.len()];
    let mut acc = f64::INFINITY;
    for (i, iv) in reference.iter().enumerate().rev() {
        acc = acc.min(iv.begin);
        ref_begin_suffix_min[i] = acc;
    }

    let mut bands = Vec::with_capacity(reference.len());
    let mut first = 1usize; // a_i, m + 1 when nothing can match
    let mut last = 0usize; // b_i, 0 when nothing can match
    let mut ref_end_max = f64::NEG_INFINITY;
    for (i, iv) in reference.iter().enumerate() {
        ref_end_max = ref_end_max.max(iv.end);
        let begin_floor = ref_begin_suffix_min[i];
        while first <= m && hyp_end_prefix_max[first - 1] + c <= begin_floor {
            first += 1;
        }
        while last < m && hyp_begin_suffix_min[last] < ref_end_max + c {
            last += 1;
        }
        let lo = first - 1;
        bands.push(ColumnRange { lo, hi: lo.max(last) });
    }
    bands
}
