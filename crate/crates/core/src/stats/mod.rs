//! Measurable equidistribution properties of term streams.
//!
//! Every stream-consuming operation looks at the `N` windows
//! `(x_i, .., x_{i+k-1})` for `i = 1..=N` and therefore needs `N + k - 1`
//! terms. Counts are exact: box membership is decided by integer comparison
//! of each term's numerator against thresholds derived from the binary64 box
//! bounds, never by rounding a term to a float.
//!
//! The `*_slice` variants count every window fully contained in a slice.
//! Splitting a prefix into chunks that overlap by `k - 1` terms and adding the
//! chunk results reproduces the sequential result, which is what the `par_*`
//! functions do.

mod boxes;
mod converge;
mod discrepancy;
mod interval;
mod order;
mod weyl;

pub use boxes::{
    box_count, box_count_slice, par_box_count, sample_boxes, UnitBox, WindowCount, DEFAULT_SEED,
};
pub use converge::{convergence_series, ConvergenceRow};
pub use discrepancy::star_discrepancy_estimate;
pub use interval::{count_integers_in_interval, lemma1_cyclic_count, IntervalCount, Lemma1Report};
pub use order::{par_perm_order_stats, perm_order_stats, perm_order_stats_slice, OrderStats};
pub use weyl::{
    congruence_solution_count, cyclic_weyl_direct, lemma2_cyclic_weyl, par_weyl_sum,
    residue_multiplicities_direct, weyl_sum, weyl_sum_slice, Lemma2Report, WeylVector,
};

use std::ops::Range;

use crate::{Error, RationalTerm, Result};

const WINDOW_CHUNK: usize = 1 << 14;

/// Calls `f` on each of the first `n` windows of length `k` of `terms`.
pub(crate) fn for_each_window<I, F>(terms: I, k: usize, n: u64, mut f: F) -> Result<()>
where
    I: IntoIterator<Item = RationalTerm>,
    F: FnMut(&[RationalTerm]),
{
    debug_assert!(k >= 1);
    let needed = n as u128 + k as u128 - 1;
    let mut iter = terms.into_iter();
    let mut buf: Vec<RationalTerm> = Vec::with_capacity(WINDOW_CHUNK + k);
    let mut got: u128 = 0;
    let mut done: u64 = 0;
    while done < n {
        let before = buf.len();
        buf.extend(iter.by_ref().take(WINDOW_CHUNK + k - 1 - before));
        got += (buf.len() - before) as u128;
        let available = (buf.len() + 1).saturating_sub(k) as u64;
        let take = available.min(n - done);
        if take == 0 {
            return Err(Error::ShortStream { needed, got });
        }
        for i in 0..take as usize {
            f(&buf[i..i + k]);
        }
        done += take;
        buf.drain(..take as usize);
    }
    Ok(())
}

/// Splits `0..n` window indices into at most `parts` contiguous ranges.
pub(crate) fn partition(n: usize, parts: usize) -> Vec<Range<usize>> {
    let parts = parts.clamp(1, n.max(1));
    let step = n.div_ceil(parts);
    (0..parts)
        .map(|i| (i * step).min(n)..((i + 1) * step).min(n))
        .filter(|r| !r.is_empty())
        .collect()
}

/// Checks that `terms` holds at least `n + k - 1` terms.
pub(crate) fn check_prefix(terms: &[RationalTerm], n: u64, k: usize) -> Result<usize> {
    let needed = n as u128 + k as u128 - 1;
    if (terms.len() as u128) < needed {
        return Err(Error::ShortStream {
            needed,
            got: terms.len() as u128,
        });
    }
    Ok(n as usize)
}

pub(crate) fn require_windows(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("window count N must be at least 1"));
    }
    Ok(())
}
