use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{check_prefix, for_each_window, partition, require_windows};
use crate::{Error, RationalTerm, Result};

const MAX_WINDOW: usize = 8;

/// Relative-order classification of `k`-windows.
///
/// A pattern is written as the rank of each entry within its window, so for
/// `k = 3` the increasing pattern is `"012"` and the decreasing one `"210"`.
/// Windows with two equal entries are counted in `tie_count` only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderStats {
    pub k: usize,
    pub counts: BTreeMap<String, u64>,
    pub tie_count: u64,
}

impl OrderStats {
    fn empty(k: usize) -> Self {
        let mut counts = BTreeMap::new();
        for perm in permutations(k) {
            counts.insert(pattern_name(&perm), 0);
        }
        OrderStats {
            k,
            counts,
            tie_count: 0,
        }
    }

    pub fn windows(&self) -> u64 {
        self.counts.values().sum::<u64>() + self.tie_count
    }

    pub fn strict_windows(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn tie_fraction(&self) -> f64 {
        self.tie_count as f64 / self.windows() as f64
    }

    /// Frequency of each pattern among windows with pairwise distinct entries.
    pub fn frequencies(&self) -> BTreeMap<String, f64> {
        let strict = self.strict_windows() as f64;
        self.counts
            .iter()
            .map(|(p, &c)| (p.clone(), c as f64 / strict))
            .collect()
    }

    /// Largest `|frequency - 1/k!|` over all patterns.
    pub fn max_deviation(&self) -> f64 {
        let target = 1.0 / self.counts.len() as f64;
        self.frequencies()
            .values()
            .map(|f| (f - target).abs())
            .fold(0.0, f64::max)
    }

    pub fn merge(mut self, other: &OrderStats) -> OrderStats {
        for (p, c) in &other.counts {
            *self.counts.entry(p.clone()).or_default() += c;
        }
        self.tie_count += other.tie_count;
        self
    }
}

fn permutations(k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current: Vec<u8> = (0..k as u8).collect();
    heap_permute(k, &mut current, &mut out);
    out
}

fn heap_permute(n: usize, a: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if n <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..n - 1 {
        heap_permute(n - 1, a, out);
        if n.is_multiple_of(2) {
            a.swap(i, n - 1);
        } else {
            a.swap(0, n - 1);
        }
    }
    heap_permute(n - 1, a, out);
}

fn pattern_name(ranks: &[u8]) -> String {
    ranks.iter().map(|r| char::from(b'0' + r)).collect()
}

/// Packs the rank pattern of a window into 4-bit nibbles, or `None` on a tie.
#[inline]
fn pattern_key(w: &[RationalTerm]) -> Option<u32> {
    let mut key = 0u32;
    for (i, &x) in w.iter().enumerate() {
        let mut rank = 0u32;
        for (j, &y) in w.iter().enumerate() {
            if i != j {
                match y.cmp_value(x) {
                    Ordering::Less => rank += 1,
                    Ordering::Equal => return None,
                    Ordering::Greater => {}
                }
            }
        }
        key |= rank << (4 * i);
    }
    Some(key)
}

struct Tally {
    k: usize,
    counts: HashMap<u32, u64>,
    ties: u64,
}

impl Tally {
    fn new(k: usize) -> Self {
        Tally {
            k,
            counts: HashMap::new(),
            ties: 0,
        }
    }

    #[inline]
    fn add(&mut self, w: &[RationalTerm]) {
        match pattern_key(w) {
            Some(key) => *self.counts.entry(key).or_default() += 1,
            None => self.ties += 1,
        }
    }

    fn finish(self) -> OrderStats {
        let mut stats = OrderStats::empty(self.k);
        for (key, c) in self.counts {
            let ranks: Vec<u8> = (0..self.k).map(|i| ((key >> (4 * i)) & 0xf) as u8).collect();
            *stats.counts.get_mut(&pattern_name(&ranks)).expect("all patterns seeded") += c;
        }
        stats.tie_count = self.ties;
        stats
    }
}

fn check_k(k: usize) -> Result<()> {
    if !(2..=MAX_WINDOW).contains(&k) {
        return Err(Error::invalid(format!(
            "order-statistics window must be in 2..={MAX_WINDOW}, got {k}"
        )));
    }
    Ok(())
}

/// Classifies the first `n` windows of length `k` by relative order.
pub fn perm_order_stats<I>(terms: I, n: u64, k: usize) -> Result<OrderStats>
where
    I: IntoIterator<Item = RationalTerm>,
{
    check_k(k)?;
    require_windows(n)?;
    let mut tally = Tally::new(k);
    for_each_window(terms, k, n, |w| tally.add(w))?;
    Ok(tally.finish())
}

/// Order statistics over every window fully inside `terms`.
pub fn perm_order_stats_slice(terms: &[RationalTerm], k: usize) -> Result<OrderStats> {
    check_k(k)?;
    let mut tally = Tally::new(k);
    terms.windows(k).for_each(|w| tally.add(w));
    Ok(tally.finish())
}

/// [`perm_order_stats`] over a materialized prefix, split across `threads` workers.
pub fn par_perm_order_stats(terms: &[RationalTerm], n: u64, k: usize, threads: usize) -> Result<OrderStats> {
    check_k(k)?;
    require_windows(n)?;
    let n = check_prefix(terms, n, k)?;
    let parts = std::thread::scope(|scope| {
        let handles: Vec<_> = partition(n, threads)
            .into_iter()
            .map(|r| scope.spawn(move || perm_order_stats_slice(&terms[r.start..r.end + k - 1], k)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("order-statistics worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(parts
        .iter()
        .fold(OrderStats::empty(k), |acc, part| acc.merge(part)))
}
