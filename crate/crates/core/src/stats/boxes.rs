use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{check_prefix, for_each_window, partition, require_windows};
use crate::rational::numerator_range;
use crate::{Error, RationalTerm, Result};

/// Seed used for reproducible box sampling.
pub const DEFAULT_SEED: u64 = 20_190_924;

/// A half-open box `[u_1, v_1) x .. x [u_k, v_k)` inside `[0, 1)^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitBox {
    bounds: Vec<(f64, f64)>,
}

impl UnitBox {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::invalid("a box needs at least one dimension"));
        }
        if bounds.len() > 64 {
            return Err(Error::invalid("boxes are limited to 64 dimensions"));
        }
        for (d, &(u, v)) in bounds.iter().enumerate() {
            if !(0.0 <= u && u < v && v <= 1.0) {
                return Err(Error::invalid(format!(
                    "dimension {}: need 0 <= u < v <= 1, got [{u}, {v})",
                    d + 1
                )));
            }
        }
        Ok(UnitBox { bounds })
    }

    /// `[0, 1)^k`
    pub fn full(k: usize) -> Result<Self> {
        UnitBox::new(vec![(0.0, 1.0); k])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// `|I|`, the product of side lengths.
    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(|(u, v)| v - u).product()
    }
}

impl fmt::Display for UnitBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (u, v)) in self.bounds.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{u}:{v}")?;
        }
        Ok(())
    }
}

impl FromStr for UnitBox {
    type Err = Error;

    /// Parses `u1:v1,u2:v2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bounds = s
            .split(',')
            .map(|side| {
                let (u, v) = side
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("box side {side:?} is not u:v")))?;
                let parse = |x: &str| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("box side {side:?}: {e}")))
                };
                Ok((parse(u)?, parse(v)?))
            })
            .collect::<Result<Vec<_>>>()?;
        UnitBox::new(bounds).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Box membership with numerator thresholds cached per denominator.
pub(crate) struct Membership<'a> {
    bounds: &'a [(f64, f64)],
    cache: Vec<(u64, Vec<(u128, u128)>)>,
    last: usize,
}

impl<'a> Membership<'a> {
    pub(crate) fn new(b: &'a UnitBox) -> Self {
        Membership {
            bounds: &b.bounds,
            cache: Vec::new(),
            last: 0,
        }
    }

    fn ranges(&mut self, den: u64) -> &[(u128, u128)] {
        if self.cache.get(self.last).is_none_or(|(d, _)| *d != den) {
            self.last = match self.cache.iter().position(|(d, _)| *d == den) {
                Some(i) => i,
                None => {
                    let ranges = self
                        .bounds
                        .iter()
                        .map(|&(u, v)| numerator_range(u, v, den))
                        .collect();
                    self.cache.push((den, ranges));
                    self.cache.len() - 1
                }
            };
        }
        &self.cache[self.last].1
    }

    #[inline]
    pub(crate) fn contains(&mut self, window: &[RationalTerm]) -> bool {
        window.iter().enumerate().all(|(d, t)| {
            let (lo, hi) = self.ranges(t.den())[d];
            let num = t.num() as u128;
            lo <= num && num < hi
        })
    }
}

/// `nu` of `n_windows` windows fell inside the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct WindowCount {
    pub nu: u64,
    pub n_windows: u64,
}

impl WindowCount {
    pub fn ratio(&self) -> f64 {
        self.nu as f64 / self.n_windows as f64
    }

    /// Adds counts of disjoint window ranges.
    pub fn merge(self, other: WindowCount) -> WindowCount {
        WindowCount {
            nu: self.nu + other.nu,
            n_windows: self.n_windows + other.n_windows,
        }
    }
}

/// Counts the first `n` windows of `terms` lying in `b` (window length is
/// the box dimension).
pub fn box_count<I>(terms: I, n: u64, b: &UnitBox) -> Result<WindowCount>
where
    I: IntoIterator<Item = RationalTerm>,
{
    require_windows(n)?;
    let mut member = Membership::new(b);
    let mut nu = 0;
    for_each_window(terms, b.dim(), n, |w| nu += member.contains(w) as u64)?;
    Ok(WindowCount { nu, n_windows: n })
}

/// Counts every window fully inside `terms`.
pub fn box_count_slice(terms: &[RationalTerm], b: &UnitBox) -> WindowCount {
    let mut member = Membership::new(b);
    let windows = terms.windows(b.dim());
    let n_windows = windows.len() as u64;
    let nu = windows.filter(|w| member.contains(w)).count() as u64;
    WindowCount { nu, n_windows }
}

/// [`box_count`] over a materialized prefix, split across `threads` workers.
pub fn par_box_count(terms: &[RationalTerm], n: u64, b: &UnitBox, threads: usize) -> Result<WindowCount> {
    require_windows(n)?;
    let k = b.dim();
    let n = check_prefix(terms, n, k)?;
    let chunks = partition(n, threads);
    Ok(std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|r| scope.spawn(move || box_count_slice(&terms[r.start..r.end + k - 1], b)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("box count worker panicked"))
            .fold(WindowCount::default(), WindowCount::merge)
    }))
}

/// `count` pseudo-random `k`-dimensional boxes from a fixed seed.
///
/// Roughly a third of the bounds are snapped to multiples of `1/grid` so that
/// box edges coincide with sequence values; the rest are uniform.
pub fn sample_boxes(seed: u64, k: usize, grid: u32, count: usize) -> Vec<UnitBox> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> f64 {
        if grid > 0 && rng.gen_range(0..3) == 0 {
            rng.gen_range(0..=grid) as f64 / grid as f64
        } else {
            rng.gen::<f64>()
        }
    };
    (0..count)
        .map(|_| {
            let bounds = (0..k)
                .map(|_| loop {
                    let (a, b) = (draw(&mut rng), draw(&mut rng));
                    let (u, v) = if a <= b { (a, b) } else { (b, a) };
                    if u < v {
                        break (u, v);
                    }
                })
                .collect();
            UnitBox::new(bounds).expect("sampled bounds are ordered inside [0, 1]")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cud::{c_sequence, l_stream, GrowthFn};
    use crate::knuth::k_stream;

    #[test]
    fn box_validation_and_parsing() {
        assert!(UnitBox::new(vec![(0.5, 0.5)]).is_err());
        assert!(UnitBox::new(vec![(0.0, 1.5)]).is_err());
        assert!(UnitBox::new(vec![(f64::NAN, 0.5)]).is_err());
        assert!(UnitBox::new(vec![]).is_err());
        let b: UnitBox = "0:0.5, 0.25:1".parse().unwrap();
        assert_eq!(b.bounds(), [(0.0, 0.5), (0.25, 1.0)]);
        assert_eq!(b.volume(), 0.375);
        assert_eq!(b.to_string(), "0:0.5,0.25:1");
        assert!("0-1".parse::<UnitBox>().is_err());
        assert!("0:x".parse::<UnitBox>().is_err());
    }

    #[test]
    fn c3_zero_count() {
        let b = UnitBox::new(vec![(0.0, 1.0 / 3.0)]).unwrap();
        let c = box_count(c_sequence(3).unwrap(), 25, &b).unwrap();
        assert_eq!(c, WindowCount { nu: 9, n_windows: 25 });
    }

    #[test]
    fn full_box_counts_everything() {
        for k in 1..=3 {
            let c = box_count(l_stream(GrowthFn::Square).unwrap(), 50, &UnitBox::full(k).unwrap())
                .unwrap();
            assert_eq!(c.nu, 50);
        }
    }

    #[test]
    fn knuth_first_block() {
        let b = UnitBox::new(vec![(0.0, 0.5)]).unwrap();
        assert_eq!(box_count(k_stream(), 8, &b).unwrap().nu, 4);
    }

    #[test]
    fn edge_of_box_is_exact() {
        // 1/3 as f64 is just below one third: the term 1/3 is inside [1/3, 2/3).
        let t = RationalTerm::new(1, 3).unwrap();
        let b = UnitBox::new(vec![(1.0 / 3.0, 2.0 / 3.0)]).unwrap();
        assert_eq!(box_count_slice(&[t], &b).nu, 1);
        // 2/3 as f64 is just below two thirds: 2/3 is outside [0, 2/3).
        let t = RationalTerm::new(2, 3).unwrap();
        let b = UnitBox::new(vec![(0.0, 2.0 / 3.0)]).unwrap();
        assert_eq!(box_count_slice(&[t], &b).nu, 0);
        // 0.4 as f64 is just above 2/5: 2/5 is outside [0.4, 1).
        let t = RationalTerm::new(2, 5).unwrap();
        let b = UnitBox::new(vec![(0.4, 1.0)]).unwrap();
        assert_eq!(box_count_slice(&[t], &b).nu, 0);
        let b = UnitBox::new(vec![(0.0, 0.5)]).unwrap();
        assert_eq!(box_count_slice(&[RationalTerm::new(1, 2).unwrap()], &b).nu, 0);
    }

    #[test]
    fn short_stream_is_error() {
        let b = UnitBox::full(2).unwrap();
        assert!(matches!(
            box_count(c_sequence(2).unwrap(), 4, &b),
            Err(Error::ShortStream { needed: 5, got: 4 })
        ));
        assert!(box_count(c_sequence(2).unwrap(), 0, &b).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let terms: Vec<_> = l_stream(GrowthFn::Square).unwrap().take(20_002).collect();
        for b in sample_boxes(7, 3, 4, 5) {
            let seq = box_count(terms.iter().copied(), 20_000, &b).unwrap();
            for threads in [1, 2, 3, 8] {
                assert_eq!(par_box_count(&terms, 20_000, &b, threads).unwrap(), seq);
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        assert_eq!(sample_boxes(1, 2, 5, 10), sample_boxes(1, 2, 5, 10));
        assert_ne!(sample_boxes(1, 2, 5, 10), sample_boxes(2, 2, 5, 10));
    }
}
