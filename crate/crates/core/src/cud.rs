//! The sequence `L^(t) = D^(1,t) D^(2,t) D^(3,t) ...`.
//!
//! `C^(n)` is `F^(n,n)` with every digit divided by `n`, and `D^(n,t)` is
//! `t(n)` consecutive copies of `C^(n)`. Positions in `L^(t)` are 1-based and
//! decompose uniquely as
//!
//! ```text
//! N = sum_{s<r} t(s) s^s + q r^r + p,   0 <= q < t(r),   1 <= p <= r^r
//! ```
//!
//! which [`locate`] computes and [`LStream::position`] tracks.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;

use crate::debruijn::{checked_pow, FordStream};
use crate::{Error, RationalTerm, Result};

/// Repetition count `t(n)` of `C^(n)` inside `D^(n,t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrowthFn {
    /// `t(n) = n`
    Identity,
    /// `t(n) = n^2`
    Square,
    /// `t(n) = values[n - 1]`, undefined past the end of the table.
    Table(Vec<u64>),
}

impl GrowthFn {
    /// Builds a table from `(n, t(n))` pairs; the keys must be exactly `1..=m`.
    pub fn table(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut pairs: Vec<(u64, u64)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        if pairs.is_empty() {
            return Err(Error::Parse("growth table is empty".into()));
        }
        for (i, &(n, value)) in pairs.iter().enumerate() {
            if n != i as u64 + 1 {
                return Err(Error::Parse(format!(
                    "growth table keys must be 1..=m without gaps (found n={n} at slot {})",
                    i + 1
                )));
            }
            if value == 0 {
                return Err(Error::Growth {
                    n,
                    reason: "t(n) must be at least 1".into(),
                });
            }
        }
        Ok(GrowthFn::Table(pairs.into_iter().map(|(_, v)| v).collect()))
    }

    /// `t(n)` for `n >= 1`.
    pub fn at(&self, n: u64) -> Result<u64> {
        match self {
            GrowthFn::Identity => Ok(n),
            GrowthFn::Square => n
                .checked_mul(n)
                .ok_or_else(|| Error::capacity(format!("t({n}) = {n}^2 exceeds 64 bits"))),
            GrowthFn::Table(values) => usize::try_from(n)
                .ok()
                .and_then(|n| n.checked_sub(1))
                .and_then(|i| values.get(i))
                .copied()
                .ok_or_else(|| Error::Growth {
                    n,
                    reason: format!("outside the growth table (defined for 1..={})", values.len()),
                }),
        }
    }

    /// `t(n)`, rejecting zero and any decrease from `previous = t(n-1)`.
    fn step(&self, n: u64, previous: u64) -> Result<u64> {
        let value = self.at(n)?;
        if value == 0 {
            return Err(Error::Growth {
                n,
                reason: "t(n) must be at least 1".into(),
            });
        }
        if value < previous {
            return Err(Error::Growth {
                n,
                reason: format!("t({n}) = {value} < t({}) = {previous}", n - 1),
            });
        }
        Ok(value)
    }
}

impl fmt::Display for GrowthFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFn::Identity => f.write_str("id"),
            GrowthFn::Square => f.write_str("sq"),
            GrowthFn::Table(values) => {
                f.write_str("table:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}={}", i + 1, v)?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for GrowthFn {
    type Err = Error;

    /// Accepts `id`, `sq`, or `table:1=1,2=4,3=9`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "id" => Ok(GrowthFn::Identity),
            "sq" => Ok(GrowthFn::Square),
            other => {
                let body = other.strip_prefix("table:").ok_or_else(|| {
                    Error::Parse(format!("unknown growth spec {other:?} (expected id, sq or table:...)"))
                })?;
                let pairs = body
                    .split(',')
                    .map(|item| {
                        let (n, v) = item
                            .split_once('=')
                            .ok_or_else(|| Error::Parse(format!("table entry {item:?} is not n=t")))?;
                        let parse = |x: &str| {
                            x.trim()
                                .parse::<u64>()
                                .map_err(|e| Error::Parse(format!("table entry {item:?}: {e}")))
                        };
                        Ok((parse(n)?, parse(v)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                GrowthFn::table(pairs)
            }
        }
    }
}

/// Result of [`validate_growth`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub n_max: u64,
    /// `t(1), .., t(n_max)`
    pub values: Vec<u64>,
    /// `n / t(n)` for `n = 1..=n_max`
    pub ratios: Vec<f64>,
    /// Set when the sampled ratios give no evidence that `n / t(n) -> 0`.
    pub warning: Option<String>,
}

/// Checks that `t` is positive and non-decreasing on `1..=n_max` and samples
/// the ratio `n / t(n)`.
///
/// The limit `n / t(n) -> 0` cannot be decided from finitely many samples; a
/// warning is attached when the ratio at `n_max` is not strictly below the
/// ratio at `ceil(n_max / 2)`.
pub fn validate_growth(t: &GrowthFn, n_max: u64) -> Result<GrowthReport> {
    if n_max == 0 {
        return Err(Error::precondition("n_max must be at least 1"));
    }
    let mut values = Vec::with_capacity(n_max as usize);
    let mut previous = 0;
    for n in 1..=n_max {
        previous = t.step(n, previous)?;
        values.push(previous);
    }
    let ratios: Vec<f64> = values
        .iter()
        .zip(1u64..)
        .map(|(&v, n)| n as f64 / v as f64)
        .collect();
    let mid = n_max.div_ceil(2) as usize - 1;
    let last = ratios.len() - 1;
    // Compare n_max / t(n_max) against mid / t(mid) exactly.
    let decreasing = n_max >= 2
        && ((last as u128 + 1) * values[mid] as u128) < ((mid as u128 + 1) * values[last] as u128);
    let warning = (!decreasing).then(|| {
        format!(
            "n/t(n) does not decrease on {}..={n_max} ({} -> {}); the hypothesis n/t(n) -> 0 is not evidenced",
            mid + 1,
            ratios[mid],
            ratios[last]
        )
    });
    Ok(GrowthReport {
        n_max,
        values,
        ratios,
        warning,
    })
}

/// Position of term `N` inside `L^(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Locator {
    /// Order of the rightmost, possibly incomplete, `D`-sequence.
    pub r: u32,
    /// Complete copies of `C^(r)` before the incomplete one.
    pub q: u128,
    /// Terms taken from the incomplete `C^(r)`, in `1..=r^r`.
    pub p: u128,
}

impl Locator {
    /// Rebuilds `N` from the decomposition.
    pub fn position(&self, t: &GrowthFn) -> Result<u128> {
        let overflow = || Error::capacity("position exceeds 128 bits");
        let mut total: u128 = 0;
        for s in 1..self.r {
            let seg = (t.at(s as u64)? as u128)
                .checked_mul(checked_pow(s as u128, s)?)
                .ok_or_else(overflow)?;
            total = total.checked_add(seg).ok_or_else(overflow)?;
        }
        self.q
            .checked_mul(checked_pow(self.r as u128, self.r)?)
            .and_then(|x| x.checked_add(self.p))
            .and_then(|x| x.checked_add(total))
            .ok_or_else(overflow)
    }
}

impl fmt::Display for Locator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={} q={} p={}", self.r, self.q, self.p)
    }
}

/// Decomposes the 1-based position `N` into `(r, q, p)`.
pub fn locate(n: u128, t: &GrowthFn) -> Result<Locator> {
    if n == 0 {
        return Err(Error::invalid("positions are 1-based"));
    }
    let mut before: u128 = 0;
    let mut previous = 0;
    for s in 1u32.. {
        let reps = t.step(s as u64, previous)?;
        previous = reps;
        let c_len = checked_pow(s as u128, s)?;
        let rem = n - before;
        // An overflowing segment length is larger than any remaining offset.
        let inside = match (reps as u128).checked_mul(c_len) {
            Some(seg) if rem > seg => {
                before += seg;
                false
            }
            _ => true,
        };
        if inside {
            let q = (rem - 1) / c_len;
            return Ok(Locator {
                r: s,
                q,
                p: rem - q * c_len,
            });
        }
    }
    unreachable!("the order loop only exits by returning")
}

/// Cumulative lengths of `L^(t)` after each of `D^(1,t)..=D^(n_max,t)`.
pub fn segment_boundaries(t: &GrowthFn, n_max: u32) -> Result<Vec<u128>> {
    let mut total: u128 = 0;
    let mut previous = 0;
    (1..=n_max)
        .map(|s| {
            previous = t.step(s as u64, previous)?;
            let seg = (previous as u128)
                .checked_mul(checked_pow(s as u128, s)?)
                .ok_or_else(|| Error::capacity("segment length exceeds 128 bits"))?;
            total = total
                .checked_add(seg)
                .ok_or_else(|| Error::capacity("cumulative length exceeds 128 bits"))?;
            Ok(total)
        })
        .collect()
}

/// Terms of `C^(n)`.
#[derive(Debug, Clone)]
pub struct CSequence {
    ford: FordStream,
    den: u64,
}

impl Iterator for CSequence {
    type Item = RationalTerm;

    #[inline]
    fn next(&mut self) -> Option<RationalTerm> {
        self.ford
            .next()
            .map(|d| RationalTerm::new_unchecked(d as u64, self.den))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.ford.size_hint()
    }
}

pub fn c_sequence(n: u32) -> Result<CSequence> {
    Ok(CSequence {
        ford: FordStream::new(n, n)?,
        den: n as u64,
    })
}

/// Terms of `D^(n,t)`: `t(n)` copies of `C^(n)`.
#[derive(Debug, Clone)]
pub struct DSequence {
    n: u32,
    current: CSequence,
    copies_left: u64,
}

impl Iterator for DSequence {
    type Item = RationalTerm;

    #[inline]
    fn next(&mut self) -> Option<RationalTerm> {
        loop {
            if let Some(x) = self.current.next() {
                return Some(x);
            }
            if self.copies_left == 0 {
                return None;
            }
            self.copies_left -= 1;
            self.current = c_sequence(self.n).expect("order validated at construction");
        }
    }
}

pub fn d_sequence(n: u32, t: &GrowthFn) -> Result<DSequence> {
    let reps = t.at(n as u64)?;
    if reps == 0 {
        return Err(Error::Growth {
            n: n as u64,
            reason: "t(n) must be at least 1".into(),
        });
    }
    Ok(DSequence {
        n,
        current: c_sequence(n)?,
        copies_left: reps - 1,
    })
}

/// Pull-based stream of `L^(t)` that tracks its own `(r, q, p)` position.
///
/// The stream ends early only if the growth function stops being valid (a
/// table runs out or decreases) or sizes overflow; [`LStream::error`] then
/// holds the reason.
#[derive(Debug)]
pub struct LStream {
    t: GrowthFn,
    r: u32,
    reps: u64,
    c_len: u128,
    q: u64,
    p: u128,
    ford: FordStream,
    emitted: u128,
    halted: Option<Error>,
}

impl LStream {
    pub fn new(t: GrowthFn) -> Result<Self> {
        if let GrowthFn::Table(values) = &t {
            validate_growth(&t, values.len() as u64)?;
        }
        let reps = t.step(1, 0)?;
        Ok(LStream {
            t,
            r: 1,
            reps,
            c_len: 1,
            q: 0,
            p: 0,
            ford: FordStream::new(1, 1)?,
            emitted: 0,
            halted: None,
        })
    }

    pub fn growth(&self) -> &GrowthFn {
        &self.t
    }

    /// Position of the most recently emitted term; `None` before the first.
    pub fn position(&self) -> Option<Locator> {
        (self.emitted > 0).then_some(Locator {
            r: self.r,
            q: self.q as u128,
            p: self.p,
        })
    }

    pub fn emitted(&self) -> u128 {
        self.emitted
    }

    pub fn error(&self) -> Option<&Error> {
        self.halted.as_ref()
    }

    fn next_copy(&mut self) -> Result<()> {
        self.q += 1;
        if self.q == self.reps {
            let r = self.r + 1;
            let reps = self.t.step(r as u64, self.reps)?;
            let c_len = checked_pow(r as u128, r)?;
            self.ford = FordStream::new(r, r)?;
            self.r = r;
            self.reps = reps;
            self.c_len = c_len;
            self.q = 0;
        } else {
            self.ford = FordStream::new(self.r, self.r)?;
        }
        self.p = 0;
        Ok(())
    }
}

impl Iterator for LStream {
    type Item = RationalTerm;

    #[inline]
    fn next(&mut self) -> Option<RationalTerm> {
        if self.halted.is_some() {
            return None;
        }
        if self.p == self.c_len && self.emitted > 0 {
            if let Err(e) = self.next_copy() {
                self.halted = Some(e);
                return None;
            }
        }
        let digit = self.ford.next()?;
        self.p += 1;
        self.emitted += 1;
        Some(RationalTerm::new_unchecked(digit as u64, self.r as u64))
    }
}

pub fn l_stream(t: GrowthFn) -> Result<LStream> {
    LStream::new(t)
}

const TERM_AT_MAX_OFFSET: u128 = 1 << 32;

/// The `N`-th term of `L^(t)`, found by locating `N` and streaming `p` digits
/// of `F^(r,r)`.
pub fn term_at(n: u128, t: &GrowthFn) -> Result<RationalTerm> {
    let loc = locate(n, t)?;
    if loc.p > TERM_AT_MAX_OFFSET {
        return Err(Error::capacity(format!(
            "term {n} lies {} digits into C^({}); streaming limit is {TERM_AT_MAX_OFFSET}",
            loc.p, loc.r
        )));
    }
    let digit = FordStream::new(loc.r, loc.r)?
        .nth(loc.p as usize - 1)
        .expect("p <= r^r");
    Ok(RationalTerm::new_unchecked(digit as u64, loc.r as u64))
}

/// One row of the `sum_{i<=n} i^(i-1) <= 2 n^(n-1)` check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerSumRow {
    pub n: u32,
    #[serde(serialize_with = "as_decimal")]
    pub lhs: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub rhs: BigUint,
    pub holds: bool,
}

fn as_decimal<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Evaluates `sum_{i=1}^n i^(i-1)` against `2 n^(n-1)` for `n = 1..=n_max`
/// in exact arithmetic.
pub fn power_sum_bound(n_max: u32) -> Vec<PowerSumRow> {
    let mut lhs = BigUint::from(0u32);
    (1..=n_max)
        .map(|n| {
            lhs += BigUint::from(n).pow(n - 1);
            let rhs = BigUint::from(2u32) * BigUint::from(n).pow(n - 1);
            PowerSumRow {
                n,
                holds: lhs <= rhs,
                lhs: lhs.clone(),
                rhs,
            }
        })
        .collect()
}
