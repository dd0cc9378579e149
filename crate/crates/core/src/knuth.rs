//! Knuth's sequence `K = B^(1) B^(2) B^(3) ...`.
//!
//! `A^(n)` is `F^(2^n, n)` with every digit divided by `2^n`, and `B^(n)` is
//! `n * 2^(2n)` copies of `A^(n)`. Segment sizes explode quickly
//! (`|B^(5)|` is about `1.7e11`), so `K` is exposed as a stream only.

use crate::debruijn::FordStream;
use crate::{Error, RationalTerm, Result};

/// Exact sizes of `A^(n)` and `B^(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentSizes {
    pub n: u32,
    /// `2^(n^2)`
    pub a_len: u128,
    /// `n * 2^(2n)`
    pub b_reps: u128,
    /// `b_reps * a_len`
    pub b_len: u128,
}

impl SegmentSizes {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("order must be at least 1"));
        }
        let overflow = || Error::capacity(format!("segment sizes for order {n} exceed 128 bits"));
        let a_len = n
            .checked_mul(n)
            .and_then(|sq| 1u128.checked_shl(sq).filter(|_| sq < 128))
            .ok_or_else(overflow)?;
        let b_reps = n
            .checked_mul(2)
            .filter(|&e| e < 128)
            .and_then(|e| (n as u128).checked_mul(1u128 << e))
            .ok_or_else(overflow)?;
        let b_len = b_reps.checked_mul(a_len).ok_or_else(overflow)?;
        Ok(SegmentSizes {
            n,
            a_len,
            b_reps,
            b_len,
        })
    }
}

/// Terms of `A^(n)`.
#[derive(Debug, Clone)]
pub struct ASequence {
    ford: FordStream,
    den: u64,
}

impl Iterator for ASequence {
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

fn check_order(n: u32) -> Result<SegmentSizes> {
    let sizes = SegmentSizes::new(n)?;
    if n > 31 {
        return Err(Error::capacity(format!("alphabet 2^{n} exceeds digit width")));
    }
    Ok(sizes)
}

pub fn a_sequence(n: u32) -> Result<ASequence> {
    check_order(n)?;
    let base = 1u32 << n;
    Ok(ASequence {
        ford: FordStream::new(base, n)?,
        den: base as u64,
    })
}

/// Terms of `B^(n)`: `n * 2^(2n)` back-to-back copies of `A^(n)`.
#[derive(Debug, Clone)]
pub struct BSequence {
    n: u32,
    current: ASequence,
    copies_left: u128,
}

impl Iterator for BSequence {
    type Item = RationalTerm;

    #[inline]
    fn next(&mut self) -> Option<RationalTerm> {
        loop {
            if let Some(t) = self.current.next() {
                return Some(t);
            }
            if self.copies_left == 0 {
                return None;
            }
            self.copies_left -= 1;
            self.current = a_sequence(self.n).expect("order validated at construction");
        }
    }
}

pub fn b_sequence(n: u32) -> Result<BSequence> {
    let sizes = check_order(n)?;
    Ok(BSequence {
        n,
        current: a_sequence(n)?,
        copies_left: sizes.b_reps - 1,
    })
}

/// Pull-based stream of `K`.
///
/// Memory use is bounded by the current order. If the sizes of the next
/// segment cannot be represented, the stream ends and [`KStream::error`]
/// reports why.
#[derive(Debug)]
pub struct KStream {
    segment: BSequence,
    emitted: u128,
    halted: Option<Error>,
}

impl KStream {
    pub fn new() -> Self {
        KStream {
            segment: b_sequence(1).expect("B^(1) is always representable"),
            emitted: 0,
            halted: None,
        }
    }

    /// Order `n` of the `B^(n)` segment currently being emitted.
    pub fn order(&self) -> u32 {
        self.segment.n
    }

    pub fn emitted(&self) -> u128 {
        self.emitted
    }

    pub fn error(&self) -> Option<&Error> {
        self.halted.as_ref()
    }
}

impl Default for KStream {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for KStream {
    type Item = RationalTerm;

    #[inline]
    fn next(&mut self) -> Option<RationalTerm> {
        if self.halted.is_some() {
            return None;
        }
        loop {
            if let Some(t) = self.segment.next() {
                self.emitted += 1;
                return Some(t);
            }
            match b_sequence(self.segment.n + 1) {
                Ok(next) => self.segment = next,
                Err(e) => {
                    self.halted = Some(e);
                    return None;
                }
            }
        }
    }
}

pub fn k_stream() -> KStream {
    KStream::new()
}

/// Cumulative lengths of `K` after each of `B^(1)..=B^(n_max)`.
pub fn segment_boundaries(n_max: u32) -> Result<Vec<u128>> {
    let mut total: u128 = 0;
    (1..=n_max)
        .map(|n| {
            total = total
                .checked_add(SegmentSizes::new(n)?.b_len)
                .ok_or_else(|| Error::capacity("cumulative K length exceeds 128 bits"))?;
            Ok(total)
        })
        .collect()
}
