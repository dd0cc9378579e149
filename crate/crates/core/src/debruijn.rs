//! Ford sequences and de Bruijn oracles.
//!
//! The Ford sequence `F^(b,k)` is the lexicographically least `b`-ary de Bruijn
//! sequence of order `k`. It equals the concatenation, in lexicographic order,
//! of all Lyndon words over `{0, .., b-1}` whose length divides `k`, which is
//! what [`FordStream`] emits.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::{Error, Result};

/// Number of symbols of an alphabet `{0, .., base-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(u32);

impl Alphabet {
    pub fn new(base: u32) -> Result<Self> {
        if base == 0 {
            return Err(Error::invalid("alphabet size must be at least 1"));
        }
        Ok(Alphabet(base))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Word length of a de Bruijn sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Order(u32);

impl Order {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("order must be at least 1"));
        }
        Ok(Order(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// A finite sequence of digits over an alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitSeq {
    base: Alphabet,
    digits: Vec<u32>,
}

impl DigitSeq {
    /// Validates every digit against `base`.
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        let base = Alphabet::new(base)?;
        if let Some((i, d)) = digits.iter().enumerate().find(|(_, &d)| d >= base.get()) {
            return Err(Error::invalid(format!(
                "digit {d} at position {i} is outside base {}",
                base.get()
            )));
        }
        Ok(DigitSeq { base, digits })
    }

    pub fn base(&self) -> u32 {
        self.base.get()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn into_digits(self) -> Vec<u32> {
        self.digits
    }
}

/// `base^exp` with overflow reported as a capacity error.
pub(crate) fn checked_pow(base: u128, exp: u32) -> Result<u128> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::capacity(format!("{base}^{exp} exceeds 128 bits")))
}

/// Streaming FKM generator for `F^(b,k)`.
///
/// Holds a single working word of length at most `k`; each call to `next`
/// costs amortized constant time.
#[derive(Debug, Clone)]
pub struct FordStream {
    base: u32,
    order: usize,
    word: Vec<u32>,
    // Index of the next symbol of `word` to emit; `word.len()` when the
    // current word is exhausted (or not emitted because its length does
    // not divide the order).
    cursor: usize,
    len: u128,
    emitted: u128,
    done: bool,
}

impl FordStream {
    pub fn new(base: u32, order: u32) -> Result<Self> {
        let b = Alphabet::new(base)?;
        let k = Order::new(order)?;
        let len = checked_pow(b.get() as u128, k.get())?;
        let mut word = Vec::with_capacity(k.get() as usize);
        word.push(0);
        Ok(FordStream {
            base,
            order: order as usize,
            word,
            cursor: 0,
            len,
            emitted: 0,
            done: false,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn order(&self) -> u32 {
        self.order as u32
    }

    /// Total number of digits, `b^k`.
    pub fn total_len(&self) -> u128 {
        self.len
    }

    pub fn emitted(&self) -> u128 {
        self.emitted
    }

    /// Advances to the next Lyndon word whose length divides the order.
    fn advance(&mut self) -> bool {
        let top = self.base - 1;
        loop {
            let period = self.word.len();
            for i in period..self.order {
                let d = self.word[i - period];
                self.word.push(d);
            }
            while self.word.last() == Some(&top) {
                self.word.pop();
            }
            match self.word.last_mut() {
                None => return false,
                Some(last) => *last += 1,
            }
            if self.order.is_multiple_of(self.word.len()) {
                self.cursor = 0;
                return true;
            }
        }
    }
}

impl Iterator for FordStream {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.done {
            return None;
        }
        if self.cursor == self.word.len() && !self.advance() {
            self.done = true;
            return None;
        }
        let d = self.word[self.cursor];
        self.cursor += 1;
        self.emitted += 1;
        Some(d)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.len - self.emitted;
        match usize::try_from(rest) {
            Ok(n) => (n, Some(n)),
            Err(_) => (usize::MAX, None),
        }
    }
}

/// Streams the Ford sequence `F^(b,k)`.
pub fn ford_stream(base: u32, order: u32) -> Result<FordStream> {
    FordStream::new(base, order)
}

/// Materializes `F^(b,k)`. Refuses sequences longer than `2^32` digits.
pub fn ford_sequence(base: u32, order: u32) -> Result<DigitSeq> {
    let stream = FordStream::new(base, order)?;
    if stream.total_len() > 1 << 32 {
        return Err(Error::capacity(format!(
            "F^({base},{order}) has {} digits; stream it instead",
            stream.total_len()
        )));
    }
    Ok(DigitSeq {
        base: Alphabet(base),
        digits: stream.collect(),
    })
}

/// True iff `seq` has length `base^k` and every word of length `k` occurs
/// exactly once among its cyclic windows.
pub fn is_debruijn(seq: &DigitSeq, order: u32) -> bool {
    let b = seq.base() as u128;
    let Some(expected) = b.checked_pow(order) else {
        return false;
    };
    if order == 0 || seq.len() as u128 != expected {
        return false;
    }
    let n = seq.len();
    let k = order as usize;
    let mut seen = vec![false; n];
    // Rolling base-b value of the window starting at i.
    let modulus = expected / b;
    let mut value: u128 = 0;
    for j in 0..k {
        value = value * b + seq.digits[j % n] as u128;
    }
    for i in 0..n {
        let slot = &mut seen[value as usize];
        if *slot {
            return false;
        }
        *slot = true;
        let lead = seq.digits[i] as u128;
        value = (value - lead * modulus) * b + seq.digits[(i + k) % n] as u128;
    }
    true
}

/// Number of cyclic windows of `seq` equal to `word`.
pub fn word_occurrences(seq: &DigitSeq, word: &DigitSeq) -> Result<u64> {
    if seq.base() != word.base() {
        return Err(Error::invalid(format!(
            "base mismatch: sequence base {} vs word base {}",
            seq.base(),
            word.base()
        )));
    }
    if word.len() > seq.len() {
        return Err(Error::invalid(format!(
            "word of length {} is longer than sequence of length {}",
            word.len(),
            seq.len()
        )));
    }
    let n = seq.len();
    let w = word.digits();
    let count = (0..n)
        .filter(|&i| w.iter().enumerate().all(|(j, &d)| seq.digits[(i + j) % n] == d))
        .count();
    Ok(count as u64)
}

/// Number of `b`-ary de Bruijn sequences of order `k` given by the BEST
/// theorem: `(b!)^(b^(k-1)) / b^k`.
pub fn best_count(base: u32, order: u32) -> Result<BigUint> {
    if base < 2 {
        return Err(Error::precondition("best_count requires base >= 2"));
    }
    Order::new(order)?;
    let exponent = (base as u128)
        .checked_pow(order - 1)
        .and_then(|e| u32::try_from(e).ok())
        .ok_or_else(|| Error::capacity("exponent b^(k-1) exceeds 32 bits"))?;
    let factorial: BigUint = (1..=base).map(BigUint::from).product();
    // Result has roughly exponent * log2(b!) bits.
    let bits = exponent as u64 * factorial.bits();
    if bits > 1 << 28 {
        return Err(Error::capacity(format!("BEST count would need ~{bits} bits")));
    }
    let numerator = factorial.pow(exponent);
    let denominator = BigUint::from(base).pow(order);
    debug_assert!((&numerator % &denominator) == BigUint::from(0u32));
    Ok(numerator / denominator)
}

const ENUMERATION_MAX_LEN: u128 = 12;
const ENUMERATION_MAX_RESULTS: u64 = 1_000_000;

/// Every distinct cyclic `b`-ary de Bruijn sequence of order `k`, each given
/// by its least rotation, sorted lexicographically.
///
/// Exhaustive backtracking search; only feasible for `b^k <= 12`.
pub fn enumerate_debruijn(base: u32, order: u32) -> Result<Vec<DigitSeq>> {
    Alphabet::new(base)?;
    Order::new(order)?;
    let len = (base as u128)
        .checked_pow(order)
        .filter(|&l| l <= ENUMERATION_MAX_LEN)
        .ok_or_else(|| {
            Error::capacity(format!(
                "exhaustive enumeration requires b^k <= {ENUMERATION_MAX_LEN}"
            ))
        })?;
    if base == 1 {
        return Ok(vec![DigitSeq::new(1, vec![0])?]);
    }
    let expected = best_count(base, order)?;
    if expected.to_u64().is_none_or(|c| c > ENUMERATION_MAX_RESULTS) {
        return Err(Error::capacity(format!(
            "enumeration would produce {expected} sequences (limit {ENUMERATION_MAX_RESULTS})"
        )));
    }

    // The least rotation of a de Bruijn sequence is the unique rotation that
    // starts with k zeros, so fixing that prefix enumerates each cyclic
    // sequence exactly once.
    let mut search = Search {
        base,
        k: order as usize,
        len: len as usize,
        seq: vec![0; order as usize],
        seen: vec![false; len as usize],
        found: Vec::new(),
    };
    search.seen[0] = true;
    search.extend();
    let mut found: Vec<DigitSeq> = search
        .found
        .into_iter()
        .map(|digits| DigitSeq {
            base: Alphabet(base),
            digits,
        })
        .collect();
    found.sort();
    Ok(found)
}

struct Search {
    base: u32,
    k: usize,
    len: usize,
    seq: Vec<u32>,
    seen: Vec<bool>,
    found: Vec<Vec<u32>>,
}

impl Search {
    fn window_value(&self, digits: impl Iterator<Item = u32>) -> usize {
        digits.fold(0usize, |acc, d| acc * self.base as usize + d as usize)
    }

    fn extend(&mut self) {
        if self.seq.len() == self.len {
            if self.wraps_cleanly() {
                self.found.push(self.seq.clone());
            }
            return;
        }
        for d in 0..self.base {
            self.seq.push(d);
            let start = self.seq.len() - self.k;
            let w = self.window_value(self.seq[start..].iter().copied());
            if !self.seen[w] {
                self.seen[w] = true;
                self.extend();
                self.seen[w] = false;
            }
            self.seq.pop();
        }
    }

    fn wraps_cleanly(&self) -> bool {
        let n = self.len;
        let mut extra = Vec::with_capacity(self.k);
        for i in (n - self.k + 1)..n {
            let w = self.window_value((0..self.k).map(|j| self.seq[(i + j) % n]));
            if self.seen[w] || extra.contains(&w) {
                return false;
            }
            extra.push(w);
        }
        true
    }
}
