//! Exact sequence terms and exact comparisons against binary64 bounds.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::{Error, Result};

/// A sequence term `num/den` with `0 <= num < den`.
///
/// Terms are not reduced: `2/4` keeps its segment denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RationalTerm {
    num: u64,
    den: u64,
}

impl RationalTerm {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num >= den {
            return Err(Error::invalid(format!("term {num}/{den} is not in [0,1)")));
        }
        Ok(RationalTerm { num, den })
    }

    #[inline]
    pub(crate) fn new_unchecked(num: u64, den: u64) -> Self {
        debug_assert!(num < den);
        RationalTerm { num, den }
    }

    #[inline]
    pub fn num(self) -> u64 {
        self.num
    }

    #[inline]
    pub fn den(self) -> u64 {
        self.den
    }

    /// Nearest binary64 value.
    pub fn to_f64(self) -> f64 {
        // Both operands are exact below 2^53, so IEEE division rounds once.
        if self.den < 1 << 53 {
            self.num as f64 / self.den as f64
        } else {
            let g = num_integer::gcd(self.num, self.den);
            (self.num / g) as f64 / (self.den / g) as f64
        }
    }

    /// Compares the values of two terms exactly.
    pub fn cmp_value(self, other: RationalTerm) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for RationalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RationalTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (num, den) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected num/den, got {s:?}")))?;
        let num = num
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("numerator {num:?}: {e}")))?;
        let den = den
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("denominator {den:?}: {e}")))?;
        RationalTerm::new(num, den).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Splits a finite non-negative binary64 into `m * 2^e`.
fn decompose(x: f64) -> (u64, i32) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

/// `ceil(x * den)` computed exactly, for `x` in `[0, 1]`.
///
/// For an integer numerator, `num/den >= x` iff `num >= ceil_scaled(x, den)`
/// and `num/den < x` iff `num < ceil_scaled(x, den)`.
pub fn ceil_scaled(x: f64, den: u64) -> u128 {
    debug_assert!((0.0..=1.0).contains(&x));
    let (m, e) = decompose(x);
    let prod = m as u128 * den as u128;
    if prod == 0 {
        return 0;
    }
    if e >= 0 {
        return prod << e;
    }
    let shift = e.unsigned_abs();
    if shift >= 128 {
        // prod < 2^117, so x * den lies in (0, 1).
        return 1;
    }
    let q = prod >> shift;
    if q << shift == prod {
        q
    } else {
        q + 1
    }
}

/// Half-open numerator range `[lo, hi)` selecting terms with denominator
/// `den` inside `[u, v)`.
#[inline]
pub fn numerator_range(u: f64, v: f64, den: u64) -> (u128, u128) {
    (ceil_scaled(u, den), ceil_scaled(v, den))
}
