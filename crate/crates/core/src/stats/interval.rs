use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use super::boxes::{box_count_slice, UnitBox};
use crate::cud::c_sequence;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalCount {
    pub count: u64,
    /// `count - (y - x)`, always in `(-1, 1)`.
    pub epsilon: f64,
}

/// Number of integers of `{0, .., n-1}` inside `[x, y)`.
pub fn count_integers_in_interval(x: f64, y: f64, n: u64) -> Result<IntervalCount> {
    if !(x.is_finite() && y.is_finite() && 0.0 <= x && x <= y && y <= n as f64) {
        return Err(Error::invalid(format!(
            "need 0 <= x <= y <= n, got x={x} y={y} n={n}"
        )));
    }
    let count = (y.ceil() - x.ceil()) as u64;
    Ok(IntervalCount {
        count,
        epsilon: count as f64 - (y - x),
    })
}

/// Exact cyclic window count of `C^(n)` in a box, with the normalized error
/// term `epsilon = (count - n^n |I|) / (n^(n-1) (2^k - 1))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub n: u32,
    pub k: usize,
    pub count: u64,
    /// `n^n |I|`
    pub expected: f64,
    /// `n^(n-1) (2^k - 1)`
    pub bound: f64,
    /// Rounded to binary64; see `within_bound` for the exact comparison.
    pub epsilon: f64,
    /// `|count - n^n |I|| < n^(n-1) (2^k - 1)`, decided in exact arithmetic
    /// on the binary64 box bounds.
    pub within_bound: bool,
}

/// `x * 2^1074` as an integer; exact for every finite non-negative binary64.
fn scaled_dyadic(x: f64) -> BigInt {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as usize;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        BigInt::from(frac)
    } else {
        BigInt::from(frac | (1u64 << 52)) << (exp - 1)
    }
}

fn strict_bound_holds(n: u32, b: &UnitBox, count: u64) -> bool {
    let k = b.dim();
    let scale = 1074 * k;
    // |I| * 2^(1074 k)
    let volume: BigInt = b
        .bounds()
        .iter()
        .map(|&(u, v)| scaled_dyadic(v) - scaled_dyadic(u))
        .product();
    let n_pow = |e: u32| BigInt::from(n).pow(e);
    let deviation = ((BigInt::from(count) << scale) - n_pow(n) * volume).abs();
    let bound = (n_pow(n - 1) * BigInt::from((1u64 << k) - 1)) << scale;
    deviation < bound
}

const LEMMA1_MAX_ORDER: u32 = 7;

pub fn lemma1_cyclic_count(n: u32, b: &UnitBox) -> Result<Lemma1Report> {
    let k = b.dim();
    if n == 0 {
        return Err(Error::invalid("order must be at least 1"));
    }
    if k > n as usize {
        return Err(Error::precondition(format!("box dimension {k} exceeds order {n}")));
    }
    if n > LEMMA1_MAX_ORDER {
        return Err(Error::capacity(format!(
            "cyclic enumeration of C^({n}) exceeds the order-{LEMMA1_MAX_ORDER} guard"
        )));
    }
    let mut cyclic: Vec<_> = c_sequence(n)?.collect();
    let len = cyclic.len();
    cyclic.extend_from_within(..k - 1);
    let count = box_count_slice(&cyclic, b);
    debug_assert_eq!(count.n_windows as usize, len);
    let nn = (n as f64).powi(n as i32);
    let expected = nn * b.volume();
    let bound = (n as f64).powi(n as i32 - 1) * ((1u64 << k) - 1) as f64;
    Ok(Lemma1Report {
        n,
        k,
        count: count.nu,
        expected,
        bound,
        epsilon: (count.nu as f64 - expected) / bound,
        within_bound: strict_bound_holds(n, b, count.nu),
    })
}
