use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use super::{check_prefix, for_each_window, partition, require_windows};
use crate::debruijn::{checked_pow, ford_sequence};
use crate::{Error, RationalTerm, Result};

/// A non-zero integer frequency vector `(l_1, .., l_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeylVector(Vec<i64>);

impl WeylVector {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() || entries.iter().all(|&l| l == 0) {
            return Err(Error::invalid("Weyl vector must have a non-zero entry"));
        }
        if entries.contains(&i64::MIN) {
            return Err(Error::invalid("Weyl vector entry out of range"));
        }
        Ok(WeylVector(entries))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// `min |l_i|`
    pub fn min_abs(&self) -> u64 {
        self.0.iter().map(|l| l.unsigned_abs()).min().unwrap_or(0)
    }

    /// `gcd(l_1, .., l_k, n)`
    pub fn gcd_with(&self, n: u64) -> u64 {
        self.0.iter().fold(n, |g, l| g.gcd(&l.unsigned_abs()))
    }

    /// The exponential-sum identity over cyclic `C^(n)` windows needs
    /// `n > max(k, min |l_i|)`.
    pub fn vanishing_condition(&self, n: u64) -> bool {
        n > self.dim() as u64 && n > self.min_abs()
    }
}

impl fmt::Display for WeylVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for WeylVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("Weyl entry {x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        WeylVector::new(entries).map_err(|e| Error::Parse(e.to_string()))
    }
}

const EXACT_PHASE_LIMIT: u128 = 1 << 62;

/// `ell . w mod 1` as an exact fraction `a / b` with `0 <= a < b`, or `None`
/// when the common denominator is too large for exact arithmetic.
fn phase(ell: &[i64], window: &[RationalTerm]) -> Option<(u128, u128)> {
    // Mixed denominators only occur at segment borders.
    let lcm = window.iter().try_fold(1u128, |acc, t| {
        Some(acc.lcm(&(t.den() as u128))).filter(|&l| l <= EXACT_PHASE_LIMIT)
    })?;
    let m = lcm as i128;
    let a = ell.iter().zip(window).fold(0i128, |acc, (&l, t)| {
        let scaled = (t.num() as u128 * (lcm / t.den() as u128)) as i128;
        (acc + (l as i128 % m) * scaled % m) % m
    });
    Some((a.rem_euclid(m) as u128, lcm))
}

#[inline]
fn unit_root(a: u128, b: u128) -> Complex64 {
    let (s, c) = (TAU * (a as f64 / b as f64)).sin_cos();
    Complex64::new(c, s)
}

#[inline]
fn window_root(ell: &[i64], window: &[RationalTerm]) -> Complex64 {
    match phase(ell, window) {
        Some((a, b)) => unit_root(a, b),
        None => {
            let dot: f64 = ell.iter().zip(window).map(|(&l, t)| l as f64 * t.to_f64()).sum();
            let (s, c) = (TAU * dot.rem_euclid(1.0)).sin_cos();
            Complex64::new(c, s)
        }
    }
}

fn check_dim(ell: &WeylVector) -> Result<()> {
    if ell.dim() > 64 {
        return Err(Error::invalid("Weyl vectors are limited to 64 entries"));
    }
    Ok(())
}

/// `sum_{j=1}^{n} exp(2 pi i ell . w_j)` over the first `n` windows, unnormalized.
pub fn weyl_sum<I>(terms: I, n: u64, ell: &WeylVector) -> Result<Complex64>
where
    I: IntoIterator<Item = RationalTerm>,
{
    require_windows(n)?;
    check_dim(ell)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for_each_window(terms, ell.dim(), n, |w| sum += window_root(&ell.0, w))?;
    Ok(sum)
}

/// Weyl sum over every window fully inside `terms`.
pub fn weyl_sum_slice(terms: &[RationalTerm], ell: &WeylVector) -> Complex64 {
    terms.windows(ell.dim()).map(|w| window_root(&ell.0, w)).sum()
}

/// [`weyl_sum`] over a materialized prefix, split across `threads` workers.
/// Partial sums are added in chunk order.
pub fn par_weyl_sum(terms: &[RationalTerm], n: u64, ell: &WeylVector, threads: usize) -> Result<Complex64> {
    require_windows(n)?;
    check_dim(ell)?;
    let k = ell.dim();
    let n = check_prefix(terms, n, k)?;
    Ok(std::thread::scope(|scope| {
        let handles: Vec<_> = partition(n, threads)
            .into_iter()
            .map(|r| scope.spawn(move || weyl_sum_slice(&terms[r.start..r.end + k - 1], ell)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("Weyl worker panicked"))
            .sum()
    }))
}

/// `#{gamma in {0..n-1}^k : ell . gamma = r (mod n)}`, which is
/// `g n^(k-1)` when `g = gcd(l_1, .., l_k, n)` divides `r` and zero otherwise.
pub fn congruence_solution_count(ell: &WeylVector, r: u64, n: u64) -> Result<u128> {
    if n == 0 || r >= n {
        return Err(Error::invalid(format!("need n >= 1 and 0 <= r < n, got r={r} n={n}")));
    }
    let g = ell.gcd_with(n);
    if !r.is_multiple_of(g) {
        return Ok(0);
    }
    let k = u32::try_from(ell.dim() - 1).map_err(|_| Error::capacity("dimension too large"))?;
    checked_pow(n as u128, k)?
        .checked_mul(g as u128)
        .ok_or_else(|| Error::capacity("solution count exceeds 128 bits"))
}

/// Residue-class decomposition of the cyclic Weyl sum of `C^(n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma2Report {
    pub n: u32,
    pub k: usize,
    pub g: u64,
    /// Number of cyclic windows `w` with `ell . (n w) = r (mod n)`, for each `r`.
    pub multiplicities: Vec<u128>,
    /// `n > max(k, min |l_i|)`
    pub condition_holds: bool,
    /// Real and imaginary part of `sum_r multiplicity[r] exp(2 pi i r / n)`.
    pub value: (f64, f64),
}

impl Lemma2Report {
    /// All residues divisible by `g` carry the same weight, every other residue
    /// carries none, and there are at least two weighted residues. The sum of
    /// the weighted roots of unity is then exactly zero.
    pub fn vanishes_exactly(&self) -> bool {
        let g = self.g as usize;
        let weight = self.multiplicities[0];
        self.multiplicities
            .iter()
            .enumerate()
            .all(|(r, &m)| if r % g == 0 { m == weight } else { m == 0 })
            && self.n as u64 / self.g >= 2
    }

    pub fn magnitude(&self) -> f64 {
        self.value.0.hypot(self.value.1)
    }
}

/// Cyclic Weyl sum of `C^(n)` through the residue table
/// `n^(n-k) * congruence_solution_count(ell, r, n)`.
pub fn lemma2_cyclic_weyl(n: u32, ell: &WeylVector) -> Result<Lemma2Report> {
    check_dim(ell)?;
    if n == 0 {
        return Err(Error::invalid("order must be at least 1"));
    }
    let k = ell.dim();
    let extensions = u32::try_from(n as usize)
        .ok()
        .and_then(|n| n.checked_sub(k as u32))
        .ok_or_else(|| Error::precondition(format!("dimension {k} exceeds order {n}")))?;
    let per_word = checked_pow(n as u128, extensions)?;
    let multiplicities = (0..n as u64)
        .map(|r| {
            congruence_solution_count(ell, r, n as u64)?
                .checked_mul(per_word)
                .ok_or_else(|| Error::capacity("multiplicity exceeds 128 bits"))
        })
        .collect::<Result<Vec<_>>>()?;
    let value: Complex64 = multiplicities
        .iter()
        .enumerate()
        .map(|(r, &m)| unit_root(r as u128, n as u128) * m as f64)
        .sum();
    Ok(Lemma2Report {
        n,
        k,
        g: ell.gcd_with(n as u64),
        multiplicities,
        condition_holds: ell.vanishing_condition(n as u64),
        value: (value.re, value.im),
    })
}

fn cyclic_digits(n: u32, k: usize) -> Result<Vec<u32>> {
    if n > 7 {
        return Err(Error::capacity(format!("cyclic enumeration of C^({n}) exceeds the order-7 guard")));
    }
    let mut f = ford_sequence(n, n)?.into_digits();
    f.extend_from_within(..(k - 1).min(f.len()));
    while f.len() < (n as usize).pow(n) + k - 1 {
        // Only reached for n = 1, where the cycle is a single digit.
        f.push(0);
    }
    Ok(f)
}

/// Residue multiplicities counted directly over the cyclic windows of `F^(n,n)`.
pub fn residue_multiplicities_direct(n: u32, ell: &WeylVector) -> Result<Vec<u128>> {
    check_dim(ell)?;
    let k = ell.dim();
    let f = cyclic_digits(n, k)?;
    let m = n as i128;
    let mut counts = vec![0u128; n as usize];
    for w in f.windows(k) {
        let r = ell
            .entries()
            .iter()
            .zip(w)
            .map(|(&l, &d)| l as i128 * d as i128)
            .sum::<i128>()
            .rem_euclid(m);
        counts[r as usize] += 1;
    }
    Ok(counts)
}

/// Floating-point cyclic Weyl sum of `C^(n)`, summing every window's phase.
pub fn cyclic_weyl_direct(n: u32, ell: &WeylVector) -> Result<Complex64> {
    check_dim(ell)?;
    let k = ell.dim();
    let f = cyclic_digits(n, k)?;
    Ok(f.windows(k)
        .map(|w| {
            let dot: f64 = ell.entries().iter().zip(w).map(|(&l, &d)| l as f64 * d as f64 / n as f64).sum();
            let (s, c) = (TAU * dot).sin_cos();
            Complex64::new(c, s)
        })
        .sum())
}
