use super::{for_each_window, require_windows};
use crate::{Error, RationalTerm, Result};

const MAX_CELLS: u128 = 1 << 22;

/// Grid lower bound on the star discrepancy of the first `n` `k`-windows:
/// the largest `|nu/N - volume|` over the anchored boxes
/// `[0, j_1/m) x .. x [0, j_k/m)` with `1 <= j_d <= m`.
pub fn star_discrepancy_estimate<I>(terms: I, n: u64, k: usize, m: u32) -> Result<f64>
where
    I: IntoIterator<Item = RationalTerm>,
{
    require_windows(n)?;
    if m < 2 {
        return Err(Error::invalid("grid resolution must be at least 2"));
    }
    if k == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let cells = (m as u128)
        .checked_pow(k as u32)
        .filter(|&c| c <= MAX_CELLS)
        .ok_or_else(|| Error::capacity(format!("{m}^{k} grid cells exceed the {MAX_CELLS} guard")))?
        as usize;
    let m_usize = m as usize;

    // hist[cell] counts windows whose point lies in the grid cell; cell
    // coordinate d is floor(m x_d), stored with dimension 0 most significant.
    let mut hist = vec![0u64; cells];
    for_each_window(terms, k, n, |w| {
        let cell = w.iter().fold(0usize, |acc, t| {
            let c = (t.num() as u128 * m as u128 / t.den() as u128) as usize;
            acc * m_usize + c
        });
        hist[cell] += 1;
    })?;

    // In-place prefix sums along each axis turn cell counts into counts of
    // the anchored box whose far corner is that cell's upper corner.
    let mut stride = 1;
    for _ in 0..k {
        for idx in 0..cells {
            if (idx / stride) % m_usize != 0 {
                hist[idx] += hist[idx - stride];
            }
        }
        stride *= m_usize;
    }

    // |count/N - prod(j_d)/m^k| = |count m^k - N prod(j_d)| / (N m^k)
    let scale = n as u128 * cells as u128;
    let mut worst: u128 = 0;
    for (idx, &count) in hist.iter().enumerate() {
        let mut rest = idx;
        let mut volume_cells: u128 = 1;
        for _ in 0..k {
            volume_cells *= (rest % m_usize + 1) as u128;
            rest /= m_usize;
        }
        let lhs = count as u128 * cells as u128;
        let rhs = n as u128 * volume_cells;
        worst = worst.max(lhs.abs_diff(rhs));
    }
    Ok(worst as f64 / scale as f64)
}
