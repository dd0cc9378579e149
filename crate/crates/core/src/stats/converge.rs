use serde::Serialize;

use super::boxes::{Membership, UnitBox};
use super::for_each_window;
use crate::{Error, RationalTerm, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub nu: u64,
    /// `nu / N`
    pub ratio: f64,
    /// `|nu / N - |I||`
    pub deviation: f64,
}

/// Box-count ratios at each checkpoint, from a single pass over `terms`.
pub fn convergence_series<I>(terms: I, checkpoints: &[u64], b: &UnitBox) -> Result<Vec<ConvergenceRow>>
where
    I: IntoIterator<Item = RationalTerm>,
{
    let Some(&last) = checkpoints.last() else {
        return Err(Error::invalid("at least one checkpoint is required"));
    };
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("checkpoints must be positive and strictly ascending"));
    }
    let volume = b.volume();
    let mut member = Membership::new(b);
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().copied().peekable();
    let mut seen = 0u64;
    let mut nu = 0u64;
    for_each_window(terms, b.dim(), last, |w| {
        seen += 1;
        nu += member.contains(w) as u64;
        if next.peek() == Some(&seen) {
            next.next();
            let ratio = nu as f64 / seen as f64;
            rows.push(ConvergenceRow {
                n: seen,
                nu,
                ratio,
                deviation: (ratio - volume).abs(),
            });
        }
    })?;
    Ok(rows)
}
