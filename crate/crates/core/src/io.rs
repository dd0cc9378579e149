//! File formats.
//!
//! * Digit text: a header line `# base=<b> order=<k> len=<b^k>` followed by one
//!   decimal digit per line.
//! * Digit binary: magic `CUDS`, version byte `0x01`, base and count as u64
//!   little-endian, then each digit as u32 little-endian.
//! * Rational text: one `num/den` per line.
//! * Float CSV: one binary64 value per line (the term rounded to nearest).

use std::io::{BufRead, Read, Write};

use crate::debruijn::DigitSeq;
use crate::{Error, RationalTerm, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"CUDS";
pub const BINARY_VERSION: u8 = 1;

pub fn write_digits_text<W: Write>(
    mut out: W,
    base: u32,
    order: u32,
    len: u128,
    digits: impl IntoIterator<Item = u32>,
) -> Result<()> {
    writeln!(out, "# base={base} order={order} len={len}")?;
    for d in digits {
        writeln!(out, "{d}")?;
    }
    Ok(())
}

/// Parses the digit text format, returning the sequence and its order.
pub fn read_digits_text<R: BufRead>(input: R) -> Result<(DigitSeq, u32)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header line".into()))??;
    let mut base = None;
    let mut order = None;
    let mut len = None;
    let fields = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse(format!("header {header:?} does not start with '#'")))?;
    for field in fields.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("header field {field:?} is not key=value")))?;
        let parsed = || {
            value
                .parse::<u128>()
                .map_err(|e| Error::Parse(format!("header field {field:?}: {e}")))
        };
        match key {
            "base" => base = Some(parsed()?),
            "order" => order = Some(parsed()?),
            "len" => len = Some(parsed()?),
            _ => return Err(Error::Parse(format!("unknown header field {key:?}"))),
        }
    }
    let (Some(base), Some(order), Some(len)) = (base, order, len) else {
        return Err(Error::Parse("header needs base, order and len".into()));
    };
    let base = u32::try_from(base).map_err(|_| Error::Parse("base exceeds 32 bits".into()))?;
    let order = u32::try_from(order).map_err(|_| Error::Parse("order exceeds 32 bits".into()))?;
    let mut digits = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        digits.push(
            line.parse::<u32>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?,
        );
    }
    if digits.len() as u128 != len {
        return Err(Error::Parse(format!(
            "header declares {len} digits, found {}",
            digits.len()
        )));
    }
    Ok((DigitSeq::new(base, digits).map_err(|e| Error::Parse(e.to_string()))?, order))
}

pub fn write_digits_binary<W: Write>(
    mut out: W,
    base: u32,
    count: u64,
    digits: impl IntoIterator<Item = u32>,
) -> Result<()> {
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&[BINARY_VERSION])?;
    out.write_all(&(base as u64).to_le_bytes())?;
    out.write_all(&count.to_le_bytes())?;
    let mut written = 0u64;
    for d in digits {
        out.write_all(&d.to_le_bytes())?;
        written += 1;
    }
    if written != count {
        return Err(Error::invalid(format!(
            "declared {count} digits but wrote {written}"
        )));
    }
    Ok(())
}

pub fn read_digits_binary<R: Read>(mut input: R) -> Result<DigitSeq> {
    let mut head = [0u8; 21];
    input
        .read_exact(&mut head)
        .map_err(|_| Error::Parse("binary header truncated".into()))?;
    if &head[..4] != BINARY_MAGIC {
        return Err(Error::Parse("bad magic (expected CUDS)".into()));
    }
    if head[4] != BINARY_VERSION {
        return Err(Error::Parse(format!("unsupported version {}", head[4])));
    }
    let base = u64::from_le_bytes(head[5..13].try_into().expect("8 bytes"));
    let count = u64::from_le_bytes(head[13..21].try_into().expect("8 bytes"));
    let base = u32::try_from(base).map_err(|_| Error::Parse("base exceeds 32 bits".into()))?;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() as u128 != count as u128 * 4 {
        return Err(Error::Parse(format!(
            "expected {count} digits ({} bytes), found {} bytes",
            count as u128 * 4,
            body.len()
        )));
    }
    let digits = body
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    DigitSeq::new(base, digits).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_rational_text<W: Write>(mut out: W, terms: impl IntoIterator<Item = RationalTerm>) -> Result<()> {
    for t in terms {
        writeln!(out, "{}/{}", t.num(), t.den())?;
    }
    Ok(())
}

pub fn write_float_csv<W: Write>(mut out: W, terms: impl IntoIterator<Item = RationalTerm>) -> Result<()> {
    for t in terms {
        writeln!(out, "{}", t.to_f64())?;
    }
    Ok(())
}

/// Parses the rational text format; blank lines are skipped.
pub fn read_rational_text<R: BufRead>(input: R) -> Result<Vec<RationalTerm>> {
    let mut terms = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let term = line
            .parse::<RationalTerm>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        terms.push(term);
    }
    Ok(terms)
}
