//! Named term generators: `knuth` and `l:<growth>`.

use std::fmt;
use std::str::FromStr;

use crate::cud::{self, GrowthFn, LStream};
use crate::knuth::{self, KStream};
use crate::{Error, RationalTerm, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Knuth,
    L(GrowthFn),
}

/// Either generator behind one iterator type.
#[derive(Debug)]
pub enum SourceStream {
    Knuth(KStream),
    L(LStream),
}

impl Iterator for SourceStream {
    type Item = RationalTerm;

    #[inline]
    fn next(&mut self) -> Option<RationalTerm> {
        match self {
            SourceStream::Knuth(s) => s.next(),
            SourceStream::L(s) => s.next(),
        }
    }
}

impl SourceStream {
    /// Why the stream ended early, if it did.
    pub fn error(&self) -> Option<&Error> {
        match self {
            SourceStream::Knuth(s) => s.error(),
            SourceStream::L(s) => s.error(),
        }
    }
}

impl Source {
    pub fn stream(&self) -> Result<SourceStream> {
        Ok(match self {
            Source::Knuth => SourceStream::Knuth(knuth::k_stream()),
            Source::L(t) => SourceStream::L(cud::l_stream(t.clone())?),
        })
    }

    /// Segment ends (`B^(n)` or `D^(n,t)`) up to and including `limit`.
    pub fn boundaries(&self, limit: u128) -> Result<Vec<u128>> {
        let mut out = Vec::new();
        for n in 1u32.. {
            let end = match self {
                Source::Knuth => *knuth::segment_boundaries(n)?.last().expect("n >= 1"),
                Source::L(t) => *cud::segment_boundaries(t, n)?.last().expect("n >= 1"),
            };
            if end > limit {
                break;
            }
            out.push(end);
        }
        Ok(out)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Knuth => f.write_str("knuth"),
            Source::L(t) => write!(f, "l:{t}"),
        }
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "knuth" => Ok(Source::Knuth),
            other => match other.strip_prefix("l:") {
                Some(t) => Ok(Source::L(t.parse()?)),
                None => Err(Error::Parse(format!(
                    "unknown source {other:?} (expected knuth or l:<growth>)"
                ))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_stream() {
        let s: Source = "l:sq".parse().unwrap();
        assert_eq!(s, Source::L(GrowthFn::Square));
        assert_eq!(s.to_string(), "l:sq");
        assert_eq!("knuth".parse::<Source>().unwrap(), Source::Knuth);
        assert!("kn".parse::<Source>().is_err());
        assert!("l:cube".parse::<Source>().is_err());
        assert_eq!(s.stream().unwrap().take(17).count(), 17);
    }

    #[test]
    fn boundaries_up_to_limit() {
        let sq = Source::L(GrowthFn::Square);
        assert_eq!(sq.boundaries(1_762_097).unwrap(), [1, 17, 260, 4356, 82_481, 1_762_097]);
        assert_eq!(Source::Knuth.boundaries(100_000).unwrap(), [8, 520, 98_824]);
        assert!(sq.boundaries(0).unwrap().is_empty());
    }
}
