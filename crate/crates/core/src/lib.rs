//! Completely uniformly distributed (CUD) sequences built from Ford sequences.
//!
//! The crate generates the lexicographically least de Bruijn sequences with the
//! Fredricksen–Kessler–Maiorana algorithm ([`debruijn`]), assembles Knuth's
//! power-of-two construction ([`knuth`]) and the linearly growing construction
//! `L^(t)` ([`cud`]) as pull-based streams of exact rationals, and provides a
//! verification engine ([`stats`]) for window counts, exponential sums and
//! order statistics.
//!
//! ```
//! use cudseq::cud::{GrowthFn, LStream};
//!
//! let terms: Vec<String> = LStream::new(GrowthFn::Identity)
//!     .unwrap()
//!     .take(5)
//!     .map(|t| t.to_string())
//!     .collect();
//! assert_eq!(terms, ["0/1", "0/2", "0/2", "1/2", "1/2"]);
//! ```

pub mod cud;
pub mod debruijn;
mod error;
pub mod io;
pub mod knuth;
pub mod rational;
pub mod report;
pub mod source;
pub mod stats;

pub use error::{Error, Result};
pub use rational::RationalTerm;
