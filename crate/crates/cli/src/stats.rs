use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use cudseq::report::StatsReport;
use cudseq::source::Source;
use cudseq::stats::{
    box_count, convergence_series, par_box_count, par_perm_order_stats, par_weyl_sum,
    perm_order_stats, star_discrepancy_estimate, weyl_sum, UnitBox, WeylVector,
};
use cudseq::{cud, knuth, Error, RationalTerm};
use serde_json::json;

use crate::{output, CmdResult, Failure};

/// Orders covered by the default horizon: `D^(6,t)` for `L^(t)`, `B^(3)` for Knuth.
const DEFAULT_L_ORDER: u32 = 6;
const DEFAULT_KNUTH_ORDER: u32 = 3;

#[derive(Clone, Copy, ValueEnum)]
pub enum Op {
    Boxcount,
    Weyl,
    Perms,
    Discrepancy,
    Converge,
}

#[derive(Clone, Debug)]
pub enum SourceSpec {
    Generator(Source),
    File(PathBuf),
}

impl FromStr for SourceSpec {
    type Err = Error;

    fn from_str(s: &str) -> cudseq::Result<Self> {
        match s.strip_prefix("file:") {
            Some(path) => Ok(SourceSpec::File(path.into())),
            None => Ok(SourceSpec::Generator(s.parse()?)),
        }
    }
}

impl std::fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SourceSpec::Generator(s) => write!(f, "{s}"),
            SourceSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Args)]
pub struct StatsArgs {
    #[arg(value_enum)]
    op: Op,
    /// knuth, l:<growth> or file:<path> (rational text format).
    #[arg(long)]
    source: SourceSpec,
    /// Number of windows N.
    #[arg(long)]
    count: Option<u64>,
    #[arg(long = "box")]
    unit_box: Option<UnitBox>,
    #[arg(long, allow_hyphen_values = true)]
    ell: Option<WeylVector>,
    /// Window length for `perms` and `discrepancy`.
    #[arg(long)]
    k: Option<usize>,
    /// Grid resolution for `discrepancy`.
    #[arg(long, default_value_t = 16)]
    grid: u32,
    /// `auto` (segment ends) or a comma-separated list of N.
    #[arg(long, default_value = "auto")]
    checkpoints: String,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Terms of the source, either as a pull stream or materialized.
enum Terms {
    Stream(Box<dyn Iterator<Item = RationalTerm>>),
    Loaded(Vec<RationalTerm>),
}

impl Terms {
    fn open(spec: &SourceSpec) -> Result<Terms, Failure> {
        Ok(match spec {
            SourceSpec::Generator(s) => Terms::Stream(Box::new(s.stream()?)),
            SourceSpec::File(path) => {
                Terms::Loaded(cudseq::io::read_rational_text(BufReader::new(File::open(path)?))?)
            }
        })
    }

    /// Materializes at least `len` terms (or all of a finite source).
    fn prefix(self, len: u64) -> Vec<RationalTerm> {
        match self {
            Terms::Stream(s) => s.take(len as usize).collect(),
            Terms::Loaded(v) => v,
        }
    }

    fn iter(self) -> Box<dyn Iterator<Item = RationalTerm>> {
        match self {
            Terms::Stream(s) => s,
            Terms::Loaded(v) => Box::new(v.into_iter()),
        }
    }
}

/// Segment ends of a generator up to `limit`; orders beyond a growth table stop the list.
fn segment_ends(source: &Source, max_order: u32, limit: u64) -> Vec<u64> {
    let mut ends = Vec::new();
    for n in 1..=max_order {
        let end = match source {
            Source::Knuth => knuth::segment_boundaries(n).map(|b| b[b.len() - 1]),
            Source::L(t) => cud::segment_boundaries(t, n).map(|b| b[b.len() - 1]),
        };
        match end {
            Ok(end) if end <= limit as u128 => ends.push(end as u64),
            _ => break,
        }
    }
    ends
}

fn default_order(source: &Source) -> u32 {
    match source {
        Source::Knuth => DEFAULT_KNUTH_ORDER,
        Source::L(_) => DEFAULT_L_ORDER,
    }
}

/// N when `--count` is absent: every window of a file, or the default horizon of a generator.
fn default_count(spec: &SourceSpec, terms: &Terms, k: usize) -> Result<u64, Failure> {
    match (spec, terms) {
        (_, Terms::Loaded(v)) => Ok((v.len() + 1).saturating_sub(k) as u64),
        (SourceSpec::Generator(s), _) => segment_ends(s, default_order(s), u64::MAX)
            .last()
            .copied()
            .ok_or_else(|| Failure::Usage("no complete segment; pass --count".into())),
        (SourceSpec::File(_), Terms::Stream(_)) => unreachable!("files are loaded eagerly"),
    }
}

fn need_box(args: &StatsArgs) -> Result<UnitBox, Failure> {
    args.unit_box
        .clone()
        .ok_or_else(|| Failure::Usage("this operation requires --box".into()))
}

pub fn run(args: StatsArgs) -> CmdResult {
    if args.threads == 0 {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    let terms = Terms::open(&args.source)?;
    let source = args.source.to_string();
    let report = match args.op {
        Op::Boxcount => {
            let b = need_box(&args)?;
            let k = b.dim();
            let n = match args.count {
                Some(n) => n,
                None => default_count(&args.source, &terms, k)?,
            };
            let c = if args.threads > 1 {
                par_box_count(&terms.prefix(n + k as u64 - 1), n, &b, args.threads)?
            } else {
                box_count(terms.iter(), n, &b)?
            };
            StatsReport {
                op: "boxcount".into(),
                params: json!({ "source": source, "box": b.to_string() }),
                n,
                result: json!({ "nu": c.nu, "ratio": c.ratio(), "volume": b.volume() }),
                deviation: (c.ratio() - b.volume()).abs(),
            }
        }
        Op::Weyl => {
            let ell = args
                .ell
                .clone()
                .ok_or_else(|| Failure::Usage("this operation requires --ell".into()))?;
            let k = ell.dim();
            let n = match args.count {
                Some(n) => n,
                None => default_count(&args.source, &terms, k)?,
            };
            let s = if args.threads > 1 {
                par_weyl_sum(&terms.prefix(n + k as u64 - 1), n, &ell, args.threads)?
            } else {
                weyl_sum(terms.iter(), n, &ell)?
            };
            let normalized = s.norm() / n as f64;
            StatsReport {
                op: "weyl".into(),
                params: json!({ "source": source, "ell": ell.to_string() }),
                n,
                result: json!({ "re": s.re, "im": s.im, "abs_over_n": normalized }),
                deviation: normalized,
            }
        }
        Op::Perms => {
            let k = args.k.unwrap_or(3);
            let n = match args.count {
                Some(n) => n,
                None => default_count(&args.source, &terms, k)?,
            };
            let o = if args.threads > 1 {
                par_perm_order_stats(&terms.prefix(n + k as u64 - 1), n, k, args.threads)?
            } else {
                perm_order_stats(terms.iter(), n, k)?
            };
            StatsReport {
                op: "perms".into(),
                params: json!({ "source": source, "k": k }),
                n,
                result: json!({
                    "counts": o.counts,
                    "tie_count": o.tie_count,
                    "tie_fraction": o.tie_fraction(),
                    "frequencies": o.frequencies(),
                }),
                deviation: o.max_deviation(),
            }
        }
        Op::Discrepancy => {
            let k = args.k.unwrap_or(2);
            let n = match args.count {
                Some(n) => n,
                None => default_count(&args.source, &terms, k)?,
            };
            let d = star_discrepancy_estimate(terms.iter(), n, k, args.grid)?;
            StatsReport {
                op: "discrepancy".into(),
                params: json!({ "source": source, "k": k, "grid": args.grid }),
                n,
                result: json!({ "estimate": d }),
                deviation: d,
            }
        }
        Op::Converge => return converge(&args, terms),
    };
    let mut w = output(args.out.as_ref())?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(std::io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn converge(args: &StatsArgs, terms: Terms) -> CmdResult {
    let b = need_box(args)?;
    let checkpoints: Vec<u64> = if args.checkpoints == "auto" {
        let SourceSpec::Generator(s) = &args.source else {
            return Err(Failure::Usage("auto checkpoints need a generator source".into()));
        };
        let (order, limit) = match args.count {
            Some(n) => (u32::MAX, n),
            None => (default_order(s), u64::MAX),
        };
        segment_ends(s, order, limit)
    } else {
        args.checkpoints
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|e| Failure::Usage(format!("checkpoint {x:?}: {e}")))
            })
            .collect::<Result<_, _>>()?
    };
    let rows = convergence_series(terms.iter(), &checkpoints, &b)?;
    let mut w = output(args.out.as_ref())?;
    writeln!(w, "N,ratio,deviation")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.n, r.ratio, r.deviation)?;
    }
    w.flush()?;
    Ok(())
}
