mod stats;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cudseq::cud::{self, GrowthFn};
use cudseq::debruijn::ford_stream;
use cudseq::{io as formats, knuth, Error};

#[derive(Parser)]
#[command(name = "cudseq", version, about = "Completely uniformly distributed sequences from de Bruijn sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the lexicographically least de Bruijn sequence F^(b,k).
    Ford {
        #[arg(long)]
        base: u32,
        #[arg(long)]
        order: u32,
        #[arg(long, value_enum, default_value_t = DigitFormat::Text)]
        format: DigitFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the first terms of Knuth's sequence or of L^(t).
    Gen {
        #[arg(long, value_enum)]
        variant: Variant,
        /// Growth function for `l`: id, sq or table:1=1,2=4,...
        #[arg(long)]
        t: Option<GrowthFn>,
        #[arg(long)]
        count: u64,
        #[arg(long, value_enum, default_value_t = TermFormat::Rational)]
        format: TermFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose a 1-based position of L^(t) as (r, q, p).
    Locate {
        #[arg(long)]
        t: GrowthFn,
        position: u128,
    },
    /// Print the term of L^(t) at a 1-based position.
    Term {
        #[arg(long)]
        t: GrowthFn,
        position: u128,
    },
    /// Check an exact property and print a JSON report.
    Verify(verify::VerifyArgs),
    /// Measure a term stream and print a JSON report (CSV for `converge`).
    Stats(stats::StatsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DigitFormat {
    Text,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum TermFormat {
    Rational,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Knuth,
    L,
}

/// Why a command did not exit 0.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
    /// The report was written but an asserted property does not hold.
    Violation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Violation => 1,
            Failure::Usage(_) => 2,
            Failure::Core(e) => match e {
                Error::ShortStream { .. } => 1,
                Error::Capacity(_) => 3,
                _ => 2,
            },
        }
    }
}

pub type CmdResult = std::result::Result<(), Failure>;

pub fn output(path: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Violation => eprintln!("property violated; see report"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Ford { base, order, format, out } => {
            let stream = ford_stream(base, order)?;
            let len = stream.total_len();
            let mut w = output(out.as_ref())?;
            match format {
                DigitFormat::Text => formats::write_digits_text(&mut w, base, order, len, stream)?,
                DigitFormat::Binary => {
                    let count = u64::try_from(len)
                        .map_err(|_| Error::Capacity(format!("{len} digits exceed the binary count field")))?;
                    formats::write_digits_binary(&mut w, base, count, stream)?
                }
            }
            w.flush()?;
        }
        Command::Gen { variant, t, count, format, out } => {
            let mut w = output(out.as_ref())?;
            match (variant, t) {
                (Variant::Knuth, Some(_)) => {
                    return Err(Failure::Usage("--t is not accepted with --variant knuth".into()))
                }
                (Variant::L, None) => return Err(Failure::Usage("--variant l requires --t".into())),
                (Variant::Knuth, None) => {
                    let mut s = knuth::k_stream();
                    write_terms(&mut w, format, s.by_ref().take(count as usize))?;
                    if let Some(e) = s.error() {
                        return Err(Error::Capacity(e.to_string()).into());
                    }
                }
                (Variant::L, Some(t)) => {
                    let mut s = cud::l_stream(t)?;
                    write_terms(&mut w, format, s.by_ref().take(count as usize))?;
                    if let Some(e) = s.error() {
                        return Err(Error::Capacity(e.to_string()).into());
                    }
                }
            }
            w.flush()?;
        }
        Command::Locate { t, position } => println!("{}", cud::locate(position, &t)?),
        Command::Term { t, position } => println!("{}", cud::term_at(position, &t)?),
        Command::Verify(args) => verify::run(args)?,
        Command::Stats(args) => stats::run(args)?,
    }
    Ok(())
}

fn write_terms(
    w: &mut dyn Write,
    format: TermFormat,
    terms: impl Iterator<Item = cudseq::RationalTerm>,
) -> cudseq::Result<()> {
    match format {
        TermFormat::Rational => formats::write_rational_text(w, terms),
        TermFormat::Csv => formats::write_float_csv(w, terms),
    }
}
