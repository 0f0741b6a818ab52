//! The `gridspread` command line.
//!
//! Machine output goes to stdout as `key=value` lines; diagnostics go to
//! stderr. Exit codes: 0 success, 1 invalid input, 2 internal invariant
//! violation, 3 instance too large for the oracle.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bounds::BoundsReport;
use crate::construct::{construct, construct_auto, Method};
use crate::error::Error;
use crate::gridio::{parse, render, serialize, serialize_pair, RenderFormat};
use crate::grid::{GridSpec, Norm};
use crate::metrics::{min_combined, Algorithm};
use crate::oracle::Oracle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_TOO_LARGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gridspread", version, about = "Spread symbols over two grids")]
struct Cli {
    /// Worker threads for verification and exhaustive search.
    #[arg(long, global = true, env = "GRIDSPREAD_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a pair with a modular-coloring construction.
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// auto, special, general or identity
        #[arg(long, default_value = "auto")]
        method: String,
        /// Write the document here; otherwise it goes to stdout and the plan to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the exact minimum combined distance of a stored pair.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: Norm,
        #[arg(long, default_value = "pruned")]
        algorithm: Algorithm,
    },
    /// Print the lower and upper bounds on the optimum.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value = "inf")]
        p: Norm,
    },
    /// Exhaustively solve a tiny instance.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        p: Norm,
        /// Count placements reaching --threshold instead of maximizing.
        #[arg(long, requires = "threshold")]
        count: bool,
        #[arg(long)]
        threshold: Option<f64>,
        /// Write the best pair here.
        #[arg(long, conflicts_with = "count")]
        out: Option<PathBuf>,
    },
    /// Draw a stored pair as text or SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "text")]
        format: RenderFormat,
        /// Color cells by residue class mod k.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Grid(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Grid(Error::InvariantViolation(_)) => EXIT_INTERNAL,
            CliError::Grid(Error::TooLarge { .. }) => EXIT_TOO_LARGE,
            _ => EXIT_INVALID,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn stdout_err(source: std::io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

/// Run one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INVALID
                }
            };
        }
    };

    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => {
                let (mut o, mut e) = (Vec::new(), Vec::new());
                let result = pool.install(|| execute(cli.command, &mut o, &mut e));
                let _ = out.write_all(&o);
                let _ = err.write_all(&e);
                result
            }
            Err(e) => Err(CliError::Usage(format!("cannot start {threads} threads: {e}"))),
        },
        None => execute(cli.command, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Construct { n, d, method, out: path } => {
            let spec = GridSpec::new(n, d)?;
            let (pair, plan) = match method.as_str() {
                "auto" => construct_auto(spec)?,
                other => construct(spec, other.parse::<Method>()?)?,
            };
            let text = serialize_pair(&pair);
            match path {
                Some(path) => {
                    write_file(&path, &text)?;
                    writeln!(out, "{plan}").map_err(stdout_err)?;
                }
                None => {
                    out.write_all(text.as_bytes()).map_err(stdout_err)?;
                    let _ = writeln!(err, "{plan}");
                }
            }
        }
        Command::Verify { input, p, algorithm } => {
            let doc = parse(&read(&input)?)?;
            let report = min_combined(&doc.pair, p, algorithm)?;
            let (s, t) = report.witness;
            writeln!(out, "min_combined={}", report.min_combined).map_err(stdout_err)?;
            writeln!(out, "witness={},{}", doc.token(s), doc.token(t)).map_err(stdout_err)?;
            writeln!(out, "pairs_examined={}", report.pairs_examined).map_err(stdout_err)?;
            writeln!(out, "algorithm={}", report.algorithm).map_err(stdout_err)?;
        }
        Command::Bounds { n, d, p } => {
            let report = BoundsReport::new(GridSpec::new(n, d)?, p);
            writeln!(out, "{report}").map_err(stdout_err)?;
        }
        Command::Oracle {
            n,
            d,
            p,
            count,
            threshold,
            out: path,
        } => {
            let oracle = Oracle::new(GridSpec::new(n, d)?, p)?;
            if count {
                let threshold = threshold.expect("clap enforces --threshold");
                let hits = oracle.count_solutions(threshold);
                writeln!(out, "threshold={threshold}").map_err(stdout_err)?;
                writeln!(out, "count={hits}").map_err(stdout_err)?;
            } else {
                let result = oracle.exact_optimum();
                writeln!(out, "optimum={}", result.optimum).map_err(stdout_err)?;
                writeln!(out, "arrangements={}", result.arrangements_enumerated).map_err(stdout_err)?;
                if let Some(path) = path {
                    write_file(&path, &serialize_pair(&result.best_pair))?;
                }
            }
        }
        Command::Render {
            input,
            format,
            k,
            out: path,
        } => {
            let doc = parse(&read(&input)?)?;
            let text = render(&doc, format, k)?;
            match path {
                Some(path) => write_file(&path, &text)?,
                None => out.write_all(text.as_bytes()).map_err(stdout_err)?,
            }
        }
    }
    Ok(())
}

/// Re-serialize a document in canonical form.
pub fn canonicalize(text: &str) -> Result<String, Error> {
    Ok(serialize(&parse(text)?))
}
