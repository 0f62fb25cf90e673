use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use quasimod_cli::document::SeriesDocument;
use quasimod_cli::names;
use quasimod_cli::ops::{self, Op};
use quasimod_cli::suites::{self, Suite};

/// Exact q-expansions, Hecke operators and quasimodular decompositions for
/// K3 descendent potentials.
#[derive(Parser)]
#[command(name = "quasimod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a builtin or catalogue series.
    Series {
        /// C2, C4, C6, Delta, X2, X4, InvDelta, F_<g>_<m>[_<classes>] or FE_<g>.
        name: String,
        #[arg(long, default_value_t = 50)]
        order: i64,
        #[arg(long)]
        pretty: bool,
    },
    /// Apply an operator to a series document.
    Apply {
        #[command(subcommand)]
        op: ApplyOp,
        /// Read the document from a file instead of standard input.
        #[arg(long, global = true)]
        input: Option<PathBuf>,
        /// Truncate the result at this order.
        #[arg(long, global = true, default_value_t = 50)]
        order: i64,
        #[arg(long, global = true)]
        pretty: bool,
    },
    /// Run a verification suite; exits nonzero if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 50)]
        order: i64,
    },
}

#[derive(Subcommand)]
enum ApplyOp {
    /// q d/dq.
    Dq,
    /// q -> q^d.
    B {
        #[arg(short)]
        d: u32,
    },
    /// Keep the coefficients at multiples of d.
    U {
        #[arg(short)]
        d: u32,
    },
    /// Classical Hecke operator T_m in weight k.
    Hecke {
        #[arg(short)]
        m: u32,
        /// Defaults to the document's weight.
        #[arg(short, allow_negative_numbers = true)]
        k: Option<i64>,
    },
    /// T_{m,l}: the Hecke formula with weight l.
    Twrong {
        #[arg(short)]
        m: u32,
        #[arg(short, allow_negative_numbers = true)]
        l: i64,
    },
    /// Multiple cover formula from divisibility one to m.
    Mcf {
        #[arg(short)]
        g: u32,
        #[arg(short)]
        m: u32,
        /// Primary insertions, e.g. `pp` for τ0(p)^2.
        #[arg(short, long, default_value = "")]
        insertions: String,
    },
    /// Formal derivative in C2 of the document's decomposition.
    Ddc2,
}

impl ApplyOp {
    fn to_op(&self) -> Result<Op> {
        Ok(match self {
            ApplyOp::Dq => Op::Dq,
            ApplyOp::B { d } => Op::B { d: *d },
            ApplyOp::U { d } => Op::U { d: *d },
            ApplyOp::Hecke { m, k } => Op::Hecke { m: *m, k: *k },
            ApplyOp::Twrong { m, l } => Op::TWrong { m: *m, ell: *l },
            ApplyOp::Mcf { g, m, insertions } => Op::Mcf {
                g: *g,
                m: *m,
                insertions: names::parse_insertions(insertions)?,
            },
            ApplyOp::Ddc2 => Op::Ddc2,
        })
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading standard input")?;
            Ok(s)
        }
    }
}

/// One line to standard output; a closed pipe is not an error.
fn emit(line: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{line}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Series { name, order, pretty } => {
            let (f, meta) = names::resolve(&name, order)?;
            emit(&SeriesDocument::from_series(&f, meta).emit(pretty))?;
        }
        Command::Apply {
            op,
            input,
            order,
            pretty,
        } => {
            let doc = SeriesDocument::parse(&read_input(input.as_ref())?)?;
            let (f, meta) = ops::apply(&op.to_op()?, &doc.to_series()?, doc.metadata)?;
            let f = f.truncate(order)?;
            emit(&SeriesDocument::from_series(&f, meta).emit(pretty))?;
        }
        Command::Verify { suite, order } => {
            let checks = suites::run(suite, order)?;
            for c in &checks {
                emit(&c.to_string())?;
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            emit(&format!("{} checks, {failed} failed", checks.len()))?;
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
