//! `ibn`: witnesses, traces and certificates for `R_k^m ~ R_k^n`, and
//! normal forms in the Leavitt ring.
//!
//! Exit status: 0 success, 1 failed verification, 2 no witness exists,
//! 64 usage error, 65 malformed input, 70 internal failure. Errors go to
//! standard error as `error[usage]: ...`, `error[input]: ...` or
//! `error[internal]: ...`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ibn_core::io::{
    deserialize_matrix, deserialize_witness, parse_expr, print_expr, serialize_matrix, serialize_witness,
};
use ibn_core::leavitt::leavitt_generators;
use ibn_core::{certify, normal_form, trace_structured, verify_witness, witness_pair, Certificate, Error};

#[derive(Parser)]
#[command(name = "ibn", version, about = "Witnesses and trace obstructions for R_k^m ~ R_k^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify X, Y with XY = I_m and YX = I_n, or explain why none exist
    Witness {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Write the witness here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a witness file
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Mod-k trace of a matrix file
    Trace {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// One scalar entry of a matrix file (1-based)
    Entry {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        i: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        j: u64,
    },
    /// Decide whether R_k^m and R_k^n are isomorphic
    Certify {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Normal form of an expression in L_p
    LeavittNf {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        p: u32,
        #[arg(long)]
        expr: String,
    },
    /// Image of an expression under L_p -> R_(p-1), as a matrix document
    LeavittEval {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        p: u32,
        #[arg(long)]
        expr: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Input(String),
    Internal(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (tag, msg, code) = match self {
            Failure::Usage(m) => ("usage", m, 64),
            Failure::Input(m) => ("input", m, 65),
            Failure::Internal(m) => ("internal", m, 70),
        };
        eprintln!("error[{tag}]: {}", msg.trim_end());
        ExitCode::from(code)
    }
}

/// Errors while reading user data.
fn input(e: Error) -> Failure {
    Failure::Input(e.to_string())
}

/// Errors while computing. Overflow and budget limits come from the size of
/// the input; anything else is a bug.
fn compute(e: Error) -> Failure {
    match e {
        Error::Overflow(_) | Error::BudgetExceeded(_) => Failure::Input(e.to_string()),
        _ => Failure::Internal(e.to_string()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn dims(m: u64, n: u64) -> Result<(usize, usize), Failure> {
    let conv = |v: u64| usize::try_from(v).map_err(|_| Failure::Usage(format!("dimension {v} is too large")));
    Ok((conv(m)?, conv(n)?))
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Witness { k, m, n, out } => {
            let (m, n) = dims(m, n)?;
            match witness_pair(k, m, n) {
                Ok(w) => {
                    emit(&serialize_witness(&w).map_err(compute)?, out.as_deref())?;
                    Ok(0)
                }
                Err(Error::Obstructed(o)) => {
                    println!("impossible: {o}");
                    Ok(2)
                }
                Err(e) => Err(compute(e)),
            }
        }
        Command::Verify { input: path } => {
            let w = deserialize_witness(&read(&path)?).map_err(input)?;
            let report = verify_witness(&w).map_err(compute)?;
            println!("{report}");
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::Trace { input: path } => {
            let a = deserialize_matrix(&read(&path)?).map_err(input)?;
            println!("{}", trace_structured(&a).map_err(compute)?);
            Ok(0)
        }
        Command::Entry { input: path, i, j } => {
            let a = deserialize_matrix(&read(&path)?).map_err(input)?;
            println!("{}", a.entry_at(i, j).map_err(compute)?);
            Ok(0)
        }
        Command::Certify { k, m, n } => {
            let (m, n) = dims(m, n)?;
            match certify(k, m, n).map_err(compute)? {
                Certificate::Isomorphic(_) => {
                    println!("isomorphic: witness verified");
                    Ok(0)
                }
                Certificate::Impossible(o) => {
                    println!("impossible: {o}");
                    Ok(2)
                }
            }
        }
        Command::LeavittNf { p, expr } => {
            let u = parse_expr(&expr, p).map_err(input)?;
            println!("{}", print_expr(&normal_form(&u).map_err(compute)?));
            Ok(0)
        }
        Command::LeavittEval { p, expr, out } => {
            let u = parse_expr(&expr, p).map_err(input)?;
            let f = leavitt_generators(p).map_err(compute)?;
            let image = f.eval(&u).map_err(compute)?;
            emit(&serialize_matrix(&image).map_err(compute)?, out.as_deref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let text = text.strip_prefix("error: ").unwrap_or(&text);
            return Failure::Usage(text.to_string()).report();
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => f.report(),
    }
}
