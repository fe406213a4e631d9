//! `mills`: generate the polynomial families, evaluate and certify bounds on
//! the Mills ratio, and emit reports.
//!
//! Exit status: 0 when everything checked passes, 1 when a certificate or
//! identity fails, 2 on usage or domain errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mills_core::real::{DEFAULT_PRECISION, MIN_PRECISION};
use mills_core::MillsError;

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "mills", version, about = "Exact bounds and certificates for the Mills ratio")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Working precision in bits.
    #[arg(long, global = true, env = "MILLS_PRECISION_BITS", default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,

    /// Significant digits in decimal output.
    #[arg(long, global = true, default_value_t = 20)]
    pub digits: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "Q", alias = "q")]
    Q,
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "Delta", alias = "delta")]
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhiMethod {
    Series,
    Quadrature,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print P_n, Q_n, A_n, B_n, C_n or the discriminant.
    Poly {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        n: usize,
    },
    /// Evaluate one inequality at one point and certify it.
    Bounds {
        /// eq15, eq16, eq17, eq18, eq19, or i<n> for a second-order bound.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Run the identity suite, grid certification and oracle agreement.
    Verify {
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// start:stop:step as exact rationals.
        #[arg(long, default_value = "1/10:10:1/10", allow_hyphen_values = true)]
        grid: String,
        /// Damage P_k in the polynomial table (negative control).
        #[arg(long, hide = true)]
        corrupt_order: Option<usize>,
    },
    /// Root of A_{2m+1} in ]0, 1] with an exact sign bracket.
    Beta {
        #[arg(long)]
        m: usize,
        /// Largest accepted bracket width (default 2^-40).
        #[arg(long)]
        tolerance: Option<String>,
    },
    /// Continued-fraction coefficients, convergents and ladder values.
    Cf {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// High-precision value of phi(x) with an error bound.
    Phi {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum, default_value_t = PhiMethod::Both)]
        method: PhiMethod,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(MillsError),
    Io(std::io::Error),
}

impl From<MillsError> for CliError {
    fn from(e: MillsError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// Whether every check in the output passed.
pub type Verdict = bool;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.precision < MIN_PRECISION {
        eprintln!("error: precision must be at least {MIN_PRECISION} bits");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok((out, passed)) => {
            if let Err(e) = output::emit(&out.render(cli.global.format), cli.global.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                CliError::Core(MillsError::IdentityViolation { .. }) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
