//! `smtrace`: traces of singular moduli from the command line.

mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use smtrace::traces::TraceConfig;
use smtrace::Error;

#[derive(Parser, Debug)]
#[command(name = "smtrace", version, about = "Twisted traces of singular moduli on Gamma_0(N)")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Working bits beyond the magnitude of the largest term.
    #[arg(long, global = true, default_value_t = 128)]
    pub bits: u32,
    #[arg(long = "bits-cap", global = true, default_value_t = 4096)]
    pub bits_cap: u32,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 20240229)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Args, Debug, Clone)]
pub struct FuncArgs {
    /// `builtin:J`, `builtin:j`, `builtin:hauptmodul-N`, inline JSON, or `@file.json`.
    #[arg(long = "f", default_value = "builtin:J")]
    pub f: String,
    /// Defaults to the function's own level.
    #[arg(long)]
    pub level: Option<u64>,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub delta: i64,
    /// Square root of `delta` mod `4N`; the smallest one by default.
    #[arg(long)]
    pub r: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gamma_0(N)-classes of forms of discriminant -D.
    Forms {
        #[arg(long)]
        disc: u64,
        #[arg(long, default_value_t = 1)]
        level: u64,
    },
    /// Cusp representatives with widths and lattice constants.
    Cusps {
        #[arg(long, default_value_t = 1)]
        level: u64,
    },
    /// Traces at one index or a range (cached).
    Trace {
        #[command(flatten)]
        func: FuncArgs,
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["from", "to"])]
        index: Option<i64>,
        #[arg(long, allow_negative_numbers = true, requires = "to")]
        from: Option<i64>,
        #[arg(long, allow_negative_numbers = true, requires = "from")]
        to: Option<i64>,
    },
    /// The generating series up to q^max.
    Series {
        #[command(flatten)]
        func: FuncArgs,
        #[arg(long)]
        max: u64,
    },
    /// Keep the coefficients with (n/t) = -1 of a series, then optionally apply U_r.
    Sieve {
        #[arg(long)]
        t: u64,
        /// A series JSON file, or `-` for stdin; a `series` command output is accepted too.
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        r: Option<u64>,
    },
    /// Check Omega t(r^3 p^m n) = 0 mod p^nu over a window of primes r.
    CongruenceScan {
        #[command(flatten)]
        func: FuncArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        nu: u32,
        #[arg(long)]
        t: u64,
        #[arg(long = "m-exp", default_value_t = 1)]
        m_exp: u32,
        /// Use the first this-many primes r = -1 mod 4 t^2 N p^nu.
        #[arg(long = "r-count", default_value_t = 5)]
        r_count: usize,
        /// Explicit candidates instead of the progression.
        #[arg(long = "r-list", value_delimiter = ',')]
        r_list: Vec<u64>,
        #[arg(long = "n-max")]
        n_max: u64,
    },
    /// Built-in consistency checks.
    Verify {
        #[arg(long, value_enum)]
        case: verify::Case,
        #[arg(long, default_value_t = 50)]
        max: u64,
        #[arg(long = "max-m", default_value_t = 12)]
        max_m: u64,
        #[arg(long, default_value_t = 30)]
        samples: usize,
    },
}

pub enum Failure {
    Input(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionExhausted { .. } | Error::RecognitionFailed { .. } => 3,
        _ => 2,
    }
}

impl Global {
    pub fn trace_config(&self) -> Result<TraceConfig, Error> {
        TraceConfig::new(self.bits, self.bits_cap)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
