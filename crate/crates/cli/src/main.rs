use std::io::{self, Write};
use std::process::ExitCode;

/// `println!` that exits quietly when the reader of stdout goes away.
macro_rules! out {
    () => {
        $crate::emit(format_args!(""))
    };
    ($($arg:tt)*) => {
        $crate::emit(format_args!($($arg)*))
    };
}

mod commands;
mod prose;

use abel_core::celine::DEFAULT_SEED;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Recurrences, certificates and bijections for Abel-type sums.
#[derive(Parser, Debug)]
#[command(name = "abel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find a functional shift recurrence for the sum over k.
    FindRec(SummandArgs),
    /// Find mixed differential recurrences in r and s.
    FindDiffrec {
        #[command(flatten)]
        summand: SummandArgs,
        /// Only this parameter (r or s).
        #[arg(long)]
        var: Option<DiffVar>,
    },
    /// Solved recurrence with the evidence behind it, as prose.
    Report {
        #[command(flatten)]
        summand: SummandArgs,
        /// Report the differential recurrence in this parameter instead.
        #[arg(long)]
        var: Option<DiffVar>,
    },
    /// Closed forms and exhaustive counts for a counting identity.
    VerifyIdentity {
        #[arg(long, value_parser = ["cauchy2", "kalai1"])]
        which: String,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        p_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the set-pair bijection for one explicit function.
    Bijection {
        /// Images f(1), f(2), ... separated by commas; entries beyond the
        /// first n are the tail [n+1, n+p].
        #[arg(long, value_delimiter = ',', required = true)]
        f: Vec<usize>,
        /// Size of the codomain; defaults to the number of images.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Certificate, closed form and numeric checks for Abel's identity.
    CertifyEm {
        #[arg(long, default_value_t = 8)]
        n_max: i64,
        /// Random points for the identity check.
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Random points for the initial conditions.
        #[arg(long, default_value_t = 5)]
        ic_points: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Run everything on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug, Clone)]
struct SummandArgs {
    /// Hypergeometric part, e.g. "binomial(n,k)*x^k".
    #[arg(long)]
    summand: String,
    /// "abel" or an explicit product such as "(r+k)^(k+1)*(s+k)^(n-k)".
    #[arg(long, default_value = "abel")]
    kernel: String,
    /// Pin x to a rational value.
    #[arg(long)]
    x: Option<String>,
    /// Pin the offset p.
    #[arg(long, allow_negative_numbers = true)]
    p: Option<i64>,
    /// Pin the offset q.
    #[arg(long, allow_negative_numbers = true)]
    q: Option<i64>,
    #[arg(long, default_value_t = 2)]
    max_order: u32,
    #[arg(long, value_enum, default_value_t = OrientationArg::Abel)]
    orientation: OrientationArg,
    /// Random rational points used for validation.
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Latex,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum OrientationArg {
    Abel,
    Literal,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum DiffVar {
    R,
    S,
}

/// Exit status by failure class.
#[derive(Debug)]
enum Failure {
    NotFound(String),
    Usage(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::NotFound(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Check(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::NotFound(m) | Failure::Usage(m) | Failure::Check(m) => m,
        }
    }
}

fn emit(line: std::fmt::Arguments<'_>) {
    if let Err(e) = writeln!(io::stdout().lock(), "{line}") {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::FindRec(a) => commands::find_rec(a),
        Command::FindDiffrec { summand, var } => commands::find_diffrec(summand, *var),
        Command::Report { summand, var } => commands::report(summand, *var),
        Command::VerifyIdentity { which, n_max, p_max, out } => commands::verify_identity(which, *n_max, *p_max, out),
        Command::Bijection { f, n, out } => commands::bijection(f, *n, out),
        Command::CertifyEm { n_max, points, ic_points, seed, out } => {
            commands::certify_em(*n_max, *points, *ic_points, *seed, out)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
