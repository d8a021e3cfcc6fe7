//! Argument grammar. Every subcommand resolves to a single report document;
//! global flags pick the output format and destination.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "polymoment", version, about = "Moment experiments for Dirichlet characters over F_q[T]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Directory for cached prime tables (POLYMOMENT_CACHE overrides).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads for parallel sections.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Dft,
    Naive,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SquaresArg {
    /// Run the primes-only and primes-plus-squares forms.
    Both,
    With,
    Without,
}

/// Modulus selection shared by the character-level subcommands: either an
/// explicit coefficient vector or a degree whose lowest-code prime is taken.
#[derive(Args, Debug)]
pub struct ModulusArgs {
    /// Modulus coefficients, base-q digits from the constant term up.
    #[arg(long, value_name = "COEFFS", conflicts_with = "degree")]
    pub modulus: Option<String>,

    /// Pick the lowest-code prime of this degree instead.
    #[arg(long)]
    pub degree: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count primes by degree and report partial-sum diagnostics.
    Primes {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        max_deg: u32,
    },

    /// Tabulate central L-values for all characters mod Q.
    Lvalues {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        modulus: ModulusArgs,
        #[arg(long, value_enum, default_value_t = RouteArg::Dft)]
        route: RouteArg,
        /// Also locate the zeros of each L-function.
        #[arg(long)]
        zeros: bool,
    },

    /// Moments of |L(1/2, chi)| over a range of modulus degrees.
    Moments {
        #[arg(long)]
        q: u64,
        /// Inclusive degree range, "lo:hi".
        #[arg(long, value_name = "LO:HI")]
        deg_range: String,
        /// Comma-separated moment orders.
        #[arg(long, default_value = "1")]
        k: String,
        #[arg(long, value_enum, default_value_t = RouteArg::Dft)]
        route: RouteArg,
    },

    /// Histogram of log |L(1/2, chi)| against the Gaussian reference.
    Tail {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        modulus: ModulusArgs,
        /// Left edge of the value grid.
        #[arg(long, default_value_t = 0.0)]
        grid_min: f64,
        /// Right edge of the value grid (defaults past the hard cutoff).
        #[arg(long)]
        grid_max: Option<f64>,
        #[arg(long, default_value_t = 24)]
        grid_steps: u32,
    },

    /// Pointwise proxy bounds for log |L(1/2, chi)| and the fitted constant.
    Bounds {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        modulus: ModulusArgs,
        /// Cutoff exponents e with x = |Q|^e, as fractions.
        #[arg(long, default_value = "1/3,1/2,1")]
        x_exponents: String,
        #[arg(long, value_enum, default_value_t = SquaresArg::Both)]
        squares: SquaresArg,
        /// Include the per-character deficit table.
        #[arg(long)]
        per_char: bool,
    },

    /// Mean-value identity for prime-supported twisted sums.
    Meanvalue {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        modulus: ModulusArgs,
        /// Moment power m.
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Support cap: primes of degree at most y.
        #[arg(long, default_value_t = 1)]
        y: u32,
    },

    /// Multi-scale block schedule, character partition, and majorant checks.
    Harper {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        modulus: ModulusArgs,
        /// Tail-cutoff exponent: windows stop once alpha_i <= 10^-T.
        #[arg(long = "T", default_value_t = 3)]
        t_param: u32,
        /// Effective lambda driving the alpha ladder.
        #[arg(long)]
        lambda: f64,
        /// Override the per-q window degree cap.
        #[arg(long)]
        degree_cap: Option<usize>,
        /// Moment orders for the majorant check.
        #[arg(long, default_value = "0.5,1,2")]
        k: String,
    },

    /// Mollifier lengths, coefficients, twisted moments, and Hoelder chains.
    Mollify {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        modulus: ModulusArgs,
        #[arg(long)]
        k: f64,
        /// Length-scale multiplier for the l_j recursion.
        #[arg(long = "N", default_value_t = 2)]
        n_param: u32,
        /// Desk-scale threshold: keep l_j above 10^M.
        #[arg(long = "M", default_value_t = 1)]
        m_param: u32,
        /// Override lambda = log log |Q| in the first length.
        #[arg(long)]
        lambda: Option<f64>,
        /// Cap on enumerated coefficient terms.
        #[arg(long, default_value_t = polymoment_core::mollifier::DEFAULT_TERM_BUDGET)]
        term_budget: u64,
    },

    /// Run every acceptance criterion and report pass/fail per line.
    VerifyAll,
}

pub fn parse_f64_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: f64 = part
            .parse()
            .map_err(|_| CliError::Config(format!("bad {what} entry {part:?}")))?;
        if !v.is_finite() {
            return Err(CliError::Config(format!("{what} entry {part:?} is not finite")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("empty {what} list")));
    }
    Ok(out)
}

pub fn parse_u64_list(text: &str, what: &str) -> CliResult<Vec<u64>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: u64 = part
            .parse()
            .map_err(|_| CliError::Config(format!("bad {what} entry {part:?}")))?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("empty {what} list")));
    }
    Ok(out)
}

/// "lo:hi" inclusive, lo <= hi.
pub fn parse_degree_range(text: &str) -> CliResult<(u32, u32)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("degree range {text:?} is not of the form lo:hi")))?;
    let lo: u32 = lo
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad degree range start {lo:?}")))?;
    let hi: u32 = hi
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad degree range end {hi:?}")))?;
    if lo > hi {
        return Err(CliError::Config(format!("degree range {lo}:{hi} is reversed")));
    }
    Ok((lo, hi))
}

/// Cutoff exponents as fractions: "1/3,1/2,1" -> [(1,3), (1,2), (1,1)].
pub fn parse_exponent_list(text: &str) -> CliResult<Vec<(u64, u64)>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (num, den) = match part.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (part, "1"),
        };
        let num: u64 = num
            .parse()
            .map_err(|_| CliError::Config(format!("bad exponent {part:?}")))?;
        let den: u64 = den
            .parse()
            .map_err(|_| CliError::Config(format!("bad exponent {part:?}")))?;
        if den == 0 {
            return Err(CliError::Config(format!("exponent {part:?} has a zero denominator")));
        }
        out.push((num, den));
    }
    if out.is_empty() {
        return Err(CliError::Config("empty exponent list".into()));
    }
    Ok(out)
}
