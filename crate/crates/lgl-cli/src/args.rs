use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "lgl",
    version,
    about = "Ranks of appearance, gcd moments, pseudoprime assembly, smooth counts \
             and torus gcd sums for Lucas sequences"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Linear coefficient of the recurrence
    #[arg(long, global = true, default_value_t = 1, allow_hyphen_values = true)]
    pub a1: i64,
    /// Constant coefficient of the recurrence
    #[arg(long, global = true, default_value_t = 1, allow_hyphen_values = true)]
    pub a2: i64,
    /// Worker threads: 0 = all cores, 1 = reference sequential path
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Rank-table snapshot file to reuse or create; LGL_SNAPSHOT_DIR names a
    /// default directory
    #[arg(long, global = true)]
    pub snapshot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Conditional,
    Unconditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmoothModeArg {
    /// Smooth integers up to x
    Psi,
    /// Primes p <= x with p - 1 smooth
    Pi,
    /// Primes p <= x with p - (delta/p) smooth
    PiStar,
    /// Primes in (x, 2x] with smooth shift in a progression
    Ap,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank of appearance z(m) and ell(m) = lcm(m, z(m))
    Rank {
        #[arg(long)]
        m: u64,
    },
    /// Build the batched z/g table, summarize or dump it
    Sieve {
        /// Table covers 1..=n
        #[arg(long)]
        n: u64,
        /// Emit CSV rows n,z,g,omega instead of the JSON summary
        #[arg(long)]
        dump: bool,
        /// Override the parallel fill segment length
        #[arg(long)]
        segment: Option<usize>,
    },
    /// Power moments of gcd(n, u_n) with implied exponents
    Moments {
        /// Scan bound; ignored when --checkpoints is given
        #[arg(long, default_value_t = 0)]
        x: u64,
        #[arg(long, default_value_t = 1)]
        lambda: u32,
        /// Strictly ascending checkpoint list, e.g. 1000,10000,100000
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
    },
    /// Counts of n <= t with a fixed rank, and the density ordinate
    #[command(name = "bz-evidence")]
    BzEvidence {
        #[arg(long, default_value_t = 1000)]
        t_min: u64,
        #[arg(long)]
        t_max: u64,
        /// First family of z values, as an inclusive range lo-hi
        #[arg(long, default_value = "101-110")]
        grey: String,
        /// Second family of z values
        #[arg(long, default_value = "1001-1010")]
        black: String,
        #[arg(long, default_value_t = 50)]
        points_per_decade: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Harvest primes and assemble verified self-dividing n = 2sM_y
    Pseudoprimes {
        /// Harvest floor; primes come from (y, z]
        #[arg(long)]
        y: Option<f64>,
        /// Harvest ceiling
        #[arg(long)]
        z: Option<f64>,
        /// Number of primes per product
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Conditional)]
        mode: ModeArg,
        /// Exponent tying z to y in unconditional mode
        #[arg(long, default_value_t = lgl_core::construct::DEFAULT_V)]
        v: f64,
        /// Maximum number of certificates to emit
        #[arg(long, default_value_t = 16)]
        budget: usize,
        /// Derive y, z and r from a target scale, overriding --y/--z/--r
        #[arg(long)]
        target_x: Option<f64>,
    },
    /// Smooth and shifted-prime smooth counting
    Smooth {
        #[arg(long, value_enum)]
        mode: SmoothModeArg,
        #[arg(long)]
        x: u64,
        /// Smoothness bound (psi, pi, pi-star)
        #[arg(long)]
        y: Option<u64>,
        /// Smoothness exponent for ap mode: bound is x^beta
        #[arg(long)]
        beta: Option<f64>,
        /// Progression modulus for ap mode: a | p - 1
        #[arg(long, default_value_t = 1)]
        a: u64,
    },
    /// Averaged double sum of log gcd(a^n - 1, b^n - 1)
    Torus {
        #[arg(long)]
        b: u64,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        /// Switch to the order-based lower estimate with this prime cap
        #[arg(long)]
        prime_cap: Option<u64>,
    },
    /// Count n <= x whose rank z(n) exists and gcd(n, z(n)) exceeds a threshold
    #[command(name = "gcd-large")]
    GcdLarge {
        #[arg(long)]
        x: u64,
        /// Absolute threshold on gcd(n, z(n))
        #[arg(long)]
        t: f64,
        /// Also list every n <= x with n | u_n
        #[arg(long)]
        list_self_dividing: bool,
    },
}
