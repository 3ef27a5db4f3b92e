//! Command-line front end: argument parsing, configuration layering and the subcommands.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Format, RunConfig};
pub use report::ConjectureReport;

#[derive(Debug, Parser)]
#[command(name = "zetalab", version, about = "Zeta functions of varieties over finite fields and L-functions over Q")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// File of `key = value` lines applied over the defaults.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    pub show_config: bool,
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Decimal digits for root isolation.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    #[arg(long, global = true)]
    pub prime_cutoff: Option<u64>,
    /// Any config key, e.g. `--set weil_tol=1e-20`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point counts N_1..N_m over F_{q^n}.
    Count(VarietyArgs),
    /// Zeta function, weight factors and the classical checks.
    Zeta(VarietyArgs),
    /// Even/odd spectrum and its checks.
    Nc(NcArgs),
    /// Euler products, Dirichlet coefficients and trace bounds of an arithmetic model.
    Lfun(LfunArgs),
    /// A single check.
    Check {
        #[command(subcommand)]
        which: CheckCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    Weil(VarietyArgs),
    Ladic(VarietyArgs),
    Functional(VarietyArgs),
    NcFunctional(VarietyArgs),
    Tate(NcArgs),
    Serre(SerreArgs),
    Beilinson(BeilinsonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VarietyArgs {
    /// Variety description file.
    #[arg(long, value_name = "FILE")]
    pub spec: PathBuf,
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Number of extension degrees to count; defaults to the sum of the Betti numbers.
    #[arg(long)]
    pub degrees: Option<u32>,
    /// Betti numbers β_0..β_{2d}, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub betti: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Args)]
pub struct NcArgs {
    #[command(flatten)]
    pub variety: VarietyArgs,
    /// Rank of K_0/num, a supplied fixture.
    #[arg(long)]
    pub k0_rank: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Arithmetic model JSON file.
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// Use the replacement fibers at bad primes instead of excluding them.
    #[arg(long)]
    pub replace_bad_primes: bool,
}

#[derive(Debug, Clone, Args)]
pub struct LfunArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Point of evaluation of the even product.
    #[arg(long, default_value_t = 2.0)]
    pub s_even: f64,
    /// Point of evaluation of the odd product.
    #[arg(long, default_value_t = 2.5)]
    pub s_odd: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SerreArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Weights to check; all weights with nonzero Betti number by default.
    #[arg(long, value_delimiter = ',')]
    pub w: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BeilinsonArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Integers at which the orders are computed.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [1, 0, -1])]
    pub j: Vec<i64>,
    /// dim K_0/hom, overriding the model file.
    #[arg(long)]
    pub k0_rank: Option<u64>,
    /// dim K_0^0 (homologically trivial part), overriding the model file.
    #[arg(long)]
    pub k0_zero_rank: Option<u64>,
    #[arg(long)]
    pub k1_rank: Option<u64>,
    #[arg(long)]
    pub k2_rank: Option<u64>,
    #[arg(long)]
    pub k3_rank: Option<u64>,
}

/// Exit codes of the input-error and internal-error paths.
pub const EXIT_USER: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    User(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => EXIT_USER,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

/// What the process prints and returns.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn out(stdout: String, code: i32) -> Self {
        Outcome { stdout, stderr: String::new(), code }
    }

    fn err(e: CliError) -> Self {
        Outcome { stdout: String::new(), stderr: format!("{e}\n"), code: e.exit_code() }
    }
}

/// Defaults, then the config file, then `--set` pairs, then dedicated flags.
pub fn resolve_config(global: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &global.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::User(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_file(&text).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
    }
    for pair in &global.set {
        let (k, v) = pair.split_once('=').ok_or_else(|| CliError::User(format!("--set expects KEY=VALUE, got {pair:?}")))?;
        cfg.set(k.trim(), v.trim()).map_err(|e| CliError::User(e.to_string()))?;
    }
    if let Some(f) = global.format {
        cfg.format = f;
    }
    if let Some(d) = &global.cache_dir {
        cfg.cache_dir = Some(d.clone());
    }
    if let Some(p) = global.precision {
        cfg.precision = p;
    }
    if let Some(p) = global.prime_cutoff {
        cfg.prime_cutoff = p;
    }
    cfg.validate().map_err(|e| CliError::User(e.to_string()))?;
    Ok(cfg)
}

/// Parses the arguments and runs the selected command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stdout: String::new(), stderr: text, code: EXIT_USER }
            } else {
                Outcome::out(text, 0)
            };
        }
    };
    let cfg = match resolve_config(&cli.global) {
        Ok(cfg) => cfg,
        Err(e) => return Outcome::err(e),
    };
    if cli.global.show_config {
        let text = match cfg.format {
            Format::Json => serde_json::to_string_pretty(&cfg).expect("serializable") + "\n",
            Format::Text => cfg.to_file_text(),
        };
        return Outcome::out(text, 0);
    }
    let Some(command) = cli.command else {
        return Outcome::err(CliError::User("no command given; see --help".into()));
    };
    match commands::dispatch(&command, &cfg) {
        Ok(commands::Emitted::Report(report)) => {
            let text = match cfg.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            Outcome::out(text, report.exit_code())
        }
        Ok(commands::Emitted::Counts(text)) => Outcome::out(text, 0),
        Err(e) => Outcome::err(e),
    }
}
