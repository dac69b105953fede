//! Command-line front end for `lnsurrogate`: forward and reverse mappings,
//! tabulated metrics and validation reports.

pub mod cascade;
pub mod error;
pub mod eval;
pub mod forward;
pub mod grid;
pub mod output;
pub mod validate;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use lnsurrogate::mapping::{VarianceMethod, FORWARD_TOL};
use lnsurrogate::metrics::LinkParams;

use error::{exit, CliError, CliResult};
use output::{emit, render_table, Format, Metadata};

/// Environment variable overriding the default forward-mapping tolerance.
pub const TOL_ENV: &str = "LNSURROGATE_TOL";

#[derive(Debug, Parser)]
#[command(name = "lnsurrogate", version, about = "Product-of-variates surrogates for Lognormal fading")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map Lognormal (ν, σ) to surrogate parameters (m, Ω).
    MapForward(MapForwardArgs),
    /// Limiting Lognormal parameters of a cascade description file.
    MapReverse(MapReverseArgs),
    /// Tabulate a density or metric over a grid.
    Eval(EvalArgs),
    /// Run validation scenarios and emit a report.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = validate::DEFAULT_SEED)]
    pub seed: u64,
    /// Forward-mapping residual tolerance.
    #[arg(long, env = TOL_ENV)]
    pub tol: Option<f64>,
}

impl CommonArgs {
    fn tol(&self) -> CliResult<f64> {
        match self.tol {
            None => Ok(FORWARD_TOL),
            Some(t) if t > 0.0 && t.is_finite() => Ok(t),
            Some(t) => Err(CliError::usage(format!("tolerance {t} must be positive"))),
        }
    }

    fn meta(&self, command: &str) -> CliResult<Metadata> {
        Ok(Metadata::new(command, self.seed, self.tol()?))
    }
}

#[derive(Debug, Args)]
pub struct MapForwardArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub n_factors: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub family: forward::FamilyArg,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct MapReverseArgs {
    /// JSON array of hop objects.
    pub cascade: PathBuf,
    #[arg(long, value_enum, default_value = "moments")]
    pub variance: cascade::VarianceArg,
    /// κ-μ moment order; overrides the file.
    #[arg(long)]
    pub kappa_order: Option<f64>,
    /// η-μ moment orders as K1,K2; overrides the file.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub eta_orders: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub quantity: eval::Quantity,
    #[arg(long, value_enum, default_value = "mixture")]
    pub model: eval::Model,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 5)]
    pub n_factors: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p_mix: f64,
    /// Mean SNR when no grid is given for ber or capacity.
    #[arg(long, default_value_t = 10.0)]
    pub gamma_bar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub bandwidth: f64,
    /// KIND:LO:HI:N with KIND one of lin, log, db.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<grid::Grid>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub r_hat: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Scenario name, or `all`.
    #[arg(default_value = "all")]
    pub scenario: String,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn read(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::MapForward(a) => {
            let tol = a.common.tol()?;
            let sols = forward::solve(a.nu, a.sigma, a.n_factors, a.family, tol)?;
            let mut meta = a.common.meta("map-forward")?;
            meta.set("nu", a.nu).set("sigma", a.sigma).set("n_factors", a.n_factors);
            let text = render_table(a.common.format.unwrap_or(Format::Csv), &meta, &forward::table(&sols));
            emit(&text, a.common.out.as_deref())
        }
        Command::MapReverse(a) => {
            let hops = cascade::parse(&read(&a.cascade)?)?;
            let eta = a.eta_orders.as_ref().map(|v| (v[0], v[1]));
            let spec = cascade::build_spec(&hops, VarianceMethod::from(a.variance), a.kappa_order, eta)?;
            let res = cascade::run(&spec)?;
            let mut meta = a.common.meta("map-reverse")?;
            meta.set("cascade", a.cascade.display().to_string());
            cascade::annotate(&mut meta, &spec);
            let text = render_table(a.common.format.unwrap_or(Format::Csv), &meta, &cascade::table(&res));
            emit(&text, a.common.out.as_deref())
        }
        Command::Eval(a) => {
            let params = eval::EvalParams {
                nu: a.nu,
                sigma: a.sigma,
                n: a.n_factors,
                p: a.p_mix,
                link: LinkParams::new(a.gamma_bar, a.a, a.b, a.bandwidth)?,
                alpha: a.alpha,
                mu: a.mu,
                r_hat: a.r_hat,
                tol: a.common.tol()?,
            };
            let grid = a.grid.unwrap_or_else(|| eval::default_grid(a.quantity, &params));
            let mut meta = a.common.meta("eval")?;
            let table = eval::run(a.quantity, a.model, &params, &grid, &mut meta)?;
            let text = render_table(a.common.format.unwrap_or(Format::Csv), &meta, &table);
            emit(&text, a.common.out.as_deref())
        }
        Command::Validate(a) => {
            a.common.tol()?;
            let (report, elapsed) = validate::run(&a.scenario, a.common.seed, a.timings)?;
            for (s, dt) in report.scenarios.iter().zip(&elapsed) {
                let status = if s.passed { "PASS" } else { "FAIL" };
                eprintln!("{status} {} ({:.2} s, budget {} s)", s.id, dt, s.budget_s);
                for c in s.failures() {
                    eprintln!("    {}: {} vs {} ({:?})", c.label, c.value, c.reference, c.tolerance);
                }
            }
            let over = report.scenarios.iter().zip(&elapsed).any(|(s, &dt)| dt >= s.budget_s);
            let text = match a.common.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
                    s.push('\n');
                    s
                }
                Format::Csv => render_table(Format::Csv, &report.metadata, &validate::report_table(&report)),
            };
            emit(&text, a.common.out.as_deref())?;
            if !report.passed {
                return Err(CliError::CheckFailed("validation comparisons failed".into()));
            }
            if over {
                return Err(CliError::CheckFailed("a scenario exceeded its runtime budget".into()));
            }
            Ok(())
        }
    }
}

/// Parse, run and map the outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
