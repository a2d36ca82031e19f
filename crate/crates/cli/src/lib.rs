//! Command-line front end for `momenta-core`.
//!
//! [`run`] takes the argument vector and returns the exit code together with
//! everything that would go to stdout and stderr, so the binary is a thin shell.

pub mod commands;
pub mod report;
pub mod spec;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use commands::{Failure, MeasureArgs, EXIT_USAGE};
use report::{Config, Report};

pub const DEFAULT_ORDER: usize = 8;
pub const DEFAULT_NET_SIZE: usize = 24;
pub const DEFAULT_T_NODES: usize = 64;
pub const DEFAULT_GRID_SIZE: usize = 32;
pub const DEFAULT_SHIFT_ORDER: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "momenta", version, about = "Joint complete monotonicity of reciprocal polynomial nets")]
pub struct Cli {
    /// Tolerance for the sign tests on differences.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Print the full report as JSON instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write a plot grid `s,t,value` as CSV (measure command).
    #[arg(long, global = true, value_name = "PATH")]
    pub emit_grid: Option<PathBuf>,
    /// Include wall-clock time in the report. Makes output non-reproducible.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Upper bound on difference order.
    #[arg(long, env = "MOMENTA_MAX_ORDER", global = true, hide_env_values = true)]
    pub max_order: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct NetArgs {
    /// Largest total difference order to scan.
    #[arg(long)]
    pub order: Option<usize>,
    /// Net is sampled on 0..=N in each index.
    #[arg(long, default_value_t = DEFAULT_NET_SIZE)]
    pub net_size: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether 1/p(m, n) is jointly completely monotone.
    Analyze {
        /// Polynomial spec, e.g. "bilinear a=1 b=0 c=1 d=1".
        spec: String,
        #[command(flatten)]
        net: NetArgs,
    },
    /// Build the representing measure and write it as JSON.
    Measure {
        spec: String,
        /// Power of the reciprocal.
        #[arg(long, default_value_t = 1)]
        l: u32,
        /// Output path for the measure JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check moments against the net up to these orders.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Build the measure even when no positive one is certified.
        #[arg(long)]
        allow_signed: bool,
        /// Numerator c(m), "lead=<v> roots=<v,...>".
        #[arg(long)]
        numerator: Option<String>,
        #[arg(long, default_value_t = DEFAULT_T_NODES)]
        t_nodes: usize,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid_size: usize,
        #[command(flatten)]
        net: NetArgs,
    },
    /// Weighted 2-shift checks and the Cauchy dual decision.
    Shift {
        spec: String,
        /// Order of the JCM cross-check on the dual.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_NET_SIZE)]
        net_size: usize,
    },
    /// Partial fractions of NUM / DEN, each "lead=<v> roots=<v,...>".
    Pfrac { num: String, den: String },
    /// Tabulate I_nu and J_nu.
    Bessel {
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        /// Comma-separated arguments.
        #[arg(long)]
        z: String,
    },
    /// Re-check moments of a measure JSON file.
    Verify {
        path: PathBuf,
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Largest relative error that still passes.
        #[arg(long, default_value_t = 1e-6)]
        max_error: f64,
    },
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn fail(code: i32, message: impl std::fmt::Display) -> Self {
        Self { code, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

fn resolve_order(requested: Option<usize>, default: usize, cap: Option<usize>) -> Result<usize, Failure> {
    match (requested, cap) {
        (Some(o), Some(c)) if o > c => {
            Err(Failure::usage(format!("order {o} exceeds MOMENTA_MAX_ORDER={c}")))
        }
        (Some(o), _) => Ok(o),
        (None, Some(c)) => Ok(default.min(c)),
        (None, None) => Ok(default),
    }
}

fn parse<T>(r: Result<T, spec::ParseError>) -> Result<T, Failure> {
    r.map_err(|e| Failure::usage(format!("parse error at {e}")))
}

fn dispatch(cli: &Cli) -> Result<Report, (Failure, Option<Box<Report>>)> {
    let base = Config { tol: cli.tol, ..Config::default() };
    let plain = |e: Failure| (e, None);
    let (command, input, config, result) = match &cli.command {
        Command::Analyze { spec, net } => {
            let poly = parse(spec::parse_poly(spec)).map_err(plain)?;
            let order = resolve_order(net.order, DEFAULT_ORDER, cli.max_order).map_err(plain)?;
            let config = Config { order: Some(order), net_size: Some(net.net_size), ..base };
            ("analyze", spec.clone(), config, commands::analyze(&poly, order, net.net_size, cli.tol))
        }
        Command::Measure { spec, l, out, verify, m, n, allow_signed, numerator, t_nodes, grid_size, net } => {
            let poly = parse(spec::parse_poly(spec)).map_err(plain)?;
            let numerator = numerator.as_deref().map(spec::parse_factored).transpose();
            let numerator = parse(numerator).map_err(plain)?;
            let order = resolve_order(net.order, DEFAULT_ORDER, cli.max_order).map_err(plain)?;
            let args = MeasureArgs {
                l: *l,
                numerator,
                t_nodes: *t_nodes,
                grid_size: *grid_size,
                verify: verify.then_some([*m, *n]),
                allow_signed: *allow_signed,
                order,
                net_size: net.net_size,
                tol: cli.tol,
            };
            let config = Config {
                l: Some(*l),
                t_nodes: Some(*t_nodes),
                grid_size: Some(*grid_size),
                verify: args.verify,
                ..base
            };
            let result = commands::measure(&poly, &args, out.as_deref(), cli.emit_grid.as_deref());
            ("measure", spec.clone(), config, result)
        }
        Command::Shift { spec, order, net_size } => {
            let poly = parse(spec::parse_poly(spec)).map_err(plain)?;
            let order = resolve_order(*order, DEFAULT_SHIFT_ORDER, cli.max_order).map_err(plain)?;
            let config = Config { order: Some(order), net_size: Some(*net_size), ..base };
            ("shift", spec.clone(), config, commands::shift(&poly, *net_size, order, cli.tol))
        }
        Command::Pfrac { num, den } => {
            let n = parse(spec::parse_factored(num)).map_err(plain)?;
            let d = parse(spec::parse_factored(den)).map_err(plain)?;
            ("pfrac", format!("{num} / {den}"), base, commands::pfrac(&n, &d))
        }
        Command::Bessel { nu, z } => {
            let zs = parse(spec::parse_numbers(z)).map_err(plain)?;
            ("bessel", format!("nu={nu} z={z}"), base, commands::bessel(*nu, &zs))
        }
        Command::Verify { path, m, n, max_error } => {
            let config = Config { verify: Some([*m, *n]), ..base };
            let result = commands::verify(path, *m, *n, *max_error);
            ("verify", path.display().to_string(), config, result)
        }
    };
    let (outcome, code) = result.map_err(plain)?;
    let report = Report { command: command.into(), input, config, outcome, timing_ms: None };
    if code == commands::EXIT_PASS {
        Ok(report)
    } else {
        Err((Failure { code, message: String::new() }, Some(Box::new(report))))
    }
}

fn render(cli: &Cli, report: &Report) -> String {
    if cli.json {
        serde_json::to_string_pretty(report).expect("reports serialize") + "\n"
    } else {
        report::summary(report).into_iter().map(|l| l + "\n").collect()
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Output::fail(EXIT_USAGE, format!("--tol must be a finite nonnegative number, got {}", cli.tol));
    }
    let start = Instant::now();
    let stamp = |mut r: Report| {
        if cli.timing {
            r.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        r
    };
    match dispatch(&cli) {
        Ok(report) => Output { code: 0, stdout: render(&cli, &stamp(report)), stderr: String::new() },
        Err((failure, Some(report))) => {
            Output { code: failure.code, stdout: render(&cli, &stamp(*report)), stderr: String::new() }
        }
        Err((failure, None)) => Output::fail(failure.code, failure.message),
    }
}
