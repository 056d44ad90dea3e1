//! `theta-secant`: run a verification scenario and emit a JSON report.
//!
//! ```text
//! theta-secant <scenario> [--curve ref] [--seed n] [--out path] [--tol name=value]...
//! theta-secant run --config scenario.json [--out path]
//! theta-secant rs simulate --n 3 --t-end 1 --h 1e-3 [--kernel rational]
//! ```

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use theta_secant::rng;
use theta_secant::scenario::{run_scenario, CurveRef, Outcome, Scenario, ScenarioConfig};
use theta_secant::series::{rs_integrate, RsKernel, RsState};

/// Env var overriding the theta truncation radius cap.
const CAP_VAR: &str = "THETA_SECANT_CAP";

#[derive(Parser)]
#[command(name = "theta-secant", version, about = "Numerical checks of the theta-function trisecant criterion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named scenario (also the default when the first argument is a scenario name).
    Check(CheckArgs),
    /// Run a scenario described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ruijsenaars-Schneider utilities.
    Rs {
        #[command(subcommand)]
        command: RsCommand,
    },
}

#[derive(Args)]
struct CheckArgs {
    scenario: String,
    /// Corpus reference such as `corpus#x5m1`.
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Threshold override, `name=value`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Report path; CSV artifacts are written beside it. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RsCommand {
    /// Integrate N particles from seeded initial data and print the trajectory CSV.
    Simulate {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long, value_enum, default_value_t = KernelArg::Rational)]
        kernel: KernelArg,
        /// Trigonometric period, or the first elliptic period.
        #[arg(long, default_value_t = 3.0)]
        period: f64,
        /// Second elliptic period, imaginary part.
        #[arg(long, default_value_t = 3.0)]
        period_im: f64,
        #[arg(long, default_value_t = theta_secant::scenario::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Rational,
    Trigonometric,
    Elliptic,
}

/// Lets `theta-secant bdhe ...` stand for `theta-secant check bdhe ...`.
fn normalize_args(mut args: Vec<String>) -> Vec<String> {
    if args.get(1).is_some_and(|a| a.parse::<Scenario>().is_ok()) {
        args.insert(1, "check".into());
    }
    args
}

fn radius_cap_from_env() -> anyhow::Result<Option<usize>> {
    match std::env::var(CAP_VAR) {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| format!("{CAP_VAR}={v:?} is not a positive integer"))?)),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("{CAP_VAR}: {e}"),
    }
}

fn parse_tol(s: &str) -> anyhow::Result<(String, f64)> {
    let (name, value) = s.split_once('=').with_context(|| format!("--tol {s:?}: expected name=value"))?;
    let value: f64 = value.trim().parse().with_context(|| format!("--tol {s:?}: bad number"))?;
    Ok((name.trim().to_string(), value))
}

fn check_config(args: &CheckArgs) -> anyhow::Result<ScenarioConfig> {
    let scenario: Scenario = args.scenario.parse()?;
    let mut cfg = ScenarioConfig::new(scenario);
    if let Some(curve) = &args.curve {
        cfg.curve = CurveRef::Reference(curve.clone());
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    for t in &args.tol {
        let (name, value) = parse_tol(t)?;
        cfg.tolerances.insert(name, value);
    }
    Ok(cfg)
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> anyhow::Result<()> {
    let json = outcome.report.to_json();
    let Some(path) = out else {
        return write_stdout(&(json + "\n"));
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    for a in &outcome.artifacts {
        let csv = path.with_file_name(format!("{stem}.{}.csv", a.name));
        fs::write(&csv, &a.csv).with_context(|| format!("writing {}", csv.display()))?;
    }
    Ok(())
}

/// Writes to stdout; a reader closing the pipe early is not an error.
fn write_stdout(text: &str) -> anyhow::Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run_config(mut cfg: ScenarioConfig, out: Option<&Path>) -> anyhow::Result<u8> {
    if cfg.radius_cap.is_none() {
        cfg.radius_cap = radius_cap_from_env()?;
    }
    let outcome = run_scenario(&cfg);
    emit(&outcome, out)?;
    let code = outcome.report.exit_code();
    if code != 0 {
        let failed: Vec<&str> = outcome.report.records.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
        match &outcome.report.error {
            Some(e) => eprintln!("{}: {}: {}", cfg.scenario, e.kind, e.message),
            None => eprintln!("{}: failed checks: {}", cfg.scenario, failed.join(", ")),
        }
    }
    Ok(code as u8)
}

fn simulate(
    n: usize,
    t_end: f64,
    h: f64,
    kernel: KernelArg,
    periods: (f64, f64),
    seed: u64,
) -> anyhow::Result<String> {
    if n == 0 || !(t_end > 0.0 && t_end.is_finite()) || !(h > 0.0 && h <= t_end) {
        bail!("need n >= 1, t_end > 0 and 0 < h <= t_end");
    }
    let kernel = match kernel {
        KernelArg::Rational => RsKernel::Rational,
        KernelArg::Trigonometric => RsKernel::trigonometric(Complex64::new(periods.0, 0.0))?,
        KernelArg::Elliptic => RsKernel::elliptic(Complex64::new(periods.0, 0.0), Complex64::new(0.0, periods.1))?,
    };
    let mut r = rng::seeded(seed);
    let x = (0..n)
        .map(|i| Complex64::new(1.7 * i as f64, 0.3) + rng::complex_in_box(&mut r, 0.2))
        .collect();
    let xdot = (0..n).map(|_| rng::complex_in_box(&mut r, 0.5)).collect();
    let traj = rs_integrate(&RsState::new(x, xdot, kernel)?, t_end, h)?;
    Ok(traj.to_csv())
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Check(args) => {
            let cfg = check_config(&args)?;
            run_config(cfg, args.output.out.as_deref())
        }
        Command::Run { config, output } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            // range errors surface in the report with exit code 2
            let cfg = ScenarioConfig::parse(&text)?;
            run_config(cfg, output.out.as_deref())
        }
        Command::Rs {
            command:
                RsCommand::Simulate {
                    n,
                    t_end,
                    h,
                    kernel,
                    period,
                    period_im,
                    seed,
                    out,
                },
        } => {
            let csv = simulate(n, t_end, h, kernel, (period, period_im), seed)?;
            match out {
                Some(p) => fs::write(&p, csv).with_context(|| format!("writing {}", p.display()))?,
                None => write_stdout(&csv)?,
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(normalize_args(std::env::args().collect()));
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
