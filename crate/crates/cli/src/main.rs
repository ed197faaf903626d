//! `discbound` command-line front end.
//!
//! Exit codes: 0 success, 1 check or validation failure, 2 usage or parse
//! error, 3 computation too large for the configured cap.

mod commands;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use discbound::sampling::SamplerKind;

#[derive(Debug, Parser)]
#[command(
    name = "discbound",
    version,
    about = "Bracketing covers, star discrepancy and bound checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact checks of the shifted power-sum inequality
    #[command(subcommand)]
    Faulhaber(FaulhaberCmd),
    /// Bracketing-number bounds and their numerical certificates
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Build or verify bracketing covers
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Star discrepancy of a point set
    #[command(subcommand)]
    Disc(DiscCmd),
    /// Write a seeded point set as CSV
    Sample(SampleArgs),
    /// Replicated discrepancy experiments
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Debug, Subcommand)]
enum FaulhaberCmd {
    Verify {
        #[arg(long, default_value_t = 50)]
        n_max: u64,
        #[arg(long, default_value_t = 20)]
        j_max: u32,
        /// Shift grid: `m` for {0, 1/m, ..., 1}, or a list such as `0,1/3,1`
        #[arg(long, default_value = "8")]
        r_grid: String,
    },
}

#[derive(Debug, Subcommand)]
enum BoundsCmd {
    Table {
        /// Dimensions, e.g. `2,3` or `2..10`
        #[arg(long, value_parser = parse_dims)]
        d: Dims,
        #[arg(long, value_parser = parse_deltas)]
        delta: Deltas,
    },
    #[command(name = "check-theorem24")]
    CheckCertificates {
        #[arg(long, default_value_t = 101)]
        a_d_max: u32,
        #[arg(long, default_value_t = 300)]
        large_d_max: u32,
        #[arg(long, default_value_t = 1000)]
        scan_d_max: u32,
    },
}

#[derive(Debug, Args)]
struct ValidationArgs {
    /// Random test points on top of the corner grid
    #[arg(long, default_value_t = 100_000)]
    n_random: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum CoverCmd {
    Build {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        validation: ValidationArgs,
        #[arg(long, default_value_t = discbound::cover::DEFAULT_BRACKET_CAP)]
        cap: usize,
    },
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        validation: ValidationArgs,
    },
}

#[derive(Debug, Subcommand)]
enum DiscCmd {
    Exact {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = discbound::discrepancy::DEFAULT_GRID_CAP)]
        cap: u64,
    },
    Upper {
        #[arg(long)]
        points: PathBuf,
        /// Bracketing cover CSV; its corners form the test set
        #[arg(long, conflicts_with = "delta", required_unless_present = "delta")]
        cover: Option<PathBuf>,
        #[arg(long)]
        delta: Option<f64>,
    },
    Weighted {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_parser = parse_floats, conflicts_with = "weights", required_unless_present = "weights")]
        product_weights: Option<Floats>,
        /// Rows `bitmask,weight`
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Use cover-based upper bounds at this tolerance instead of exact values
        #[arg(long)]
        delta: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    sampler: SamplerKind,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ExperimentCmd {
    Run {
        #[arg(long)]
        sampler: SamplerKind,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Thresholds `c` in `D* <= c sqrt(d/N)`
        #[arg(long, value_parser = parse_floats)]
        c: Floats,
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        /// Per-replication CSV
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = discbound::discrepancy::DEFAULT_GRID_CAP)]
        cap: u64,
    },
}

// Newtypes keep clap from treating these as repeated flags.
#[derive(Debug, Clone)]
struct Dims(Vec<u32>);
#[derive(Debug, Clone)]
struct Deltas(Vec<f64>);
#[derive(Debug, Clone)]
struct Floats(Vec<f64>);

fn parse_floats(s: &str) -> Result<Floats, String> {
    let values = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(Floats(values))
}

fn parse_deltas(s: &str) -> Result<Deltas, String> {
    let Floats(v) = parse_floats(s)?;
    Ok(Deltas(v))
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let num = |t: &str| t.parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                if a > b {
                    return Err(format!("empty range {item}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(item)?),
        }
    }
    Ok(Dims(out))
}

/// Runs one invocation, writing to `out` and `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match commands::dispatch(cli.command, out) {
        Ok(commands::Outcome::Pass) => 0,
        Ok(commands::Outcome::Fail) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<discbound::Error>() {
        Some(discbound::Error::Infeasible { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}
