use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pushpull_cli::{
    cmd_figure, cmd_sweep, cmd_validate, write_csv, CliError, EngineChoice, Exhibit, SweepSpec, DEFAULT_SEED,
    DEFAULT_TRIALS, Z_LIMIT,
};
use pushpull_core::BaseConfig;

#[derive(Parser)]
#[command(name = "pushpull", version, about = "Pull/push MAC model: figure grids, sweeps and cross-validation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Parameter file (`key = value` lines); unspecified keys keep the default preset
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Monte Carlo trials per point
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Axes {
    /// lambda_a = lambda_q values, packets/s
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// lambda_a values, crossed with --lambda-q
    #[arg(long = "lambda-a", value_delimiter = ',')]
    lambda_a: Vec<f64>,
    #[arg(long = "lambda-q", value_delimiter = ',')]
    lambda_q: Vec<f64>,
    /// Pull capacities Q
    #[arg(long = "q", value_delimiter = ',')]
    pull: Vec<u32>,
    /// Push sub-frame lengths P
    #[arg(long = "p", value_delimiter = ',')]
    push: Vec<u32>,
    /// Schedule lengths k_s; each turns the P points into main-radio baseline points
    #[arg(long = "k-s", value_delimiter = ',')]
    schedule: Vec<u32>,
}

impl Axes {
    fn is_empty(&self) -> bool {
        self.lambda.is_empty()
            && self.lambda_a.is_empty()
            && self.lambda_q.is_empty()
            && self.pull.is_empty()
            && self.push.is_empty()
            && self.schedule.is_empty()
    }

    fn spec(&self) -> SweepSpec {
        let mut traffic: Vec<(f64, f64)> = self.lambda.iter().map(|&l| (l, l)).collect();
        for &a in &self.lambda_a {
            for &q in &self.lambda_q {
                traffic.push((a, q));
            }
        }
        SweepSpec {
            traffic,
            pull: self.pull.clone(),
            push: self.push.clone(),
            schedule: self.schedule.clone(),
            include_wur_push: false,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Compare simulation against the analytic model; exits 1 if any |z| > 3
    Validate {
        #[command(flatten)]
        common: Common,
        /// Sweep to validate (defaults to the fig5 grid)
        #[command(flatten)]
        axes: Axes,
    },
    /// Write the grid of one exhibit: fig5..fig10 or table3
    Figure {
        name: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "analytic")]
        engine: EngineChoice,
    },
    /// Cartesian sweep over traffic and frame partitions
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        axes: Axes,
        #[arg(long, default_value = "analytic")]
        engine: EngineChoice,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn base(common: &Common) -> Result<BaseConfig, CliError> {
    Ok(match &common.config {
        Some(path) => BaseConfig::from_file(path)?,
        None => BaseConfig::preset(),
    })
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Cmd::Validate { common, axes } => {
            let base = base(&common)?;
            let spec = if axes.is_empty() { Exhibit::Fig5.sweep() } else { axes.spec().with_defaults(&base) };
            let points = spec.points(&base, "validate")?;
            let report = cmd_validate(&points, common.trials, common.seed)?;
            report.write_csv(output(&common.out)?)?;
            let failed = report.failures().count();
            if let Some(w) = report.worst() {
                eprintln!(
                    "{} comparisons, {failed} with |z| > {Z_LIMIT}; worst {} {} z = {:.2}",
                    report.lines.len(),
                    w.scenario_id,
                    w.metric,
                    w.z
                );
            }
            Ok(report.passed())
        }
        Cmd::Figure { name, common, engine } => {
            let exhibit: Exhibit = name.parse()?;
            let rows = cmd_figure(exhibit, &base(&common)?, engine, common.trials, common.seed)?;
            write_csv(&rows, output(&common.out)?)?;
            Ok(true)
        }
        Cmd::Sweep { common, axes, engine } => {
            let base = base(&common)?;
            let rows = cmd_sweep(axes.spec(), &base, engine, common.trials, common.seed)?;
            write_csv(&rows, output(&common.out)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let code = if e.use_stderr() { 2 } else { 0 };
        let _ = e.print();
        std::process::exit(code);
    });
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
