use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use halfspace_core::error::Error;
use halfspace_core::evaluation::{check_logconcave_properties, check_points, PropertyReport};
use halfspace_core::geometry::Instance;
use halfspace_core::experiment::{
    generate_dataset, run_experiment, run_sweep, write_sweep_csv, ExperimentConfig, PropertiesConfig, RunError,
    SweepPlan,
};
use halfspace_core::synthdata::{sample_marginal, write_csv, MarginalKind, MarginalSpec};

const EXIT_CONFIG: u8 = 2;
const EXIT_LEARNER: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "halfspace", version, about = "Noise-robust halfspace learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to one per core).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the training sample of a config as CSV.
    Generate(Common),
    /// Generate, train, evaluate; print the JSON report.
    Run(Common),
    /// Check the distributional properties of a marginal; JSON lines.
    Properties {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "gaussian")]
        marginal: Kind,
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 200_000)]
        n: usize,
        /// Feed the checker inflated points while claiming the stated marginal.
        #[arg(long, hide = true)]
        test_stub_marginal: bool,
    },
    /// Run every cell of a sweep config; CSV table.
    Sweep(Common),
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Kind {
    Gaussian,
    UniformBall,
}

enum Failure {
    Config(String),
    Learner(String),
    Check(String),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(e) => Failure::Config(e.to_string()),
            RunError::Learner(e) => Failure::Learner(e.to_string()),
        }
    }
}

fn config_err(e: Error) -> Failure {
    Failure::Config(e.to_string())
}

fn read_config(common: &Common) -> Result<String, Failure> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config("--config is required".into()))?;
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn experiment_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::from_json(&read_config(common)?).map_err(config_err)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut out = open_out(path)?;
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Config(e.to_string()))
}

fn cmd_generate(common: &Common) -> Result<(), Failure> {
    let cfg = experiment_config(common)?;
    let data = generate_dataset(&cfg)?;
    let out = open_out(common.out.as_deref())?;
    write_csv(&data, out).map_err(config_err)
}

fn cmd_run(common: &Common) -> Result<(), Failure> {
    let cfg = experiment_config(common)?;
    let report = run_experiment(&cfg)?;
    let json = report.to_json() + "\n";
    if let Some(p) = &common.out {
        write_text(Some(p), &json)?;
    }
    write_text(None, &json)
}

fn cmd_properties(common: &Common, marginal: MarginalSpec, n: usize, stub: bool) -> Result<(), Failure> {
    let mut cfg = match &common.config {
        Some(_) => PropertiesConfig::from_json(&read_config(common)?).map_err(config_err)?,
        None => {
            marginal.validate().map_err(config_err)?;
            PropertiesConfig { marginal, n, seed: 0 }
        }
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let report: PropertyReport = if stub {
        let xs: Vec<_> = sample_marginal(&cfg.marginal, cfg.n, cfg.seed)
            .into_iter()
            .map(|x| Instance::new(x.iter().map(|c| 3.0 * c).collect()).expect("finite"))
            .collect();
        check_points(&xs, &cfg.marginal, cfg.seed)
    } else {
        check_logconcave_properties(&cfg.marginal, cfg.n, cfg.seed)
    }
    .map_err(config_err)?;
    write_text(common.out.as_deref(), &report.to_jsonl())?;
    let failed = report.failures();
    if failed.is_empty() {
        Ok(())
    } else {
        let names: Vec<&str> = failed.iter().map(|c| c.name.as_str()).collect();
        Err(Failure::Check(format!("failed checks: {}", names.join(", "))))
    }
}

fn cmd_sweep(common: &Common) -> Result<(), Failure> {
    let mut plan = SweepPlan::from_json(&read_config(common)?).map_err(config_err)?;
    if let Some(seed) = common.seed {
        plan = plan.with_seed(seed);
    }
    let outcome = run_sweep(&plan);
    let out = open_out(common.out.as_deref())?;
    write_sweep_csv(&outcome.rows, out).map_err(config_err)?;
    if outcome.failures.is_empty() {
        return Ok(());
    }
    for (row, e) in &outcome.failures {
        eprintln!("row {row}: {e}");
    }
    Err(Failure::Learner(format!("{} of {} cells failed", outcome.failures.len(), outcome.rows.len())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Generate(c) | Command::Run(c) | Command::Sweep(c) => c,
        Command::Properties { common, .. } => common,
    };
    if let Some(t) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let result = match &cli.command {
        Command::Generate(c) => cmd_generate(c),
        Command::Run(c) => cmd_run(c),
        Command::Properties {
            common,
            marginal,
            dim,
            n,
            test_stub_marginal,
        } => {
            let kind = match marginal {
                Kind::Gaussian => MarginalKind::Gaussian,
                Kind::UniformBall => MarginalKind::UniformBall,
            };
            cmd_properties(common, MarginalSpec { kind, d: *dim }, *n, *test_stub_marginal)
        }
        Command::Sweep(c) => cmd_sweep(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Learner(m)) => {
            eprintln!("learner error: {m}");
            ExitCode::from(EXIT_LEARNER)
        }
        Err(Failure::Check(m)) => {
            eprintln!("property check failed: {m}");
            ExitCode::from(EXIT_CHECK)
        }
    }
}
