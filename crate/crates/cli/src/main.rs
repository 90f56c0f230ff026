//! `asympheat`: batch runs of the heat-flow toolkit with JSON configs and
//! deterministic output directories.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Run, Suite};
use config::Config;
use report::{OutDir, Report};

#[derive(Debug, Parser)]
#[command(name = "asympheat", version, about = "Heat flow on spaces with spatial asymptotics")]
struct Cli {
    /// JSON run config; every field has a default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = "ASYMPHEAT_OUT", default_value = "asympheat-out")]
    out: PathBuf,

    /// Seed for randomized inputs; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve an asymptotic function under the heat semigroup.
    Evolve,
    /// Solve Δu = ψu³ − φ for an equilibrium with multipole asymptotics.
    Equilibrium,
    /// Integrate u_t = Δu + φ − ψu³.
    Flow,
    /// Resolvent kernel checks and a sector sweep.
    Resolvent,
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "trivial")]
        suite: Suite,
    },
    /// Genericity sweep over random perturbations of φ.
    Sweep,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Equilibrium => "equilibrium",
            Command::Flow => "flow",
            Command::Resolvent => "resolvent",
            Command::Verify { .. } => "verify",
            Command::Sweep => "sweep",
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let mut config = match &cli.config {
        Some(path) => config::load(path)?,
        None => Config::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    config.seed = Some(seed);
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config(config::ConfigError::new("--threads", "must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Run(e.to_string()))?;
    }
    let out = OutDir::create(&cli.out)?;
    out.write_json("config_echo.json", &config)?;

    let mut report = Report::new(cli.command.name(), seed, rayon::current_num_threads());
    let run = Run { config: &config, seed, out: &out, report: &mut report };
    let result = match &cli.command {
        Command::Evolve => commands::evolve(run),
        Command::Equilibrium => commands::equilibrium(run),
        Command::Flow => commands::flow(run),
        Command::Resolvent => commands::resolvent(run),
        Command::Verify { suite } => commands::verify(run, *suite),
        Command::Sweep => commands::sweep(run),
    };
    if let Err(CliError::Run(msg)) = &result {
        report.push("run completed", false, 1.0, 0.0);
        report.set("error", msg);
    }
    if !matches!(result, Err(CliError::Config(_))) {
        out.write_json("report.json", &report)?;
    }
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        eprintln!("{tag} {}: {:e} (threshold {:e})", c.name, c.value, c.threshold);
    }
    result.map(|_| report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CliError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
