//! `z3pf`: reproducible experiments on Z3 parafermion chains and qutrit gates.
//!
//! Every run writes its artifacts plus `manifest.json` into the output
//! directory (`--out`, else `$Z3PF_OUT_DIR`, else `z3pf-out`). Exit codes:
//! 0 on success, 2 on configuration errors, 3 on I/O errors.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::chain::{EffectiveArgs, SpectrumArgs};
use commands::gates::GateArgs;
use commands::magic::SampleArgs;
use commands::rydberg::{BerryArgs, EvolveArgs};
use config::ConfigFile;
use error::{CliError, Result};
use output::OutputDir;

const OUT_ENV: &str = "Z3PF_OUT_DIR";
const DEFAULT_OUT: &str = "z3pf-out";

#[derive(Parser, Debug)]
#[command(name = "z3pf", version, about = "Z3 parafermion chain and qutrit gate experiments")]
struct Cli {
    /// TOML or JSON file of subcommand keys; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Taken from the config's `subcommand` key when omitted.
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact spectrum of a chain (spectrum.csv).
    Spectrum(SpectrumArgs),
    /// Exact against perturbative two-site levels (effective.csv).
    Effective(EffectiveArgs),
    /// Clifford-hierarchy level of a diagonal or dynamical gate (gate.json).
    GateLevel(GateArgs),
    /// Random-word sampling of qutrit states (sampler.csv, coverage.json).
    Sample(SampleArgs),
    /// Wigner negativity summary of a sampling run (magic_report.json).
    MagicReport(SampleArgs),
    /// Rydberg implementation of the edge interaction.
    #[command(subcommand)]
    Rydberg(RydbergCommand),
}

#[derive(Subcommand, Debug)]
enum RydbergCommand {
    /// Time evolution of the level scheme (trajectory.csv).
    Evolve(EvolveArgs),
    /// Geometric phase of an adiabatic loop (berry.json).
    Berry(BerryArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Effective(_) => "effective",
            Command::GateLevel(_) => "gate-level",
            Command::Sample(_) => "sample",
            Command::MagicReport(_) => "magic-report",
            Command::Rydberg(RydbergCommand::Evolve(_)) => "rydberg-evolve",
            Command::Rydberg(RydbergCommand::Berry(_)) => "rydberg-berry",
        }
    }

    /// The subcommand with no flags given, as named in a config file.
    fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "spectrum" => Command::Spectrum(Default::default()),
            "effective" => Command::Effective(Default::default()),
            "gate-level" => Command::GateLevel(Default::default()),
            "sample" => Command::Sample(Default::default()),
            "magic-report" => Command::MagicReport(Default::default()),
            "rydberg-evolve" => Command::Rydberg(RydbergCommand::Evolve(Default::default())),
            "rydberg-berry" => Command::Rydberg(RydbergCommand::Berry(Default::default())),
            other => return Err(CliError::config("subcommand", format!("unknown subcommand `{other}`"))),
        })
    }
}

struct Context {
    config: ConfigFile,
    out: PathBuf,
}

impl Context {
    /// Merge, resolve, run and write the manifest.
    fn execute<A: Serialize + DeserializeOwned>(
        &self,
        name: &str,
        flags: &A,
        resolve: impl FnOnce(A) -> Result<A>,
        run: impl FnOnce(&A, &mut OutputDir) -> Result<String>,
    ) -> Result<()> {
        let resolved = resolve(self.config.merge(flags, name)?)?;
        let mut out = OutputDir::create(&self.out, self.config.path.as_deref())?;
        let summary = run(&resolved, &mut out)?;
        let manifest = config::manifest(name, &resolved, out.written());
        let written = out.finish(&manifest)?;
        println!("{name}: {summary}");
        println!("wrote {} to {}", written.join(", "), self.out.display());
        Ok(())
    }
}

fn dispatch(ctx: &Context, command: &Command) -> Result<()> {
    let name = command.name();
    match command {
        Command::Spectrum(a) => ctx.execute(name, a, SpectrumArgs::resolve, SpectrumArgs::run),
        Command::Effective(a) => ctx.execute(name, a, EffectiveArgs::resolve, EffectiveArgs::run),
        Command::GateLevel(a) => ctx.execute(name, a, GateArgs::resolve, GateArgs::run),
        Command::Sample(a) => ctx.execute(name, a, SampleArgs::resolve, SampleArgs::run_sample),
        Command::MagicReport(a) => ctx.execute(name, a, SampleArgs::resolve, SampleArgs::run_report),
        Command::Rydberg(RydbergCommand::Evolve(a)) => ctx.execute(name, a, EvolveArgs::resolve, EvolveArgs::run),
        Command::Rydberg(RydbergCommand::Berry(a)) => ctx.execute(name, a, BerryArgs::resolve, BerryArgs::run),
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let command = match cli.command {
        Some(c) => c,
        None => match &config.subcommand {
            Some(name) => Command::from_name(name)?,
            None => return Err(CliError::config("subcommand", "no subcommand given on the command line or in the config")),
        },
    };
    let out = cli
        .out
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let ctx = Context { config, out };
    match cli.workers {
        None => dispatch(&ctx, &command),
        Some(0) => Err(CliError::config("workers", "must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::config("workers", e.to_string()))?;
            pool.install(|| dispatch(&ctx, &command))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
