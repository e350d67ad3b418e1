//! `organmatch` command line.
//!
//! Exit status: 0 on success, 1 for unreadable or invalid input, 2 for usage
//! errors. Diagnostics go to stderr, controlled by `ORGANMATCH_LOG`
//! (`quiet`, `info` or `debug`; default `quiet`).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Parser, Subcommand};
use organmatch_core::mechanisms::MechanismId;
use organmatch_core::population::{generate_instance, Preset, ScenarioConfig};

use crate::config::ConfigFile;
use crate::error::Error;
use crate::formats::{read_instance, write_instance};
use crate::report::{write_json, AxiomsReport, CompareReport, RunReport};

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const LOG_ENV: &str = "ORGANMATCH_LOG";

#[derive(Debug, Parser)]
#[command(name = "organmatch", version, about = "Online deceased-donor organ allocation simulator")]
pub struct Cli {
    /// TOML file with [scenario] and [scoring] overrides.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn mechanism_parser() -> impl TypedValueParser<Value = MechanismId> {
    PossibleValuesParser::new(MechanismId::ALL.map(MechanismId::name))
        .map(|name| name.parse::<MechanismId>().expect("listed names parse"))
}

fn preset_parser() -> impl TypedValueParser<Value = Preset> {
    PossibleValuesParser::new(Preset::ALL.map(Preset::name)).map(|name| name.parse::<Preset>().expect("listed names parse"))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic instance into DIR/patients.csv and DIR/organs.csv.
    Generate {
        #[arg(long, value_parser = preset_parser())]
        preset: Preset,
        #[arg(long)]
        patients: Option<usize>,
        #[arg(long)]
        organs: Option<usize>,
        #[arg(long)]
        horizon: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate one mechanism and compare it with the offline optimum.
    Run {
        #[arg(long, value_parser = mechanism_parser())]
        mechanism: MechanismId,
        #[arg(long)]
        patients: PathBuf,
        #[arg(long)]
        organs: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: PathBuf,
    },
    /// Run every mechanism under each seed against the offline optimum.
    Compare {
        #[arg(long)]
        patients: PathBuf,
        #[arg(long)]
        organs: PathBuf,
        /// Comma-separated seeds or inclusive ranges, e.g. `1,2,10..20`.
        #[arg(long, value_parser = parse_seeds, default_value = "0")]
        seeds: SeedList,
        #[arg(long)]
        report: PathBuf,
    },
    /// Search every patient's EPTS misreports and check efficiency.
    Axioms {
        #[arg(long, value_parser = mechanism_parser())]
        mechanism: MechanismId,
        #[arg(long)]
        patients: PathBuf,
        #[arg(long)]
        organs: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedList(pub Vec<u64>);

pub fn parse_seeds(text: &str) -> Result<SeedList, String> {
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim) {
        let number = |s: &str| s.trim().parse::<u64>().map_err(|_| format!("`{s}` is not a seed"));
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (number(a)?, number(b.trim_start_matches('='))?);
                if a > b {
                    return Err(format!("empty seed range `{part}`"));
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(number(part)?),
        }
    }
    Ok(SeedList(seeds))
}

fn init_logging() -> Result<(), String> {
    let level = match std::env::var(LOG_ENV).as_deref() {
        Err(_) | Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        Ok(other) => return Err(format!("{LOG_ENV}={other} is not one of quiet, info, debug")),
    };
    // a second initialisation in the same process keeps the first logger
    let _ = env_logger::Builder::new().filter_level(level).target(env_logger::Target::Stderr).try_init();
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Errors are printed to stderr.
pub fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    if let Err(msg) = init_logging() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn run(cli: Cli) -> Result<(), Error> {
    let config_file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    match cli.command {
        Command::Generate { preset, patients, organs, horizon, seed, out } => {
            let mut config = ScenarioConfig::preset(preset);
            if let Some(file) = &config_file {
                file.apply(&mut config);
            }
            config.patient_count = patients.unwrap_or(config.patient_count);
            config.organ_count = organs.unwrap_or(config.organ_count);
            config.horizon_days = horizon.unwrap_or(config.horizon_days);
            let instance = generate_instance(&config, seed)?;
            write_instance(&out, &instance)?;
            log::info!(
                "generated {} patients and {} organs into {}",
                instance.patients().len(),
                instance.organs().len(),
                out.display()
            );
        }
        Command::Run { mechanism, patients, organs, seed, report } => {
            let instance = read_instance(&patients, &organs)?;
            let built = RunReport::build(&instance, mechanism, seed)?;
            log::info!("{mechanism}: total cost {} (offline {})", built.metrics.total_cost, built.offline.total_cost);
            write_json(&report, &built)?;
        }
        Command::Compare { patients, organs, seeds, report } => {
            let instance = read_instance(&patients, &organs)?;
            write_json(&report, &CompareReport::build(&instance, &seeds.0)?)?;
        }
        Command::Axioms { mechanism, patients, organs, seed, report } => {
            let instance = read_instance(&patients, &organs)?;
            let built = AxiomsReport::build(&instance, mechanism, seed)?;
            log::info!("{mechanism}: {} profitable misreports", built.findings.len());
            write_json(&report, &built)?;
        }
    }
    Ok(())
}
