//! Command-line driver: one subcommand per experiment, each producing a
//! table written as CSV or JSON.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Arg, ArgMatches, Command};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod output;

use config::{flag_name, ConfigFile, Format, Overrides, RunConfig, COMMANDS, DEFAULT_SEED, SEED_ENV};
use output::{write_atomic, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}{}: {message}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    Config { path: PathBuf, line: Option<usize>, message: String },
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

macro_rules! numerical_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Numerical(e.to_string())
            }
        })*
    };
}

numerical_from!(
    thermofock::fock::FockError,
    thermofock::sphere::SphereError,
    thermofock::chain::ChainError,
    thermofock::charfn::CharFnError,
    thermofock::states::StatesError,
    thermofock::measurement::MeasurementError,
    thermofock::toy::ToyError
);

pub fn cli() -> Command {
    let common = [
        Arg::new("seed")
            .long("seed")
            .global(true)
            .value_name("U64")
            .help(format!("master seed [default: {DEFAULT_SEED}, or ${SEED_ENV} when set]")),
        Arg::new("out").long("out").global(true).value_name("PATH").help("output file [default: stdout]"),
        Arg::new("format").long("format").global(true).value_name("csv|json").help("output format [default: csv]"),
        Arg::new("config").long("config").global(true).value_name("FILE").help("TOML file of flat key = value pairs"),
    ];
    let mut cmd = Command::new("thermofock")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Reproducible numerical experiments on oscillators, chains and measurement")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .args(common);
    for spec in COMMANDS {
        let mut sub = Command::new(spec.name).about(spec.about);
        for p in spec.params {
            let flag = flag_name(p.name);
            let shown = if p.default.is_empty() { "\"\"" } else { p.default };
            sub = sub.arg(
                Arg::new(p.name)
                    .long(flag)
                    .value_name(format!("{:?}", p.kind).to_uppercase())
                    .allow_hyphen_values(true)
                    .help(format!("{} [default: {shown}]", p.help)),
            );
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn overrides(name: &str, m: &ArgMatches) -> Overrides {
    let spec = config::command_spec(name).expect("registered subcommand");
    Overrides {
        params: spec
            .params
            .iter()
            .filter_map(|p| m.get_one::<String>(p.name).map(|v| (p.name.to_string(), v.clone())))
            .collect(),
        seed: m.get_one::<String>("seed").cloned(),
        out: m.get_one::<String>("out").cloned(),
        format: m.get_one::<String>("format").cloned(),
    }
}

/// Parses arguments into a resolved configuration. `Ok(None)` means help or
/// version text was printed.
pub fn parse_args<I, T>(args: I, env_seed: Option<&str>) -> Result<Option<RunConfig>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(None);
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let file = match sub.get_one::<String>("config") {
        Some(path) => Some(ConfigFile::load(path.as_ref())?),
        None => None,
    };
    config::resolve(name, &overrides(name, sub), file.as_ref(), env_seed).map(Some)
}

pub fn execute(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut table = commands::run(cfg)?;
    table.command = cfg.command.clone();
    table.config = cfg.echo();
    Ok(table)
}

pub fn render(cfg: &RunConfig, table: &Table) -> String {
    match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

/// Runs one configuration and writes its table to `--out` or stdout.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let table = execute(cfg)?;
    let text = render(cfg, &table);
    match &cfg.out {
        Some(path) => write_atomic(path, &text)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// Full entry point; returns the process exit status.
pub fn main_with<I, T>(args: I, env_seed: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_args(args, env_seed).and_then(|cfg| match cfg {
        Some(cfg) => run(&cfg),
        None => Ok(()),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("thermofock: {e}");
            e.exit_code()
        }
    }
}
