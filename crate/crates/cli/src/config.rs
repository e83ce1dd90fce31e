//! Parameter tables, config files and precedence resolution.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const SEED_ENV: &str = "THERMOFOCK_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Text,
}

/// One subcommand parameter. Flags use the name with `_` replaced by `-`;
/// config files use the name as written.
#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

const fn p(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Param {
    Param { name, kind, default, help }
}

use Kind::{Float, Int, Text};

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub params: &'static [Param],
}

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "fock",
        about: "Fock-space orthonormality, ladder commutator, energy levels and reproducing kernel",
        params: &[
            p("nmax", Int, "12", "largest occupation number checked (at most 12)"),
            p("hbar", Float, "1", "Planck constant over 2π"),
            p("omega", Float, "1", "oscillator frequency for the energy levels"),
        ],
    },
    CommandSpec {
        name: "sphere",
        about: "Gibbs normalization, mean energy and sphere-to-plane pushforward",
        params: &[
            p("beta", Float, "1", "inverse temperature"),
            p("omega", Float, "1", "oscillator frequency"),
            p("mass", Float, "1", "oscillator mass"),
            p("radius", Float, "1", "sphere radius for the sin² map"),
            p("samples", Int, "100000", "Monte Carlo and pushforward sample count"),
        ],
    },
    CommandSpec {
        name: "spectrum",
        about: "Planck, Wien and Rayleigh–Jeans spectral densities against x = hν/kT",
        params: &[
            p("tmin", Float, "0.01", "smallest x = hν/kT"),
            p("tmax", Float, "10", "largest x = hν/kT"),
            p("points", Int, "50", "number of log-spaced points"),
        ],
    },
    CommandSpec {
        name: "chain",
        about: "Harmonic chain experiments",
        params: &[
            p("experiment", Text, "dispersion", "dispersion | equipartition | continuum | nonrel | energy"),
            p("sites", Int, "64", "number of sites"),
            p("spacing", Float, "0.5", "lattice spacing a"),
            p("mass", Float, "1", "on-site mass m"),
            p("gamma", Float, "1.3", "nearest-neighbour coupling γ"),
            p("beta", Float, "1", "inverse temperature for thermal samples"),
            p("dt", Float, "0", "leapfrog step; 0 selects the chain's default step"),
            p("steps", Int, "2000", "leapfrog steps"),
            p("samples", Int, "20000", "thermal samples"),
            p("window", Float, "1", "wavenumber window for the continuum comparison"),
            p("t", Float, "1", "final time for the nonrelativistic comparison"),
            p("packet_mass", Float, "100", "mass for the nonrelativistic comparison"),
        ],
    },
    CommandSpec {
        name: "charfn",
        about: "Characteristic function of |ψ|² directly and by amplitude autocorrelation",
        params: &[
            p("state", Text, "gaussian", "gaussian | hermite"),
            p("n", Int, "1", "Hermite function index"),
            p("sigma", Float, "1", "Gaussian width"),
            p("center", Float, "0", "packet centre"),
            p("k0", Float, "0", "carrier wavenumber"),
            p("half_width", Float, "20", "position grid half-width"),
            p("points", Int, "1024", "position grid points"),
        ],
    },
    CommandSpec {
        name: "states",
        about: "Uncertainty products, exotic and two-particle states, singlet marginals",
        params: &[
            p("experiment", Text, "uncertainty", "uncertainty | exotic | singlet | circle"),
            p("nmax", Int, "6", "largest Hermite index for uncertainty"),
            p("mmax", Int, "3", "largest |m| for the circle"),
            p("half_width", Float, "20", "position grid half-width"),
            p("points", Int, "1024", "position grid points"),
        ],
    },
    CommandSpec {
        name: "measure",
        about: "Object-apparatus entanglement, decoherence and sampled outcome frequencies",
        params: &[
            p("amps", Text, "0.6,0.8", "object amplitudes, comma separated"),
            p("samples", Int, "100000", "sampled outcomes"),
            p("sectors", Text, "", "apparatus sectors such as 0,1|2; empty means one per state"),
        ],
    },
    CommandSpec {
        name: "toy",
        about: "Two-site quantum walk against the best-fitting Markov chain",
        params: &[
            p("steps", Int, "2", "number of steps"),
            p("matrix", Text, "hadamard", "hadamard | custom a,b,c,d (real unitary entries, row major)"),
        ],
    },
];

pub fn command_spec(name: &str) -> Option<&'static CommandSpec> {
    COMMANDS.iter().find(|c| c.name == name)
}

pub fn flag_name(param: &str) -> String {
    param.replace('_', "-")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Value {
    fn parse(kind: Kind, s: &str) -> Option<Value> {
        match kind {
            Kind::Float => s.trim().parse::<f64>().ok().map(Value::Float),
            Kind::Int => s.trim().parse::<i64>().ok().map(Value::Int),
            Kind::Text => Some(Value::Text(s.to_string())),
        }
    }

    fn from_toml(kind: Kind, v: &toml::Value) -> Option<Value> {
        match (kind, v) {
            (Kind::Float, toml::Value::Float(x)) => Some(Value::Float(*x)),
            (Kind::Float, toml::Value::Integer(i)) => Some(Value::Float(*i as f64)),
            (Kind::Int, toml::Value::Integer(i)) => Some(Value::Int(*i)),
            (Kind::Text, toml::Value::String(s)) => Some(Value::Text(s.clone())),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Value::Float(x) => format!("{x:?}"),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => format!("{s:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn float(&self, key: &str) -> f64 {
        match self.params.get(key) {
            Some(Value::Float(x)) => *x,
            other => panic!("parameter {key} is not a float: {other:?}"),
        }
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.params.get(key) {
            Some(Value::Int(i)) => *i,
            other => panic!("parameter {key} is not an integer: {other:?}"),
        }
    }

    /// Integer parameter that must be at least `min`.
    pub fn count(&self, key: &str, min: usize) -> Result<usize, CliError> {
        let i = self.int(key);
        if i < min as i64 {
            return Err(CliError::Usage(format!("--{} must be at least {min}, got {i}", flag_name(key))));
        }
        Ok(i as usize)
    }

    pub fn text(&self, key: &str) -> &str {
        match self.params.get(key) {
            Some(Value::Text(s)) => s,
            other => panic!("parameter {key} is not text: {other:?}"),
        }
    }

    /// `key = value` lines in parameter order, then seed and format.
    pub fn echo(&self) -> Vec<(String, String)> {
        let spec = command_spec(&self.command).expect("validated command");
        let mut out: Vec<(String, String)> =
            spec.params.iter().map(|p| (p.name.to_string(), self.params[p.name].render())).collect();
        out.push(("seed".into(), self.seed.to_string()));
        out.push((
            "format".into(),
            match self.format {
                Format::Csv => "csv".into(),
                Format::Json => "json".into(),
            },
        ));
        out
    }
}

/// A flat TOML table read from `--config`, with the line of each key.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    pub path: PathBuf,
    pub entries: BTreeMap<String, (toml::Value, usize)>,
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn line_of_key(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            let rest = l.strip_prefix(key).or_else(|| l.strip_prefix(&format!("\"{key}\"")));
            rest.is_some_and(|r| r.trim_start().starts_with('='))
        })
        .map_or(1, |i| i + 1)
}

impl ConfigFile {
    pub fn parse(path: &Path, text: &str) -> Result<ConfigFile, CliError> {
        let err = |line: Option<usize>, message: String| CliError::Config { path: path.to_path_buf(), line, message };
        let table: toml::Table = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of_offset(text, s.start));
            err(line, e.message().trim().to_string())
        })?;
        let mut entries = BTreeMap::new();
        for (k, v) in table {
            let line = line_of_key(text, &k);
            if v.is_table() {
                return Err(err(Some(line), format!("sections are not supported (`{k}`); use flat keys")));
            }
            entries.insert(k, (v, line));
        }
        Ok(ConfigFile { path: path.to_path_buf(), entries })
    }

    pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            line: None,
            message: e.to_string(),
        })?;
        Self::parse(path, &text)
    }

    fn error(&self, line: usize, message: String) -> CliError {
        CliError::Config { path: self.path.clone(), line: Some(line), message }
    }
}

/// Values given on the command line, keyed by parameter name.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub params: BTreeMap<String, String>,
    pub seed: Option<String>,
    pub out: Option<String>,
    pub format: Option<String>,
}

const COMMON_KEYS: &[&str] = &["seed", "out", "format"];

/// Flags win over the config file, which wins over defaults. The seed falls
/// back to `THERMOFOCK_SEED` before its default.
pub fn resolve(
    command: &str,
    flags: &Overrides,
    file: Option<&ConfigFile>,
    env_seed: Option<&str>,
) -> Result<RunConfig, CliError> {
    let spec = command_spec(command).ok_or_else(|| CliError::Usage(format!("unknown subcommand `{command}`")))?;
    let empty = ConfigFile::default();
    let file = file.unwrap_or(&empty);
    for (key, (_, line)) in &file.entries {
        if !COMMON_KEYS.contains(&key.as_str()) && !spec.params.iter().any(|p| p.name == key) {
            return Err(file.error(*line, format!("unknown key `{key}` for `{command}`")));
        }
    }
    let mut params = BTreeMap::new();
    for p in spec.params {
        let value = if let Some(s) = flags.params.get(p.name) {
            Value::parse(p.kind, s)
                .ok_or_else(|| CliError::Usage(format!("invalid value `{s}` for --{}", flag_name(p.name))))?
        } else if let Some((v, line)) = file.entries.get(p.name) {
            Value::from_toml(p.kind, v)
                .ok_or_else(|| file.error(*line, format!("`{}` expects {:?}, got `{v}`", p.name, p.kind)))?
        } else {
            Value::parse(p.kind, p.default).expect("defaults parse")
        };
        params.insert(p.name.to_string(), value);
    }
    let parse_seed = |s: &str, origin: &str| {
        s.trim().parse::<u64>().map_err(|_| CliError::Usage(format!("invalid seed `{s}` from {origin}")))
    };
    let seed = if let Some(s) = &flags.seed {
        parse_seed(s, "--seed")?
    } else if let Some((v, line)) = file.entries.get("seed") {
        match v.as_integer() {
            Some(i) if i >= 0 => i as u64,
            _ => return Err(file.error(*line, format!("`seed` expects a non-negative integer, got `{v}`"))),
        }
    } else if let Some(s) = env_seed {
        parse_seed(s, SEED_ENV)?
    } else {
        DEFAULT_SEED
    };
    let file_str = |key: &str| -> Result<Option<String>, CliError> {
        match file.entries.get(key) {
            None => Ok(None),
            Some((toml::Value::String(s), _)) => Ok(Some(s.clone())),
            Some((v, line)) => Err(file.error(*line, format!("`{key}` expects a string, got `{v}`"))),
        }
    };
    let format_str = match &flags.format {
        Some(f) => Some(f.clone()),
        None => file_str("format")?,
    };
    let format = match format_str {
        None => Format::Csv,
        Some(f) => Format::parse(&f).ok_or_else(|| CliError::Usage(format!("unknown format `{f}`; use csv or json")))?,
    };
    let out = match &flags.out {
        Some(o) => Some(o.clone()),
        None => file_str("out")?,
    }
    .map(PathBuf::from);
    Ok(RunConfig { command: command.to_string(), params, seed, out, format })
}
