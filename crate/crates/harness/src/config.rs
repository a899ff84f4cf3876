//! Experiment configuration files.
//!
//! TOML with a flat top level and three optional sections:
//!
//! ```toml
//! kind = "run"
//! n = 64                     # or a list, n = [16, 32, 64]
//! seeds = [1]
//! output_dir = "out"
//! formats = ["csv", "jsonl"]
//!
//! [initial_data]
//! generator = "rigid_rotation"
//! omega = 1.0
//!
//! [integrator]
//! cfl = 0.5
//! t_end = 1.0
//!
//! [suite]
//! samples = 10000
//! r = [0.5, 1.0, 1.5, 2.0]
//! ```
//!
//! Every key is checked; anything unrecognised is an error naming the key.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

use whipchain::dynamics::initial::InitialData;
use whipchain::dynamics::IntegratorConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file {0} not found")]
    Missing(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config is not valid TOML: {0}")]
    Syntax(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown generator `{0}` in `initial_data.generator`")]
    UnknownGenerator(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Run,
    Convergence,
    InequalitySuite,
    GreenCertify,
    BlowupHunt,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Run => "run",
            Kind::Convergence => "convergence",
            Kind::InequalitySuite => "inequality_suite",
            Kind::GreenCertify => "green_certify",
            Kind::BlowupHunt => "blowup_hunt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

/// Sample counts and parameters for the random batteries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub samples: usize,
    /// Endpoint weight exponents for the inequality suite.
    pub r: Vec<f64>,
    /// Largest turning angle per link for random chains.
    pub max_turn: f64,
    /// Only keep chains whose link cosines are all positive.
    pub require_positive_alpha: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            r: vec![0.5, 1.0, 1.5, 2.0],
            max_turn: 1.2,
            require_positive_alpha: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub initial_data: InitialData,
    pub n: Vec<usize>,
    pub integrator: IntegratorConfig,
    pub suite: SuiteConfig,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(i64),
    Many(Vec<i64>),
}

const TOP_KEYS: [&str; 8] = ["kind", "n", "seeds", "output_dir", "formats", "initial_data", "integrator", "suite"];

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let bytes = std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ConfigError::Missing(path.to_path_buf()),
        _ => ConfigError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    let text = String::from_utf8(bytes).map_err(|_| ConfigError::Syntax("file is not UTF-8".into()))?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_string()))?;
    if let Some(key) = table.keys().find(|k| !TOP_KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey(key.clone()));
    }
    for key in ["kind", "n"] {
        if !table.contains_key(key) {
            return Err(ConfigError::MissingKey(key.into()));
        }
    }
    let mut table = table;
    let kind: Kind = field(&mut table, "kind")?.expect("checked above");
    let n = match field::<OneOrMany>(&mut table, "n")?.expect("checked above") {
        OneOrMany::One(n) => vec![n],
        OneOrMany::Many(v) => v,
    };
    if n.is_empty() {
        return Err(invalid("n", "needs at least one resolution"));
    }
    if let Some(bad) = n.iter().find(|&&n| n < 2) {
        return Err(invalid("n", &format!("{bad} is below the minimum of 2")));
    }
    let n: Vec<usize> = n.into_iter().map(|n| n as usize).collect();
    let seeds: Option<Vec<u64>> = field(&mut table, "seeds")?;
    let output_dir: Option<PathBuf> = field(&mut table, "output_dir")?;
    let formats: Option<Vec<Format>> = field(&mut table, "formats")?;
    let initial_table: Option<Table> = field(&mut table, "initial_data")?;
    let integrator_table: Option<Table> = field(&mut table, "integrator")?;
    let suite_table: Option<Table> = field(&mut table, "suite")?;

    let initial_data = parse_initial_data(initial_table, kind)?;
    let integrator: IntegratorConfig = overlay(&IntegratorConfig::default(), integrator_table, "integrator")?;
    integrator.validate().map_err(|e| invalid("integrator", &e.to_string()))?;
    let suite: SuiteConfig = overlay(&SuiteConfig::default(), suite_table, "suite")?;
    if suite.samples == 0 {
        return Err(invalid("suite.samples", "must be positive"));
    }

    let seeds = seeds.unwrap_or_else(|| vec![0]);
    if seeds.is_empty() {
        return Err(invalid("seeds", "needs at least one seed"));
    }
    let formats = formats.unwrap_or_else(|| vec![Format::Csv, Format::Jsonl]);
    if formats.is_empty() {
        return Err(invalid("formats", "needs at least one of csv, jsonl"));
    }
    Ok(ExperimentConfig {
        kind,
        initial_data,
        n,
        integrator,
        suite,
        seeds,
        output_dir: output_dir.unwrap_or_else(|| PathBuf::from("out")),
        formats,
    })
}

fn parse_initial_data(table: Option<Table>, kind: Kind) -> Result<InitialData, ConfigError> {
    let mut table = table.unwrap_or_default();
    let name = match table.remove("generator") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(invalid("initial_data.generator", "must be a string")),
        None => {
            let fallback = match kind {
                Kind::BlowupHunt => "near_loop",
                _ => "rigid_rotation",
            };
            fallback.to_string()
        }
    };
    let defaults = InitialData::by_name(&name).ok_or_else(|| ConfigError::UnknownGenerator(name.clone()))?;
    overlay(&defaults, Some(table), "initial_data")
}

/// Replace fields of `defaults` with the keys in `user`, rejecting keys `defaults` lacks.
fn overlay<T: Serialize + DeserializeOwned>(defaults: &T, user: Option<Table>, section: &str) -> Result<T, ConfigError> {
    let Value::Table(mut base) = Value::try_from(defaults).expect("defaults serialize to a table") else {
        unreachable!("config sections are structs");
    };
    for (key, value) in user.unwrap_or_default() {
        match base.get(&key) {
            Some(old) if old.same_type(&value) => {}
            Some(Value::Float(_)) if value.is_integer() => {}
            Some(_) => {
                return Err(invalid(&format!("{section}.{key}"), &format!("expected {}", base[&key].type_str())));
            }
            None => return Err(ConfigError::UnknownKey(format!("{section}.{key}"))),
        }
        let value = match (&base[&key], value) {
            (Value::Float(_), Value::Integer(i)) => Value::Float(i as f64),
            (_, v) => v,
        };
        base.insert(key, value);
    }
    Value::Table(base)
        .try_into()
        .map_err(|e: toml::de::Error| invalid_from_toml(section, e))
}

fn field<T: DeserializeOwned>(table: &mut Table, key: &str) -> Result<Option<T>, ConfigError> {
    table
        .remove(key)
        .map(|v| v.try_into().map_err(|e: toml::de::Error| invalid_from_toml(key, e)))
        .transpose()
}

fn invalid(key: &str, reason: &str) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

fn invalid_from_toml(section: &str, e: toml::de::Error) -> ConfigError {
    invalid(section, e.message().trim())
}
