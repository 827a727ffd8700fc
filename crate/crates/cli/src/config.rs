//! Run settings: command-line flags over a config file over built-in defaults.
//!
//! A config file is either `key = value` lines (`#` starts a comment) or a
//! JSON sidecar written by an earlier run, whose `config` object is used.
//! Keys are the long flag names with `-` or `_` accepted interchangeably.

use std::collections::BTreeMap;
use std::fmt::{self, Display};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nlrabi::spectra::{ModelParams, System};
use nlrabi::{Flavor, Gauge, Nonlinearity};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "NLRABI_OUT_DIR";

#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    source: Option<PathBuf>,
}

fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut s = if text.trim_start().starts_with('{') {
            Self::from_json(&text)?
        } else {
            Self::from_key_values(&text)?
        };
        s.source = Some(path.to_path_buf());
        Ok(s)
    }

    pub fn from_key_values(text: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("config line {}: expected key = value", i + 1)))?;
            values.insert(normalize_key(k), v.trim().to_string());
        }
        Ok(Self { values, source: None })
    }

    pub fn from_json(text: &str) -> Result<Self, Failure> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Failure::usage(format!("config is not valid JSON: {e}")))?;
        let obj = v.get("config").unwrap_or(&v);
        let obj = obj
            .as_object()
            .ok_or_else(|| Failure::usage("JSON config must be an object"))?;
        let mut values = BTreeMap::new();
        for (k, v) in obj {
            let s = match v {
                serde_json::Value::Null => continue,
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            values.insert(normalize_key(k), s);
        }
        Ok(Self { values, source: None })
    }

    fn origin(&self) -> String {
        self.source
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "config".into())
    }

    /// Fails on keys the command does not understand.
    pub fn expect_keys(&self, command: &str, known: &[&str]) -> Result<(), Failure> {
        for k in self.values.keys() {
            if k != "command" && k != "out" && !known.contains(&k.as_str()) {
                return Err(Failure::usage(format!("{}: unknown key `{k}` for `{command}`", self.origin())));
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn pick_opt<T>(&self, cli: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| Failure::usage(format!("{}: bad value `{raw}` for `{key}`: {e}", self.origin()))),
        }
    }

    pub fn pick<T>(&self, cli: Option<T>, key: &str, default: T) -> Result<T, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick_opt(cli, key)?.unwrap_or(default))
    }

    /// Output directory: flag or environment, then config, then `.`.
    pub fn out_dir(&self, cli: Option<PathBuf>) -> PathBuf {
        cli.or_else(|| self.raw("out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// `csv` writes a CSV plus a JSON sidecar; `json` writes the JSON alone with the data inside.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// Model selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Kerr resonator alone.
    Kerr,
    /// Resonator alone with `--variant`.
    Cavity,
    CorrectedDipole,
    NaiveDipole,
    Coulomb,
    NaiveCoulomb,
    RabiDipole,
    RabiCoulomb,
}

impl ModelKind {
    pub const ALL: [ModelKind; 8] = [
        ModelKind::Kerr,
        ModelKind::Cavity,
        ModelKind::CorrectedDipole,
        ModelKind::NaiveDipole,
        ModelKind::Coulomb,
        ModelKind::NaiveCoulomb,
        ModelKind::RabiDipole,
        ModelKind::RabiCoulomb,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Kerr => "kerr",
            ModelKind::Cavity => "cavity",
            ModelKind::CorrectedDipole => "corrected-dipole",
            ModelKind::NaiveDipole => "naive-dipole",
            ModelKind::Coulomb => "coulomb",
            ModelKind::NaiveCoulomb => "naive-coulomb",
            ModelKind::RabiDipole => "rabi-dipole",
            ModelKind::RabiCoulomb => "rabi-coulomb",
        }
    }

    fn shape(&self) -> (System, Gauge, Flavor) {
        match self {
            ModelKind::Kerr | ModelKind::Cavity => (System::Cavity, Gauge::Dipole, Flavor::Corrected),
            ModelKind::CorrectedDipole => (System::Rabi, Gauge::Dipole, Flavor::Corrected),
            ModelKind::NaiveDipole => (System::Rabi, Gauge::Dipole, Flavor::Naive),
            ModelKind::Coulomb => (System::Rabi, Gauge::Coulomb, Flavor::Corrected),
            ModelKind::NaiveCoulomb => (System::Rabi, Gauge::Coulomb, Flavor::Naive),
            ModelKind::RabiDipole => (System::Rabi, Gauge::Dipole, Flavor::Linear),
            ModelKind::RabiCoulomb => (System::Rabi, Gauge::Coulomb, Flavor::Linear),
        }
    }
}

impl Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        Self::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|m| m.name()).collect();
            format!("unknown model `{s}` (expected one of {})", names.join(", "))
        })
    }
}

/// Physics part of a resolved run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub model: ModelKind,
    pub variant: Nonlinearity,
    #[serde(rename = "J")]
    pub j: f64,
    pub eta: f64,
    pub omega_c: f64,
    pub omega_q: f64,
    pub renormalize: bool,
}

impl ModelConfig {
    pub const KEYS: [&'static str; 7] = ["model", "variant", "J", "eta", "omega_c", "omega_q", "renormalize"];

    pub fn params(&self) -> ModelParams<f64> {
        let (system, gauge, flavor) = self.model.shape();
        let variant = if self.model == ModelKind::Kerr {
            Nonlinearity::Kerr
        } else {
            self.variant
        };
        ModelParams {
            system,
            variant,
            gauge,
            flavor,
            omega_c: self.omega_c,
            omega_q: self.omega_q,
            j: self.j,
            eta: self.eta,
            renormalize: self.renormalize,
        }
    }
}

/// Cutoff, level count and drift tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericConfig {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    pub tolerance: f64,
}

impl NumericConfig {
    pub const KEYS: [&'static str; 3] = ["k", "cutoff", "tolerance"];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_parsing() {
        let s = Settings::from_key_values("# comment\nJ = 0.1\nomega-c=2 # trailing\n\n").unwrap();
        assert_eq!(s.raw("J"), Some("0.1"));
        assert_eq!(s.raw("omega_c"), Some("2"));
        assert_eq!(s.pick(None, "omega_c", 1.0).unwrap(), 2.0);
        assert_eq!(s.pick(Some(3.0), "omega_c", 1.0).unwrap(), 3.0);
        assert_eq!(s.pick(None, "eta", 0.5).unwrap(), 0.5);
        assert!(Settings::from_key_values("nonsense").is_err());
        assert!(s.pick::<f64>(None, "J", 0.0).is_ok());
        let bad = Settings::from_key_values("k = four").unwrap();
        assert!(bad.pick::<usize>(None, "k", 1).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let s = Settings::from_key_values("J = 0.1\nzeta = 2").unwrap();
        assert!(s.expect_keys("spectrum", &["J"]).is_err());
        assert!(s.expect_keys("spectrum", &["J", "zeta"]).is_ok());
    }

    #[test]
    fn json_sidecar_config() {
        let s = Settings::from_json(r#"{"schema_version": 1, "config": {"J": 0.1, "model": "kerr", "cutoff": null}}"#)
            .unwrap();
        assert_eq!(s.raw("J"), Some("0.1"));
        assert_eq!(s.raw("model"), Some("kerr"));
        assert_eq!(s.raw("cutoff"), None);
    }

    #[test]
    fn model_names_round_trip() {
        for m in ModelKind::ALL {
            assert_eq!(m.name().parse::<ModelKind>().unwrap(), m);
            assert_eq!(serde_json::to_value(m).unwrap(), m.name());
        }
        assert!("dipole".parse::<ModelKind>().is_err());
    }
}
