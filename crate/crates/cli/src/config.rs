//! Config files and their merge with command-line flags.
//!
//! A config is one flat TOML or JSON table holding the keys of a single
//! subcommand. The manifest written by every run has the same shape plus the
//! `subcommand`, `artifact_version` and `outputs` keys, so a manifest can be
//! fed back with `--config`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// Keys written into manifests that carry no parameters.
const META_KEYS: [&str; 3] = ["subcommand", "artifact_version", "outputs"];

#[derive(Debug, Default)]
pub struct ConfigFile {
    pub path: Option<PathBuf>,
    pub subcommand: Option<String>,
    values: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        let value: Value = if is_toml {
            toml::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        } else {
            serde_json::from_str(&text)
                .or_else(|json_err| {
                    toml::from_str(&text).map_err(|_| json_err.to_string())
                })
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        };
        let Value::Object(mut values) = value else {
            return Err(CliError::Parse(format!("{}: top level must be a table", path.display())));
        };
        let subcommand = match values.remove("subcommand") {
            None => None,
            Some(Value::String(s)) => Some(s),
            Some(other) => return Err(CliError::config("subcommand", format!("expected a string, got {other}"))),
        };
        for key in &META_KEYS[1..] {
            values.remove(*key);
        }
        Ok(Self { path: Some(path.to_path_buf()), subcommand, values })
    }

    /// Config values overlaid with every flag given on the command line.
    pub fn merge<T: Serialize + DeserializeOwned>(&self, flags: &T, subcommand: &str) -> Result<T> {
        if let Some(s) = &self.subcommand {
            if s != subcommand {
                return Err(CliError::config(
                    "subcommand",
                    format!("config is for `{s}` but `{subcommand}` was requested"),
                ));
            }
        }
        let mut merged = self.values.clone();
        let Value::Object(given) = serde_json::to_value(flags).expect("flag structs serialize") else {
            unreachable!("flag structs are tables");
        };
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
        serde_path_to_error::deserialize(Value::Object(merged)).map_err(|e| {
            let key = e.path().to_string();
            if key == "." {
                CliError::Parse(e.into_inner().to_string())
            } else {
                CliError::config(key, e.into_inner().to_string())
            }
        })
    }
}

/// Manifest echoing the resolved parameters of one run; unset optional keys
/// are left out.
pub fn manifest<T: Serialize>(subcommand: &str, resolved: &T, outputs: &[String]) -> Value {
    let Value::Object(mut map) = serde_json::to_value(resolved).expect("resolved configs serialize") else {
        unreachable!("resolved configs are tables");
    };
    map.retain(|_, v| !v.is_null());
    map.insert("subcommand".into(), Value::String(subcommand.into()));
    map.insert("artifact_version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    map.insert("outputs".into(), Value::from(outputs.to_vec()));
    Value::Object(map)
}

/// One real or a list of reals; on the command line `0.1` or `0.1,0.2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Reals {
    One(f64),
    Many(Vec<f64>),
}

impl Reals {
    /// Expands to `n` values, repeating a single entry.
    pub fn expand(&self, n: usize, key: &str) -> Result<Vec<f64>> {
        match self {
            Reals::One(x) => Ok(vec![*x; n]),
            Reals::Many(v) if v.len() == 1 => Ok(vec![v[0]; n]),
            Reals::Many(v) if v.len() == n => Ok(v.clone()),
            Reals::Many(v) => Err(CliError::config(key, format!("expected 1 or {n} values, got {}", v.len()))),
        }
    }
}

impl FromStr for Reals {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let values = parse_list(s)?;
        Ok(if values.len() == 1 { Reals::One(values[0]) } else { Reals::Many(values) })
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

/// A grid given as `start:stop:step` (inclusive) or as an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Range(String),
    List(Vec<f64>),
}

impl Grid {
    pub fn points(&self, key: &str) -> Result<Vec<f64>> {
        let bad = |m: String| CliError::config(key, m);
        match self {
            Grid::List(v) if v.is_empty() => Err(bad("empty grid".into())),
            Grid::List(v) => Ok(v.clone()),
            Grid::Range(s) if !s.contains(':') => parse_list(s).map_err(bad),
            Grid::Range(s) => {
                let parts: Vec<f64> = s
                    .split(':')
                    .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(bad)?;
                let [start, stop, step] = parts[..] else {
                    return Err(bad(format!("expected start:stop:step, got `{s}`")));
                };
                if !(step > 0.0) || stop < start {
                    return Err(bad(format!("empty or unbounded range `{s}`")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                // Rounded to 12 decimals so 0.1 + 2 * 0.1 prints as 0.3.
                Ok((0..count)
                    .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
                    .collect())
            }
        }
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(Grid::Range(s.to_string()))
    }
}

/// Initial state: a basis index or explicit `[re, im]` amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Basis(usize),
    Amplitudes(Vec<[f64; 2]>),
}

impl FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Ok(k) = s.trim().parse::<usize>() {
            return Ok(InitialState::Basis(k));
        }
        Ok(InitialState::Amplitudes(parse_list(s)?.into_iter().map(|x| [x, 0.0]).collect()))
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Basis(k) => write!(f, "|{k}>"),
            InitialState::Amplitudes(a) => write!(f, "{a:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_grid_is_inclusive_and_clean() {
        let g = Grid::Range("0:0.3:0.1".into()).points("f_grid").unwrap();
        assert_eq!(g, vec![0.0, 0.1, 0.2, 0.3]);
        let g = Grid::Range("0:0.3:0.01".into()).points("f_grid").unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!(g[7], 0.07);
    }

    #[test]
    fn bad_grids_name_the_key() {
        let err = Grid::Range("0:1".into()).points("f_grid").unwrap_err();
        assert!(err.to_string().contains("f_grid"));
        assert!(Grid::Range("1:0:0.1".into()).points("f_grid").is_err());
        assert!(Grid::List(vec![]).points("f_grid").is_err());
    }

    #[test]
    fn reals_expand() {
        assert_eq!("0.5".parse::<Reals>().unwrap().expand(3, "f").unwrap(), vec![0.5; 3]);
        assert_eq!("1,2".parse::<Reals>().unwrap().expand(2, "f").unwrap(), vec![1.0, 2.0]);
        assert!("1,2".parse::<Reals>().unwrap().expand(3, "f").is_err());
    }
}
