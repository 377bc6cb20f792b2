//! Run configuration: defaults, then the config file, then flags.
//!
//! The file format is one `key = value` per line with `#` comments. Keys
//! mirror the long flags; list-valued keys (`states`, `alphas`) take
//! whitespace-separated items.

use std::fmt;
use std::str::FromStr;

use pslet_core::{PotentialModel, StateSpec, DEFAULT_MAX_ORDER};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Compute,
    Table,
    Converge,
    Oracle,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Md,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{}`{field}`: {message}", line.map(|l| format!("line {l}, ")).unwrap_or_default())]
    Field {
        line: Option<usize>,
        field: String,
        message: String,
    },
}

impl ConfigError {
    fn field(line: Option<usize>, field: &str, message: impl fmt::Display) -> Self {
        ConfigError::Field {
            line,
            field: field.to_string(),
            message: message.to_string(),
        }
    }
}

/// Settings as read from one source; `None` means "not given here".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PartialConfig {
    pub mode: Option<Mode>,
    pub potential: Option<String>,
    pub states: Option<Vec<StateSpec>>,
    pub alphas: Option<Vec<f64>>,
    pub order: Option<usize>,
    pub pade: Option<(usize, usize)>,
    pub precision: Option<u32>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub table: Option<u8>,
}

impl PartialConfig {
    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            mode: over.mode.or(self.mode),
            potential: over.potential.or(self.potential),
            states: over.states.or(self.states),
            alphas: over.alphas.or(self.alphas),
            order: over.order.or(self.order),
            pade: over.pade.or(self.pade),
            precision: over.precision.or(self.precision),
            format: over.format.or(self.format),
            jobs: over.jobs.or(self.jobs),
            table: over.table.or(self.table),
        }
    }
}

pub fn parse_config(text: &str) -> Result<PartialConfig, ConfigError> {
    let mut cfg = PartialConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, found {content:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let at = Some(line);
        match key {
            "mode" => cfg.mode = Some(parse_enum(value, key, at)?),
            "potential" => cfg.potential = Some(parse_potential(value, at)?.0),
            "state" | "states" => {
                cfg.states = Some(
                    value
                        .split_whitespace()
                        .map(|s| parse_state(s).map_err(|m| ConfigError::field(at, key, m)))
                        .collect::<Result<_, _>>()?,
                )
            }
            "alpha" | "alphas" => {
                cfg.alphas = Some(
                    value
                        .split(|c: char| c.is_whitespace() || c == ',')
                        .filter(|t| !t.is_empty())
                        .map(|t| parse_alpha(t).map_err(|m| ConfigError::field(at, key, m)))
                        .collect::<Result<_, _>>()?,
                )
            }
            "order" => cfg.order = Some(parse_num(value, key, at)?),
            "pade" => cfg.pade = Some(parse_pade(value).map_err(|m| ConfigError::field(at, key, m))?),
            "precision" => cfg.precision = Some(parse_num(value, key, at)?),
            "format" => cfg.format = Some(parse_enum(value, key, at)?),
            "jobs" => cfg.jobs = Some(parse_num(value, key, at)?),
            "table" => cfg.table = Some(parse_num(value, key, at)?),
            _ => return Err(ConfigError::field(at, key, "unknown key")),
        }
    }
    Ok(cfg)
}

fn parse_enum<T: clap::ValueEnum>(value: &str, key: &str, line: Option<usize>) -> Result<T, ConfigError> {
    T::from_str(value, true).map_err(|_| ConfigError::field(line, key, format!("unrecognised value {value:?}")))
}

fn parse_num<T: FromStr>(value: &str, key: &str, line: Option<usize>) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| ConfigError::field(line, key, format!("{value:?}: {e}")))
}

/// Validates a potential spec and returns it normalised with its alpha.
pub fn parse_potential(value: &str, line: Option<usize>) -> Result<(String, PotentialModel), ConfigError> {
    let model: PotentialModel = value.parse().map_err(|e| ConfigError::field(line, "potential", e))?;
    Ok((value.trim().to_string(), model))
}

pub fn parse_state(s: &str) -> Result<StateSpec, String> {
    s.parse().map_err(|e: pslet_core::PsletError| e.to_string())
}

pub fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if !(a >= 0.0 && a.is_finite()) {
        return Err(format!("alpha must be finite and non-negative, got {s}"));
    }
    Ok(a)
}

pub fn parse_pade(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s.split_once(',').ok_or_else(|| format!("{s:?}: expected N,M"))?;
    let n = n.trim().parse().map_err(|_| format!("{s:?}: N is not an integer"))?;
    let m = m.trim().parse().map_err(|_| format!("{s:?}: M is not an integer"))?;
    Ok((n, m))
}

/// A complete, validated configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub potential: String,
    #[serde(with = "state_list")]
    pub states: Vec<StateSpec>,
    pub alphas: Vec<f64>,
    pub order: usize,
    pub pade: (usize, usize),
    pub precision: u32,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub table: Option<u8>,
}

mod state_list {
    use pslet_core::StateSpec;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(states: &[StateSpec], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(states.iter().map(|st| st.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<StateSpec>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

pub const DEFAULT_PRECISION: u32 = 40;
pub const MAX_ORDER_CAP: usize = 16;

impl RunConfig {
    pub fn resolve(p: PartialConfig) -> Result<RunConfig, ConfigError> {
        let mode = p.mode.ok_or_else(|| ConfigError::field(None, "mode", "no mode given"))?;
        let order = p.order.unwrap_or(DEFAULT_MAX_ORDER);
        if order > MAX_ORDER_CAP {
            return Err(ConfigError::field(None, "order", format!("{order} exceeds the cap {MAX_ORDER_CAP}")));
        }
        let pade = p.pade.unwrap_or((4, 4));
        if pade.0 + pade.1 > order {
            return Err(ConfigError::field(
                None,
                "pade",
                format!("[{},{}] needs order >= {}", pade.0, pade.1, pade.0 + pade.1),
            ));
        }
        let precision = p.precision.unwrap_or(DEFAULT_PRECISION);
        if !(16..=1000).contains(&precision) {
            return Err(ConfigError::field(None, "precision", "must lie in 16..=1000 digits"));
        }
        let format = p.format.unwrap_or_default();

        if mode == Mode::Table {
            let table = p.table.ok_or_else(|| ConfigError::field(None, "table", "table mode needs 1, 2 or 3"))?;
            if !(1..=3).contains(&table) {
                return Err(ConfigError::field(None, "table", format!("{table} is not 1, 2 or 3")));
            }
            return Ok(RunConfig {
                mode,
                potential: if table == 3 { "laser" } else { "cutoff" }.into(),
                states: Vec::new(),
                alphas: Vec::new(),
                order,
                pade,
                precision,
                format,
                table: Some(table),
            });
        }

        let spec = p.potential.ok_or_else(|| ConfigError::field(None, "potential", "no potential given"))?;
        let (_, model) = parse_potential(&spec, None)?;
        let mut states = p.states.unwrap_or_default();
        if states.is_empty() {
            return Err(ConfigError::field(None, "state", "no states given"));
        }
        states.sort();
        states.dedup();
        let mut alphas = p.alphas.unwrap_or_else(|| vec![model.alpha()]);
        if matches!(model.kind(), pslet_core::PotentialKind::Coulomb | pslet_core::PotentialKind::Harmonic) {
            alphas = vec![0.0];
        }
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();
        Ok(RunConfig {
            mode,
            potential: spec,
            states,
            alphas,
            order,
            pade,
            precision,
            format,
            table: None,
        })
    }

    /// One model per alpha, in ascending alpha.
    pub fn models(&self) -> Result<Vec<PotentialModel>, ConfigError> {
        let (_, base) = parse_potential(&self.potential, None)?;
        self.alphas
            .iter()
            .map(|&a| base.with_alpha(a).map_err(|e| ConfigError::field(None, "alpha", e)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = parse_config(
            "# sample\nmode = compute\npotential = cutoff:1.0\nstates = 2p 1s 0,1\nalphas = 10, 0.1\npade = 3,3 # trailing\n",
        )
        .unwrap();
        let flags = PartialConfig {
            alphas: Some(vec![50.0]),
            ..PartialConfig::default()
        };
        let cfg = RunConfig::resolve(file.overlay(flags)).unwrap();
        assert_eq!(cfg.alphas, vec![50.0]);
        assert_eq!(cfg.pade, (3, 3));
        assert_eq!(cfg.states, vec![StateSpec::new(0, 0), StateSpec::new(0, 1), StateSpec::new(1, 0)]);
    }

    #[test]
    fn errors_carry_line_and_field() {
        let err = parse_config("mode = compute\n\norder = eight\n").unwrap_err();
        assert!(err.to_string().starts_with("line 3, `order`"), "{err}");
        let err = parse_config("mode compute\n").unwrap_err();
        assert_eq!(err, ConfigError::Syntax { line: 1, message: "expected `key = value`, found \"mode compute\"".into() });
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("alphas = -1").is_err());
    }

    #[test]
    fn alpha_defaults_to_the_potential() {
        let p = PartialConfig {
            mode: Some(Mode::Compute),
            potential: Some("laser:200".into()),
            states: Some(vec![StateSpec::new(2, 1)]),
            ..PartialConfig::default()
        };
        assert_eq!(RunConfig::resolve(p).unwrap().alphas, vec![200.0]);
    }

    #[test]
    fn pade_must_fit_the_order() {
        let p = PartialConfig {
            mode: Some(Mode::Compute),
            potential: Some("coulomb".into()),
            states: Some(vec![StateSpec::new(0, 0)]),
            order: Some(6),
            ..PartialConfig::default()
        };
        assert!(RunConfig::resolve(p).is_err());
    }
}
