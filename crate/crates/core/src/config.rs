//! Flat `key = value` configuration with `[section]` headers.
//!
//! Example:
//!
//! ```text
//! [model]
//! ell = 3.141592653589793
//! delta = 0.6931471805599453
//! r0 = 2
//! s0 = 1
//! nu_sign = 1
//! eps = 0.25
//!
//! [truncation]
//! n_max = 8
//! l_max = 12
//! mu_max = 3
//!
//! [pde]
//! n_grid = 256
//! dt = 1e-3
//! t_end = 1.0
//! scheme = rk4
//! ic = default
//!
//! [verify]
//! seed = 7
//! tolerance_scale = 1.0
//! ```
//!
//! `#` and `;` start comments. Unknown sections or keys are errors (typos in
//! a config should fail loudly, not silently run defaults). The parser never
//! panics on malformed input.

use crate::fock::TruncationSpec;
use crate::params::{ModelParams, ParamError};
use crate::pde::Scheme;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {0}: missing ']' in section header")]
    BadSection(usize),
    #[error("line {0}: expected key = value")]
    BadLine(usize),
    #[error("line {0}: unknown section {1:?}")]
    UnknownSection(usize, String),
    #[error("line {0}: unknown key {1:?} in section {2:?}")]
    UnknownKey(usize, String, String),
    #[error("line {0}: invalid value {1:?} for {2}: {3}")]
    BadValue(usize, String, String, String),
    #[error("override {0:?} is not of the form section.key=value")]
    BadOverride(String),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Everything the CLI and the verify suites need, with defaults.
#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub ell: f64,
    pub delta: f64,
    pub r0: i64,
    pub s0: i64,
    pub nu_sign: i64,
    pub eps: f64,
    pub n_max: usize,
    pub l_max: usize,
    pub mu_max: i32,
    pub n_grid: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub ic: String,
    pub seed: u64,
    pub tolerance_scale: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            ell: std::f64::consts::PI,
            delta: std::f64::consts::LN_2,
            r0: 2,
            s0: 1,
            nu_sign: 1,
            eps: 0.25,
            n_max: 8,
            l_max: 12,
            mu_max: 3,
            n_grid: 256,
            dt: 1e-3,
            t_end: 1.0,
            scheme: Scheme::Rk4,
            ic: "default".to_string(),
            seed: 7,
            tolerance_scale: 1.0,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = match raw.find(['#', ';']) {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(ConfigError::BadSection(lineno));
                };
                section = name.trim().to_ascii_lowercase();
                if !matches!(section.as_str(), "model" | "truncation" | "pde" | "verify") {
                    return Err(ConfigError::UnknownSection(lineno, section));
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::BadLine(lineno));
            };
            cfg.set(&section, key.trim(), value.trim(), lineno)?;
        }
        let _ = cfg.model()?; // validate the parameter combination
        Ok(cfg)
    }

    /// Apply one `section.key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ConfigError> {
        let Some((path, value)) = spec.split_once('=') else {
            return Err(ConfigError::BadOverride(spec.to_string()));
        };
        let Some((section, key)) = path.trim().split_once('.') else {
            return Err(ConfigError::BadOverride(spec.to_string()));
        };
        self.set(
            &section.trim().to_ascii_lowercase(),
            key.trim(),
            value.trim(),
            0,
        )
    }

    fn set(&mut self, section: &str, key: &str, value: &str, lineno: usize) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(
            lineno: usize,
            key: &str,
            value: &str,
        ) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            value.parse::<T>().map_err(|e| {
                ConfigError::BadValue(lineno, value.to_string(), key.to_string(), e.to_string())
            })
        }
        match (section, key) {
            ("model", "ell") => self.ell = num(lineno, key, value)?,
            ("model", "delta") => self.delta = num(lineno, key, value)?,
            ("model", "r0") => self.r0 = num(lineno, key, value)?,
            ("model", "s0") => self.s0 = num(lineno, key, value)?,
            ("model", "nu_sign") => self.nu_sign = num(lineno, key, value)?,
            ("model", "eps") => self.eps = num(lineno, key, value)?,
            ("truncation", "n_max") => self.n_max = num(lineno, key, value)?,
            ("truncation", "l_max") => self.l_max = num(lineno, key, value)?,
            ("truncation", "mu_max") => self.mu_max = num(lineno, key, value)?,
            ("pde", "n_grid") => self.n_grid = num(lineno, key, value)?,
            ("pde", "dt") => self.dt = num(lineno, key, value)?,
            ("pde", "t_end") => self.t_end = num(lineno, key, value)?,
            ("pde", "scheme") => {
                self.scheme = value.parse().map_err(|e: String| {
                    ConfigError::BadValue(lineno, value.to_string(), key.to_string(), e)
                })?
            }
            ("pde", "ic") => self.ic = value.to_string(),
            ("verify", "seed") => self.seed = num(lineno, key, value)?,
            ("verify", "tolerance_scale") => self.tolerance_scale = num(lineno, key, value)?,
            _ => {
                return Err(ConfigError::UnknownKey(
                    lineno,
                    key.to_string(),
                    section.to_string(),
                ))
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<ModelParams, ConfigError> {
        Ok(ModelParams::new(
            self.ell,
            self.delta,
            self.r0,
            self.s0,
            self.nu_sign,
            self.eps,
        )?)
    }

    pub fn truncation(&self) -> TruncationSpec {
        TruncationSpec::new(self.n_max, self.l_max, self.mu_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_round_trip() {
        let text = "
# comment
[model]
ell = 3.141592653589793
delta = 0.9  ; inline comment
r0 = 3
s0 = 2
nu_sign = -1
eps = 0.5

[truncation]
n_max = 6
l_max = 9
mu_max = 2

[pde]
scheme = imex
dt = 5e-4

[verify]
seed = 42
";
        let cfg = Config::parse(text).unwrap();
        assert_eq!(cfg.r0, 3);
        assert_eq!(cfg.s0, 2);
        assert_eq!(cfg.nu_sign, -1);
        assert_eq!(cfg.n_max, 6);
        assert_eq!(cfg.scheme, Scheme::Imex);
        assert_eq!(cfg.dt, 5e-4);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.t_end, 1.0); // default preserved
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(
            Config::parse("[nope]\n"),
            Err(ConfigError::UnknownSection(1, _))
        ));
        assert!(matches!(
            Config::parse("[model]\nfoo = 1\n"),
            Err(ConfigError::UnknownKey(2, _, _))
        ));
        assert!(matches!(
            Config::parse("[model]\nell 3\n"),
            Err(ConfigError::BadLine(2))
        ));
        assert!(matches!(
            Config::parse("[model\n"),
            Err(ConfigError::BadSection(1))
        ));
        assert!(matches!(
            Config::parse("[model]\nell = -2\n"),
            Err(ConfigError::Param(_))
        ));
        // keys before any section have no home
        assert!(Config::parse("ell = 3\n").is_err());
    }

    #[test]
    fn overrides() {
        let mut cfg = Config::default();
        cfg.apply_override("truncation.l_max = 20").unwrap();
        assert_eq!(cfg.l_max, 20);
        assert!(cfg.apply_override("l_max = 20").is_err());
        assert!(cfg.apply_override("truncation.l_max").is_err());
        assert!(cfg.apply_override("pde.scheme=imex").is_ok());
    }
}
