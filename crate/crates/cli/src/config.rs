//! Flat `key = value` run configuration.

use std::path::PathBuf;
use std::str::FromStr;

use issgain::gains::DEFAULT_THETA;
use issgain::numerics::InputNorm;
use issgain::sweep::DEFAULT_SCHEDULE;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected 'key = value', found '{text}'")]
    Malformed { line: usize, text: String },
    #[error("{}unknown key '{key}'", at(*.line))]
    UnknownKey { line: Option<usize>, key: String },
    #[error("{}invalid value for {key}: {reason}", at(*.line))]
    Invalid {
        line: Option<usize>,
        key: String,
        reason: String,
    },
    #[error("{}duplicate key '{key}'", at(*.line))]
    Duplicate { line: Option<usize>, key: String },
}

fn at(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

pub const KEYS: &[&str] = &[
    "n_schedule",
    "a",
    "alpha",
    "theta",
    "lambda_min",
    "lambda_max",
    "lambda_count",
    "weight_exponent",
    "u_norm",
    "mu_p",
    "mu_e",
    "t_end",
    "h",
    "seed",
    "output_dir",
    "sim_n",
    "inputs",
    "hold",
    "tol_omega",
    "tol_frac",
    "richardson",
    "threads",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_schedule: Vec<usize>,
    pub a: f64,
    pub alpha: f64,
    pub theta: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_count: usize,
    /// `None` selects the per-command default (2 for sweep/gains/check, 1 for simulate).
    pub weight_exponent: Option<f64>,
    pub u_norm: InputNorm,
    pub mu_p: f64,
    pub mu_e: f64,
    pub t_end: f64,
    pub h: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub sim_n: usize,
    pub inputs: usize,
    pub hold: usize,
    pub tol_omega: f64,
    pub tol_frac: f64,
    pub richardson: bool,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_schedule: DEFAULT_SCHEDULE.to_vec(),
            a: 1.0,
            alpha: 0.5,
            theta: DEFAULT_THETA,
            lambda_min: 1e-4,
            lambda_max: 1e4,
            lambda_count: 400,
            weight_exponent: None,
            u_norm: InputNorm::Max,
            mu_p: 1.0,
            mu_e: 1.0,
            t_end: 2.0,
            h: 0.01,
            seed: 20_240_601,
            output_dir: PathBuf::from("out"),
            sim_n: 1000,
            inputs: 50,
            hold: 5,
            tol_omega: 1e-4,
            tol_frac: 1e-4,
            richardson: false,
            threads: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| format!("'{value}' is not a valid {key}: {e}"))
}

fn positive(v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {v}"))
    }
}

impl RunConfig {
    /// Sets one key, validating its value in isolation.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let invalid = |reason: String| ConfigError::Invalid {
            line: None,
            key: key.to_string(),
            reason,
        };
        let value = value.trim();
        match key {
            "n_schedule" => {
                let list: Vec<usize> = value
                    .split(',')
                    .map(|s| parse_num::<usize>(key, s.trim()))
                    .collect::<Result<_, _>>()
                    .map_err(invalid)?;
                if list.iter().any(|&n| n < 2) {
                    return Err(invalid("every resolution must be >= 2".into()));
                }
                if list.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(invalid("resolutions must be strictly increasing".into()));
                }
                self.n_schedule = list;
            }
            "a" => self.a = parse_num(key, value).and_then(positive).map_err(invalid)?,
            "alpha" => {
                let v: f64 = parse_num(key, value).map_err(invalid)?;
                if !(v > 0.0 && v < 1.0) {
                    return Err(invalid(format!("must lie in (0, 1), got {v}")));
                }
                self.alpha = v;
            }
            "theta" => {
                let v: f64 = parse_num(key, value).map_err(invalid)?;
                let half = std::f64::consts::FRAC_PI_2;
                if !(v > half && v < std::f64::consts::PI) {
                    return Err(invalid(format!("must lie in (pi/2, pi), got {v}")));
                }
                self.theta = v;
            }
            "lambda_min" => self.lambda_min = parse_num(key, value).and_then(positive).map_err(invalid)?,
            "lambda_max" => self.lambda_max = parse_num(key, value).and_then(positive).map_err(invalid)?,
            "lambda_count" => {
                let v: usize = parse_num(key, value).map_err(invalid)?;
                if v == 0 {
                    return Err(invalid("must be at least 1".into()));
                }
                self.lambda_count = v;
            }
            "weight_exponent" => {
                let v: f64 = parse_num(key, value).map_err(invalid)?;
                if v != 1.0 && v != 2.0 {
                    return Err(invalid(format!("must be 1 or 2, got {v}")));
                }
                self.weight_exponent = Some(v);
            }
            "u_norm" => self.u_norm = value.parse().map_err(|e: issgain::Error| invalid(e.to_string()))?,
            "mu_p" => self.mu_p = parse_num(key, value).and_then(positive).map_err(invalid)?,
            "mu_e" => self.mu_e = parse_num(key, value).and_then(positive).map_err(invalid)?,
            "t_end" => self.t_end = parse_num(key, value).and_then(positive).map_err(invalid)?,
            "h" => self.h = parse_num(key, value).and_then(positive).map_err(invalid)?,
            "seed" => self.seed = parse_num(key, value).map_err(invalid)?,
            "output_dir" => {
                if value.is_empty() {
                    return Err(invalid("must not be empty".into()));
                }
                self.output_dir = PathBuf::from(value);
            }
            "sim_n" => {
                let v: usize = parse_num(key, value).map_err(invalid)?;
                if v < 2 {
                    return Err(invalid(format!("must be >= 2, got {v}")));
                }
                self.sim_n = v;
            }
            "inputs" => self.inputs = parse_num(key, value).map_err(invalid)?,
            "hold" => {
                let v: usize = parse_num(key, value).map_err(invalid)?;
                if v == 0 {
                    return Err(invalid("must be at least 1".into()));
                }
                self.hold = v;
            }
            "tol_omega" => self.tol_omega = parse_num(key, value).and_then(positive).map_err(invalid)?,
            "tol_frac" => self.tol_frac = parse_num(key, value).and_then(positive).map_err(invalid)?,
            "richardson" => {
                self.richardson = match value {
                    "true" | "yes" | "1" | "on" => true,
                    "false" | "no" | "0" | "off" => false,
                    other => return Err(invalid(format!("expected true or false, got '{other}'"))),
                }
            }
            "threads" => {
                let v: usize = parse_num(key, value).map_err(invalid)?;
                self.threads = if v == 0 { None } else { Some(v) };
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: None,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Checks that hold across keys.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let cross = |key: &str, reason: &str| ConfigError::Invalid {
            line: None,
            key: key.into(),
            reason: reason.into(),
        };
        if self.lambda_count == 1 && self.lambda_min != self.lambda_max {
            return Err(cross("lambda_count", "a single point needs lambda_min == lambda_max"));
        }
        if self.lambda_count > 1 && self.lambda_max <= self.lambda_min {
            return Err(cross("lambda_max", "must exceed lambda_min"));
        }
        if self.h > self.t_end {
            return Err(cross("h", "must not exceed t_end"));
        }
        Ok(())
    }

    pub fn sweep_weight(&self) -> f64 {
        self.weight_exponent.unwrap_or(2.0)
    }

    pub fn simulate_weight(&self) -> f64 {
        self.weight_exponent.unwrap_or(1.0)
    }
}

fn with_line(err: ConfigError, line: usize) -> ConfigError {
    match err {
        ConfigError::UnknownKey { key, .. } => ConfigError::UnknownKey { line: Some(line), key },
        ConfigError::Invalid { key, reason, .. } => ConfigError::Invalid {
            line: Some(line),
            key,
            reason,
        },
        ConfigError::Duplicate { key, .. } => ConfigError::Duplicate { line: Some(line), key },
        other => other,
    }
}

/// Parses `key = value` lines; `#` starts a comment. Absent keys keep their
/// defaults.
pub fn parse_config(source: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let Some((key, value)) = text.split_once('=') else {
            return Err(ConfigError::Malformed {
                line,
                text: text.to_string(),
            });
        };
        let key = key.trim();
        if key.is_empty() || value.trim().is_empty() {
            return Err(ConfigError::Malformed {
                line,
                text: text.to_string(),
            });
        }
        if !seen.insert(key.to_string()) && KEYS.contains(&key) {
            return Err(ConfigError::Duplicate {
                line: Some(line),
                key: key.to_string(),
            });
        }
        cfg.set(key, value).map_err(|e| with_line(e, line))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
        assert_eq!(parse_config("# only a comment\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn overrides() {
        let cfg = parse_config("n_schedule = 500,1000\na = 2.0  # faster\n").unwrap();
        assert_eq!(cfg.n_schedule, vec![500, 1000]);
        assert_eq!(cfg.a, 2.0);
        assert_eq!(cfg.alpha, 0.5);
    }

    #[test]
    fn range_error_names_key_and_line() {
        let err = parse_config("\nalpha = 1.5\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(
            parse_config("colour = red").unwrap_err(),
            ConfigError::UnknownKey { line: Some(1), .. }
        ));
        assert!(matches!(
            parse_config("a 2").unwrap_err(),
            ConfigError::Malformed { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("a = 1\na = 2").unwrap_err(),
            ConfigError::Duplicate { line: Some(2), .. }
        ));
        assert!(parse_config("n_schedule = 10,5").is_err());
        assert!(parse_config("theta = 1.0").is_err());
        assert!(parse_config("weight_exponent = 3").is_err());
        assert!(parse_config("u_norm = taxicab").is_err());
        assert!(parse_config("lambda_min = 5\nlambda_max = 1").is_err());
    }

    #[test]
    fn per_command_weights() {
        let cfg = RunConfig::default();
        assert_eq!((cfg.sweep_weight(), cfg.simulate_weight()), (2.0, 1.0));
        let cfg = parse_config("weight_exponent = 1").unwrap();
        assert_eq!((cfg.sweep_weight(), cfg.simulate_weight()), (1.0, 1.0));
        let cfg = parse_config("u_norm = euclidean\nrichardson = true\nthreads = 0").unwrap();
        assert_eq!(cfg.u_norm, InputNorm::Euclidean);
        assert!(cfg.richardson);
        assert_eq!(cfg.threads, None);
    }
}
