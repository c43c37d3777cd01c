//! Line-oriented `key = value` run configuration.
//!
//! Recognized keys: `E_g, E_w, V, dV, W, d_eps, N, band_center, hbar, t_max,
//! t_steps`. `#` starts a comment, whitespace is ignored around keys and
//! values, unknown or duplicate keys are errors. Missing keys fall back to
//! the telegraph reference parameters and the default time grid.

use crate::model::ModelParams;
use crate::presets;
use crate::{Error, Result};

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub t_max: f64,
    pub t_steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: presets::telegraph(),
            t_max: presets::DEFAULT_T_MAX,
            t_steps: presets::DEFAULT_T_STEPS,
        }
    }
}

/// Parses a config file's text. The result's parameters are validated.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<String> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Config {
            line: lineno + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(err(format!("empty value for key `{key}`")));
        }
        if seen.iter().any(|k| k == key) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        seen.push(key.to_string());

        let parse_f64 = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| err(format!("key `{key}`: `{value}` is not a number")))
        };
        match key {
            "E_g" => cfg.params.e_g = parse_f64()?,
            "E_w" => cfg.params.e_w = parse_f64()?,
            "V" => cfg.params.v = parse_f64()?,
            "dV" => cfg.params.dv = parse_f64()?,
            "W" => cfg.params.w = parse_f64()?,
            "d_eps" => cfg.params.d_eps = parse_f64()?,
            "band_center" => cfg.params.band_center = parse_f64()?,
            "hbar" => cfg.params.hbar = parse_f64()?,
            "t_max" => cfg.t_max = parse_f64()?,
            "N" => {
                cfg.params.n = value
                    .parse::<usize>()
                    .map_err(|_| err(format!("key `N`: `{value}` is not a positive integer")))?
            }
            "t_steps" => {
                cfg.t_steps = value.parse::<usize>().map_err(|_| {
                    err(format!(
                        "key `t_steps`: `{value}` is not a positive integer"
                    ))
                })?
            }
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
    }

    let violations = cfg.params.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidParams(violations));
    }
    if cfg.t_steps < 2 {
        return Err(Error::InvalidParams(vec![
            "t_steps must be at least 2".into()
        ]));
    }
    if cfg.t_max <= 0.0 || !cfg.t_max.is_finite() {
        return Err(Error::InvalidParams(vec!["t_max must be positive".into()]));
    }
    Ok(cfg)
}
