//! Line-oriented `key = value` configuration documents.
//!
//! Keys are the [`SimParams`] field names, `#` starts a comment, and any key
//! not given keeps its default. `probes` takes a comma-separated list,
//! optionally wrapped in brackets.

use crate::error::{Error, Result};
use crate::params::{Dealias, LaplacianSign, SimParams};

fn parse_err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    for q in ['"', '\''] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return &s[1..s.len() - 1];
        }
    }
    s
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|e| parse_err(line, key, format!("{value:?} is not a number ({e})")))
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|e| parse_err(line, key, format!("{value:?} is not a count ({e})")))
}

/// Parses a document without validating the result.
pub fn parse_config_unvalidated(text: &str) -> Result<SimParams> {
    let mut p = SimParams::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(parse_err(line, content, "expected `key = value`"));
        };
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(parse_err(line, key, "duplicate key"));
        }
        match key {
            "alpha" => p.alpha = parse_f64(line, key, value)?,
            "beta" => p.beta = parse_f64(line, key, value)?,
            "mu" => p.mu = parse_f64(line, key, value)?,
            "amplitude" => p.amplitude = parse_f64(line, key, value)?,
            "domain_length" => p.domain_length = parse_f64(line, key, value)?,
            "grid_points" => p.grid_points = parse_usize(line, key, value)?,
            "dt" => p.dt = parse_f64(line, key, value)?,
            "t_end" => p.t_end = parse_f64(line, key, value)?,
            "snapshot_every" => p.snapshot_every = parse_f64(line, key, value)?,
            "laplacian_sign" => {
                p.laplacian_sign = match unquote(value) {
                    "standard_wave" => LaplacianSign::StandardWave,
                    "as_written" => LaplacianSign::AsWritten,
                    other => {
                        return Err(parse_err(
                            line,
                            key,
                            format!("{other:?} is not one of standard_wave, as_written"),
                        ))
                    }
                }
            }
            "dealias" => {
                p.dealias = match unquote(value) {
                    "none" => Dealias::None,
                    "pad2x" => Dealias::Pad2x,
                    other => {
                        return Err(parse_err(
                            line,
                            key,
                            format!("{other:?} is not one of none, pad2x"),
                        ))
                    }
                }
            }
            "irk_stages" => p.irk_stages = parse_usize(line, key, value)?,
            "stage_tol" => p.stage_tol = parse_f64(line, key, value)?,
            "stage_max_iter" => p.stage_max_iter = parse_usize(line, key, value)?,
            "probes" => {
                let inner = value
                    .strip_prefix('[')
                    .and_then(|v| v.strip_suffix(']'))
                    .unwrap_or(value);
                p.probes = inner
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_f64(line, key, s))
                    .collect::<Result<_>>()?;
            }
            _ => return Err(parse_err(line, key, "unknown key")),
        }
        seen.push(key.to_string());
    }
    Ok(p)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SimParams> {
    parse_config_unvalidated(text)?.validated()
}

/// Renders every field; `parse_config(&render_config(p)) == p` for valid `p`.
pub fn render_config(p: &SimParams) -> String {
    let probes = p
        .probes
        .iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "alpha = {:?}\nbeta = {:?}\nmu = {:?}\namplitude = {:?}\ndomain_length = {:?}\n\
         grid_points = {}\ndt = {:?}\nt_end = {:?}\nsnapshot_every = {:?}\n\
         laplacian_sign = {}\ndealias = {}\nirk_stages = {}\nstage_tol = {:?}\n\
         stage_max_iter = {}\nprobes = [{}]\n",
        p.alpha,
        p.beta,
        p.mu,
        p.amplitude,
        p.domain_length,
        p.grid_points,
        p.dt,
        p.t_end,
        p.snapshot_every,
        p.laplacian_sign.as_str(),
        p.dealias.as_str(),
        p.irk_stages,
        p.stage_tol,
        p.stage_max_iter,
        probes
    )
}
