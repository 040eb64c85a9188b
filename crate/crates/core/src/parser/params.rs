//! `key=value` parameter files for the helium model.
//!
//! ```text
//! # superfluid helium at 4 K
//! sigma=0.12e-3
//! P_v=8.1445e4
//! rho_L=140
//! T=4
//! P=0
//! ```
//!
//! LF or CRLF line endings, `#` starts a comment, blank lines are ignored.
//! `rho_v` is optional and defaults to 0.

use crate::helium::PhysicalParams;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamsError {
    #[error("line {line}: expected key=value")]
    Malformed { line: usize },
    #[error("line {line}: unknown key {key}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: value for {key} is not a number: {value:?}")]
    NotNumeric { line: usize, key: String, value: String },
    #[error("missing key {0}")]
    MissingKey(&'static str),
    #[error("invalid {key}: {reason}")]
    Invalid { key: &'static str, reason: String },
}

const KEYS: [&str; 6] = ["sigma", "P_v", "rho_L", "rho_v", "T", "P"];

pub fn parse_params(text: &str) -> Result<PhysicalParams, ParamsError> {
    let mut values: [Option<f64>; 6] = [None; 6];
    for (idx, raw) in text.split('\n').enumerate() {
        let line = idx + 1;
        let content = raw.strip_suffix('\r').unwrap_or(raw);
        let content = content.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ParamsError::Malformed { line })?;
        let key = key.trim();
        let value = value.trim();
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| ParamsError::UnknownKey { line, key: key.to_string() })?;
        if value.is_empty() {
            // an empty value counts as absent
            continue;
        }
        if values[slot].is_some() {
            return Err(ParamsError::DuplicateKey { line, key: key.to_string() });
        }
        let v: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| ParamsError::NotNumeric { line, key: key.to_string(), value: value.to_string() })?;
        values[slot] = Some(v);
    }
    let get = |i: usize| values[i].ok_or(ParamsError::MissingKey(KEYS[i]));
    let params = PhysicalParams {
        sigma: get(0)?,
        p_v: get(1)?,
        rho_l: get(2)?,
        rho_v: values[3].unwrap_or(0.0),
        p: get(5)?,
        t: get(4)?,
    };
    params.validate()?;
    Ok(params)
}
