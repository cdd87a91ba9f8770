//! Flat `key = value` configuration.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment
//! key = value
//! ```
//!
//! Keys are `[a-z0-9_]+`. Blank lines and lines starting with `#` are
//! skipped; a key may appear once per file. Command-line `key=value`
//! arguments replace file entries.
//!
//! Value forms used by the experiments:
//!
//! * real lists: `0.1,0.25,0.5`, or inclusive ranges `start:step:stop`,
//!   freely mixed (`0:0.25:2,5`);
//! * integer lists: `1024,4096`, powers `2^10`, or power ranges
//!   `2^10:2^20` (every power of two in between).

use std::collections::BTreeMap;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

fn split_entry(text: &str) -> Option<(String, String)> {
    let (key, value) = text.split_once('=')?;
    let key = key.trim();
    valid_key(key).then(|| (key.to_string(), value.trim().to_string()))
}

impl Config {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = split_entry(line).ok_or_else(|| {
                CliError::Usage(format!("{origin}:{}: expected `key = value`", n + 1))
            })?;
            if entries.insert(key.clone(), value).is_some() {
                return Err(CliError::Usage(format!(
                    "{origin}:{}: duplicate key `{key}`",
                    n + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn apply_override(&mut self, arg: &str) -> Result<()> {
        let (key, value) = split_entry(arg)
            .ok_or_else(|| CliError::Usage(format!("expected key=value, got `{arg}`")))?;
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn params(&self) -> Params {
        Params {
            raw: self.entries.clone(),
            echo: BTreeMap::new(),
        }
    }
}

/// Typed, consuming view of a [`Config`]. Every lookup records the effective
/// value; [`Params::finish`] rejects keys nobody asked for.
#[derive(Debug)]
pub struct Params {
    raw: BTreeMap<String, String>,
    echo: BTreeMap<String, String>,
}

impl Params {
    fn take(&mut self, key: &str, default: &str) -> String {
        let value = self.raw.remove(key).unwrap_or_else(|| default.to_string());
        self.echo.insert(key.to_string(), value.clone());
        value
    }

    pub fn real(&mut self, key: &str, default: &str) -> Result<f64> {
        let text = self.take(key, default);
        parse_real(&text).map_err(|m| CliError::invalid(key, m))
    }

    pub fn reals(&mut self, key: &str, default: &str) -> Result<Vec<f64>> {
        let text = self.take(key, default);
        parse_reals(&text).map_err(|m| CliError::invalid(key, m))
    }

    pub fn integer(&mut self, key: &str, default: &str) -> Result<i64> {
        let text = self.take(key, default);
        text.parse::<i64>()
            .map_err(|_| CliError::invalid(key, format!("`{text}` is not an integer")))
    }

    pub fn count(&mut self, key: &str, default: &str) -> Result<u64> {
        let text = self.take(key, default);
        parse_count(&text).map_err(|m| CliError::invalid(key, m))
    }

    pub fn counts(&mut self, key: &str, default: &str) -> Result<Vec<u64>> {
        let text = self.take(key, default);
        parse_counts(&text).map_err(|m| CliError::invalid(key, m))
    }

    pub fn choice(&mut self, key: &str, default: &str, allowed: &[&str]) -> Result<String> {
        let text = self.take(key, default);
        if allowed.contains(&text.as_str()) {
            Ok(text)
        } else {
            Err(CliError::invalid(
                key,
                format!("`{text}` is not one of {}", allowed.join(", ")),
            ))
        }
    }

    pub fn words(&mut self, key: &str, default: &str, allowed: &[&str]) -> Result<Vec<String>> {
        let text = self.take(key, default);
        let words: Vec<String> = text
            .split(',')
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .map(str::to_string)
            .collect();
        if words.is_empty() {
            return Err(CliError::invalid(key, "empty selection"));
        }
        if let Some(bad) = words.iter().find(|w| !allowed.contains(&w.as_str())) {
            return Err(CliError::invalid(
                key,
                format!("`{bad}` is not one of {}", allowed.join(", ")),
            ));
        }
        Ok(words)
    }

    pub fn boolean(&mut self, key: &str, default: &str) -> Result<bool> {
        let text = self.take(key, default);
        match text.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(CliError::invalid(
                key,
                format!("`{text}` is not true or false"),
            )),
        }
    }

    /// Fails on the first key that was never looked up; returns the echo.
    pub fn finish(self) -> Result<BTreeMap<String, String>> {
        if let Some(key) = self.raw.into_keys().next() {
            return Err(CliError::UnknownKey(key));
        }
        Ok(self.echo)
    }
}

fn parse_real(text: &str) -> std::result::Result<f64, String> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

fn parse_reals(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_real(v)?),
            [start, step, stop] => out.extend(real_range(
                parse_real(start)?,
                parse_real(step)?,
                parse_real(stop)?,
            )?),
            _ => return Err(format!("`{item}` is neither a number nor start:step:stop")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

fn real_range(start: f64, step: f64, stop: f64) -> std::result::Result<Vec<f64>, String> {
    if step <= 0.0 || stop < start {
        return Err(format!(
            "range {start}:{step}:{stop} is empty or descending"
        ));
    }
    let n = ((stop - start) / step).round();
    if (start + n * step - stop).abs() > 1e-9 * stop.abs().max(1.0) {
        return Err(format!("step {step} does not reach {stop} from {start}"));
    }
    if n > 1e7 {
        return Err(format!("range {start}:{step}:{stop} has too many points"));
    }
    Ok((0..=n as u64).map(|k| start + k as f64 * step).collect())
}

fn parse_count(text: &str) -> std::result::Result<u64, String> {
    let text = text.trim();
    if let Some(exp) = text.strip_prefix("2^") {
        let k: u32 = exp
            .parse()
            .map_err(|_| format!("bad exponent in `{text}`"))?;
        if k > 62 {
            return Err(format!("`{text}` is too large"));
        }
        return Ok(1 << k);
    }
    text.parse()
        .map_err(|_| format!("`{text}` is not a nonnegative integer"))
}

fn parse_counts(text: &str) -> std::result::Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once(':') {
            None => out.push(parse_count(item)?),
            Some((a, b)) => {
                let (lo, hi) = (parse_count(a)?, parse_count(b)?);
                if !(a.trim().starts_with("2^") && b.trim().starts_with("2^")) || lo > hi {
                    return Err(format!("`{item}` is not an ascending power range 2^a:2^b"));
                }
                let (ka, kb) = (lo.trailing_zeros(), hi.trailing_zeros());
                out.extend((ka..=kb).map(|k| 1u64 << k));
            }
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}
