use std::collections::{BTreeMap, BTreeSet};

use super::ExperimentError;

/// Flat `key = value` configuration. Every lookup records the value that
/// was actually used (default or given) so the run directory can echo the
/// fully resolved parameter set.
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

fn bad(key: &str, value: &str, what: &str) -> ExperimentError {
    ExperimentError::Config(format!("{key} = {value}: expected {what}"))
}

impl Config {
    /// `#` starts a comment; blank lines are ignored; keys must be unique.
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ExperimentError::Config(format!(
                    "line {}: missing '='",
                    no + 1
                )));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ExperimentError::Config(format!(
                    "line {}: empty key",
                    no + 1
                )));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ExperimentError::Config(format!(
                    "line {}: duplicate key {k}",
                    no + 1
                )));
            }
        }
        Ok(Self {
            entries,
            ..Self::default()
        })
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        Self {
            entries: pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            ..Self::default()
        }
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    /// Records a derived value in the echo without it being a config key.
    pub fn set_resolved(&mut self, key: &str, value: f64) {
        self.record(key, format!("{value:e}"));
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.entries.get(key).cloned()
    }

    fn record(&mut self, key: &str, value: String) {
        self.resolved.insert(key.to_string(), value);
    }

    pub fn opt_str(&mut self, key: &str) -> Option<String> {
        let v = self.raw(key)?;
        self.record(key, v.clone());
        Some(v)
    }

    pub fn str_or(&mut self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or_else(|| default.to_string());
        self.record(key, v.clone());
        v
    }

    pub fn req_str(&mut self, key: &str) -> Result<String, ExperimentError> {
        self.opt_str(key)
            .ok_or_else(|| ExperimentError::Config(format!("missing required key {key}")))
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, ExperimentError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let x: f64 = v.parse().map_err(|_| bad(key, &v, "a number"))?;
                self.record(key, format!("{x:e}"));
                Ok(Some(x))
            }
        }
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ExperimentError> {
        let x = self.opt_f64(key)?.unwrap_or(default);
        self.record(key, format!("{x:e}"));
        Ok(x)
    }

    pub fn req_f64(&mut self, key: &str) -> Result<f64, ExperimentError> {
        self.opt_f64(key)?
            .ok_or_else(|| ExperimentError::Config(format!("missing required key {key}")))
    }

    pub fn opt_usize(&mut self, key: &str) -> Result<Option<usize>, ExperimentError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let x: usize = v
                    .parse()
                    .map_err(|_| bad(key, &v, "a non-negative integer"))?;
                self.record(key, x.to_string());
                Ok(Some(x))
            }
        }
    }

    pub fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, ExperimentError> {
        let x = self.opt_usize(key)?.unwrap_or(default);
        self.record(key, x.to_string());
        Ok(x)
    }

    pub fn req_usize(&mut self, key: &str) -> Result<usize, ExperimentError> {
        self.opt_usize(key)?
            .ok_or_else(|| ExperimentError::Config(format!("missing required key {key}")))
    }

    pub fn req_u64(&mut self, key: &str) -> Result<u64, ExperimentError> {
        let v = self
            .raw(key)
            .ok_or_else(|| ExperimentError::Config(format!("missing required key {key}")))?;
        let x: u64 = v
            .parse()
            .map_err(|_| bad(key, &v, "a non-negative integer"))?;
        self.record(key, x.to_string());
        Ok(x)
    }

    pub fn u64_or(&mut self, key: &str, default: u64) -> Result<u64, ExperimentError> {
        match self.raw(key) {
            None => {
                self.record(key, default.to_string());
                Ok(default)
            }
            Some(v) => {
                let x: u64 = v
                    .parse()
                    .map_err(|_| bad(key, &v, "a non-negative integer"))?;
                self.record(key, x.to_string());
                Ok(x)
            }
        }
    }

    pub fn bool_or(&mut self, key: &str, default: bool) -> Result<bool, ExperimentError> {
        let x = match self.raw(key) {
            None => default,
            Some(v) => match v.as_str() {
                "true" | "yes" | "1" => true,
                "false" | "no" | "0" => false,
                _ => return Err(bad(key, &v, "true or false")),
            },
        };
        self.record(key, x.to_string());
        Ok(x)
    }

    /// Comma-separated numbers.
    pub fn f64_list_or(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, ExperimentError> {
        let xs = match self.raw(key) {
            None => default.to_vec(),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(key, &v, "a comma-separated list of numbers"))
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        if xs.is_empty() {
            return Err(bad(key, "", "a nonempty list"));
        }
        self.record(
            key,
            xs.iter()
                .map(|x| format!("{x:e}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        Ok(xs)
    }

    /// Comma-separated integers; `a..b` is the inclusive range.
    pub fn usize_list(
        &mut self,
        key: &str,
        default: Option<&[usize]>,
    ) -> Result<Vec<usize>, ExperimentError> {
        let xs = match (self.raw(key), default) {
            (None, Some(d)) => d.to_vec(),
            (None, None) => {
                return Err(ExperimentError::Config(format!(
                    "missing required key {key}"
                )))
            }
            (Some(v), _) => {
                parse_usize_list(&v).ok_or_else(|| bad(key, &v, "integers or a..b ranges"))?
            }
        };
        if xs.is_empty() {
            return Err(bad(key, "", "a nonempty list"));
        }
        self.record(
            key,
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        Ok(xs)
    }

    /// Errors on keys that no lookup asked for (typos).
    pub fn finish(&self) -> Result<(), ExperimentError> {
        let unknown: Vec<&str> = self
            .entries
            .keys()
            .filter(|k| !self.used.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(ExperimentError::Config(format!(
                "unknown keys: {}",
                unknown.join(", ")
            )))
        }
    }

    /// Resolved parameters as `key = value` lines.
    pub fn echo(&self) -> String {
        self.resolved
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

fn parse_usize_list(v: &str) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for part in v.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let (a, b): (usize, usize) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            if a > b {
                return None;
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().ok()?);
        }
    }
    Some(out)
}
