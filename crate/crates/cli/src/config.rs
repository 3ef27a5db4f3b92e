//! Run configuration: embedded defaults, an optional `key = value` file, then flags.
//!
//! File format: one `key = value` per line; blank lines and lines starting with `#` are
//! ignored. Keys are the field names of [`RunConfig`]; `cache_dir = none` clears the cache
//! directory.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format {other:?}, expected json or text")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Decimal digits for root isolation.
    pub precision: u32,
    /// Relative modulus spread that groups inverse roots into one weight.
    pub cluster_tol: f64,
    /// Largest accepted relative deviation from `q^{w/2}`.
    pub weil_tol: f64,
    /// Largest accepted residual of a functional equation at a sample point.
    pub functional_tol: f64,
    /// Largest distance to an integer accepted by the winding-count order.
    pub snap_tol: f64,
    /// Largest extension degree of a finite field.
    pub degree_cap: usize,
    /// Largest number of candidate tuples per point count.
    pub enumeration_budget: u64,
    pub cache_dir: Option<PathBuf>,
    /// Primes up to this bound enter Euler products and trace bounds.
    pub prime_cutoff: u64,
    /// Powers of Frobenius checked by the trace bounds.
    pub n_cutoff: usize,
    /// Number of Dirichlet coefficients printed by `lfun`.
    pub dirichlet_terms: usize,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: 50,
            cluster_tol: 1e-6,
            weil_tol: 1e-30,
            functional_tol: 1e-9,
            snap_tol: 0.1,
            degree_cap: 24,
            enumeration_budget: 1_000_000_000,
            cache_dir: None,
            prime_cutoff: 1000,
            n_cutoff: 10,
            dirichlet_terms: 30,
            format: Format::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| ConfigError(format!("{key} = {value:?}: {e}")))
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "precision" => self.precision = parse(key, value)?,
            "cluster_tol" => self.cluster_tol = parse(key, value)?,
            "weil_tol" => self.weil_tol = parse(key, value)?,
            "functional_tol" => self.functional_tol = parse(key, value)?,
            "snap_tol" => self.snap_tol = parse(key, value)?,
            "degree_cap" => self.degree_cap = parse(key, value)?,
            "enumeration_budget" => self.enumeration_budget = parse(key, value)?,
            "cache_dir" => self.cache_dir = (value != "none").then(|| PathBuf::from(value)),
            "prime_cutoff" => self.prime_cutoff = parse(key, value)?,
            "n_cutoff" => self.n_cutoff = parse(key, value)?,
            "dirichlet_terms" => self.dirichlet_terms = parse(key, value)?,
            "format" => self.format = parse(key, value)?,
            other => return Err(ConfigError(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of a config file.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| ConfigError(format!("line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value.trim()).map_err(|e| ConfigError(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("cluster_tol", self.cluster_tol),
            ("weil_tol", self.weil_tol),
            ("functional_tol", self.functional_tol),
            ("snap_tol", self.snap_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError(format!("{name} must be positive, got {v}")));
            }
        }
        if self.snap_tol >= 0.5 {
            return Err(ConfigError(format!("snap_tol must be below 1/2, got {}", self.snap_tol)));
        }
        let caps = [
            ("precision", self.precision as u128),
            ("degree_cap", self.degree_cap as u128),
            ("enumeration_budget", self.enumeration_budget as u128),
            ("prime_cutoff", self.prime_cutoff as u128),
            ("n_cutoff", self.n_cutoff as u128),
            ("dirichlet_terms", self.dirichlet_terms as u128),
        ];
        for (name, v) in caps {
            if v == 0 {
                return Err(ConfigError(format!("{name} must be positive")));
            }
        }
        if self.prime_cutoff < 2 {
            return Err(ConfigError("prime_cutoff must be at least 2".into()));
        }
        Ok(())
    }

    /// `key = value` lines in the config file format.
    pub fn to_file_text(&self) -> String {
        let value = serde_json::to_value(self).expect("serializable");
        let mut out = String::new();
        for (k, v) in value.as_object().expect("struct") {
            let text = match v {
                serde_json::Value::Null => "none".to_string(),
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k} = {text}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round_trip() {
        let mut c = RunConfig::default();
        c.set("cache_dir", "/tmp/x").unwrap();
        c.set("format", "text").unwrap();
        let mut d = RunConfig::default();
        d.apply_file(&c.to_file_text()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = RunConfig::default();
        assert!(c.apply_file("weil_tol 3").is_err());
        assert!(c.apply_file("# comment\nsnap = 1").is_err());
        assert!(c.set("precision", "-3").is_err());
        c.set("functional_tol", "0").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("snap_tol", "0.7").unwrap();
        assert!(c.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }
}
