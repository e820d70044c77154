//! Resource caps shared by every criterion and the scanners.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_field_degree: usize,
    pub max_unity_enum: u64,
    /// Pollard-rho iterations allowed per factorization.
    pub factor_budget: u64,
    /// Search nodes for the oracle, orbit candidates, and field multiplications.
    pub search_node_budget: u64,
    pub seed: u64,
    pub thread_count: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_field_degree: 80,
            max_unity_enum: 1 << 16,
            factor_budget: 1 << 24,
            search_node_budget: 100_000_000,
            seed: 0,
            thread_count: 1,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CapsError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{value}` is not a valid value for {key}")]
    BadValue { line: usize, key: String, value: String },
    #[error("{0} must be positive")]
    NotPositive(&'static str),
}

impl Caps {
    pub fn validate(&self) -> Result<(), CapsError> {
        let checks = [
            ("max_field_degree", self.max_field_degree as u64),
            ("max_unity_enum", self.max_unity_enum),
            ("factor_budget", self.factor_budget),
            ("search_node_budget", self.search_node_budget),
            ("thread_count", self.thread_count as u64),
        ];
        match checks.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(CapsError::NotPositive(name)),
            None => Ok(()),
        }
    }
}

impl FromStr for Caps {
    type Err = CapsError;

    /// Flat `key = value` lines; `#` starts a comment; missing keys keep defaults.
    fn from_str(text: &str) -> Result<Self, CapsError> {
        let mut caps = Caps::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(CapsError::Syntax { line: line_no })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || CapsError::BadValue { line: line_no, key: key.to_string(), value: value.to_string() };
            let number = value.replace('_', "");
            match key {
                "max_field_degree" => caps.max_field_degree = number.parse().map_err(|_| bad())?,
                "max_unity_enum" => caps.max_unity_enum = number.parse().map_err(|_| bad())?,
                "factor_budget" => caps.factor_budget = number.parse().map_err(|_| bad())?,
                "search_node_budget" => caps.search_node_budget = number.parse().map_err(|_| bad())?,
                "seed" => caps.seed = number.parse().map_err(|_| bad())?,
                "thread_count" => caps.thread_count = number.parse().map_err(|_| bad())?,
                _ => return Err(CapsError::UnknownKey { line: line_no, key: key.to_string() }),
            }
        }
        caps.validate()?;
        Ok(caps)
    }
}

impl fmt::Display for Caps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "max_field_degree = {}", self.max_field_degree)?;
        writeln!(f, "max_unity_enum = {}", self.max_unity_enum)?;
        writeln!(f, "factor_budget = {}", self.factor_budget)?;
        writeln!(f, "search_node_budget = {}", self.search_node_budget)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "thread_count = {}", self.thread_count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_file_roundtrip() {
        let caps = Caps { seed: 42, max_field_degree: 12, ..Caps::default() };
        assert_eq!(caps.to_string().parse::<Caps>().unwrap(), caps);
        let parsed: Caps = "# comment\nseed = 7\n\nsearch_node_budget = 1_000\n".parse().unwrap();
        assert_eq!(parsed.seed, 7);
        assert_eq!(parsed.search_node_budget, 1000);
        assert_eq!(parsed.max_field_degree, 80);
        assert!(matches!("bogus = 1".parse::<Caps>(), Err(CapsError::UnknownKey { .. })));
        assert!(matches!("seed 1".parse::<Caps>(), Err(CapsError::Syntax { .. })));
        assert!(matches!("seed = x".parse::<Caps>(), Err(CapsError::BadValue { .. })));
        assert!(matches!("thread_count = 0".parse::<Caps>(), Err(CapsError::NotPositive(_))));
    }
}
