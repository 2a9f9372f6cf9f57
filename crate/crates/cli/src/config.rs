//! Parameter resolution: command-line flags over a config file over
//! per-suite defaults.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;

/// Parameters accepted by every suite. Unset values fall back to the config
/// file, then to the suite's defaults.
#[derive(Args, Clone, Debug, Default)]
pub struct ParamFlags {
    /// Twist parameters of the zero chart (comma separated).
    #[arg(long, value_delimiter = ',', global = true, allow_negative_numbers = true)]
    pub k: Vec<i64>,
    /// Twist parameters of the infinity chart (comma separated).
    #[arg(long, value_delimiter = ',', global = true, allow_negative_numbers = true)]
    pub l: Vec<i64>,
    /// Largest group order for the terminality classification.
    #[arg(long, global = true)]
    pub n_max: Option<i64>,
    /// Base index of the Hirzebruch surface.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Transformations over the zero fiber.
    #[arg(long, global = true)]
    pub k0: Option<u32>,
    /// Transformations over the infinity fiber.
    #[arg(long, global = true)]
    pub kinf: Option<u32>,
    /// Weights of a weighted projective space (comma separated).
    #[arg(long, value_delimiter = ',', global = true, allow_negative_numbers = true)]
    pub weights: Vec<i64>,
    /// Restrict the equivariance suite to one family.
    #[arg(long, global = true, value_parser = ["quadric", "f4"])]
    pub family: Option<String>,
}

/// Fully merged parameters; `None` means "use the suite default".
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    pub k: Option<Vec<i64>>,
    pub l: Option<Vec<i64>>,
    pub n_max: Option<i64>,
    pub n: Option<u32>,
    pub k0: Option<u32>,
    pub kinf: Option<u32>,
    pub weights: Option<Vec<i64>>,
    pub family: Option<String>,
}

const KEYS: [&str; 8] = ["k", "l", "n_max", "n", "k0", "kinf", "weights", "family"];

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// dashes in keys are read as underscores.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            bail!("line {}: unknown key `{}`", i + 1, k.trim());
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            bail!("line {}: duplicate key `{key}`", i + 1);
        }
    }
    Ok(out)
}

fn list(key: &str, v: &str) -> Result<Vec<i64>> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .with_context(|| format!("`{key}`: bad integer `{}`", s.trim()))
        })
        .collect()
}

fn scalar<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| anyhow!("`{key}`: bad value `{v}`"))
}

impl Settings {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut s = Settings::default();
        for (key, v) in map {
            match key.as_str() {
                "k" => s.k = Some(list(key, v)?),
                "l" => s.l = Some(list(key, v)?),
                "n_max" => s.n_max = Some(scalar(key, v)?),
                "n" => s.n = Some(scalar(key, v)?),
                "k0" => s.k0 = Some(scalar(key, v)?),
                "kinf" => s.kinf = Some(scalar(key, v)?),
                "weights" => s.weights = Some(list(key, v)?),
                "family" => {
                    if v != "quadric" && v != "f4" {
                        bail!("`family`: expected quadric or f4, got `{v}`");
                    }
                    s.family = Some(v.clone());
                }
                _ => bail!("unknown key `{key}`"),
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_map(&parse_config(&text)?)
    }

    /// Flags win over `self`.
    pub fn overlay(self, f: &ParamFlags) -> Self {
        let nonempty = |v: &Vec<i64>| (!v.is_empty()).then(|| v.clone());
        Settings {
            k: nonempty(&f.k).or(self.k),
            l: nonempty(&f.l).or(self.l),
            n_max: f.n_max.or(self.n_max),
            n: f.n.or(self.n),
            k0: f.k0.or(self.k0),
            kinf: f.kinf.or(self.kinf),
            weights: nonempty(&f.weights).or(self.weights),
            family: f.family.clone().or(self.family),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let m = parse_config("# ranges\nk = 1,3\nn-max=20\n\nfamily = f4 # trailing\n").unwrap();
        let s = Settings::from_map(&m).unwrap();
        assert_eq!(s.k, Some(vec![1, 3]));
        assert_eq!(s.n_max, Some(20));
        assert_eq!(s.family.as_deref(), Some("f4"));
        assert_eq!(s.l, None);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_config("k 1").is_err());
        assert!(parse_config("depth = 3").is_err());
        assert!(parse_config("k = 1\nk = 3").is_err());
        let m = parse_config("k = 1,x").unwrap();
        assert!(Settings::from_map(&m).is_err());
        let m = parse_config("family = cubic").unwrap();
        assert!(Settings::from_map(&m).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = Settings {
            k: Some(vec![5]),
            n: Some(2),
            ..Default::default()
        };
        let flags = ParamFlags {
            k: vec![3],
            ..Default::default()
        };
        let s = file.overlay(&flags);
        assert_eq!(s.k, Some(vec![3]));
        assert_eq!(s.n, Some(2));
    }
}
