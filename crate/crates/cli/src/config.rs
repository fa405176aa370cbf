//! `key = value` settings files for the `bench` subcommand.
//!
//! Keys are the long flag names without dashes. Blank lines and lines
//! starting with `#` are ignored. Values given on the command line win.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub const KEYS: &[&str] = &[
    "workload", "variant", "acyclic", "threads", "secs", "keys", "seed", "iters", "initial", "density", "out",
];

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        text.parse().with_context(|| format!("in {}", path.display()))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("{key} = {v}: {e}")))
            .transpose()
    }
}

impl FromStr for Config {
    type Err = anyhow::Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected key = value", n + 1);
            };
            let k = k.trim();
            if !KEYS.contains(&k) {
                bail!("line {}: unknown key {k:?}", n + 1);
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Config { values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_spacing() {
        let c: Config = "# run\nthreads = 4\n\nsecs=0.5\n".parse().unwrap();
        assert_eq!(c.get::<usize>("threads").unwrap(), Some(4));
        assert_eq!(c.get::<f64>("secs").unwrap(), Some(0.5));
        assert_eq!(c.get::<u64>("seed").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!("speed = 3".parse::<Config>().is_err());
        assert!("threads".parse::<Config>().is_err());
        let c: Config = "threads = many".parse().unwrap();
        assert!(c.get::<usize>("threads").is_err());
    }
}
