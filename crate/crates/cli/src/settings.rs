use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{usage, CliResult};

pub const SEED_ENV: &str = "COVDC_SEED";
pub const DEFAULT_BUDGET: u64 = 1 << 32;

/// Resolved run settings; recorded in the manifest so replays see the same values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub seed: u64,
    pub budget: u64,
    pub threads: usize,
    pub theta_delta: f64,
    pub theta_1: f64,
    pub theta_bulk: f64,
}

impl Default for Settings {
    fn default() -> Self {
        let th = covdc::hensel::Thresholds::default();
        Settings {
            seed: 0,
            budget: DEFAULT_BUDGET,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            theta_delta: th.theta_delta,
            theta_1: th.theta_1,
            theta_bulk: th.theta_bulk,
        }
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse().map_err(|_| usage(format!("config key {key}: cannot parse {v:?}")))
}

impl Settings {
    pub fn apply_config(&mut self, map: &BTreeMap<String, String>) -> CliResult<()> {
        for (k, v) in map {
            match k.as_str() {
                "seed" => self.seed = num(k, v)?,
                "budget" => self.budget = num(k, v)?,
                "threads" => self.threads = num(k, v)?,
                "theta_delta" => self.theta_delta = num(k, v)?,
                "theta_1" => self.theta_1 = num(k, v)?,
                "theta_bulk" => self.theta_bulk = num(k, v)?,
                _ => return Err(usage(format!("unknown config key {k:?}"))),
            }
        }
        Ok(())
    }

    pub fn load(
        config: Option<&Path>,
        seed: Option<u64>,
        budget: Option<u64>,
        threads: Option<usize>,
    ) -> CliResult<Self> {
        let mut s = Settings::default();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            s.apply_config(&parse_config(&text)?)?;
        }
        if let Some(v) = seed {
            s.seed = v;
        }
        if let Some(v) = budget {
            s.budget = v;
        }
        if let Some(v) = threads {
            s.threads = v;
        }
        s.apply_env()?;
        if s.threads == 0 {
            return Err(usage("threads must be >= 1"));
        }
        Ok(s)
    }

    pub fn apply_env(&mut self) -> CliResult<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v.trim().parse().map_err(|_| usage(format!("{SEED_ENV}={v:?} is not an integer")))?;
        }
        Ok(())
    }

    pub fn thresholds(&self) -> covdc::hensel::Thresholds {
        covdc::hensel::Thresholds {
            theta_delta: self.theta_delta,
            theta_1: self.theta_1,
            theta_bulk: self.theta_bulk,
        }
    }

    /// Fails with `BudgetExceeded` when `work` is over the budget.
    pub fn charge(&self, work: u64) -> CliResult<()> {
        if work > self.budget {
            return Err(covdc::Error::BudgetExceeded { needed: work, cap: self.budget }.into());
        }
        Ok(())
    }
}
