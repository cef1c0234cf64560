//! Run configuration: `key=value` lines, one per parameter.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated. Every key has a default, so an empty file is a valid config.

use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use repeater_core::codes::CODE_NAMES;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // table1 and lstar
    pub q: f64,
    pub f_star: f64,
    pub l0_km: f64,
    pub codes: Vec<String>,
    pub q_min: f64,
    pub q_max: f64,
    pub points: usize,

    // physical errors and purification
    pub beta: f64,
    pub delta: f64,
    pub gamma: f64,
    pub f0: f64,
    pub levels: usize,
    pub n_values: Vec<u64>,
    pub n0_ratio_max: u64,
    pub targets: Vec<f64>,
    pub n_min: u64,
    pub n_max: u64,

    // simulate
    pub sim_code: String,
    pub stations: usize,
    pub q_b: f64,
    pub q_p: f64,
    pub trials: u64,
    pub seed: u64,
    pub threads: usize,

    // rate
    pub rate_code: String,
    pub target: f64,
    pub l_att_km: f64,
    pub v_km_s: f64,
    pub eta: f64,
    /// `None` means four generation qubits per block qubit.
    pub n_eng: Option<f64>,
    pub rate_stations: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            q: 3e-3,
            f_star: 0.95,
            l0_km: 10.0,
            codes: CODE_NAMES.iter().map(|s| s.to_string()).collect(),
            q_min: 1e-4,
            q_max: 1e-1,
            points: 60,
            beta: 1e-3,
            delta: 1e-3,
            gamma: 0.1,
            f0: 0.95,
            levels: 3,
            n_values: vec![7, 23],
            n0_ratio_max: 30,
            targets: vec![1e-3, 1e-5, 1e-7, 1e-9],
            n_min: 5,
            n_max: 30,
            sim_code: "repetition-3".into(),
            stations: 5,
            q_b: 0.05,
            q_p: 0.05,
            trials: 1_000_000,
            seed: 42,
            threads: 0,
            rate_code: "hamming-7".into(),
            target: 1e-5,
            l_att_km: 20.0,
            v_km_s: 2e5,
            eta: 0.3,
            n_eng: None,
            rate_stations: vec![10, 30, 100, 300, 1000, 3000],
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn one<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse()
        .map_err(|e| anyhow!("bad value for `{key}`: `{v}` ({e})"))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| one(key, s.trim())).collect()
}

impl RunConfig {
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        put("q", self.q.to_string());
        put("f_star", self.f_star.to_string());
        put("l0_km", self.l0_km.to_string());
        put("codes", self.codes.join(","));
        put("q_min", self.q_min.to_string());
        put("q_max", self.q_max.to_string());
        put("points", self.points.to_string());
        put("beta", self.beta.to_string());
        put("delta", self.delta.to_string());
        put("gamma", self.gamma.to_string());
        put("f0", self.f0.to_string());
        put("levels", self.levels.to_string());
        put("n_values", join(&self.n_values));
        put("n0_ratio_max", self.n0_ratio_max.to_string());
        put("targets", join(&self.targets));
        put("n_min", self.n_min.to_string());
        put("n_max", self.n_max.to_string());
        put("sim_code", self.sim_code.clone());
        put("stations", self.stations.to_string());
        put("q_b", self.q_b.to_string());
        put("q_p", self.q_p.to_string());
        put("trials", self.trials.to_string());
        put("seed", self.seed.to_string());
        put("threads", self.threads.to_string());
        put("rate_code", self.rate_code.clone());
        put("target", self.target.to_string());
        put("l_att_km", self.l_att_km.to_string());
        put("v_km_s", self.v_km_s.to_string());
        put("eta", self.eta.to_string());
        put("n_eng", self.n_eng.map_or("auto".into(), |v| v.to_string()));
        put("rate_stations", join(&self.rate_stations));
        s
    }

    /// Applies `text` on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key=value, got `{line}`", i + 1))?;
            cfg.set(k.trim(), v.trim())
                .with_context(|| format!("line {}", i + 1))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "q" => self.q = one(key, v)?,
            "f_star" => self.f_star = one(key, v)?,
            "l0_km" => self.l0_km = one(key, v)?,
            "codes" => self.codes = list(key, v)?,
            "q_min" => self.q_min = one(key, v)?,
            "q_max" => self.q_max = one(key, v)?,
            "points" => self.points = one(key, v)?,
            "beta" => self.beta = one(key, v)?,
            "delta" => self.delta = one(key, v)?,
            "gamma" => self.gamma = one(key, v)?,
            "f0" => self.f0 = one(key, v)?,
            "levels" => self.levels = one(key, v)?,
            "n_values" => self.n_values = list(key, v)?,
            "n0_ratio_max" => self.n0_ratio_max = one(key, v)?,
            "targets" => self.targets = list(key, v)?,
            "n_min" => self.n_min = one(key, v)?,
            "n_max" => self.n_max = one(key, v)?,
            "sim_code" => self.sim_code = v.to_string(),
            "stations" => self.stations = one(key, v)?,
            "q_b" => self.q_b = one(key, v)?,
            "q_p" => self.q_p = one(key, v)?,
            "trials" => self.trials = one(key, v)?,
            "seed" => self.seed = one(key, v)?,
            "threads" => self.threads = one(key, v)?,
            "rate_code" => self.rate_code = v.to_string(),
            "target" => self.target = one(key, v)?,
            "l_att_km" => self.l_att_km = one(key, v)?,
            "v_km_s" => self.v_km_s = one(key, v)?,
            "eta" => self.eta = one(key, v)?,
            "n_eng" => {
                self.n_eng = if v == "auto" {
                    None
                } else {
                    Some(one(key, v)?)
                }
            }
            "rate_stations" => self.rate_stations = list(key, v)?,
            _ => bail!("unknown config key `{key}`"),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.serialize()).unwrap(), c);
    }

    #[test]
    fn odd_values_round_trip() {
        let c = RunConfig {
            q: 0.1 + 0.2,
            targets: vec![1e-300, 0.5],
            codes: vec!["golay-23".into()],
            n_eng: Some(12.5),
            rate_stations: vec![],
            seed: u64::MAX,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::parse(&c.serialize()).unwrap(), c);
    }

    #[test]
    fn comments_and_errors() {
        let c = RunConfig::parse("# comment\n\n q = 0.01 \nlevels=2\n").unwrap();
        assert_eq!((c.q, c.levels), (0.01, 2));
        assert!(RunConfig::parse("nonsense=1").is_err());
        assert!(RunConfig::parse("q").is_err());
        assert!(RunConfig::parse("levels=two").is_err());
    }
}
