//! Flat `key = value` model files.
//!
//! ```text
//! # five-qubit chain
//! family = exchange_no_field
//! n = 4
//! theta = 0.1, 1.5, -0.8, 3.1
//! measurement = X1
//! dt = 0.1
//! N = 100
//! ```
//!
//! One pair per line; `#` starts a comment; keys are case-sensitive. Recognised
//! keys: `family`, `n`, `theta`, `measurement`, `dt`, `N`, `q`, `noise_sigma`,
//! `repeats`, `seed`. Only `family` and `theta` are required. `n`, when given,
//! must equal the number of `theta` entries. `q` defaults to
//! `min(floor(0.3 N) + 3, N)`.

use spinid_core::estimator::{default_q, ExperimentConfig};
use spinid_core::{Error, Family, HamiltonianSpec, Measurement, Result};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub family: Family,
    pub theta: Vec<f64>,
    pub measurement: Measurement,
    pub dt: f64,
    pub samples: usize,
    pub q: Option<usize>,
    pub noise_sigma: f64,
    pub repeats: usize,
    pub seed: u64,
}

#[derive(Default)]
struct Partial {
    family: Option<Family>,
    n: Option<usize>,
    theta: Option<Vec<f64>>,
    measurement: Option<Measurement>,
    dt: Option<f64>,
    samples: Option<usize>,
    q: Option<usize>,
    noise_sigma: Option<f64>,
    repeats: Option<usize>,
    seed: Option<u64>,
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("key '{key}': cannot parse '{}'", value.trim())))
}

fn theta_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| number::<f64>("theta", v))
        .collect::<Result<Vec<_>>>()
        .and_then(|t| {
            if t.iter().all(|x| x.is_finite()) {
                Ok(t)
            } else {
                Err(Error::Parse("key 'theta': entries must be finite".into()))
            }
        })
}

impl Partial {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "family" => self.family = Some(value.parse()?),
            "n" => self.n = Some(number(key, value)?),
            "theta" => self.theta = Some(theta_list(value)?),
            "measurement" => self.measurement = Some(value.parse()?),
            "dt" => self.dt = Some(number(key, value)?),
            "N" => self.samples = Some(number(key, value)?),
            "q" => self.q = Some(number(key, value)?),
            "noise_sigma" => self.noise_sigma = Some(number(key, value)?),
            "repeats" => self.repeats = Some(number(key, value)?),
            "seed" => self.seed = Some(number(key, value)?),
            other => return Err(Error::Parse(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    fn finish(self) -> Result<SpecFile> {
        let family = self
            .family
            .ok_or_else(|| Error::Parse("missing key 'family'".into()))?;
        let theta = self
            .theta
            .ok_or_else(|| Error::Parse("missing key 'theta'".into()))?;
        if let Some(n) = self.n {
            if n != theta.len() {
                return Err(Error::Dimension(format!(
                    "n = {n} but theta has {} entries",
                    theta.len()
                )));
            }
        }
        let bench = ExperimentConfig::benchmark(100, 100, 42);
        Ok(SpecFile {
            family,
            theta,
            measurement: self.measurement.unwrap_or(Measurement::X1),
            dt: self.dt.unwrap_or(bench.dt),
            samples: self.samples.unwrap_or(bench.n),
            q: self.q,
            noise_sigma: self.noise_sigma.unwrap_or(bench.noise_sigma),
            repeats: self.repeats.unwrap_or(bench.repeats),
            seed: self.seed.unwrap_or(bench.seed),
        })
    }
}

fn split_line(line: &str, lineno: usize) -> Result<Option<(&str, &str)>> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(None);
    }
    let (key, value) = body
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("line {lineno}: expected 'key = value'")))?;
    Ok(Some((key.trim(), value.trim())))
}

/// `KEY=VALUE` from the command line.
pub fn split_override(text: &str) -> Result<(&str, &str)> {
    text.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| Error::Parse(format!("override '{text}' is not KEY=VALUE")))
}

pub fn parse_spec_with(text: &str, overrides: &[String]) -> Result<SpecFile> {
    let mut partial = Partial::default();
    let mut seen = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some((key, value)) = split_line(line, i + 1)? {
            if seen.contains(&key) {
                return Err(Error::Parse(format!(
                    "line {}: duplicate key '{key}'",
                    i + 1
                )));
            }
            seen.push(key);
            partial.set(key, value)?;
        }
    }
    for o in overrides {
        let (key, value) = split_override(o)?;
        partial.set(key, value)?;
    }
    partial.finish()
}

pub fn parse_spec(text: &str) -> Result<SpecFile> {
    parse_spec_with(text, &[])
}

impl SpecFile {
    pub fn hamiltonian(&self) -> Result<HamiltonianSpec> {
        HamiltonianSpec::new(self.family, self.theta.clone(), self.measurement)
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            dt: self.dt,
            n: self.samples,
            q: self.q.unwrap_or_else(|| default_q(self.samples)),
            noise_sigma: self.noise_sigma,
            repeats: self.repeats,
            seed: self.seed,
        }
    }

    /// Canonical text form; floats use the shortest round-trip representation.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let theta: Vec<String> = self.theta.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(out, "family = {}", self.family);
        let _ = writeln!(out, "n = {}", self.theta.len());
        let _ = writeln!(out, "theta = {}", theta.join(", "));
        let _ = writeln!(out, "measurement = {}", self.measurement);
        let _ = writeln!(out, "dt = {}", self.dt);
        let _ = writeln!(out, "N = {}", self.samples);
        if let Some(q) = self.q {
            let _ = writeln!(out, "q = {q}");
        }
        let _ = writeln!(out, "noise_sigma = {}", self.noise_sigma);
        let _ = writeln!(out, "repeats = {}", self.repeats);
        let _ = writeln!(out, "seed = {}", self.seed);
        out
    }
}
