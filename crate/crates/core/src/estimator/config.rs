use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsys::{evolve_output, LinearSystem};
use crate::rng::stream_rng;

/// Sampling and Monte-Carlo settings of an identification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Sampling period.
    pub dt: f64,
    /// Data length.
    pub n: usize,
    /// Truncation order of the Taylor fit.
    pub q: usize,
    pub noise_sigma: f64,
    pub repeats: usize,
    pub seed: u64,
}

/// `min(floor(0.3 N) + 3, N)`.
pub fn default_q(n: usize) -> usize {
    (3 * n / 10 + 3).min(n)
}

impl ExperimentConfig {
    /// Settings of the five-qubit benchmark: `dt = 0.1`, default `q`,
    /// `sigma = 0.001`.
    pub fn benchmark(n: usize, repeats: usize, seed: u64) -> Self {
        ExperimentConfig {
            dt: 0.1,
            n,
            q: default_q(n),
            noise_sigma: 1e-3,
            repeats,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidModel(format!(
                "N must be at least 2, got {}",
                self.n
            )));
        }
        if self.q < 1 || self.q > self.n {
            return Err(Error::Dimension(format!(
                "q must satisfy 1 <= q <= N, got q = {} with N = {}",
                self.q, self.n
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "noise_sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if self.repeats < 1 {
            return Err(Error::InvalidModel("repeats must be at least 1".into()));
        }
        Ok(())
    }
}

/// Probed entry `(row, col)` of `A` (0-based): `B = e_col`, `C = e_row^T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub row: usize,
    pub col: usize,
}

/// Samples `y(p dt)`, `p = 1..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTrace {
    pub values: Vec<f64>,
    pub dt: f64,
    /// `y(0) = CB`, known exactly from the probe setting.
    pub offset: f64,
    pub source: Option<ProbeEntry>,
}

impl DataTrace {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn probe_source(sys: &LinearSystem) -> Option<ProbeEntry> {
    let single = |it: &mut dyn Iterator<Item = f64>| {
        let v: Vec<f64> = it.collect();
        let ones: Vec<usize> = (0..v.len()).filter(|&i| v[i] == 1.0).collect();
        (ones.len() == 1 && v.iter().filter(|x| **x != 0.0).count() == 1).then(|| ones[0])
    };
    let col = single(&mut sys.b.iter().copied())?;
    let row = single(&mut sys.c.iter().copied())?;
    Some(ProbeEntry { row, col })
}

/// Noisy samples with a generator derived from `cfg.seed` alone.
pub fn simulate_trace(sys: &LinearSystem, cfg: &ExperimentConfig) -> Result<DataTrace> {
    let mut rng = stream_rng(cfg.seed, &[]);
    simulate_trace_with_rng(sys, cfg, &mut rng)
}

pub fn simulate_trace_with_rng<R: Rng + ?Sized>(
    sys: &LinearSystem,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<DataTrace> {
    cfg.validate()?;
    let times: Vec<f64> = (1..=cfg.n).map(|p| p as f64 * cfg.dt).collect();
    let mut values = evolve_output(sys, &times);
    if cfg.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, cfg.noise_sigma).expect("sigma validated");
        for v in &mut values {
            *v += normal.sample(rng);
        }
    }
    Ok(DataTrace {
        values,
        dt: cfg.dt,
        offset: (&sys.c * &sys.b)[(0, 0)],
        source: probe_source(sys),
    })
}
