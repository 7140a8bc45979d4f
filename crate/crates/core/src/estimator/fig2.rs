use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{default_q, ExperimentConfig};
use super::format_sig;
use super::identify::identify_hamiltonian;
use crate::error::Result;
use crate::spin_models::{Family, HamiltonianSpec, Measurement};

/// Five-qubit chain used for the data-length sweep.
pub fn benchmark_spec() -> HamiltonianSpec {
    HamiltonianSpec::new(
        Family::ExchangeNoField,
        vec![0.1, 1.5, -0.8, 3.1],
        Measurement::X1,
    )
    .expect("benchmark parameters are valid")
}

pub fn default_grid() -> Vec<usize> {
    (1..=10).map(|k| 10 * k).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig2Settings {
    pub dt: f64,
    pub noise_sigma: f64,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for Fig2Settings {
    fn default() -> Self {
        Fig2Settings {
            dt: 0.1,
            noise_sigma: 1e-3,
            repeats: 100,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub n: usize,
    pub mean_rel_error: f64,
    /// Sample standard deviation across repeats (0 for a single repeat).
    pub std_rel_error: f64,
    pub repeats: usize,
    pub seed: u64,
    /// Mean of the estimates, useful to read off magnitudes.
    pub mean_theta_hat: Vec<f64>,
}

/// Mean relative error `||H_hat - H||_F / ||H||_F` per data length.
pub fn run_fig2_experiment(
    spec: &HamiltonianSpec,
    grid: &[usize],
    settings: &Fig2Settings,
) -> Result<Vec<Fig2Row>> {
    grid.iter()
        .map(|&n| {
            let cfg = ExperimentConfig {
                dt: settings.dt,
                n,
                q: default_q(n),
                noise_sigma: settings.noise_sigma,
                repeats: settings.repeats,
                seed: settings.seed,
            };
            cfg.validate()?;
            let runs: Vec<(f64, Vec<f64>)> = (0..settings.repeats)
                .into_par_iter()
                .map(|rep| {
                    identify_hamiltonian(spec, &cfg, rep)
                        .map(|r| (r.relative_error.expect("truth known"), r.theta_hat))
                })
                .collect::<Result<_>>()?;
            let count = runs.len() as f64;
            let mean = runs.iter().map(|r| r.0).sum::<f64>() / count;
            let std = if runs.len() > 1 {
                (runs.iter().map(|r| (r.0 - mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
            } else {
                0.0
            };
            let mean_theta_hat = (0..spec.n())
                .map(|i| runs.iter().map(|r| r.1[i]).sum::<f64>() / count)
                .collect();
            Ok(Fig2Row {
                n,
                mean_rel_error: mean,
                std_rel_error: std,
                repeats: settings.repeats,
                seed: settings.seed,
                mean_theta_hat,
            })
        })
        .collect()
}

pub fn write_fig2_csv<W: Write>(out: &mut W, rows: &[Fig2Row]) -> std::io::Result<()> {
    writeln!(out, "N,mean_rel_error,std_rel_error,repeats,seed")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            format_sig(r.mean_rel_error),
            format_sig(r.std_rel_error),
            r.repeats,
            r.seed
        )?;
    }
    Ok(())
}
