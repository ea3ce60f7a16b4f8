//! Randomized sweep: eigenvalues of `M + τG` for Ginibre `G`, averaged over
//! samples, with the probabilistic band around the mean.

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{thm2_band, ProbBand};
use crate::error::{Error, Result};
use crate::numkernel::{self, ComplexDense, C64};
use crate::rng::stream_rng;
use crate::serde_num;
use crate::sweep::{check_grid, default_delta, log_grid};

/// Ginibre matrix: real and imaginary parts i.i.d. `N(0, 1/(2n))`, drawn
/// row-major (real part first) from stream `stream` of `seed`.
pub fn sample_ginibre(n: usize, seed: u64, stream: u64) -> ComplexDense {
    let mut rng = stream_rng(seed, stream);
    let normal = Normal::new(0.0, (0.5 / n.max(1) as f64).sqrt()).expect("positive variance");
    let v: Vec<C64> = (0..n * n)
        .map(|_| {
            let re = normal.sample(&mut rng);
            let im = normal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    ComplexDense::from_row_major(n, n, &v).expect("finite samples")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GinibreConfig {
    pub samples: usize,
    pub seed: u64,
    pub tau_grid: Vec<f64>,
    /// `‖Δ‖` used for the band.
    pub delta_norm: f64,
    /// Draw a fresh `G` for every τ instead of one per sample.
    pub resample_per_tau: bool,
}

impl Default for GinibreConfig {
    fn default() -> Self {
        Self {
            samples: 10,
            seed: 0,
            tau_grid: log_grid(1e-20, 1e2, 150).unwrap(),
            delta_norm: default_delta(),
            resample_per_tau: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizedCurve {
    pub tau: Vec<f64>,
    #[serde(with = "serde_num::vec_opt_f64")]
    pub mean_min_abs: Vec<Option<f64>>,
    /// `samples × τ`.
    pub per_sample: Vec<PerSample>,
    #[serde(with = "serde_num::vec_opt_f64")]
    pub band_lower: Vec<Option<f64>>,
    #[serde(with = "serde_num::vec_opt_f64")]
    pub band_upper: Vec<Option<f64>>,
    #[serde(with = "serde_num::opt_f64")]
    pub turning_point_tau: Option<f64>,
    pub meta: RandomizedMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerSample(#[serde(with = "serde_num::vec_opt_f64")] pub Vec<Option<f64>>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizedMeta {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(with = "serde_num::f64_tagged")]
    pub delta_norm: f64,
    #[serde(with = "serde_num::f64_tagged")]
    pub alpha_n: f64,
    pub resample_per_tau: bool,
    /// Grid points outside `(0, 1)`.
    pub extrapolated: usize,
    pub gaps: usize,
    #[serde(with = "serde_num::opt_f64")]
    pub h: Option<f64>,
}

fn stream_for(sample: usize, tau_index: usize, resample: bool) -> u64 {
    if resample {
        ((sample as u64) << 32) | tau_index as u64
    } else {
        sample as u64
    }
}

fn min_abs_eig(m: &ComplexDense, g: &ComplexDense, tau: f64) -> Option<f64> {
    let x = m + &g.scale_real(tau);
    let ev = numkernel::eigenvalues(&x).ok()?;
    Some(ev.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min))
}

pub fn run_randomized_sweep(m: &ComplexDense, cfg: &GinibreConfig) -> Result<RandomizedCurve> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("M must be square".into()));
    }
    check_grid(&cfg.tau_grid)?;
    if cfg.samples == 0 || m.nrows() == 0 {
        return Err(Error::DomainError("need n ≥ 1 and at least one sample".into()));
    }
    if !(cfg.delta_norm >= 0.0) {
        return Err(Error::DomainError("‖Δ‖ must be nonnegative".into()));
    }
    let norm = numkernel::opnorm(m)?;
    if norm > 1.0 + 1e-12 {
        return Err(Error::DomainError(format!("‖M‖ = {norm} exceeds 1; normalize first")));
    }
    let n = m.nrows();
    let k = cfg.tau_grid.len();
    let per_sample: Vec<PerSample> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            let fixed = (!cfg.resample_per_tau).then(|| sample_ginibre(n, cfg.seed, stream_for(s, 0, false)));
            let row = cfg
                .tau_grid
                .par_iter()
                .enumerate()
                .map(|(i, &tau)| match &fixed {
                    Some(g) => min_abs_eig(m, g, tau),
                    None => min_abs_eig(m, &sample_ginibre(n, cfg.seed, stream_for(s, i, true)), tau),
                })
                .collect();
            PerSample(row)
        })
        .collect();

    let mean_min_abs: Vec<Option<f64>> = (0..k)
        .map(|i| {
            let vals: Option<Vec<f64>> = per_sample.iter().map(|r| r.0[i]).collect();
            vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
        })
        .collect();
    let pb = ProbBand::new(n, cfg.delta_norm);
    let bands: Vec<Option<(f64, f64)>> = mean_min_abs
        .iter()
        .zip(&cfg.tau_grid)
        .map(|(v, &t)| v.map(|v| {
            let b = thm2_band(v, t, &pb);
            (b.lower, b.upper)
        }))
        .collect();
    let turning_point_tau = mean_min_abs
        .iter()
        .zip(&cfg.tau_grid)
        .find(|(v, &t)| matches!(v, Some(v) if pb.half_width(t) < 0.1 * v))
        .map(|(_, &t)| t);
    let meta = RandomizedMeta {
        n,
        samples: cfg.samples,
        seed: cfg.seed,
        delta_norm: cfg.delta_norm,
        alpha_n: pb.alpha_n,
        resample_per_tau: cfg.resample_per_tau,
        extrapolated: cfg.tau_grid.iter().filter(|&&t| t >= 1.0).count(),
        gaps: mean_min_abs.iter().filter(|v| v.is_none()).count(),
        h: None,
    };
    Ok(RandomizedCurve {
        tau: cfg.tau_grid.clone(),
        mean_min_abs,
        per_sample,
        band_lower: bands.iter().map(|b| b.map(|b| b.0)).collect(),
        band_upper: bands.iter().map(|b| b.map(|b| b.1)).collect(),
        turning_point_tau,
        meta,
    })
}

/// Eigenvalues of `x` with their condition numbers `‖v_i‖‖w_i‖/|w_i*v_i|`.
pub fn eigenvalue_condition_numbers(x: &ComplexDense) -> Result<(Vec<C64>, Vec<f64>)> {
    let es = numkernel::eig(x)?;
    let n = x.nrows();
    // rows of V⁻¹ are the left eigenvectors scaled so that w_i*v_i = 1
    let vinv = numkernel::solve_with_pivot_ratio(&es.right_vectors, &ComplexDense::identity(n), n as f64 * f64::EPSILON)?;
    let kappas = (0..n)
        .map(|i| {
            let w = (0..n).map(|j| vinv.get(i, j).norm_sqr()).sum::<f64>().sqrt();
            let v = es.right_vectors.column(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            w * v
        })
        .collect();
    Ok((es.values, kappas))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BanksEstimate {
    /// Mean over usable samples of `Σ_{|λ_i| ≤ r} κ(λ_i)²`.
    pub estimate: f64,
    pub used: usize,
    pub skipped: usize,
    /// `n² r² / τ²`.
    pub ceiling: f64,
}

/// Monte-Carlo estimate of `E Σ_{|λ_i| ≤ r} κ(λ_i, M + τG)²`. Samples whose
/// eigenvector matrix is numerically singular are skipped and counted.
pub fn banks_statistic(m: &ComplexDense, tau: f64, r: f64, samples: usize, seed: u64) -> Result<BanksEstimate> {
    if !(tau > 0.0) || !(r > 0.0) || samples == 0 {
        return Err(Error::DomainError("need τ > 0, r > 0 and at least one sample".into()));
    }
    let n = m.nrows();
    let results: Vec<Option<f64>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let x = m + &sample_ginibre(n, seed, s as u64).scale_real(tau);
            let (vals, kappas) = eigenvalue_condition_numbers(&x).ok()?;
            Some(vals.iter().zip(&kappas).filter(|(l, _)| l.norm() <= r).map(|(_, k)| k * k).sum())
        })
        .collect();
    let used: Vec<f64> = results.iter().flatten().copied().collect();
    let estimate = if used.is_empty() { f64::NAN } else { used.iter().sum::<f64>() / used.len() as f64 };
    Ok(BanksEstimate {
        estimate,
        used: used.len(),
        skipped: samples - used.len(),
        ceiling: (n * n) as f64 * r * r / (tau * tau),
    })
}
