//! Closed-form eigenvalue bounds for perturbed index-two pencils and the
//! constants of the probabilistic band.
//!
//! Envelopes are on the `|μ|` scale, where μ is the diverging eigenvalue of
//! `λ(E + τI) − A`. Sweep curves plot `1/|μ|`, so consumers invert.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{self, ComplexDense};
use crate::pencil::BlockForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Thm1,
    CorDeltaE0,
    CorPhQi,
    CorPhQweighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEnvelope {
    pub tau: f64,
    /// May be zero or negative, in which case it carries no information.
    pub lower: f64,
    pub upper: f64,
    pub gamma: f64,
    pub regime: Regime,
}

impl BoundEnvelope {
    pub fn contains(&self, mu_abs: f64) -> bool {
        self.lower <= mu_abs && mu_abs <= self.upper
    }

    /// The envelope on the reciprocal scale `1/|μ|`: `(1/upper, 1/lower)`,
    /// with `None` for a side that carries no information.
    pub fn reciprocal(&self) -> (Option<f64>, Option<f64>) {
        let lo = if self.upper.is_finite() && self.upper > 0.0 { Some(1.0 / self.upper) } else { None };
        let hi = if self.lower > 0.0 { Some(1.0 / self.lower) } else { None };
        (lo, hi)
    }
}

/// `δ κ_V (τ + ‖A‖) / (τ(τ − δ))`.
pub fn gamma(delta: f64, tau: f64, kappa_v: f64, norm_a: f64) -> Result<f64> {
    if !(delta >= 0.0) || !(tau > delta) {
        return Err(Error::DomainError(format!("γ needs 0 ≤ δ < τ, got δ={delta:e}, τ={tau:e}")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    Ok(delta * kappa_v * (tau + norm_a) / (tau * (tau - delta)))
}

/// `δ κ_V / τ`, the sharper form when `ΔE = 0`; valid for every τ > 0.
pub fn gamma_delta_e0(delta: f64, tau: f64, kappa_v: f64) -> Result<f64> {
    if !(tau > 0.0) || !(delta >= 0.0) {
        return Err(Error::DomainError(format!("γ needs τ > 0 and δ ≥ 0, got δ={delta:e}, τ={tau:e}")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    Ok(delta * kappa_v / tau)
}

fn require_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) {
        return Err(Error::DomainError(format!("τ must be positive, got {tau:e}")));
    }
    Ok(())
}

fn require_e11(b: &BlockForm) -> Result<f64> {
    let s = b.e11_sigma_min();
    if !(s > 0.0) {
        return Err(Error::DomainError("σ_min(E11) = 0".into()));
    }
    Ok(s)
}

/// Envelope for `|μ|` built from the coupling `A12 A21` of the block form.
pub fn thm1_envelope(b: &BlockForm, tau: f64, gamma: f64) -> Result<BoundEnvelope> {
    require_tau(tau)?;
    let e11_min = require_e11(b)?;
    let coupling = &b.a12 * &b.a21;
    let s = numkernel::singular_values(&coupling)?;
    // A12·A21 is n1×n1 with rank at most n2; its n2-th singular value is the
    // smallest one that can be nonzero.
    let k = b.n2().min(s.len());
    let c_max = s.first().copied().unwrap_or(0.0);
    let c_min = if k > 0 { s[k - 1] } else { 0.0 };
    let rt = tau.sqrt();
    Ok(BoundEnvelope {
        tau,
        lower: (c_min / (1.5 * b.e11_norm() + 2.0 * tau)).sqrt() / rt - gamma,
        upper: (c_max / (0.5 * e11_min)).sqrt() / rt + gamma,
        gamma,
        regime: Regime::Thm1,
    })
}

/// Port-Hamiltonian envelope. With `weight = Some(W)` the norms of `E` and
/// `J` are taken in the `⟨W·, ·⟩` geometry (pass `JQ` and `W = Q`); `b` is
/// only used for `σ_min(E11)`, which is the same in either geometry.
pub fn ph_envelope(
    e: &ComplexDense,
    j: &ComplexDense,
    b: &BlockForm,
    tau: f64,
    gamma: f64,
    weight: Option<&ComplexDense>,
) -> Result<BoundEnvelope> {
    require_tau(tau)?;
    let e11_min = require_e11(b)?;
    let (e_norm, j_norm, j_min, regime) = match weight {
        Some(w) => {
            let ew = numkernel::weighted_similarity(e, w)?;
            let jw = numkernel::weighted_similarity(j, w)?;
            let s = numkernel::singular_values(&jw)?;
            (numkernel::opnorm(&ew)?, s[0], s[s.len() - 1], Regime::CorPhQweighted)
        }
        None => {
            let s = numkernel::singular_values(j)?;
            (numkernel::opnorm(e)?, s[0], s[s.len() - 1], Regime::CorPhQi)
        }
    };
    let rt = tau.sqrt();
    Ok(BoundEnvelope {
        tau,
        lower: j_min / (1.5 * e_norm + 2.0 * tau).sqrt() / rt - gamma,
        upper: j_norm / (0.5 * e11_min.sqrt()) / rt + gamma,
        gamma,
        regime,
    })
}

/// `(‖E‖ + τ)/τ`, a κ_V surrogate when `R = 0`.
pub fn kappa_v_ph_bound(norm_e: f64, tau: f64) -> Result<f64> {
    require_tau(tau)?;
    Ok((norm_e + tau) / tau)
}

pub fn beta_n(n: usize) -> f64 {
    let n = n as f64;
    let sp = PI.sqrt();
    n * n
        * (33.0 + 20.0 * SQRT_2
            + sp / (2.0 * n.powf(1.5))
            + (4.0 * SQRT_2 + 4.0) / n
            + sp * (8.0 * SQRT_2 + 12.0) / n.sqrt())
}

pub fn alpha_n(n: usize) -> f64 {
    (n as f64 * beta_n(n)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbBand {
    pub n: usize,
    pub delta_norm: f64,
    pub alpha_n: f64,
}

impl ProbBand {
    pub fn new(n: usize, delta_norm: f64) -> Self {
        Self { n, delta_norm, alpha_n: alpha_n(n) }
    }

    pub fn half_width(&self, tau: f64) -> f64 {
        if self.delta_norm == 0.0 {
            0.0
        } else {
            self.alpha_n * self.delta_norm / tau
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
    /// τ lies outside (0, 1), where the band is not backed by the estimate.
    pub extrapolated: bool,
}

pub fn thm2_band(value: f64, tau: f64, pb: &ProbBand) -> Band {
    let w = pb.half_width(tau);
    Band { lower: (value - w).max(0.0), upper: value + w, extrapolated: !(tau > 0.0 && tau < 1.0) }
}
