//! Deterministic τ-sweep of the reversal minimum with optional perturbations
//! and bound envelopes.
//!
//! The measured curve is `τ ↦ 1/max|μ(τ)|` for the (possibly perturbed)
//! pencil. Envelopes come from the reference pencil: `E` truncated at the
//! rank tolerance and `A22` set to zero, the nearest pencil with the
//! index-two block pattern. Its distance to the input is recorded in the
//! metadata and is expected to be covered by `δ`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench;
use crate::bounds::{self, BoundEnvelope, Regime};
use crate::error::{Error, Result};
use crate::numkernel::{self, ComplexDense};
use crate::pencil::{
    self, check_index2_structure_split, project_blocks, tau0_estimate, BlockForm, PHPencil, Pencil,
    ReversalSpectrum, StructureReport, StructureVerdict,
};
use crate::serde_num;

pub const DEFAULT_TAU_MIN: f64 = 1e-20;
pub const DEFAULT_TAU_MAX: f64 = 1e2;
pub const DEFAULT_POINTS: usize = 150;

pub fn default_delta() -> f64 {
    (-15f64).exp()
}

/// `points` values from `min` to `max`, equally spaced in `log τ`.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0) || !(max > min) || points < 2 {
        return Err(Error::DomainError(format!(
            "log grid needs 0 < min < max and ≥ 2 points, got [{min:e}, {max:e}] × {points}"
        )));
    }
    let (a, b) = (min.log10(), max.log10());
    let step = (b - a) / (points - 1) as f64;
    let mut g: Vec<f64> = (0..points).map(|i| 10f64.powf(a + step * i as f64)).collect();
    g[0] = min;
    g[points - 1] = max;
    Ok(g)
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::DomainError("τ grid must be nonempty, finite and positive".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DomainError("τ grid must be strictly ascending".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeKind {
    None,
    Thm1,
    DeltaE0,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub tau_grid: Vec<f64>,
    pub delta: f64,
    pub envelope: EnvelopeKind,
    /// `(ΔE, ΔA)` added to the pencil after scaling.
    pub perturbation: Option<(ComplexDense, ComplexDense)>,
    /// Multiplies both `E` and `A`.
    pub scale: f64,
    pub rank_tol: Option<f64>,
    /// Rank threshold for `A12`, `A21`; `None` means `1e-10‖A‖`. The `‖A22‖`
    /// test uses the larger of this and `δ`.
    pub structure_tol: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            tau_grid: log_grid(DEFAULT_TAU_MIN, DEFAULT_TAU_MAX, DEFAULT_POINTS).unwrap(),
            delta: default_delta(),
            envelope: EnvelopeKind::Thm1,
            perturbation: None,
            scale: 1.0,
            rank_tol: None,
            structure_tol: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    #[serde(with = "serde_num::f64_tagged")]
    pub scale: f64,
    #[serde(with = "serde_num::opt_f64")]
    pub rank_tol: Option<f64>,
    pub n: usize,
    pub n1: Option<usize>,
    /// Largest eigenvalue of `E` dropped by the rank decision.
    #[serde(with = "serde_num::opt_f64")]
    pub dropped_e: Option<f64>,
    /// `‖A22‖` removed to form the reference pencil.
    #[serde(with = "serde_num::opt_f64")]
    pub removed_a22: Option<f64>,
    pub structure: Option<StructureReport>,
    pub regime: Option<Regime>,
    pub gaps: usize,
    pub notes: Vec<String>,
    #[serde(with = "serde_num::opt_f64")]
    pub variance: Option<f64>,
    #[serde(with = "serde_num::opt_f64")]
    pub measured_delta: Option<f64>,
    pub seed: Option<u64>,
    #[serde(with = "serde_num::opt_f64")]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub tau: Vec<f64>,
    /// `1/|λ(τ)|`; `None` marks a failed grid point.
    #[serde(with = "serde_num::vec_opt_f64")]
    pub value: Vec<Option<f64>>,
    /// Envelope on the same reciprocal scale; `None` entries carry no bound.
    #[serde(with = "serde_num::opt_vec_opt_f64")]
    pub lower_env: Option<Vec<Option<f64>>>,
    #[serde(with = "serde_num::opt_vec_opt_f64")]
    pub upper_env: Option<Vec<Option<f64>>>,
    #[serde(with = "serde_num::opt_f64")]
    pub tau0: Option<f64>,
    #[serde(with = "serde_num::f64_tagged")]
    pub delta: f64,
    pub meta: SweepMeta,
}

enum Env<'a> {
    None,
    Thm1,
    DeltaE0,
    Ph { e: &'a ComplexDense, j: &'a ComplexDense, weight: Option<&'a ComplexDense>, r_zero: bool },
}

impl Env<'_> {
    fn regime(&self) -> Option<Regime> {
        match self {
            Env::None => None,
            Env::Thm1 => Some(Regime::Thm1),
            Env::DeltaE0 => Some(Regime::CorDeltaE0),
            Env::Ph { weight: Some(_), .. } => Some(Regime::CorPhQweighted),
            Env::Ph { weight: None, .. } => Some(Regime::CorPhQi),
        }
    }
}

/// Method-1 sweep of `p`.
pub fn run_sweep(p: &Pencil, cfg: &SweepConfig) -> Result<SweepCurve> {
    let env = match cfg.envelope {
        EnvelopeKind::None => Env::None,
        EnvelopeKind::Thm1 => Env::Thm1,
        EnvelopeKind::DeltaE0 => Env::DeltaE0,
    };
    sweep_impl(p, cfg, env)
}

/// Method-1 sweep of a port-Hamiltonian pencil. The eigenvalues are computed
/// on the `Q = I` reduction (similar to the original, so the curve is the
/// same). With `weighted` the envelope norms are taken in the Q-inner product
/// of the original coordinates, otherwise on the reduced `E`, `J`.
pub fn run_ph_sweep(ph: &PHPencil, cfg: &SweepConfig, weighted: bool) -> Result<SweepCurve> {
    ph.check_invariants()?;
    let red = pencil::ph_to_identity_q(ph)?;
    let p = red.pencil();
    let s = cfg.scale;
    let (e, j) = if weighted { (ph.e.scale_real(s), ph.jq().scale_real(s)) } else { (red.ph.e.scale_real(s), red.ph.j.scale_real(s)) };
    let env = if cfg.envelope == EnvelopeKind::None {
        Env::None
    } else {
        Env::Ph { e: &e, j: &j, weight: weighted.then_some(&ph.q), r_zero: ph.r.max_abs() == 0.0 }
    };
    sweep_impl(&p, cfg, env)
}

fn sweep_impl(input: &Pencil, cfg: &SweepConfig, env: Env) -> Result<SweepCurve> {
    check_grid(&cfg.tau_grid)?;
    if !(cfg.delta >= 0.0) || !(cfg.scale > 0.0) || !cfg.scale.is_finite() {
        return Err(Error::DomainError("δ must be ≥ 0 and scale > 0".into()));
    }
    let p = if cfg.scale == 1.0 { input.clone() } else { input.scaled(cfg.scale) };
    let n = p.dim();
    let mut meta = SweepMeta { scale: cfg.scale, rank_tol: cfg.rank_tol, n, regime: env.regime(), ..Default::default() };

    let measured = match &cfg.perturbation {
        Some((de, da)) => {
            let (ne, na) = (numkernel::opnorm(de)?, numkernel::opnorm(da)?);
            let slack = cfg.delta * (1.0 + 1e-12);
            if ne > slack || na > slack {
                return Err(Error::DomainError(format!(
                    "perturbation norms ({ne:e}, {na:e}) exceed δ = {:e}",
                    cfg.delta
                )));
            }
            p.perturbed(de, da)?
        }
        None => p.clone(),
    };

    let a_norm = numkernel::opnorm(&p.a)?;
    let blocks = match project_blocks(&p, cfg.rank_tol) {
        Ok(b) => Some(b),
        Err(e @ (Error::NotSemidefinite { .. } | Error::NotHermitian { .. } | Error::AllRankDeficient)) => {
            meta.notes.push(format!("no block split: {e}"));
            None
        }
        Err(e) => return Err(e),
    };

    let mut tau0 = None;
    let mut reference: Option<BlockForm> = None;
    if let Some(b) = &blocks {
        let rank_tol = cfg.structure_tol.unwrap_or(1e-10 * a_norm);
        let report = check_index2_structure_split(b, rank_tol, rank_tol.max(cfg.delta))?;
        meta.n1 = Some(b.n1);
        meta.dropped_e = Some(b.dropped_norm());
        if report.verdict == StructureVerdict::Index2Candidate {
            let r = b.with_zero_a22();
            let descending: Vec<f64> = cfg.tau_grid.iter().rev().copied().collect();
            tau0 = Some(tau0_estimate(&p, &r, &descending)?);
            meta.removed_a22 = Some(report.a22_norm);
            reference = Some(r);
        } else {
            meta.notes.push(format!("structure verdict {:?}: no τ₀ and no envelope", report.verdict));
        }
        meta.structure = Some(report);
    }

    let env_active = match (&env, &reference) {
        (Env::None, _) | (_, None) => false,
        (_, Some(r)) if cfg.delta >= r.e11_sigma_min() => {
            meta.notes.push("δ ≥ σ_min(E11): envelope hypothesis fails".into());
            false
        }
        _ => true,
    };
    if !env_active {
        meta.regime = None;
    }

    let spectrum = ReversalSpectrum::new(&measured)?;
    let same = cfg.perturbation.is_none()
        && reference.as_ref().is_some_and(|r| r.dropped_norm() == 0.0 && meta.removed_a22 == Some(0.0));
    let ref_spectrum = if env_active { reference.as_ref().map(|r| r.truncated_spectrum()) } else { None };
    let e_norm = match &env {
        Env::Ph { e, weight: Some(w), .. } => numkernel::weighted_opnorm(e, w)?,
        Env::Ph { e, .. } => numkernel::opnorm(e)?,
        _ => 0.0,
    };
    let t0 = tau0.unwrap_or(0.0);

    let rows: Vec<(Option<f64>, Option<BoundEnvelope>)> = cfg
        .tau_grid
        .par_iter()
        .map(|&tau| {
            let in_window = env_active && tau < t0;
            // γ vanishes at δ = 0 whatever κ_V is
            let kappa_needed = in_window && cfg.delta > 0.0 && !matches!(env, Env::Ph { r_zero: true, .. });
            let (value, kappa) = if same && kappa_needed {
                match spectrum.min_abs_and_kappa(tau) {
                    Ok((v, k)) => (Some(v), Some(k)),
                    Err(_) => (None, None),
                }
            } else {
                let v = spectrum.min_abs(tau).ok();
                let k = if kappa_needed { ref_spectrum.as_ref().and_then(|s| s.kappa_v(tau).ok()) } else { None };
                (v, k)
            };
            let kappa = if cfg.delta == 0.0 { Some(f64::NAN) } else { kappa };
            let envelope = if in_window {
                envelope_at(&env, reference.as_ref().unwrap(), tau, cfg.delta, kappa, a_norm, e_norm)
            } else {
                None
            };
            (value, envelope)
        })
        .collect();

    let value: Vec<Option<f64>> = rows.iter().map(|r| r.0).collect();
    meta.gaps = value.iter().filter(|v| v.is_none()).count();
    let (lower_env, upper_env) = if env_active {
        let (lo, hi): (Vec<_>, Vec<_>) = rows
            .iter()
            .map(|r| r.1.map(|e| e.reciprocal()).unwrap_or((None, None)))
            .unzip();
        (Some(lo), Some(hi))
    } else {
        (None, None)
    };
    Ok(SweepCurve { tau: cfg.tau_grid.clone(), value, lower_env, upper_env, tau0, delta: cfg.delta, meta })
}

fn envelope_at(
    env: &Env,
    b: &BlockForm,
    tau: f64,
    delta: f64,
    kappa: Option<f64>,
    a_norm: f64,
    e_norm: f64,
) -> Option<BoundEnvelope> {
    match env {
        Env::None => None,
        Env::Thm1 => {
            let g = bounds::gamma(delta, tau, kappa?, a_norm).ok()?;
            bounds::thm1_envelope(b, tau, g).ok()
        }
        Env::DeltaE0 => {
            let g = bounds::gamma_delta_e0(delta, tau, kappa?).ok()?;
            let mut e = bounds::thm1_envelope(b, tau, g).ok()?;
            e.regime = Regime::CorDeltaE0;
            Some(e)
        }
        Env::Ph { e, j, weight, r_zero } => {
            let k = if *r_zero { bounds::kappa_v_ph_bound(e_norm, tau).ok()? } else { kappa? };
            let g = bounds::gamma(delta, tau, k, a_norm).ok()?;
            bounds::ph_envelope(e, j, b, tau, g, *weight).ok()
        }
    }
}

/// One sweep per entry variance: `ΔA` has i.i.d. real Gaussian entries of
/// that variance (stream `i` of `seed`), `ΔE = 0`, and the `ΔE = 0`
/// envelope uses `δ = ‖ΔA‖`.
pub fn run_perturbation_study(p: &Pencil, variances: &[f64], cfg: &SweepConfig, seed: u64) -> Result<Vec<SweepCurve>> {
    variances
        .iter()
        .enumerate()
        .map(|(i, &var)| {
            let mut rng = crate::rng::stream_rng(seed, i as u64);
            perturbed_sweep(p, var, cfg, &mut rng).map(|mut c| {
                c.meta.seed = Some(seed);
                c
            })
        })
        .collect()
}

fn perturbed_sweep<R: Rng + ?Sized>(p: &Pencil, variance: f64, cfg: &SweepConfig, rng: &mut R) -> Result<SweepCurve> {
    if !(variance >= 0.0) {
        return Err(Error::DomainError(format!("variance must be nonnegative, got {variance:e}")));
    }
    let n = p.dim();
    let mut c = cfg.clone();
    c.envelope = EnvelopeKind::DeltaE0;
    if variance == 0.0 {
        c.perturbation = None;
        c.delta = 0.0;
    } else {
        let da = bench::gaussian_perturbation(n, variance, rng)?;
        c.delta = numkernel::opnorm(&da)?;
        c.perturbation = Some((ComplexDense::zeros(n, n), da));
    }
    let mut curve = run_sweep(p, &c)?;
    curve.meta.variance = Some(variance);
    curve.meta.measured_delta = Some(c.delta);
    Ok(curve)
}
