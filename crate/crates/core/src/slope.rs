//! Log-log slope fitting, segmentation into slope regimes and the index
//! verdict built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_num;

pub const DEFAULT_WINDOW: usize = 9;
pub const DEFAULT_SLOPE_TOL: f64 = 0.1;
pub const DEFAULT_MIN_DECADES: f64 = 1.5;

/// Least-squares slope of `log10 value` against `log10 τ` over one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopePoint {
    /// Geometric mean of the window's τ values.
    pub tau_center: f64,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub slope: f64,
    pub stderr: f64,
}

/// Sliding-window slopes. Windows touching a missing, nonpositive or
/// non-finite value are skipped, so gaps split the fit.
pub fn fit_loglog_slopes(tau: &[f64], value: &[Option<f64>], window: usize) -> Result<Vec<SlopePoint>> {
    if window < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: window });
    }
    if tau.len() != value.len() {
        return Err(Error::DimensionMismatch(format!("{} τ values, {} curve values", tau.len(), value.len())));
    }
    let pts: Vec<Option<(f64, f64)>> = tau
        .iter()
        .zip(value)
        .map(|(&t, v)| match v {
            Some(y) if *y > 0.0 && y.is_finite() && t > 0.0 => Some((t.log10(), y.log10())),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    if pts.len() >= window {
        for start in 0..=pts.len() - window {
            let w: Option<Vec<(f64, f64)>> = pts[start..start + window].iter().copied().collect();
            if let Some(w) = w {
                out.push(fit_window(&w));
            }
        }
    }
    if out.is_empty() {
        let longest = longest_run(&pts);
        return Err(Error::TooFewPoints { needed: window, got: longest });
    }
    Ok(out)
}

fn longest_run(pts: &[Option<(f64, f64)>]) -> usize {
    let (mut best, mut cur) = (0, 0);
    for p in pts {
        cur = if p.is_some() { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best
}

fn fit_window(w: &[(f64, f64)]) -> SlopePoint {
    let k = w.len() as f64;
    let mx = w.iter().map(|p| p.0).sum::<f64>() / k;
    let my = w.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = w.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = w.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = w.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let stderr = (rss / (k - 2.0) / sxx).sqrt();
    SlopePoint {
        tau_center: 10f64.powf(mx),
        tau_lo: 10f64.powf(w[0].0),
        tau_hi: 10f64.powf(w[w.len() - 1].0),
        slope,
        stderr,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlopeLabel {
    Flat,
    Half,
    One,
    Noise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub slope_tol: f64,
    pub min_decades: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { slope_tol: DEFAULT_SLOPE_TOL, min_decades: DEFAULT_MIN_DECADES }
    }
}

pub fn label_of(slope: f64, tol: f64) -> SlopeLabel {
    if (slope - 0.5).abs() <= tol {
        SlopeLabel::Half
    } else if (slope - 1.0).abs() <= tol {
        SlopeLabel::One
    } else if slope.abs() <= tol {
        SlopeLabel::Flat
    } else {
        SlopeLabel::Noise
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeSegment {
    pub tau_start: f64,
    pub tau_end: f64,
    /// Mean slope over the windows whose own label matches the segment.
    pub slope: f64,
    pub slope_std_err: f64,
    pub label: SlopeLabel,
}

impl SlopeSegment {
    pub fn decades(&self) -> f64 {
        (self.tau_end / self.tau_start).log10()
    }

    /// Decades shared with the interval `(lo, hi)`.
    pub fn overlap_decades(&self, lo: f64, hi: f64) -> f64 {
        let a = self.tau_start.max(lo);
        let b = self.tau_end.min(hi);
        if b > a {
            (b / a).log10()
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
struct Run {
    label: SlopeLabel,
    start: f64,
    end: f64,
    members: Vec<SlopePoint>,
}

impl Run {
    fn decades(&self) -> f64 {
        (self.end / self.start).log10()
    }
}

/// Groups consecutive windows by label. Each window owns the cell between the
/// geometric midpoints to its neighbours (the outer cells reach the extreme
/// window ends). Runs shorter than `min_decades` are absorbed into a
/// neighbour, shortest first.
pub fn segment_regions(slopes: &[SlopePoint], tol: &Tolerances) -> Vec<SlopeSegment> {
    if slopes.is_empty() {
        return vec![];
    }
    let k = slopes.len();
    let bounds: Vec<f64> = (0..=k)
        .map(|i| {
            if i == 0 {
                slopes[0].tau_lo
            } else if i == k {
                slopes[k - 1].tau_hi
            } else {
                (slopes[i - 1].tau_center * slopes[i].tau_center).sqrt()
            }
        })
        .collect();
    let mut runs: Vec<Run> = Vec::new();
    for (i, sp) in slopes.iter().enumerate() {
        let label = label_of(sp.slope, tol.slope_tol);
        match runs.last_mut() {
            Some(r) if r.label == label => {
                r.end = bounds[i + 1];
                r.members.push(*sp);
            }
            _ => runs.push(Run { label, start: bounds[i], end: bounds[i + 1], members: vec![*sp] }),
        }
    }
    while runs.len() > 1 {
        let Some((idx, _)) = runs
            .iter()
            .enumerate()
            .filter(|(_, r)| r.decades() < tol.min_decades)
            .min_by(|a, b| a.1.decades().partial_cmp(&b.1.decades()).unwrap())
        else {
            break;
        };
        let left = idx.checked_sub(1);
        let right = (idx + 1 < runs.len()).then_some(idx + 1);
        let target = match (left, right) {
            (Some(l), Some(r)) if runs[l].label == runs[r].label => {
                let short = runs.remove(idx);
                let right_run = runs.remove(idx);
                let l = &mut runs[idx - 1];
                l.end = right_run.end;
                l.members.extend(short.members);
                l.members.extend(right_run.members);
                continue;
            }
            (Some(l), Some(r)) => {
                if runs[l].decades() >= runs[r].decades() {
                    l
                } else {
                    r
                }
            }
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => break,
        };
        let short = runs.remove(idx);
        let t = if target > idx { target - 1 } else { target };
        let r = &mut runs[t];
        r.start = r.start.min(short.start);
        r.end = r.end.max(short.end);
        r.members.extend(short.members);
        r.members.sort_by(|a, b| a.tau_center.partial_cmp(&b.tau_center).unwrap());
    }
    runs.into_iter()
        .map(|r| {
            let core: Vec<f64> = r
                .members
                .iter()
                .filter(|m| label_of(m.slope, tol.slope_tol) == r.label)
                .map(|m| m.slope)
                .collect();
            let used: Vec<f64> = if core.is_empty() { r.members.iter().map(|m| m.slope).collect() } else { core };
            let m = used.len() as f64;
            let mean = used.iter().sum::<f64>() / m;
            let var = if used.len() > 1 { used.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
            SlopeSegment { tau_start: r.start, tau_end: r.end, slope: mean, slope_std_err: (var / m).sqrt(), label: r.label }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Index1,
    Index2,
    Inconclusive,
}

/// Marker positions available on a curve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveMarkers {
    #[serde(with = "serde_num::opt_f64")]
    pub delta: Option<f64>,
    #[serde(with = "serde_num::opt_f64")]
    pub tau0: Option<f64>,
    #[serde(with = "serde_num::opt_f64")]
    pub turning_point: Option<f64>,
}

impl CurveMarkers {
    /// `(max(δ, turning point), τ₀)` with missing markers left open.
    pub fn window(&self) -> (f64, f64) {
        let lo = [self.delta, self.turning_point].iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        let hi = match self.tau0 {
            Some(t) if t > 0.0 => t,
            _ => f64::INFINITY,
        };
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexVerdict {
    pub verdict: Verdict,
    pub half_plateau: Option<SlopeSegment>,
    #[serde(with = "serde_num::opt_f64")]
    pub crossover_tau: Option<f64>,
    pub notes: Vec<String>,
}

pub fn classify_index(segments: &[SlopeSegment], markers: &CurveMarkers, tol: &Tolerances) -> IndexVerdict {
    let (lo, hi) = markers.window();
    let mut notes = Vec::new();
    if lo > 0.0 || hi.is_finite() {
        notes.push(format!("marker window ({lo:.3e}, {hi:.3e})"));
    }
    let qualifies = |s: &&SlopeSegment| s.overlap_decades(lo, hi) >= tol.min_decades;
    let half = segments
        .iter()
        .enumerate()
        .filter(|(_, s)| s.label == SlopeLabel::Half)
        .filter(|(_, s)| qualifies(s))
        .max_by(|a, b| a.1.overlap_decades(lo, hi).partial_cmp(&b.1.overlap_decades(lo, hi)).unwrap());
    let crossover_tau = segments
        .windows(2)
        .find(|w| w[0].label == SlopeLabel::One && w[1].label == SlopeLabel::Half)
        .map(|w| w[0].tau_end);
    if let Some(c) = crossover_tau {
        notes.push(format!(
            "slope changes from 1 to 1/2 at τ ≈ {c:.3e}; a larger value suggests a larger distance to index-two pencils"
        ));
    }
    match half {
        Some((_, seg)) => {
            IndexVerdict { verdict: Verdict::Index2, half_plateau: Some(*seg), crossover_tau, notes }
        }
        None => {
            let one = segments.iter().filter(|s| s.label == SlopeLabel::One).any(|s| qualifies(&s));
            if !one {
                notes.push("no slope plateau spans the required decades".into());
            }
            IndexVerdict {
                verdict: if one { Verdict::Index1 } else { Verdict::Inconclusive },
                half_plateau: None,
                crossover_tau,
                notes,
            }
        }
    }
}

/// Fit, segment and classify in one call.
pub fn classify_curve(
    tau: &[f64],
    value: &[Option<f64>],
    markers: &CurveMarkers,
    window: usize,
    tol: &Tolerances,
) -> Result<(Vec<SlopeSegment>, IndexVerdict)> {
    let slopes = fit_loglog_slopes(tau, value, window)?;
    let segs = segment_regions(&slopes, tol);
    let v = classify_index(&segs, markers, tol);
    Ok((segs, v))
}
