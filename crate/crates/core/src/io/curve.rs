use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::randomized::RandomizedCurve;
use crate::slope::CurveMarkers;
use crate::sweep::SweepCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveFormat {
    Csv,
    Json,
}

/// Output of either sweep method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "curve", rename_all = "snake_case")]
pub enum Curve {
    Sweep(SweepCurve),
    Randomized(RandomizedCurve),
}

impl Curve {
    pub fn tau(&self) -> &[f64] {
        match self {
            Curve::Sweep(c) => &c.tau,
            Curve::Randomized(c) => &c.tau,
        }
    }

    /// The measured quantity: `min |λ|` along the sweep.
    pub fn value(&self) -> &[Option<f64>] {
        match self {
            Curve::Sweep(c) => &c.value,
            Curve::Randomized(c) => &c.mean_min_abs,
        }
    }

    /// Lower and upper bound columns, when the curve carries any.
    pub fn bounds(&self) -> Option<(&[Option<f64>], &[Option<f64>])> {
        match self {
            Curve::Sweep(c) => match (&c.lower_env, &c.upper_env) {
                (Some(l), Some(u)) => Some((l, u)),
                _ => None,
            },
            Curve::Randomized(c) => {
                (c.meta.delta_norm > 0.0).then_some((c.band_lower.as_slice(), c.band_upper.as_slice()))
            }
        }
    }

    pub fn markers(&self) -> CurveMarkers {
        match self {
            Curve::Sweep(c) => CurveMarkers {
                delta: (c.delta > 0.0).then_some(c.delta),
                tau0: c.tau0.filter(|t| t.is_finite()),
                turning_point: None,
            },
            Curve::Randomized(c) => CurveMarkers { delta: None, tau0: None, turning_point: c.turning_point_tau },
        }
    }
}

fn cell(out: &mut String, v: Option<f64>, trivial_zero: bool) {
    out.push(',');
    if let Some(x) = v {
        let trivial = !x.is_finite() || (trivial_zero && x <= 0.0);
        if !trivial {
            let _ = write!(out, "{x:e}");
        }
    }
}

/// CSV text with columns `tau,value,lower,upper`. Gaps, zero lower bounds and
/// infinite bounds are empty cells.
pub fn curve_csv(curve: &Curve) -> String {
    let mut s = String::from("tau,value,lower,upper\n");
    let bounds = curve.bounds();
    for (k, (&t, &v)) in curve.tau().iter().zip(curve.value()).enumerate() {
        let _ = write!(s, "{t:e}");
        cell(&mut s, v, false);
        cell(&mut s, bounds.and_then(|(l, _)| l[k]), true);
        cell(&mut s, bounds.and_then(|(_, u)| u[k]), true);
        s.push('\n');
    }
    s
}

pub fn write_curve(curve: &Curve, path: &Path, format: CurveFormat) -> Result<()> {
    let text = match format {
        CurveFormat::Csv => curve_csv(curve),
        CurveFormat::Json => serde_json::to_string_pretty(curve)? + "\n",
    };
    super::write_atomic(path, text.as_bytes())
}

/// Reads a curve written in JSON format.
pub fn read_curve(path: &Path) -> Result<Curve> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
