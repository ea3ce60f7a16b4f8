use serde::{Deserialize, Serialize};

use super::{Pencil, ReversalSpectrum};
use crate::error::{Error, Result};
use crate::numkernel::{self, cr, ComplexDense, HERM_TOL};

pub const TAU0_BISECTION_STEPS: usize = 30;

/// Unitary split of a pencil along `ran E ⊕ ker E`:
///
/// ```text
/// U*EU = [E11 0; 0 0],   U*AU = [A11 A12; A21 A22]
/// ```
///
/// `E11` is diagonal with the eigenvalues of `E` above `rank_tol`, sorted
/// descending. Eigenvalues at or below `rank_tol` are dropped from the
/// E-part; [`BlockForm::dropped_norm`] reports the implied `‖ΔE‖`.
#[derive(Debug, Clone)]
pub struct BlockForm {
    pub u: ComplexDense,
    pub n1: usize,
    pub e11: ComplexDense,
    pub a11: ComplexDense,
    pub a12: ComplexDense,
    pub a21: ComplexDense,
    pub a22: ComplexDense,
    pub rank_tol: f64,
    /// All eigenvalues of `E`, descending.
    pub e_eigenvalues: Vec<f64>,
    /// `U*AU` in full.
    pub a_rot: ComplexDense,
    /// `‖A‖`.
    pub a_norm: f64,
}

impl BlockForm {
    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// Size of the kernel block.
    pub fn n2(&self) -> usize {
        self.dim() - self.n1
    }

    /// Largest dropped eigenvalue of `E` in modulus (the `‖ΔE‖` implied by the
    /// rank decision).
    pub fn dropped_norm(&self) -> f64 {
        self.e_eigenvalues[self.n1..].iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Smallest retained eigenvalue, `σ_min(E11)` (0 when nothing is retained).
    pub fn e11_sigma_min(&self) -> f64 {
        if self.n1 == 0 {
            0.0
        } else {
            self.e_eigenvalues[self.n1 - 1]
        }
    }

    /// `‖E11‖`.
    pub fn e11_norm(&self) -> f64 {
        if self.n1 == 0 {
            0.0
        } else {
            self.e_eigenvalues[0]
        }
    }

    fn truncated_e_values(&self) -> Vec<f64> {
        let mut d = self.e_eigenvalues.clone();
        for v in d.iter_mut().skip(self.n1) {
            *v = 0.0;
        }
        d
    }

    /// `U diag(E11, 0) U*` and `U [A11 A12; A21 A22] U*`.
    pub fn reassemble(&self) -> Pencil {
        let n = self.dim();
        let d = self.truncated_e_values();
        let scaled = ComplexDense::from_fn(n, n, |i, j| self.u.get(i, j) * d[j]);
        let e = &scaled * &self.u.adjoint();
        let blocks = ComplexDense::from_blocks(&self.a11, &self.a12, &self.a21, &self.a22)
            .expect("blocks conform by construction");
        let a = &(&self.u * &blocks) * &self.u.adjoint();
        Pencil { e, a }
    }

    /// The same split with `A22` replaced by zero: the nearest pencil with
    /// the index-two block pattern.
    pub fn with_zero_a22(&self) -> BlockForm {
        let mut out = self.clone();
        let n1 = self.n1;
        for i in n1..self.dim() {
            for j in n1..self.dim() {
                out.a_rot.set(i, j, cr(0.0));
            }
        }
        out.a22 = ComplexDense::zeros(self.n2(), self.n2());
        out
    }

    /// Reversal spectrum of the rank-truncated pencil `λ U diag(E11,0) U* − A`.
    pub fn truncated_spectrum(&self) -> ReversalSpectrum {
        ReversalSpectrum::from_diagonalization(
            self.u.clone(),
            self.truncated_e_values(),
            self.a_rot.clone(),
        )
    }
}

/// `n · ε · ‖E‖`.
pub fn default_rank_tol(e: &ComplexDense) -> Result<f64> {
    Ok(e.nrows() as f64 * f64::EPSILON * numkernel::opnorm(e)?)
}

/// Splits `p` along the range and kernel of the Hermitian semidefinite `E`.
///
/// `rank_tol = None` uses [`default_rank_tol`]. Exactly diagonal `E` is split
/// by a permutation so structural zeros stay exact.
pub fn project_blocks(p: &Pencil, rank_tol: Option<f64>) -> Result<BlockForm> {
    let n = p.dim();
    let (mut values, mut u) = if p.e.is_diagonal() {
        let d: Vec<f64> = p.e.diagonal().iter().map(|z| z.re).collect();
        if p.e.diagonal().iter().any(|z| z.im != 0.0) {
            return Err(Error::NotHermitian { defect: 1.0 });
        }
        (d, ComplexDense::identity(n))
    } else {
        let he = numkernel::hermitian_eigen(&p.e)?;
        (he.values, he.vectors)
    };
    let e_norm = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if n > 0 && min < -HERM_TOL * e_norm {
        return Err(Error::NotSemidefinite { min_eigenvalue: min });
    }

    // descending order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap().then(i.cmp(&j)));
    values = order.iter().map(|&i| values[i]).collect();
    u = u.select_columns(&order);

    let rank_tol = match rank_tol {
        Some(t) => t,
        None => n as f64 * f64::EPSILON * e_norm,
    };
    let n1 = values.iter().filter(|&&v| v > rank_tol).count();
    let a_norm = numkernel::opnorm(&p.a)?;
    if n1 == 0 && numkernel::sigma_min(&p.a)? <= n as f64 * f64::EPSILON * a_norm {
        return Err(Error::AllRankDeficient);
    }

    let a_rot = p.a.congruence_adjoint(&u);
    let n2 = n - n1;
    let e11 = ComplexDense::from_fn(n1, n1, |i, j| if i == j { cr(values[i]) } else { cr(0.0) });
    Ok(BlockForm {
        a11: a_rot.submatrix(0, 0, n1, n1),
        a12: a_rot.submatrix(0, n1, n1, n2),
        a21: a_rot.submatrix(n1, 0, n2, n1),
        a22: a_rot.submatrix(n1, n1, n2, n2),
        u,
        n1,
        e11,
        rank_tol,
        e_eigenvalues: values,
        a_rot,
        a_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructureVerdict {
    Index2Candidate,
    SimpleInfinityBlocksPresent,
    NotApplicable,
}

/// Computable necessary conditions for index two without simple infinite
/// blocks: `A22 = 0`, `A12` full column rank, `A21` full row rank, and a
/// nontrivial kernel of `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub n: usize,
    pub n1: usize,
    pub rank_tol: f64,
    pub a22_tol: f64,
    pub a22_norm: f64,
    pub a12_full_column_rank: bool,
    pub a21_full_row_rank: bool,
    pub e11_sigma_min: f64,
    pub n1_less_than_n: bool,
    pub verdict: StructureVerdict,
}

/// `tol = None` means `1e-10 · ‖A‖`.
pub fn check_index2_structure(b: &BlockForm, tol: Option<f64>) -> Result<StructureReport> {
    let tol = tol.unwrap_or(1e-10 * b.a_norm);
    check_index2_structure_split(b, tol, tol)
}

/// As [`check_index2_structure`] with separate thresholds for the rank tests
/// on `A12`, `A21` and for `‖A22‖`.
pub fn check_index2_structure_split(b: &BlockForm, rank_tol: f64, a22_tol: f64) -> Result<StructureReport> {
    let (n1, n2) = (b.n1, b.n2());
    let a22_norm = numkernel::opnorm(&b.a22)?;
    // A12 is n1×n2 and A21 is n2×n1; both need rank n2.
    let full_rank = |m: &ComplexDense| -> Result<bool> {
        if n2 == 0 {
            return Ok(true);
        }
        if n1 < n2 {
            return Ok(false);
        }
        Ok(numkernel::singular_values(m)?[n2 - 1] > rank_tol)
    };
    let a12_full_column_rank = full_rank(&b.a12)?;
    let a21_full_row_rank = full_rank(&b.a21)?;
    let n1_less_than_n = n2 > 0;
    let verdict = if !n1_less_than_n {
        StructureVerdict::NotApplicable
    } else if a22_norm > a22_tol {
        StructureVerdict::SimpleInfinityBlocksPresent
    } else if a12_full_column_rank && a21_full_row_rank {
        StructureVerdict::Index2Candidate
    } else {
        StructureVerdict::NotApplicable
    };
    Ok(StructureReport {
        n: b.dim(),
        n1,
        rank_tol,
        a22_tol,
        a22_norm,
        a12_full_column_rank,
        a21_full_row_rank,
        e11_sigma_min: b.e11_sigma_min(),
        n1_less_than_n,
        verdict,
    })
}

/// Estimates τ₀, the supremum of τ for which some eigenvalue μ of
/// `λ(E + τI) − A` satisfies `|μ| > ‖A11‖ / (τ + σ_min(E11)/2)`.
///
/// The predicate is evaluated on the rank-truncated pencil described by `b`,
/// scanning `grid` (strictly descending, positive) from the top. The first
/// satisfying point is refined by geometric bisection against its larger
/// neighbour. Returns +∞ when `‖A11‖ ≤ 1e-14 ‖A‖`, the top grid point when it
/// already satisfies the predicate, and 0 when no grid point does. Only the
/// largest satisfying interval is located; disjoint lower intervals are
/// ignored.
pub fn tau0_estimate(p: &Pencil, b: &BlockForm, grid: &[f64]) -> Result<f64> {
    if grid.iter().any(|&t| !(t > 0.0)) || grid.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::DomainError("τ₀ grid must be strictly descending and positive".into()));
    }
    let a_norm = numkernel::opnorm(&p.a)?;
    let a11_norm = numkernel::opnorm(&b.a11)?;
    if a11_norm <= 1e-14 * a_norm {
        return Ok(f64::INFINITY);
    }
    let half_sigma = 0.5 * b.e11_sigma_min();
    let spectrum = b.truncated_spectrum();
    let predicate = |tau: f64| -> Result<bool> {
        Ok(spectrum.max_abs_mu(tau)? > a11_norm / (tau + half_sigma))
    };
    for (k, &tau) in grid.iter().enumerate() {
        if predicate(tau)? {
            if k == 0 {
                return Ok(tau);
            }
            let (mut lo, mut hi) = (tau, grid[k - 1]);
            for _ in 0..TAU0_BISECTION_STEPS {
                let mid = (lo * hi).sqrt();
                if predicate(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(lo);
        }
    }
    Ok(0.0)
}
