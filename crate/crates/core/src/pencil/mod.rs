//! Pencil data model and the structural tools built on it: the orthogonal
//! (ran E, ker E) block split, index-two structure checks, τ₀ estimation,
//! Cayley and port-Hamiltonian transforms, and the reversal spectrum that
//! both sweep drivers observe.

mod blocks;
mod reversal;
mod transforms;

pub use blocks::{
    check_index2_structure, check_index2_structure_split, default_rank_tol, project_blocks, tau0_estimate, BlockForm,
    StructureReport, StructureVerdict, TAU0_BISECTION_STEPS,
};
pub use reversal::{min_abs_eig_reversal, ReversalSpectrum};
pub use transforms::{
    cayley, cayley_with_fallback, normalize_for_ginibre, ph_to_identity_q, shift_for_finite_eig,
    uv_direction, CayleyChoice, QReduction, CAYLEY_MAX_HALVINGS,
};

use crate::error::{Error, Result};
use crate::numkernel::{self, ComplexDense, HERM_TOL};

/// The matrix pencil `λE − A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub e: ComplexDense,
    pub a: ComplexDense,
}

impl Pencil {
    pub fn new(e: ComplexDense, a: ComplexDense) -> Result<Self> {
        if !e.is_square() || !a.is_square() || e.nrows() != a.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "pencil needs square E and A of equal size, got {}x{} and {}x{}",
                e.nrows(),
                e.ncols(),
                a.nrows(),
                a.ncols()
            )));
        }
        if !e.is_finite() || !a.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { e, a })
    }

    pub fn dim(&self) -> usize {
        self.e.nrows()
    }

    /// `(sE, sA)`; leaves every eigenvalue unchanged.
    pub fn scaled(&self, s: f64) -> Self {
        Self { e: self.e.scale_real(s), a: self.a.scale_real(s) }
    }

    /// `(E + ΔE, A + ΔA)`.
    pub fn perturbed(&self, delta_e: &ComplexDense, delta_a: &ComplexDense) -> Result<Self> {
        Self::new(&self.e + delta_e, &self.a + delta_a)
    }

    /// `(S E S*, S A S*)`.
    pub fn congruence(&self, s: &ComplexDense) -> Result<Self> {
        let sh = s.adjoint();
        Self::new(&(s * &self.e) * &sh, &(s * &self.a) * &sh)
    }
}

/// Dissipative Hamiltonian pencil `λE − (J − R)Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PHPencil {
    pub e: ComplexDense,
    pub j: ComplexDense,
    pub r: ComplexDense,
    pub q: ComplexDense,
}

impl PHPencil {
    pub fn new(e: ComplexDense, j: ComplexDense, r: ComplexDense, q: ComplexDense) -> Result<Self> {
        let n = e.nrows();
        for m in [&e, &j, &r, &q] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch("E, J, R, Q must share one square size".into()));
            }
        }
        Ok(Self { e, j, r, q })
    }

    pub fn dim(&self) -> usize {
        self.e.nrows()
    }

    /// The `A = (J − R)Q` matrix of the pencil.
    pub fn a(&self) -> ComplexDense {
        &(&self.j - &self.r) * &self.q
    }

    pub fn to_pencil(&self) -> Pencil {
        Pencil { e: self.e.clone(), a: self.a() }
    }

    /// Skew-Hermitian part of `A` in the `Q`-weighted geometry, i.e. `JQ`.
    pub fn jq(&self) -> ComplexDense {
        &self.j * &self.q
    }

    /// Checks `J = −J*`, `R ⪰ 0` and `Q*E ⪰ 0` at tolerance [`HERM_TOL`].
    pub fn check_invariants(&self) -> Result<()> {
        let jd = self.j.skew_hermitian_defect();
        if jd > HERM_TOL {
            return Err(Error::HypothesisViolated(format!("J is not skew-Hermitian (defect {jd:e})")));
        }
        check_psd(&self.r, "R")?;
        check_psd(&(&self.q.adjoint() * &self.e), "Q*E")?;
        Ok(())
    }
}

pub(crate) fn check_psd(m: &ComplexDense, name: &str) -> Result<()> {
    let defect = m.hermitian_defect();
    if defect > HERM_TOL {
        return Err(Error::HypothesisViolated(format!("{name} is not Hermitian (defect {defect:e})")));
    }
    let he = numkernel::hermitian_eigen(m)?;
    let norm = he.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let min = he.values.first().copied().unwrap_or(0.0);
    if min < -HERM_TOL * norm {
        return Err(Error::HypothesisViolated(format!(
            "{name} has negative eigenvalue {min:e}"
        )));
    }
    Ok(())
}
