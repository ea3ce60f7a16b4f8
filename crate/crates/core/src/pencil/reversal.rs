use super::Pencil;
use crate::error::{Error, Result};
use crate::numkernel::{self, ComplexDense, C64, HERM_TOL};

/// Spectrum of `(E + τI)⁻¹A` as a function of τ, i.e. the reciprocals of the
/// eigenvalues of the reversal pencil `λA − (E + τI)`.
///
/// When `E` is Hermitian the eigendecomposition `E = W diag(e) W*` is computed
/// once and every τ evaluates the similar matrix
/// `D^{-1/2} (W*AW) D^{-1/2}` with `D = diag(e + τ)`. The scaling is
/// symmetric, so tiny τ does not blow up one side of the matrix the way the
/// plain solve does. Any other `E` goes through an LU solve per τ.
#[derive(Debug, Clone)]
pub struct ReversalSpectrum {
    route: Route,
}

#[derive(Debug, Clone)]
enum Route {
    Hermitian { w: ComplexDense, e_values: Vec<f64>, a_rot: ComplexDense },
    General { e: ComplexDense, a: ComplexDense },
}

impl ReversalSpectrum {
    pub fn new(p: &Pencil) -> Result<Self> {
        if p.e.hermitian_defect() <= HERM_TOL {
            let he = numkernel::hermitian_eigen(&p.e)?;
            let a_rot = p.a.congruence_adjoint(&he.vectors);
            return Ok(Self { route: Route::Hermitian { w: he.vectors, e_values: he.values, a_rot } });
        }
        Ok(Self { route: Route::General { e: p.e.clone(), a: p.a.clone() } })
    }

    /// Builds the spectrum from a known unitary diagonalization
    /// `E = W diag(e) W*` and `W*AW`.
    pub(crate) fn from_diagonalization(w: ComplexDense, e_values: Vec<f64>, a_rot: ComplexDense) -> Self {
        Self { route: Route::Hermitian { w, e_values, a_rot } }
    }

    pub fn dim(&self) -> usize {
        match &self.route {
            Route::Hermitian { e_values, .. } => e_values.len(),
            Route::General { e, .. } => e.nrows(),
        }
    }

    fn inv_sqrt_shifted(e_values: &[f64], tau: f64) -> Result<Vec<C64>> {
        e_values
            .iter()
            .map(|&ev| {
                let d = ev + tau;
                if d == 0.0 {
                    Err(Error::SingularMatrix(format!("E + τI is singular at τ = {tau:e}")))
                } else {
                    Ok(C64::new(d, 0.0).sqrt().inv())
                }
            })
            .collect()
    }

    /// A matrix similar to `(E + τI)⁻¹A`, plus the similarity `S` with
    /// `(E + τI)⁻¹A = S · M · S⁻¹` when it is not the identity.
    fn similar_matrix(&self, tau: f64) -> Result<(ComplexDense, Option<ComplexDense>)> {
        match &self.route {
            Route::Hermitian { w, e_values, a_rot } => {
                let s = Self::inv_sqrt_shifted(e_values, tau)?;
                let n = s.len();
                let m = ComplexDense::from_fn(n, n, |i, j| a_rot.get(i, j) * s[i] * s[j]);
                if !m.is_finite() {
                    return Err(Error::SingularMatrix(format!("E + τI overflows at τ = {tau:e}")));
                }
                let sim = ComplexDense::from_fn(n, n, |i, j| w.get(i, j) * s[j]);
                Ok((m, Some(sim)))
            }
            Route::General { e, a } => {
                let shifted = e.shift_diagonal(C64::new(tau, 0.0));
                Ok((numkernel::solve(&shifted, a)?, None))
            }
        }
    }

    /// Eigenvalues μ of `λ(E + τI) − A`.
    pub fn eigenvalues(&self, tau: f64) -> Result<Vec<C64>> {
        let (m, _) = self.similar_matrix(tau)?;
        numkernel::eigenvalues(&m)
    }

    /// `1 / max |μ|`, the smallest modulus among reversal eigenvalues; +∞ when
    /// every μ is below 1e-300.
    pub fn min_abs(&self, tau: f64) -> Result<f64> {
        Ok(reciprocal_of_max(&self.eigenvalues(tau)?))
    }

    /// Largest `|μ|`.
    pub fn max_abs_mu(&self, tau: f64) -> Result<f64> {
        Ok(self.eigenvalues(tau)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Reversal minimum together with the eigenvector-condition estimate of
    /// `(E + τI)⁻¹A` itself (eigenvectors are mapped back through the
    /// similarity before normalization).
    pub fn min_abs_and_kappa(&self, tau: f64) -> Result<(f64, f64)> {
        let (m, sim) = self.similar_matrix(tau)?;
        let es = numkernel::eig(&m)?;
        let min_abs = reciprocal_of_max(&es.values);
        let vectors = match sim {
            Some(s) => normalize_columns(&s * &es.right_vectors),
            None => es.right_vectors,
        };
        Ok((min_abs, numkernel::kappa_of_vectors(&vectors)?))
    }

    /// Eigenvector-condition estimate of `(E + τI)⁻¹A`.
    pub fn kappa_v(&self, tau: f64) -> Result<f64> {
        Ok(self.min_abs_and_kappa(tau)?.1)
    }
}

fn reciprocal_of_max(values: &[C64]) -> f64 {
    let max = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max < 1e-300 {
        f64::INFINITY
    } else {
        1.0 / max
    }
}

fn normalize_columns(mut v: ComplexDense) -> ComplexDense {
    for j in 0..v.ncols() {
        let norm = (0..v.nrows()).map(|i| v.get(i, j).norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            for i in 0..v.nrows() {
                let z = v.get(i, j) / norm;
                v.set(i, j, z);
            }
        }
    }
    v
}

/// Smallest absolute eigenvalue of the reversal pencil `λA − (E + τI)`.
pub fn min_abs_eig_reversal(p: &Pencil, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::DomainError(format!("τ must be positive, got {tau:e}")));
    }
    ReversalSpectrum::new(p)?.min_abs(tau)
}
