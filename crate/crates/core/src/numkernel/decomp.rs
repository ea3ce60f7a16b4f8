use faer::linalg::solvers::Solve;
use faer::Side;

use super::dense::{ComplexDense, C64};
use crate::error::{Error, Result};

/// Relative residual tolerance used by the decomposition invariants.
pub const RES_TOL: f64 = 1e-10;
/// Relative tolerance for Hermitian and semidefiniteness checks.
pub const HERM_TOL: f64 = 1e-12;
/// Pivot ratio at or below which [`solve`] reports singularity. Only exact
/// (or underflowed) breakdown trips it; callers that need a numerical rank
/// decision use [`solve_with_pivot_ratio`].
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-300;

/// Eigenvalues with unit-norm right eigenvectors stored column-wise.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<C64>,
    pub right_vectors: ComplexDense,
}

/// `M = U · diag(singulars) · V*`, singulars nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdTriple {
    pub u: ComplexDense,
    pub singulars: Vec<f64>,
    pub v: ComplexDense,
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexDense,
}

fn require_square(m: &ComplexDense, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{what} needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

fn require_finite(m: &ComplexDense) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn eig(m: &ComplexDense) -> Result<Eigensystem> {
    require_square(m, "eig")?;
    require_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigensystem { values: vec![], right_vectors: ComplexDense::zeros(0, 0) });
    }
    let evd = m
        .as_mat()
        .eigen()
        .map_err(|e| Error::NonConvergence(format!("eigendecomposition: {e:?}")))?;
    let values: Vec<C64> = (0..n).map(|i| evd.S()[i]).collect();
    let u = evd.U();
    let mut vectors = ComplexDense::from_fn(n, n, |i, j| u[(i, j)]);
    for j in 0..n {
        let norm = (0..n).map(|i| vectors.get(i, j).norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            for i in 0..n {
                let z = vectors.get(i, j) / norm;
                vectors.set(i, j, z);
            }
        }
    }
    Ok(Eigensystem { values, right_vectors: vectors })
}

pub fn eigenvalues(m: &ComplexDense) -> Result<Vec<C64>> {
    require_square(m, "eigenvalues")?;
    require_finite(m)?;
    if m.nrows() == 0 {
        return Ok(vec![]);
    }
    m.as_mat()
        .eigenvalues()
        .map_err(|e| Error::NonConvergence(format!("eigenvalues: {e:?}")))
}

pub fn svd(m: &ComplexDense) -> Result<SvdTriple> {
    require_finite(m)?;
    let (r, c) = (m.nrows(), m.ncols());
    if r == 0 || c == 0 {
        return Ok(SvdTriple {
            u: ComplexDense::identity(r),
            singulars: vec![],
            v: ComplexDense::identity(c),
        });
    }
    let s = m
        .as_mat()
        .svd()
        .map_err(|e| Error::NonConvergence(format!("svd: {e:?}")))?;
    let k = r.min(c);
    let singulars = (0..k).map(|i| s.S()[i].re).collect();
    let (u, v) = (s.U(), s.V());
    Ok(SvdTriple {
        u: ComplexDense::from_fn(r, r, |i, j| u[(i, j)]),
        singulars,
        v: ComplexDense::from_fn(c, c, |i, j| v[(i, j)]),
    })
}

/// Singular values only, nonincreasing.
pub fn singular_values(m: &ComplexDense) -> Result<Vec<f64>> {
    require_finite(m)?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(vec![]);
    }
    m.as_mat()
        .singular_values()
        .map_err(|e| Error::NonConvergence(format!("singular values: {e:?}")))
}

pub fn solve(m: &ComplexDense, b: &ComplexDense) -> Result<ComplexDense> {
    solve_with_pivot_ratio(m, b, SINGULAR_PIVOT_RATIO)
}

/// LU solve that reports [`Error::SingularMatrix`] when the smallest pivot is
/// at most `pivot_ratio` times the largest.
pub fn solve_with_pivot_ratio(
    m: &ComplexDense,
    b: &ComplexDense,
    pivot_ratio: f64,
) -> Result<ComplexDense> {
    require_square(m, "solve")?;
    if b.nrows() != m.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: {}x{} system with {} right-hand-side rows",
            m.nrows(),
            m.ncols(),
            b.nrows()
        )));
    }
    require_finite(m)?;
    require_finite(b)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(b.clone());
    }
    let lu = m.as_mat().partial_piv_lu();
    let u = lu.U();
    let pivots: Vec<f64> = (0..n).map(|i| u[(i, i)].norm()).collect();
    let max = pivots.iter().cloned().fold(0.0, f64::max);
    let min = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 || !(min > pivot_ratio * max) {
        return Err(Error::SingularMatrix(format!(
            "pivot ratio {:e} at or below {:e}",
            if max == 0.0 { 0.0 } else { min / max },
            pivot_ratio
        )));
    }
    let x = ComplexDense::from_mat(lu.solve(b.as_mat()));
    if !x.is_finite() {
        return Err(Error::SingularMatrix("solution overflowed".into()));
    }
    Ok(x)
}

pub fn opnorm(m: &ComplexDense) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

pub fn sigma_min(m: &ComplexDense) -> Result<f64> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

/// `‖M‖·‖M⁻¹‖`, infinite when the smallest singular value is zero.
pub fn cond(m: &ComplexDense) -> Result<f64> {
    require_square(m, "cond")?;
    let s = singular_values(m)?;
    Ok(cond_from_singulars(&s))
}

fn cond_from_singulars(s: &[f64]) -> f64 {
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Upper estimate of the eigenvector condition number: the condition number
/// of the unit-column eigenvector matrix. Returns +∞ when that matrix is
/// numerically singular.
pub fn kappa_v_estimate(m: &ComplexDense) -> Result<f64> {
    let es = eig(m)?;
    Ok(kappa_of_vectors(&es.right_vectors)?)
}

/// Condition number of a unit-column eigenvector matrix with the
/// numerical-singularity cutoff used by [`kappa_v_estimate`].
pub fn kappa_of_vectors(v: &ComplexDense) -> Result<f64> {
    let n = v.nrows();
    if n == 0 {
        return Ok(1.0);
    }
    let s = singular_values(v)?;
    let (hi, lo) = (s[0], s[s.len() - 1]);
    if !(lo > n as f64 * f64::EPSILON * hi) {
        return Ok(f64::INFINITY);
    }
    Ok(hi / lo)
}

/// Eigen-decomposes a Hermitian matrix after checking the relative skew part
/// against [`HERM_TOL`].
pub fn hermitian_eigen(m: &ComplexDense) -> Result<HermitianEigen> {
    require_square(m, "hermitian_eigen")?;
    require_finite(m)?;
    let defect = m.hermitian_defect();
    if defect > HERM_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: ComplexDense::zeros(0, 0) });
    }
    let h = m.hermitian_part();
    let evd = h
        .as_mat()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NonConvergence(format!("hermitian eigen: {e:?}")))?;
    let values = (0..n).map(|i| evd.S()[i].re).collect();
    let u = evd.U();
    Ok(HermitianEigen { values, vectors: ComplexDense::from_fn(n, n, |i, j| u[(i, j)]) })
}

fn hermitian_power(q: &ComplexDense, power: f64) -> Result<ComplexDense> {
    if q.is_diagonal() && q.diagonal().iter().all(|z| z.im == 0.0) {
        let d = q.diagonal();
        let min = d.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
        let p: Vec<f64> = d.iter().map(|z| if power == 0.5 { z.re.sqrt() } else { z.re.powf(power) }).collect();
        return Ok(ComplexDense::from_real_diag(&p));
    }
    let he = hermitian_eigen(q)?;
    let min = he.values.first().copied().unwrap_or(1.0);
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let n = q.nrows();
    let w = &he.vectors;
    let d: Vec<f64> = he.values.iter().map(|&x| x.powf(power)).collect();
    let scaled = ComplexDense::from_fn(n, n, |i, j| w.get(i, j) * d[j]);
    let out = &scaled * &w.adjoint();
    Ok(out.hermitian_part())
}

/// Principal square root of a Hermitian positive definite matrix.
pub fn hermitian_sqrt(q: &ComplexDense) -> Result<ComplexDense> {
    hermitian_power(q, 0.5)
}

/// `Q^{-1/2}` for Hermitian positive definite `Q`.
pub fn hermitian_inv_sqrt(q: &ComplexDense) -> Result<ComplexDense> {
    hermitian_power(q, -0.5)
}

/// `W^{1/2} M W^{-1/2}`: the matrix whose Euclidean quantities equal those of
/// `M` in the `⟨W·, ·⟩` inner product.
pub fn weighted_similarity(m: &ComplexDense, w: &ComplexDense) -> Result<ComplexDense> {
    if w.nrows() != m.nrows() || !m.is_square() {
        return Err(Error::DimensionMismatch("weight does not conform".into()));
    }
    let half = hermitian_sqrt(w)?;
    let inv_half = hermitian_inv_sqrt(w)?;
    Ok(&(&half * m) * &inv_half)
}

/// `‖W^{1/2} M W^{-1/2}‖`.
pub fn weighted_opnorm(m: &ComplexDense, w: &ComplexDense) -> Result<f64> {
    opnorm(&weighted_similarity(m, w)?)
}

/// Smallest singular value in the `⟨W·, ·⟩` metric.
pub fn weighted_sigma_min(m: &ComplexDense, w: &ComplexDense) -> Result<f64> {
    sigma_min(&weighted_similarity(m, w)?)
}

/// Numerical rank with absolute threshold `tol`.
pub fn rank(m: &ComplexDense, tol: f64) -> Result<usize> {
    Ok(singular_values(m)?.iter().filter(|&&s| s > tol).count())
}
