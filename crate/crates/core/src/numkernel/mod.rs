//! Dense complex linear algebra used by every other module.
//!
//! Decompositions are delegated to `faer`; this module fixes the conventions
//! the rest of the crate relies on (unit-norm eigenvectors, nonincreasing
//! singular values, ascending Hermitian spectra) and adds the condition
//! estimators and weighted norms.

mod decomp;
mod dense;

pub use decomp::{
    cond, eig, eigenvalues, hermitian_eigen, hermitian_inv_sqrt, hermitian_sqrt,
    kappa_of_vectors, kappa_v_estimate, opnorm, rank, sigma_min, singular_values, solve,
    solve_with_pivot_ratio, svd, weighted_opnorm, weighted_sigma_min, weighted_similarity,
    Eigensystem, HermitianEigen, SvdTriple, HERM_TOL, RES_TOL, SINGULAR_PIVOT_RATIO,
};
pub use dense::{ComplexDense, C64};

pub(crate) use dense::cr;
