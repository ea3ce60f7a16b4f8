use super::{check_psd, PHPencil, Pencil};
use crate::error::{Error, Result};
use crate::numkernel::{self, cr, ComplexDense, C64};

/// Smallest step tried by [`cayley_with_fallback`] is `2^-CAYLEY_MAX_HALVINGS`.
pub const CAYLEY_MAX_HALVINGS: i32 = 20;

/// `M_h = (E − hA)⁻¹(E + hA)`.
pub fn cayley(p: &Pencil, h: f64) -> Result<ComplexDense> {
    cayley_at_ratio(p, h, numkernel::SINGULAR_PIVOT_RATIO)
}

fn cayley_at_ratio(p: &Pencil, h: f64, ratio: f64) -> Result<ComplexDense> {
    let ha = p.a.scale_real(h);
    numkernel::solve_with_pivot_ratio(&(&p.e - &ha), &(&p.e + &ha), ratio)
}

#[derive(Debug, Clone)]
pub struct CayleyChoice {
    pub matrix: ComplexDense,
    pub h: f64,
}

/// Tries `h = 1, 1/2, …, 2^-20` and keeps the first `h` for which `E − hA`
/// has LU pivot ratio above `n·ε`.
pub fn cayley_with_fallback(p: &Pencil) -> Result<CayleyChoice> {
    let ratio = p.dim().max(1) as f64 * f64::EPSILON;
    let mut last = None;
    for k in 0..=CAYLEY_MAX_HALVINGS {
        let h = 2f64.powi(-k);
        match cayley_at_ratio(p, h, ratio) {
            Ok(matrix) => return Ok(CayleyChoice { matrix, h }),
            Err(e @ Error::SingularMatrix(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::SingularMatrix("E − hA singular for every h".into())))
}

/// `(M + I) / ‖M + I‖`.
pub fn normalize_for_ginibre(mh: &ComplexDense) -> Result<ComplexDense> {
    let shifted = mh.shift_diagonal(cr(1.0));
    let norm = numkernel::opnorm(&shifted)?;
    if norm < 1e-300 {
        return Err(Error::DegenerateInput("M + I vanishes".into()));
    }
    Ok(shifted.scale_real(1.0 / norm))
}

/// A port-Hamiltonian pencil rewritten with `Q = I`, and the change of
/// variables `T = Q^{-1/2}` that produced it.
#[derive(Debug, Clone)]
pub struct QReduction {
    pub ph: PHPencil,
    pub t: ComplexDense,
}

impl QReduction {
    pub fn pencil(&self) -> Pencil {
        self.ph.to_pencil()
    }
}

/// `λ Q^{1/2}EQ^{-1/2} − Q^{1/2}(J − R)Q^{1/2}` for Hermitian positive
/// definite `Q`.
pub fn ph_to_identity_q(ph: &PHPencil) -> Result<QReduction> {
    let half = numkernel::hermitian_sqrt(&ph.q)?;
    let t = numkernel::hermitian_inv_sqrt(&ph.q)?;
    let sandwich = |m: &ComplexDense| &(&half * m) * &half;
    let e = (&(&half * &ph.e) * &t).hermitian_part();
    let j = sandwich(&ph.j);
    let j = (&j - &j.adjoint()).scale_real(0.5);
    let r = sandwich(&ph.r).hermitian_part();
    let n = ph.dim();
    Ok(QReduction { ph: PHPencil::new(e, j, r, ComplexDense::identity(n))?, t })
}

/// Reversal pencil `λ(A − λ₀E) − E`, which moves the finite eigenvalue λ₀ of
/// `λE − A` to infinity. An eigenvalue μ of the result corresponds to
/// `λ₀ + 1/μ` of the original pencil.
pub fn shift_for_finite_eig(p: &Pencil, lambda0: C64) -> Result<Pencil> {
    let shifted = &p.a - &p.e.scale(lambda0);
    check_psd(&shifted, "A − λ₀E")?;
    Pencil::new(shifted, p.e.clone())
}

/// `UV*` from the SVD `E = UΣV*`.
pub fn uv_direction(e: &ComplexDense) -> Result<ComplexDense> {
    let s = numkernel::svd(e)?;
    Ok(&s.u * &s.v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize, v: &[f64]) -> ComplexDense {
        ComplexDense::from_real_row_major(n, n, v).unwrap()
    }

    fn close(a: &ComplexDense, b: &ComplexDense, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn cayley_examples() {
        let id = ComplexDense::identity(2);
        let p = Pencil::new(id.clone(), ComplexDense::zeros(2, 2)).unwrap();
        assert!(close(&cayley(&p, 0.3).unwrap(), &id, 1e-15));

        let p = Pencil::new(ComplexDense::from_real_diag(&[1.0, 0.0]), id.clone()).unwrap();
        let m = cayley(&p, 0.5).unwrap();
        assert!(close(&m, &ComplexDense::from_real_diag(&[3.0, -1.0]), 1e-14));

        let lam = 0.7;
        let p = Pencil::new(ComplexDense::identity(1), ComplexDense::from_real_diag(&[lam])).unwrap();
        for &h in &[1.0, 0.5, 0.1] {
            let m = cayley(&p, h).unwrap();
            assert!((m.get(0, 0).re - (1.0 + h * lam) / (1.0 - h * lam)).abs() < 1e-14);
        }
    }

    #[test]
    fn cayley_fallback_skips_singular_steps() {
        // λ = 1 is an eigenvalue, so E − A is singular at h = 1
        let p = Pencil::new(ComplexDense::identity(2), ComplexDense::from_real_diag(&[1.0, 3.0])).unwrap();
        assert!(matches!(cayley(&p, 1.0), Err(Error::SingularMatrix(_))));
        let c = cayley_with_fallback(&p).unwrap();
        assert_eq!(c.h, 0.5);
        assert!((c.matrix.get(0, 0).re - 3.0).abs() < 1e-14);

        // E = A = 0 stays singular for every h
        let z = Pencil::new(ComplexDense::zeros(2, 2), ComplexDense::zeros(2, 2)).unwrap();
        assert!(matches!(cayley_with_fallback(&z), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn normalize_examples() {
        let id = ComplexDense::identity(2);
        let m = normalize_for_ginibre(&id).unwrap();
        // (I + I)/‖2I‖ = I
        assert!(close(&m, &id, 1e-14));
        assert!((numkernel::opnorm(&m).unwrap() - 1.0).abs() < 1e-14);

        let m = normalize_for_ginibre(&ComplexDense::from_real_diag(&[3.0, -1.0])).unwrap();
        assert!(close(&m, &ComplexDense::from_real_diag(&[1.0, 0.0]), 1e-14));

        assert!(matches!(normalize_for_ginibre(&id.scale_real(-1.0)), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn identity_q_is_a_no_op() {
        let ph = PHPencil::new(
            ComplexDense::from_real_diag(&[1.0, 0.0]),
            real(2, &[0., 1., -1., 0.]),
            ComplexDense::from_real_diag(&[0.5, 0.0]),
            ComplexDense::identity(2),
        )
        .unwrap();
        let red = ph_to_identity_q(&ph).unwrap();
        assert!(close(&red.t, &ComplexDense::identity(2), 1e-15));
        assert!(close(&red.pencil().a, &ph.a(), 1e-15));
        assert!(close(&red.pencil().e, &ph.e, 1e-15));
    }

    #[test]
    fn diagonal_q_reduction_by_hand() {
        let ph = PHPencil::new(
            ComplexDense::identity(2),
            real(2, &[0., 1., -1., 0.]),
            ComplexDense::zeros(2, 2),
            ComplexDense::from_real_diag(&[4.0, 1.0]),
        )
        .unwrap();
        let red = ph_to_identity_q(&ph).unwrap();
        assert!(close(&red.ph.j, &real(2, &[0., 2., -2., 0.]), 1e-14));
        assert!(close(&red.ph.e, &ComplexDense::identity(2), 1e-14));
        assert!(close(&red.t, &ComplexDense::from_real_diag(&[0.5, 1.0]), 1e-14));
        red.ph.check_invariants().unwrap();

        let bad = PHPencil { q: ComplexDense::from_real_diag(&[1.0, 0.0]), ..ph };
        assert!(matches!(ph_to_identity_q(&bad), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn shift_examples() {
        let e = real(2, &[0., 1., 1., 0.]);
        let a = ComplexDense::from_real_diag(&[1.0, 2.0]);
        let p = Pencil::new(e.clone(), a.clone()).unwrap();
        let s = shift_for_finite_eig(&p, cr(0.0)).unwrap();
        assert_eq!(s.e, a);
        assert_eq!(s.a, e);

        let p = Pencil::new(ComplexDense::from_real_diag(&[1.0, 0.0]), ComplexDense::from_real_diag(&[2.0, 1.0]))
            .unwrap();
        let s = shift_for_finite_eig(&p, cr(1.0)).unwrap();
        assert!(close(&s.e, &ComplexDense::identity(2), 0.0));
        assert!(close(&s.a, &ComplexDense::from_real_diag(&[1.0, 0.0]), 0.0));

        assert!(matches!(shift_for_finite_eig(&p, C64::new(0.0, 1.0)), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn uv_direction_examples() {
        let id = ComplexDense::identity(2);
        assert!(close(&uv_direction(&id).unwrap(), &id, 1e-14));
        assert!(close(&uv_direction(&ComplexDense::from_real_diag(&[2.0, 3.0])).unwrap(), &id, 1e-14));
        let w = uv_direction(&real(2, &[0., 1., 0., 0.])).unwrap();
        assert!(close(&(&w * &w.adjoint()), &id, 1e-14));
        // maps the right singular vector e2 to the left one e1
        assert!((w.get(0, 1).norm() - 1.0).abs() < 1e-14);
    }
}
