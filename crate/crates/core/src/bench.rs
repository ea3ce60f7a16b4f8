//! Benchmark pencil generators.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{self, ComplexDense};
use crate::pencil::{PHPencil, Pencil};

/// Real `rows × cols` matrix with i.i.d. standard normal entries, drawn in
/// row-major order.
pub fn gaussian_real<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexDense {
    let v: Vec<f64> = (0..rows * cols).map(|_| StandardNormal.sample(rng)).collect();
    ComplexDense::from_real_row_major(rows, cols, &v).expect("finite samples")
}

/// `E = diag(I_n, 0)`, `A = [[R₀R₀ᵀ/‖R₀‖², −J₀ᵀ], [J₀, 0]]` from explicit
/// `J₀` and `R₀`.
pub fn toy_from_factors(j0: &ComplexDense, r0: &ComplexDense) -> Result<Pencil> {
    let n = j0.nrows();
    let r_norm = numkernel::opnorm(r0)?;
    if !(r_norm > 0.0) {
        return Err(Error::DegenerateInput("R₀ = 0".into()));
    }
    let a11 = (r0 * &r0.adjoint()).scale_real(1.0 / (r_norm * r_norm));
    let a = ComplexDense::from_blocks(&a11, &j0.adjoint().scale_real(-1.0), j0, &ComplexDense::zeros(n, n))?;
    let mut d = vec![1.0; n];
    d.resize(2 * n, 0.0);
    Pencil::new(ComplexDense::from_real_diag(&d), a)
}

/// Toy index-two pencil of size `2n`; `J₀` is drawn before `R₀`.
pub fn gen_toy<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Pencil {
    let j0 = gaussian_real(n, n, rng);
    let r0 = gaussian_real(n, n, rng);
    toy_from_factors(&j0, &r0).expect("Gaussian R₀ is nonzero")
}

/// `(SES*, SAS*)` with a standard normal `S`.
pub fn gen_congruence<R: Rng + ?Sized>(p: &Pencil, rng: &mut R) -> Pencil {
    let s = gaussian_real(p.dim(), p.dim(), rng);
    let mut out = p.congruence(&s).expect("finite congruence");
    // SES* is Hermitian in exact arithmetic
    out.e = out.e.hermitian_part();
    out
}

/// `E = diag(1, 0)`, `A = [[0, 1], [1, 0]]`; reversal minimum `√(τ(1+τ))`.
pub fn gen_analytic2x2() -> Pencil {
    Pencil::new(
        ComplexDense::from_real_diag(&[1.0, 0.0]),
        ComplexDense::from_real_row_major(2, 2, &[0., 1., 1., 0.]).unwrap(),
    )
    .unwrap()
}

/// `n × n` real matrix with i.i.d. `N(0, variance)` entries, row-major.
pub fn gaussian_perturbation<R: Rng + ?Sized>(n: usize, variance: f64, rng: &mut R) -> Result<ComplexDense> {
    let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| Error::DomainError(e.to_string()))?;
    let v: Vec<f64> = (0..n * n).map(|_| normal.sample(rng)).collect();
    ComplexDense::from_real_row_major(n, n, &v)
}

/// `A + ΔA` with i.i.d. real Gaussian `ΔA` of the given entry variance;
/// returns the perturbed pencil and `‖ΔA‖`.
pub fn gen_perturbed<R: Rng + ?Sized>(p: &Pencil, variance: f64, rng: &mut R) -> Result<(Pencil, f64)> {
    if !(variance >= 0.0) {
        return Err(Error::DomainError(format!("variance must be nonnegative, got {variance:e}")));
    }
    if variance == 0.0 {
        return Ok((p.clone(), 0.0));
    }
    let n = p.dim();
    let da = gaussian_perturbation(n, variance, rng)?;
    let measured = numkernel::opnorm(&da)?;
    Ok((p.perturbed(&ComplexDense::zeros(n, n), &da)?, measured))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StringsCase {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringsParams {
    pub n: usize,
    pub masses: Vec<f64>,
    /// `d_1 … d_{n−1}`
    pub dampers: Vec<f64>,
    pub taps: Vec<f64>,
    /// `k_1 … k_{n−1}`
    pub springs: Vec<f64>,
    pub grounds: Vec<f64>,
    pub eps: f64,
    pub case: StringsCase,
}

impl StringsParams {
    /// All coefficients 1, then the case's small parameters set to `eps`.
    pub fn nominal(n: usize, eps: f64, case: StringsCase) -> Self {
        let mut sp = Self {
            n,
            masses: vec![1.0; n],
            dampers: vec![1.0; n.saturating_sub(1)],
            taps: vec![1.0; n],
            springs: vec![1.0; n.saturating_sub(1)],
            grounds: vec![1.0; n],
            eps,
            case,
        };
        if n > 0 {
            sp.masses[0] = eps;
            if case == StringsCase::A {
                sp.taps[0] = eps;
                if n > 1 {
                    sp.dampers[0] = eps;
                }
            }
        }
        sp
    }
}

/// `P = [δ_ij − δ_{i,j+1}]`.
pub fn difference_matrix(n: usize) -> ComplexDense {
    ComplexDense::from_real_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if i == j + 1 {
            -1.0
        } else {
            0.0
        }
    })
}

/// `P diag(c_1, …, c_{n−1}, 0) Pᵀ + diag(g)`.
fn chain_matrix(coupling: &[f64], ground: &[f64]) -> ComplexDense {
    let n = ground.len();
    let p = difference_matrix(n);
    let mut c = coupling.to_vec();
    c.resize(n, 0.0);
    let mid = &(&p * &ComplexDense::from_real_diag(&c)) * &p.transpose();
    &mid + &ComplexDense::from_real_diag(ground)
}

/// `E = diag(M, I)`, `R = diag(C, 0)`, `J = [[0, −I], [I, 0]]`,
/// `Q = diag(I, K)`.
pub fn gen_strings(sp: &StringsParams) -> Result<PHPencil> {
    let n = sp.n;
    if n == 0 {
        return Err(Error::DomainError("need at least one string".into()));
    }
    let lens = [
        (sp.masses.len(), n),
        (sp.taps.len(), n),
        (sp.grounds.len(), n),
        (sp.dampers.len(), n - 1),
        (sp.springs.len(), n - 1),
    ];
    if lens.iter().any(|(got, want)| got != want) {
        return Err(Error::DimensionMismatch("strings parameter vectors have wrong lengths".into()));
    }
    let all = sp.masses.iter().chain(&sp.dampers).chain(&sp.taps).chain(&sp.springs).chain(&sp.grounds);
    if all.clone().any(|&v| !(v > 0.0)) || !(sp.eps > 0.0) {
        return Err(Error::DomainError("strings parameters must be positive".into()));
    }
    let id = ComplexDense::identity(n);
    let zero = ComplexDense::zeros(n, n);
    let c = chain_matrix(&sp.dampers, &sp.taps);
    let k = chain_matrix(&sp.springs, &sp.grounds);
    let e = ComplexDense::from_blocks(&ComplexDense::from_real_diag(&sp.masses), &zero, &zero, &id)?;
    let r = ComplexDense::from_blocks(&c, &zero, &zero, &zero)?;
    let j = ComplexDense::from_blocks(&zero, &id.scale_real(-1.0), &id, &zero)?;
    let q = ComplexDense::from_blocks(&id, &zero, &zero, &k)?;
    PHPencil::new(e, j, r, q)
}
