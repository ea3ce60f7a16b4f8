use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[inline]
pub(crate) fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense complex matrix.
///
/// Thin owner around a column-major [`faer::Mat`]; public constructors reject
/// non-finite entries so downstream kernels never see NaN or infinity from
/// user input.
#[derive(Clone, PartialEq)]
pub struct ComplexDense(Mat<C64>);

impl ComplexDense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(Mat::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(Mat::identity(n, n))
    }

    /// Row-major constructor; fails on a length mismatch or any non-finite entry.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(Mat::from_fn(rows, cols, |i, j| entries[i * cols + j])))
    }

    pub fn from_real_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| cr(x)).collect();
        Self::from_row_major(rows, cols, &c)
    }

    /// Builds from a closure. Intended for internal assembly of values that are
    /// finite by construction; use [`ComplexDense::from_row_major`] for
    /// untrusted input.
    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(Mat::from_fn(rows, cols, f))
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self(Mat::from_fn(rows, cols, |i, j| cr(f(i, j))))
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_real_fn(n, n, |i, j| if i == j { d[i] } else { 0.0 })
    }

    /// Assembles `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(
        tl: &ComplexDense,
        tr: &ComplexDense,
        bl: &ComplexDense,
        br: &ComplexDense,
    ) -> Result<Self> {
        let (r1, c1) = (tl.nrows(), tl.ncols());
        let (r2, c2) = (br.nrows(), br.ncols());
        if tr.nrows() != r1 || tr.ncols() != c2 || bl.nrows() != r2 || bl.ncols() != c1 {
            return Err(Error::DimensionMismatch("block sizes do not conform".into()));
        }
        Ok(Self::from_fn(r1 + r2, c1 + c2, |i, j| match (i < r1, j < c1) {
            (true, true) => tl.get(i, j),
            (true, false) => tr.get(i, j - c1),
            (false, true) => bl.get(i - r1, j),
            (false, false) => br.get(i - r1, j - c1),
        }))
    }

    pub(crate) fn from_mat(m: Mat<C64>) -> Self {
        Self(m)
    }

    pub fn as_mat(&self) -> &Mat<C64> {
        &self.0
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let (r, c) = (self.nrows(), self.ncols());
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        (0..self.ncols()).all(|j| {
            (0..self.nrows()).all(|i| {
                let z = self.get(i, j);
                z.re.is_finite() && z.im.is_finite()
            })
        })
    }

    pub fn is_real(&self) -> bool {
        (0..self.ncols()).all(|j| (0..self.nrows()).all(|i| self.get(i, j).im == 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint().to_owned())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose().to_owned())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(Mat::from_fn(self.nrows(), self.ncols(), |i, j| self.0[(i, j)] * s))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(cr(s))
    }

    /// `self + s·I` for square `self`.
    pub fn shift_diagonal(&self, s: C64) -> Self {
        let mut out = self.clone();
        for i in 0..self.nrows().min(self.ncols()) {
            out.0[(i, i)] += s;
        }
        out
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.nrows().min(self.ncols())).map(|i| self.get(i, i)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.nrows()).map(|i| self.get(i, j)).collect()
    }

    pub fn submatrix(&self, row: usize, col: usize, nrows: usize, ncols: usize) -> Self {
        Self(self.0.submatrix(row, col, nrows, ncols).to_owned())
    }

    /// Columns selected by index, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.nrows(), cols.len(), |i, k| self.get(i, cols[k]))
    }

    /// `U* · self · U`.
    pub fn congruence_adjoint(&self, u: &ComplexDense) -> Self {
        let left = u.adjoint();
        &(&left * self) * u
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.norm_max()
    }

    /// Frobenius norm of the anti-Hermitian part relative to the Frobenius norm
    /// of the matrix (0 for the zero matrix).
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.nrows();
        let mut skew = 0.0;
        for j in 0..n {
            for i in 0..n {
                skew += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        let total = self.frobenius_norm();
        if total == 0.0 {
            0.0
        } else {
            0.5 * skew.sqrt() / total
        }
    }

    /// Same as [`ComplexDense::hermitian_defect`] for the Hermitian part, i.e.
    /// how far the matrix is from skew-Hermitian.
    pub fn skew_hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.nrows();
        let mut herm = 0.0;
        for j in 0..n {
            for i in 0..n {
                herm += (self.get(i, j) + self.get(j, i).conj()).norm_sqr();
            }
        }
        let total = self.frobenius_norm();
        if total == 0.0 {
            0.0
        } else {
            0.5 * herm.sqrt() / total
        }
    }

    /// Hermitian part `(M + M*)/2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.nrows();
        Self::from_fn(n, n, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5)
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.ncols()).all(|j| (0..self.nrows()).all(|i| i == j || self.get(i, j) == cr(0.0)))
    }
}

impl fmt::Debug for ComplexDense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexDense {}x{} [", self.nrows(), self.ncols())?;
        for i in 0..self.nrows() {
            write!(f, "  ")?;
            for j in 0..self.ncols() {
                let z = self.get(i, j);
                write!(f, "{:+.6e}{:+.6e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a ComplexDense> for &'a ComplexDense {
    type Output = ComplexDense;
    fn add(self, rhs: &'a ComplexDense) -> ComplexDense {
        assert_eq!((self.nrows(), self.ncols()), (rhs.nrows(), rhs.ncols()), "shape mismatch in add");
        ComplexDense::from_fn(self.nrows(), self.ncols(), |i, j| self.get(i, j) + rhs.get(i, j))
    }
}

impl<'a> Sub<&'a ComplexDense> for &'a ComplexDense {
    type Output = ComplexDense;
    fn sub(self, rhs: &'a ComplexDense) -> ComplexDense {
        assert_eq!((self.nrows(), self.ncols()), (rhs.nrows(), rhs.ncols()), "shape mismatch in sub");
        ComplexDense::from_fn(self.nrows(), self.ncols(), |i, j| self.get(i, j) - rhs.get(i, j))
    }
}

impl<'a> Mul<&'a ComplexDense> for &'a ComplexDense {
    type Output = ComplexDense;
    fn mul(self, rhs: &'a ComplexDense) -> ComplexDense {
        assert_eq!(self.ncols(), rhs.nrows(), "shape mismatch in mul");
        ComplexDense(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexDense {
    type Output = ComplexDense;
    fn neg(self) -> ComplexDense {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_roundtrip_and_validation() {
        let m = ComplexDense::from_real_row_major(2, 3, &[1., 2., 3., 4., 5., 6.]).unwrap();
        assert_eq!(m.get(1, 0), cr(4.0));
        assert_eq!(m.to_row_major()[5], cr(6.0));
        assert!(matches!(
            ComplexDense::from_real_row_major(2, 2, &[1., 2., 3.]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            ComplexDense::from_real_row_major(1, 1, &[f64::NAN]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn blocks_and_submatrix() {
        let a = ComplexDense::from_real_diag(&[1.0]);
        let b = ComplexDense::from_real_fn(1, 2, |_, j| j as f64 + 2.0);
        let c = ComplexDense::from_real_fn(2, 1, |i, _| i as f64 + 4.0);
        let d = ComplexDense::identity(2);
        let m = ComplexDense::from_blocks(&a, &b, &c, &d).unwrap();
        assert_eq!(m.nrows(), 3);
        assert_eq!(m.get(0, 2), cr(3.0));
        assert_eq!(m.get(2, 0), cr(5.0));
        assert_eq!(m.submatrix(1, 1, 2, 2), d);
        assert!(ComplexDense::from_blocks(&a, &c, &b, &d).is_err());
    }

    #[test]
    fn hermitian_defect_detects_skew() {
        let h = ComplexDense::from_real_row_major(2, 2, &[2., 1., 1., 2.]).unwrap();
        assert_eq!(h.hermitian_defect(), 0.0);
        let s = ComplexDense::from_real_row_major(2, 2, &[0., 1., -1., 0.]).unwrap();
        assert!(s.hermitian_defect() > 0.5);
        assert_eq!(s.skew_hermitian_defect(), 0.0);
    }
}
