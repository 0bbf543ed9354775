//! Dense 3×3 complex matrices for three-state propagators and Hamiltonians.
//!
//! Matrices are row-major in the state order |1⟩, |2⟩, |3⟩. Indices in this
//! module are zero-based; the rest of the crate talks about states 1..=3.

use std::fmt;
use std::ops::Mul;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance used when promoting a general matrix to [`HMat3`].
pub const HERMITIAN_TOL: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A 3×3 complex matrix. Usually a propagator.
#[derive(Clone, Copy, PartialEq)]
pub struct CMat3(Matrix3<Complex64>);

impl CMat3 {
    pub fn identity() -> Self {
        CMat3(Matrix3::identity())
    }

    pub fn zeros() -> Self {
        CMat3(Matrix3::zeros())
    }

    pub fn from_rows(rows: [[Complex64; 3]; 3]) -> Self {
        CMat3(Matrix3::from_fn(|i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: [[f64; 3]; 3]) -> Self {
        CMat3(Matrix3::from_fn(|i, j| c(rows[i][j], 0.0)))
    }

    pub fn diagonal(d: [Complex64; 3]) -> Self {
        let mut m = Matrix3::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m[(i, i)] = v;
        }
        CMat3(m)
    }

    /// Entry at zero-based `(row, col)`.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.0[(row, col)] = v;
    }

    pub fn rows(&self) -> [[Complex64; 3]; 3] {
        let mut out = [[c(0.0, 0.0); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[(i, j)];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        CMat3(self.0.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMat3(self.0 * s)
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.determinant()
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: [Complex64; 3]) -> [Complex64; 3] {
        let mut out = [c(0.0, 0.0); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.0[(i, j)] * v[j]).sum();
        }
        out
    }

    /// Column `col` (zero-based): the image of basis state `col`.
    pub fn column(&self, col: usize) -> [Complex64; 3] {
        [self.0[(0, col)], self.0[(1, col)], self.0[(2, col)]]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMat3) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn as_nalgebra(&self) -> &Matrix3<Complex64> {
        &self.0
    }
}

impl From<Matrix3<Complex64>> for CMat3 {
    fn from(m: Matrix3<Complex64>) -> Self {
        CMat3(m)
    }
}

impl Mul for CMat3 {
    type Output = CMat3;
    fn mul(self, rhs: CMat3) -> CMat3 {
        CMat3(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a CMat3> for &'a CMat3 {
    type Output = CMat3;
    fn mul(self, rhs: &CMat3) -> CMat3 {
        CMat3(self.0 * rhs.0)
    }
}

impl fmt::Debug for CMat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..3 {
            let row: Vec<String> = (0..3)
                .map(|j| {
                    let z = self.0[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Standard matrix product `a · b`.
pub fn mat_mul(a: &CMat3, b: &CMat3) -> CMat3 {
    a * b
}

/// Frobenius norm of `U†U − I`.
pub fn unitarity_defect(u: &CMat3) -> f64 {
    let d = u.0.adjoint() * u.0 - Matrix3::identity();
    d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A Hermitian 3×3 matrix (angular-frequency units).
///
/// Only the diagonal and the upper triangle are stored; the lower triangle is
/// the mirror image, so `H = H†` holds exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HMat3 {
    diag: [f64; 3],
    // (0,1), (0,2), (1,2)
    upper: [Complex64; 3],
}

impl HMat3 {
    pub fn zeros() -> Self {
        HMat3 {
            diag: [0.0; 3],
            upper: [c(0.0, 0.0); 3],
        }
    }

    pub fn new(diag: [f64; 3], h12: Complex64, h13: Complex64, h23: Complex64) -> Self {
        HMat3 {
            diag,
            upper: [h12, h13, h23],
        }
    }

    /// Promote a general matrix, rejecting it if `‖H − H†‖_F > 1e-12`.
    pub fn from_matrix(m: &CMat3) -> Result<Self> {
        let defect = (m.0 - m.0.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(defect <= HERMITIAN_TOL) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(HMat3 {
            diag: [m.get(0, 0).re, m.get(1, 1).re, m.get(2, 2).re],
            upper: [m.get(0, 1), m.get(0, 2), m.get(1, 2)],
        })
    }

    /// Upper-triangle element `(j, k)` with `j < k`, zero-based.
    pub fn upper(&self, j: usize, k: usize) -> Complex64 {
        match (j, k) {
            (0, 1) => self.upper[0],
            (0, 2) => self.upper[1],
            (1, 2) => self.upper[2],
            _ => panic!("({j}, {k}) is not an upper-triangle index"),
        }
    }

    /// Add `v` to element `(j, k)`, `j < k`, and its conjugate to `(k, j)`.
    pub fn add_upper(&mut self, j: usize, k: usize, v: Complex64) {
        let slot = match (j, k) {
            (0, 1) => 0,
            (0, 2) => 1,
            (1, 2) => 2,
            _ => panic!("({j}, {k}) is not an upper-triangle index"),
        };
        self.upper[slot] += v;
    }

    pub fn to_matrix(&self) -> CMat3 {
        let [d0, d1, d2] = self.diag;
        let [a, b, e] = self.upper;
        CMat3::from_rows([
            [c(d0, 0.0), a, b],
            [a.conj(), c(d1, 0.0), e],
            [b.conj(), e.conj(), c(d2, 0.0)],
        ])
    }

    pub fn is_zero(&self) -> bool {
        self.diag.iter().all(|&d| d == 0.0) && self.upper.iter().all(|z| *z == c(0.0, 0.0))
    }
}

/// `exp(−i·h·t)` by eigendecomposition of the Hermitian generator.
///
/// Negative `t` evolves backwards; only non-finite `t` is rejected.
pub fn expm_hermitian(h: &HMat3, t: f64) -> Result<CMat3> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("duration must be finite, got {t}")));
    }
    if h.is_zero() || t == 0.0 {
        return Ok(CMat3::identity());
    }
    let eig = h.to_matrix().0.symmetric_eigen();
    let v = eig.eigenvectors;
    let phases = Matrix3::from_diagonal(&eig.eigenvalues.map(|lambda| {
        let theta = -lambda * t;
        c(theta.cos(), theta.sin())
    }));
    Ok(CMat3(v * phases * v.adjoint()))
}
