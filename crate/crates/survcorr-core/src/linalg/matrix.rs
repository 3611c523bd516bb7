//! Dense complex matrices with validated unitary and Hermitian wrappers.
//!
//! Storage is row-major `Vec<Complex<f64>>`. Everything here targets desk
//! scale (d <= 512), so the kernels are straightforward loops.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex<f64>;

pub(crate) const CZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const CONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![CZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = CONE;
        }
        m
    }

    /// Builds from row-major entries; rejects wrong lengths and non-finite values.
    pub fn from_data(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::WrongLength { expected: dim * dim, got: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: rhs.dim });
        }
        let d = self.dim;
        let mut out = vec![CZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                let row = &rhs.data[k * d..(k + 1) * d];
                let acc = &mut out[i * d..(i + 1) * d];
                for j in 0..d {
                    acc[j] += a * row[j];
                }
            }
        }
        Ok(Self { dim: d, data: out })
    }

    /// out = M v. Caller guarantees matching lengths.
    #[inline]
    pub(crate) fn matvec_into(&self, v: &[C64], out: &mut [C64]) {
        let d = self.dim;
        debug_assert_eq!(v.len(), d);
        debug_assert_eq!(out.len(), d);
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.data[i * d..(i + 1) * d];
            let mut acc = CZERO;
            for (m, x) in row.iter().zip(v) {
                acc += *m * *x;
            }
            *slot = acc;
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: rhs.dim });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: rhs.dim });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// Conjugate transpose. Applying it twice returns the original bits.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        let mut t = CZERO;
        for i in 0..self.dim {
            t += self.data[i * self.dim + i];
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ||A^H A - I||_F, computed without materializing the product.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for j in 0..d {
            for l in 0..d {
                let mut dot = CZERO;
                for i in 0..d {
                    dot += self.data[i * d + j].conj() * self.data[i * d + l];
                }
                if j == l {
                    dot -= CONE;
                }
                acc += dot.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// ||A - A^H||_F.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                let diff = self.data[i * d + j] - self.data[j * d + i].conj();
                acc += diff.norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// tr(A B) via sum over a_ij b_ji, without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    let d = a.dim;
    let mut t = CZERO;
    for i in 0..d {
        for j in 0..d {
            t += a.data[i * d + j] * b.data[j * d + i];
        }
    }
    Ok(t)
}

/// Largest entrywise absolute difference; handy in tests and probes.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Matrix validated as unitary at construction.
///
/// The stored residual is ||U^H U - I||_F; the bound is per-dimension.
#[derive(Clone, Debug)]
pub struct UnitaryMatrix {
    mat: ComplexMatrix,
    residual: f64,
}

impl UnitaryMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let residual = mat.unitarity_residual();
        let tolerance = tol::UNITARY_TOL_PER_DIM * mat.dim() as f64;
        if !residual.is_finite() || residual > tolerance {
            return Err(Error::NotUnitary { residual, tolerance });
        }
        Ok(Self { mat, residual })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// U^H. Same residual: ||U U^H - I||_F = ||U^H U - I||_F for square U.
    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint(), residual: self.residual }
    }
}

impl std::ops::Deref for UnitaryMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.mat
    }
}

/// Matrix validated as Hermitian at construction.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
    residual: f64,
}

impl HermitianMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let residual = mat.hermiticity_residual();
        let tolerance = tol::HERMITIAN_TOL_PER_DIM * mat.dim() as f64;
        if !residual.is_finite() || residual > tolerance {
            return Err(Error::NotHermitian { residual, tolerance });
        }
        Ok(Self { mat, residual })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// alpha * H + beta * I. Real alpha and beta preserve Hermiticity exactly.
    pub fn affine(&self, alpha: f64, beta: f64) -> Self {
        let d = self.mat.dim();
        let mut out = self.mat.scale(C64::new(alpha, 0.0));
        for i in 0..d {
            let v = out.get(i, i) + C64::new(beta, 0.0);
            out.set(i, i, v);
        }
        Self { mat: out, residual: self.residual * alpha.abs() }
    }
}

impl std::ops::Deref for HermitianMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.mat
    }
}
