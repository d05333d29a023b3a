//! Dense complex matrices in row-major layout.
//!
//! Composite spaces are always ordered system ⊗ reservoir with system-major
//! flattening: the composite index is `i_sys * d_res + i_res`. Every routine
//! in this crate relies on that one convention.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which tensor factor of a composite operator to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Reservoir,
}

/// Dense square-or-rectangular complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major data, checking length and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {}x{} = {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    /// Real diagonal matrix, convenience for spectra.
    pub fn diagonal_real(entries: &[f64]) -> Self {
        let diag: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&diag)
    }

    /// Column vector |v⟩⟨w| outer product.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row_major(&self) -> &[Complex64] {
        &self.data
    }

    /// Matrix product with shape checking.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape(format!(
                "cannot subtract {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product, left factor major: `(a⊗b)[i*rb+k, j*cb+l] = a[i,j]·b[k,l]`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (ra, ca) = (self.rows, self.cols);
        let (rb, cb) = (rhs.rows, rhs.cols);
        let mut out = Self::zeros(ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                let a = self.get(i, j);
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..rb {
                    for l in 0..cb {
                        out.set(i * rb + k, j * cb + l, a * rhs.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Trace out one tensor factor of an operator on system ⊗ reservoir.
    pub fn partial_trace(&self, d_sys: usize, d_res: usize, out: Subsystem) -> Result<Self> {
        let d = d_sys * d_res;
        if !self.is_square() || self.rows != d {
            return Err(Error::Shape(format!(
                "partial trace needs a {}x{} matrix (d_sys={} x d_res={}), got {}x{}",
                d, d, d_sys, d_res, self.rows, self.cols
            )));
        }
        match out {
            Subsystem::Reservoir => {
                let mut m = Self::zeros(d_sys, d_sys);
                for i in 0..d_sys {
                    for j in 0..d_sys {
                        let mut acc = Complex64::ZERO;
                        for r in 0..d_res {
                            acc += self.get(i * d_res + r, j * d_res + r);
                        }
                        m.set(i, j, acc);
                    }
                }
                Ok(m)
            }
            Subsystem::System => {
                let mut m = Self::zeros(d_res, d_res);
                for r in 0..d_res {
                    for s in 0..d_res {
                        let mut acc = Complex64::ZERO;
                        for i in 0..d_sys {
                            acc += self.get(i * d_res + r, i * d_res + s);
                        }
                        m.set(r, s, acc);
                    }
                }
                Ok(m)
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ‖M − M†‖_F; zero for exactly Hermitian matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self.get(i, j) - self.get(j, i).conj();
                acc += d.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// ‖M†M − 1‖_F; zero for exactly unitary matrices.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.adjoint().matmul(self).expect("square");
        gram.sub(&Self::identity(self.rows)).expect("square").frobenius_norm()
    }

    pub fn distance_fro(&self, rhs: &Self) -> f64 {
        self.sub(rhs).map(|d| d.frobenius_norm()).unwrap_or(f64::INFINITY)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.sub(rhs).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Average with the own adjoint; kills round-off asymmetry.
    pub fn symmetrize(&self) -> Self {
        let adj = self.adjoint();
        self.add(&adj).expect("square").scale(Complex64::new(0.5, 0.0))
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::add(self, rhs).expect("matrix sum shape mismatch")
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::sub(self, rhs).expect("matrix difference shape mismatch")
    }
}

/// ⟨a|b⟩ with the conjugation on the left argument.
pub fn vec_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len(), "inner product dimension mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Computational basis column |i⟩ of dimension `d`.
pub fn basis_vector(d: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::ZERO; d];
    v[i] = Complex64::ONE;
    v
}
