//! Hermitian eigendecomposition and spectral matrix functions.
//!
//! All matrix functions (evolution operators, logarithms for entropy
//! bounds) go through the eigendecomposition; nothing here uses series
//! expansions. The solver is nalgebra's Hermitian eigensolver on a
//! symmetrized copy of the input.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol;

/// Eigensystem of a Hermitian matrix: real eigenvalues ascending, and a
/// unitary matrix whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, idx: usize) -> Vec<Complex64> {
        self.eigenvectors.column(idx)
    }

    /// Q f(Λ) Q† for a scalar function on the spectrum.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let q = &self.eigenvectors;
        let d = ComplexMatrix::diagonal(&self.eigenvalues.iter().map(|&x| f(x)).collect::<Vec<_>>());
        &(q * &d) * &q.adjoint()
    }

    /// Q Λ Q†, the matrix this spectrum was computed from.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| Complex64::new(x, 0.0))
    }
}

fn to_na(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

fn from_na(m: &DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Diagonalize a Hermitian matrix. Rejects inputs whose Hermiticity
/// defect exceeds `tol::HERMITICITY_REL · (1 + ‖m‖_F)`.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianSpectrum> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    let allowed = tol::HERMITICITY_REL * (1.0 + m.frobenius_norm());
    if defect > allowed {
        return Err(Error::NotHermitian { defect, allowed });
    }

    let sym = m.symmetrize();
    let se = to_na(&sym).symmetric_eigen();

    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let eigenvectors =
        ComplexMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);

    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// exp(−i t h) for Hermitian h, in units with ħ = 1.
pub fn unitary_exp(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let spectrum = eig_hermitian(h)?;
    Ok(spectrum.map(|lambda| (Complex64::new(0.0, -t * lambda)).exp()))
}

/// QR-based unitary factor of a square complex matrix with the phases of
/// the R diagonal pushed into Q, so Gaussian input maps to Haar measure.
pub fn qr_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Shape("qr_unitary needs a square matrix".into()));
    }
    let qr = to_na(m).qr();
    let q = qr.q();
    let r = qr.r();
    let n = m.rows();
    let phases: Vec<Complex64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() < 1e-300 {
                Complex64::ONE
            } else {
                d / d.norm()
            }
        })
        .collect();
    let q = from_na(&q);
    Ok(&q * &ComplexMatrix::diagonal(&phases))
}
