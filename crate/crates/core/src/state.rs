//! Density matrices and the von Neumann entropy.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::spectral::{eig_hermitian, HermitianSpectrum};
use crate::tol;

/// Hermitian, positive semidefinite, unit-trace state. The spectrum is
/// computed once at construction and kept with the matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    spectrum: HermitianSpectrum,
}

impl DensityMatrix {
    /// Validate and wrap a candidate state.
    ///
    /// Rejects non-square and non-Hermitian input, trace away from 1 by
    /// more than `tol::DENSITY_TRACE`, and eigenvalues below
    /// `tol::DENSITY_EIG_FLOOR`.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotAState(format!(
                "density matrix must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let spectrum = eig_hermitian(&mat).map_err(|e| match e {
            Error::NotHermitian { defect, allowed } => Error::NotAState(format!(
                "not Hermitian (defect {defect:.3e}, allowed {allowed:.3e})"
            )),
            other => other,
        })?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol::DENSITY_TRACE || tr.im.abs() > tol::DENSITY_TRACE {
            return Err(Error::NotAState(format!(
                "trace {} + {}i is not 1",
                tr.re, tr.im
            )));
        }
        if let Some(&min) = spectrum
            .eigenvalues()
            .first()
        {
            if min < tol::DENSITY_EIG_FLOOR {
                return Err(Error::NotAState(format!(
                    "negative eigenvalue {min:.3e} below floor {:.1e}",
                    tol::DENSITY_EIG_FLOOR
                )));
            }
        }
        Ok(Self { mat, spectrum })
    }

    /// Pure state |v⟩⟨v| from a (not necessarily normalized) vector.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm = crate::matrix::vec_norm(v);
        if norm == 0.0 {
            return Err(Error::NotAState("zero vector has no direction".into()));
        }
        let scaled: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&scaled, &scaled))
    }

    /// Computational basis state |i⟩⟨i|.
    pub fn basis_state(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::InvalidArgument(format!(
                "basis index {i} out of range for dimension {d}"
            )));
        }
        Self::pure(&crate::matrix::basis_vector(d, i))
    }

    /// 1/d.
    pub fn maximally_mixed(d: usize) -> Self {
        let mat = ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
        Self::new(mat).expect("1/d is a state")
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn spectrum(&self) -> &HermitianSpectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.spectrum.eigenvalues()
    }

    /// S(ρ) = −Σ λ ln λ in nats, with 0·ln 0 = 0. Round-off eigenvalues
    /// in [−tol::ENTROPY_CLAMP, 0) are clamped to zero; anything more
    /// negative was already rejected at construction.
    pub fn entropy_vn(&self) -> f64 {
        self.spectrum
            .eigenvalues()
            .iter()
            .map(|&l| if l < 0.0 { 0.0 } else { l })
            .filter(|&l| l > 0.0)
            .map(|l| -l * l.ln())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pure_state_has_zero_entropy() {
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(rho.entropy_vn().abs() <= 1e-15);
    }

    #[test]
    fn maximally_mixed_entropy_is_ln_d() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!((rho.entropy_vn() - std::f64::consts::LN_2).abs() <= 1e-12);
        let rho = DensityMatrix::maximally_mixed(4);
        assert!((rho.entropy_vn() - 4.0_f64.ln()).abs() <= 1e-12);
    }

    #[test]
    fn entropy_matches_scalar_formula() {
        let rho = DensityMatrix::new(ComplexMatrix::diagonal_real(&[0.25, 0.75])).unwrap();
        let want = -0.25_f64 * 0.25_f64.ln() - 0.75 * 0.75_f64.ln();
        assert!((rho.entropy_vn() - want).abs() <= 1e-13);
        assert!((want - 0.5623351446188083).abs() <= 1e-15);
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let err = DensityMatrix::new(ComplexMatrix::diagonal_real(&[1.1, -0.1])).unwrap_err();
        assert!(matches!(err, Error::NotAState(_)));
    }

    #[test]
    fn rejects_wrong_trace() {
        let err = DensityMatrix::new(ComplexMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::NotAState(_)));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotAState(_))));
    }

    #[test]
    fn clamps_tiny_negative_round_off() {
        let rho = DensityMatrix::new(ComplexMatrix::diagonal_real(&[1.0 + 1e-13, -1e-13])).unwrap();
        assert!(rho.entropy_vn().abs() <= 1e-11);
    }

    #[test]
    fn entropy_invariant_under_unitary_conjugation() {
        let rho = DensityMatrix::new(ComplexMatrix::diagonal_real(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        let h = {
            let g = ComplexMatrix::from_fn(4, 4, |i, j| c((i * 7 + j * 3) as f64 % 5.0, (i + j) as f64 % 3.0));
            g.symmetrize()
        };
        let u = crate::spectral::unitary_exp(&h, 0.9).unwrap();
        let rotated = &(&u * rho.matrix()) * &u.adjoint();
        let rho_rot = DensityMatrix::new(rotated.symmetrize()).unwrap();
        assert!((rho.entropy_vn() - rho_rot.entropy_vn()).abs() <= 1e-10);
    }
}
