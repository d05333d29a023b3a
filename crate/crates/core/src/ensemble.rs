//! Deterministic instance generators for sweeps and tests.
//!
//! The stream is ChaCha8 keyed by `master_seed` with the 64-bit stream id
//! selecting an independent substream, so trial i can be generated in any
//! order (or concurrently) and still reproduce bit-for-bit. Uniform
//! doubles come from the top 53 bits of each 64-bit word; Gaussians are
//! Box–Muller on consecutive uniforms (two words per normal deviate).
//! Reseeding with the same `(master_seed, stream_id)` replays the exact
//! draw sequence.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::spectral::qr_unitary;
use crate::state::DensityMatrix;
use crate::system::{controlled_unitary, swap_unitary, ReservoirState};

/// Reproducible random source for one (master seed, stream) pair.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl SeededGenerator {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform double in the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller; consumes two uniforms and keeps
    /// only the cosine branch.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Standard complex Gaussian: (N + iN)/√2, unit total variance.
    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal()).scale(std::f64::consts::FRAC_1_SQRT_2)
    }

    /// Square matrix of independent standard complex Gaussians.
    pub fn gaussian_matrix(&mut self, d: usize) -> ComplexMatrix {
        let mut data = Vec::with_capacity(d * d);
        for _ in 0..d * d {
            data.push(self.complex_normal());
        }
        ComplexMatrix::new(d, d, data).expect("gaussian entries are finite")
    }

    /// Haar-distributed unitary: QR of a complex Gaussian matrix with the
    /// R-diagonal phases absorbed into Q.
    pub fn haar_unitary(&mut self, d: usize) -> Result<ComplexMatrix> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        qr_unitary(&self.gaussian_matrix(d))
    }

    /// Random Gaussian Hermitian matrix (GUE-style, unnormalized).
    pub fn hermitian(&mut self, d: usize) -> ComplexMatrix {
        self.gaussian_matrix(d).symmetrize()
    }

    /// Random density matrix of the requested rank: Haar eigenvectors and
    /// strictly positive weights (floored exponentials, normalized).
    pub fn random_density(&mut self, d: usize, rank: usize) -> Result<DensityMatrix> {
        if rank == 0 || rank > d {
            return Err(Error::InvalidArgument(format!(
                "rank {rank} out of range 1..={d}"
            )));
        }
        let u = self.haar_unitary(d)?;
        // floor keeps every retained weight safely above the retention cutoff
        let mut weights: Vec<f64> = (0..rank).map(|_| 0.05 - self.uniform().ln()).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut rho = ComplexMatrix::zeros(d, d);
        for (alpha, &w) in weights.iter().enumerate() {
            let col = u.column(alpha);
            rho = &rho + &ComplexMatrix::outer(&col, &col).scale(Complex64::new(w, 0.0));
        }
        DensityMatrix::new(rho.symmetrize())
    }

    /// Random mixed reservoir state of full rank.
    pub fn random_reservoir(&mut self, d_res: usize) -> Result<ReservoirState> {
        ReservoirState::new(self.random_density(d_res, d_res)?)
    }

    /// Member of the diagonal-invariance-preserving family:
    /// Σ_k |ψ_k⟩⟨ψ_k| ⊗ W_k with independent Haar W_k.
    pub fn controlled_interaction(
        &mut self,
        d_sys: usize,
        d_res: usize,
        basis_psi: &ComplexMatrix,
    ) -> Result<ComplexMatrix> {
        if basis_psi.rows() != d_sys || basis_psi.cols() != d_sys {
            return Err(Error::Shape(format!(
                "basis must be {0}x{0}, got {1}x{2}",
                d_sys,
                basis_psi.rows(),
                basis_psi.cols()
            )));
        }
        let ws: Vec<ComplexMatrix> = (0..d_sys)
            .map(|_| self.haar_unitary(d_res))
            .collect::<Result<_>>()?;
        controlled_unitary(basis_psi, &ws)
    }
}

/// The archetypal non-unital, energy-preserving instance: SWAP on two
/// qubits with the reservoir prepared in |0⟩⟨0|. The induced channel
/// resets every input to |0⟩⟨0| and strictly lowers the entropy of the
/// maximally mixed state.
pub fn demon_instance() -> (ComplexMatrix, ReservoirState) {
    (swap_unitary(2), ReservoirState::ground(2))
}
