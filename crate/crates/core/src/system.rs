//! Grand-system assembly: total Hamiltonian, interaction-picture
//! factorization U_t = (U_S ⊗ U_R) · U_int, and extraction of the
//! reservoir-operator blocks V_ki = ⟨ψ_k| U_int |ψ_i⟩.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{basis_vector, ComplexMatrix};
use crate::spectral::{unitary_exp, HermitianSpectrum};
use crate::state::DensityMatrix;
use crate::tol;

/// How the joint evolution is specified.
///
/// With `Hamiltonian`, the free factors U_S, U_R and the total U_t are
/// generated from the three Hermitian parts and U_int is factored out as
/// (U_S ⊗ U_R)† U_t. With `Unitary`, the caller supplies the joint
/// unitary directly (covering time-ordered interactions); the free
/// evolutions are then the identity and U_int coincides with U_t.
#[derive(Debug, Clone)]
pub enum Evolution {
    Hamiltonian {
        h_sys: ComplexMatrix,
        h_res: ComplexMatrix,
        h_int: ComplexMatrix,
        t: f64,
    },
    Unitary { u_t: ComplexMatrix },
}

/// A finite system–reservoir pair with a joint evolution and the system
/// basis |ψ_i⟩ the analysis is expressed in.
#[derive(Debug, Clone)]
pub struct GrandSystem {
    d_sys: usize,
    d_res: usize,
    evolution: Evolution,
    basis_psi: ComplexMatrix,
}

fn check_hermitian(name: &str, m: &ComplexMatrix, dim: usize) -> Result<()> {
    if !m.is_square() || m.rows() != dim {
        return Err(Error::Shape(format!(
            "{name} must be {dim}x{dim}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    let allowed = tol::HERMITICITY_REL * (1.0 + m.frobenius_norm());
    if defect > allowed {
        return Err(Error::NotHermitian { defect, allowed });
    }
    Ok(())
}

impl GrandSystem {
    pub fn from_hamiltonians(
        d_sys: usize,
        d_res: usize,
        h_sys: ComplexMatrix,
        h_res: ComplexMatrix,
        h_int: ComplexMatrix,
        t: f64,
    ) -> Result<Self> {
        if d_sys == 0 || d_res == 0 {
            return Err(Error::InvalidArgument("dimensions must be positive".into()));
        }
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time {t} is not finite")));
        }
        check_hermitian("h_sys", &h_sys, d_sys)?;
        check_hermitian("h_res", &h_res, d_res)?;
        check_hermitian("h_int", &h_int, d_sys * d_res)?;
        Ok(Self {
            d_sys,
            d_res,
            evolution: Evolution::Hamiltonian {
                h_sys,
                h_res,
                h_int,
                t,
            },
            basis_psi: ComplexMatrix::identity(d_sys),
        })
    }

    pub fn from_unitary(d_sys: usize, d_res: usize, u_t: ComplexMatrix) -> Result<Self> {
        if d_sys == 0 || d_res == 0 {
            return Err(Error::InvalidArgument("dimensions must be positive".into()));
        }
        let d = d_sys * d_res;
        if !u_t.is_square() || u_t.rows() != d {
            return Err(Error::Shape(format!(
                "u_t must be {d}x{d}, got {}x{}",
                u_t.rows(),
                u_t.cols()
            )));
        }
        let defect = u_t.unitarity_defect();
        if defect > tol::UNITARY_DEFECT {
            return Err(Error::NotUnitary {
                defect,
                allowed: tol::UNITARY_DEFECT,
            });
        }
        Ok(Self {
            d_sys,
            d_res,
            evolution: Evolution::Unitary { u_t },
            basis_psi: ComplexMatrix::identity(d_sys),
        })
    }

    /// Replace the default computational basis with explicit columns |ψ_i⟩.
    pub fn with_basis(mut self, basis_psi: ComplexMatrix) -> Result<Self> {
        if !basis_psi.is_square() || basis_psi.rows() != self.d_sys {
            return Err(Error::Shape(format!(
                "basis must be {0}x{0}, got {1}x{2}",
                self.d_sys,
                basis_psi.rows(),
                basis_psi.cols()
            )));
        }
        let defect = basis_psi.unitarity_defect();
        if defect > tol::BASIS_UNITARY_DEFECT {
            return Err(Error::NotUnitary {
                defect,
                allowed: tol::BASIS_UNITARY_DEFECT,
            });
        }
        self.basis_psi = basis_psi;
        Ok(self)
    }

    pub fn d_sys(&self) -> usize {
        self.d_sys
    }

    pub fn d_res(&self) -> usize {
        self.d_res
    }

    pub fn evolution(&self) -> &Evolution {
        &self.evolution
    }

    pub fn basis_psi(&self) -> &ComplexMatrix {
        &self.basis_psi
    }

    /// H_S ⊗ 1 + 1 ⊗ H_R + H_int on the composite space.
    pub fn total_hamiltonian(&self) -> Result<ComplexMatrix> {
        match &self.evolution {
            Evolution::Hamiltonian {
                h_sys,
                h_res,
                h_int,
                ..
            } => {
                let free = &h_sys.kron(&ComplexMatrix::identity(self.d_res))
                    + &ComplexMatrix::identity(self.d_sys).kron(h_res);
                Ok(&free + h_int)
            }
            Evolution::Unitary { .. } => Err(Error::InvalidArgument(
                "unitary-specified system has no Hamiltonian decomposition".into(),
            )),
        }
    }

    /// U_S = exp(−i t H_S); identity for unitary-specified systems.
    pub fn free_system_unitary(&self) -> Result<ComplexMatrix> {
        match &self.evolution {
            Evolution::Hamiltonian { h_sys, t, .. } => unitary_exp(h_sys, *t),
            Evolution::Unitary { .. } => Ok(ComplexMatrix::identity(self.d_sys)),
        }
    }

    /// U_R = exp(−i t H_R); identity for unitary-specified systems.
    pub fn free_reservoir_unitary(&self) -> Result<ComplexMatrix> {
        match &self.evolution {
            Evolution::Hamiltonian { h_res, t, .. } => unitary_exp(h_res, *t),
            Evolution::Unitary { .. } => Ok(ComplexMatrix::identity(self.d_res)),
        }
    }

    /// The joint evolution U_t.
    pub fn total_unitary(&self) -> Result<ComplexMatrix> {
        match &self.evolution {
            Evolution::Hamiltonian { t, .. } => unitary_exp(&self.total_hamiltonian()?, *t),
            Evolution::Unitary { u_t } => Ok(u_t.clone()),
        }
    }

    /// U_int = (U_S ⊗ U_R)† · U_t.
    pub fn interaction_unitary(&self) -> Result<ComplexMatrix> {
        match &self.evolution {
            Evolution::Hamiltonian { .. } => {
                let free = self
                    .free_system_unitary()?
                    .kron(&self.free_reservoir_unitary()?);
                let u_t = self.total_unitary()?;
                Ok(&free.adjoint() * &u_t)
            }
            Evolution::Unitary { u_t } => Ok(u_t.clone()),
        }
    }

    /// Columns |ψ̃_k⟩ = U_S |ψ_k⟩, the basis in which block-derived
    /// matrix elements of the evolved channel are reported.
    pub fn basis_psi_tilde(&self) -> Result<ComplexMatrix> {
        Ok(&self.free_system_unitary()? * &self.basis_psi)
    }
}

/// The d_sys × d_sys grid of reservoir-space operators
/// V_ki = ⟨ψ_k| U_int |ψ_i⟩, with both unitarity-derived completeness
/// residuals recorded.
#[derive(Debug, Clone)]
pub struct InteractionBlocks {
    d_sys: usize,
    d_res: usize,
    blocks: Vec<Vec<ComplexMatrix>>,
    left_completeness_residual: f64,
    right_completeness_residual: f64,
}

impl InteractionBlocks {
    pub fn d_sys(&self) -> usize {
        self.d_sys
    }

    pub fn d_res(&self) -> usize {
        self.d_res
    }

    /// V_ki: output system index `k`, input system index `i`.
    pub fn block(&self, k: usize, i: usize) -> &ComplexMatrix {
        &self.blocks[k][i]
    }

    /// max_ij ‖Σ_k V_ki† V_kj − δ_ij·1‖_F.
    pub fn left_completeness_residual(&self) -> f64 {
        self.left_completeness_residual
    }

    /// max_kk' ‖Σ_i V_ki V_k'i† − δ_kk'·1‖_F.
    pub fn right_completeness_residual(&self) -> f64 {
        self.right_completeness_residual
    }
}

/// Project the interaction unitary onto the system basis, yielding the
/// reservoir-operator grid. Fails when the completeness relations are
/// broken beyond `tol::BLOCK_COMPLETENESS_ERROR`, which signals that the
/// input was not unitary on the declared composite dimensions.
pub fn extract_blocks(
    u_int: &ComplexMatrix,
    basis_psi: &ComplexMatrix,
    d_sys: usize,
    d_res: usize,
) -> Result<InteractionBlocks> {
    let d = d_sys * d_res;
    if !u_int.is_square() || u_int.rows() != d {
        return Err(Error::Shape(format!(
            "u_int must be {d}x{d}, got {}x{}",
            u_int.rows(),
            u_int.cols()
        )));
    }
    if !basis_psi.is_square() || basis_psi.rows() != d_sys {
        return Err(Error::Shape(format!(
            "basis must be {0}x{0}, got {1}x{2}",
            d_sys,
            basis_psi.rows(),
            basis_psi.cols()
        )));
    }

    let mut blocks = vec![vec![ComplexMatrix::zeros(d_res, d_res); d_sys]; d_sys];
    for k in 0..d_sys {
        let psi_k = basis_psi.column(k);
        for i in 0..d_sys {
            let psi_i = basis_psi.column(i);
            let mut v = ComplexMatrix::zeros(d_res, d_res);
            for r in 0..d_res {
                for s in 0..d_res {
                    let mut acc = Complex64::ZERO;
                    for a in 0..d_sys {
                        let ka = psi_k[a].conj();
                        if ka == Complex64::ZERO {
                            continue;
                        }
                        for b in 0..d_sys {
                            acc += ka * psi_i[b] * u_int.get(a * d_res + r, b * d_res + s);
                        }
                    }
                    v.set(r, s, acc);
                }
            }
            blocks[k][i] = v;
        }
    }

    // Σ_k V_ki† V_kj = δ_ij 1  (from U_int† U_int = 1)
    let id = ComplexMatrix::identity(d_res);
    let zero = ComplexMatrix::zeros(d_res, d_res);
    let mut left = 0.0_f64;
    for i in 0..d_sys {
        for j in 0..d_sys {
            let mut acc = ComplexMatrix::zeros(d_res, d_res);
            for row in blocks.iter() {
                acc = &acc + &(&row[i].adjoint() * &row[j]);
            }
            let target = if i == j { &id } else { &zero };
            left = left.max(acc.distance_fro(target));
        }
    }
    // Σ_i V_ki V_k'i† = δ_kk' 1  (from U_int U_int† = 1)
    let mut right = 0.0_f64;
    for k in 0..d_sys {
        for kp in 0..d_sys {
            let mut acc = ComplexMatrix::zeros(d_res, d_res);
            for i in 0..d_sys {
                acc = &acc + &(&blocks[k][i] * &blocks[kp][i].adjoint());
            }
            let target = if k == kp { &id } else { &zero };
            right = right.max(acc.distance_fro(target));
        }
    }

    if left > tol::BLOCK_COMPLETENESS_ERROR || right > tol::BLOCK_COMPLETENESS_ERROR {
        return Err(Error::InconsistentInput(format!(
            "interaction blocks violate completeness (left {left:.3e}, right {right:.3e})"
        )));
    }

    Ok(InteractionBlocks {
        d_sys,
        d_res,
        blocks,
        left_completeness_residual: left,
        right_completeness_residual: right,
    })
}

/// Initial reservoir state π₀ together with its eigendecomposition
/// π₀ = Σ_n π_n |n⟩⟨n|.
#[derive(Debug, Clone)]
pub struct ReservoirState {
    pi0: DensityMatrix,
}

impl ReservoirState {
    /// Wrap a density matrix as the reservoir preparation, enforcing the
    /// tighter reservoir tolerances on spectrum and trace.
    pub fn new(pi0: DensityMatrix) -> Result<Self> {
        let sum: f64 = pi0.eigenvalues().iter().sum();
        if (sum - 1.0).abs() > tol::RESERVOIR_TRACE {
            return Err(Error::NotAState(format!(
                "reservoir eigenvalues sum to {sum}, not 1"
            )));
        }
        if let Some(&min) = pi0.eigenvalues().first() {
            if min < tol::RESERVOIR_EIG_FLOOR {
                return Err(Error::NotAState(format!(
                    "reservoir eigenvalue {min:.3e} below floor {:.1e}",
                    tol::RESERVOIR_EIG_FLOOR
                )));
            }
        }
        Ok(Self { pi0 })
    }

    /// Pure reservoir prepared in the first computational basis state.
    pub fn ground(d_res: usize) -> Self {
        let pi0 = DensityMatrix::basis_state(d_res, 0).expect("|0><0| is a state");
        Self { pi0 }
    }

    pub fn dim(&self) -> usize {
        self.pi0.dim()
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.pi0
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.pi0.matrix()
    }

    pub fn spectrum(&self) -> &HermitianSpectrum {
        self.pi0.spectrum()
    }

    /// Indices n with π_n > tol::RESERVOIR_RETAIN, i.e. the populated
    /// eigenstates the analysis quantifies over.
    pub fn retained(&self) -> Vec<usize> {
        self.pi0
            .eigenvalues()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > tol::RESERVOIR_RETAIN)
            .map(|(n, _)| n)
            .collect()
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.pi0.eigenvalues()[n]
    }

    pub fn eigenstate(&self, n: usize) -> Vec<Complex64> {
        self.pi0.spectrum().eigenvector(n)
    }
}

/// SWAP on d ⊗ d: |i⟩⊗|r⟩ ↦ |r⟩⊗|i⟩.
pub fn swap_unitary(d: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for r in 0..d {
            u.set(r * d + i, i * d + r, Complex64::ONE);
        }
    }
    u
}

/// Block unitary Σ_k |ψ_k⟩⟨ψ_k| ⊗ W_k controlled on the system basis.
pub fn controlled_unitary(
    basis_psi: &ComplexMatrix,
    reservoir_ops: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    let d_sys = basis_psi.rows();
    if reservoir_ops.len() != d_sys {
        return Err(Error::Shape(format!(
            "need {d_sys} reservoir operators, got {}",
            reservoir_ops.len()
        )));
    }
    let d_res = reservoir_ops[0].rows();
    let mut u = ComplexMatrix::zeros(d_sys * d_res, d_sys * d_res);
    for (k, w) in reservoir_ops.iter().enumerate() {
        if w.rows() != d_res || w.cols() != d_res {
            return Err(Error::Shape(
                "reservoir operators must share one square dimension".into(),
            ));
        }
        let psi_k = basis_psi.column(k);
        let proj = ComplexMatrix::outer(&psi_k, &psi_k);
        u = &u + &proj.kron(w);
    }
    Ok(u)
}

/// The i-th computational basis column of dimension `d`.
pub fn computational_state(d: usize, i: usize) -> Vec<Complex64> {
    basis_vector(d, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::qr_unitary;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / (1u64 << 53) as f64 - 0.5
        };
        ComplexMatrix::from_fn(n, n, |_, _| c(next(), next())).symmetrize()
    }

    fn sample_unitary(n: usize, seed: u64) -> ComplexMatrix {
        qr_unitary(&sample_hermitian(n, seed)).unwrap()
    }

    fn random_grand_system(seed: u64) -> GrandSystem {
        GrandSystem::from_hamiltonians(
            2,
            2,
            sample_hermitian(2, seed),
            sample_hermitian(2, seed + 1),
            sample_hermitian(4, seed + 2),
            0.8,
        )
        .unwrap()
    }

    #[test]
    fn total_hamiltonian_of_zero_parts_is_zero() {
        let g = GrandSystem::from_hamiltonians(
            2,
            2,
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::zeros(4, 4),
            1.0,
        )
        .unwrap();
        assert!(g.total_hamiltonian().unwrap().frobenius_norm() == 0.0);
    }

    #[test]
    fn total_hamiltonian_diagonal_sum() {
        let sz = ComplexMatrix::diagonal_real(&[1.0, -1.0]);
        let g =
            GrandSystem::from_hamiltonians(2, 2, sz.clone(), sz, ComplexMatrix::zeros(4, 4), 1.0)
                .unwrap();
        let want = ComplexMatrix::diagonal_real(&[2.0, 0.0, 0.0, -2.0]);
        assert!(g.total_hamiltonian().unwrap().distance_fro(&want) <= 1e-14);
    }

    #[test]
    fn total_hamiltonian_is_hermitian() {
        let g = random_grand_system(71);
        assert!(g.total_hamiltonian().unwrap().hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn hamiltonian_dimension_mismatch_is_rejected() {
        let err = GrandSystem::from_hamiltonians(
            2,
            2,
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::zeros(3, 3),
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn no_interaction_gives_identity_u_int() {
        let g = GrandSystem::from_hamiltonians(
            2,
            2,
            sample_hermitian(2, 5),
            sample_hermitian(2, 6),
            ComplexMatrix::zeros(4, 4),
            1.3,
        )
        .unwrap();
        let u_int = g.interaction_unitary().unwrap();
        assert!(u_int.distance_fro(&ComplexMatrix::identity(4)) <= 1e-10);
    }

    #[test]
    fn zero_time_gives_identity_u_int() {
        let g = GrandSystem::from_hamiltonians(
            2,
            2,
            sample_hermitian(2, 81),
            sample_hermitian(2, 82),
            sample_hermitian(4, 83),
            0.0,
        )
        .unwrap();
        assert!(
            g.interaction_unitary()
                .unwrap()
                .distance_fro(&ComplexMatrix::identity(4))
                <= 1e-12
        );
    }

    #[test]
    fn interaction_unitary_reconstructs_total() {
        let g = random_grand_system(91);
        let u_t = g.total_unitary().unwrap();
        let free = g
            .free_system_unitary()
            .unwrap()
            .kron(&g.free_reservoir_unitary().unwrap());
        let u_int = g.interaction_unitary().unwrap();
        assert!((&free * &u_int).distance_fro(&u_t) <= 1e-9);
        assert!(u_int.unitarity_defect() <= 1e-9);
    }

    #[test]
    fn blocks_of_identity_are_kronecker_deltas() {
        let blocks =
            extract_blocks(&ComplexMatrix::identity(6), &ComplexMatrix::identity(2), 2, 3).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                let want = if k == i {
                    ComplexMatrix::identity(3)
                } else {
                    ComplexMatrix::zeros(3, 3)
                };
                assert!(blocks.block(k, i).distance_fro(&want) == 0.0);
            }
        }
    }

    #[test]
    fn blocks_of_controlled_unitary_are_diagonal() {
        let w0 = sample_unitary(3, 101);
        let w1 = sample_unitary(3, 102);
        let u = controlled_unitary(&ComplexMatrix::identity(2), &[w0.clone(), w1.clone()]).unwrap();
        let blocks = extract_blocks(&u, &ComplexMatrix::identity(2), 2, 3).unwrap();
        assert!(blocks.block(0, 0).distance_fro(&w0) <= 1e-13);
        assert!(blocks.block(1, 1).distance_fro(&w1) <= 1e-13);
        assert!(blocks.block(0, 1).frobenius_norm() <= 1e-13);
        assert!(blocks.block(1, 0).frobenius_norm() <= 1e-13);
    }

    #[test]
    fn blocks_in_computational_basis_are_raw_slices() {
        let u = sample_unitary(6, 111);
        let blocks = extract_blocks(&u, &ComplexMatrix::identity(2), 2, 3).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for r in 0..3 {
                    for s in 0..3 {
                        let want = u.get(k * 3 + r, i * 3 + s);
                        assert!((blocks.block(k, i).get(r, s) - want).norm() <= 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn blocks_satisfy_completeness_for_random_systems() {
        for seed in 0..5u64 {
            let g = random_grand_system(200 + seed);
            let blocks =
                extract_blocks(&g.interaction_unitary().unwrap(), g.basis_psi(), 2, 2).unwrap();
            assert!(blocks.left_completeness_residual() <= 1e-9);
            assert!(blocks.right_completeness_residual() <= 1e-9);
        }
    }

    #[test]
    fn basis_rotation_conjugates_blocks() {
        let u = sample_unitary(4, 131);
        let q = sample_unitary(2, 132);
        let in_rotated = extract_blocks(&u, &q, 2, 2).unwrap();
        let in_comp = extract_blocks(&u, &ComplexMatrix::identity(2), 2, 2).unwrap();
        // V^Q_{ki} = Σ_ab conj(Q[a,k]) Q[b,i] V_ab
        for k in 0..2 {
            for i in 0..2 {
                let mut want = ComplexMatrix::zeros(2, 2);
                for a in 0..2 {
                    for b in 0..2 {
                        let coeff = q.get(a, k).conj() * q.get(b, i);
                        want = &want + &in_comp.block(a, b).scale(coeff);
                    }
                }
                assert!(in_rotated.block(k, i).distance_fro(&want) <= 1e-10);
            }
        }
    }

    #[test]
    fn extract_rejects_non_unitary_input() {
        let m = ComplexMatrix::identity(4).scale(c(2.0, 0.0));
        assert!(matches!(
            extract_blocks(&m, &ComplexMatrix::identity(2), 2, 2),
            Err(Error::InconsistentInput(_))
        ));
    }

    #[test]
    fn reservoir_retained_drops_zero_weights() {
        let res = ReservoirState::ground(3);
        let retained = res.retained();
        assert_eq!(retained.len(), 1);
        assert!((res.weight(retained[0]) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn swap_unitary_swaps() {
        let u = swap_unitary(2);
        assert!(u.unitarity_defect() == 0.0);
        // |0⟩⊗|1⟩ → |1⟩⊗|0⟩
        let mut v = vec![Complex64::ZERO; 4];
        v[1] = Complex64::ONE;
        let w = u.matvec(&v);
        assert!((w[2] - Complex64::ONE).norm() == 0.0);
    }

    #[test]
    fn unitary_specified_system_roundtrip() {
        let u = sample_unitary(4, 141);
        let g = GrandSystem::from_unitary(2, 2, u.clone()).unwrap();
        assert!(g.total_unitary().unwrap().distance_fro(&u) == 0.0);
        assert!(g.interaction_unitary().unwrap().distance_fro(&u) == 0.0);
        assert!(
            g.free_system_unitary()
                .unwrap()
                .distance_fro(&ComplexMatrix::identity(2))
                == 0.0
        );
        assert!(matches!(g.total_hamiltonian(), Err(Error::InvalidArgument(_))));
    }
}
