//! Quantum channels in Kraus form, their Choi matrices, unitality
//! certificates and the entropy-gain lower bound.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Subsystem};
use crate::spectral::eig_hermitian;
use crate::state::DensityMatrix;
use crate::system::{InteractionBlocks, ReservoirState};
use crate::tol;

/// A completely positive trace-preserving map as a list of Kraus
/// operators with Σ K†K = 1 certified at construction.
#[derive(Debug, Clone)]
pub struct ChannelKraus {
    d_sys: usize,
    kraus_ops: Vec<ComplexMatrix>,
}

impl ChannelKraus {
    /// Wrap a Kraus set, dropping negligible operators and checking the
    /// completeness relation within `tol::KRAUS_COMPLETENESS`.
    pub fn new(d_sys: usize, kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus_ops.is_empty() {
            return Err(Error::InvalidArgument("empty Kraus set".into()));
        }
        let mut kept = Vec::with_capacity(kraus_ops.len());
        for k in kraus_ops {
            if !k.is_square() || k.rows() != d_sys {
                return Err(Error::Shape(format!(
                    "Kraus operator must be {d_sys}x{d_sys}, got {}x{}",
                    k.rows(),
                    k.cols()
                )));
            }
            if k.frobenius_norm() >= tol::KRAUS_DROP {
                kept.push(k);
            }
        }
        if kept.is_empty() {
            return Err(Error::InvalidArgument(
                "all Kraus operators below the weight cutoff".into(),
            ));
        }
        let ch = Self {
            d_sys,
            kraus_ops: kept,
        };
        let defect = ch.completeness_defect();
        if defect > tol::KRAUS_COMPLETENESS {
            return Err(Error::InconsistentInput(format!(
                "Kraus completeness defect {defect:.3e} exceeds {:.1e}",
                tol::KRAUS_COMPLETENESS
            )));
        }
        Ok(ch)
    }

    /// The identity channel on dimension `d`.
    pub fn identity(d: usize) -> Self {
        Self {
            d_sys: d,
            kraus_ops: vec![ComplexMatrix::identity(d)],
        }
    }

    /// The channel induced by a joint unitary and an initial reservoir
    /// state: Φ(ρ) = Tr_res{U_t (ρ ⊗ π₀) U_t†}. Kraus operators are
    /// K_{m,n} = √π_n (1 ⊗ ⟨m|) U_t (1 ⊗ |n⟩) over the π₀ eigenbasis,
    /// keeping only populated n.
    pub fn from_evolution(
        u_t: &ComplexMatrix,
        res: &ReservoirState,
        d_sys: usize,
        d_res: usize,
    ) -> Result<Self> {
        let d = d_sys * d_res;
        if !u_t.is_square() || u_t.rows() != d {
            return Err(Error::Shape(format!(
                "u_t must be {d}x{d}, got {}x{}",
                u_t.rows(),
                u_t.cols()
            )));
        }
        if res.dim() != d_res {
            return Err(Error::Shape(format!(
                "reservoir dimension {} does not match d_res {}",
                res.dim(),
                d_res
            )));
        }
        let defect = u_t.unitarity_defect();
        if defect > tol::UNITARY_DEFECT {
            return Err(Error::NotUnitary {
                defect,
                allowed: tol::UNITARY_DEFECT,
            });
        }

        let mut kraus_ops = Vec::new();
        for &n in &res.retained() {
            let weight = res.weight(n).sqrt();
            let ket_n = res.eigenstate(n);
            for m in 0..d_res {
                let bra_m = res.eigenstate(m);
                let mut k = ComplexMatrix::zeros(d_sys, d_sys);
                for i in 0..d_sys {
                    for j in 0..d_sys {
                        let mut acc = Complex64::ZERO;
                        for r in 0..d_res {
                            let mr = bra_m[r].conj();
                            if mr == Complex64::ZERO {
                                continue;
                            }
                            for s in 0..d_res {
                                acc += mr * ket_n[s] * u_t.get(i * d_res + r, j * d_res + s);
                            }
                        }
                        k.set(i, j, acc * weight);
                    }
                }
                kraus_ops.push(k);
            }
        }
        Self::new(d_sys, kraus_ops)
    }

    pub fn d_sys(&self) -> usize {
        self.d_sys
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// ‖Σ K†K − 1‖_F.
    pub fn completeness_defect(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.d_sys, self.d_sys);
        for k in &self.kraus_ops {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.distance_fro(&ComplexMatrix::identity(self.d_sys))
    }

    /// Σ K ρ K†.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d_sys {
            return Err(Error::Shape(format!(
                "state dimension {} does not match channel dimension {}",
                rho.dim(),
                self.d_sys
            )));
        }
        let out = self.apply_matrix(rho.matrix());
        DensityMatrix::new(out.symmetrize())
    }

    /// Σ K M K† on a bare matrix; used for Choi construction and tests.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.d_sys, self.d_sys);
        for k in &self.kraus_ops {
            acc = &acc + &(&(k * m) * &k.adjoint());
        }
        acc
    }

    /// Φ(1) = Σ K K†.
    pub fn phi_of_identity(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.d_sys, self.d_sys);
        for k in &self.kraus_ops {
            acc = &acc + &(k * &k.adjoint());
        }
        acc
    }

    /// Sequential composition `later ∘ earlier` with Kraus set
    /// {K_later · K_earlier}; negligible products are dropped.
    pub fn compose(later: &Self, earlier: &Self) -> Result<Self> {
        if later.d_sys != earlier.d_sys {
            return Err(Error::Shape(format!(
                "cannot compose channels of dimension {} and {}",
                later.d_sys, earlier.d_sys
            )));
        }
        let mut ops = Vec::with_capacity(later.kraus_ops.len() * earlier.kraus_ops.len());
        for kl in &later.kraus_ops {
            for ke in &earlier.kraus_ops {
                ops.push(kl * ke);
            }
        }
        Self::new(later.d_sys, ops)
    }

    /// Choi matrix (Φ ⊗ id) |Ω⟩⟨Ω| with |Ω⟩ = Σ_i |i⟩|i⟩ unnormalized;
    /// output slot first.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.d_sys;
        let mut j = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for jj in 0..d {
                let mut unit = ComplexMatrix::zeros(d, d);
                unit.set(i, jj, Complex64::ONE);
                let image = self.apply_matrix(&unit);
                // J[(a·d+i),(b·d+j)] = Φ(E_ij)[a,b]
                for a in 0..d {
                    for b in 0..d {
                        j.set(a * d + i, b * d + jj, image.get(a, b));
                    }
                }
            }
        }
        ChoiMatrix { d_sys: d, matrix: j }
    }
}

/// The channel's Choi matrix: the representation-independent fingerprint
/// used for channel equality.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    d_sys: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn d_sys(&self) -> usize {
        self.d_sys
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Smallest eigenvalue; ≥ −1e-9 certifies complete positivity.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let s = eig_hermitian(&self.matrix.symmetrize())?;
        Ok(s.eigenvalues().first().copied().unwrap_or(0.0))
    }

    /// Trace over the output slot; equals 1 for trace-preserving maps.
    pub fn input_marginal(&self) -> Result<ComplexMatrix> {
        self.matrix
            .partial_trace(self.d_sys, self.d_sys, Subsystem::System)
    }

    /// Frobenius distance ‖J(Φ₁) − J(Φ₂)‖_F.
    pub fn distance(&self, other: &ChoiMatrix) -> f64 {
        self.matrix.distance_fro(&other.matrix)
    }

    /// Rebuild Φ(ρ) from the Choi matrix:
    /// Φ(ρ)[a,b] = Σ_ij ρ[i,j]·J[(a,i),(b,j)].
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = self.d_sys;
        ComplexMatrix::from_fn(d, d, |a, b| {
            let mut acc = Complex64::ZERO;
            for i in 0..d {
                for j in 0..d {
                    acc += rho.get(i, j) * self.matrix.get(a * d + i, b * d + j);
                }
            }
            acc
        })
    }
}

/// Unitality evidence: Φ(1), its Frobenius distance from the identity,
/// and — when interaction blocks from the same evolution are supplied —
/// the commutator-sum matrix Σ_i ⟨[V_k'i†, V_ki]⟩ expressed in the
/// |ψ̃_k⟩ basis, plus the residual between the two routes.
#[derive(Debug, Clone)]
pub struct UnitalityCertificate {
    pub phi_of_one: ComplexMatrix,
    pub defect_fro: f64,
    /// Columns |ψ̃_k⟩ used for the block route; `None` for bare channels.
    pub basis_tilde: Option<ComplexMatrix>,
    pub commutator_matrix: Option<ComplexMatrix>,
    pub agreement_residual: Option<f64>,
}

/// Unitality from the Kraus side only: Φ(1) and ‖Φ(1) − 1‖_F.
pub fn unitality(ch: &ChannelKraus) -> UnitalityCertificate {
    let phi_of_one = ch.phi_of_identity();
    let defect_fro = phi_of_one.distance_fro(&ComplexMatrix::identity(ch.d_sys()));
    UnitalityCertificate {
        phi_of_one,
        defect_fro,
        basis_tilde: None,
        commutator_matrix: None,
        agreement_residual: None,
    }
}

/// Unitality via both routes. `basis_tilde` holds the columns
/// |ψ̃_k⟩ = U_S|ψ_k⟩ matching the evolution the channel and blocks came
/// from. Fails when the routes disagree beyond
/// `tol::UNITALITY_AGREEMENT_ERROR`, which means the blocks do not
/// belong to this channel.
pub fn unitality_with_blocks(
    ch: &ChannelKraus,
    blocks: &InteractionBlocks,
    res: &ReservoirState,
    basis_tilde: &ComplexMatrix,
) -> Result<UnitalityCertificate> {
    let d_sys = ch.d_sys();
    if blocks.d_sys() != d_sys {
        return Err(Error::Shape(format!(
            "blocks are for d_sys {}, channel has {}",
            blocks.d_sys(),
            d_sys
        )));
    }
    if blocks.d_res() != res.dim() {
        return Err(Error::Shape(format!(
            "blocks are for d_res {}, reservoir has {}",
            blocks.d_res(),
            res.dim()
        )));
    }
    if !basis_tilde.is_square() || basis_tilde.rows() != d_sys {
        return Err(Error::Shape("basis_tilde must be d_sys x d_sys".into()));
    }

    let pi0 = res.matrix();
    let commutator = ComplexMatrix::from_fn(d_sys, d_sys, |k, kp| {
        let mut acc = Complex64::ZERO;
        for i in 0..d_sys {
            let v_ki = blocks.block(k, i);
            let v_kpi = blocks.block(kp, i);
            let fwd = &v_kpi.adjoint() * v_ki;
            let bwd = v_ki * &v_kpi.adjoint();
            acc += (pi0 * &(&fwd - &bwd)).trace();
        }
        acc
    });

    let base = unitality(ch);
    // move Φ(1) − 1 into the |ψ̃_k⟩ basis before comparing entrywise
    let shifted = &base.phi_of_one - &ComplexMatrix::identity(d_sys);
    let in_tilde = &(&basis_tilde.adjoint() * &shifted) * basis_tilde;
    let agreement = in_tilde.max_abs_diff(&commutator);
    if agreement > tol::UNITALITY_AGREEMENT_ERROR {
        return Err(Error::InconsistentInput(format!(
            "block route disagrees with Φ(1) by {agreement:.3e}; blocks do not match the channel"
        )));
    }

    Ok(UnitalityCertificate {
        phi_of_one: base.phi_of_one,
        defect_fro: base.defect_fro,
        basis_tilde: Some(basis_tilde.clone()),
        commutator_matrix: Some(commutator),
        agreement_residual: Some(agreement),
    })
}

/// Entropy gain of one channel application and its lower bound.
#[derive(Debug, Clone, Copy)]
pub struct EntropyGain {
    /// S(Φ(ρ)) − S(ρ) in nats.
    pub gain: f64,
    /// −Tr{Φ(ρ) ln Φ(1)} evaluated on the support of Φ(1).
    pub holevo_bound: f64,
}

impl EntropyGain {
    pub fn gap(&self) -> f64 {
        self.gain - self.holevo_bound
    }
}

/// Compute S(Φ(ρ)) − S(ρ) and the bound −Tr{Φ(ρ) ln Φ(1)}.
///
/// ln Φ(1) is evaluated spectrally on eigenvalues above
/// `tol::RESERVOIR_RETAIN`; Φ(ρ) mass on the discarded kernel beyond
/// `tol::SUPPORT_LEAK` is a numerical-inconsistency error, since
/// supp Φ(ρ) ⊆ supp Φ(1) holds exactly for CP maps.
pub fn entropy_gain(ch: &ChannelKraus, rho: &DensityMatrix) -> Result<EntropyGain> {
    let out = ch.apply(rho)?;
    let gain = out.entropy_vn() - rho.entropy_vn();

    let phi_one = ch.phi_of_identity().symmetrize();
    let spectrum = eig_hermitian(&phi_one)?;

    let mut bound = 0.0;
    let mut kernel_mass = 0.0;
    for (idx, &lambda) in spectrum.eigenvalues().iter().enumerate() {
        let q = spectrum.eigenvector(idx);
        // ⟨q| Φ(ρ) |q⟩
        let weight = crate::matrix::vec_inner(&q, &out.matrix().matvec(&q)).re;
        if lambda > tol::RESERVOIR_RETAIN {
            bound -= weight * lambda.ln();
        } else {
            kernel_mass += weight.max(0.0);
        }
    }
    if kernel_mass > tol::SUPPORT_LEAK {
        return Err(Error::NumericalInconsistency(format!(
            "Φ(ρ) has mass {kernel_mass:.3e} outside the support of Φ(1)"
        )));
    }

    Ok(EntropyGain {
        gain,
        holevo_bound: bound,
    })
}
