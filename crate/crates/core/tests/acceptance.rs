//! Acceptance suite: every release criterion as one test, each printing a
//! PASS line with the measured numbers (visible with `--nocapture`).
//!
//! The two thousand-instance sweeps are computed once and shared between
//! criteria; all instances are fully seeded and reproducible.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use qunital_core::channel::{entropy_gain, unitality, ChannelKraus};
use qunital_core::ensemble::{demon_instance, SeededGenerator};
use qunital_core::htheorem::{verify_theorem_full, TheoremVerification};
use qunital_core::matrix::ComplexMatrix;
use qunital_core::state::DensityMatrix;
use qunital_core::system::GrandSystem;

const MASTER_SEED: u64 = 0xA5EED;
const TOL_DIAG: f64 = 1e-9;
const TOL_UNITAL: f64 = 1e-8;
const TRIALS: usize = 1000;

/// (d_sys, d_res) cycle covering {2,3,4} × {2,3,4}.
const DIMS: [(usize, usize); 9] = [
    (2, 2),
    (2, 3),
    (2, 4),
    (3, 2),
    (3, 3),
    (3, 4),
    (4, 2),
    (4, 3),
    (4, 4),
];

struct Sweep {
    verifications: Vec<TheoremVerification>,
    elapsed: Duration,
}

fn controlled_sweep() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let start = Instant::now();
        let mut verifications = Vec::with_capacity(TRIALS);
        for trial in 0..TRIALS {
            let (d_sys, d_res) = DIMS[trial % DIMS.len()];
            let mut gen = SeededGenerator::new(MASTER_SEED, trial as u64);
            let u = gen
                .controlled_interaction(d_sys, d_res, &ComplexMatrix::identity(d_sys))
                .unwrap();
            let res = gen.random_reservoir(d_res).unwrap();
            let g = GrandSystem::from_unitary(d_sys, d_res, u).unwrap();
            verifications.push(verify_theorem_full(&g, &res, TOL_DIAG, TOL_UNITAL).unwrap());
        }
        Sweep {
            verifications,
            elapsed: start.elapsed(),
        }
    })
}

fn haar_sweep() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let start = Instant::now();
        let mut verifications = Vec::with_capacity(TRIALS);
        for trial in 0..TRIALS {
            let (d_sys, d_res) = DIMS[trial % DIMS.len()];
            let mut gen = SeededGenerator::new(MASTER_SEED, 10_000 + trial as u64);
            let u = gen.haar_unitary(d_sys * d_res).unwrap();
            let res = gen.random_reservoir(d_res).unwrap();
            let g = GrandSystem::from_unitary(d_sys, d_res, u).unwrap();
            verifications.push(verify_theorem_full(&g, &res, TOL_DIAG, TOL_UNITAL).unwrap());
        }
        Sweep {
            verifications,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn acceptance_01_theorem_implication_on_controlled_family() {
    let sweep = controlled_sweep();
    let mut invariant = 0usize;
    let mut unital = 0usize;
    let mut max_diag = 0.0f64;
    let mut max_defect = 0.0f64;
    for v in &sweep.verifications {
        if v.report.diag_invariant {
            invariant += 1;
        }
        if v.report.unital {
            unital += 1;
        }
        max_diag = max_diag.max(v.report.diag_residual);
        max_defect = max_defect.max(v.report.unitality_defect);
    }
    assert_eq!(invariant, TRIALS, "diagonal invariance failures");
    assert_eq!(unital, TRIALS, "unitality failures");
    assert!(
        sweep.elapsed < Duration::from_secs(60),
        "controlled sweep took {:?}",
        sweep.elapsed
    );
    println!(
        "PASS theorem implication: {TRIALS}/{TRIALS} controlled instances diag-invariant \
         (max residual {max_diag:.3e}) and unital (max defect {max_defect:.3e}) in {:?}",
        sweep.elapsed
    );
}

#[test]
fn acceptance_02_no_counterexample_among_haar_instances() {
    let sweep = haar_sweep();
    let mut invariant_count = 0usize;
    let mut counterexamples = 0usize;
    for v in &sweep.verifications {
        if v.report.diag_invariant {
            invariant_count += 1;
            if v.report.unitality_defect > TOL_UNITAL {
                counterexamples += 1;
            }
        }
        assert!(v.report.implication_consistent);
    }
    assert_eq!(counterexamples, 0);
    println!(
        "PASS no counterexample: {TRIALS} Haar instances, {invariant_count} incidentally \
         diag-invariant, 0 with invariance but unitality defect > {TOL_UNITAL:.0e}"
    );
}

#[test]
fn acceptance_03_unitality_routes_agree_entrywise() {
    let mut max_residual = 0.0f64;
    for v in controlled_sweep()
        .verifications
        .iter()
        .chain(haar_sweep().verifications.iter())
    {
        max_residual = max_residual.max(v.report.unitality_agreement_residual);
    }
    assert!(max_residual <= 1e-9, "worst agreement {max_residual:.3e}");
    println!(
        "PASS unitality-route agreement: max entrywise |(Φ(1)−1) − commutator sum| = \
         {max_residual:.3e} over {} channels",
        2 * TRIALS
    );
}

#[test]
fn acceptance_04_factorization_witness_on_invariant_instances() {
    let mut checked = 0usize;
    let mut max_off = 0.0f64;
    let mut max_defect = 0.0f64;
    for v in controlled_sweep()
        .verifications
        .iter()
        .chain(haar_sweep().verifications.iter())
    {
        if !v.report.diag_invariant {
            continue;
        }
        checked += 1;
        max_off = max_off.max(v.report.max_off_block_norm);
        max_defect = max_defect.max(v.report.max_norm_defect);
    }
    assert!(checked >= TRIALS);
    assert!(max_off <= 1e-8, "worst off-block norm {max_off:.3e}");
    assert!(max_defect <= 1e-8, "worst normalization defect {max_defect:.3e}");
    println!(
        "PASS factorization witness: {checked} invariant instances, max off-block norm \
         {max_off:.3e}, max |‖φ‖−1| = {max_defect:.3e}"
    );
}

#[test]
fn acceptance_05_dephasing_reconstruction_on_invariant_instances() {
    let mut checked = 0usize;
    let mut max_residual = 0.0f64;
    let mut max_recon_defect = 0.0f64;
    for v in controlled_sweep()
        .verifications
        .iter()
        .chain(haar_sweep().verifications.iter())
    {
        if !v.report.diag_invariant {
            continue;
        }
        checked += 1;
        let residual = v
            .report
            .dephasing_residual
            .expect("invariant instance must reconstruct");
        let defect = v
            .report
            .reconstruction_unitality_defect
            .expect("invariant instance must reconstruct");
        max_residual = max_residual.max(residual);
        max_recon_defect = max_recon_defect.max(defect);
    }
    assert!(checked >= TRIALS);
    assert!(max_residual <= 1e-9, "worst Choi distance {max_residual:.3e}");
    assert!(
        max_recon_defect <= 1e-9,
        "worst reconstruction unitality defect {max_recon_defect:.3e}"
    );
    println!(
        "PASS dephasing reconstruction: {checked} invariant instances, max Choi distance \
         {max_residual:.3e}, reconstructions unital within {max_recon_defect:.3e}"
    );
}

#[test]
fn acceptance_06_entropy_gain_lower_bound() {
    let controlled = controlled_sweep();
    let haar = haar_sweep();
    let mut worst_margin = f64::INFINITY;
    let mut worst_unital_gain = f64::INFINITY;
    let mut worst_unital_bound = 0.0f64;
    let mut pairs = 0usize;
    for (idx, v) in haar
        .verifications
        .iter()
        .take(100)
        .chain(controlled.verifications.iter().take(100))
        .enumerate()
    {
        let mut gen = SeededGenerator::new(MASTER_SEED, 20_000 + idx as u64);
        let d = v.channel.d_sys();
        let rho = gen.random_density(d, d).unwrap();
        let eg = entropy_gain(&v.channel, &rho).unwrap();
        worst_margin = worst_margin.min(eg.gain - eg.holevo_bound);
        if idx >= 100 {
            // controlled channels are unital: bound must vanish
            worst_unital_gain = worst_unital_gain.min(eg.gain);
            worst_unital_bound = worst_unital_bound.max(eg.holevo_bound.abs());
        }
        pairs += 1;
    }
    assert_eq!(pairs, 200);
    assert!(worst_margin >= -1e-9, "worst margin {worst_margin:.3e}");
    assert!(worst_unital_bound <= 1e-10);
    assert!(worst_unital_gain >= -1e-10);
    println!(
        "PASS entropy-gain bound: 200 (channel, state) pairs, min gain−bound = \
         {worst_margin:.3e}; unital subset: |bound| ≤ {worst_unital_bound:.3e}, \
         min gain {worst_unital_gain:.3e}"
    );
}

#[test]
fn acceptance_07_demon_instance_analytics() {
    let (u, res) = demon_instance();
    let ch = ChannelKraus::from_evolution(&u, &res, 2, 2).unwrap();
    let cert = unitality(&ch);
    let defect_error = (cert.defect_fro - 2.0f64.sqrt()).abs();
    assert!(defect_error <= 1e-10, "defect error {defect_error:.3e}");
    let want_phi = ComplexMatrix::diagonal_real(&[2.0, 0.0]);
    assert!(cert.phi_of_one.distance_fro(&want_phi) <= 1e-10);

    let mixed = DensityMatrix::maximally_mixed(2);
    let eg = entropy_gain(&ch, &mixed).unwrap();
    let gain_error = (eg.gain + std::f64::consts::LN_2).abs();
    assert!(gain_error <= 1e-10, "gain error {gain_error:.3e}");
    assert!(eg.gap().abs() <= 1e-10, "gap {:.3e}", eg.gap());
    println!(
        "PASS demon instance: Φ(1) = 2|0⟩⟨0| (defect √2 ± {defect_error:.3e}), entropy gain \
         −ln 2 ± {gain_error:.3e}, bound saturated with gap {:.3e}",
        eg.gap()
    );
}

#[test]
fn acceptance_08_channel_validity() {
    let mut channels = 0usize;
    let mut max_completeness = 0.0f64;
    let mut min_choi_eig = f64::INFINITY;
    let mut check = |ch: &ChannelKraus| {
        channels += 1;
        max_completeness = max_completeness.max(ch.completeness_defect());
        min_choi_eig = min_choi_eig.min(ch.choi().min_eigenvalue().unwrap());
    };
    for v in controlled_sweep()
        .verifications
        .iter()
        .chain(haar_sweep().verifications.iter())
    {
        check(&v.channel);
        if let Some(recon) = &v.reconstruction {
            check(recon);
        }
    }
    let (u, res) = demon_instance();
    check(&ChannelKraus::from_evolution(&u, &res, 2, 2).unwrap());
    assert!(max_completeness <= 1e-9, "worst completeness {max_completeness:.3e}");
    assert!(min_choi_eig >= -1e-9, "worst Choi eigenvalue {min_choi_eig:.3e}");
    println!(
        "PASS channel validity: {channels} channels, max Kraus completeness defect \
         {max_completeness:.3e}, min Choi eigenvalue {min_choi_eig:.3e}"
    );
}

#[test]
fn acceptance_09_collision_divisibility_and_monotone_entropy() {
    let mut gen = SeededGenerator::new(MASTER_SEED, 30_000);
    let u = gen
        .controlled_interaction(2, 2, &ComplexMatrix::identity(2))
        .unwrap();
    let res = gen.random_reservoir(2).unwrap();
    let ch = ChannelKraus::from_evolution(&u, &res, 2, 2).unwrap();
    assert!(unitality(&ch).defect_fro <= 1e-9);

    // composing two collisions is the same map as applying twice
    let twice = ChannelKraus::compose(&ch, &ch).unwrap();
    let probe = gen.random_density(2, 2).unwrap();
    let sequential = ch.apply(&ch.apply(&probe).unwrap()).unwrap();
    let composed = twice.apply(&probe).unwrap();
    assert!(
        sequential
            .matrix()
            .max_abs_diff(composed.matrix())
            <= 1e-10
    );

    let mut min_step = f64::INFINITY;
    for state_idx in 0..20u64 {
        let mut state_gen = SeededGenerator::new(MASTER_SEED, 31_000 + state_idx);
        let mut rho = state_gen.random_density(2, 2).unwrap();
        let mut entropy = rho.entropy_vn();
        for _ in 0..10 {
            rho = ch.apply(&rho).unwrap();
            let next = rho.entropy_vn();
            min_step = min_step.min(next - entropy);
            entropy = next;
        }
    }
    assert!(min_step >= -1e-9, "entropy dropped by {min_step:.3e}");
    println!(
        "PASS divisibility/monotonicity: 20 states × 10 collisions, min entropy step \
         {min_step:.3e} ≥ −1e-9"
    );
}

#[test]
fn supplementary_h_matrix_spectral_side_conditions() {
    // on diagonal-invariant instances the H_k eigensystems must satisfy
    // h_α = |ξ_α[k]|² with Σ_α h_α = 1
    let mut max_component = 0.0f64;
    let mut max_trace = 0.0f64;
    for v in controlled_sweep().verifications.iter() {
        if !v.report.diag_invariant {
            continue;
        }
        let (component, trace) = v.h_set.spectral_condition_residual().unwrap();
        max_component = max_component.max(component);
        max_trace = max_trace.max(trace);
    }
    assert!(max_component <= 1e-8);
    assert!(max_trace <= 1e-9);
    println!(
        "PASS spectral side conditions: max |h_α − |ξ_α[k]|²| = {max_component:.3e}, \
         max |Σ h_α − 1| = {max_trace:.3e}"
    );
}
