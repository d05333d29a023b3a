//! Implementations of the analyze / sweep / demo subcommands.
//!
//! Validation problems (unreadable files, malformed JSON, inconsistent
//! descriptions) surface as `Err(String)` and exit with code 2. A
//! violated theorem implication — which signals a bug, not bad input —
//! exits with code 3 so CI can treat it as its own failure class.

use std::time::Instant;

use rayon::prelude::*;

use qunital_core::channel::{entropy_gain, ChannelKraus};
use qunital_core::ensemble::{demon_instance, SeededGenerator};
use qunital_core::htheorem::{verify_theorem_full, TheoremVerification};
use qunital_core::matrix::ComplexMatrix;
use qunital_core::state::DensityMatrix;
use qunital_core::system::{GrandSystem, ReservoirState};
use qunital_core::tol;

use crate::schema::{
    digest, matrix_from_json, ChannelDumpFile, EffectiveTolerances, EntropyDiagnostic, ReportFile,
    SweepAggregate, SweepReportFile, SystemSpecFile, TheoremReportJson, TrialRecord,
    SCHEMA_VERSION,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_THEOREM_VIOLATION: u8 = 3;

pub struct Tolerances {
    pub diag: f64,
    pub unital: f64,
}

/// Resolve tolerances: command-line flag beats spec file beats default.
pub fn resolve_tolerances(
    flag_diag: Option<f64>,
    flag_unital: Option<f64>,
    spec: Option<&SystemSpecFile>,
) -> Tolerances {
    let file = spec.and_then(|s| s.tolerances);
    Tolerances {
        diag: flag_diag
            .or(file.and_then(|t| t.diag))
            .unwrap_or(tol::DEFAULT_TOL_DIAG),
        unital: flag_unital
            .or(file.and_then(|t| t.unital))
            .unwrap_or(tol::DEFAULT_TOL_UNITAL),
    }
}

/// Build the grand system and reservoir from a parsed spec file.
pub fn build_instance(spec: &SystemSpecFile) -> Result<(GrandSystem, ReservoirState), String> {
    if spec.version != SCHEMA_VERSION {
        return Err(format!(
            "version: expected {SCHEMA_VERSION}, got {}",
            spec.version
        ));
    }
    if spec.d_sys == 0 || spec.d_res == 0 {
        return Err("d_sys and d_res must be positive".into());
    }
    let d = spec.d_sys * spec.d_res;

    let g = match (&spec.hamiltonians, &spec.unitary) {
        (Some(_), Some(_)) => {
            return Err("exactly one of `hamiltonians` and `unitary` must be present, got both".into())
        }
        (None, None) => {
            return Err("exactly one of `hamiltonians` and `unitary` must be present, got neither".into())
        }
        (Some(h), None) => {
            let t = spec
                .t
                .ok_or_else(|| "t: required with `hamiltonians`".to_string())?;
            let h_sys = matrix_from_json("hamiltonians.h_sys", &h.h_sys, spec.d_sys, spec.d_sys)?;
            let h_res = matrix_from_json("hamiltonians.h_res", &h.h_res, spec.d_res, spec.d_res)?;
            let h_int = matrix_from_json("hamiltonians.h_int", &h.h_int, d, d)?;
            GrandSystem::from_hamiltonians(spec.d_sys, spec.d_res, h_sys, h_res, h_int, t)
                .map_err(|e| format!("hamiltonians: {e}"))?
        }
        (None, Some(u)) => {
            let m = match (&u.u_t, &u.u_int) {
                (Some(m), None) => matrix_from_json("unitary.u_t", m, d, d)?,
                (None, Some(m)) => matrix_from_json("unitary.u_int", m, d, d)?,
                (Some(_), Some(_)) => {
                    return Err("unitary: give exactly one of `u_t` and `u_int`, got both".into())
                }
                (None, None) => {
                    return Err("unitary: give exactly one of `u_t` and `u_int`, got neither".into())
                }
            };
            GrandSystem::from_unitary(spec.d_sys, spec.d_res, m)
                .map_err(|e| format!("unitary: {e}"))?
        }
    };

    let g = match &spec.basis {
        Some(b) => {
            let basis = matrix_from_json("basis", b, spec.d_sys, spec.d_sys)?;
            g.with_basis(basis).map_err(|e| format!("basis: {e}"))?
        }
        None => g,
    };

    let pi0_matrix = matrix_from_json("pi0", &spec.pi0, spec.d_res, spec.d_res)?;
    let pi0 = DensityMatrix::new(pi0_matrix).map_err(|e| format!("pi0: {e}"))?;
    let res = ReservoirState::new(pi0).map_err(|e| format!("pi0: {e}"))?;

    Ok((g, res))
}

/// Entropy diagnostics over the maximally mixed state plus seeded probes.
fn entropy_probes(
    channel: &ChannelKraus,
    d_sys: usize,
    states: usize,
    seed: u64,
) -> Result<Vec<EntropyDiagnostic>, String> {
    let mut probes: Vec<(String, DensityMatrix)> =
        vec![("maximally-mixed".into(), DensityMatrix::maximally_mixed(d_sys))];
    let mut gen = SeededGenerator::new(seed, u64::MAX);
    for i in 0..states {
        let rho = gen
            .random_density(d_sys, d_sys)
            .map_err(|e| format!("probe state: {e}"))?;
        probes.push((format!("seeded-{i}"), rho));
    }
    probes
        .into_iter()
        .map(|(label, rho)| {
            let entropy_in = rho.entropy_vn();
            let eg = entropy_gain(channel, &rho).map_err(|e| format!("entropy gain: {e}"))?;
            Ok(EntropyDiagnostic {
                state: label,
                entropy_in,
                entropy_out: entropy_in + eg.gain,
                gain: eg.gain,
                holevo_bound: eg.holevo_bound,
                gap: eg.gain - eg.holevo_bound,
            })
        })
        .collect()
}

fn analysis_report(
    input_digest: String,
    g: &GrandSystem,
    res: &ReservoirState,
    tols: &Tolerances,
    states: usize,
    seed: u64,
    started: Instant,
) -> Result<(ReportFile, TheoremVerification), String> {
    let verification =
        verify_theorem_full(g, res, tols.diag, tols.unital).map_err(|e| e.to_string())?;
    let entropy = entropy_probes(&verification.channel, g.d_sys(), states, seed)?;
    let report = ReportFile {
        version: SCHEMA_VERSION,
        input_digest,
        d_sys: g.d_sys(),
        d_res: g.d_res(),
        tolerances: EffectiveTolerances {
            diag: tols.diag,
            unital: tols.unital,
        },
        theorem: TheoremReportJson::from(&verification.report),
        entropy,
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    Ok((report, verification))
}

pub struct AnalyzeOutcome {
    pub report: ReportFile,
    pub channel_dump: Option<ChannelDumpFile>,
    pub exit: u8,
}

pub fn run_analyze(
    spec_bytes: &[u8],
    flag_diag: Option<f64>,
    flag_unital: Option<f64>,
    states: usize,
    seed: u64,
    want_channel_dump: bool,
) -> Result<AnalyzeOutcome, String> {
    let started = Instant::now();
    let spec: SystemSpecFile =
        serde_json::from_slice(spec_bytes).map_err(|e| format!("spec file: {e}"))?;
    let tols = resolve_tolerances(flag_diag, flag_unital, Some(&spec));
    let (g, res) = build_instance(&spec)?;
    let (report, verification) = analysis_report(
        digest(spec_bytes),
        &g,
        &res,
        &tols,
        states,
        seed,
        started,
    )?;
    let exit = if report.theorem.implication_consistent {
        EXIT_OK
    } else {
        EXIT_THEOREM_VIOLATION
    };
    Ok(AnalyzeOutcome {
        channel_dump: want_channel_dump
            .then(|| ChannelDumpFile::from_channel(&verification.channel)),
        report,
        exit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Haar,
    Controlled,
    Demon,
}

impl Family {
    fn name(&self) -> &'static str {
        match self {
            Family::Haar => "haar",
            Family::Controlled => "controlled",
            Family::Demon => "demon",
        }
    }
}

fn sweep_trial(
    family: Family,
    d_sys: usize,
    d_res: usize,
    seed: u64,
    trial: u64,
    tols: &Tolerances,
) -> Result<TheoremVerification, String> {
    let mut gen = SeededGenerator::new(seed, trial);
    let (g, res) = match family {
        Family::Controlled => {
            let u = gen
                .controlled_interaction(d_sys, d_res, &ComplexMatrix::identity(d_sys))
                .map_err(|e| e.to_string())?;
            let res = gen.random_reservoir(d_res).map_err(|e| e.to_string())?;
            let g = GrandSystem::from_unitary(d_sys, d_res, u).map_err(|e| e.to_string())?;
            (g, res)
        }
        Family::Haar => {
            let u = gen.haar_unitary(d_sys * d_res).map_err(|e| e.to_string())?;
            let res = gen.random_reservoir(d_res).map_err(|e| e.to_string())?;
            let g = GrandSystem::from_unitary(d_sys, d_res, u).map_err(|e| e.to_string())?;
            (g, res)
        }
        Family::Demon => {
            let (u, res) = demon_instance();
            let g = GrandSystem::from_unitary(2, 2, u).map_err(|e| e.to_string())?;
            (g, res)
        }
    };
    verify_theorem_full(&g, &res, tols.diag, tols.unital).map_err(|e| format!("trial {trial}: {e}"))
}

pub struct SweepOutcome {
    pub report: SweepReportFile,
    pub exit: u8,
}

pub fn run_sweep(
    family: Family,
    trials: u64,
    d_sys: usize,
    d_res: usize,
    seed: u64,
    flag_diag: Option<f64>,
    flag_unital: Option<f64>,
) -> Result<SweepOutcome, String> {
    let started = Instant::now();
    if d_sys == 0 || d_res == 0 {
        return Err("dsys and dres must be positive".into());
    }
    // the demon archetype is pinned to two qubits
    let (d_sys, d_res) = match family {
        Family::Demon => (2, 2),
        _ => (d_sys, d_res),
    };
    let tols = resolve_tolerances(flag_diag, flag_unital, None);

    let verifications: Vec<TheoremVerification> = (0..trials)
        .into_par_iter()
        .map(|trial| sweep_trial(family, d_sys, d_res, seed, trial, &tols))
        .collect::<Result<_, _>>()?;

    let per_trial: Vec<TrialRecord> = verifications
        .iter()
        .enumerate()
        .map(|(i, v)| TrialRecord {
            trial: i as u64,
            report: TheoremReportJson::from(&v.report),
        })
        .collect();

    let mut aggregate = SweepAggregate {
        diag_invariant_count: 0,
        unital_count: 0,
        implication_violations: 0,
        max_diag_residual: 0.0,
        max_unitality_defect: 0.0,
        max_unitality_defect_among_invariant: 0.0,
        max_agreement_residual: 0.0,
        max_dephasing_residual: None,
    };
    for t in &per_trial {
        let r = &t.report;
        if r.diag_invariant {
            aggregate.diag_invariant_count += 1;
            aggregate.max_unitality_defect_among_invariant = aggregate
                .max_unitality_defect_among_invariant
                .max(r.unitality_defect);
        }
        if r.unital {
            aggregate.unital_count += 1;
        }
        if !r.implication_consistent {
            aggregate.implication_violations += 1;
        }
        aggregate.max_diag_residual = aggregate.max_diag_residual.max(r.diag_residual);
        aggregate.max_unitality_defect = aggregate.max_unitality_defect.max(r.unitality_defect);
        aggregate.max_agreement_residual = aggregate
            .max_agreement_residual
            .max(r.unitality_agreement_residual);
        if let Some(d) = r.dephasing_residual {
            aggregate.max_dephasing_residual =
                Some(aggregate.max_dephasing_residual.unwrap_or(0.0).max(d));
        }
    }

    let canonical = format!(
        "sweep:family={};trials={trials};dsys={d_sys};dres={d_res};seed={seed};tol_diag={};tol_unital={}",
        family.name(),
        tols.diag,
        tols.unital
    );
    let exit = if aggregate.implication_violations > 0 {
        EXIT_THEOREM_VIOLATION
    } else {
        EXIT_OK
    };
    Ok(SweepOutcome {
        report: SweepReportFile {
            version: SCHEMA_VERSION,
            input_digest: digest(canonical.as_bytes()),
            family: family.name().into(),
            trials,
            d_sys,
            d_res,
            seed,
            tolerances: EffectiveTolerances {
                diag: tols.diag,
                unital: tols.unital,
            },
            per_trial,
            aggregate,
            timing_ms: started.elapsed().as_secs_f64() * 1e3,
        },
        exit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DemoName {
    Identity,
    Controlled,
    Demon,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnot_spec(extra: &str) -> String {
        format!(
            r#"{{
                "version": 1,
                "d_sys": 2,
                "d_res": 2,
                "unitary": {{"u_int": [
                    [[1,0],[0,0],[0,0],[0,0]],
                    [[0,0],[1,0],[0,0],[0,0]],
                    [[0,0],[0,0],[0,0],[1,0]],
                    [[0,0],[0,0],[1,0],[0,0]]
                ]}},
                "pi0": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]{extra}
            }}"#
        )
    }

    #[test]
    fn build_instance_unitary_spec() {
        let spec: SystemSpecFile = serde_json::from_str(&cnot_spec("")).unwrap();
        let (g, res) = build_instance(&spec).unwrap();
        assert_eq!(g.d_sys(), 2);
        assert_eq!(res.dim(), 2);
    }

    #[test]
    fn build_instance_accepts_rotated_basis() {
        // permuting the control basis keeps the interaction block-diagonal
        let extra = r#",
            "basis": [[[0,0],[1,0]],[[1,0],[0,0]]]"#;
        let spec: SystemSpecFile = serde_json::from_str(&cnot_spec(extra)).unwrap();
        let (g, res) = build_instance(&spec).unwrap();
        let report = qunital_core::htheorem::verify_theorem(&g, &res, 1e-9, 1e-8).unwrap();
        assert!(report.diag_invariant);
        assert!(report.unital);
    }

    #[test]
    fn build_instance_rejects_bad_version() {
        let mut spec: SystemSpecFile = serde_json::from_str(&cnot_spec("")).unwrap();
        spec.version = 99;
        assert!(build_instance(&spec).unwrap_err().starts_with("version"));
    }

    #[test]
    fn build_instance_rejects_non_unitary_basis() {
        let extra = r#",
            "basis": [[[1,0],[1,0]],[[0,0],[1,0]]]"#;
        let spec: SystemSpecFile = serde_json::from_str(&cnot_spec(extra)).unwrap();
        assert!(build_instance(&spec).unwrap_err().starts_with("basis"));
    }

    #[test]
    fn build_instance_requires_time_with_hamiltonians() {
        let json = r#"{
            "version": 1,
            "d_sys": 1,
            "d_res": 1,
            "hamiltonians": {
                "h_sys": [[[0,0]]],
                "h_res": [[[0,0]]],
                "h_int": [[[0,0]]]
            },
            "pi0": [[[1,0]]]
        }"#;
        let spec: SystemSpecFile = serde_json::from_str(json).unwrap();
        assert!(build_instance(&spec).unwrap_err().starts_with("t:"));
    }

    #[test]
    fn tolerances_prefer_flags_over_file() {
        let extra = r#",
            "tolerances": {"diag": 1e-6, "unital": 1e-5}"#;
        let spec: SystemSpecFile = serde_json::from_str(&cnot_spec(extra)).unwrap();
        let t = resolve_tolerances(Some(1e-3), None, Some(&spec));
        assert_eq!(t.diag, 1e-3);
        assert_eq!(t.unital, 1e-5);
        let t = resolve_tolerances(None, None, None);
        assert_eq!(t.diag, qunital_core::tol::DEFAULT_TOL_DIAG);
        assert_eq!(t.unital, qunital_core::tol::DEFAULT_TOL_UNITAL);
    }
}

const DEMO_SEED: u64 = 7;

pub fn run_demo(name: DemoName) -> Result<AnalyzeOutcome, String> {
    let started = Instant::now();
    let tols = resolve_tolerances(None, None, None);
    let (label, g, res) = match name {
        DemoName::Identity => {
            // free evolution only: interaction term is zero
            let h_sys = ComplexMatrix::diagonal_real(&[0.7, -0.7]);
            let h_res = ComplexMatrix::diagonal_real(&[0.4, -0.2]);
            let g = GrandSystem::from_hamiltonians(
                2,
                2,
                h_sys,
                h_res,
                ComplexMatrix::zeros(4, 4),
                1.1,
            )
            .map_err(|e| e.to_string())?;
            let mut gen = SeededGenerator::new(DEMO_SEED, 0);
            let res = gen.random_reservoir(2).map_err(|e| e.to_string())?;
            ("demo:identity", g, res)
        }
        DemoName::Controlled => {
            let mut gen = SeededGenerator::new(DEMO_SEED, 1);
            let u = gen
                .controlled_interaction(3, 3, &ComplexMatrix::identity(3))
                .map_err(|e| e.to_string())?;
            let g = GrandSystem::from_unitary(3, 3, u).map_err(|e| e.to_string())?;
            let res = gen.random_reservoir(3).map_err(|e| e.to_string())?;
            ("demo:controlled", g, res)
        }
        DemoName::Demon => {
            let (u, res) = demon_instance();
            let g = GrandSystem::from_unitary(2, 2, u).map_err(|e| e.to_string())?;
            ("demo:demon", g, res)
        }
    };
    let (report, verification) = analysis_report(
        digest(label.as_bytes()),
        &g,
        &res,
        &tols,
        3,
        DEMO_SEED,
        started,
    )?;
    let exit = if report.theorem.implication_consistent {
        EXIT_OK
    } else {
        EXIT_THEOREM_VIOLATION
    };
    Ok(AnalyzeOutcome {
        channel_dump: Some(ChannelDumpFile::from_channel(&verification.channel)),
        report,
        exit,
    })
}
