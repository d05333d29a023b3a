//! JSON schemas for system descriptions, analysis reports, sweep reports
//! and channel dumps.
//!
//! Complex entries are two-element arrays `[re, im]`; matrices are nested
//! row-major arrays of those. Every file carries a `version` field.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qunital_core::htheorem::TheoremReport;
use qunital_core::matrix::ComplexMatrix;
use qunital_core::channel::ChannelKraus;

pub const SCHEMA_VERSION: u32 = 1;

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect()
}

/// Parse a matrix, checking it against the declared dimensions; errors
/// name the offending field.
pub fn matrix_from_json(
    field: &str,
    data: &MatrixJson,
    rows: usize,
    cols: usize,
) -> Result<ComplexMatrix, String> {
    if data.len() != rows {
        return Err(format!("{field}: expected {rows} rows, got {}", data.len()));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in data.iter().enumerate() {
        if row.len() != cols {
            return Err(format!(
                "{field}: row {i} has {} entries, expected {cols}",
                row.len()
            ));
        }
        for &[re, im] in row {
            entries.push(Complex64::new(re, im));
        }
    }
    ComplexMatrix::new(rows, cols, entries).map_err(|e| format!("{field}: {e}"))
}

/// Hex SHA-256 of the raw input, prefixed with the algorithm name.
pub fn digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let hex: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HamiltoniansJson {
    pub h_sys: MatrixJson,
    pub h_res: MatrixJson,
    pub h_int: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct UnitaryJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_t: Option<MatrixJson>,
    /// Accepted alias: with unitary-specified systems the free evolutions
    /// are the identity, so u_int and u_t coincide.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_int: Option<MatrixJson>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TolerancesJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diag: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unital: Option<f64>,
}

/// On-disk description of one system instance.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemSpecFile {
    pub version: u32,
    pub d_sys: usize,
    pub d_res: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamiltonians: Option<HamiltoniansJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unitary: Option<UnitaryJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub pi0: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesJson>,
}

/// Verdict block shared by analysis and sweep reports.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TheoremReportJson {
    pub d_sys: usize,
    pub d_res: usize,
    pub diag_invariant: bool,
    pub diag_residual: f64,
    pub unital: bool,
    pub unitality_defect: f64,
    pub unitality_agreement_residual: f64,
    pub factorization_ok: bool,
    pub max_off_block_norm: f64,
    pub max_norm_defect: f64,
    pub dephasing_residual: Option<f64>,
    pub reconstruction_unitality_defect: Option<f64>,
    pub implication_consistent: bool,
}

impl From<&TheoremReport> for TheoremReportJson {
    fn from(r: &TheoremReport) -> Self {
        Self {
            d_sys: r.d_sys,
            d_res: r.d_res,
            diag_invariant: r.diag_invariant,
            diag_residual: r.diag_residual,
            unital: r.unital,
            unitality_defect: r.unitality_defect,
            unitality_agreement_residual: r.unitality_agreement_residual,
            factorization_ok: r.factorization_ok,
            max_off_block_norm: r.max_off_block_norm,
            max_norm_defect: r.max_norm_defect,
            dephasing_residual: r.dephasing_residual,
            reconstruction_unitality_defect: r.reconstruction_unitality_defect,
            implication_consistent: r.implication_consistent,
        }
    }
}

/// Entropy diagnostics for one probe state.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EntropyDiagnostic {
    pub state: String,
    pub entropy_in: f64,
    pub entropy_out: f64,
    pub gain: f64,
    pub holevo_bound: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct EffectiveTolerances {
    pub diag: f64,
    pub unital: f64,
}

/// Report emitted by `analyze` and `demo`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportFile {
    pub version: u32,
    pub input_digest: String,
    pub d_sys: usize,
    pub d_res: usize,
    pub tolerances: EffectiveTolerances,
    pub theorem: TheoremReportJson,
    pub entropy: Vec<EntropyDiagnostic>,
    /// Wall-clock analysis time; excluded from reproducibility comparisons.
    pub timing_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    #[serde(flatten)]
    pub report: TheoremReportJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepAggregate {
    pub diag_invariant_count: u64,
    pub unital_count: u64,
    pub implication_violations: u64,
    pub max_diag_residual: f64,
    pub max_unitality_defect: f64,
    /// Largest defect among diagonal-invariant trials; the theorem says
    /// this stays below the unitality tolerance.
    pub max_unitality_defect_among_invariant: f64,
    pub max_agreement_residual: f64,
    pub max_dephasing_residual: Option<f64>,
}

/// Report emitted by `sweep`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepReportFile {
    pub version: u32,
    pub input_digest: String,
    pub family: String,
    pub trials: u64,
    pub d_sys: usize,
    pub d_res: usize,
    pub seed: u64,
    pub tolerances: EffectiveTolerances,
    pub per_trial: Vec<TrialRecord>,
    pub aggregate: SweepAggregate,
    pub timing_ms: f64,
}

/// Kraus + Choi serialization of a derived channel (`--dump-channel`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChannelDumpFile {
    pub version: u32,
    pub d_sys: usize,
    pub kraus_ops: Vec<MatrixJson>,
    pub choi: MatrixJson,
}

impl ChannelDumpFile {
    pub fn from_channel(ch: &ChannelKraus) -> Self {
        Self {
            version: SCHEMA_VERSION,
            d_sys: ch.d_sys(),
            kraus_ops: ch.kraus_ops().iter().map(matrix_to_json).collect(),
            choi: matrix_to_json(ch.choi().matrix()),
        }
    }
}
