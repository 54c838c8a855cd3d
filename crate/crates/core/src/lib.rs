//! Characteristic Bell operators for discriminating classes of multi-qubit
//! entangled states.
//!
//! The crate builds the two four-qubit operators whose unique maximal
//! eigenstates are the singlet-pair state and the two-excitation Dicke state,
//! verifies their spectra, computes exact local-hidden-variable bounds by
//! enumeration, maximizes expectation values over entanglement classes
//! (LU/SLOCC orbits, biseparable, separable), and evaluates operators from
//! measured or simulated per-setting count histograms.
//!
//! Everything numeric is generic over the scalar (`f32`/`f64`) through the
//! [`real::Real`] trait; the concrete aliases at the crate root fix `f64`.

pub mod charops;
pub mod classopt;
pub mod expdata;
pub mod lhv;
pub mod linalg;
pub mod pauli;
pub mod qstate;
pub mod real;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    // -- construction / validation ------------------------------------------
    #[error("unknown canonical state name: {0:?}")]
    UnknownState(String),
    #[error("qubit count mismatch: expected {expected}, got {got}")]
    QubitMismatch { expected: usize, got: usize },
    #[error("qubit count {0} outside supported range 2..=6")]
    UnsupportedQubitCount(usize),
    #[error("state vector not normalized: |norm - 1| = {defect:e}")]
    NotNormalized { defect: f64 },
    #[error("density matrix is not Hermitian: defect {defect:e}")]
    NotHermitian { defect: f64 },
    #[error("density matrix trace differs from 1 by {defect:e}")]
    TraceNotOne { defect: f64 },
    #[error("density matrix has eigenvalue {eig:e} below -1e-10")]
    NotPositive { eig: f64 },
    #[error("matrix is not unitary: defect {defect:e}")]
    NotUnitary { defect: f64 },
    #[error("local map is numerically singular: |det| = {det:e}")]
    SingularMap { det: f64 },
    #[error("local map annihilates the state: output norm {norm:e}")]
    AnnihilatedState { norm: f64 },
    #[error("visibility {0} outside [0, 1]")]
    VisibilityOutOfRange(f64),
    #[error("invalid axis character {0:?} (expected one of 0, x, y, z)")]
    InvalidAxis(char),
    #[error("measurement setting may not contain identity factors: {0:?}")]
    IdentityInSetting(String),
    #[error("term weight is not finite")]
    NonFiniteWeight,
    #[error("a Pauli string needs at least one factor")]
    EmptyAxes,
    #[error("correlation tensor is incomplete; all 4^n entries are required")]
    IncompleteTensor,

    // -- numerical failures --------------------------------------------------
    #[error("LHV enumeration would visit {size} assignments, above the cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },
    #[error("LHV bound is zero; violation ratio undefined")]
    ZeroLhvBound,
    #[error("no optimization restart converged")]
    NoConvergedRestart,
    #[error("operator term {term:?} is not covered by any provided setting (e.g. setting {suggestion:?})")]
    UncoveredTerm { term: String, suggestion: String },
    #[error("histogram for setting {setting:?} has zero total count")]
    EmptyHistogram { setting: String },
    #[error("marginal requires a non-empty set of active qubits")]
    EmptyMarginal,

    // -- I/O and parsing ------------------------------------------------------
    #[error("parse error: {0}")]
    Parse(String),
    #[error("outcome key {0:?} is not a bitstring of the histogram's length")]
    BadOutcome(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for CLI use: 1 = usage/input error, 2 = numerical
    /// failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EnumerationTooLarge { .. }
            | Error::ZeroLhvBound
            | Error::NoConvergedRestart
            | Error::UncoveredTerm { .. }
            | Error::AnnihilatedState { .. }
            | Error::NotPositive { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub use charops::{
    bell_d42, bell_psi4, discrim_d42, discrim_prime_d42, mermin_blocks, spectral_report,
    SpectralReport,
};
pub use classopt::{
    max_over_class, ClassFamily, ClassSpec, OptimizationResult, Transform,
};
pub use classopt::tables::{reproduce_table, slocc_bounds, TableId, TableRow};
pub use expdata::{
    estimate_correlation, evaluate_operator, fidelity_from_data, marginal_correlation,
    simulate_counts, EstimatedValue, SettingHistogram,
};
pub use lhv::{lhv_bound, violation_ratio, LhvResult};
pub use pauli::{
    correlation_tensor, fidelity_operator, relevant_correlations, Axis, CompiledOp,
    CorrelationTensor, ObservableSum, PauliString,
};
pub use qstate::{
    apply_local, canonical_state, expectation, mix_with_white_noise, DensityMatrix,
    LocalOperation, StateVector,
};

// Concrete f64 aliases: the default precision for library consumers.
pub type State = qstate::StateVector<f64>;
pub type Density = qstate::DensityMatrix<f64>;
pub type Observable = pauli::ObservableSum<f64>;
pub type Tensor = pauli::CorrelationTensor<f64>;
pub type Spectral = charops::SpectralReport<f64>;
pub type Lhv = lhv::LhvResult<f64>;
pub type OptResult = classopt::OptimizationResult<f64>;
pub type Histogram = expdata::SettingHistogram;
pub type Estimate = expdata::EstimatedValue<f64>;
