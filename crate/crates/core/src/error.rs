//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite")]
    NonFiniteEntries,

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown gate name: {0}")]
    UnknownGate(String),

    #[error("measurement operators violate completeness (residual {residual:.3e})")]
    IncompleteMeasurement { residual: f64 },

    #[error("circuit contains a measurement node")]
    MeasurementInCircuit,

    #[error("wire {wire} out of range for {n_qubits} qubits")]
    WireOutOfRange { wire: usize, n_qubits: usize },

    #[error("duplicate wire {wire} within a single node")]
    DuplicateWire { wire: usize },

    #[error("classical condition references wire {wire} before it was measured")]
    UnmeasuredConditionWire { wire: usize },

    #[error("oracle violates the promised structure: {0}")]
    PromiseViolated(String),

    #[error("gave up after {calls} oracle calls without {needed} independent samples")]
    MaxCallsExceeded { calls: usize, needed: usize },
}
