use thiserror::Error;

/// Errors raised by state construction, protocol evaluation and the
/// strategy functions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not normalized: norm² = {norm_sq}")]
    NotNormalized { norm_sq: f64 },
    #[error("length {len} is not 2^n for a positive qubit count n")]
    BadDimension { len: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace {trace} differs from 1")]
    BadTrace { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("operator at qubit {position} is not unitary")]
    NotUnitary { position: usize },
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("kept qubit set must be a nonempty proper subset")]
    InvalidKeep,
    #[error("measured qubit indices must differ")]
    CoincidentQubits,
    #[error("state has too few qubits ({n_qubits}) for a Bell measurement")]
    TooFewQubits { n_qubits: usize },
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("theta = {theta} is outside [0, π/2]")]
    ThetaOutOfRange { theta: f64 },
    #[error("degenerate ensemble: the two states coincide at theta = π/2")]
    DegenerateEnsemble,
    #[error("channel amplitude alpha = {alpha} is outside [0, 1/√2]")]
    AlphaOutOfRange { alpha: f64 },
    #[error("purification target alpha' = {alpha_prime} is outside [{alpha}, 1/√2]")]
    AlphaPrimeOutOfRange { alpha: f64, alpha_prime: f64 },
    #[error("invalid clone coefficients: {0}")]
    InvalidCoeffs(String),
    #[error("no correction supplied for Bell outcome {0}")]
    MissingCorrection(usize),
    #[error("sample count {samples} is below the minimum {min}")]
    TooFewSamples { samples: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
