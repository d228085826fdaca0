use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("{what} is not positive semidefinite: minimal eigenvalue {min_eigenvalue:.6e}")]
    NotPositive {
        what: &'static str,
        min_eigenvalue: f64,
    },

    #[error("effect exceeds the identity: maximal eigenvalue {max_eigenvalue:.6e}")]
    ExceedsIdentity { max_eigenvalue: f64 },

    #[error("state has trace {trace:.12} instead of 1")]
    Trace { trace: f64 },

    #[error("measurement is incomplete: effects sum to identity up to {residual:.3e}")]
    Incomplete { residual: f64 },

    #[error("unsupported dimension {0} (only qubits and qutrits)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("kind mismatch: {0}")]
    KindMismatch(String),

    #[error(
        "source device is not real: row {witness_row} lies {distance:.3e} outside the best-fit plane \
         (tetrahedral families show the criterion fails for non-real sources)"
    )]
    NotReal { witness_row: usize, distance: f64 },

    #[error("outside the supported hypotheses: {0}")]
    Hypothesis(String),

    #[error("map is not positive: product-state expectation {value:.6e}")]
    NotPositiveMap {
        value: f64,
        input: Vec<[f64; 2]>,
        output: Vec<[f64; 2]>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not realizable: {0}")]
    Unrealizable(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
