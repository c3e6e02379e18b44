use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: corpus contains no documents", path.display())]
    EmptyCorpus { path: PathBuf },

    #[error("{}: file name has no numeric suffix (expected text<N>.txt)", path.display())]
    UnnumberedCorpusFile { path: PathBuf },

    #[error("duplicate corpus file number {number}: {} and {}", first.display(), second.display())]
    DuplicateSuffix {
        number: u64,
        first: PathBuf,
        second: PathBuf,
    },

    #[error("{}:{line}: invalid stopword entry {entry:?}", path.display())]
    InvalidStopword {
        path: PathBuf,
        line: usize,
        entry: String,
    },

    #[error("word selection is empty")]
    EmptySelection,

    #[error("every word has zero variance; nothing to factor")]
    AllZeroVariance,

    #[error("column {word:?} has zero variance")]
    ZeroVarianceColumn { word: String },

    #[error("matrix is not symmetric (max |a_ij - a_ji| = {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("eigenvalue {index} is negative ({value:e})")]
    NegativeEigenvalue { index: usize, value: f64 },

    #[error("cannot extract {requested} factors from {available} components")]
    FactorCount { requested: usize, available: usize },

    #[error("Cronbach's alpha needs at least 2 items, got {n}")]
    TooFewItems { n: usize },

    #[error("Cronbach's alpha is undefined: total score has zero variance")]
    UndefinedAlpha,

    #[error("unknown word {word:?}")]
    UnknownWord { word: String },

    #[error("table has zero grand total")]
    ZeroGrandTotal,

    #[error("layout energy became non-finite at iteration {iteration} (vertex {vertex})")]
    NonFiniteEnergy { iteration: usize, vertex: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("{}:{line}: {message}", path.display())]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 input error, 3 empty result, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Io { .. }
            | EmptyCorpus { .. }
            | UnnumberedCorpusFile { .. }
            | DuplicateSuffix { .. }
            | InvalidStopword { .. }
            | UnknownWord { .. }
            | Parse { .. }
            | LengthMismatch { .. }
            | InvalidOption(_)
            | Config { .. }
            | Csv(_) => 2,
            EmptySelection | AllZeroVariance | ZeroGrandTotal => 3,
            ZeroVarianceColumn { .. }
            | NotSymmetric { .. }
            | NotSquare { .. }
            | NoConvergence { .. }
            | NegativeEigenvalue { .. }
            | FactorCount { .. }
            | TooFewItems { .. }
            | UndefinedAlpha
            | NonFiniteEnergy { .. } => 4,
        }
    }
}
