use thiserror::Error;

/// Failures surfaced by the command line, each with a stable code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("input is empty")]
    EmptyInput,
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
    #[error("negative count {value} at position {index}")]
    NegativeCount { index: usize, value: f64 },
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedTable { row: usize, expected: usize, got: usize },
    #[error("invalid sweep specification `{0}`")]
    InvalidSweep(String),
    #[error("--alpha is required for the credible command")]
    MissingAlpha,
    #[error("--alpha is only accepted by the credible command")]
    UnexpectedAlpha,
    #[error("--sweep is required for the sweep command")]
    MissingSweep,
    #[error("invalid alpha {0}: must lie in (0, 1)")]
    InvalidAlpha(f64),
    #[error("invalid prior strength {0}: must be positive and finite")]
    InvalidStrength(f64),
    #[error("exactly one of a path or --inline must be given")]
    InputSource,
    #[error("cannot read {path}: {detail}")]
    Io { path: String, detail: String },
    #[error("{0}")]
    Usage(String),
    #[error("grid check too large: {0}")]
    GridTooLarge(String),
    #[error("zero cell ({row}, {col}) in the posterior mean")]
    ZeroCell { row: usize, col: usize },
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    /// Machine-readable code printed alongside the message.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::EmptyInput => "EMPTY_INPUT",
            CliError::Parse { .. } => "PARSE_ERROR",
            CliError::NegativeCount { .. } => "NEGATIVE_COUNT",
            CliError::RaggedTable { .. } => "RAGGED_TABLE",
            CliError::InvalidSweep(_) => "INVALID_SWEEP",
            CliError::MissingAlpha => "MISSING_ALPHA",
            CliError::UnexpectedAlpha => "UNEXPECTED_ALPHA",
            CliError::MissingSweep => "MISSING_SWEEP",
            CliError::InvalidAlpha(_) => "INVALID_ALPHA",
            CliError::InvalidStrength(_) => "INVALID_STRENGTH",
            CliError::InputSource => "INPUT_SOURCE",
            CliError::Io { .. } => "IO_ERROR",
            CliError::Usage(_) => "USAGE",
            CliError::GridTooLarge(_) => "GRID_TOO_LARGE",
            CliError::ZeroCell { .. } => "ZERO_CELL",
            CliError::Compute(_) => "COMPUTE_ERROR",
        }
    }

    /// Every code, for documentation and tests.
    pub const CODES: [&'static str; 16] = [
        "EMPTY_INPUT",
        "PARSE_ERROR",
        "NEGATIVE_COUNT",
        "RAGGED_TABLE",
        "INVALID_SWEEP",
        "MISSING_ALPHA",
        "UNEXPECTED_ALPHA",
        "MISSING_SWEEP",
        "INVALID_ALPHA",
        "INVALID_STRENGTH",
        "INPUT_SOURCE",
        "IO_ERROR",
        "USAGE",
        "GRID_TOO_LARGE",
        "ZERO_CELL",
        "COMPUTE_ERROR",
    ];
}

impl From<idm_core::Error> for CliError {
    fn from(e: idm_core::Error) -> Self {
        use idm_core::Error as E;
        match e {
            E::Empty => CliError::EmptyInput,
            E::NegativeCount { index, value } => CliError::NegativeCount { index, value },
            E::Ragged { row, expected, got } => CliError::RaggedTable { row, expected, got },
            E::InvalidStrength(s) => CliError::InvalidStrength(s),
            E::ZeroCell { row, col } => CliError::ZeroCell { row, col },
            E::LatticeTooLarge { .. } => CliError::GridTooLarge(e.to_string()),
            E::NonFinite { .. } => CliError::Parse { what: "count", detail: e.to_string() },
            other => CliError::Compute(other.to_string()),
        }
    }
}
