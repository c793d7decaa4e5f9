use thiserror::Error;

/// Which side of the joint sample a message refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Y,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::X => write!(f, "x"),
            Side::Y => write!(f, "y"),
        }
    }
}

/// Coarse classification used by callers that map errors to exit codes:
/// bad data is distinguished from bad knobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input data is malformed or unusable.
    Input,
    /// A parameter violates its documented range or precondition.
    Parameter,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("x and y tables have different row counts ({x_rows} vs {y_rows})")]
    ShapeMismatch { x_rows: usize, y_rows: usize },

    #[error("dataset has zero rows")]
    EmptyDataset,

    #[error("ragged {side} table: row {row} has {got} columns, expected {expected}")]
    RaggedRow {
        side: Side,
        row: usize,
        got: usize,
        expected: usize,
    },

    #[error("non-finite value in {side} table at row {row}, column {col}")]
    NonFinite { side: Side, row: usize, col: usize },

    #[error("neighbor order k={k} must satisfy 1 <= k < n (n={n})")]
    InvalidK { k: usize, n: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{estimator} requires one-dimensional x and y (got x_dim={x_dim}, y_dim={y_dim})")]
    DimensionUnsupported {
        estimator: &'static str,
        x_dim: usize,
        y_dim: usize,
    },

    #[error("line {line}, column {col}: cannot parse `{text}` as a number")]
    ParseCell { line: u64, col: usize, text: String },

    #[error("column index {col} out of range (table has {ncols} columns)")]
    ColumnOutOfRange { col: usize, ncols: usize },

    #[error("labels must contain at least one positive and one negative")]
    DegenerateLabels,

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("feature {index}: {source}")]
    Feature {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid_parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            ShapeMismatch { .. }
            | EmptyDataset
            | RaggedRow { .. }
            | NonFinite { .. }
            | ParseCell { .. }
            | ColumnOutOfRange { .. }
            | DegenerateLabels
            | Io(_)
            | Csv(_) => ErrorClass::Input,
            InvalidK { .. }
            | InvalidParameter { .. }
            | DimensionUnsupported { .. }
            | UnknownGenerator(_) => ErrorClass::Parameter,
            Feature { source, .. } => source.class(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
