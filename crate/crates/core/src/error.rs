use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("state index {index} out of range (environment has {num_states} states)")]
    StateOutOfRange { index: usize, num_states: usize },

    #[error("action index {index} out of range (environment has {num_actions} actions)")]
    ActionOutOfRange { index: usize, num_actions: usize },

    #[error("taxi field `{field}` = {value} out of range (max {max})")]
    TaxiField {
        field: &'static str,
        value: usize,
        max: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("expected a {expected_rows}x{expected_cols} table, found {found}")]
    Dimensions {
        expected_rows: usize,
        expected_cols: usize,
        found: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
