use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}: {message}")]
    MalformedRow {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: row {row}: unknown country code `{iso3}`")]
    UnknownCountry {
        path: PathBuf,
        row: usize,
        iso3: String,
    },

    #[error("invalid registry: {0}")]
    Registry(String),

    #[error("no trade records for year {0}")]
    YearAbsent(i32),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("empty trade year: total volume is zero")]
    EmptyTradeYear,

    #[error("damping factor {0} outside (0, 1)")]
    InvalidAlpha(f64),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("scattering series did not converge after {terms} terms (last term max-abs {residual:e})")]
    SeriesDivergence { terms: usize, residual: f64 },

    #[error("invalid core groups: {0}")]
    CoreGroups(String),

    #[error("two-currency score requested with {0} currencies configured")]
    NotTwoCurrency(usize),

    #[error("dynamics did not reach a steady state within {max_sweeps} sweeps (recent state fingerprints: {fingerprints:x?})")]
    SteadyStateNotReached {
        max_sweeps: usize,
        fingerprints: Vec<u64>,
    },

    #[error("all {0} ensemble runs failed to converge")]
    EnsembleFailed(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent ensemble summaries: {0}")]
    InconsistentSummaries(String),

    #[error("invalid scenario config: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

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
