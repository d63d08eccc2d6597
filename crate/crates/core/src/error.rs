use thiserror::Error;

/// Unified error type for the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular conversion: {context} (cond estimate {cond:.3e} exceeds cap {cap:.3e})")]
    SingularConversion {
        context: &'static str,
        cond: f64,
        cap: f64,
    },

    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("degenerate load: z_load = -z0 has no reflection coefficient")]
    DegenerateLoad,

    #[error("resonant configuration: {context} (cond estimate {cond:.3e} exceeds cap {cap:.3e})")]
    ResonantConfiguration {
        context: &'static str,
        cond: f64,
        cap: f64,
    },

    #[error("singular network: the terminated power-wave system is not solvable")]
    SingularNetwork,

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("overlapping dipoles: elements {a} and {b} intersect")]
    OverlappingDipoles { a: usize, b: usize },

    #[error("enumeration budget exceeded: {requested} points > {cap}")]
    BudgetExceeded { requested: f64, cap: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at row {row}, column {col}: {message}")]
    Parse {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad inputs (configuration, geometry,
    /// file contents) as opposed to numerical breakdown.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidGeometry(_)
                | Error::OverlappingDipoles { .. }
                | Error::BudgetExceeded { .. }
                | Error::InvalidConfig(_)
                | Error::Parse { .. }
                | Error::Io(_)
        )
    }
}
