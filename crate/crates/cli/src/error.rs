use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_COUNTEREXAMPLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_SOFTWARE: i32 = 70;
pub const EXIT_IO: i32 = 74;
pub const EXIT_BUDGET: i32 = 75;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid data: {0}")]
    Data(String),
    #[error("budget exhausted after {processed} candidates; resume with --start-partition {next_partition}")]
    Budget { processed: u64, next_partition: usize },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] cpm_core::Error),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use cpm_core::Error as E;
        match self {
            Self::Usage(_) | Self::Malformed(_) => EXIT_USAGE,
            Self::Data(_) => EXIT_DATA,
            Self::Budget { .. } => EXIT_BUDGET,
            Self::Io { .. } => EXIT_IO,
            Self::Core(e) => match e {
                E::Validation(_) | E::Capability(_) | E::Dimension(_) => EXIT_USAGE,
                E::Basis(_) | E::Dependence { .. } | E::Precondition(_) | E::NonFinite(_) => EXIT_DATA,
                E::Budget { .. } => EXIT_BUDGET,
                E::NoConvergence { .. } => EXIT_SOFTWARE,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
