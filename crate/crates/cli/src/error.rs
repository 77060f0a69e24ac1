use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("tolerance check failed: {0}")]
    Tolerance(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Numerical(_) | Self::Tolerance(_) => 2,
            Self::Io { .. } => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }
}

impl From<rtn_geometry::Error> for CliError {
    fn from(e: rtn_geometry::Error) -> Self {
        use rtn_geometry::Error as E;
        match e {
            E::InvalidParameter { .. } | E::InvalidGrid(_) | E::Unsupported(_) => Self::Config(e.to_string()),
            E::DegenerateModes { .. } | E::Undersampled { .. } | E::Integration { .. } => Self::Numerical(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
