use std::io;
use std::path::Path;

use soliton_core::catalog::CatalogError;
use soliton_core::classify::ClassifyError;
use soliton_core::fit::FitError;
use soliton_core::ode::OdeError;
use soliton_core::surface::SurfaceError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    /// A check ran and exceeded its tolerance; the report is already printed.
    #[error("{0}")]
    Tolerance(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn parse(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    /// 1 for tolerance failures, 2 for everything that prevented a check.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Tolerance(_) => 1,
            _ => 2,
        }
    }
}
