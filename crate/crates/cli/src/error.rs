// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

use floquet_cages::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("{0}")]
    Runtime(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for validation, 3 for capacity, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Runtime(_) | CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => CliError::Capacity(format!(
                "{e}. Lattices hold at most {} sites and dense diagonalisation handles at most {} states; \
                 reduce the lattice, the particle number or the graph size",
                floquet_cages::lattice::MAX_SITES,
                floquet_cages::hamiltonian::DEFAULT_DENSE_CAP
            )),
            Error::NoConvergence => CliError::Runtime(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}
