// Copyright 2026 The qrff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("singular value component {component} (normalized eigenvalue {eigenvalue:.3e}) decodes to phase bin 0; resolution is {resolution:.3e}")]
    UnresolvedEigenvalue {
        component: usize,
        eigenvalue: f64,
        resolution: f64,
    },

    #[error(transparent)]
    Quantum(#[from] qrff_qsim::Error),

    #[error("I/O error at {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("grid point {index} (x = {x:?}): {source}")]
    AtGridPoint {
        index: usize,
        x: Vec<f64>,
        source: Box<Error>,
    },
}

impl Error {
    /// Short machine-readable class name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) | Error::Config(_) => "config",
            Error::Numerical(_) => "numerical",
            Error::UnresolvedEigenvalue { .. } => "postselection",
            Error::Quantum(qrff_qsim::Error::Capacity { .. }) => "capacity",
            Error::Quantum(qrff_qsim::Error::PostSelection { .. }) => "postselection",
            Error::Quantum(_) => "simulator",
            Error::Io { .. } => "io",
            Error::AtGridPoint { source, .. } => source.kind(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "config" => 2,
            "capacity" => 3,
            "postselection" => 4,
            "io" => 5,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
