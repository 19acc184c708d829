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

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("circuit needs {requested} qubits, simulator capacity is {max}")]
    Capacity { requested: usize, max: usize },

    #[error("qubit index {index} out of range for {n_qubits}-qubit state")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("register `{0}` already exists")]
    DuplicateRegister(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("post-selection impossible: branch probability {probability:.3e}")]
    PostSelection { probability: f64 },

    #[error("register `{register}` is not in a basis state")]
    NotBasisState { register: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
