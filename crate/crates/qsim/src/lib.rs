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

//! Dense statevector simulation.
//!
//! The simulator carries exactly the machinery needed by qPCA-style regression
//! circuits: single and multi-controlled gates, register-conditioned rotations,
//! partial traces, exact Hermitian exponentiation, phase estimation, Hadamard and
//! SWAP tests, post-selection and seeded shot sampling.
//!
//! Qubit ordering is register-major: registers are allocated in declaration order
//! starting at qubit 0, and each register is little-endian (its first qubit carries
//! weight 1 in the register value).

mod circuit;
mod density;
mod error;
mod expm;
mod gate;
mod measure;
mod overlap;
mod qpe;
mod register;
mod state;

pub use circuit::{Circuit, StatePrep};
pub use density::{partial_trace, DensityOperator};
pub use error::{Error, Result};
pub use expm::{hermitian_exponential_unitary, HermitianEvolution};
pub use gate::{Control, GateOp, SingleQubitGate, Unitary};
pub use measure::{binomial, measure_register, shot_rng, Histogram, ShotRng};
pub use overlap::{hadamard_test, swap_test, swap_test_marginal, Sampling, SwapTestOutcome};
pub use qpe::{inverse_qft, inverse_qpe, qft, qpe, qpe_on, PowerOracle};
pub use register::{Register, RegisterLayout};
pub use state::Statevector;

pub use num_complex::Complex64 as C64;

/// Largest register the simulator accepts. 2^26 amplitudes is about 1 GiB.
pub const MAX_QUBITS: usize = 26;

/// Tolerance used for unitarity, hermiticity and normalization checks.
pub const TOL: f64 = 1e-10;
