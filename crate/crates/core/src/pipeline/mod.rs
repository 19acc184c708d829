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

//! Simulated quantum-assisted regression on the random-Fourier-feature design.
//!
//! The stages are:
//!
//! 1. [`plan_encoding`] / [`prepare_data_state`]: load `vec(X)/‖X‖_F` as a
//!    two-register state `Σ_{m,j} x_j^m |m⟩|j⟩` with Hadamards and
//!    multi-controlled `Ry` rotations.
//! 2. [`spectral_extraction`]: trace out the row register, exponentiate the
//!    reduced state exactly and run phase estimation so that the eigenvalue
//!    register holds `λ̃_r²` next to each singular pair.
//! 3. [`invert_for_mean`] / [`invert_for_variance`]: rotate an ancilla by the
//!    decoded eigenvalue, post-select it, and uncompute the eigenvalue register.
//! 4. [`QuantumRegressor`]: Hadamard test (mean) and SWAP test (variance) with
//!    classical scale recovery.
//!
//! Quantum singular values are those of `X/‖X‖_F`, i.e. `λ̃_r = λ_r/‖X‖_F`, and
//! the regularizer inside the rotations is `σ̃² = σ_n²/‖X‖_F²`.

mod encoding;
mod estimate;
mod inversion;
mod spectral;

pub use encoding::{plan_encoding, prepare_data_state, EncodingPlan, ScheduledRotation};
pub use estimate::{
    estimate_mean, estimate_variance, MeanEstimate, Mode, PosteriorEstimate, QuantumConfig, QuantumRegressor,
    VarianceEstimate,
};
pub use inversion::{invert_for_mean, invert_for_variance, Branch, InversionConstants, InvertedState};
pub use spectral::{default_delta_r, spectral_extraction, SpectralRegisters, DELTA_R_MARGIN};

/// Column (feature) register.
pub const COL_REG: &str = "m";
/// Row (data point) register.
pub const ROW_REG: &str = "j";
/// Eigenvalue (phase estimation) register.
pub const EIGEN_REG: &str = "e";
/// Inversion ancilla.
pub const ANCILLA_REG: &str = "a";

pub(crate) fn qubits_for(dim: usize) -> usize {
    dim.next_power_of_two().trailing_zeros() as usize
}
