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

use qrff_qsim::{inverse_qpe, GateOp, Statevector};

use super::spectral::SpectralRegisters;
use super::{ANCILLA_REG, COL_REG, EIGEN_REG};
use crate::{Error, Result};

/// Which eigenvalue function the ancilla rotation applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// sine `c₁/(λ̂²+σ̃²)`
    Mean,
    /// sine `c₂/(λ̂ √(λ̂²+σ̃²))`
    Variance,
}

/// Rotation constants and the rescaled regularizer `σ̃² = σ_n²/‖X‖_F²`.
///
/// The rotation sines must not exceed 1, which requires `c₁ ≤ λ̂²+σ̃²` and
/// `c₂ ≤ λ̂√(λ̂²+σ̃²)` over the bins that carry the signal. The constants are
/// therefore pinned to a floor eigenvalue one bin below the smallest retained
/// component; bins further below are rotated fully (sine clamped to 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConstants {
    pub c1: f64,
    pub c2: f64,
    pub sigma_sq: f64,
}

impl InversionConstants {
    pub fn new(c1: f64, c2: f64, sigma_sq: f64) -> Result<Self> {
        if !(c1 > 0.0 && c2 > 0.0 && sigma_sq >= 0.0 && c1.is_finite() && c2.is_finite() && sigma_sq.is_finite()) {
            return Err(Error::Config(format!(
                "invalid inversion constants c1={c1} c2={c2} sigma^2={sigma_sq}"
            )));
        }
        Ok(InversionConstants { c1, c2, sigma_sq })
    }

    /// Constants for the binned spectrum of `sr` with noise variance
    /// `noise_var` on a design of Frobenius norm `frobenius_norm`.
    pub fn for_spectrum(sr: &SpectralRegisters, noise_var: f64, frobenius_norm: f64) -> Result<Self> {
        check_resolved(sr)?;
        let sigma_sq = noise_var / (frobenius_norm * frobenius_norm);
        let lowest = sr
            .eigenvalues()
            .iter()
            .map(|&ev| sr.predicted_bin(ev))
            .min()
            .unwrap_or(1);
        let floor = sr.decode(lowest.saturating_sub(1).max(1));
        InversionConstants::new(floor + sigma_sq, floor.sqrt() * (floor + sigma_sq).sqrt(), sigma_sq)
    }

    /// Sine of the ancilla rotation for decoded eigenvalue `lambda_sq`.
    /// Zero for the zero bin, which is then removed by post-selection.
    pub fn rotation_sine(&self, branch: Branch, lambda_sq: f64) -> f64 {
        if lambda_sq <= 0.0 {
            return 0.0;
        }
        let s = match branch {
            Branch::Mean => self.c1 / (lambda_sq + self.sigma_sq),
            Branch::Variance => self.c2 / (lambda_sq.sqrt() * (lambda_sq + self.sigma_sq).sqrt()),
        };
        s.min(1.0)
    }
}

/// Every retained component must land above bin 0.
fn check_resolved(sr: &SpectralRegisters) -> Result<()> {
    for (component, &eigenvalue) in sr.eigenvalues().iter().enumerate() {
        if sr.predicted_bin(eigenvalue) == 0 {
            return Err(Error::UnresolvedEigenvalue {
                component,
                eigenvalue,
                resolution: sr.bin_width(),
            });
        }
    }
    Ok(())
}

/// Post-selected state on registers `m` and `j` with its branch probabilities.
#[derive(Debug, Clone)]
pub struct InvertedState {
    pub state: Statevector,
    /// Probability of measuring the ancilla in `|1⟩`.
    pub p_accept: f64,
    /// Probability, given acceptance, that the uncomputed eigenvalue register
    /// returns to `|0…0⟩`.
    pub p_uncompute: f64,
}

impl InvertedState {
    /// Squared norm of the unnormalized output relative to the input state.
    pub fn total_probability(&self) -> f64 {
        self.p_accept * self.p_uncompute
    }
}

fn invert(sr: &SpectralRegisters, ic: &InversionConstants, branch: Branch) -> Result<InvertedState> {
    check_resolved(sr)?;
    let mut sv = sr.state().clone();
    sv.append_register(ANCILLA_REG, 1)?;
    let e = sv.layout().get(EIGEN_REG)?.clone();
    let anc = sv.layout().get(ANCILLA_REG)?.offset;
    let angles = (0..e.dim())
        .map(|b| ic.rotation_sine(branch, sr.decode(b)).asin())
        .collect();
    sv.apply(&GateOp::UniformlyControlledRy {
        selector: e.qubits().collect(),
        target: anc,
        angles,
    })?;
    let p_accept = sv.postselect(anc, true)?;
    sv.remove_register(ANCILLA_REG)?;
    inverse_qpe(&mut sv, &sr.oracle, COL_REG, EIGEN_REG)?;
    let p_uncompute = sv.postselect_register(EIGEN_REG, 0)?;
    sv.remove_register(EIGEN_REG)?;
    Ok(InvertedState {
        state: sv,
        p_accept,
        p_uncompute,
    })
}

/// Output `∝ Σ_r λ̃_r g_r |u_r⟩|v_r⟩` with `g_r ≈ c₁/(λ̃_r²+σ̃²)`.
pub fn invert_for_mean(sr: &SpectralRegisters, ic: &InversionConstants) -> Result<InvertedState> {
    invert(sr, ic, Branch::Mean)
}

/// Output `∝ Σ_r λ̃_r h_r |u_r⟩|v_r⟩` with `h_r ≈ c₂/(λ̃_r√(λ̃_r²+σ̃²))`.
pub fn invert_for_variance(sr: &SpectralRegisters, ic: &InversionConstants) -> Result<InvertedState> {
    invert(sr, ic, Branch::Variance)
}
