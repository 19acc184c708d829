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

use std::f64::consts::PI;

use qrff_qsim::{partial_trace, qpe_on, HermitianEvolution, PowerOracle, Statevector, Unitary};

use super::{COL_REG, EIGEN_REG, ROW_REG};
use crate::rff::FeatureModel;
use crate::{Error, Result};

/// Default `δ_R` is this factor times the largest normalized eigenvalue.
pub const DELTA_R_MARGIN: f64 = 1.05;

pub fn default_delta_r(fm: &FeatureModel) -> f64 {
    DELTA_R_MARGIN * fm.normalized_eigenvalues()[0]
}

/// `U^{2^k} = e^{+iρ t 2^k}`, so an eigenvalue `λ̃²` of `ρ` shows up as the
/// phase `λ̃² t / 2π = λ̃²/δ_R ∈ [0, 1)`.
#[derive(Debug, Clone)]
pub(crate) struct DensityEvolution {
    evolution: HermitianEvolution,
    time: f64,
    n_qubits: usize,
}

impl PowerOracle for DensityEvolution {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn power_of_two(&self, k: u32) -> Unitary {
        self.evolution.unitary(-self.time * (1u64 << k) as f64)
    }
}

/// State after phase estimation, with registers `m`, `j` and `e`.
#[derive(Debug, Clone)]
pub struct SpectralRegisters {
    state: Statevector,
    pub(crate) oracle: DensityEvolution,
    delta_r: f64,
    tau: usize,
    eigenvalues: Vec<f64>,
}

/// Phase estimation of `e^{iρt}`, `t = 2π/δ_R`, with `ρ` the reduced state of
/// the column register.
pub fn spectral_extraction(sv: Statevector, fm: &FeatureModel, tau: usize, delta_r: f64) -> Result<SpectralRegisters> {
    if tau == 0 {
        return Err(Error::Config("eigenvalue register needs at least one qubit".into()));
    }
    let eigenvalues = fm.normalized_eigenvalues();
    let top = eigenvalues[0];
    if !(delta_r.is_finite() && delta_r > top) {
        return Err(Error::Config(format!(
            "delta_R = {delta_r} must exceed the largest normalized eigenvalue {top} to avoid phase wraparound"
        )));
    }
    sv.layout().get(ROW_REG)?;
    let rho = partial_trace(&sv, COL_REG)?;
    let oracle = DensityEvolution {
        evolution: HermitianEvolution::new(rho.matrix())?,
        time: 2.0 * PI / delta_r,
        n_qubits: rho.n_qubits(),
    };
    let mut state = sv;
    state.append_register(EIGEN_REG, tau)?;
    qpe_on(&mut state, &oracle, COL_REG, EIGEN_REG)?;
    Ok(SpectralRegisters {
        state,
        oracle,
        delta_r,
        tau,
        eigenvalues,
    })
}

impl SpectralRegisters {
    pub fn state(&self) -> &Statevector {
        &self.state
    }

    pub fn delta_r(&self) -> f64 {
        self.delta_r
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    /// `t = 2π/δ_R`
    pub fn time(&self) -> f64 {
        2.0 * PI / self.delta_r
    }

    /// Eigenvalue spacing between adjacent bins, `δ_R/2^τ`.
    pub fn bin_width(&self) -> f64 {
        self.delta_r / (1u64 << self.tau) as f64
    }

    /// `λ̂² = b δ_R / 2^τ`
    pub fn decode(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_width()
    }

    /// Classical normalized eigenvalues `λ̃_r²` of the retained components.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `round(λ̃² 2^τ / δ_R)`
    pub fn predicted_bin(&self, eigenvalue: f64) -> usize {
        (eigenvalue / self.bin_width()).round() as usize
    }

    /// Distribution of the eigenvalue register conditioned on the column
    /// register being projected onto `v` (a real vector of at most `2^{|m|}`
    /// entries). For a right singular vector this is that component's QPE
    /// outcome distribution.
    pub fn bin_distribution(&self, v: &[f64]) -> Result<Vec<f64>> {
        let layout = self.state.layout();
        let m = layout.get(COL_REG)?;
        let e = layout.get(EIGEN_REG)?;
        if v.len() > m.dim() {
            return Err(Error::Domain(format!(
                "vector of length {} exceeds column register",
                v.len()
            )));
        }
        debug_assert_eq!(m.offset, 0);
        let rest = self.state.dim() >> m.width;
        let mut projected = vec![qrff_qsim::C64::new(0.0, 0.0); rest];
        for (i, a) in self.state.amplitudes().iter().enumerate() {
            let k = m.value(i);
            if k < v.len() {
                projected[i >> m.width] += a * v[k];
            }
        }
        // registers above `m` keep their order after dropping it
        let mut dist = vec![0.0; e.dim()];
        for (k, a) in projected.iter().enumerate() {
            dist[(k >> (e.offset - m.width)) & (e.dim() - 1)] += a.norm_sqr();
        }
        let total: f64 = dist.iter().sum();
        if total <= 0.0 {
            return Err(Error::Domain(
                "vector has no overlap with the column register state".into(),
            ));
        }
        dist.iter_mut().for_each(|p| *p /= total);
        Ok(dist)
    }
}
