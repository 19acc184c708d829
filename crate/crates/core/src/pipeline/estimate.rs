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

use nalgebra::DVector;
use qrff_qsim::{binomial, hadamard_test, shot_rng, swap_test_marginal, RegisterLayout, Sampling, Statevector};
use serde::{Deserialize, Serialize};

use super::encoding::{plan_encoding, prepare_data_state};
use super::inversion::{invert_for_mean, invert_for_variance, InversionConstants, InvertedState};
use super::spectral::{default_delta_r, spectral_extraction, SpectralRegisters};
use super::{COL_REG, ROW_REG};
use crate::kernel::KernelHyper;
use crate::rff::FeatureModel;
use crate::{Error, Result};

/// Exact amplitudes or finite-shot estimates of the test circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "sampled" => Ok(Mode::Sampled),
            other => Err(Error::Config(format!(
                "unknown mode {other:?} (expected exact or sampled)"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumConfig {
    /// Eigenvalue register width.
    pub tau: usize,
    /// Phase-estimation range; `None` selects [`default_delta_r`].
    pub delta_r: Option<f64>,
    /// Circuit repetitions per test and query point (sampled mode).
    pub shots: u64,
    pub seed_shots: u64,
    pub mode: Mode,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        QuantumConfig {
            tau: 13,
            delta_r: None,
            shots: 1_000_000,
            seed_shots: 0,
            mode: Mode::Exact,
        }
    }
}

impl QuantumConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau == 0 {
            return Err(Error::Config("tau must be positive".into()));
        }
        if self.mode == Mode::Sampled && self.shots == 0 {
            return Err(Error::Config("sampled mode needs a positive shot count".into()));
        }
        if let Some(d) = self.delta_r {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::Config(format!("delta_R must be positive, got {d}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    /// Estimated `Re⟨ψ₂|ψ₁⟩`.
    pub overlap: f64,
    pub p_accept: f64,
    pub p_uncompute: f64,
    pub shots_accepted: u64,
    pub shots_rejected: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    /// `spectral + null_space`, clamped at 0.
    pub variance: f64,
    /// Unclamped value; negative only through shot noise.
    pub raw: f64,
    pub spectral: f64,
    /// `‖φ̃_⊥‖²`, evaluated classically.
    pub null_space: f64,
    /// Unclamped SWAP-test estimate of the squared overlap.
    pub overlap_sqr: f64,
    pub p_accept: f64,
    pub p_uncompute: f64,
    pub shots_accepted: u64,
    pub shots_rejected: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorEstimate {
    pub mean: f64,
    pub variance: f64,
    pub variance_raw: f64,
    /// Ancilla acceptance probability of the mean branch.
    pub p1: f64,
    /// Ancilla acceptance probability of the variance branch.
    pub p2: f64,
    pub p1_uncompute: f64,
    pub p2_uncompute: f64,
    pub shots_used: u64,
    pub shots_rejected: u64,
    pub mode: Mode,
}

/// Spectral extraction and both inversions of one design, reusable across
/// query points.
#[derive(Debug, Clone)]
pub struct QuantumRegressor {
    fm: FeatureModel,
    noise_var: f64,
    cfg: QuantumConfig,
    spectral: SpectralRegisters,
    constants: InversionConstants,
    mean_state: InvertedState,
    variance_state: InvertedState,
    n_col_qubits: usize,
    n_row_qubits: usize,
}

impl QuantumRegressor {
    pub fn new(fm: &FeatureModel, h: &KernelHyper, cfg: &QuantumConfig) -> Result<Self> {
        h.validate()?;
        cfg.validate()?;
        let plan = plan_encoding(fm)?;
        let data = prepare_data_state(&plan)?;
        let delta_r = cfg.delta_r.unwrap_or_else(|| default_delta_r(fm));
        let spectral = spectral_extraction(data, fm, cfg.tau, delta_r)?;
        let constants = InversionConstants::for_spectrum(&spectral, h.noise_var(), fm.frobenius_norm())?;
        let mean_state = invert_for_mean(&spectral, &constants)?;
        let variance_state = invert_for_variance(&spectral, &constants)?;
        Ok(QuantumRegressor {
            fm: fm.clone(),
            noise_var: h.noise_var(),
            cfg: *cfg,
            spectral,
            constants,
            mean_state,
            variance_state,
            n_col_qubits: plan.n_col_qubits,
            n_row_qubits: plan.n_row_qubits,
        })
    }

    pub fn feature_model(&self) -> &FeatureModel {
        &self.fm
    }

    pub fn config(&self) -> &QuantumConfig {
        &self.cfg
    }

    pub fn spectral(&self) -> &SpectralRegisters {
        &self.spectral
    }

    pub fn constants(&self) -> &InversionConstants {
        &self.constants
    }

    pub fn mean_state(&self) -> &InvertedState {
        &self.mean_state
    }

    pub fn variance_state(&self) -> &InvertedState {
        &self.variance_state
    }

    /// Draw the accepted share of `shots`; stream `stream` of the shot seed.
    fn accepted_shots(&self, inv: &InvertedState, stream: u64) -> Result<(u64, u64)> {
        let shots = self.cfg.shots;
        let mut rng = shot_rng(self.cfg.seed_shots, stream);
        let accepted = binomial(&mut rng, shots, inv.total_probability());
        if accepted == 0 {
            return Err(Error::Quantum(qrff_qsim::Error::PostSelection {
                probability: inv.total_probability(),
            }));
        }
        Ok((accepted, shots - accepted))
    }

    fn sampling(&self, inv: &InvertedState, stream: u64) -> Result<(Sampling, u64, u64)> {
        match self.cfg.mode {
            Mode::Exact => Ok((Sampling::Exact, 0, 0)),
            Mode::Sampled => {
                let (accepted, rejected) = self.accepted_shots(inv, stream)?;
                Ok((
                    Sampling::Shots {
                        shots: accepted,
                        seed: self.cfg.seed_shots,
                        stream: stream + 1,
                    },
                    accepted,
                    rejected,
                ))
            }
        }
    }

    fn column_state(&self, phi: &DVector<f64>) -> Result<Statevector> {
        let layout = RegisterLayout::from_widths(&[(COL_REG, self.n_col_qubits)])?;
        Ok(Statevector::from_real_normalized(layout, phi.as_slice())?)
    }

    fn check_features(&self, phi: &DVector<f64>) -> Result<f64> {
        if phi.len() != 2 * self.fm.n_frequencies() {
            return Err(Error::Domain(format!(
                "feature vector of length {}, expected {}",
                phi.len(),
                2 * self.fm.n_frequencies()
            )));
        }
        let norm = phi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("query feature vector must be nonzero and finite".into()));
        }
        Ok(norm)
    }

    /// Posterior mean for the scaled feature vector `phi`. `query` selects the
    /// RNG streams used in sampled mode.
    pub fn mean_for_features(&self, y: &[f64], phi: &DVector<f64>, query: u64) -> Result<MeanEstimate> {
        let phi_norm = self.check_features(phi)?;
        if y.len() != self.fm.n_rows() {
            return Err(Error::Domain(format!(
                "{} targets for {} design rows",
                y.len(),
                self.fm.n_rows()
            )));
        }
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(y_norm > 0.0 && y_norm.is_finite()) {
            return Err(Error::Domain("targets must be nonzero and finite".into()));
        }
        let targets =
            Statevector::from_real_normalized(RegisterLayout::from_widths(&[(ROW_REG, self.n_row_qubits)])?, y)?;
        let reference = self.column_state(phi)?.tensor(&targets)?;
        let inv = &self.mean_state;
        let (sampling, shots_accepted, shots_rejected) = self.sampling(inv, 4 * query)?;
        let overlap = hadamard_test(&inv.state, &reference, sampling)?;
        let mean = inv.total_probability().sqrt() * phi_norm * y_norm / (self.constants.c1 * self.fm.frobenius_norm())
            * overlap;
        Ok(MeanEstimate {
            mean,
            overlap,
            p_accept: inv.p_accept,
            p_uncompute: inv.p_uncompute,
            shots_accepted,
            shots_rejected,
        })
    }

    /// Posterior variance for the scaled feature vector `phi`.
    pub fn variance_for_features(&self, phi: &DVector<f64>, query: u64) -> Result<VarianceEstimate> {
        let phi_norm = self.check_features(phi)?;
        let reference = self.column_state(phi)?;
        let inv = &self.variance_state;
        let (sampling, shots_accepted, shots_rejected) = self.sampling(inv, 4 * query + 2)?;
        let outcome = swap_test_marginal(&inv.state, COL_REG, &reference, sampling)?;
        let f2 = self.fm.frobenius_norm().powi(2);
        let c2 = self.constants.c2;
        let spectral = self.noise_var * inv.total_probability() / (c2 * c2) * phi_norm * phi_norm * outcome.raw / f2;
        let (_, null_space) = self.fm.project(phi);
        let raw = spectral + null_space;
        Ok(VarianceEstimate {
            variance: raw.max(0.0),
            raw,
            spectral,
            null_space,
            overlap_sqr: outcome.raw,
            p_accept: inv.p_accept,
            p_uncompute: inv.p_uncompute,
            shots_accepted,
            shots_rejected,
        })
    }

    pub fn mean_at(&self, y: &[f64], x_star: &[f64], query: u64) -> Result<MeanEstimate> {
        self.mean_for_features(y, &self.fm.scaled_features(x_star)?, query)
    }

    pub fn variance_at(&self, x_star: &[f64], query: u64) -> Result<VarianceEstimate> {
        self.variance_for_features(&self.fm.scaled_features(x_star)?, query)
    }

    pub fn estimate(&self, y: &[f64], x_star: &[f64], query: u64) -> Result<PosteriorEstimate> {
        let m = self.mean_at(y, x_star, query)?;
        let v = self.variance_at(x_star, query)?;
        let shots_used = match self.cfg.mode {
            Mode::Exact => 0,
            Mode::Sampled => 2 * self.cfg.shots,
        };
        Ok(PosteriorEstimate {
            mean: m.mean,
            variance: v.variance,
            variance_raw: v.raw,
            p1: m.p_accept,
            p2: v.p_accept,
            p1_uncompute: m.p_uncompute,
            p2_uncompute: v.p_uncompute,
            shots_used,
            shots_rejected: m.shots_rejected + v.shots_rejected,
            mode: self.cfg.mode,
        })
    }
}

/// One-off mean estimate; use [`QuantumRegressor`] for several query points.
pub fn estimate_mean(
    fm: &FeatureModel,
    y: &[f64],
    x_star: &[f64],
    h: &KernelHyper,
    cfg: &QuantumConfig,
) -> Result<MeanEstimate> {
    QuantumRegressor::new(fm, h, cfg)?.mean_at(y, x_star, 0)
}

/// One-off variance estimate; use [`QuantumRegressor`] for several query points.
pub fn estimate_variance(
    fm: &FeatureModel,
    x_star: &[f64],
    h: &KernelHyper,
    cfg: &QuantumConfig,
) -> Result<VarianceEstimate> {
    QuantumRegressor::new(fm, h, cfg)?.variance_at(x_star, 0)
}
