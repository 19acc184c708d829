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

//! Classical oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use qrff_core::experiment::{feature_model, generate_dataset, RunConfig};
use qrff_core::kernel::{gram_matrix, Dataset, KernelHyper};
use qrff_core::pipeline::{Branch, InversionConstants, QuantumRegressor};
use qrff_core::rff::{build_feature_model, sample_frequencies, FeatureModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Probability of reading bin `b` from `tau`-qubit phase estimation of `phase`.
pub fn qpe_probability(phase: f64, b: usize, tau: usize) -> f64 {
    let n = (1u64 << tau) as f64;
    let delta = phase - b as f64 / n;
    let den = (PI * delta).sin();
    if den.abs() < 1e-15 {
        return 1.0;
    }
    let num = (PI * n * delta).sin();
    num * num / (n * n * den * den)
}

/// Binned spectral quantities for one inversion branch.
#[derive(Debug, Clone)]
pub struct BinnedSpectrum {
    /// Normalized eigenvalues `λ̃_r²`.
    pub eigenvalues: Vec<f64>,
    /// `g_r = Σ_b P_r(b) sinθ_b`
    pub weights: Vec<f64>,
    /// Ancilla acceptance `Σ_r λ̃_r² Σ_b P_r(b) sin²θ_b`.
    pub p_accept: f64,
    /// Squared norm after uncomputation, `Σ_r λ̃_r² g_r²`.
    pub total: f64,
}

pub fn binned(
    eigenvalues: &[f64],
    delta_r: f64,
    tau: usize,
    ic: &InversionConstants,
    branch: Branch,
) -> BinnedSpectrum {
    let bin_width = delta_r / (1u64 << tau) as f64;
    let mut weights = Vec::new();
    let mut p_accept = 0.0;
    let mut total = 0.0;
    for &ev in eigenvalues {
        let phase = ev / delta_r;
        let (mut g, mut g2) = (0.0, 0.0);
        for b in 0..1usize << tau {
            let pb = qpe_probability(phase, b, tau);
            let s = ic.rotation_sine(branch, b as f64 * bin_width);
            g += pb * s;
            g2 += pb * s * s;
        }
        weights.push(g);
        p_accept += ev * g2;
        total += ev * g * g;
    }
    BinnedSpectrum {
        eigenvalues: eigenvalues.to_vec(),
        weights,
        p_accept,
        total,
    }
}

pub fn binned_for(qr: &QuantumRegressor, branch: Branch) -> BinnedSpectrum {
    let sr = qr.spectral();
    binned(sr.eigenvalues(), sr.delta_r(), sr.tau(), qr.constants(), branch)
}

/// Classical posterior mean with the phase-estimation weights in place of `1/(λ̃²+σ̃²)`.
pub fn binned_mean(qr: &QuantumRegressor, y: &[f64], x: &[f64]) -> f64 {
    let fm = qr.feature_model();
    let spec = binned_for(qr, Branch::Mean);
    let phi = fm.scaled_features(x).unwrap();
    let svd = fm.svd();
    let y = DVector::from_column_slice(y);
    (0..svd.rank())
        .map(|r| spec.eigenvalues[r].sqrt() * spec.weights[r] * svd.v.column(r).dot(&phi) * svd.u.column(r).dot(&y))
        .sum::<f64>()
        / (qr.constants().c1 * fm.frobenius_norm())
}

/// Classical posterior variance with binned weights, including the null-space term.
pub fn binned_variance(qr: &QuantumRegressor, noise_var: f64, x: &[f64]) -> f64 {
    let fm = qr.feature_model();
    let spec = binned_for(qr, Branch::Variance);
    let phi = fm.scaled_features(x).unwrap();
    let svd = fm.svd();
    let mut spectral = 0.0;
    let mut inside = 0.0;
    for r in 0..svd.rank() {
        let c = svd.v.column(r).dot(&phi);
        spectral += spec.eigenvalues[r] * spec.weights[r].powi(2) * c * c;
        inside += c * c;
    }
    let c2 = qr.constants().c2;
    noise_var * spectral / (c2 * c2 * fm.frobenius_norm().powi(2)) + (phi.norm_squared() - inside).max(0.0)
}

/// Amplitudes `X[j, m]/‖X‖_F` at index `m + j·2^{n_col}`.
pub fn vectorized_design(fm: &FeatureModel, n_col_qubits: usize, dim: usize) -> Vec<f64> {
    let x = fm.design();
    let f = fm.frobenius_norm();
    let mut v = vec![0.0; dim];
    for j in 0..x.nrows() {
        for m in 0..x.ncols() {
            v[m + (j << n_col_qubits)] = x[(j, m)] / f;
        }
    }
    v
}

/// `Σ_r w_r V_r ⊗ U_r` laid out like [`vectorized_design`].
pub fn spectral_state(fm: &FeatureModel, weights: &[f64], n_col_qubits: usize, dim: usize) -> Vec<f64> {
    let svd = fm.svd();
    let mut v = vec![0.0; dim];
    for j in 0..svd.u.nrows() {
        for m in 0..svd.v.nrows() {
            v[m + (j << n_col_qubits)] = (0..svd.rank())
                .map(|r| weights[r] * svd.v[(m, r)] * svd.u[(j, r)])
                .sum();
        }
    }
    v
}

pub fn default_setup() -> (RunConfig, Dataset, FeatureModel, KernelHyper) {
    let cfg = RunConfig::default();
    let ds = generate_dataset(&cfg).unwrap();
    let fm = feature_model(&cfg, &ds).unwrap();
    let h = cfg.hyper().unwrap();
    (cfg, ds, fm, h)
}

/// Random design with `n ≤ max_n` rows and `m ≤ max_m` frequencies.
pub fn random_design(rng: &mut ChaCha20Rng, max_n: usize, max_m: usize) -> (Dataset, FeatureModel, KernelHyper) {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=max_m);
    let h = KernelHyper::new(
        rng.random_range(0.5..2.0),
        rng.random_range(0.5..2.0),
        rng.random_range(0.05..0.5),
    )
    .unwrap();
    let inputs: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(0.0..2.0 * PI)]).collect();
    let targets = inputs
        .iter()
        .map(|x| x[0].sin() + rng.random_range(-0.1..0.1))
        .collect();
    let ds = Dataset::new(inputs, targets).unwrap();
    let fm = build_feature_model(&ds, &sample_frequencies(m, &h, 1, rng.random()).unwrap(), &h).unwrap();
    (ds, fm, h)
}

/// `(XᵀX + σ²I)⁻¹` applied by direct solve.
pub fn direct_posterior(fm: &FeatureModel, y: &[f64], h: &KernelHyper, x: &[f64]) -> (f64, f64) {
    let d = fm.design();
    let a = d.transpose() * d + DMatrix::identity(d.ncols(), d.ncols()) * h.noise_var();
    let lu = a.lu();
    let phi = fm.scaled_features(x).unwrap();
    let w = lu.solve(&(d.transpose() * DVector::from_column_slice(y))).unwrap();
    let v = lu.solve(&phi).unwrap();
    (phi.dot(&w), h.noise_var() * phi.dot(&v))
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Median over reseeds of `‖K_rff − K‖_F`, M = 400 against M = 100.
pub fn kernel_error_ratio(seeds: u64) -> f64 {
    let cfg = RunConfig::default();
    let ds = generate_dataset(&cfg).unwrap();
    let h = cfg.hyper().unwrap();
    let k = gram_matrix(ds.inputs(), &h).unwrap();
    let err = |m: usize, seed: u64| {
        let fm = build_feature_model(&ds, &sample_frequencies(m, &h, 1, seed).unwrap(), &h).unwrap();
        let x = fm.design();
        (x * x.transpose() - &k).norm()
    };
    let mut ratios: Vec<f64> = (0..seeds).map(|s| err(400, 1000 + s) / err(100, 2000 + s)).collect();
    ratios.sort_by(f64::total_cmp);
    let mid = ratios.len() / 2;
    if ratios.len().is_multiple_of(2) {
        0.5 * (ratios[mid - 1] + ratios[mid])
    } else {
        ratios[mid]
    }
}
