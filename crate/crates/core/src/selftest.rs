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

//! Quick invariant checks runnable from the command line.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use qrff_qsim::{hadamard_test, partial_trace, swap_test, RegisterLayout, Sampling, Statevector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::experiment::{feature_model, generate_dataset, RunConfig};
use crate::kernel::{Dataset, KernelHyper};
use crate::pipeline::{plan_encoding, prepare_data_state, Branch, QuantumConfig, QuantumRegressor};
use crate::rff::{build_feature_model, rff_posterior, sample_frequencies, FeatureModel};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        passed: worst <= tol,
        detail: format!("worst deviation {worst:.3e} (tolerance {tol:.0e})"),
    }
}

/// Probability that phase estimation with `tau` qubits reports bin `b` for phase `phase`.
fn qpe_probability(phase: f64, b: usize, tau: usize) -> f64 {
    let n = (1u64 << tau) as f64;
    let delta = phase - b as f64 / n;
    let den = (PI * delta).sin();
    if den.abs() < 1e-15 {
        return 1.0;
    }
    let num = (PI * n * delta).sin();
    (num * num) / (n * n * den * den)
}

/// Per-component rotation weights `Σ_b P_r(b) sinθ_b` and acceptance `Σ_r λ̃_r² Σ_b P_r(b) sin²θ_b`.
fn binned_weights(qr: &QuantumRegressor, branch: Branch) -> (Vec<f64>, f64) {
    let sr = qr.spectral();
    let ic = qr.constants();
    let mut weights = Vec::new();
    let mut p = 0.0;
    for &ev in sr.eigenvalues() {
        let phase = ev / sr.delta_r();
        let (mut g, mut g2) = (0.0, 0.0);
        for b in 0..1usize << sr.tau() {
            let pb = qpe_probability(phase, b, sr.tau());
            let s = ic.rotation_sine(branch, sr.decode(b));
            g += pb * s;
            g2 += pb * s * s;
        }
        weights.push(g);
        p += ev * g2;
    }
    (weights, p)
}

fn random_model(rng: &mut ChaCha20Rng) -> Result<FeatureModel> {
    let n = rng.random_range(1..=16);
    let m = rng.random_range(1..=4);
    let h = KernelHyper::new(1.5, 1.0, 0.1)?;
    let inputs = (0..n).map(|_| vec![rng.random_range(0.0..2.0 * PI)]).collect();
    let ds = Dataset::new(inputs, vec![0.0; n])?;
    build_feature_model(&ds, &sample_frequencies(m, &h, 1, rng.random())?, &h)
}

fn state_prep(rng: &mut ChaCha20Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let fm = random_model(rng)?;
        let plan = plan_encoding(&fm)?;
        let sv = prepare_data_state(&plan)?;
        let x = fm.design();
        let f = fm.frobenius_norm();
        let mut want = vec![0.0; sv.dim()];
        for j in 0..x.nrows() {
            for m in 0..x.ncols() {
                want[m + (j << plan.n_col_qubits)] = x[(j, m)] / f;
            }
        }
        let target = Statevector::from_real_normalized(sv.layout().clone(), &want)?;
        worst = worst.max(1.0 - sv.fidelity(&target)?);
    }
    Ok(check("state_prep_fidelity", worst, 1e-10))
}

fn bell_partial_trace() -> Result<Check> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let layout = RegisterLayout::from_widths(&[("a", 1), ("b", 1)])?;
    let bell = Statevector::from_real_normalized(layout, &[s, 0.0, 0.0, s])?;
    let rho = partial_trace(&bell, "a")?;
    let half = DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
    Ok(check("bell_partial_trace", (rho.matrix() - half).camax(), 1e-10))
}

fn overlap_tests(rng: &mut ChaCha20Rng) -> Result<Check> {
    let layout = RegisterLayout::from_widths(&[("r", 3)])?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let draw = |rng: &mut ChaCha20Rng| -> Vec<C64> {
            let v: Vec<C64> = (0..8)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / n).collect()
        };
        let a = Statevector::from_amplitudes(layout.clone(), draw(rng))?;
        let b = Statevector::from_amplitudes(layout.clone(), draw(rng))?;
        let inner = b.inner(&a)?;
        worst = worst.max((hadamard_test(&a, &b, Sampling::Exact)? - inner.re).abs());
        worst = worst.max((swap_test(&a, &b, Sampling::Exact)? - inner.norm_sqr()).abs());
    }
    Ok(check("overlap_tests_exact", worst, 1e-10))
}

fn rff_direct_solve(fm: &FeatureModel, y: &[f64], h: &KernelHyper, points: &[Vec<f64>]) -> Result<Check> {
    let x = fm.design();
    let a = x.transpose() * x + DMatrix::identity(x.ncols(), x.ncols()) * h.noise_var();
    let chol = a
        .cholesky()
        .ok_or_else(|| crate::Error::Numerical("regularized normal matrix not positive definite".into()))?;
    let xty = x.transpose() * DVector::from_column_slice(y);
    let w = chol.solve(&xty);
    let mut worst: f64 = 0.0;
    for p in points {
        let phi = fm.scaled_features(p)?;
        let post = rff_posterior(fm, y, p, h)?;
        worst = worst.max((post.mean - phi.dot(&w)).abs());
        worst = worst.max((post.variance - h.noise_var() * phi.dot(&chol.solve(&phi))).abs());
    }
    Ok(check("rff_direct_solve", worst, 1e-8))
}

/// Run all checks on the default configuration with eigenvalue register width `tau`.
pub fn run(tau: usize) -> Result<Vec<Check>> {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let mut checks = vec![state_prep(&mut rng)?, bell_partial_trace()?, overlap_tests(&mut rng)?];

    let cfg = RunConfig {
        tau,
        ..Default::default()
    };
    let h = cfg.hyper()?;
    let ds = generate_dataset(&cfg)?;
    let fm = feature_model(&cfg, &ds)?;
    let points = cfg.grid.points(cfg.d);
    checks.push(rff_direct_solve(&fm, ds.targets(), &h, &points)?);

    let qr = QuantumRegressor::new(&fm, &h, &QuantumConfig { tau, ..cfg.quantum() })?;
    let (g, p1) = binned_weights(&qr, Branch::Mean);
    let (hv, p2) = binned_weights(&qr, Branch::Variance);
    let worst_p = (qr.mean_state().p_accept - p1)
        .abs()
        .max((qr.variance_state().p_accept - p2).abs());
    checks.push(check("acceptance_probabilities", worst_p, 1e-6));

    let svd = fm.svd();
    let f = fm.frobenius_norm();
    let y = DVector::from_column_slice(ds.targets());
    let ic = qr.constants();
    let (mut worst_mean, mut worst_var): (f64, f64) = (0.0, 0.0);
    for (i, p) in points.iter().enumerate().step_by(7) {
        let phi = fm.scaled_features(p)?;
        let (proj, outside) = fm.project(&phi);
        let lam = qr.spectral().eigenvalues();
        let mut mean = 0.0;
        let mut var = 0.0;
        for r in 0..svd.rank() {
            mean += lam[r].sqrt() * g[r] * proj[r] * svd.u.column(r).dot(&y) / (ic.c1 * f);
            var += lam[r] * hv[r] * hv[r] * proj[r] * proj[r];
        }
        var = h.noise_var() * var / (ic.c2 * ic.c2 * f * f) + outside;
        worst_mean = worst_mean.max((qr.mean_at(ds.targets(), p, i as u64)?.mean - mean).abs());
        worst_var = worst_var.max((qr.variance_at(p, i as u64)?.raw - var).abs());
    }
    checks.push(check("mean_equals_binned_sum", worst_mean, 1e-8));
    checks.push(check("variance_equals_binned_sum", worst_var, 1e-8));
    Ok(checks)
}
