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

//! Exact Gaussian process regression with the squared-exponential kernel.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Squared-exponential kernel amplitude and length scale, plus observation noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelHyper {
    pub signal_std: f64,
    pub length_scale: f64,
    pub noise_std: f64,
}

impl KernelHyper {
    pub fn new(signal_std: f64, length_scale: f64, noise_std: f64) -> Result<Self> {
        let h = KernelHyper {
            signal_std,
            length_scale,
            noise_std,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.signal_std.is_finite() && self.signal_std > 0.0) {
            return Err(Error::Domain(format!(
                "signal_std must be positive, got {}",
                self.signal_std
            )));
        }
        if !(self.length_scale.is_finite() && self.length_scale > 0.0) {
            return Err(Error::Domain(format!(
                "length_scale must be positive, got {}",
                self.length_scale
            )));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::Domain(format!(
                "noise_std must be nonnegative, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }

    pub fn signal_var(&self) -> f64 {
        self.signal_std * self.signal_std
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_std * self.noise_std
    }
}

/// Training inputs (N points in R^d) and targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Domain("dataset needs at least one point".into()));
        }
        if inputs.len() != targets.len() {
            return Err(Error::Domain(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        let d = inputs[0].len();
        if d == 0 || inputs.iter().any(|x| x.len() != d) {
            return Err(Error::Domain("inputs must share a positive dimension".into()));
        }
        check_finite(inputs.iter().flatten().chain(&targets))?;
        Ok(Dataset { inputs, targets })
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].len()
    }

    /// Reorder rows so that row `k` of the result is row `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if perm.len() != self.len()
            || !perm
                .iter()
                .all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Domain("not a permutation of the dataset rows".into()));
        }
        Ok(Dataset {
            inputs: perm.iter().map(|&p| self.inputs[p].clone()).collect(),
            targets: perm.iter().map(|&p| self.targets[p]).collect(),
        })
    }
}

/// Posterior mean and variance at one query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub mean: f64,
    pub variance: f64,
}

pub(crate) fn check_finite<'a>(values: impl IntoIterator<Item = &'a f64>) -> Result<()> {
    if values.into_iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("non-finite coordinate".into()))
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `σ_f² exp(-‖xi - xj‖² / 2l²)`
pub fn rbf_kernel(xi: &[f64], xj: &[f64], h: &KernelHyper) -> Result<f64> {
    if xi.len() != xj.len() {
        return Err(Error::Domain(format!(
            "dimension mismatch {} vs {}",
            xi.len(),
            xj.len()
        )));
    }
    check_finite(xi.iter().chain(xj))?;
    Ok(rbf_unchecked(xi, xj, h))
}

fn rbf_unchecked(xi: &[f64], xj: &[f64], h: &KernelHyper) -> f64 {
    h.signal_var() * (-sq_dist(xi, xj) / (2.0 * h.length_scale * h.length_scale)).exp()
}

pub fn gram_matrix(points: &[Vec<f64>], h: &KernelHyper) -> Result<DMatrix<f64>> {
    if points.is_empty() {
        return Err(Error::Domain("gram matrix of zero points".into()));
    }
    check_finite(points.iter().flatten())?;
    let n = points.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rbf_unchecked(&points[i], &points[j], h);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Fourier transform of the squared-exponential kernel,
/// `σ_f² (2πl²)^{d/2} exp(-l²‖ω‖²/2)`, normalized so that
/// `k(τ) = (2π)^{-d} ∫ S(ω) e^{iωᵀτ} dω`.
pub fn spectral_density(omega: &[f64], h: &KernelHyper) -> f64 {
    let d = omega.len() as f64;
    let l2 = h.length_scale * h.length_scale;
    let w2: f64 = omega.iter().map(|w| w * w).sum();
    h.signal_var() * (2.0 * PI * l2).powf(d / 2.0) * (-0.5 * l2 * w2).exp()
}

/// Exact GP conditioned on a dataset; the Cholesky factor is reused per query.
#[derive(Debug, Clone)]
pub struct ExactGp {
    inputs: Vec<Vec<f64>>,
    hyper: KernelHyper,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

impl ExactGp {
    pub fn fit(ds: &Dataset, h: &KernelHyper) -> Result<Self> {
        h.validate()?;
        let mut k = gram_matrix(ds.inputs(), h)?;
        let n = ds.len();
        for i in 0..n {
            k[(i, i)] += h.noise_var();
        }
        let chol = match Cholesky::new(k.clone()) {
            Some(c) => c,
            None => {
                let jitter = 1e-10 * h.signal_var();
                log::warn!("covariance not positive definite; adding jitter {jitter:e} to the diagonal");
                for i in 0..n {
                    k[(i, i)] += jitter;
                }
                Cholesky::new(k).ok_or_else(|| {
                    Error::Numerical(
                        "covariance matrix is singular even after jitter (duplicate inputs with zero noise?)".into(),
                    )
                })?
            }
        };
        let alpha = chol.solve(&DVector::from_column_slice(ds.targets()));
        Ok(ExactGp {
            inputs: ds.inputs().to_vec(),
            hyper: *h,
            chol,
            alpha,
        })
    }

    pub fn predict(&self, x_star: &[f64]) -> Result<Posterior> {
        if x_star.len() != self.inputs[0].len() {
            return Err(Error::Domain(format!(
                "query has dimension {}, data {}",
                x_star.len(),
                self.inputs[0].len()
            )));
        }
        check_finite(x_star)?;
        let k_star = DVector::from_iterator(
            self.inputs.len(),
            self.inputs.iter().map(|x| rbf_unchecked(x, x_star, &self.hyper)),
        );
        let mean = k_star.dot(&self.alpha);
        let v = self.chol.solve(&k_star);
        let variance = self.hyper.signal_var() - k_star.dot(&v);
        Ok(Posterior { mean, variance })
    }
}

/// Posterior of the exact GP at `x_star`.
pub fn exact_posterior(ds: &Dataset, h: &KernelHyper, x_star: &[f64]) -> Result<Posterior> {
    ExactGp::fit(ds, h)?.predict(x_star)
}
