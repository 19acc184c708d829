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

//! Random Fourier features for the squared-exponential kernel and the
//! reduced-rank (weight-space) posterior in SVD form.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::kernel::{check_finite, Dataset, KernelHyper, Posterior};
use crate::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Spectral frequencies `s_1..s_M` in the `e^{2πi sᵀx}` convention.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySet {
    frequencies: Vec<Vec<f64>>,
    seed: u64,
}

impl FrequencySet {
    /// Use explicit frequencies (e.g. from a file or a test).
    pub fn from_frequencies(frequencies: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::Domain("need at least one frequency".into()));
        }
        let d = frequencies[0].len();
        if d == 0 || frequencies.iter().any(|s| s.len() != d) {
            return Err(Error::Domain("frequencies must share a positive dimension".into()));
        }
        check_finite(frequencies.iter().flatten())?;
        Ok(FrequencySet { frequencies, seed })
    }

    pub fn frequencies(&self) -> &[Vec<f64>] {
        &self.frequencies
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.frequencies[0].len()
    }
}

/// Draw `m` frequencies from the normalized RBF spectrum: every coordinate is
/// `Normal(0, 1/(2πl))`.
pub fn sample_frequencies(m: usize, h: &KernelHyper, d: usize, seed: u64) -> Result<FrequencySet> {
    if m == 0 || d == 0 {
        return Err(Error::Domain(
            "number of frequencies and dimension must be positive".into(),
        ));
    }
    h.validate()?;
    let normal = Normal::new(0.0, 1.0 / (2.0 * PI * h.length_scale))
        .map_err(|e| Error::Domain(format!("frequency distribution: {e}")))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let frequencies = (0..m)
        .map(|_| (0..d).map(|_| normal.sample(&mut rng)).collect())
        .collect();
    Ok(FrequencySet { frequencies, seed })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(cos 2πs_1ᵀx, sin 2πs_1ᵀx, …, cos 2πs_Mᵀx, sin 2πs_Mᵀx)`, unscaled.
pub fn feature_map(x: &[f64], freq: &FrequencySet) -> Result<Vec<f64>> {
    if x.len() != freq.dim() {
        return Err(Error::Domain(format!(
            "input has dimension {}, frequencies {}",
            x.len(),
            freq.dim()
        )));
    }
    check_finite(x)?;
    let mut phi = Vec::with_capacity(2 * freq.len());
    for s in freq.frequencies() {
        let (sin, cos) = (2.0 * PI * dot(s, x)).sin_cos();
        phi.push(cos);
        phi.push(sin);
    }
    Ok(phi)
}

/// Thin SVD `X = U diag(λ) Vᵀ` restricted to the numerical rank.
#[derive(Debug, Clone)]
pub struct Svd {
    /// N × R
    pub u: DMatrix<f64>,
    /// descending, all positive
    pub singular_values: Vec<f64>,
    /// 2M × R
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&self.singular_values));
        &self.u * lambda * self.v.transpose()
    }
}

/// Scaled design matrix and its decomposition.
///
/// Row `i` of the design is `√(σ_f²/M) φ(x_i)`, so `XXᵀ` approximates the
/// kernel matrix and `‖X‖_F² = N σ_f²`.
#[derive(Debug, Clone)]
pub struct FeatureModel {
    freq: FrequencySet,
    inputs: Vec<Vec<f64>>,
    scale: f64,
    design: DMatrix<f64>,
    frobenius_norm: f64,
    svd: Svd,
}

pub fn build_feature_model(ds: &Dataset, freq: &FrequencySet, h: &KernelHyper) -> Result<FeatureModel> {
    h.validate()?;
    if ds.dim() != freq.dim() {
        return Err(Error::Domain(format!(
            "data dimension {} but frequency dimension {}",
            ds.dim(),
            freq.dim()
        )));
    }
    let m = freq.len();
    let scale = (h.signal_var() / m as f64).sqrt();
    let n = ds.len();
    let mut design = DMatrix::zeros(n, 2 * m);
    for (i, x) in ds.inputs().iter().enumerate() {
        for (k, v) in feature_map(x, freq)?.into_iter().enumerate() {
            design[(i, k)] = scale * v;
        }
    }
    let frobenius_norm = design.norm();
    if frobenius_norm == 0.0 {
        return Err(Error::Numerical("design matrix is identically zero".into()));
    }
    let svd = thin_svd(&design)?;
    Ok(FeatureModel {
        freq: freq.clone(),
        inputs: ds.inputs().to_vec(),
        scale,
        design,
        frobenius_norm,
        svd,
    })
}

fn thin_svd(x: &DMatrix<f64>) -> Result<Svd> {
    let svd = SVD::new(x.clone(), true, true);
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD did not return U".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not return V".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let top = svd.singular_values[order[0]];
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&k| svd.singular_values[k] > RANK_CUTOFF * top)
        .collect();
    Ok(Svd {
        u: DMatrix::from_fn(x.nrows(), keep.len(), |i, r| u[(i, keep[r])]),
        singular_values: keep.iter().map(|&k| svd.singular_values[k]).collect(),
        v: DMatrix::from_fn(x.ncols(), keep.len(), |i, r| v_t[(keep[r], i)]),
    })
}

impl FeatureModel {
    pub fn frequencies(&self) -> &FrequencySet {
        &self.freq
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm
    }

    pub fn svd(&self) -> &Svd {
        &self.svd
    }

    /// Number of data rows N.
    pub fn n_rows(&self) -> usize {
        self.design.nrows()
    }

    /// Number of frequencies M (the design has 2M columns).
    pub fn n_frequencies(&self) -> usize {
        self.freq.len()
    }

    /// `√(σ_f²/M)`
    pub fn feature_scale(&self) -> f64 {
        self.scale
    }

    /// Scaled feature vector `φ̃(x) = √(σ_f²/M) φ(x)`.
    pub fn scaled_features(&self, x: &[f64]) -> Result<DVector<f64>> {
        let phi = feature_map(x, &self.freq)?;
        Ok(DVector::from_iterator(
            phi.len(),
            phi.into_iter().map(|v| v * self.scale),
        ))
    }

    /// Singular values of `X/‖X‖_F`, squared: the spectrum of the reduced
    /// column-register state.
    pub fn normalized_eigenvalues(&self) -> Vec<f64> {
        let f2 = self.frobenius_norm * self.frobenius_norm;
        self.svd.singular_values.iter().map(|l| l * l / f2).collect()
    }

    /// Projections `φ̃ᵀV_r` and the squared norm of the part of `φ̃` outside span(V).
    pub fn project(&self, phi: &DVector<f64>) -> (Vec<f64>, f64) {
        let coeffs: Vec<f64> = (0..self.svd.rank()).map(|r| self.svd.v.column(r).dot(phi)).collect();
        let inside: f64 = coeffs.iter().map(|c| c * c).sum();
        (coeffs, (phi.norm_squared() - inside).max(0.0))
    }
}

/// Reduced-rank posterior evaluated through the SVD of the design:
///
/// mean = Σ_r λ_r/(λ_r²+σ_n²) (φ̃ᵀV_r)(U_rᵀy),
/// variance = σ_n² Σ_r (φ̃ᵀV_r)²/(λ_r²+σ_n²) + ‖φ̃_⊥‖²,
///
/// which equals `σ_n² φ̃ᵀ(XᵀX+σ_n²I)⁻¹φ̃` including the part of `φ̃` outside the
/// row space of `X`.
pub fn rff_posterior(fm: &FeatureModel, y: &[f64], x_star: &[f64], h: &KernelHyper) -> Result<Posterior> {
    if y.len() != fm.n_rows() {
        return Err(Error::Domain(format!(
            "{} targets for {} design rows",
            y.len(),
            fm.n_rows()
        )));
    }
    let noise = h.noise_var();
    if noise == 0.0 && fm.svd.rank() < fm.design.ncols() {
        return Err(Error::Numerical(
            "zero noise with a rank-deficient design has no unique posterior".into(),
        ));
    }
    let phi = fm.scaled_features(x_star)?;
    let (proj, outside) = fm.project(&phi);
    let y = DVector::from_column_slice(y);
    let mut mean = 0.0;
    let mut spectral = 0.0;
    for (r, (&lambda, c)) in fm.svd.singular_values.iter().zip(&proj).enumerate() {
        let denom = lambda * lambda + noise;
        mean += lambda / denom * c * fm.svd.u.column(r).dot(&y);
        spectral += c * c / denom;
    }
    Ok(Posterior {
        mean,
        variance: noise * spectral + outside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rbf_kernel;
    use proptest::prelude::*;

    fn hyper() -> KernelHyper {
        KernelHyper::new(1.5, 1.0, 0.1).unwrap()
    }

    fn std_of(values: impl Iterator<Item = f64>) -> f64 {
        let v: Vec<f64> = values.collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_frequencies(8, &hyper(), 2, 11).unwrap();
        let b = sample_frequencies(8, &hyper(), 2, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_frequencies(8, &hyper(), 2, 12).unwrap());
    }

    #[test]
    fn sample_std_matches_spectral_width() {
        let f = sample_frequencies(100_000, &hyper(), 1, 3).unwrap();
        let s = std_of(f.frequencies().iter().map(|v| v[0]));
        let want = 1.0 / (2.0 * PI);
        assert!(((s - want) / want).abs() < 0.02, "{s} vs {want}");

        let wide = KernelHyper::new(1.5, 2.0, 0.1).unwrap();
        let g = sample_frequencies(100_000, &wide, 1, 4).unwrap();
        let ratio = std_of(g.frequencies().iter().map(|v| v[0])) / s;
        assert!((0.48..=0.52).contains(&ratio), "{ratio}");
    }

    #[test]
    fn features_at_origin() {
        let f = sample_frequencies(3, &hyper(), 1, 0).unwrap();
        assert_eq!(feature_map(&[0.0], &f).unwrap(), vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn monte_carlo_kernel_estimate() {
        use rand::Rng;
        let h = hyper();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..5 {
            let (a, b) = (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
            let avg: f64 = (0..50)
                .map(|seed| {
                    let f = sample_frequencies(256, &h, 1, 1000 + seed).unwrap();
                    let pa = feature_map(&[a], &f).unwrap();
                    let pb = feature_map(&[b], &f).unwrap();
                    h.signal_var() / 256.0 * dot(&pa, &pb)
                })
                .sum::<f64>()
                / 50.0;
            let exact = rbf_kernel(&[a], &[b], &h).unwrap();
            assert!((avg - exact).abs() < 0.05, "{a} {b}: {avg} vs {exact}");
        }
    }

    #[test]
    fn single_pair_at_zero_phase() {
        let ds = Dataset::new(vec![vec![0.0]], vec![1.0]).unwrap();
        let h = KernelHyper::new(1.0, 1.0, 0.1).unwrap();
        let f = sample_frequencies(1, &h, 1, 0).unwrap();
        let fm = build_feature_model(&ds, &f, &h).unwrap();
        assert_eq!(fm.design().as_slice(), &[1.0, 0.0]);
        assert_eq!(fm.svd().rank(), 1);
        assert!((fm.svd().singular_values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_rank_deficient_rejected() {
        let ds = Dataset::new(vec![vec![0.0]], vec![1.0]).unwrap();
        let h = KernelHyper::new(1.0, 1.0, 0.0).unwrap();
        let f = sample_frequencies(2, &h, 1, 0).unwrap();
        let fm = build_feature_model(&ds, &f, &h).unwrap();
        assert!(matches!(
            rff_posterior(&fm, &[1.0], &[0.3], &h),
            Err(Error::Numerical(_))
        ));
    }

    fn random_model(n: usize, m: usize, seed: u64) -> (FeatureModel, Vec<f64>) {
        use rand::Rng;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(0.0..2.0 * PI)]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x[0].sin() + 0.1 * rng.random::<f64>()).collect();
        let ds = Dataset::new(xs, ys.clone()).unwrap();
        let f = sample_frequencies(m, &hyper(), 1, seed).unwrap();
        (build_feature_model(&ds, &f, &hyper()).unwrap(), ys)
    }

    proptest! {
        #[test]
        fn feature_norm_is_m(x in -20.0..20.0f64, m in 1usize..16, seed in 0u64..100) {
            let f = sample_frequencies(m, &hyper(), 1, seed).unwrap();
            let phi = feature_map(&[x], &f).unwrap();
            prop_assert!((dot(&phi, &phi) - m as f64).abs() < 1e-12);
        }

        #[test]
        fn svd_invariants(n in 1usize..20, m in 1usize..6, seed in 0u64..1000) {
            let (fm, _) = random_model(n, m, seed);
            let svd = fm.svd();
            let r = svd.rank();
            let eye = DMatrix::<f64>::identity(r, r);
            prop_assert!((svd.u.transpose() * &svd.u - &eye).amax() < 1e-10);
            prop_assert!((svd.v.transpose() * &svd.v - &eye).amax() < 1e-10);
            prop_assert!(svd.singular_values.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(svd.singular_values.iter().all(|&l| l > 0.0));
            let f2 = fm.frobenius_norm().powi(2);
            prop_assert!((f2 - svd.singular_values.iter().map(|l| l * l).sum::<f64>()).abs() < 1e-10 * f2.max(1.0));
            prop_assert!((f2 - n as f64 * 2.25).abs() < 1e-10 * f2);
            prop_assert!((fm.design() - svd.reconstruct()).norm() < 1e-10);
        }

        #[test]
        fn variance_nonnegative(n in 1usize..20, m in 1usize..6, seed in 0u64..1000, q in -1.0..8.0f64) {
            let (fm, ys) = random_model(n, m, seed);
            let p = rff_posterior(&fm, &ys, &[q], &hyper()).unwrap();
            prop_assert!(p.variance >= 0.0);
        }

        #[test]
        fn zero_targets_zero_mean(n in 1usize..10, m in 1usize..4, seed in 0u64..100, q in 0.0..6.0f64) {
            let (fm, _) = random_model(n, m, seed);
            let p = rff_posterior(&fm, &vec![0.0; n], &[q], &hyper()).unwrap();
            prop_assert_eq!(p.mean, 0.0);
        }
    }
}
