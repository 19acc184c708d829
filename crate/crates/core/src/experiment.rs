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

//! Configured runs comparing exact, RFF and quantum-pipeline regression on a
//! noisy sine, and the files they produce.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernel::{Dataset, ExactGp, KernelHyper, Posterior};
use crate::pipeline::{Mode, PosteriorEstimate, QuantumConfig, QuantumRegressor};
use crate::rff::{build_feature_model, rff_posterior, sample_frequencies, FeatureModel};
use crate::{Error, Result};

/// Placement of the training inputs on `[0, 2π]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputLayout {
    /// Evenly spaced along the diagonal, endpoints included.
    Uniform,
    /// Independent uniform draws per coordinate.
    Random,
}

/// Query points: an evenly spaced range along the diagonal of `[start, end]^d`,
/// or explicit coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Grid {
    Range { start: f64, end: f64, count: usize },
    Points { points: Vec<Vec<f64>> },
}

impl Default for Grid {
    fn default() -> Self {
        Grid::Range {
            start: 0.0,
            end: 2.0 * PI,
            count: 50,
        }
    }
}

impl Grid {
    pub fn points(&self, d: usize) -> Vec<Vec<f64>> {
        match self {
            Grid::Range { start, end, count } => {
                linspace(*start, *end, *count).into_iter().map(|t| vec![t; d]).collect()
            }
            Grid::Points { points } => points.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Range { count, .. } => *count,
            Grid::Points { points } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Everything that determines a run. Unknown JSON keys are rejected; missing
/// keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Number of training points N.
    pub n: usize,
    /// Number of frequencies M.
    pub m: usize,
    /// Input dimension d.
    pub d: usize,
    pub grid: Grid,
    pub signal_std: f64,
    pub length_scale: f64,
    pub noise_std: f64,
    pub tau: usize,
    pub shots: u64,
    pub seed_data: u64,
    pub seed_freq: u64,
    pub seed_shots: u64,
    pub delta_r: Option<f64>,
    pub mode: Mode,
    pub input_layout: InputLayout,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 16,
            m: 2,
            d: 1,
            grid: Grid::default(),
            signal_std: 1.5,
            length_scale: 1.0,
            noise_std: 0.1,
            tau: 13,
            shots: 1_000_000,
            seed_data: 7,
            seed_freq: 10,
            seed_shots: 5,
            delta_r: None,
            mode: Mode::Exact,
            input_layout: InputLayout::Uniform,
            output: PathBuf::from("qrff-out"),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn hyper(&self) -> Result<KernelHyper> {
        KernelHyper::new(self.signal_std, self.length_scale, self.noise_std).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn quantum(&self) -> QuantumConfig {
        QuantumConfig {
            tau: self.tau,
            delta_r: self.delta_r,
            shots: self.shots,
            seed_shots: self.seed_shots,
            mode: self.mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n == 0 || self.m == 0 || self.d == 0 {
            return bad(format!(
                "n, m and d must be positive (got {}, {}, {})",
                self.n, self.m, self.d
            ));
        }
        if self.tau == 0 || self.shots == 0 {
            return bad("tau and shots must be positive".into());
        }
        if self.grid.is_empty() {
            return bad("query grid is empty".into());
        }
        match &self.grid {
            Grid::Range { start, end, .. } if !(start.is_finite() && end.is_finite()) => {
                return bad("grid bounds must be finite".into());
            }
            Grid::Points { points } => {
                if let Some(p) = points
                    .iter()
                    .find(|p| p.len() != self.d || p.iter().any(|v| !v.is_finite()))
                {
                    return bad(format!("grid point {p:?} is not a finite {}-vector", self.d));
                }
            }
            _ => {}
        }
        self.hyper()?;
        self.quantum().validate()
    }
}

/// Noise-free target, the mean of `sin` over the coordinates.
pub fn target_function(x: &[f64]) -> f64 {
    x.iter().map(|v| v.sin()).sum::<f64>() / x.len() as f64
}

/// Training set `y_i = f(x_i) + ε_i`, `ε_i ~ N(0, σ_n²)`, seeded by `seed_data`.
pub fn generate_dataset(cfg: &RunConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed_data);
    let inputs: Vec<Vec<f64>> = match cfg.input_layout {
        InputLayout::Uniform => linspace(0.0, 2.0 * PI, cfg.n)
            .into_iter()
            .map(|t| vec![t; cfg.d])
            .collect(),
        InputLayout::Random => (0..cfg.n)
            .map(|_| (0..cfg.d).map(|_| rng.random_range(0.0..2.0 * PI)).collect())
            .collect(),
    };
    let noise = Normal::new(0.0, cfg.noise_std).map_err(|e| Error::Config(e.to_string()))?;
    let targets = inputs
        .iter()
        .map(|x| target_function(x) + noise.sample(&mut rng))
        .collect();
    Dataset::new(inputs, targets)
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub exact: f64,
    pub rff: f64,
    /// Encoding, phase estimation and both inversions.
    pub quantum_setup: f64,
    /// Hadamard and SWAP tests over the grid.
    pub quantum_queries: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub x: Vec<f64>,
    pub exact: Posterior,
    pub rff: Posterior,
    pub quantum: PosteriorEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rmse_mean_qrff_rff: f64,
    pub rmse_mean_qrff_exact: f64,
    pub rmse_mean_rff_exact: f64,
    pub max_abs_mean_gap: f64,
    /// Largest `|var_qrff − var_rff|`.
    pub max_abs_var_gap: f64,
    pub delta_r: f64,
    pub bin_width: f64,
    pub normalized_eigenvalues: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub shots_used: u64,
    pub shots_rejected: u64,
    pub timings: StageTimings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub records: Vec<Record>,
    pub summary: Summary,
}

/// Classical exact posterior over the grid.
pub fn fit_exact(cfg: &RunConfig, ds: &Dataset) -> Result<Vec<Posterior>> {
    let gp = ExactGp::fit(ds, &cfg.hyper()?)?;
    at_grid(cfg, |_, x| gp.predict(x))
}

/// Feature model for the configured frequencies.
pub fn feature_model(cfg: &RunConfig, ds: &Dataset) -> Result<FeatureModel> {
    let h = cfg.hyper()?;
    let freq = sample_frequencies(cfg.m, &h, cfg.d, cfg.seed_freq)?;
    build_feature_model(ds, &freq, &h)
}

/// Classical RFF posterior over the grid.
pub fn fit_rff(cfg: &RunConfig, fm: &FeatureModel, ds: &Dataset) -> Result<Vec<Posterior>> {
    let h = cfg.hyper()?;
    at_grid(cfg, |_, x| rff_posterior(fm, ds.targets(), x, &h))
}

/// Quantum-pipeline estimates over the grid, with the setup it ran on.
pub fn run_quantum(
    cfg: &RunConfig,
    fm: &FeatureModel,
    ds: &Dataset,
) -> Result<(QuantumRegressor, Vec<PosteriorEstimate>)> {
    let qr = QuantumRegressor::new(fm, &cfg.hyper()?, &cfg.quantum())?;
    let est = at_grid(cfg, |i, x| qr.estimate(ds.targets(), x, i as u64))?;
    Ok((qr, est))
}

/// Evaluate `f` at every grid point in parallel, in grid order. The first
/// failure (by grid index) is returned with its location.
fn at_grid<T: Send>(cfg: &RunConfig, f: impl Fn(usize, &[f64]) -> Result<T> + Sync) -> Result<Vec<T>> {
    let points = cfg.grid.points(cfg.d);
    points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            f(i, x).map_err(|e| Error::AtGridPoint {
                index: i,
                x: x.clone(),
                source: Box::new(e),
            })
        })
        .collect()
}

fn rmse(a: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (sum, n) = a.fold((0.0, 0usize), |(s, n), (x, y)| (s + (x - y) * (x - y), n + 1));
    (sum / n as f64).sqrt()
}

/// All three regressions on the configured dataset and grid.
pub fn run_experiment(cfg: &RunConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    let ds = generate_dataset(cfg)?;

    let start = Instant::now();
    let exact = fit_exact(cfg, &ds)?;
    let t_exact = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let fm = feature_model(cfg, &ds)?;
    let rff = fit_rff(cfg, &fm, &ds)?;
    let t_rff = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let qr = QuantumRegressor::new(&fm, &cfg.hyper()?, &cfg.quantum())?;
    let t_setup = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let quantum = at_grid(cfg, |i, x| qr.estimate(ds.targets(), x, i as u64))?;
    let t_queries = start.elapsed().as_secs_f64();
    log::info!("exact {t_exact:.3}s, rff {t_rff:.3}s, quantum setup {t_setup:.3}s, queries {t_queries:.3}s");

    let records: Vec<Record> = cfg
        .grid
        .points(cfg.d)
        .into_iter()
        .zip(exact)
        .zip(rff)
        .zip(quantum)
        .map(|(((x, exact), rff), quantum)| Record { x, exact, rff, quantum })
        .collect();
    let sr = qr.spectral();
    let summary = Summary {
        rmse_mean_qrff_rff: rmse(records.iter().map(|r| (r.quantum.mean, r.rff.mean))),
        rmse_mean_qrff_exact: rmse(records.iter().map(|r| (r.quantum.mean, r.exact.mean))),
        rmse_mean_rff_exact: rmse(records.iter().map(|r| (r.rff.mean, r.exact.mean))),
        max_abs_mean_gap: records
            .iter()
            .map(|r| (r.quantum.mean - r.rff.mean).abs())
            .fold(0.0, f64::max),
        max_abs_var_gap: records
            .iter()
            .map(|r| (r.quantum.variance - r.rff.variance).abs())
            .fold(0.0, f64::max),
        delta_r: sr.delta_r(),
        bin_width: sr.bin_width(),
        normalized_eigenvalues: sr.eigenvalues().to_vec(),
        c1: qr.constants().c1,
        c2: qr.constants().c2,
        shots_used: records.iter().map(|r| r.quantum.shots_used).sum(),
        shots_rejected: records.iter().map(|r| r.quantum.shots_rejected).sum(),
        timings: StageTimings {
            exact: t_exact,
            rff: t_rff,
            quantum_setup: t_setup,
            quantum_queries: t_queries,
        },
    };
    Ok(ComparisonReport { records, summary })
}

/// `printf("%.9g")`.
pub fn format_g9(v: f64) -> String {
    const DIGITS: i32 = 9;
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, v);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn format_x(x: &[f64]) -> String {
    x.iter().map(|v| format_g9(*v)).collect::<Vec<_>>().join(";")
}

pub const CSV_HEADER: &str = "x,mean_exact,var_exact,mean_rff,var_rff,mean_qrff,var_qrff,p1,p2";

fn record_fields(r: &Record) -> [String; 9] {
    [
        format_x(&r.x),
        format_g9(r.exact.mean),
        format_g9(r.exact.variance),
        format_g9(r.rff.mean),
        format_g9(r.rff.variance),
        format_g9(r.quantum.mean),
        format_g9(r.quantum.variance),
        format_g9(r.quantum.p1),
        format_g9(r.quantum.p2),
    ]
}

pub fn results_csv(report: &ComparisonReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.records {
        out.push_str(&record_fields(r).join(","));
        out.push('\n');
    }
    out
}

/// Whitespace-separated columns with a commented header.
pub fn plot_data(report: &ComparisonReport) -> String {
    let mut out = format!("# {}\n", CSV_HEADER.replace(',', " "));
    for r in &report.records {
        out.push_str(&record_fields(r).join(" "));
        out.push('\n');
    }
    out
}

pub fn summary_text(report: &ComparisonReport, cfg: &RunConfig) -> String {
    let s = &report.summary;
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    line("n", cfg.n.to_string());
    line("m", cfg.m.to_string());
    line("d", cfg.d.to_string());
    line("grid_points", report.records.len().to_string());
    line("tau", cfg.tau.to_string());
    line("mode", cfg.mode.to_string());
    line("shots", cfg.shots.to_string());
    line("seed_data", cfg.seed_data.to_string());
    line("seed_freq", cfg.seed_freq.to_string());
    line("seed_shots", cfg.seed_shots.to_string());
    line("delta_r", format_g9(s.delta_r));
    line("bin_width", format_g9(s.bin_width));
    line(
        "normalized_eigenvalues",
        s.normalized_eigenvalues
            .iter()
            .map(|v| format_g9(*v))
            .collect::<Vec<_>>()
            .join(" "),
    );
    line("c1", format_g9(s.c1));
    line("c2", format_g9(s.c2));
    line("rmse_mean_qrff_rff", format_g9(s.rmse_mean_qrff_rff));
    line("rmse_mean_qrff_exact", format_g9(s.rmse_mean_qrff_exact));
    line("rmse_mean_rff_exact", format_g9(s.rmse_mean_rff_exact));
    line("max_abs_mean_gap", format_g9(s.max_abs_mean_gap));
    line("max_abs_var_gap", format_g9(s.max_abs_var_gap));
    line("shots_used", s.shots_used.to_string());
    line("shots_rejected", s.shots_rejected.to_string());
    line("seconds_exact", format!("{:.6}", s.timings.exact));
    line("seconds_rff", format!("{:.6}", s.timings.rff));
    line("seconds_quantum_setup", format!("{:.6}", s.timings.quantum_setup));
    line("seconds_quantum_queries", format!("{:.6}", s.timings.quantum_queries));
    out
}

/// `x,mean,var` table of a classical stage.
pub fn posterior_csv(points: &[Vec<f64>], posts: &[Posterior]) -> String {
    let mut out = String::from("x,mean,var\n");
    for (x, p) in points.iter().zip(posts) {
        let _ = writeln!(out, "{},{},{}", format_x(x), format_g9(p.mean), format_g9(p.variance));
    }
    out
}

/// `x,mean,var,p1,p2` table of the quantum stage.
pub fn quantum_csv(points: &[Vec<f64>], est: &[PosteriorEstimate]) -> String {
    let mut out = String::from("x,mean,var,p1,p2\n");
    for (x, e) in points.iter().zip(est) {
        let fields = [
            format_x(x),
            format_g9(e.mean),
            format_g9(e.variance),
            format_g9(e.p1),
            format_g9(e.p2),
        ];
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

/// Paths written by [`emit_outputs`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFiles {
    pub results: PathBuf,
    pub summary: PathBuf,
    pub plot: PathBuf,
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Write `results.csv`, `summary.txt` and `plot.dat` into `dir`, creating it
/// if needed.
pub fn emit_outputs(report: &ComparisonReport, cfg: &RunConfig, dir: &Path) -> Result<OutputFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = OutputFiles {
        results: dir.join("results.csv"),
        summary: dir.join("summary.txt"),
        plot: dir.join("plot.dat"),
    };
    write_file(&files.results, &results_csv(report))?;
    write_file(&files.summary, &summary_text(report, cfg))?;
    write_file(&files.plot, &plot_data(report))?;
    Ok(files)
}
