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

//! Hadamard and SWAP tests.
//!
//! Both tests treat their state preparations as black-box oracles: the
//! controlled preparation is realized by building the ancilla-branched state
//! directly from the prepared amplitudes, then the remaining gates of the test
//! circuit are applied and the ancilla is read out.

use crate::gate::{Control, GateOp};
use crate::measure::{binomial, shot_rng};
use crate::{Error, RegisterLayout, Result, StatePrep, Statevector, C64};

/// How an ancilla readout probability is turned into an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Exact expectation from amplitudes.
    Exact,
    /// `shots` binomial draws from RNG stream `stream` of `seed`.
    Shots { shots: u64, seed: u64, stream: u64 },
}

impl Sampling {
    /// `shots == 0` means exact expectation.
    pub fn from_shots(shots: u64, seed: u64, stream: u64) -> Self {
        if shots == 0 {
            Sampling::Exact
        } else {
            Sampling::Shots { shots, seed, stream }
        }
    }

    fn estimate_p0(&self, p0: f64) -> f64 {
        match *self {
            Sampling::Exact => p0,
            Sampling::Shots { shots, seed, stream } => {
                let mut rng = shot_rng(seed, stream);
                binomial(&mut rng, shots, p0) as f64 / shots as f64
            }
        }
    }
}

/// Flatten all registers of `sv` into a single register `name`.
fn as_single_register(sv: &Statevector, name: &str) -> Result<Statevector> {
    let layout = RegisterLayout::from_widths(&[(name, sv.n_qubits())])?;
    Statevector::from_amplitudes(layout, sv.amplitudes().to_vec())
}

/// Estimate `Re⟨ψ_b|ψ_a⟩`.
///
/// Circuit: `H` on the ancilla, prepare `ψ_b` controlled on ancilla `0` and
/// `ψ_a` controlled on ancilla `1`, `H` on the ancilla. Then
/// `P(0) = (1 + Re⟨ψ_b|ψ_a⟩)/2`.
pub fn hadamard_test(prep_a: &dyn StatePrep, prep_b: &dyn StatePrep, sampling: Sampling) -> Result<f64> {
    let a = prep_a.prepare()?;
    let b = prep_b.prepare()?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let layout = RegisterLayout::from_widths(&[("anc", 1), ("sys", a.n_qubits())])?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); 2 * a.dim()];
    for k in 0..a.dim() {
        amps[2 * k] = b.amplitudes()[k] * s;
        amps[2 * k + 1] = a.amplitudes()[k] * s;
    }
    let mut joint = Statevector::from_amplitudes(layout, amps)?;
    joint.apply(&GateOp::h(0))?;
    let p0 = joint.qubit_probability(0, false)?;
    Ok(2.0 * sampling.estimate_p0(p0) - 1.0)
}

/// Result of a SWAP test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapTestOutcome {
    /// `2·P̂(0) - 1` before clamping; may be slightly negative under sampling.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub overlap_sqr: f64,
}

/// SWAP test between register `a_register` of `a` and the whole of `b`.
///
/// The other registers of `a` are left alone, so the test estimates
/// `⟨b|ρ_a|b⟩` with `ρ_a` the reduced state of `a_register`.
pub fn swap_test_marginal(
    a: &Statevector,
    a_register: &str,
    b: &Statevector,
    sampling: Sampling,
) -> Result<SwapTestOutcome> {
    let reg = a.layout().get(a_register)?.clone();
    if reg.width != b.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: reg.dim(),
            actual: b.dim(),
        });
    }
    let anc = Statevector::new(RegisterLayout::from_widths(&[("anc", 1)])?)?;
    let joint = anc
        .tensor(&as_single_register(a, "a")?)?
        .tensor(&as_single_register(b, "b")?)?;
    let mut joint = joint;
    let a_base = 1 + reg.offset;
    let b_base = 1 + a.n_qubits();
    joint.apply(&GateOp::h(0))?;
    for k in 0..reg.width {
        joint.apply(&GateOp::Swap {
            a: a_base + k,
            b: b_base + k,
            controls: vec![Control::on(0)],
        })?;
    }
    joint.apply(&GateOp::h(0))?;
    let p0 = joint.qubit_probability(0, false)?;
    let raw = 2.0 * sampling.estimate_p0(p0) - 1.0;
    Ok(SwapTestOutcome {
        raw,
        overlap_sqr: raw.clamp(0.0, 1.0),
    })
}

/// Estimate `|⟨ψ_a|ψ_b⟩|²`, clamped to `[0, 1]`.
pub fn swap_test(prep_a: &dyn StatePrep, prep_b: &dyn StatePrep, sampling: Sampling) -> Result<f64> {
    let a = as_single_register(&prep_a.prepare()?, "a")?;
    let b = prep_b.prepare()?;
    Ok(swap_test_marginal(&a, "a", &b, sampling)?.overlap_sqr)
}
