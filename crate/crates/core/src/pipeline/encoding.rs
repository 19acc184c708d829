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

use qrff_qsim::{Circuit, Control, GateOp, RegisterLayout, Statevector};

use super::{qubits_for, COL_REG, ROW_REG};
use crate::rff::FeatureModel;
use crate::{Error, Result};

/// One multi-controlled `Ry(θ)` of the loading circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledRotation {
    pub row: usize,
    pub frequency: usize,
    /// Little-endian value of (frequency-index bits of `m`, then `j` bits).
    pub control_pattern: usize,
    /// `2π s_rᵀx_j`
    pub theta: f64,
}

/// Register sizes and rotation schedule for loading the design matrix.
///
/// The lowest qubit of the column register is the rotation target and holds
/// the cos/sin choice; its higher qubits index the frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingPlan {
    pub n_rows: usize,
    pub n_frequencies: usize,
    pub n_row_qubits: usize,
    pub n_col_qubits: usize,
    pub schedule: Vec<ScheduledRotation>,
    pub frobenius_norm: f64,
}

pub fn plan_encoding(fm: &FeatureModel) -> Result<EncodingPlan> {
    let (n, m) = (fm.n_rows(), fm.n_frequencies());
    if n * m == 0 {
        return Err(Error::Domain("nothing to encode".into()));
    }
    let n_col_qubits = qubits_for(2 * m);
    let n_row_qubits = qubits_for(n);
    let freq_bits = n_col_qubits - 1;
    let mut schedule = Vec::with_capacity(n * m);
    for (j, x) in fm.inputs().iter().enumerate() {
        for (r, s) in fm.frequencies().frequencies().iter().enumerate() {
            let phase: f64 = s.iter().zip(x).map(|(a, b)| a * b).sum();
            schedule.push(ScheduledRotation {
                row: j,
                frequency: r,
                control_pattern: r | (j << freq_bits),
                theta: 2.0 * PI * phase,
            });
        }
    }
    Ok(EncodingPlan {
        n_rows: n,
        n_frequencies: m,
        n_row_qubits,
        n_col_qubits,
        schedule,
        frobenius_norm: fm.frobenius_norm(),
    })
}

/// Gates preparing the uniform superposition over the first `count` values of
/// the register made of `qubits` (little-endian), from `|0…0⟩`.
///
/// Full power-of-two registers get plain Hadamards; otherwise a binary tree of
/// controlled rotations splits the amplitude by the number of valid leaves.
pub(crate) fn uniform_prep_ops(qubits: &[usize], count: usize) -> Vec<GateOp> {
    let mut ops = Vec::new();
    if qubits.is_empty() {
        return ops;
    }
    uniform_subtree(qubits, qubits.len(), 0, count, &mut ops);
    ops
}

/// Subtree over `qubits[..level]` reached when the higher qubits equal `prefix`.
fn uniform_subtree(qubits: &[usize], level: usize, prefix: usize, count: usize, ops: &mut Vec<GateOp>) {
    if level == 0 || count == 0 {
        return;
    }
    let controls = Control::pattern(&qubits[level..], prefix);
    if count == 1 << level {
        for &q in &qubits[..level] {
            ops.push(GateOp::Single {
                gate: qrff_qsim::SingleQubitGate::H,
                target: q,
                controls: controls.clone(),
            });
        }
        return;
    }
    let half = 1 << (level - 1);
    let upper = count.saturating_sub(half);
    let lower = count - upper;
    if upper > 0 {
        let theta = (upper as f64 / count as f64).sqrt().asin();
        ops.push(GateOp::mcry(controls, qubits[level - 1], theta));
    }
    uniform_subtree(qubits, level - 1, prefix << 1, lower, ops);
    uniform_subtree(qubits, level - 1, (prefix << 1) | 1, upper, ops);
}

impl EncodingPlan {
    pub fn layout(&self) -> RegisterLayout {
        RegisterLayout::from_widths(&[(COL_REG, self.n_col_qubits), (ROW_REG, self.n_row_qubits)])
            .expect("distinct register names")
    }

    /// The full loading circuit.
    pub fn circuit(&self) -> Result<Circuit> {
        let mut circuit = Circuit::new(self.layout());
        let target = 0;
        let freq_qubits: Vec<usize> = (1..self.n_col_qubits).collect();
        let row_qubits: Vec<usize> = (self.n_col_qubits..self.n_col_qubits + self.n_row_qubits).collect();
        for op in uniform_prep_ops(&freq_qubits, self.n_frequencies) {
            circuit.push(op)?;
        }
        for op in uniform_prep_ops(&row_qubits, self.n_rows) {
            circuit.push(op)?;
        }
        let controls: Vec<usize> = freq_qubits.iter().chain(&row_qubits).copied().collect();
        for rot in &self.schedule {
            circuit.push(GateOp::mcry(
                Control::pattern(&controls, rot.control_pattern),
                target,
                rot.theta,
            ))?;
        }
        Ok(circuit)
    }
}

/// Run the loading circuit. Amplitude `(m, j)` equals `X[j, m]/‖X‖_F`.
pub fn prepare_data_state(plan: &EncodingPlan) -> Result<Statevector> {
    Ok(plan.circuit()?.run()?)
}
