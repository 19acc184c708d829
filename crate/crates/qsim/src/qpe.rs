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

//! Quantum Fourier transform and phase estimation.

use std::f64::consts::PI;

use crate::gate::{Control, GateOp};
use crate::{Error, Result, Statevector, Unitary};

/// Supplies `U^{2^k}` for the controlled ladder of phase estimation.
pub trait PowerOracle {
    fn n_qubits(&self) -> usize;
    fn power_of_two(&self, k: u32) -> Unitary;
}

impl PowerOracle for Unitary {
    fn n_qubits(&self) -> usize {
        Unitary::n_qubits(self)
    }

    /// Repeated squaring.
    fn power_of_two(&self, k: u32) -> Unitary {
        let mut u = self.clone();
        for _ in 0..k {
            u = Unitary::new_unchecked(u.matrix() * u.matrix());
        }
        u
    }
}

/// Gate sequence for the exact QFT on `qubits` (little-endian),
/// `|x⟩ ↦ 2^{-n/2} Σ_y e^{2πi xy/2^n} |y⟩`.
pub(crate) fn qft_ops(qubits: &[usize]) -> Vec<GateOp> {
    let n = qubits.len();
    let mut ops = Vec::with_capacity(n * (n + 1) / 2 + n / 2);
    for i in (0..n).rev() {
        ops.push(GateOp::h(qubits[i]));
        for j in (0..i).rev() {
            let angle = PI / (1u64 << (i - j)) as f64;
            ops.push(GateOp::Single {
                gate: crate::SingleQubitGate::Phase(angle),
                target: qubits[i],
                controls: vec![Control::on(qubits[j])],
            });
        }
    }
    for k in 0..n / 2 {
        ops.push(GateOp::swap(qubits[k], qubits[n - 1 - k]));
    }
    ops
}

fn register_qubits(sv: &Statevector, name: &str) -> Result<Vec<usize>> {
    Ok(sv.layout().get(name)?.qubits().collect())
}

/// Exact QFT on register `reg`.
pub fn qft(sv: &mut Statevector, reg: &str) -> Result<()> {
    let ops = qft_ops(&register_qubits(sv, reg)?);
    sv.apply_all(&ops)
}

/// Exact inverse QFT on register `reg`.
pub fn inverse_qft(sv: &mut Statevector, reg: &str) -> Result<()> {
    let ops: Vec<GateOp> = qft_ops(&register_qubits(sv, reg)?)
        .iter()
        .rev()
        .map(GateOp::adjoint)
        .collect();
    sv.apply_all(&ops)
}

fn ladder(sv: &mut Statevector, oracle: &dyn PowerOracle, target: &str, phase_reg: &str, adjoint: bool) -> Result<()> {
    let targets = register_qubits(sv, target)?;
    let phase = register_qubits(sv, phase_reg)?;
    if oracle.n_qubits() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: 1 << targets.len(),
            actual: 1 << oracle.n_qubits(),
        });
    }
    for (k, &ctrl) in phase.iter().enumerate() {
        let mut u = oracle.power_of_two(k as u32);
        if adjoint {
            u = u.adjoint();
        }
        let op = GateOp::Unitary {
            unitary: u,
            targets: targets.clone(),
            controls: vec![Control::on(ctrl)],
        };
        sv.apply(&op)?;
    }
    Ok(())
}

/// Phase estimation into an existing `|0…0⟩` register `phase_reg`.
///
/// For `U|v⟩ = e^{2πiφ}|v⟩` the phase register ends peaked at `round(φ·2^τ)`.
pub fn qpe_on(sv: &mut Statevector, oracle: &dyn PowerOracle, target: &str, phase_reg: &str) -> Result<()> {
    for q in register_qubits(sv, phase_reg)? {
        sv.apply(&GateOp::h(q))?;
    }
    ladder(sv, oracle, target, phase_reg, false)?;
    inverse_qft(sv, phase_reg)
}

/// Exact inverse of [`qpe_on`].
pub fn inverse_qpe(sv: &mut Statevector, oracle: &dyn PowerOracle, target: &str, phase_reg: &str) -> Result<()> {
    qft(sv, phase_reg)?;
    ladder(sv, oracle, target, phase_reg, true)?;
    for q in register_qubits(sv, phase_reg)? {
        sv.apply(&GateOp::h(q))?;
    }
    Ok(())
}

/// Append a `tau`-qubit register named `phase` and run phase estimation of
/// `unitary` acting on register `target`.
pub fn qpe(mut sv: Statevector, unitary: &Unitary, target: &str, tau: usize) -> Result<Statevector> {
    if tau == 0 {
        return Err(Error::InvalidArgument("phase register needs at least one qubit".into()));
    }
    sv.append_register("phase", tau)?;
    qpe_on(&mut sv, unitary, target, "phase")?;
    Ok(sv)
}
