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

use nalgebra::DMatrix;

use crate::{Error, Result, C64, TOL};

/// Fixed single-qubit gates.
///
/// `Ry` uses the full-angle convention `[[cos θ, -sin θ], [sin θ, cos θ]]`, so
/// `Ry(θ)|0⟩ = cos θ|0⟩ + sin θ|1⟩`. In half-angle terms this is the usual
/// `RY(2θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleQubitGate {
    H,
    X,
    Ry(f64),
    /// `diag(1, e^{iφ})`
    Phase(f64),
}

impl SingleQubitGate {
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        match *self {
            SingleQubitGate::H => {
                let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[s, s], [s, -s]]
            }
            SingleQubitGate::X => [[z, one], [one, z]],
            SingleQubitGate::Ry(theta) => {
                let (s, c) = theta.sin_cos();
                [
                    [C64::new(c, 0.0), C64::new(-s, 0.0)],
                    [C64::new(s, 0.0), C64::new(c, 0.0)],
                ]
            }
            SingleQubitGate::Phase(phi) => [[one, z], [z, C64::from_polar(1.0, phi)]],
        }
    }

    pub fn adjoint(&self) -> Self {
        match *self {
            SingleQubitGate::Ry(t) => SingleQubitGate::Ry(-t),
            SingleQubitGate::Phase(p) => SingleQubitGate::Phase(-p),
            g => g,
        }
    }
}

/// A control condition: the gate fires only when `qubit` equals `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control { qubit, value: true }
    }

    pub fn off(qubit: usize) -> Self {
        Control { qubit, value: false }
    }

    /// Controls matching `pattern` on `qubits`, little-endian: bit `k` of
    /// `pattern` is the required value of `qubits[k]`.
    pub fn pattern(qubits: &[usize], pattern: usize) -> Vec<Control> {
        qubits
            .iter()
            .enumerate()
            .map(|(k, &q)| Control {
                qubit: q,
                value: (pattern >> k) & 1 == 1,
            })
            .collect()
    }
}

/// A square matrix checked to be unitary at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: DMatrix<C64>,
    n_qubits: usize,
}

impl Unitary {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two(),
                actual: matrix.ncols(),
            });
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Unitary {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    /// Skips the unitarity check. Callers guarantee unitarity by construction.
    pub(crate) fn new_unchecked(matrix: DMatrix<C64>) -> Self {
        let n_qubits = matrix.nrows().trailing_zeros() as usize;
        Unitary { matrix, n_qubits }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Unitary::new_unchecked(DMatrix::identity(1 << n_qubits, 1 << n_qubits))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Unitary::new_unchecked(self.matrix.adjoint())
    }

    /// `self · other`
    pub fn compose(&self, other: &Unitary) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(Unitary::new_unchecked(&self.matrix * &other.matrix))
    }

    pub fn deviation_from_unitary(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }
}

/// `max |U†U - I|` over entries.
pub fn unitarity_deviation(m: &DMatrix<C64>) -> f64 {
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// A gate applied to specific qubits of a state.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    Single {
        gate: SingleQubitGate,
        target: usize,
        controls: Vec<Control>,
    },
    Swap {
        a: usize,
        b: usize,
        controls: Vec<Control>,
    },
    /// Arbitrary unitary; `targets[k]` carries weight `2^k` in the matrix index.
    Unitary {
        unitary: Unitary,
        targets: Vec<usize>,
        controls: Vec<Control>,
    },
    /// `Ry(angles[s])` on `target`, where `s` is the little-endian value of the
    /// `selector` qubits. Equivalent to one multi-controlled `Ry` per pattern.
    UniformlyControlledRy {
        selector: Vec<usize>,
        target: usize,
        angles: Vec<f64>,
    },
}

impl GateOp {
    pub fn h(target: usize) -> Self {
        GateOp::Single {
            gate: SingleQubitGate::H,
            target,
            controls: vec![],
        }
    }

    pub fn x(target: usize) -> Self {
        GateOp::Single {
            gate: SingleQubitGate::X,
            target,
            controls: vec![],
        }
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        GateOp::Single {
            gate: SingleQubitGate::Ry(theta),
            target,
            controls: vec![],
        }
    }

    pub fn phase(target: usize, phi: f64) -> Self {
        GateOp::Single {
            gate: SingleQubitGate::Phase(phi),
            target,
            controls: vec![],
        }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        GateOp::Swap { a, b, controls: vec![] }
    }

    pub fn unitary(unitary: Unitary, targets: Vec<usize>) -> Self {
        GateOp::Unitary {
            unitary,
            targets,
            controls: vec![],
        }
    }

    /// Multi-controlled `Ry(θ)` firing when `controls` match.
    pub fn mcry(controls: Vec<Control>, target: usize, theta: f64) -> Self {
        GateOp::Single {
            gate: SingleQubitGate::Ry(theta),
            target,
            controls,
        }
    }

    /// Add control conditions. Uniformly controlled rotations cannot take
    /// extra controls.
    pub fn controlled_by(mut self, extra: &[Control]) -> Result<Self> {
        match &mut self {
            GateOp::Single { controls, .. } | GateOp::Swap { controls, .. } | GateOp::Unitary { controls, .. } => {
                controls.extend_from_slice(extra)
            }
            GateOp::UniformlyControlledRy { .. } => {
                return Err(Error::InvalidGate(
                    "uniformly controlled rotation cannot take extra controls".into(),
                ))
            }
        }
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        match self {
            GateOp::Single { gate, target, controls } => GateOp::Single {
                gate: gate.adjoint(),
                target: *target,
                controls: controls.clone(),
            },
            GateOp::Swap { .. } => self.clone(),
            GateOp::Unitary {
                unitary,
                targets,
                controls,
            } => GateOp::Unitary {
                unitary: unitary.adjoint(),
                targets: targets.clone(),
                controls: controls.clone(),
            },
            GateOp::UniformlyControlledRy {
                selector,
                target,
                angles,
            } => GateOp::UniformlyControlledRy {
                selector: selector.clone(),
                target: *target,
                angles: angles.iter().map(|a| -a).collect(),
            },
        }
    }

    /// All qubits touched, targets first, then controls.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::Single { target, controls, .. } => std::iter::once(*target)
                .chain(controls.iter().map(|c| c.qubit))
                .collect(),
            GateOp::Swap { a, b, controls } => [*a, *b].into_iter().chain(controls.iter().map(|c| c.qubit)).collect(),
            GateOp::Unitary { targets, controls, .. } => targets
                .iter()
                .copied()
                .chain(controls.iter().map(|c| c.qubit))
                .collect(),
            GateOp::UniformlyControlledRy { selector, target, .. } => {
                std::iter::once(*target).chain(selector.iter().copied()).collect()
            }
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        for &q in &qubits {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        let mut sorted = qubits.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qubits.len() {
            return Err(Error::InvalidGate(format!("repeated qubit in {qubits:?}")));
        }
        match self {
            GateOp::Unitary { unitary, targets, .. } if unitary.n_qubits() != targets.len() => {
                Err(Error::DimensionMismatch {
                    expected: 1 << targets.len(),
                    actual: unitary.dim(),
                })
            }
            GateOp::UniformlyControlledRy { selector, angles, .. } if angles.len() != 1 << selector.len() => {
                Err(Error::DimensionMismatch {
                    expected: 1 << selector.len(),
                    actual: angles.len(),
                })
            }
            _ => Ok(()),
        }
    }

    /// Dense matrix realized on the gate's own qubits, ordered as in
    /// [`GateOp::qubits`] (first qubit = least significant bit).
    pub fn local_matrix(&self) -> DMatrix<C64> {
        let qubits = self.qubits();
        let k = qubits.len();
        let relabel = |q: usize| qubits.iter().position(|&x| x == q).unwrap();
        let local = self.relabeled(&relabel);
        let dim = 1 << k;
        let mut out = DMatrix::zeros(dim, dim);
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for j in 0..dim {
            col.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            local.apply_to(&mut col);
            for i in 0..dim {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    fn relabeled(&self, f: &dyn Fn(usize) -> usize) -> GateOp {
        let cs = |cs: &[Control]| {
            cs.iter()
                .map(|c| Control {
                    qubit: f(c.qubit),
                    value: c.value,
                })
                .collect()
        };
        match self {
            GateOp::Single { gate, target, controls } => GateOp::Single {
                gate: *gate,
                target: f(*target),
                controls: cs(controls),
            },
            GateOp::Swap { a, b, controls } => GateOp::Swap {
                a: f(*a),
                b: f(*b),
                controls: cs(controls),
            },
            GateOp::Unitary {
                unitary,
                targets,
                controls,
            } => GateOp::Unitary {
                unitary: unitary.clone(),
                targets: targets.iter().map(|&t| f(t)).collect(),
                controls: cs(controls),
            },
            GateOp::UniformlyControlledRy {
                selector,
                target,
                angles,
            } => GateOp::UniformlyControlledRy {
                selector: selector.iter().map(|&s| f(s)).collect(),
                target: f(*target),
                angles: angles.clone(),
            },
        }
    }

    /// Apply to a raw amplitude buffer. The op must already be validated.
    pub(crate) fn apply_to(&self, amps: &mut [C64]) {
        match self {
            GateOp::Single { gate, target, controls } => {
                let m = gate.matrix();
                let t = 1usize << target;
                let (cmask, cval) = control_mask(controls);
                for i in 0..amps.len() {
                    if i & t != 0 || i & cmask != cval {
                        continue;
                    }
                    let (a, b) = (amps[i], amps[i | t]);
                    amps[i] = m[0][0] * a + m[0][1] * b;
                    amps[i | t] = m[1][0] * a + m[1][1] * b;
                }
            }
            GateOp::Swap { a, b, controls } => {
                let (ma, mb) = (1usize << a, 1usize << b);
                let (cmask, cval) = control_mask(controls);
                for i in 0..amps.len() {
                    if i & ma == 0 && i & mb != 0 && i & cmask == cval {
                        amps.swap(i, i ^ (ma | mb));
                    }
                }
            }
            GateOp::Unitary {
                unitary,
                targets,
                controls,
            } => {
                let (cmask, cval) = control_mask(controls);
                let tmask: usize = targets.iter().map(|&t| 1usize << t).sum();
                let dim = unitary.dim();
                let offsets: Vec<usize> = (0..dim).map(|s| scatter_bits(s, targets)).collect();
                let m = unitary.matrix();
                let mut buf = vec![C64::new(0.0, 0.0); dim];
                for base in 0..amps.len() {
                    if base & tmask != 0 || base & cmask != cval {
                        continue;
                    }
                    for (k, off) in offsets.iter().enumerate() {
                        buf[k] = amps[base | off];
                    }
                    for (r, off) in offsets.iter().enumerate() {
                        let mut acc = C64::new(0.0, 0.0);
                        for (c, v) in buf.iter().enumerate() {
                            acc += m[(r, c)] * v;
                        }
                        amps[base | off] = acc;
                    }
                }
            }
            GateOp::UniformlyControlledRy {
                selector,
                target,
                angles,
            } => {
                let t = 1usize << target;
                let trig: Vec<(f64, f64)> = angles.iter().map(|a| a.sin_cos()).collect();
                for i in 0..amps.len() {
                    if i & t != 0 {
                        continue;
                    }
                    let (s, c) = trig[gather_bits(i, selector)];
                    let (a, b) = (amps[i], amps[i | t]);
                    amps[i] = a * c - b * s;
                    amps[i | t] = a * s + b * c;
                }
            }
        }
    }
}

fn control_mask(controls: &[Control]) -> (usize, usize) {
    controls.iter().fold((0, 0), |(m, v), c| {
        let bit = 1usize << c.qubit;
        (m | bit, if c.value { v | bit } else { v })
    })
}

/// Place bit `k` of `value` at qubit `qubits[k]`.
pub(crate) fn scatter_bits(value: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((value >> k) & 1) << q))
}

/// Inverse of [`scatter_bits`].
pub(crate) fn gather_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((index >> q) & 1) << k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn ry_follows_full_angle_convention() {
        let m = SingleQubitGate::Ry(PI / 3.0).matrix();
        assert!((m[0][0].re - 0.5).abs() < 1e-15);
        assert!((m[1][0].re - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((m[0][1].re + 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn non_unitary_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        assert!(matches!(Unitary::new(m), Err(Error::NotUnitary { .. })));
        let odd = DMatrix::from_element(3, 3, c(0.0));
        assert!(matches!(Unitary::new(odd), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn local_matrix_of_cnot() {
        let cnot = GateOp::x(0).controlled_by(&[Control::on(1)]).unwrap();
        let m = cnot.local_matrix();
        // qubit 0 is the target (lsb), qubit 1 the control
        let expected = [[1., 0., 0., 0.], [0., 1., 0., 0.], [0., 0., 0., 1.], [0., 0., 1., 0.]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[(i, j)], c(expected[i][j]));
            }
        }
    }

    #[test]
    fn validate_catches_bad_ops() {
        assert!(matches!(
            GateOp::h(3).validate(2),
            Err(Error::QubitOutOfRange { index: 3, .. })
        ));
        let dup = GateOp::x(0).controlled_by(&[Control::on(0)]).unwrap();
        assert!(matches!(dup.validate(2), Err(Error::InvalidGate(_))));
        let ucr = GateOp::UniformlyControlledRy {
            selector: vec![1, 2],
            target: 0,
            angles: vec![0.0; 3],
        };
        assert!(matches!(ucr.validate(3), Err(Error::DimensionMismatch { .. })));
        let u = GateOp::unitary(Unitary::identity(2), vec![0]);
        assert!(matches!(u.validate(3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn bit_scatter_gather_inverse() {
        let qubits = [4, 1, 6];
        for v in 0..8 {
            assert_eq!(gather_bits(scatter_bits(v, &qubits), &qubits), v);
        }
    }
}
