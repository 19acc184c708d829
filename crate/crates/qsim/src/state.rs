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

use crate::gate::GateOp;
use crate::register::RegisterLayout;
use crate::{Error, Result, C64, MAX_QUBITS, TOL};

/// Smallest branch probability post-selection will renormalize.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-12;

/// Dense pure state over a named register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amps: Vec<C64>,
    layout: RegisterLayout,
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        Err(Error::Capacity {
            requested: n,
            max: MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

impl Statevector {
    /// `|0…0⟩` over `layout`.
    pub fn new(layout: RegisterLayout) -> Result<Self> {
        let n = layout.n_qubits();
        check_capacity(n)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Statevector { amps, layout })
    }

    /// Wrap explicit amplitudes. They must already be normalized.
    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<C64>) -> Result<Self> {
        let n = layout.n_qubits();
        check_capacity(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: amps.len(),
            });
        }
        let sv = Statevector { amps, layout };
        let norm_sqr = sv.norm_sqr();
        if (norm_sqr - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(sv)
    }

    /// Real amplitudes scaled to unit norm. Shorter inputs are zero-padded.
    pub fn from_real_normalized(layout: RegisterLayout, values: &[f64]) -> Result<Self> {
        let n = layout.n_qubits();
        check_capacity(n)?;
        let dim = 1usize << n;
        if values.len() > dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: values.len(),
            });
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        for (a, v) in amps.iter_mut().zip(values) {
            *a = C64::new(v / norm, 0.0);
        }
        Ok(Statevector { amps, layout })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.n_qubits()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.n_qubits())?;
        op.apply_to(&mut self.amps);
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, ops: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        for op in ops {
            self.apply(op)?;
        }
        Ok(())
    }

    /// Append a fresh `|0…0⟩` register above all existing qubits.
    pub fn append_register(&mut self, name: &str, width: usize) -> Result<()> {
        check_capacity(self.n_qubits() + width)?;
        self.layout.push(name, width)?;
        self.amps.resize(1 << self.layout.n_qubits(), C64::new(0.0, 0.0));
        Ok(())
    }

    /// `self ⊗ other`, with `other`'s registers placed above `self`'s.
    pub fn tensor(&self, other: &Statevector) -> Result<Statevector> {
        let mut layout = self.layout.clone();
        for r in other.layout.registers() {
            layout.push(&r.name, r.width)?;
        }
        check_capacity(layout.n_qubits())?;
        let low = self.dim();
        let mut amps = vec![C64::new(0.0, 0.0); low * other.dim()];
        for (h, b) in other.amps.iter().enumerate() {
            for (l, a) in self.amps.iter().enumerate() {
                amps[h * low + l] = a * b;
            }
        }
        Ok(Statevector { amps, layout })
    }

    /// Born probabilities of each value of register `name`.
    pub fn register_probabilities(&self, name: &str) -> Result<Vec<f64>> {
        let reg = self.layout.get(name)?;
        let mut probs = vec![0.0; reg.dim()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[reg.value(i)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Probability of finding `qubit` in `outcome`.
    pub fn qubit_probability(&self, qubit: usize, outcome: bool) -> Result<f64> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        let want = if outcome { bit } else { 0 };
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Project `qubit` onto `outcome` and renormalize. Returns the branch probability.
    pub fn postselect(&mut self, qubit: usize, outcome: bool) -> Result<f64> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        let want = if outcome { bit } else { 0 };
        self.project(|i| i & bit == want)
    }

    /// Project register `name` onto basis value `value` and renormalize.
    pub fn postselect_register(&mut self, name: &str, value: usize) -> Result<f64> {
        let reg = self.layout.get(name)?.clone();
        if value >= reg.dim() {
            return Err(Error::InvalidArgument(format!(
                "value {value} does not fit register `{name}`"
            )));
        }
        self.project(|i| reg.value(i) == value)
    }

    fn project(&mut self, keep: impl Fn(usize) -> bool) -> Result<f64> {
        let mut p = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if keep(i) {
                p += a.norm_sqr();
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        if p <= MIN_BRANCH_PROBABILITY {
            return Err(Error::PostSelection { probability: p });
        }
        let scale = 1.0 / p.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(p)
    }

    /// Drop a register that is in a computational basis state, returning its value.
    pub fn remove_register(&mut self, name: &str) -> Result<usize> {
        let probs = self.register_probabilities(name)?;
        let (value, p) = probs
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, 0.0));
        if (p - 1.0).abs() > TOL {
            return Err(Error::NotBasisState {
                register: name.to_string(),
            });
        }
        let reg = self.layout.remove(name)?;
        let low_mask = (1usize << reg.offset) - 1;
        let new_dim = 1usize << self.layout.n_qubits();
        let amps = (0..new_dim)
            .map(|k| {
                let low = k & low_mask;
                let high = (k >> reg.offset) << (reg.offset + reg.width);
                self.amps[high | (value << reg.offset) | low]
            })
            .collect();
        self.amps = amps;
        Ok(value)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Statevector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &Statevector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits() {
            Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits(),
            })
        } else {
            Ok(())
        }
    }
}
