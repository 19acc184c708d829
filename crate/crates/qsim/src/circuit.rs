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

use crate::{GateOp, RegisterLayout, Result, Statevector};

/// Anything that can produce a state from `|0…0⟩`.
pub trait StatePrep {
    fn prepare(&self) -> Result<Statevector>;
}

/// A gate list over a fixed register layout, run from `|0…0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    layout: RegisterLayout,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Circuit {
            layout,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.validate(self.layout.n_qubits())?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn run(&self) -> Result<Statevector> {
        let mut sv = Statevector::new(self.layout.clone())?;
        sv.apply_all(&self.ops)?;
        Ok(sv)
    }
}

impl StatePrep for Circuit {
    fn prepare(&self) -> Result<Statevector> {
        self.run()
    }
}

/// A precomputed state acts as its own preparation oracle.
impl StatePrep for Statevector {
    fn prepare(&self) -> Result<Statevector> {
        Ok(self.clone())
    }
}
