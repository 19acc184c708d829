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

use crate::{Error, Result};

/// A named, contiguous block of qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

impl Register {
    /// Mask of this register's bits within a global basis index.
    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.offset
    }

    /// Value of the register in global basis index `index`.
    pub fn value(&self, index: usize) -> usize {
        (index >> self.offset) & ((1usize << self.width) - 1)
    }

    pub fn qubits(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.width
    }

    pub fn dim(&self) -> usize {
        1 << self.width
    }
}

/// Ordered register map. Registers occupy increasing qubit indices in the
/// order they were declared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegisterLayout {
    regs: Vec<Register>,
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build a layout from `(name, width)` pairs.
    pub fn from_widths<S: AsRef<str>>(widths: &[(S, usize)]) -> Result<Self> {
        let mut layout = Self::new();
        for (name, width) in widths {
            layout.push(name.as_ref(), *width)?;
        }
        Ok(layout)
    }

    /// Append a register at the high end of the qubit range.
    pub fn push(&mut self, name: &str, width: usize) -> Result<&Register> {
        if self.regs.iter().any(|r| r.name == name) {
            return Err(Error::DuplicateRegister(name.to_string()));
        }
        let offset = self.n_qubits();
        self.regs.push(Register {
            name: name.to_string(),
            offset,
            width,
        });
        Ok(self.regs.last().unwrap())
    }

    pub fn n_qubits(&self) -> usize {
        self.regs.iter().map(|r| r.width).sum()
    }

    pub fn get(&self, name: &str) -> Result<&Register> {
        self.regs
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn registers(&self) -> &[Register] {
        &self.regs
    }

    /// Remove a register and shift the registers above it down.
    pub(crate) fn remove(&mut self, name: &str) -> Result<Register> {
        let pos = self
            .regs
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))?;
        let removed = self.regs.remove(pos);
        for r in &mut self.regs[pos..] {
            r.offset -= removed.width;
        }
        Ok(removed)
    }
}
