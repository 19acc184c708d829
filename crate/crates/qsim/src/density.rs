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

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result, Statevector, C64, TOL};

/// Reduced state of a register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
    n_qubits: usize,
}

pub(crate) fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

impl DensityOperator {
    /// Validates hermiticity, unit trace and positivity (all to `TOL`).
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.ncols(),
            });
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TOL || trace.im.abs() > TOL {
            return Err(Error::InvalidArgument(format!("density operator trace {trace} != 1")));
        }
        let rho = DensityOperator {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        };
        let min = rho.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -TOL {
            return Err(Error::InvalidArgument(format!(
                "density operator has eigenvalue {min:.3e} < 0"
            )));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// Trace out everything except register `keep`.
pub fn partial_trace(sv: &Statevector, keep: &str) -> Result<DensityOperator> {
    let reg = sv.layout().get(keep)?.clone();
    let dim = reg.dim();
    let rest = sv.dim() / dim;
    let low_mask = (1usize << reg.offset) - 1;
    // Column `k` of `a` holds the keep-register amplitudes for environment index `k`.
    let mut a = DMatrix::<C64>::zeros(dim, rest);
    for (i, amp) in sv.amplitudes().iter().enumerate() {
        let env = (i & low_mask) | ((i >> (reg.offset + reg.width)) << reg.offset);
        a[(reg.value(i), env)] = *amp;
    }
    let mut rho = &a * a.adjoint();
    let tr = rho.trace().re;
    if tr > 0.0 {
        rho /= C64::new(tr, 0.0);
    }
    // Symmetrize away rounding so the hermiticity check is exact.
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    DensityOperator::new(rho)
}
