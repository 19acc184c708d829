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

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::density::hermiticity_deviation;
use crate::{DensityOperator, Error, Result, Unitary, C64, TOL};

/// Eigendecomposition of a Hermitian generator, reused to build `e^{-iHt}` for
/// many `t`.
#[derive(Debug, Clone)]
pub struct HermitianEvolution {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl HermitianEvolution {
    pub fn new(h: &DMatrix<C64>) -> Result<Self> {
        if h.nrows() != h.ncols() || !h.nrows().is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: h.nrows(),
                actual: h.ncols(),
            });
        }
        let deviation = hermiticity_deviation(h);
        if deviation > TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let eig = SymmetricEigen::new(h.clone());
        Ok(HermitianEvolution {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    /// `e^{-iHt}`
    pub fn unitary(&self, t: f64) -> Unitary {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let phase = C64::from_polar(1.0, -lambda * t);
            for i in 0..scaled.nrows() {
                scaled[(i, k)] *= phase;
            }
        }
        Unitary::new_unchecked(scaled * v.adjoint())
    }
}

/// `e^{-iρt}` by exact eigendecomposition.
pub fn hermitian_exponential_unitary(rho: &DensityOperator, t: f64) -> Result<Unitary> {
    Ok(HermitianEvolution::new(rho.matrix())?.unitary(t))
}
