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

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};

use crate::{Error, Result, Statevector};

pub type ShotRng = ChaCha20Rng;

/// Independent RNG stream `stream` of base seed `seed`.
pub fn shot_rng(seed: u64, stream: u64) -> ShotRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Outcome counts of a register measurement, keyed by register value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub register: String,
    pub shots: u64,
    pub counts: BTreeMap<usize, u64>,
}

impl Histogram {
    pub fn count(&self, outcome: usize) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }
}

/// One binomial draw, `k ~ B(n, p)`.
pub fn binomial(rng: &mut ShotRng, n: u64, p: f64) -> u64 {
    let p = p.clamp(0.0, 1.0);
    if n == 0 || p == 0.0 {
        return 0;
    }
    if p == 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("probability clamped to [0, 1]").sample(rng)
}

/// Multinomial counts via sequential conditional binomials.
pub(crate) fn multinomial(rng: &mut ShotRng, shots: u64, probs: &[f64]) -> Vec<u64> {
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().sum();
    let mut out = Vec::with_capacity(probs.len());
    for &p in probs {
        if remaining == 0 || mass <= 0.0 {
            out.push(0);
            continue;
        }
        let k = binomial(rng, remaining, p / mass);
        out.push(k);
        remaining -= k;
        mass -= p;
    }
    // rounding can leave a few shots unassigned; give them to the last nonzero outcome
    if remaining > 0 {
        if let Some(i) = probs.iter().rposition(|&p| p > 0.0) {
            out[i] += remaining;
        }
    }
    out
}

/// Sample `shots` outcomes of register `reg` from its Born marginal.
pub fn measure_register(sv: &Statevector, reg: &str, shots: u64, seed: u64) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    let probs = sv.register_probabilities(reg)?;
    let mut rng = shot_rng(seed, 0);
    let counts = multinomial(&mut rng, shots, &probs)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .collect();
    Ok(Histogram {
        register: reg.to_string(),
        shots,
        counts,
    })
}
