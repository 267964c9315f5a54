//! Seeded synthetic instances.
//!
//! Every draw comes from ChaCha8 seeded with the instance seed, on a fixed
//! stream per stage: 0 for `h`, 1 for `c`, 2 for Ω, 3 for Ω_E. A stage never
//! consumes randomness from another stage's stream.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Entry, GroundTruth, Haplotype, ReadMatrix, Sign};

const STREAM_H: u64 = 0;
const STREAM_C: u64 = 1;
const STREAM_OMEGA: u64 = 2;
const STREAM_ERRORS: u64 = 3;

/// Attempts (seed, seed+1, …) before giving up on an empty Ω.
pub const MAX_ATTEMPTS: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub m: usize,
    pub n: usize,
    /// Per-entry observation probability.
    pub pd: f64,
    /// `|Ω_E| / |Ω|`.
    pub err_ratio: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidSpec(format!(
                "dimensions {}x{} must be positive",
                self.m, self.n
            )));
        }
        if !(self.pd > 0.0 && self.pd <= 1.0) {
            return Err(Error::InvalidSpec(format!("pd = {} must lie in (0, 1]", self.pd)));
        }
        if !(self.err_ratio >= 0.0 && self.err_ratio < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "err_ratio = {} must lie in [0, 1)",
                self.err_ratio
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub gt: GroundTruth,
    pub rm: ReadMatrix,
    /// Flipped entries, sorted row-major.
    pub omega_e: Vec<(usize, usize)>,
    /// Seed actually used; differs from the requested seed only after an empty Ω.
    pub seed: u64,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn signs(rng: &mut ChaCha8Rng, len: usize) -> Vec<Sign> {
    (0..len)
        .map(|_| if rng.random::<bool>() { Sign::Plus } else { Sign::Minus })
        .collect()
}

pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    spec.validate()?;
    for attempt in 0..MAX_ATTEMPTS {
        let seed = spec.seed.wrapping_add(attempt as u64);
        if let Some(instance) = generate_with_seed(spec, seed)? {
            return Ok(instance);
        }
    }
    Err(Error::EmptyObservation { attempts: MAX_ATTEMPTS })
}

fn generate_with_seed(spec: &InstanceSpec, seed: u64) -> Result<Option<Instance>> {
    let h = Haplotype::new(signs(&mut stream(seed, STREAM_H), spec.n));
    let c = signs(&mut stream(seed, STREAM_C), spec.m);
    let gt = GroundTruth::new(h, c);

    let mut rng = stream(seed, STREAM_OMEGA);
    let mut omega = Vec::new();
    for i in 0..spec.m {
        for j in 0..spec.n {
            if rng.random_bool(spec.pd) {
                omega.push((i, j));
            }
        }
    }
    if omega.is_empty() {
        return Ok(None);
    }

    let n_err = (spec.err_ratio * omega.len() as f64).round() as usize;
    let mut flipped = index::sample(&mut stream(seed, STREAM_ERRORS), omega.len(), n_err).into_vec();
    flipped.sort_unstable();

    let mut entries: Vec<Entry> = omega
        .iter()
        .map(|&(row, col)| Entry {
            row,
            col,
            value: gt.value(row, col),
        })
        .collect();
    for &k in &flipped {
        entries[k].value = entries[k].value.flip();
    }
    let omega_e = flipped.iter().map(|&k| omega[k]).collect();
    let rm = ReadMatrix::new(spec.m, spec.n, entries)?;
    Ok(Some(Instance { gt, rm, omega_e, seed }))
}
