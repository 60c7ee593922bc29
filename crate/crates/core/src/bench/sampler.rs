use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::BenchError;

/// Seeded stream of section lengths in microseconds, uniform on `[low, high)`.
///
/// A degenerate interval (`low == high`) yields `low` forever.
#[derive(Clone, Debug)]
pub struct WorkloadSampler {
    rng: ChaCha8Rng,
    dist: Option<Uniform<f64>>,
    low: f64,
}

impl WorkloadSampler {
    pub fn new(seed: u64, low: f64, high: f64) -> Result<Self, BenchError> {
        if !(low.is_finite() && high.is_finite()) || low < 0.0 || low > high {
            return Err(BenchError::BadInterval { low, high });
        }
        Ok(WorkloadSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dist: (low < high).then(|| Uniform::new(low, high)),
            low,
        })
    }
}

impl Iterator for WorkloadSampler {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(match &self.dist {
            Some(d) => d.sample(&mut self.rng),
            None => self.low,
        })
    }
}

/// Seed of worker `index`'s stream `stream`, decorrelated from its neighbours.
pub fn thread_seed(seed: u64, index: usize, stream: u64) -> u64 {
    // splitmix64 finalizer over the worker coordinates
    let mut z = (index as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    seed ^ (z ^ (z >> 31))
}
