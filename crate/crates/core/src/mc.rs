//! Seeded, order-independent Monte Carlo averaging.
//!
//! Samples are split into fixed batches; batch `k` draws from a ChaCha8
//! generator seeded with the user seed and switched to stream `k`. Batch
//! sums are reduced in batch order, so results do not depend on how rayon
//! schedules the work.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::qcore::PureState;

/// Samples per independent stream.
pub const BATCH: usize = 10_000;

/// Generator identification recorded alongside results.
pub const GENERATOR: &str = "ChaCha8Rng(seed_from_u64(seed), stream = batch index, batch = 10000)";

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Distance from `target` in units of the standard error (infinite when
    /// the estimate is exact but differs).
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else if self.stderr == 0.0 {
            f64::INFINITY
        } else {
            d / self.stderr
        }
    }
}

/// Averages `draw` over `samples` draws.
pub fn estimate<F>(samples: usize, seed: u64, draw: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let batches = samples.div_ceil(BATCH);
    let partials: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let n = BATCH.min(samples - b * BATCH);
            (0..n).fold((0.0, 0.0), |(s, s2), _| {
                let x = draw(&mut rng);
                (s + x, s2 + x * x)
            })
        })
        .collect();
    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0, 0.0), |(s, s2), (a, b)| (s + a, s2 + b));
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    McEstimate {
        mean,
        stderr: (var / n).sqrt(),
        samples,
    }
}

/// Haar-uniform pure qubit state.
pub fn haar_qubit<R: Rng>(rng: &mut R) -> PureState {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    PureState::qubit(z.clamp(-1.0, 1.0).acos(), phi)
}

/// Samples an index from a discrete distribution whose weights sum to ~1.
pub fn sample_index<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}
