use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::RealError;
use crate::poly::{PolyMap, Rational};

/// Samples per shard. Shard `s` draws from its own stream seeded `seed + s`,
/// so the output does not depend on how many workers run.
pub const SHARD_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: usize,
    #[serde(skip)]
    pub bounds: Vec<(Rational, Rational)>,
    /// Exponents `b_i` of the density `Π |x_i|^{b_i}`; uniform when absent.
    pub density_weights: Option<Vec<f64>>,
}

/// Per-axis sampler for the normalized law `∝ |x|^b` on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub b: f64,
    g_lo: f64,
    g_hi: f64,
}

fn antiderivative(x: f64, b: f64) -> f64 {
    x.signum() * x.abs().powf(b + 1.0) / (b + 1.0)
}

fn inverse_antiderivative(g: f64, b: f64) -> f64 {
    g.signum() * (g.abs() * (b + 1.0)).powf(1.0 / (b + 1.0))
}

impl Axis {
    pub(crate) fn new(lo: f64, hi: f64, b: f64) -> Result<Self, RealError> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(RealError::BadWeight(b));
        }
        let (g_lo, g_hi) = (antiderivative(lo, b), antiderivative(hi, b));
        if !(hi > lo) || !(g_hi > g_lo) {
            return Err(RealError::ZeroMassBox(lo, hi));
        }
        Ok(Axis {
            lo,
            hi,
            b,
            g_lo,
            g_hi,
        })
    }

    pub(crate) fn draw(&self, u: f64) -> f64 {
        if self.b == 0.0 {
            return self.lo + u * (self.hi - self.lo);
        }
        inverse_antiderivative(self.g_lo + u * (self.g_hi - self.g_lo), self.b)
            .clamp(self.lo, self.hi)
    }

    /// Normalized density at `x`.
    pub(crate) fn density(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        x.abs().powf(self.b) / (self.g_hi - self.g_lo)
    }
}

impl SampleConfig {
    /// Uniform measure on `[lo, hi]^n`.
    pub fn uniform_cube(n: usize, lo: Rational, hi: Rational, count: usize, seed: u64) -> Self {
        SampleConfig {
            seed,
            count,
            bounds: vec![(lo, hi); n],
            density_weights: None,
        }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.density_weights = Some(weights);
        self
    }

    pub(crate) fn axes(&self, n: usize) -> Result<Vec<Axis>, RealError> {
        if self.bounds.len() != n {
            return Err(RealError::BoxDimension {
                expected: n,
                got: self.bounds.len(),
            });
        }
        if let Some(w) = &self.density_weights {
            if w.len() != n {
                return Err(RealError::WeightsLength {
                    expected: n,
                    got: w.len(),
                });
            }
        }
        self.bounds
            .iter()
            .enumerate()
            .map(|(i, (lo, hi))| {
                let b = self.density_weights.as_ref().map_or(0.0, |w| w[i]);
                Axis::new(
                    lo.to_f64().unwrap_or(f64::NAN),
                    hi.to_f64().unwrap_or(f64::NAN),
                    b,
                )
            })
            .collect()
    }

    pub(crate) fn check(&self, map: &PolyMap) -> Result<Vec<Axis>, RealError> {
        if self.count == 0 {
            return Err(RealError::NoSamples);
        }
        self.axes(map.source_dim())
    }
}

/// Draws `count` points and returns their images `φ(x)`.
pub fn sample_pushforward(map: &PolyMap, cfg: &SampleConfig) -> Result<Vec<f64>, RealError> {
    if map.target_dim() != 1 {
        return Err(RealError::NotScalar(map.target_dim()));
    }
    let axes = cfg.check(map)?;
    let f = map.components()[0].compiled();
    let shards = cfg.count.div_ceil(SHARD_SIZE);
    let parts: Vec<Vec<f64>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let len = SHARD_SIZE.min(cfg.count - s * SHARD_SIZE);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(s as u64));
            let mut x = vec![0.0; axes.len()];
            (0..len)
                .map(|_| {
                    for (xi, ax) in x.iter_mut().zip(&axes) {
                        *xi = ax.draw(rng.random::<f64>());
                    }
                    f.eval(&x)
                })
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

/// [`sample_pushforward`] on a dedicated pool of `workers` threads.
pub fn sample_pushforward_with_workers(
    map: &PolyMap,
    cfg: &SampleConfig,
    workers: usize,
) -> Result<Vec<f64>, RealError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| sample_pushforward(map, cfg))
}
