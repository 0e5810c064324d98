use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sample::{Axis, SHARD_SIZE};
use super::{RealError, SampleConfig};
use crate::poly::PolyMap;

/// Points whose modulus is below this many standard errors are noise.
const NOISE_SIGMAS: f64 = 5.0;
/// Fitted decay at or above this is reported as superpolynomial.
const SUPERPOLY_DELTA: f64 = 2.0;
const NON_DECAYING_DELTA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayStatus {
    Power,
    /// Faster than any power visible in the window; `delta_hat` is the sentinel 2.
    Superpolynomial,
    NonDecaying,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierDecayFit {
    pub delta_hat: f64,
    pub stderr: f64,
    pub t_range: (f64, f64),
    pub points_used: usize,
    pub status: DecayStatus,
    /// Linear functional the decay was measured along, for `m > 1`.
    pub functional: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierSample {
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub sigma: f64,
}

impl FourierSample {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// 24 log-spaced frequencies on `[20, 2000]`.
pub fn default_frequency_grid() -> Vec<f64> {
    let (a, b, k) = (20f64.ln(), 2000f64.ln(), 24);
    (0..k)
        .map(|i| (a + (b - a) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

/// `exp(−1/(1 − u²))` on `(−1, 1)`.
fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// Weighted draws `(w, ℓ·φ(x))` in antithetic pairs, sharded like
/// [`super::sample_pushforward`].
fn weighted_values(
    map: &PolyMap,
    cfg: &SampleConfig,
    functional: &[f64],
) -> Result<Vec<[(f64, f64); 2]>, RealError> {
    let axes: Vec<Axis> = cfg.check(map)?;
    let comps: Vec<_> = map.components().iter().map(|c| c.compiled()).collect();
    let pairs = cfg.count.div_ceil(2);
    let shards = pairs.div_ceil(SHARD_SIZE);
    let eval = |x: &[f64]| -> (f64, f64) {
        let w: f64 = axes
            .iter()
            .zip(x)
            .map(|(a, &xi)| bump((2.0 * xi - a.lo - a.hi) / (a.hi - a.lo)))
            .product();
        let v = comps
            .iter()
            .zip(functional)
            .map(|(c, l)| l * c.eval(x))
            .sum();
        (w, v)
    };
    let parts: Vec<Vec<[(f64, f64); 2]>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let len = SHARD_SIZE.min(pairs - s * SHARD_SIZE);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(s as u64));
            let mut x = vec![0.0; axes.len()];
            let mut y = vec![0.0; axes.len()];
            (0..len)
                .map(|_| {
                    for i in 0..axes.len() {
                        let u: f64 = rng.random();
                        x[i] = axes[i].draw(u);
                        y[i] = axes[i].draw(1.0 - u);
                    }
                    [eval(&x), eval(&y)]
                })
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

/// Monte Carlo `F(φ★μ)(t) = ∫ e^{itℓ·φ} dμ` for the bump-tapered measure,
/// with the standard error of each value.
pub fn fourier_transform(
    map: &PolyMap,
    cfg: &SampleConfig,
    ts: &[f64],
    functional: &[f64],
) -> Result<Vec<FourierSample>, RealError> {
    if functional.len() != map.target_dim() {
        return Err(RealError::FunctionalLength {
            expected: map.target_dim(),
            got: functional.len(),
        });
    }
    let draws = weighted_values(map, cfg, functional)?;
    let p = draws.len() as f64;
    let wbar: f64 = draws.iter().map(|d| 0.5 * (d[0].0 + d[1].0)).sum::<f64>() / p;
    Ok(ts
        .par_iter()
        .map(|&t| {
            let (mut re, mut im) = (0.0, 0.0);
            for d in &draws {
                for &(w, v) in d {
                    let (s, c) = (t * v).sin_cos();
                    re += w * c;
                    im += w * s;
                }
            }
            let norm = 2.0 * p * wbar;
            let (re, im) = (re / norm, im / norm);
            let mut var = 0.0;
            for d in &draws {
                let (mut zr, mut zi, mut wp) = (0.0, 0.0, 0.0);
                for &(w, v) in d {
                    let (s, c) = (t * v).sin_cos();
                    zr += 0.5 * w * c;
                    zi += 0.5 * w * s;
                    wp += 0.5 * w;
                }
                var += (zr - re * wp).powi(2) + (zi - im * wp).powi(2);
            }
            let sigma = (var / (p * (p - 1.0)).max(1.0)).sqrt() / wbar;
            FourierSample { t, re, im, sigma }
        })
        .collect())
}

fn fit_decay(samples: &[FourierSample], functional: Option<Vec<f64>>) -> FourierDecayFit {
    let kept: Vec<&FourierSample> = samples
        .iter()
        .take_while(|s| s.modulus() > NOISE_SIGMAS * s.sigma)
        .collect();
    let t_range = match (kept.first(), kept.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => (samples[0].t, samples[0].t),
    };
    let sentinel = |points_used| FourierDecayFit {
        delta_hat: SUPERPOLY_DELTA,
        stderr: 0.0,
        t_range,
        points_used,
        status: DecayStatus::Superpolynomial,
        functional: functional.clone(),
    };
    if kept.len() < 3 {
        return sentinel(kept.len());
    }
    let x: Vec<f64> = kept.iter().map(|s| s.t.ln()).collect();
    let y: Vec<f64> = kept.iter().map(|s| s.modulus().ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let slope = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / sxx;
    let rss: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
        .sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    let delta = -slope;
    if delta >= SUPERPOLY_DELTA {
        return sentinel(kept.len());
    }
    FourierDecayFit {
        delta_hat: delta.max(0.0),
        stderr,
        t_range,
        points_used: kept.len(),
        status: if delta < NON_DECAYING_DELTA {
            DecayStatus::NonDecaying
        } else {
            DecayStatus::Power
        },
        functional,
    }
}

/// Fourier decay exponent of `φ★μ` for a scalar map.
pub fn estimate_delta_star_1d(
    map: &PolyMap,
    cfg: &SampleConfig,
    t_grid: &[f64],
) -> Result<FourierDecayFit, RealError> {
    if map.target_dim() != 1 {
        return Err(RealError::NotScalar(map.target_dim()));
    }
    if t_grid.len() < 3 || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(RealError::BadFrequencyGrid);
    }
    Ok(fit_decay(
        &fourier_transform(map, cfg, t_grid, &[1.0])?,
        None,
    ))
}

/// Smallest decay exponent over the given functionals `ℓ`, measuring
/// `(ℓ·φ)★μ` along each.
pub fn estimate_delta_star(
    map: &PolyMap,
    cfg: &SampleConfig,
    t_grid: &[f64],
    functionals: &[Vec<f64>],
) -> Result<FourierDecayFit, RealError> {
    if map.target_dim() == 1 && functionals.is_empty() {
        return estimate_delta_star_1d(map, cfg, t_grid);
    }
    if functionals.is_empty() {
        return Err(RealError::NoFunctionals(map.target_dim()));
    }
    if t_grid.len() < 3 || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(RealError::BadFrequencyGrid);
    }
    let mut best: Option<FourierDecayFit> = None;
    for l in functionals {
        let norm = l.iter().map(|v| v * v).sum::<f64>().sqrt();
        let unit: Vec<f64> = l.iter().map(|v| v / norm).collect();
        let fit = fit_decay(&fourier_transform(map, cfg, t_grid, &unit)?, Some(unit));
        if best.as_ref().is_none_or(|b| fit.delta_hat < b.delta_hat) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one functional"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{integer, ExponentVector, Polynomial};

    fn power(d: u32) -> PolyMap {
        PolyMap::new(
            1,
            vec![Polynomial::monomial(
                ExponentVector::new(vec![d]).unwrap(),
                integer(1),
            )],
        )
        .unwrap()
    }

    fn cfg(n: usize) -> SampleConfig {
        SampleConfig::uniform_cube(1, integer(-1), integer(1), n, 2024)
    }

    #[test]
    fn powers_decay_at_their_rate() {
        let grid = default_frequency_grid();
        let x2 = estimate_delta_star_1d(&power(2), &cfg(400_000), &grid).unwrap();
        assert!((0.43..=0.57).contains(&x2.delta_hat), "{x2:?}");
        assert_eq!(x2.status, DecayStatus::Power);
        let x3 = estimate_delta_star_1d(&power(3), &cfg(400_000), &grid).unwrap();
        assert!((0.26..=0.41).contains(&x3.delta_hat), "{x3:?}");
    }

    #[test]
    fn smooth_pushforward_hits_sentinel() {
        let fit =
            estimate_delta_star_1d(&power(1), &cfg(200_000), &default_frequency_grid()).unwrap();
        assert_eq!(fit.status, DecayStatus::Superpolynomial);
        assert!(fit.delta_hat >= 2.0);
    }

    #[test]
    fn constant_map_does_not_decay() {
        let zero = PolyMap::new(1, vec![Polynomial::zero(1)]).unwrap();
        let fit = estimate_delta_star_1d(&zero, &cfg(10_000), &default_frequency_grid()).unwrap();
        assert_eq!(fit.status, DecayStatus::NonDecaying);
    }

    #[test]
    fn functional_minimum_for_pairs() {
        // (x, y^2): the functional (0, 1) sees y^2 decay like t^{-1/2}
        let x = Polynomial::variable(2, 0).unwrap();
        let y2 = Polynomial::monomial(ExponentVector::new(vec![0, 2]).unwrap(), integer(1));
        let map = PolyMap::new(2, vec![x, y2]).unwrap();
        let c = SampleConfig::uniform_cube(2, integer(-1), integer(1), 200_000, 1);
        let fit = estimate_delta_star(
            &map,
            &c,
            &default_frequency_grid(),
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        assert!((0.4..=0.6).contains(&fit.delta_hat), "{fit:?}");
        assert_eq!(fit.functional, Some(vec![0.0, 1.0]));
        assert_eq!(
            estimate_delta_star(&map, &c, &default_frequency_grid(), &[]),
            Err(RealError::NoFunctionals(2))
        );
    }

    #[test]
    fn bump_vanishes_at_edges() {
        assert_eq!(bump(1.0), 0.0);
        assert!((bump(0.0) - (-1f64).exp()).abs() < 1e-15);
    }
}
