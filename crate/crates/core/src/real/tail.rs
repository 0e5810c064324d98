use std::ops::Range;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{Histogram, RealError};
use crate::value::ExponentValue;

/// `λ̂` at or above this is classified as `ε★ = ∞`.
pub const INFINITE_LAMBDA: f64 = 0.9;

const MIN_TAIL_BINS: usize = 8;
const TAIL_QUANTILES: (f64, f64) = (0.001, 0.05);

/// Fit of `g(y) ≈ c·|y|^{λ−1}·log(1/|y|)^L` on the small-`|y|` tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub lambda_hat: f64,
    pub log_power: u32,
    pub stderr: f64,
    pub r2: f64,
    pub bins_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpsEstimate {
    Infinite { lambda_hat: f64 },
    Finite { eps: f64, stderr: f64 },
}

impl EpsEstimate {
    pub fn value(&self) -> f64 {
        match self {
            EpsEstimate::Infinite { .. } => f64::INFINITY,
            EpsEstimate::Finite { eps, .. } => *eps,
        }
    }
}

/// Empirical `q`-quantile (nearest rank) of `values`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    let idx = ((q.clamp(0.0, 1.0) * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
    let (_, x, _) = v.select_nth_unstable_by(idx, f64::total_cmp);
    *x
}

/// Log-spaced histogram of `|y|` between its 0.001 and 0.05 quantiles.
pub fn tail_histogram(samples: &[f64], bins: usize) -> Result<Histogram, RealError> {
    if samples.is_empty() {
        return Err(RealError::NoSamples);
    }
    let abs: Vec<f64> = samples.iter().map(|y| y.abs()).collect();
    let mut lo = quantile(&abs, TAIL_QUANTILES.0);
    let hi = quantile(&abs, TAIL_QUANTILES.1);
    if lo <= 0.0 {
        lo = abs
            .iter()
            .copied()
            .filter(|&a| a > 0.0)
            .fold(f64::INFINITY, f64::min);
    }
    if !(lo.is_finite() && hi > lo) {
        return Err(RealError::InsufficientBins {
            needed: MIN_TAIL_BINS,
            got: 0,
        });
    }
    Histogram::log_abs(samples, lo, hi, bins.max(1))
}

struct Wls {
    slope: f64,
    rss: f64,
    tss: f64,
    sxx: f64,
}

fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> Wls {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - mx).powi(2)).sum();
    let sxy: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((a, c), b)| b * (a - mx) * (c - my))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((a, c), b)| b * (c - intercept - slope * a).powi(2))
        .sum();
    let tss = y.iter().zip(w).map(|(c, b)| b * (c - my).powi(2)).sum();
    Wls {
        slope,
        rss,
        tss,
        sxx,
    }
}

/// Weighted least squares of `ln density` on `ln |y|` over the bins in
/// `window`; `λ̂ = slope + 1`. A `log log(1/|y|)` term of power 1 or 2 is
/// kept only if it at least halves the residual of the next lower power.
pub fn fit_tail_exponent(h: &Histogram, window: Range<usize>) -> Result<ExponentFit, RealError> {
    let idx: Vec<usize> = window
        .filter(|&i| i < h.bins() && h.masses[i] > 0.0)
        .collect();
    if idx.len() < MIN_TAIL_BINS {
        return Err(RealError::InsufficientBins {
            needed: MIN_TAIL_BINS,
            got: idx.len(),
        });
    }
    let centers: Vec<f64> = idx.iter().map(|&i| h.geometric_center(i)).collect();
    let x: Vec<f64> = centers.iter().map(|c| c.ln()).collect();
    let y: Vec<f64> = idx.iter().map(|&i| h.density(i).ln()).collect();
    let w: Vec<f64> = idx.iter().map(|&i| h.masses[i]).collect();
    let loglog: Option<Vec<f64>> = centers
        .iter()
        .all(|&c| c < 1.0)
        .then(|| centers.iter().map(|c| (-c.ln()).ln()).collect());

    let fit_with = |power: u32| {
        let adj: Vec<f64> = match (&loglog, power) {
            (_, 0) => y.clone(),
            (Some(ll), p) => y.iter().zip(ll).map(|(v, l)| v - p as f64 * l).collect(),
            (None, _) => return None,
        };
        Some(weighted_line(&x, &adj, &w))
    };
    let mut log_power = 0;
    let mut chosen = fit_with(0).expect("power 0 always fits");
    for power in 1..=2 {
        match fit_with(power) {
            Some(cand) if chosen.rss > 0.0 && cand.rss <= 0.5 * chosen.rss => {
                chosen = cand;
                log_power = power;
            }
            _ => break,
        }
    }
    let dof = (idx.len() - 2) as f64;
    // weights are relative, so the residual variance is estimated from the fit
    let stderr = (chosen.rss / dof / chosen.sxx).sqrt();
    let r2 = if chosen.tss > 0.0 {
        (1.0 - chosen.rss / chosen.tss).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(ExponentFit {
        lambda_hat: chosen.slope + 1.0,
        log_power,
        stderr,
        r2,
        bins_used: idx.len(),
    })
}

/// Tail histogram plus fit over all of its bins.
pub fn fit_tail(samples: &[f64], bins: usize) -> Result<(Histogram, ExponentFit), RealError> {
    let h = tail_histogram(samples, bins)?;
    let fit = fit_tail_exponent(&h, 0..h.bins())?;
    Ok((h, fit))
}

/// `ε̂ = λ̂/(1 − λ̂)`, or `∞` when `λ̂ ≥ 0.9`.
pub fn estimate_eps_star(fit: &ExponentFit) -> EpsEstimate {
    let l = fit.lambda_hat;
    if l >= INFINITE_LAMBDA {
        return EpsEstimate::Infinite { lambda_hat: l };
    }
    let l = l.max(0.0);
    EpsEstimate::Finite {
        eps: l / (1.0 - l),
        stderr: fit.stderr / (1.0 - l).powi(2),
    }
}

/// Slope of `ln P(|y| ≤ δ)` against `ln δ` for δ across the tail quantiles.
pub fn distributional_slope(samples: &[f64]) -> f64 {
    let mut abs: Vec<f64> = samples.iter().map(|y| y.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let n = abs.len() as f64;
    let at = |q: f64| abs[((q * n) as usize).min(abs.len() - 1)];
    let (lo, hi) = (at(TAIL_QUANTILES.0), at(TAIL_QUANTILES.1));
    let lo = if lo > 0.0 { lo } else { hi * 1e-3 };
    let points = 16;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (0..points)
        .filter_map(|i| {
            let d = (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (points - 1) as f64).exp();
            let count = abs.partition_point(|&a| a <= d);
            (count > 0).then(|| (d.ln(), (count as f64 / n).ln()))
        })
        .unzip();
    let w = vec![1.0; xs.len()];
    weighted_line(&xs, &ys, &w).slope
}

/// Whether `P(|y| ≤ δ)` decays at least like `δ^{1 − 1/(1+e)}` (0.07 slack).
pub fn distributional_estimate_check(samples: &[f64], e: &ExponentValue) -> bool {
    distributional_slope(samples) >= e.conjugate_fraction().to_f64().unwrap_or(1.0) - 0.07
}

/// Growth of `∫_{|y| ≥ δ} g^q` as the cutoff `δ` shrinks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LqScan {
    pub q: f64,
    pub cutoffs: Vec<f64>,
    pub integrals: Vec<f64>,
    /// Slope of the integral against `ln(1/δ)` over all cutoffs.
    pub slope_all: f64,
    /// Same slope over the smaller half of the cutoffs.
    pub slope_deep: f64,
    /// Growth does not slow down as `δ → 0`.
    pub diverges: bool,
}

/// Scans `∫ g^q` over the tail of a log-binned histogram of `|y|`.
pub fn lq_divergence_scan(h: &Histogram, q: f64) -> Result<LqScan, RealError> {
    if h.bins() < MIN_TAIL_BINS {
        return Err(RealError::InsufficientBins {
            needed: MIN_TAIL_BINS,
            got: h.bins(),
        });
    }
    let mut cutoffs = Vec::with_capacity(h.bins());
    let mut integrals = Vec::with_capacity(h.bins());
    let mut acc = 0.0;
    for i in (0..h.bins()).rev() {
        acc += h.density(i).powf(q) * h.width(i);
        cutoffs.push(h.edges[i]);
        integrals.push(acc);
    }
    let x: Vec<f64> = cutoffs.iter().map(|d| -d.ln()).collect();
    let ones = vec![1.0; x.len()];
    let slope_all = weighted_line(&x, &integrals, &ones).slope;
    let half = x.len() / 2;
    let slope_deep = weighted_line(&x[half..], &integrals[half..], &ones[half..]).slope;
    Ok(LqScan {
        q,
        cutoffs,
        integrals,
        slope_all,
        slope_deep,
        diverges: slope_deep > 0.0 && slope_deep >= 0.5 * slope_all,
    })
}
