use std::fmt::Write as _;

use serde::Serialize;

use super::RealError;

/// Binned probability masses. Mass outside the edges is kept as
/// [`Histogram::out_of_range`] so that the total is always accounted for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub total: f64,
    pub out_of_range: f64,
}

impl Histogram {
    pub fn new(
        edges: Vec<f64>,
        masses: Vec<f64>,
        total: f64,
        out_of_range: f64,
    ) -> Result<Self, RealError> {
        if edges.len() != masses.len() + 1 || masses.is_empty() {
            return Err(RealError::InvalidHistogram(
                "edges must be one longer than masses",
            ));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(RealError::InvalidHistogram(
                "edges must be strictly increasing",
            ));
        }
        if masses.iter().any(|m| !(*m >= 0.0)) {
            return Err(RealError::InvalidHistogram("masses must be nonnegative"));
        }
        Ok(Histogram {
            edges,
            masses,
            total,
            out_of_range,
        })
    }

    /// Equal-width bins on `[lo, hi]`, each sample weighing `1/len`.
    pub fn uniform(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Self, RealError> {
        let edges: Vec<f64> = (0..=bins)
            .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
            .collect();
        let width = (hi - lo) / bins as f64;
        Self::from_samples(samples, edges, |y| {
            let i = ((y - lo) / width).floor();
            (i >= 0.0 && i < bins as f64).then_some(i as usize)
        })
    }

    /// Log-spaced bins of `|y|` on `[lo, hi]`, `0 < lo < hi`.
    pub fn log_abs(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Self, RealError> {
        if !(lo > 0.0 && hi > lo) {
            return Err(RealError::InvalidHistogram("log bins need 0 < lo < hi"));
        }
        let (la, lb) = (lo.ln(), hi.ln());
        let step = (lb - la) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|i| (la + step * i as f64).exp()).collect();
        let inner = edges.clone();
        Self::from_samples(samples, edges, move |y| {
            let a = y.abs();
            if !(a >= lo && a < hi) {
                return None;
            }
            let mut i = (((a.ln() - la) / step).floor() as usize).min(bins - 1);
            // guard against rounding at the edges
            while i > 0 && a < inner[i] {
                i -= 1;
            }
            while i + 1 < bins && a >= inner[i + 1] {
                i += 1;
            }
            Some(i)
        })
    }

    fn from_samples(
        samples: &[f64],
        edges: Vec<f64>,
        locate: impl Fn(f64) -> Option<usize>,
    ) -> Result<Self, RealError> {
        if samples.is_empty() {
            return Err(RealError::NoSamples);
        }
        let bins = edges.len() - 1;
        let mut counts = vec![0u64; bins];
        let mut outside = 0u64;
        for &y in samples {
            match locate(y) {
                Some(i) => counts[i] += 1,
                None => outside += 1,
            }
        }
        let n = samples.len() as f64;
        Histogram::new(
            edges,
            counts.iter().map(|&c| c as f64 / n).collect(),
            1.0,
            outside as f64 / n,
        )
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.edges[i + 1] - self.edges[i]
    }

    pub fn density(&self, i: usize) -> f64 {
        self.masses[i] / self.width(i)
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    pub fn geometric_center(&self, i: usize) -> f64 {
        (self.edges[i] * self.edges[i + 1]).sqrt()
    }

    pub fn in_range_mass(&self) -> f64 {
        let mut m = self.masses.clone();
        crate::poly::pairwise_sum(&mut m)
    }

    pub fn sup_density(&self) -> f64 {
        (0..self.bins())
            .map(|i| self.density(i))
            .fold(0.0, f64::max)
    }

    pub fn is_uniform(&self) -> bool {
        let w = self.width(0);
        (0..self.bins()).all(|i| (self.width(i) - w).abs() <= 1e-9 * w.abs())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,mass\n");
        for i in 0..self.bins() {
            let _ = writeln!(
                out,
                "{},{},{}",
                self.edges[i],
                self.edges[i + 1],
                self.masses[i]
            );
        }
        out
    }
}
