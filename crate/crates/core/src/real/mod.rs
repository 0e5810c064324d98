//! Monte Carlo verification over ℝ.
//!
//! Samples of `φ★μ` for a (monomially weighted) uniform or bump measure `μ`
//! on a box feed tail-exponent fits, Fourier decay fits and convolution
//! powers. The estimates are for the one fixed measure, not the infimum over
//! measures that defines the invariants.

mod convolve;
mod fourier;
mod histogram;
mod oracle;
mod sample;
mod tail;

use thiserror::Error;

pub use convolve::convolution_power;
pub use fourier::{
    default_frequency_grid, estimate_delta_star, estimate_delta_star_1d, fourier_transform,
    DecayStatus, FourierDecayFit, FourierSample,
};
pub use histogram::Histogram;
pub use oracle::{density_oracle_equidim_1d, real_roots};
pub use sample::{sample_pushforward, sample_pushforward_with_workers, SampleConfig, SHARD_SIZE};
pub use tail::{
    distributional_estimate_check, distributional_slope, estimate_eps_star, fit_tail,
    fit_tail_exponent, lq_divergence_scan, quantile, tail_histogram, EpsEstimate, ExponentFit,
    LqScan, INFINITE_LAMBDA,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealError {
    #[error("operation needs a map with one component, got {0}")]
    NotScalar(usize),
    #[error("operation needs a univariate map")]
    NotUnivariate,
    #[error("box has {got} intervals, map has {expected} variables")]
    BoxDimension { expected: usize, got: usize },
    #[error("density weights have length {got}, expected {expected}")]
    WeightsLength { expected: usize, got: usize },
    #[error("density weight {0} must be finite and nonnegative")]
    BadWeight(f64),
    #[error("interval [{0}, {1}] has zero mass")]
    ZeroMassBox(f64, f64),
    #[error("sample count must be positive")]
    NoSamples,
    #[error("window has {got} occupied bins, at least {needed} are needed")]
    InsufficientBins { needed: usize, got: usize },
    #[error("{0} is a critical value; the density may be infinite there")]
    CriticalValue(f64),
    #[error("histogram grid is not uniform")]
    NonUniformGrid,
    #[error("convolution power must be at least 1")]
    BadPower,
    #[error("histogram has no mass")]
    EmptyHistogram,
    #[error("invalid histogram: {0}")]
    InvalidHistogram(&'static str),
    #[error("no functionals supplied for an m = {0} map")]
    NoFunctionals(usize),
    #[error("functional has length {got}, map has {expected} components")]
    FunctionalLength { expected: usize, got: usize },
    #[error("frequency grid must hold at least 3 positive frequencies")]
    BadFrequencyGrid,
}
