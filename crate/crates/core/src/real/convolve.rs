use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::{Histogram, RealError};

/// `k`-fold self-convolution of the binned law `h`.
///
/// Bin masses are convolved as a discrete law on bin indices; the result
/// lives on the grid of `k`-fold sums of bin centers, `k(B−1)+1` bins of the
/// same width. The FFT length covers that full support, so nothing wraps.
pub fn convolution_power(h: &Histogram, k: u32) -> Result<Histogram, RealError> {
    if k == 0 {
        return Err(RealError::BadPower);
    }
    if !h.is_uniform() {
        return Err(RealError::NonUniformGrid);
    }
    let in_range = h.in_range_mass();
    if in_range <= 0.0 {
        return Err(RealError::EmptyHistogram);
    }
    let b = h.bins();
    let w = h.width(0);
    let lo = h.edges[0];
    let len = k as usize * (b - 1) + 1;
    let size = len.next_power_of_two();

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut buf: Vec<Complex64> = h
        .masses
        .iter()
        .map(|&m| Complex64::new(m, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(size)
        .collect();
    fwd.process(&mut buf);
    for z in buf.iter_mut() {
        *z = z.powu(k);
    }
    inv.process(&mut buf);
    let masses: Vec<f64> = buf[..len]
        .iter()
        .map(|z| (z.re / size as f64).max(0.0))
        .collect();

    let k = k as f64;
    let first = k * lo + 0.5 * (k - 1.0) * w;
    let edges: Vec<f64> = (0..=len).map(|s| first + s as f64 * w).collect();
    let total_in = in_range.powf(k);
    Histogram::new(edges, masses, h.total, (h.total - total_in).max(0.0))
}
