use num_traits::ToPrimitive;

use super::{RealError, SampleConfig};
use crate::poly::{PolyMap, Polynomial};

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| i as f64 * a)
        .collect()
}

fn trim(c: &[f64]) -> &[f64] {
    let end = c.iter().rposition(|&a| a != 0.0).map_or(0, |i| i + 1);
    &c[..end]
}

fn bisect(c: &[f64], mut a: f64, mut b: f64) -> f64 {
    let mut fa = horner(c, a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = horner(c, m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Real roots in `[lo, hi]` of the polynomial with ascending coefficients `c`.
///
/// Critical points (roots of the derivative, found recursively) cut the
/// interval into monotone pieces, each bisected to full precision.
pub fn real_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trim(c);
    match c.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let r = -c[0] / c[1];
            return if (lo..=hi).contains(&r) {
                vec![r]
            } else {
                Vec::new()
            };
        }
        _ => {}
    }
    let mut cuts = vec![lo];
    cuts.extend(real_roots(&derivative(c), lo, hi));
    cuts.push(hi);
    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots
            .last()
            .is_none_or(|&l| (r - l).abs() > 1e-12 * (1.0 + r.abs()))
        {
            roots.push(r);
        }
    };
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (horner(c, a), horner(c, b));
        if fa == 0.0 {
            push(a, &mut roots);
        }
        if fa != 0.0 && fb != 0.0 && (fa > 0.0) != (fb > 0.0) {
            push(bisect(c, a, b), &mut roots);
        }
    }
    if horner(c, hi) == 0.0 {
        push(hi, &mut roots);
    }
    roots
}

fn coefficients(p: &Polynomial) -> Vec<f64> {
    let deg = p.total_degree() as usize;
    let mut c = vec![0.0; deg + 1];
    for (e, v) in p.terms() {
        c[e.entries()[0] as usize] += v.to_f64().unwrap_or(f64::NAN);
    }
    c
}

/// Density of `φ★μ` at `y` for univariate `φ`: `Σ ρ(x)/|φ′(x)|` over the
/// roots of `φ(x) = y` in the box, `ρ` the base density of `cfg`.
pub fn density_oracle_equidim_1d(
    map: &PolyMap,
    y: f64,
    cfg: &SampleConfig,
) -> Result<f64, RealError> {
    if map.source_dim() != 1 || map.target_dim() != 1 {
        return Err(RealError::NotUnivariate);
    }
    let axis = cfg.axes(1)?.remove(0);
    let mut c = coefficients(&map.components()[0]);
    let dc = derivative(&c);
    let tol = 1e-12 * (1.0 + y.abs());
    if trim(&dc).is_empty() {
        // constant map: a point mass
        return if (c[0] - y).abs() <= tol {
            Err(RealError::CriticalValue(y))
        } else {
            Ok(0.0)
        };
    }
    for x in real_roots(&dc, axis.lo, axis.hi) {
        if (horner(&c, x) - y).abs() <= tol {
            return Err(RealError::CriticalValue(y));
        }
    }
    c[0] -= y;
    let mut g = 0.0;
    for x in real_roots(&c, axis.lo, axis.hi) {
        let slope = horner(&dc, x).abs();
        if slope == 0.0 {
            return Err(RealError::CriticalValue(y));
        }
        g += axis.density(x) / slope;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{integer, ExponentVector};

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

    fn cube() -> SampleConfig {
        SampleConfig::uniform_cube(1, integer(-1), integer(1), 1, 0)
    }

    #[test]
    fn spec_values() {
        assert!((density_oracle_equidim_1d(&power(2), 0.25, &cube()).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            (density_oracle_equidim_1d(&power(3), 0.125, &cube()).unwrap() - 2.0 / 3.0).abs()
                < 1e-12
        );
        for y in [-0.9, 0.1, 0.7] {
            assert!(
                (density_oracle_equidim_1d(&power(1), y, &cube()).unwrap() - 0.5).abs() < 1e-12
            );
        }
        assert_eq!(
            density_oracle_equidim_1d(&power(1), 1.5, &cube()).unwrap(),
            0.0
        );
    }

    #[test]
    fn critical_values_are_reported() {
        assert_eq!(
            density_oracle_equidim_1d(&power(2), 0.0, &cube()),
            Err(RealError::CriticalValue(0.0))
        );
    }

    #[test]
    fn roots_of_cubic() {
        // (x - 0.5)(x + 0.25)(x - 0.9) = x^3 - 1.15x^2 + 0.1x + 0.1125
        let r = real_roots(&[0.1125, 0.1, -1.15, 1.0], -1.0, 1.0);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([-0.25, 0.5, 0.9]) {
            assert!((a - b).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn double_root_is_found() {
        let r = real_roots(&[0.25, -1.0, 1.0], -1.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-6);
    }
}
