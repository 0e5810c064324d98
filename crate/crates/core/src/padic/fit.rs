use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{ball_mass, ball_ratio_sequence, select_engine, PAdicConfig, PadicError};
use crate::poly::{PolyMap, Polynomial, Rational};

/// Fit of `log_p mass(k) ≈ a − c·k + L·log_p k` up to a periodic factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PadicLctFit {
    /// Fitted decay rate; the lct estimate.
    pub c: f64,
    pub intercept: f64,
    pub log_power: u32,
    /// Lag used for the slope; the period of the oscillating factor.
    pub period: u32,
    /// Spread of the lagged differences under the chosen model.
    pub residual: f64,
    /// Same spread with no log term.
    pub residual_no_log: f64,
    /// Mass is exactly `p^{-k}` at every depth: lct ≥ 1.
    pub smooth: bool,
    pub k_min: u32,
    pub k_max: u32,
}

fn log_p_rational(r: &Rational, p: u64) -> f64 {
    let lp = (p as f64).ln();
    let (n, d) = (r.numer(), r.denom());
    let ln = |v: &BigInt| {
        let bits = v.bits();
        let shift = bits.saturating_sub(60);
        let top = (v >> shift).to_f64().expect("fits");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    };
    (ln(n) - ln(d)) / lp
}

/// Slope estimate from lag-`d` differences of `y`, with their spread.
///
/// Ball masses carry periodic factors (for `x^d` the mass is a staircase of
/// period `d`), so the lag whose differences are most nearly constant is used
/// and the slope is their mean divided by the lag.
fn lagged_slope(y: &[f64]) -> (f64, u32, f64) {
    let w = y.len() - 1;
    let mut best: Option<(f64, u32, f64)> = None;
    for d in 1..w.max(2) {
        let diffs: Vec<f64> = (0..=w - d).map(|i| (y[i + d] - y[i]) / d as f64).collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let spread = diffs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / diffs.len() as f64;
        if best.is_none_or(|(_, _, s)| spread < s - 1e-12) {
            best = Some((mean, d as u32, spread));
        }
    }
    best.expect("window has at least three depths")
}

struct Candidate {
    slope: f64,
    intercept: f64,
    period: u32,
    spread: f64,
}

/// Fits a mass sequence indexed by depth (`masses[k]` at depth `k`).
///
/// The log power starts at 0 and is raised (up to 2) only while doing so at
/// least halves the spread of the lagged differences.
pub fn fit_mass_sequence(masses: &[Rational], p: u64) -> Result<PadicLctFit, PadicError> {
    let k_max = masses.len().saturating_sub(1) as u32;
    let k_min = (k_max / 2).max(1);
    if k_max < k_min + 2 {
        return Err(PadicError::TooShallow(k_max));
    }
    let smooth = masses
        .iter()
        .enumerate()
        .all(|(k, m)| *m == Rational::new(1.into(), super::p_power(p, k as u64)));
    if masses[k_min as usize..].iter().any(|m| m.is_zero()) {
        return Err(PadicError::TooShallow(k_max));
    }
    let ks: Vec<f64> = (k_min..=k_max).map(f64::from).collect();
    let logs: Vec<f64> = masses[k_min as usize..]
        .iter()
        .map(|m| log_p_rational(m, p))
        .collect();
    let lp = (p as f64).ln();
    let fit_with = |power: u32| {
        let y: Vec<f64> = ks
            .iter()
            .zip(&logs)
            .map(|(k, v)| v - power as f64 * k.ln() / lp)
            .collect();
        let (slope, period, spread) = lagged_slope(&y);
        let intercept =
            ks.iter().zip(&y).map(|(k, v)| v - slope * k).sum::<f64>() / ks.len() as f64;
        Candidate {
            slope,
            intercept,
            period,
            spread,
        }
    };
    let base = fit_with(0);
    let base_spread = base.spread;
    let mut log_power = 0;
    let mut chosen = base;
    for power in 1..=2 {
        let cand = fit_with(power);
        if chosen.spread > 1e-18 && cand.spread <= 0.5 * chosen.spread {
            chosen = cand;
            log_power = power;
        } else {
            break;
        }
    }
    Ok(PadicLctFit {
        c: -chosen.slope,
        intercept: chosen.intercept,
        log_power,
        period: chosen.period,
        residual: chosen.spread,
        residual_no_log: base_spread,
        smooth,
        k_min,
        k_max,
    })
}

/// Estimates the p-adic lct of `f` at the origin from `μ{val f ≥ k}`.
pub fn fit_padic_lct(f: &Polynomial, p: u64, k_max: u32) -> Result<PadicLctFit, PadicError> {
    let cfg = PAdicConfig::new(p, k_max)?;
    let map = PolyMap::new(f.nvars(), vec![f.clone()]).map_err(|_| PadicError::NotScalar)?;
    let zero = [BigInt::zero()];
    let engine = select_engine(&map, &zero);
    let masses = (0..=k_max)
        .map(|k| ball_mass(&map, p, k, &zero, engine, cfg.cell_budget))
        .collect::<Result<Vec<_>, _>>()?;
    fit_mass_sequence(&masses, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpsClassification {
    /// Ratio grows at most polynomially in `k`.
    Infinite,
    /// Ratio grows like `p^{(1−c)k}`.
    Finite { eps: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PadicLctEstimate {
    pub classification: EpsClassification,
    pub fit: PadicLctFit,
}

const INFINITE_THRESHOLD: f64 = 0.95;
const FINITE_THRESHOLD: f64 = 0.85;

/// Classifies `ε★` over `ℚ_p` from the ball-mass growth around `y`.
pub fn estimate_eps_padic(
    map: &PolyMap,
    cfg: &PAdicConfig,
    y: &[BigInt],
) -> Result<PadicLctEstimate, PadicError> {
    if map.target_dim() != 1 {
        return Err(PadicError::NotScalar);
    }
    let table = ball_ratio_sequence(map, cfg, y)?;
    let fit = fit_mass_sequence(&table.masses(), cfg.p)?;
    let classification = classify_fit(&fit)?;
    Ok(PadicLctEstimate {
        classification,
        fit,
    })
}

/// `ε★` classification of a fit: `∞` at `c ≥ 0.95` or for smooth data, `c/(1−c)` below 0.85.
pub fn classify_fit(fit: &PadicLctFit) -> Result<EpsClassification, PadicError> {
    if fit.smooth || fit.c >= INFINITE_THRESHOLD {
        Ok(EpsClassification::Infinite)
    } else if fit.c < FINITE_THRESHOLD {
        let c = fit.c.max(0.0);
        Ok(EpsClassification::Finite { eps: c / (1.0 - c) })
    } else {
        Err(PadicError::AmbiguousFit {
            c: fit.c,
            exp_residual: fit.residual_no_log,
            poly_residual: fit.residual,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{integer, ExponentVector};

    fn mono(e: &[u32]) -> Polynomial {
        Polynomial::monomial(ExponentVector::new(e.to_vec()).unwrap(), integer(1))
    }

    #[test]
    fn powers_of_x() {
        for d in [2u32, 3] {
            let fit = fit_padic_lct(&mono(&[d]), 3, 12).unwrap();
            assert!((fit.c - 1.0 / d as f64).abs() < 1e-9, "d={d} c={}", fit.c);
            assert_eq!(fit.log_power, 0);
            assert_eq!(fit.period, d);
        }
    }

    #[test]
    fn xy_detects_log_power() {
        let fit = fit_padic_lct(&mono(&[1, 1]), 3, 12).unwrap();
        assert_eq!(fit.log_power, 1);
        assert!((fit.c - 1.0).abs() < 0.05, "c={}", fit.c);
    }

    #[test]
    fn smooth_sentinel() {
        let fit = fit_padic_lct(&mono(&[1]), 5, 8).unwrap();
        assert!(fit.smooth);
        assert!((fit.c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classification_examples() {
        let cfg = PAdicConfig::new(3, 12).unwrap();
        let zero = [BigInt::zero()];
        let xy = PolyMap::new(2, vec![mono(&[1, 1])]).unwrap();
        assert_eq!(
            estimate_eps_padic(&xy, &cfg, &zero).unwrap().classification,
            EpsClassification::Infinite
        );
        let x2 = PolyMap::new(1, vec![mono(&[2])]).unwrap();
        match estimate_eps_padic(&x2, &cfg, &zero).unwrap().classification {
            EpsClassification::Finite { eps } => assert!((eps - 1.0).abs() < 0.1, "eps={eps}"),
            other => panic!("unexpected {other:?}"),
        }
        let id = PolyMap::identity(1);
        assert_eq!(
            estimate_eps_padic(&id, &cfg, &zero).unwrap().classification,
            EpsClassification::Infinite
        );
    }

    #[test]
    fn diagonal_sums_at_p5() {
        for (d, want) in [(3u32, 2.0 / 3.0), (4, 0.5)] {
            let f = &mono(&[d, 0]) + &mono(&[0, d]);
            let fit = fit_padic_lct(&f, 5, 12).unwrap();
            assert!(
                (fit.c - want).abs() < 0.05,
                "d={d} c={} L={}",
                fit.c,
                fit.log_power
            );
        }
    }

    #[test]
    fn shallow_tables_are_rejected() {
        assert_eq!(
            fit_padic_lct(&mono(&[2]), 3, 2),
            Err(PadicError::TooShallow(2))
        );
    }

    #[test]
    fn ambiguous_band() {
        let fit = PadicLctFit {
            c: 0.9,
            intercept: 0.0,
            log_power: 0,
            period: 1,
            residual: 0.1,
            residual_no_log: 0.1,
            smooth: false,
            k_min: 6,
            k_max: 12,
        };
        assert!(matches!(
            classify_fit(&fit),
            Err(PadicError::AmbiguousFit { .. })
        ));
    }
}
