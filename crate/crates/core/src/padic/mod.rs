//! Exact pushforward masses over ℤ_p.
//!
//! For a map `φ` with integer coefficients the mass of the cylinder
//! `{x ∈ ℤ_p^n : φ(x) ≡ y mod p^k}` only depends on `x mod p^k`, so it is a
//! finite count. Three engines compute it:
//!
//! * [`MassEngine::Enumeration`] walks all of `(ℤ/p^k)^n` (budget guarded);
//! * [`MassEngine::Valuation`] handles `c·x^a` at `y = 0` through the
//!   distribution of `Σ a_i val(x_i)`;
//! * [`MassEngine::Refinement`] splits balls until `val(φ − y)` is constant
//!   or Hensel's lemma applies, for `m = 1`.
//!
//! All three return the same exact rational.

mod enumerate;
mod fit;
mod intpoly;
mod refine;
mod valuation;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::{PolyMap, Polynomial, Rational};

pub use enumerate::value_distribution;
pub use fit::{
    classify_fit, estimate_eps_padic, fit_mass_sequence, fit_padic_lct, EpsClassification,
    PadicLctEstimate, PadicLctFit,
};
pub use intpoly::IntPoly;

/// Default cap on the number of residue cells an enumeration may visit.
pub const DEFAULT_CELL_BUDGET: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("component {0} has non-integral coefficients")]
    NonIntegral(usize),
    #[error("enumeration needs {needed} cells, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("p^k does not fit in 63 bits (p={p}, k={k})")]
    DepthTooLarge { p: u64, k: u32 },
    #[error("target point has {got} coordinates, map has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation needs a map with one component")]
    NotScalar,
    #[error("engine {0:?} does not apply to this map")]
    EngineNotApplicable(MassEngine),
    #[error("ambiguous growth: exponential fit c={c:.4} (residual {exp_residual:.3e}), polynomial fit residual {poly_residual:.3e}")]
    AmbiguousFit {
        c: f64,
        exp_residual: f64,
        poly_residual: f64,
    },
    #[error("need at least 3 depths to fit, got k_max={0}")]
    TooShallow(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PAdicConfig {
    pub p: u64,
    pub k_max: u32,
    pub cell_budget: u64,
}

impl PAdicConfig {
    pub fn new(p: u64, k_max: u32) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        Ok(PAdicConfig {
            p,
            k_max,
            cell_budget: DEFAULT_CELL_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.cell_budget = budget.max(1);
        self
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MassEngine {
    Enumeration,
    Valuation,
    Refinement,
}

/// `p^k` as `u64`, refusing anything that would overflow `u128` products.
pub(crate) fn modulus(p: u64, k: u32) -> Result<u64, PadicError> {
    let mut m: u64 = 1;
    for _ in 0..k {
        m = m
            .checked_mul(p)
            .filter(|&v| v < (1u64 << 63))
            .ok_or(PadicError::DepthTooLarge { p, k })?;
    }
    Ok(m)
}

pub(crate) fn p_power(p: u64, e: u64) -> BigInt {
    Pow::pow(BigInt::from(p), e)
}

fn check_target(map: &PolyMap, y: &[BigInt]) -> Result<(), PadicError> {
    if y.len() != map.target_dim() {
        return Err(PadicError::DimensionMismatch {
            expected: map.target_dim(),
            got: y.len(),
        });
    }
    Ok(())
}

fn int_components(map: &PolyMap) -> Result<Vec<IntPoly>, PadicError> {
    map.components()
        .iter()
        .enumerate()
        .map(|(i, c)| IntPoly::from_polynomial(c).ok_or(PadicError::NonIntegral(i)))
        .collect()
}

/// `#{x mod p^k : φ(x) ≡ y mod p^k} / p^{nk}` by full enumeration.
pub fn cylinder_mass(
    map: &PolyMap,
    p: u64,
    k: u32,
    y: &[BigInt],
    cell_budget: u64,
) -> Result<Rational, PadicError> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    check_target(map, y)?;
    let comps = int_components(map)?;
    let count = enumerate::count_fiber(&comps, map.source_dim(), p, k, y, cell_budget)?;
    Ok(Rational::new(
        BigInt::from(count),
        p_power(p, map.source_dim() as u64 * k as u64),
    ))
}

/// Picks the cheapest exact engine that applies.
pub fn select_engine(map: &PolyMap, y: &[BigInt]) -> MassEngine {
    if map.target_dim() != 1 {
        return MassEngine::Enumeration;
    }
    if y.iter().all(|v| v.is_zero()) && map.components()[0].as_single_term().is_some() {
        MassEngine::Valuation
    } else {
        MassEngine::Refinement
    }
}

/// Cylinder mass with an explicit engine.
pub fn ball_mass(
    map: &PolyMap,
    p: u64,
    k: u32,
    y: &[BigInt],
    engine: MassEngine,
    cell_budget: u64,
) -> Result<Rational, PadicError> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    check_target(map, y)?;
    match engine {
        MassEngine::Enumeration => cylinder_mass(map, p, k, y, cell_budget),
        MassEngine::Valuation => {
            let f = &map.components()[0];
            if map.target_dim() != 1 || !y.iter().all(|v| v.is_zero()) {
                return Err(PadicError::EngineNotApplicable(engine));
            }
            let (e, c) = f
                .as_single_term()
                .ok_or(PadicError::EngineNotApplicable(engine))?;
            if !c.is_integer() {
                return Err(PadicError::NonIntegral(0));
            }
            Ok(valuation::monomial_mass(c.numer(), e.entries(), p, k))
        }
        MassEngine::Refinement => {
            if map.target_dim() != 1 {
                return Err(PadicError::EngineNotApplicable(engine));
            }
            let f =
                IntPoly::from_polynomial(&map.components()[0]).ok_or(PadicError::NonIntegral(0))?;
            refine::level_mass(&f, p, k, &y[0], cell_budget)
        }
    }
}

/// One row of a ball-mass table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MassRow {
    pub k: u32,
    #[serde(serialize_with = "ser_rational")]
    pub mass: Rational,
    /// `mass · p^{mk}`: mass relative to the Haar measure of the target ball.
    #[serde(serialize_with = "ser_rational")]
    pub ratio: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PadicMassTable {
    pub p: u64,
    pub engine: MassEngine,
    pub rows: Vec<MassRow>,
}

impl PadicMassTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,mass_num,mass_den,ratio_num,ratio_den\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.k,
                r.mass.numer(),
                r.mass.denom(),
                r.ratio.numer(),
                r.ratio.denom()
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("table serializes")
    }

    pub fn masses(&self) -> Vec<Rational> {
        self.rows.iter().map(|r| r.mass.clone()).collect()
    }
}

/// Masses of the balls `B(y, p^{-k})`, `k = 0..=k_max`, under `φ★μ_{ℤ_p^n}`.
pub fn ball_ratio_sequence(
    map: &PolyMap,
    cfg: &PAdicConfig,
    y: &[BigInt],
) -> Result<PadicMassTable, PadicError> {
    let engine = select_engine(map, y);
    ball_ratio_sequence_with(map, cfg, y, engine)
}

pub fn ball_ratio_sequence_with(
    map: &PolyMap,
    cfg: &PAdicConfig,
    y: &[BigInt],
    engine: MassEngine,
) -> Result<PadicMassTable, PadicError> {
    let m = map.target_dim() as u64;
    let rows = (0..=cfg.k_max)
        .map(|k| {
            let mass = ball_mass(map, cfg.p, k, y, engine, cfg.cell_budget)?;
            let ratio = &mass * Rational::from_integer(p_power(cfg.p, m * k as u64));
            Ok(MassRow { k, mass, ratio })
        })
        .collect::<Result<Vec<_>, PadicError>>()?;
    Ok(PadicMassTable {
        p: cfg.p,
        engine,
        rows,
    })
}

/// `(k+1) − k/p`: ball ratio of `(x, y) ↦ xy` at depth `k`.
pub fn closed_form_xy_ratio(p: u64, k: u32) -> Rational {
    Rational::from_integer(BigInt::from(k + 1)) - Rational::new(BigInt::from(k), BigInt::from(p))
}

/// `((p−1)/p)²(k+1)`, the explicit lower bound on the xy ratio.
pub fn xy_ratio_lower_bound(p: u64, k: u32) -> Rational {
    let f = Rational::new(BigInt::from(p - 1), BigInt::from(p));
    &f * &f * Rational::from_integer(BigInt::from(k + 1))
}

/// The product map `(x, y) ↦ xy`.
pub fn xy_map() -> PolyMap {
    let x = Polynomial::variable(2, 0).expect("axis");
    let y = Polynomial::variable(2, 1).expect("axis");
    PolyMap::new(2, vec![x.mul(&y).expect("small exponents")]).expect("valid map")
}
