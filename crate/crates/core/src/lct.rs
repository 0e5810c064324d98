//! Exact log-canonical thresholds at the origin.
//!
//! For a monomial ideal the threshold is read off its Newton polyhedron:
//! `lct = 1/t*` where `t*·(1,…,1)` is the first point of the diagonal inside
//! `conv(generators) + ℝ≥0^n`. `t*` is found by an exact-rational LP.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::{ExponentVector, PolyError, Polynomial, Rational};
use crate::simplex::{self, LpError};
use crate::value::ExponentValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LctError {
    #[error("ideal has no generators")]
    EmptyIdeal,
    #[error("generators have inconsistent lengths (expected {expected}, got {got})")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("principal monomial must be nonzero")]
    ZeroMonomial,
    #[error("no divisor of the resolution passes through the point")]
    NoDivisorThroughPoint,
    #[error("divisor multiplicity a must be at least 1")]
    InvalidMultiplicity,
    #[error("degree list is empty")]
    EmptyDegrees,
    #[error("degrees must be at least 1")]
    InvalidDegree,
    #[error("Newton polyhedron LP failed: {0}")]
    Lp(#[from] LpError),
}

/// Fields over which a threshold value is known to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FieldValidity {
    /// Valid over ℝ, ℂ and every ℚ_p.
    AllLocalFields,
    /// Established over ℂ only.
    ComplexOnly,
}

impl FieldValidity {
    /// The weaker of two tags.
    pub fn meet(self, other: FieldValidity) -> FieldValidity {
        if self == FieldValidity::AllLocalFields && other == FieldValidity::AllLocalFields {
            FieldValidity::AllLocalFields
        } else {
            FieldValidity::ComplexOnly
        }
    }
}

/// A log-canonical threshold value with its field-validity tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Lct {
    pub value: ExponentValue,
    pub validity: FieldValidity,
}

impl fmt::Display for Lct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.validity {
            FieldValidity::AllLocalFields => "all local fields",
            FieldValidity::ComplexOnly => "complex",
        };
        write!(f, "{} [{}]", self.value, tag)
    }
}

/// Monomial ideal given by a minimal set of exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    n: usize,
    generators: Vec<ExponentVector>,
}

impl MonomialIdeal {
    /// Builds the ideal, discarding generators dominated by another one.
    pub fn new(generators: Vec<ExponentVector>) -> Result<Self, LctError> {
        let n = generators.first().ok_or(LctError::EmptyIdeal)?.len();
        if let Some(bad) = generators.iter().find(|g| g.len() != n) {
            return Err(LctError::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        let mut sorted = generators;
        sorted.sort();
        sorted.dedup();
        let mut minimal: Vec<ExponentVector> = Vec::new();
        // graded order: a dominating vector never precedes what it dominates
        for g in sorted {
            if !minimal.iter().any(|h| g.dominates(h)) {
                minimal.push(g);
            }
        }
        Ok(MonomialIdeal {
            n,
            generators: minimal,
        })
    }

    pub fn from_rows(rows: &[&[u32]]) -> Result<Self, LctError> {
        let gens = rows
            .iter()
            .map(|r| ExponentVector::new(r.to_vec()).map_err(|_| LctError::InvalidDegree))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(gens)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[ExponentVector] {
        &self.generators
    }

    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.is_zero())
    }

    /// Adds generators and re-minimizes.
    pub fn with_generators(&self, extra: &[ExponentVector]) -> Result<Self, LctError> {
        let mut gens = self.generators.clone();
        gens.extend_from_slice(extra);
        Self::new(gens)
    }

    pub fn scaled(&self, c: u32) -> Result<Self, LctError> {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                ExponentVector::new(g.entries().iter().map(|&e| e * c).collect())
                    .map_err(|_| LctError::InvalidDegree)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(gens)
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::new(self.generators.iter().map(|g| g.permuted(perm)).collect())
            .expect("permutation keeps the ideal well formed")
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

/// Reads the exponent vectors of a list of monomial generators. Zero
/// generators are dropped; an empty remainder means the map is not locally
/// dominant.
pub fn as_monomial_ideal(gens: &[Polynomial]) -> Result<MonomialIdeal, PolyError> {
    let mut exps = Vec::new();
    for (index, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let (e, _) = g.as_single_term().ok_or(PolyError::NotMonomial { index })?;
        exps.push(e.clone());
    }
    if exps.is_empty() {
        return Err(PolyError::NotLocallyDominant);
    }
    Ok(MonomialIdeal::new(exps).expect("nonempty and uniform length"))
}

/// Optimal diagonal point of the Newton polyhedron: `t*` and the convex weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonDiagonal {
    pub t_star: Rational,
    pub weights: Vec<Rational>,
}

/// Solves `min t` s.t. `Σλ_j = 1`, `λ ≥ 0`, `Σ_j λ_j a_j ≤ t` componentwise.
pub fn newton_diagonal(ideal: &MonomialIdeal) -> Result<NewtonDiagonal, LctError> {
    let g = ideal.generators.len();
    let n = ideal.n;
    // columns: λ_1..λ_g, t, s_1..s_n
    let ncols = g + 1 + n;
    let one = Rational::one();
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    let mut simplex_row = vec![Rational::zero(); ncols];
    for v in simplex_row.iter_mut().take(g) {
        *v = one.clone();
    }
    a.push(simplex_row);
    b.push(one.clone());
    for i in 0..n {
        let mut row = vec![Rational::zero(); ncols];
        for (j, gen) in ideal.generators.iter().enumerate() {
            row[j] = Rational::from_integer(BigInt::from(gen.entries()[i]));
        }
        row[g] = -one.clone();
        row[g + 1 + i] = one.clone();
        a.push(row);
        b.push(Rational::zero());
    }
    let mut c = vec![Rational::zero(); ncols];
    c[g] = one;
    let sol = simplex::minimize(&a, &b, &c)?;
    Ok(NewtonDiagonal {
        t_star: sol.objective,
        weights: sol.x[..g].to_vec(),
    })
}

/// Log-canonical threshold of a monomial ideal at the origin.
pub fn lct_monomial(ideal: &MonomialIdeal) -> Result<Lct, LctError> {
    let value = if ideal.is_unit() {
        ExponentValue::Infinite
    } else {
        let t = newton_diagonal(ideal)?.t_star;
        ExponentValue::finite(t.recip())
    };
    Ok(Lct {
        value,
        validity: FieldValidity::AllLocalFields,
    })
}

/// Threshold of the single monomial `x^a`: `1/max a_i`.
pub fn lct_principal_monomial(a: &ExponentVector) -> Result<Lct, LctError> {
    let max = a.entries().iter().copied().max().unwrap_or(0);
    if max == 0 {
        return Err(LctError::ZeroMonomial);
    }
    Ok(Lct {
        value: ExponentValue::ratio(1, max as i64),
        validity: FieldValidity::AllLocalFields,
    })
}

/// One exceptional or strict-transform divisor of a log-principalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Divisor {
    /// Multiplicity of the pulled-back ideal along the divisor.
    pub a: u64,
    /// Multiplicity of the relative Jacobian along the divisor.
    pub b: u64,
    pub passes_through_x: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct ResolutionData {
    pub divisors: Vec<Divisor>,
}

/// `min (b_i + 1)/a_i` over divisors through the point.
pub fn lct_from_resolution(data: &ResolutionData) -> Result<Lct, LctError> {
    let mut best: Option<Rational> = None;
    for d in data.divisors.iter().filter(|d| d.passes_through_x) {
        if d.a == 0 {
            return Err(LctError::InvalidMultiplicity);
        }
        let v = Rational::new(BigInt::from(d.b + 1), BigInt::from(d.a));
        best = Some(match best {
            Some(b) if b <= v => b,
            _ => v,
        });
    }
    let v = best.ok_or(LctError::NoDivisorThroughPoint)?;
    Ok(Lct {
        value: ExponentValue::finite(v),
        validity: FieldValidity::AllLocalFields,
    })
}

/// Threshold of `Σ x_i^{d_i}` at the origin over ℂ: `min(1, Σ 1/d_i)`.
pub fn lct_diagonal_sum(degrees: &[u64]) -> Result<Lct, LctError> {
    if degrees.is_empty() {
        return Err(LctError::EmptyDegrees);
    }
    if degrees.contains(&0) {
        return Err(LctError::InvalidDegree);
    }
    let sum: Rational = degrees
        .iter()
        .map(|&d| Rational::new(BigInt::one(), BigInt::from(d)))
        .sum();
    let one = Rational::one();
    Ok(Lct {
        value: ExponentValue::finite(if sum < one { sum } else { one }),
        validity: FieldValidity::ComplexOnly,
    })
}

/// Guard: thresholds of proper ideals are strictly positive.
pub fn lct_is_positive(ideal: &MonomialIdeal) -> bool {
    matches!(lct_monomial(ideal), Ok(l) if !l.value.is_zero())
}
