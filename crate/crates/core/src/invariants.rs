//! Closed-form relations among ε★, lct, δ★ and k★.
//!
//! Most relations are the same Möbius map in disguise: writing
//! `θ(e) = e/(1+e)` (with `θ(∞) = 1`), ε★ of a one-dimensional map is
//! `θ⁻¹(lct)`, δ★ is `θ(ε★)`, and Young's inequality adds θ-values.
//! Everything here is exact rational arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lct::{as_monomial_ideal, lct_monomial, LctError};
use crate::poly::{PolyError, PolyMap, Rational};
use crate::value::{BoundedValue, ExponentValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("log-canonical threshold 0 is impossible for a nonzero ideal")]
    ZeroLct,
    #[error("map must be equidimensional (n = m), got n={n}, m={m}")]
    NotEquidimensional { n: usize, m: usize },
    #[error("threshold {0} outside (0, 1]")]
    OutOfUnitInterval(String),
    #[error("local model exponent lists differ in length or have a_i = 0")]
    MalformedModel,
    #[error(
        "{0}; Jacobian minors that are not monomials need a log-resolution, supply ResolutionData instead"
    )]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Lct(#[from] LctError),
}

/// Why a returned value sits on a convention rather than the formula proper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Caveat {
    /// Infinite input mapped to +∞ by convention.
    InfiniteInput,
    /// Threshold ≥ 1: k★ bounds degenerate to (1, 2).
    DegenerateKStar,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Flagged<T> {
    pub value: T,
    pub caveat: Option<Caveat>,
}

impl<T> Flagged<T> {
    fn clean(value: T) -> Self {
        Flagged {
            value,
            caveat: None,
        }
    }
}

/// Pushforward of `|x_1|^{b_1}…|x_n|^{b_n} dx` under `x_1^{a_1}…x_n^{a_n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MonomialLocalModel {
    a: Vec<u64>,
    b: Vec<u64>,
}

impl MonomialLocalModel {
    pub fn new(a: Vec<u64>, b: Vec<u64>) -> Result<Self, InvariantError> {
        if a.len() != b.len() || a.is_empty() || a.contains(&0) {
            return Err(InvariantError::MalformedModel);
        }
        Ok(MonomialLocalModel { a, b })
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct KStarBounds {
    pub lower: u64,
    pub upper: u64,
}

fn one() -> Rational {
    Rational::one()
}

fn to_u64_saturating(v: &BigInt) -> u64 {
    v.to_u64().unwrap_or(u64::MAX)
}

/// ε★ of a one-dimensional map from `lct(φ − φ(x))`.
pub fn eps_from_lct(c: &ExponentValue) -> Result<ExponentValue, InvariantError> {
    match c {
        ExponentValue::Infinite => Ok(ExponentValue::Infinite),
        ExponentValue::Finite(r) if r.is_zero() => Err(InvariantError::ZeroLct),
        ExponentValue::Finite(r) => Ok(ExponentValue::from_conjugate_fraction(r)),
    }
}

/// Inverse of [`eps_from_lct`]. `ε★ = ∞` only pins `lct ≥ 1`.
pub fn lct_from_eps(e: &ExponentValue) -> BoundedValue {
    match e {
        ExponentValue::Infinite => BoundedValue::lower(ExponentValue::integer(1)),
        finite => BoundedValue::exact(ExponentValue::finite(finite.conjugate_fraction())),
    }
}

/// ε★ of the monomial local model: `c = min (b_i+1)/a_i`, then `θ⁻¹(c)`.
/// Exact when the smooth density does not vanish at the origin.
pub fn eps_monomial_model(model: &MonomialLocalModel, density_nonvanishing: bool) -> BoundedValue {
    let c = model
        .a
        .iter()
        .zip(&model.b)
        .map(|(&a, &b)| Rational::new(BigInt::from(b + 1), BigInt::from(a)))
        .min()
        .expect("model is nonempty");
    let value = ExponentValue::from_conjugate_fraction(&c);
    if density_nonvanishing {
        BoundedValue::exact(value)
    } else {
        BoundedValue::lower(value)
    }
}

fn jacobian_lct(map: &PolyMap) -> Result<ExponentValue, InvariantError> {
    let gens = map.jacobian_ideal_generators()?;
    let ideal = as_monomial_ideal(&gens)?;
    Ok(lct_monomial(&ideal)?.value)
}

/// Equidimensional maps: ε★ equals the lct of the Jacobian ideal at the origin.
pub fn eps_equidimensional(map: &PolyMap) -> Result<BoundedValue, InvariantError> {
    let (n, m) = (map.source_dim(), map.target_dim());
    if n != m {
        return Err(InvariantError::NotEquidimensional { n, m });
    }
    Ok(BoundedValue::exact(jacobian_lct(map)?))
}

/// `ε★ ≥ lct(J_φ)` at the origin.
pub fn eps_lower_bound(map: &PolyMap) -> Result<BoundedValue, InvariantError> {
    Ok(BoundedValue::lower(jacobian_lct(map)?))
}

/// Complex upper bound `λ/(1−λ)`; `None` when `λ ≥ 1`.
pub fn eps_upper_bound_complex(lct_j: &ExponentValue) -> Option<ExponentValue> {
    match lct_j {
        ExponentValue::Finite(r) if *r < one() => Some(ExponentValue::from_conjugate_fraction(r)),
        _ => None,
    }
}

/// Best exponent Young's convolution inequality guarantees for `ν1 * ν2`.
pub fn young_combine(e1: &ExponentValue, e2: &ExponentValue) -> ExponentValue {
    let s = e1.conjugate_fraction() + e2.conjugate_fraction();
    ExponentValue::from_conjugate_fraction(&s)
}

/// If `ν*ν ∈ L^{1+e}` then `ν ∈ L^{1+e/(2+e)}`.
pub fn reverse_young_self(e: &ExponentValue) -> Flagged<ExponentValue> {
    match e {
        ExponentValue::Infinite => Flagged {
            value: ExponentValue::Infinite,
            caveat: Some(Caveat::InfiniteInput),
        },
        ExponentValue::Finite(r) => Flagged::clean(ExponentValue::finite(
            r / (r + Rational::from_integer(2.into())),
        )),
    }
}

/// Strict reverse-Young inequality `θ(e1) + θ(e2) > θ(e)`.
pub fn reverse_young_check(e1: &ExponentValue, e2: &ExponentValue, e: &ExponentValue) -> bool {
    e1.conjugate_fraction() + e2.conjugate_fraction() > e.conjugate_fraction()
}

/// `⌈1/c⌉ ≤ k★ ≤ ⌊1/c⌋ + 1` for `c ∈ (0, 1]`.
pub fn k_star_bounds_from_lct(c: &ExponentValue) -> Result<Flagged<KStarBounds>, InvariantError> {
    let degenerate = Flagged {
        value: KStarBounds { lower: 1, upper: 2 },
        caveat: Some(Caveat::DegenerateKStar),
    };
    let r = match c {
        ExponentValue::Infinite => return Ok(degenerate),
        ExponentValue::Finite(r) if r.is_zero() => return Err(InvariantError::ZeroLct),
        ExponentValue::Finite(r) if *r > one() => return Ok(degenerate),
        ExponentValue::Finite(r) => r,
    };
    let inv = r.recip();
    let lower = to_u64_saturating(&inv.ceil().to_integer());
    let upper = to_u64_saturating(&(inv.floor().to_integer() + BigInt::one()));
    Ok(Flagged::clean(KStarBounds { lower, upper }))
}

/// `k★ ≤ ⌊(1+ε)/ε⌋ + 1`; `ε = ∞` gives 2 (ε★ = ∞ does not force bounded density).
pub fn k_star_upper_from_eps(e: &ExponentValue) -> u64 {
    match e {
        ExponentValue::Infinite => 2,
        ExponentValue::Finite(r) if r.is_zero() => u64::MAX,
        ExponentValue::Finite(r) => {
            let q = (r + one()) / r;
            let (floor, _) = q.numer().div_mod_floor(q.denom());
            to_u64_saturating(&floor).saturating_add(1)
        }
    }
}

pub fn delta_from_eps(e: &ExponentValue) -> ExponentValue {
    ExponentValue::finite(e.conjugate_fraction())
}

pub fn eps_from_delta(d: &ExponentValue) -> ExponentValue {
    match d {
        ExponentValue::Infinite => ExponentValue::Infinite,
        ExponentValue::Finite(r) => ExponentValue::from_conjugate_fraction(r),
    }
}

/// lct of `φ_1(x) + φ_2(y)`: additive below 1, otherwise only `≥ 1`.
pub fn thom_sebastiani(
    c1: &ExponentValue,
    c2: &ExponentValue,
) -> Result<BoundedValue, InvariantError> {
    let unit = |c: &ExponentValue| -> Result<Rational, InvariantError> {
        match c {
            ExponentValue::Finite(r) if r.is_positive() && *r <= one() => Ok(r.clone()),
            other => Err(InvariantError::OutOfUnitInterval(other.to_string())),
        }
    };
    let s = unit(c1)? + unit(c2)?;
    if s < one() {
        Ok(BoundedValue::exact(ExponentValue::finite(s)))
    } else {
        Ok(BoundedValue::lower(ExponentValue::integer(1)))
    }
}

/// Łojasiewicz-type chain between `lct⟨∇φ⟩` and `lct(φ)`:
/// `θ⁻¹(lct_grad) ≥ θ⁻¹(lct_f) ≥ lct_grad ≥ lct_f`, each middle/left clause
/// only when its argument is below 1.
pub fn consistency_chain_check(lct_grad: &ExponentValue, lct_f: &ExponentValue) -> bool {
    if lct_grad < lct_f {
        return false;
    }
    let below_one = |v: &ExponentValue| matches!(v, ExponentValue::Finite(r) if *r < one());
    if below_one(lct_f) {
        let eps_f = ExponentValue::from_conjugate_fraction(lct_f.as_rational().unwrap());
        if eps_f < *lct_grad {
            return false;
        }
        if below_one(lct_grad) {
            let eps_grad = ExponentValue::from_conjugate_fraction(lct_grad.as_rational().unwrap());
            if eps_grad < eps_f {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{integer, ExponentVector, Polynomial};

    fn q(a: i64, b: i64) -> ExponentValue {
        ExponentValue::ratio(a, b)
    }

    const INF: ExponentValue = ExponentValue::Infinite;

    #[test]
    fn eps_lct_examples() {
        assert_eq!(eps_from_lct(&q(1, 2)).unwrap(), q(1, 1));
        assert_eq!(eps_from_lct(&q(1, 1)).unwrap(), INF);
        for m in 2..10 {
            assert_eq!(eps_from_lct(&q(1, m)).unwrap(), q(1, m - 1));
        }
        assert_eq!(eps_from_lct(&q(0, 1)), Err(InvariantError::ZeroLct));

        assert_eq!(lct_from_eps(&q(1, 1)), BoundedValue::exact(q(1, 2)));
        assert_eq!(lct_from_eps(&INF), BoundedValue::lower(q(1, 1)));
        assert_eq!(lct_from_eps(&q(1, 999)), BoundedValue::exact(q(1, 1000)));
    }

    #[test]
    fn monomial_model_examples() {
        let model = |a: Vec<u64>, b: Vec<u64>| MonomialLocalModel::new(a, b).unwrap();
        assert_eq!(
            eps_monomial_model(&model(vec![2], vec![0]), true),
            BoundedValue::exact(q(1, 1))
        );
        assert_eq!(
            eps_monomial_model(&model(vec![1], vec![0]), true),
            BoundedValue::exact(INF)
        );
        for m in 2..7 {
            assert_eq!(
                eps_monomial_model(&model(vec![m, m], vec![0, 0]), true),
                BoundedValue::exact(q(1, m as i64 - 1))
            );
        }
        assert_eq!(
            eps_monomial_model(&model(vec![2], vec![0]), false).kind,
            crate::BoundKind::LowerBound
        );
        assert!(MonomialLocalModel::new(vec![0], vec![0]).is_err());
        assert!(MonomialLocalModel::new(vec![1, 2], vec![0]).is_err());
    }

    #[test]
    fn upper_bound_examples() {
        for n in 2..6i64 {
            for m in 2..7i64 {
                // λ = 1/(m − 1/n) = n/(mn − 1), bound 1/(m − 1 − 1/n) = n/(mn − n − 1)
                assert_eq!(
                    eps_upper_bound_complex(&q(n, m * n - 1)),
                    Some(q(n, m * n - n - 1))
                );
            }
        }
        assert_eq!(eps_upper_bound_complex(&q(1, 1)), None);
        assert_eq!(eps_upper_bound_complex(&INF), None);
        assert_eq!(eps_upper_bound_complex(&q(1, 2)), Some(q(1, 1)));
    }

    #[test]
    fn young_examples() {
        assert_eq!(young_combine(&q(1, 1), &q(1, 1)), INF);
        assert_eq!(young_combine(&q(1, 2), &q(1, 2)), q(2, 1));
        assert_eq!(young_combine(&q(3, 7), &INF), INF);
    }

    #[test]
    fn reverse_young_examples() {
        assert_eq!(reverse_young_self(&q(2, 1)).value, q(1, 2));
        assert_eq!(reverse_young_self(&q(1, 100)).value, q(1, 201));
        let inf = reverse_young_self(&INF);
        assert_eq!(inf.value, INF);
        assert_eq!(inf.caveat, Some(Caveat::InfiniteInput));

        assert!(reverse_young_check(&q(1, 1), &q(1, 1), &q(1000, 1)));
        assert!(!reverse_young_check(&q(1, 2), &q(1, 2), &q(2, 1)));
        assert!(reverse_young_check(&INF, &INF, &INF));
    }

    #[test]
    fn k_star_examples() {
        for d in 1..12u64 {
            let b = k_star_bounds_from_lct(&q(1, d as i64)).unwrap();
            assert_eq!((b.value.lower, b.value.upper), (d, d + 1));
        }
        let b = k_star_bounds_from_lct(&INF).unwrap();
        assert_eq!((b.value.lower, b.value.upper), (1, 2));
        assert_eq!(b.caveat, Some(Caveat::DegenerateKStar));
        assert_eq!(
            k_star_bounds_from_lct(&q(3, 2)).unwrap().caveat,
            Some(Caveat::DegenerateKStar)
        );
        for n in 2..6i64 {
            for m in 2..7i64 {
                let b = k_star_bounds_from_lct(&q(n, m * n - 1)).unwrap().value;
                assert_eq!((b.lower, b.upper), (m as u64, m as u64));
            }
        }

        assert_eq!(k_star_upper_from_eps(&q(1, 999)), 1001);
        assert_eq!(k_star_upper_from_eps(&q(1, 1)), 3);
        assert_eq!(k_star_upper_from_eps(&INF), 2);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(eps_from_delta(&q(1, 2)), q(1, 1));
        assert_eq!(eps_from_delta(&q(1, 1)), INF);
        assert_eq!(delta_from_eps(&q(1, 999)), q(1, 1000));
        assert_eq!(delta_from_eps(&INF), q(1, 1));
    }

    #[test]
    fn thom_sebastiani_examples() {
        assert_eq!(
            thom_sebastiani(&q(1, 2), &q(1, 2)).unwrap(),
            BoundedValue::lower(q(1, 1))
        );
        assert_eq!(
            thom_sebastiani(&q(1, 4), &q(1, 4)).unwrap(),
            BoundedValue::exact(q(1, 2))
        );
        assert_eq!(
            thom_sebastiani(&q(1, 3), &q(1, 3)).unwrap(),
            BoundedValue::exact(q(2, 3))
        );
        assert!(thom_sebastiani(&q(3, 2), &q(1, 3)).is_err());
        assert!(thom_sebastiani(&q(0, 1), &q(1, 3)).is_err());
    }

    #[test]
    fn chain_examples() {
        for d in 3..10i64 {
            assert!(consistency_chain_check(&q(1, d - 1), &q(1, d)));
        }
        for m in 2..7i64 {
            assert!(consistency_chain_check(&q(2, 2 * m - 1), &q(1, m)));
        }
        assert!(consistency_chain_check(&q(1, 1), &q(1, 1)));
        // violates lct_grad ≥ lct_f
        assert!(!consistency_chain_check(&q(1, 3), &q(1, 2)));
        // violates θ⁻¹(lct_f) ≥ lct_grad
        assert!(!consistency_chain_check(&q(9, 10), &q(1, 3)));
    }

    #[test]
    fn equidimensional_examples() {
        let mono = |e: &[u32], c: i64| {
            Polynomial::monomial(ExponentVector::new(e.to_vec()).unwrap(), integer(c))
        };
        // (x1^2, x1^2 x2): Jacobian 2 x1^3
        let phi = PolyMap::new(2, vec![mono(&[2, 0], 1), mono(&[2, 1], 1)]).unwrap();
        assert_eq!(
            eps_equidimensional(&phi).unwrap(),
            BoundedValue::exact(q(1, 3))
        );
        assert_eq!(
            eps_equidimensional(&PolyMap::identity(3)).unwrap(),
            BoundedValue::exact(INF)
        );
        let xy = PolyMap::new(2, vec![mono(&[1, 1], 1)]).unwrap();
        assert_eq!(
            eps_equidimensional(&xy),
            Err(InvariantError::NotEquidimensional { n: 2, m: 1 })
        );
        assert_eq!(eps_lower_bound(&xy).unwrap(), BoundedValue::lower(q(2, 1)));
        assert_eq!(
            eps_lower_bound(&PolyMap::identity(2)).unwrap(),
            BoundedValue::lower(INF)
        );

        let x = Polynomial::variable(2, 0).unwrap();
        let y = Polynomial::variable(2, 1).unwrap();
        let non_monomial = PolyMap::new(2, vec![&x + &y, x.mul(&y).unwrap()]).unwrap();
        assert!(matches!(
            eps_equidimensional(&non_monomial),
            Err(InvariantError::Poly(PolyError::NotMonomial { .. }))
        ));
    }
}
