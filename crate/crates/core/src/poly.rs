//! Exact sparse multivariate polynomials over ℚ and polynomial maps.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Largest exponent a term may carry.
pub const MAX_EXPONENT: u32 = i32::MAX as u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("axis {axis} out of range for {n} variables")]
    AxisOutOfRange { axis: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent overflow (cap is 2^31-1)")]
    ExponentOverflow,
    #[error("map needs at least one component")]
    EmptyMap,
    #[error("target dimension {m} exceeds source dimension {n}")]
    TargetExceedsSource { n: usize, m: usize },
    #[error("generator {index} is not a monomial")]
    NotMonomial { index: usize },
    #[error("all Jacobian minors vanish: map is not locally dominant near this chart")]
    NotLocallyDominant,
}

/// Exponent vector of a monomial. Ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Result<Self, PolyError> {
        if entries.iter().any(|&e| e > MAX_EXPONENT) {
            return Err(PolyError::ExponentOverflow);
        }
        Ok(ExponentVector(entries))
    }

    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![0; n];
        v[axis] = 1;
        ExponentVector(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `self ≥ other` componentwise.
    pub fn dominates(&self, other: &ExponentVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn checked_add(&self, other: &ExponentVector) -> Result<ExponentVector, PolyError> {
        let entries = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| {
                let s = a as u64 + b as u64;
                if s > MAX_EXPONENT as u64 {
                    Err(PolyError::ExponentOverflow)
                } else {
                    Ok(s as u32)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExponentVector(entries))
    }

    pub fn permuted(&self, perm: &[usize]) -> ExponentVector {
        ExponentVector(perm.iter().map(|&i| self.0[i]).collect())
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Sparse polynomial in `n` variables with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Polynomial::zero(n);
        if !c.is_zero() {
            p.terms.insert(ExponentVector::zero(n), c);
        }
        p
    }

    /// The coordinate function `x_{axis+1}` (0-based axis).
    pub fn variable(n: usize, axis: usize) -> Result<Self, PolyError> {
        if axis >= n {
            return Err(PolyError::AxisOutOfRange { axis, n });
        }
        Ok(Polynomial::monomial(
            ExponentVector::unit(n, axis),
            Rational::one(),
        ))
    }

    pub fn monomial(exponent: ExponentVector, c: Rational) -> Self {
        let n = exponent.len();
        let mut p = Polynomial::zero(n);
        if !c.is_zero() {
            p.terms.insert(exponent, c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (ExponentVector, Rational)>,
    {
        let mut p = Polynomial::zero(n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(PolyError::DimensionMismatch {
                    expected: n,
                    got: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: ExponentVector, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// The single term `(exponent, coefficient)` when this is a nonzero monomial.
    pub fn as_single_term(&self) -> Option<(&ExponentVector, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|e| e.degree()).max().unwrap_or(0)
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_same_dim(other)?;
        let mut out = Polynomial::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.checked_add(eb)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Polynomial, PolyError> {
        let mut acc = Polynomial::constant(self.n, Rational::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    fn check_same_dim(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.n != other.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    /// Formal partial derivative along the 0-based `axis`.
    pub fn partial_derivative(&self, axis: usize) -> Result<Polynomial, PolyError> {
        if axis >= self.n {
            return Err(PolyError::AxisOutOfRange { axis, n: self.n });
        }
        let mut out = Polynomial::zero(self.n);
        for (e, c) in &self.terms {
            let k = e.0[axis];
            if k == 0 {
                continue;
            }
            let mut d = e.0.clone();
            d[axis] -= 1;
            out.add_term(
                ExponentVector(d),
                c * Rational::from_integer(BigInt::from(k)),
            );
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    t *= num_traits::pow::Pow::pow(x, k);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating evaluation; term values are combined by pairwise summation.
    pub fn evaluate_f64(&self, point: &[f64]) -> Result<f64, PolyError> {
        if point.len() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: point.len(),
            });
        }
        Ok(self.compiled().eval(point))
    }

    /// Floating-point form for hot loops.
    pub fn compiled(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    (
                        c.to_f64().unwrap_or(f64::NAN),
                        e.0.iter().map(|&k| k as i32).collect(),
                    )
                })
                .collect(),
        }
    }

    /// Substitutes `x_i ↦ x_i + shift_i`.
    pub fn translate(&self, shift: &[Rational]) -> Result<Polynomial, PolyError> {
        if shift.len() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: shift.len(),
            });
        }
        let shifted_vars = (0..self.n)
            .map(|i| {
                let x = Polynomial::variable(self.n, i)?;
                Ok(&x + &Polynomial::constant(self.n, shift[i].clone()))
            })
            .collect::<Result<Vec<_>, PolyError>>()?;
        let mut out = Polynomial::zero(self.n);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(self.n, c.clone());
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&shifted_vars[i].pow(k)?)?;
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Renames variables: variable `i` of the result is variable `perm[i]` of `self`.
    pub fn permute_variables(&self, perm: &[usize]) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.permuted(perm), c.clone()))
                .collect(),
        }
    }
}

impl<'a> std::ops::Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n, "adding polynomials of different arity");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    /// Prints in the map-spec expression syntax, highest graded-lex term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let magnitude = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors = 0;
            if !magnitude.is_one() || e.is_zero() {
                write_rational(f, &magnitude)?;
                factors += 1;
            }
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if factors > 0 {
                    write!(f, "*")?;
                }
                write!(f, "x{}", i + 1)?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
                factors += 1;
            }
        }
        Ok(())
    }
}

/// `f64` evaluation form of a [`Polynomial`].
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<i32>)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut values: Vec<f64> = self
            .terms
            .iter()
            .map(|(c, e)| {
                e.iter().zip(x).fold(
                    *c,
                    |acc, (&k, &xi)| if k == 0 { acc } else { acc * xi.powi(k) },
                )
            })
            .collect();
        pairwise_sum(&mut values)
    }
}

/// Pairwise (cascade) summation; reorders `values` in place.
pub fn pairwise_sum(values: &mut [f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let (a, b) = values.split_at_mut(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Polynomial map `F^n → F^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyMap {
    n: usize,
    components: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(n: usize, components: Vec<Polynomial>) -> Result<Self, PolyError> {
        if components.is_empty() {
            return Err(PolyError::EmptyMap);
        }
        for c in &components {
            if c.nvars() != n {
                return Err(PolyError::DimensionMismatch {
                    expected: n,
                    got: c.nvars(),
                });
            }
        }
        if components.len() > n {
            return Err(PolyError::TargetExceedsSource {
                n,
                m: components.len(),
            });
        }
        Ok(PolyMap { n, components })
    }

    pub fn identity(n: usize) -> Self {
        let components = (0..n)
            .map(|i| Polynomial::variable(n, i).expect("axis in range"))
            .collect();
        PolyMap { n, components }
    }

    pub fn source_dim(&self) -> usize {
        self.n
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.components.iter().all(|c| c.has_integer_coefficients())
    }

    /// Entry `(j, i)` is `∂φ_j/∂x_i`.
    pub fn jacobian_matrix(&self) -> Vec<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|c| {
                (0..self.n)
                    .map(|i| c.partial_derivative(i).expect("axis in range"))
                    .collect()
            })
            .collect()
    }

    /// All maximal `m×m` minors of the differential, one per column subset in
    /// lexicographic order. Zero minors are kept.
    pub fn jacobian_minors(&self) -> Result<Vec<Polynomial>, PolyError> {
        let jac = self.jacobian_matrix();
        let m = self.target_dim();
        column_subsets(self.n, m)
            .into_iter()
            .map(|cols| {
                let sub: Vec<Vec<Polynomial>> = jac
                    .iter()
                    .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
                    .collect();
                determinant(&sub, self.n)
            })
            .collect()
    }

    /// Nonzero maximal minors, i.e. generators of the Jacobian ideal.
    pub fn jacobian_ideal_generators(&self) -> Result<Vec<Polynomial>, PolyError> {
        let gens: Vec<Polynomial> = self
            .jacobian_minors()?
            .into_iter()
            .filter(|p| !p.is_zero())
            .collect();
        if gens.is_empty() {
            return Err(PolyError::NotLocallyDominant);
        }
        Ok(gens)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Vec<Rational>, PolyError> {
        self.components.iter().map(|c| c.evaluate(point)).collect()
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> Result<Vec<f64>, PolyError> {
        self.components
            .iter()
            .map(|c| c.evaluate_f64(point))
            .collect()
    }

    /// `z ↦ φ(x0 + z) − φ(x0)`.
    pub fn shift_to_origin(&self, x0: &[Rational]) -> Result<PolyMap, PolyError> {
        let base = self.evaluate(x0)?;
        let components = self
            .components
            .iter()
            .zip(base)
            .map(|(c, v)| Ok(&c.translate(x0)? - &Polynomial::constant(self.n, v)))
            .collect::<Result<Vec<_>, PolyError>>()?;
        Ok(PolyMap {
            n: self.n,
            components,
        })
    }

    /// Precomposes with a permutation of the source coordinates.
    pub fn permute_source(&self, perm: &[usize]) -> PolyMap {
        PolyMap {
            n: self.n,
            components: self
                .components
                .iter()
                .map(|c| c.permute_variables(perm))
                .collect(),
        }
    }
}

fn column_subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Laplace expansion along the first row; the matrices here are tiny.
fn determinant(mat: &[Vec<Polynomial>], n: usize) -> Result<Polynomial, PolyError> {
    let size = mat.len();
    match size {
        0 => Ok(Polynomial::constant(n, Rational::one())),
        1 => Ok(mat[0][0].clone()),
        _ => {
            let mut acc = Polynomial::zero(n);
            for col in 0..size {
                if mat[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial>> = mat[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != col)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = mat[0][col].mul(&determinant(&minor, n)?)?;
                acc = if col % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            Ok(acc)
        }
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}
