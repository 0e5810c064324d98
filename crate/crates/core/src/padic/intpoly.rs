use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::poly::Polynomial;

/// Integer-coefficient polynomial prepared for residue arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    pub(crate) n: usize,
    pub(crate) terms: Vec<(BigInt, Vec<u32>)>,
}

impl IntPoly {
    pub fn from_polynomial(p: &Polynomial) -> Option<Self> {
        let terms = p
            .terms()
            .map(|(e, c)| {
                c.is_integer()
                    .then(|| (c.numer().clone(), e.entries().to_vec()))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(IntPoly {
            n: p.nvars(),
            terms,
        })
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    /// Coefficients reduced into `[0, modulus)`.
    pub(crate) fn reduced(&self, modulus: u64) -> Vec<(u128, Vec<u32>)> {
        let m = BigInt::from(modulus);
        self.terms
            .iter()
            .map(|(c, e)| {
                (
                    c.mod_floor(&m).to_u128().expect("reduced below modulus"),
                    e.clone(),
                )
            })
            .collect()
    }
}

pub(crate) fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    (a * b) % m
}

pub(crate) fn powmod(mut base: u128, mut exp: u32, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Evaluates reduced terms at `x` modulo `m`.
pub(crate) fn eval_mod(terms: &[(u128, Vec<u32>)], x: &[u128], m: u128) -> u128 {
    let mut acc = 0u128;
    for (c, e) in terms {
        let mut t = *c;
        for (&xi, &k) in x.iter().zip(e) {
            if k > 0 {
                t = mulmod(t, powmod(xi, k, m), m);
            }
        }
        acc = (acc + t) % m;
    }
    acc
}

/// `val_p(v)` capped at `cap`; `v = 0` (mod p^cap) gives `cap`.
pub(crate) fn capped_valuation(v: u128, p: u64, cap: u32) -> u32 {
    if v == 0 {
        return cap;
    }
    let p = p as u128;
    let mut v = v;
    let mut k = 0;
    while k < cap && v % p == 0 {
        v /= p;
        k += 1;
    }
    k
}
