use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::poly::Rational;

/// Exact `μ{x ∈ ℤ_p^n : val(c·x^a) ≥ k}`.
///
/// The coordinate valuations are independent with `P(v = j) = (1 − 1/p) p^{−j}`,
/// so the mass is a tail probability of `Σ a_i v_i` computed by a truncated
/// convolution.
pub(crate) fn monomial_mass(c: &BigInt, a: &[u32], p: u64, k: u32) -> Rational {
    let vc = valuation(c, p);
    if vc >= k as u64 {
        return Rational::one();
    }
    let cap = (k as u64 - vc) as usize;
    if a.iter().all(|&e| e == 0) {
        return Rational::zero();
    }
    let pr = Rational::from_integer(BigInt::from(p));
    let stay = Rational::one() - Rational::one() / &pr;
    // dist[s] = P(partial sum = s) for s < cap
    let mut dist = vec![Rational::zero(); cap];
    dist[0] = Rational::one();
    let mut tail = Rational::zero();
    for &e in a.iter().filter(|&&e| e > 0) {
        let e = e as usize;
        let mut next = vec![Rational::zero(); cap];
        for (s, q) in dist.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let mut j = 0usize;
            let mut pj = Rational::one();
            while s + e * j < cap {
                next[s + e * j] += q * &stay * &pj;
                pj /= &pr;
                j += 1;
            }
            // P(v ≥ j) = p^{-j}
            tail += q * &pj;
        }
        dist = next;
    }
    tail
}

fn valuation(c: &BigInt, p: u64) -> u64 {
    if c.is_zero() {
        return u64::MAX;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut c = c.clone();
    loop {
        let (q, r) = c.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        c = q;
        v += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::p_power;
    use crate::poly::rational;

    fn power_mass(d: u32, p: u64, k: u32) -> Rational {
        Rational::new(BigInt::one(), p_power(p, k.div_ceil(d) as u64))
    }

    #[test]
    fn pure_power_matches_ceiling() {
        for d in 1..5 {
            for k in 0..9 {
                assert_eq!(
                    monomial_mass(&BigInt::one(), &[d], 3, k),
                    power_mass(d, 3, k)
                );
            }
        }
    }

    #[test]
    fn xy_first_level() {
        assert_eq!(monomial_mass(&BigInt::one(), &[1, 1], 3, 1), rational(5, 9));
    }

    #[test]
    fn coefficient_valuation_shifts_depth() {
        let nine = BigInt::from(9);
        assert_eq!(monomial_mass(&nine, &[1], 3, 2), Rational::one());
        assert_eq!(monomial_mass(&nine, &[1], 3, 3), rational(1, 3));
        assert_eq!(monomial_mass(&BigInt::zero(), &[1], 3, 7), Rational::one());
    }
}
