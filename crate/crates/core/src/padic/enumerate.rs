use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::intpoly::{eval_mod, IntPoly};
use super::{is_prime, modulus, PadicError};
use crate::poly::PolyMap;

fn cell_count(p: u64, n: usize, k: u32, budget: u64) -> Result<(), PadicError> {
    let needed = num_traits::Pow::pow(BigInt::from(p), n as u64 * k as u64);
    if needed > BigInt::from(budget) {
        return Err(PadicError::BudgetExceeded {
            needed: needed.to_string(),
            budget,
        });
    }
    Ok(())
}

/// Visits every `x ∈ (ℤ/M)^n` whose first coordinate is `lead`.
fn for_each_tail(n: usize, m: u64, lead: u64, mut visit: impl FnMut(&[u128])) {
    let mut x = vec![0u128; n];
    x[0] = lead as u128;
    loop {
        visit(&x);
        let mut i = n;
        loop {
            if i == 1 {
                return;
            }
            i -= 1;
            x[i] += 1;
            if x[i] < m as u128 {
                break;
            }
            x[i] = 0;
        }
    }
}

pub(crate) fn count_fiber(
    comps: &[IntPoly],
    n: usize,
    p: u64,
    k: u32,
    y: &[BigInt],
    budget: u64,
) -> Result<u64, PadicError> {
    cell_count(p, n, k, budget)?;
    let m = modulus(p, k)?;
    let reduced: Vec<_> = comps.iter().map(|c| c.reduced(m)).collect();
    let target: Vec<u128> = y
        .iter()
        .map(|v| v.mod_floor(&BigInt::from(m)).to_u128().expect("reduced"))
        .collect();
    let mm = m as u128;
    let count = (0..m)
        .into_par_iter()
        .map(|lead| {
            let mut c = 0u64;
            for_each_tail(n, m, lead, |x| {
                if reduced
                    .iter()
                    .zip(&target)
                    .all(|(f, &t)| eval_mod(f, x, mm) == t)
                {
                    c += 1;
                }
            });
            c
        })
        .sum();
    Ok(count)
}

/// Counts `#{x mod p^k : φ(x) ≡ v}` for every residue vector `v` that occurs.
pub fn value_distribution(
    map: &PolyMap,
    p: u64,
    k: u32,
    cell_budget: u64,
) -> Result<BTreeMap<Vec<u64>, u64>, PadicError> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    let n = map.source_dim();
    cell_count(p, n, k, cell_budget)?;
    let m = modulus(p, k)?;
    let reduced: Vec<_> = map
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            IntPoly::from_polynomial(c)
                .map(|f| f.reduced(m))
                .ok_or(PadicError::NonIntegral(i))
        })
        .collect::<Result<_, _>>()?;
    let mm = m as u128;
    let merged = (0..m)
        .into_par_iter()
        .map(|lead| {
            let mut hist: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
            for_each_tail(n, m, lead, |x| {
                let v = reduced.iter().map(|f| eval_mod(f, x, mm) as u64).collect();
                *hist.entry(v).or_default() += 1;
            });
            hist
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, c) in b {
                *a.entry(key).or_default() += c;
            }
            a
        });
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{integer, ExponentVector, Polynomial};

    #[test]
    fn distribution_sums_to_all_cells() {
        let f = Polynomial::monomial(ExponentVector::new(vec![2, 1]).unwrap(), integer(1));
        let map = PolyMap::new(2, vec![f]).unwrap();
        let d = value_distribution(&map, 3, 2, 1 << 20).unwrap();
        assert_eq!(d.values().sum::<u64>(), 81);
    }

    #[test]
    fn single_variable_walk() {
        let mut seen = Vec::new();
        for_each_tail(1, 5, 3, |x| seen.push(x[0]));
        assert_eq!(seen, vec![3]);
        let mut count = 0;
        for_each_tail(3, 4, 0, |_| count += 1);
        assert_eq!(count, 16);
    }
}
