use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::intpoly::{capped_valuation, mulmod, powmod, IntPoly};
use super::{modulus, p_power, PadicError};
use crate::poly::Rational;

/// Taylor coefficients of `g(x0 + u)` modulo `m`, zero ones dropped.
fn taylor(
    terms: &[(u128, Vec<u32>)],
    x0: &[u128],
    m: u128,
    binom: &[Vec<u128>],
) -> HashMap<Vec<u32>, u128> {
    let mut out: HashMap<Vec<u32>, u128> = HashMap::new();
    for (c, e) in terms {
        let mut alpha = vec![0u32; e.len()];
        loop {
            let mut t = *c;
            for i in 0..e.len() {
                if e[i] > 0 {
                    t = mulmod(t, binom[e[i] as usize][alpha[i] as usize], m);
                    t = mulmod(t, powmod(x0[i], e[i] - alpha[i], m), m);
                }
            }
            if t != 0 {
                let slot = out.entry(alpha.clone()).or_insert(0);
                *slot = (*slot + t) % m;
            }
            let mut i = 0;
            while i < e.len() && alpha[i] == e[i] {
                alpha[i] = 0;
                i += 1;
            }
            if i == e.len() {
                break;
            }
            alpha[i] += 1;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn binomials(max: usize, m: u128) -> Vec<Vec<u128>> {
    let mut rows = vec![vec![1 % m]];
    for d in 1..=max {
        let prev = &rows[d - 1];
        let mut row = vec![1 % m; d + 1];
        for t in 1..d {
            row[t] = (prev[t - 1] + prev[t]) % m;
        }
        rows.push(row);
    }
    rows
}

enum Verdict {
    /// Whole ball lies in the fibre.
    Full,
    Empty,
    /// Fibre occupies `p^{-shortfall}` of the ball.
    Fraction(u32),
    Split,
}

fn classify(t: &HashMap<Vec<u32>, u128>, j: u32, p: u64, k: u32) -> Verdict {
    let mut v0 = k;
    let mut pert = u64::MAX;
    let mut linear = u64::MAX;
    for (alpha, &c) in t {
        let deg: u64 = alpha.iter().map(|&a| a as u64).sum();
        let v = capped_valuation(c, p, k) as u64;
        if deg == 0 {
            v0 = v as u32;
            continue;
        }
        pert = pert.min(j as u64 * deg + v);
        if deg == 1 {
            linear = linear.min(v);
        }
    }
    if v0 >= k && pert >= k as u64 {
        return Verdict::Full;
    }
    if (v0 as u64) < pert {
        return Verdict::Empty;
    }
    if linear == u64::MAX {
        return Verdict::Split;
    }
    let hensel = t.iter().all(|(alpha, &c)| {
        let deg: u64 = alpha.iter().map(|&a| a as u64).sum();
        deg < 2 || j as u64 * deg + capped_valuation(c, p, k) as u64 > j as u64 + linear
    });
    if !hensel {
        return Verdict::Split;
    }
    let level = j as u64 + linear;
    Verdict::Fraction(if (k as u64) <= level {
        0
    } else {
        (k as u64 - level) as u32
    })
}

/// Exact `μ{x ∈ ℤ_p^n : f(x) ≡ y mod p^k}` by ball refinement.
///
/// A ball `x0 + p^j ℤ_p^n` is settled when `val(f − y)` is constant on it,
/// when `f − y ≡ 0` on it, or when the gradient term dominates every higher
/// Taylor term so that `(f − y)/p^t` is a submersion mod `p`.
pub(crate) fn level_mass(
    f: &IntPoly,
    p: u64,
    k: u32,
    y: &BigInt,
    budget: u64,
) -> Result<Rational, PadicError> {
    let n = f.nvars();
    let m = modulus(p, k)?;
    let mm = m as u128;
    let mut terms = f.reduced(m);
    let shift = y.mod_floor(&BigInt::from(m)).to_u128().expect("reduced");
    if shift != 0 {
        terms.push(((mm - shift) % mm, vec![0; n]));
    }
    let max_deg = terms
        .iter()
        .flat_map(|(_, e)| e.iter().copied())
        .max()
        .unwrap_or(0) as usize;
    let binom = binomials(max_deg, mm);

    // counts[e] = number of settled pieces of mass p^{-e}
    let mut counts: Vec<u64> = vec![0; n * k as usize + k as usize + 1];
    let mut stack: Vec<(Vec<u128>, u32)> = vec![(vec![0; n], 0)];
    let mut visited: u64 = 0;
    while let Some((x0, j)) = stack.pop() {
        visited += 1;
        if visited > budget {
            return Err(PadicError::BudgetExceeded {
                needed: format!("more than {budget}"),
                budget,
            });
        }
        let t = taylor(&terms, &x0, mm, &binom);
        let base = n * j as usize;
        match classify(&t, j, p, k) {
            Verdict::Full => counts[base] += 1,
            Verdict::Empty => {}
            Verdict::Fraction(s) => counts[base + s as usize] += 1,
            Verdict::Split => {
                let step = (p as u128).pow(j);
                let mut digit = vec![0u64; n];
                loop {
                    let child = x0
                        .iter()
                        .zip(&digit)
                        .map(|(&a, &d)| a + step * d as u128)
                        .collect();
                    stack.push((child, j + 1));
                    let mut i = 0;
                    while i < n {
                        digit[i] += 1;
                        if digit[i] < p {
                            break;
                        }
                        digit[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
            }
        }
    }
    let top = counts.len() as u64 - 1;
    let mut num = BigInt::zero();
    for (e, &c) in counts.iter().enumerate() {
        if c > 0 {
            num += BigInt::from(c) * p_power(p, top - e as u64);
        }
    }
    Ok(Rational::new(num, p_power(p, top)))
}
