//! The ten acceptance criteria, each reported as one PASS/FAIL line.

use std::time::{Duration, Instant};

use esl_core::invariants::{
    consistency_chain_check, delta_from_eps, eps_equidimensional, eps_from_delta, eps_from_lct,
    eps_lower_bound, eps_upper_bound_complex, k_star_bounds_from_lct, k_star_upper_from_eps,
    lct_from_eps, reverse_young_self, young_combine,
};
use esl_core::lct::{
    as_monomial_ideal, lct_from_resolution, lct_monomial, lct_principal_monomial, Divisor,
    ResolutionData,
};
use esl_core::padic::{
    ball_ratio_sequence_with, closed_form_xy_ratio, fit_padic_lct, xy_map, xy_ratio_lower_bound,
    MassEngine, PAdicConfig,
};
use esl_core::poly::{integer, rational};
use esl_core::real::{
    convolution_power, default_frequency_grid, estimate_delta_star_1d, estimate_eps_star, fit_tail,
    sample_pushforward, Histogram, SampleConfig,
};
use esl_core::{BoundKind, ExponentValue, ExponentVector, PolyMap, Polynomial};
use num_bigint::BigInt;

const SEED: u64 = 20_240_611;
const N: usize = 1_000_000;

fn monomial(e: &[u32]) -> Polynomial {
    Polynomial::monomial(ExponentVector::new(e.to_vec()).unwrap(), integer(1))
}

fn scalar(e: &[u32]) -> PolyMap {
    PolyMap::new(e.len(), vec![monomial(e)]).unwrap()
}

fn q(a: i64, b: i64) -> ExponentValue {
    ExponentValue::ratio(a, b)
}

/// `1/(m − 1/n)`, `1/(m − 1)` and `1/(m − 1 − 1/n)` as exact values.
fn howald_values(n: i64, m: i64) -> (ExponentValue, ExponentValue, ExponentValue) {
    (q(n, m * n - 1), q(1, m - 1), q(n, (m - 1) * n - 1))
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn howald_exact() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 2..=5usize {
        for m in 2..=6u32 {
            let map = scalar(&vec![m; n]);
            let ideal = as_monomial_ideal(&map.jacobian_ideal_generators().unwrap()).unwrap();
            let got = lct_monomial(&ideal).unwrap().value;
            if got != howald_values(n as i64, m as i64).0 {
                bad.push(format!("n={n} m={m} got {got}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed < Duration::from_secs(5);
    outcome(
        pass,
        format!("20 cases in {elapsed:.2?}; mismatches {bad:?}"),
    )
}

fn sandwich() -> Outcome {
    let mut bad = Vec::new();
    for n in 2..=5usize {
        for m in 2..=6u32 {
            let (lower, truth, upper) = howald_values(n as i64, m as i64);
            let map = scalar(&vec![m; n]);
            let lb = eps_lower_bound(&map).unwrap();
            let lct_f = lct_principal_monomial(&ExponentVector::new(vec![m; n]).unwrap()).unwrap();
            let eps = eps_from_lct(&lct_f.value).unwrap();
            let ub = eps_upper_bound_complex(&lb.value);
            let ok = lb.kind == BoundKind::LowerBound
                && lb.value == lower
                && eps == truth
                && ub.as_ref() == Some(&upper)
                && lower <= eps
                && Some(&eps) <= ub.as_ref();
            if !ok {
                bad.push(format!("n={n} m={m}: {} ≤ {eps} ≤ {ub:?}", lb.value));
            }
        }
    }
    outcome(bad.is_empty(), format!("20 cases; failures {bad:?}"))
}

fn equidimensional() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for d in [2u32, 3] {
        for m in [2usize, 3] {
            let mut comps = vec![monomial(&{
                let mut e = vec![0; m];
                e[0] = d;
                e
            })];
            for j in 1..m {
                let mut e = vec![0; m];
                e[0] = d;
                e[j] = 1;
                comps.push(monomial(&e));
            }
            let map = PolyMap::new(m, comps).unwrap();
            let eps = eps_equidimensional(&map).unwrap();
            let want = q(1, (d as usize * m) as i64 - 1);
            let k_up = k_star_upper_from_eps(&eps.value);
            let ok = eps.is_exact() && eps.value == want && k_up == (d as usize * m) as u64 + 1;
            pass &= ok;
            lines.push(format!("d={d} m={m}: ε★={} k★≤{k_up}", eps.value));
        }
    }
    outcome(pass, lines.join("; "))
}

fn samples(map: &PolyMap, count: usize) -> Vec<f64> {
    let cfg = SampleConfig::uniform_cube(map.source_dim(), integer(-1), integer(1), count, SEED);
    sample_pushforward(map, &cfg).unwrap()
}

fn one_dim_real() -> (Outcome, f64) {
    let mut pass = true;
    let mut lines = Vec::new();
    let mut eps_x2 = f64::NAN;
    for d in [2u32, 3] {
        let start = Instant::now();
        let ys = samples(&scalar(&[d]), N);
        let (_, fit) = fit_tail(&ys, 40).unwrap();
        let eps = estimate_eps_star(&fit).value();
        let elapsed = start.elapsed();
        let want_lambda = 1.0 / d as f64;
        let want_eps = 1.0 / (d as f64 - 1.0);
        let ok = (fit.lambda_hat - want_lambda).abs() <= 0.05
            && (eps - want_eps).abs() <= 0.15 * want_eps
            && elapsed < Duration::from_secs(60);
        pass &= ok;
        if d == 2 {
            eps_x2 = eps;
        }
        lines.push(format!(
            "x^{d}: λ̂={:.4} ε̂={eps:.4} ({elapsed:.2?})",
            fit.lambda_hat
        ));
    }
    (outcome(pass, lines.join("; ")), eps_x2)
}

fn fourier(eps_x2: f64) -> Outcome {
    let cfg = SampleConfig::uniform_cube(1, integer(-1), integer(1), N, SEED);
    let fit = estimate_delta_star_1d(&scalar(&[2]), &cfg, &default_frequency_grid()).unwrap();
    let d = fit.delta_hat;
    let implied = d / (1.0 - d);
    let pass = (0.43..=0.57).contains(&d) && (eps_x2 - implied).abs() <= 0.2 * eps_x2;
    outcome(
        pass,
        format!(
            "δ̂={d:.4}±{:.4}, δ̂/(1−δ̂)={implied:.4}, ε̂={eps_x2:.4}",
            fit.stderr
        ),
    )
}

fn padic_xy() -> Outcome {
    let mut pass = true;
    let mut timing = Duration::ZERO;
    for p in [2u64, 3, 5] {
        let start = Instant::now();
        let cfg = PAdicConfig::new(p, 4).unwrap();
        let table =
            ball_ratio_sequence_with(&xy_map(), &cfg, &[BigInt::from(0)], MassEngine::Enumeration)
                .unwrap();
        if p == 5 {
            timing = start.elapsed();
        }
        for row in &table.rows {
            pass &= row.ratio == closed_form_xy_ratio(p, row.k)
                && row.ratio >= xy_ratio_lower_bound(p, row.k);
        }
    }
    pass &= timing < Duration::from_secs(30);
    outcome(
        pass,
        format!("p∈{{2,3,5}}, k≤4 exact; p=5 table in {timing:.2?}"),
    )
}

fn padic_fits() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for d in 2..=5u32 {
        let fit = fit_padic_lct(&monomial(&[d]), 3, 12).unwrap();
        pass &= (fit.c - 1.0 / d as f64).abs() <= 0.02;
        lines.push(format!("x^{d}: {:.4}", fit.c));
    }
    let xy = fit_padic_lct(&monomial(&[1, 1]), 3, 12).unwrap();
    pass &= xy.log_power == 1 && (xy.c - 1.0).abs() <= 0.05;
    lines.push(format!("xy: {:.4} log-power {}", xy.c, xy.log_power));
    outcome(pass, lines.join("; "))
}

fn algebra() -> Outcome {
    let grid: Vec<ExponentValue> = (1..=50).map(|i| q(i, 51)).collect();
    let mut pass = true;
    for c in &grid {
        let e = eps_from_lct(c).unwrap();
        let back = lct_from_eps(&e);
        pass &= back.is_exact() && back.value == *c;
        pass &= eps_from_delta(&delta_from_eps(&e)) == e;
    }
    let eps_grid: Vec<ExponentValue> = (1..=50).map(|i| q(i, 7)).collect();
    for a in &eps_grid {
        for b in eps_grid.iter().step_by(7) {
            pass &= young_combine(a, b) == young_combine(b, a);
            pass &= young_combine(a, b) >= young_combine(&a.clone().min(b.clone()), b);
        }
    }
    for i in 1..=20 {
        let e = q(i, 21);
        let r = reverse_young_self(&young_combine(&e, &e));
        pass &= r.caveat.is_none() && r.value == e;
    }
    for c in &grid {
        let b = k_star_bounds_from_lct(c).unwrap().value;
        let c_r = c.as_rational().unwrap();
        let inv = c_r.recip();
        pass &= b.lower <= b.upper
            && rational(b.lower as i64, 1) >= inv
            && rational(b.upper as i64, 1) > inv
            && k_star_upper_from_eps(&eps_from_lct(c).unwrap()) == b.upper;
    }
    outcome(pass, "50-point grids, 20 reverse-Young points")
}

fn chain() -> Outcome {
    let mut corpus: Vec<Vec<u32>> = (1..=9).map(|d| vec![d]).collect();
    for n in 2..=4usize {
        for m in 1..=6 {
            corpus.push(vec![m; n]);
        }
    }
    let mut bad = Vec::new();
    for e in &corpus {
        let map = scalar(e);
        let grad = as_monomial_ideal(&map.jacobian_ideal_generators().unwrap()).unwrap();
        let lct_grad = lct_monomial(&grad).unwrap().value;
        let principal = lct_principal_monomial(&ExponentVector::new(e.clone()).unwrap())
            .unwrap()
            .value;
        let via_lp = lct_monomial(&as_monomial_ideal(&[monomial(e)]).unwrap())
            .unwrap()
            .value;
        let via_resolution = lct_from_resolution(&ResolutionData {
            divisors: e
                .iter()
                .map(|&a| Divisor {
                    a: a as u64,
                    b: 0,
                    passes_through_x: true,
                })
                .collect(),
        })
        .unwrap()
        .value;
        let agree = principal == via_lp && via_lp == via_resolution;
        if !agree || !consistency_chain_check(&lct_grad, &principal) {
            bad.push(format!(
                "{e:?}: grad {lct_grad}, f {principal}/{via_lp}/{via_resolution}"
            ));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} maps; failures {bad:?}", corpus.len()),
    )
}

fn convolution_sup(ys: &[f64], bins: usize) -> f64 {
    let h = Histogram::uniform(ys, -1.0, 1.0, bins).unwrap();
    convolution_power(&h, 2).unwrap().sup_density()
}

fn convolution() -> Outcome {
    let mut lines = Vec::new();
    let mut growth = Vec::new();
    for d in [2u32, 3] {
        let ys = samples(&scalar(&[d]), N);
        let coarse = convolution_sup(&ys, 1 << 9);
        let fine = convolution_sup(&ys, 1 << 11);
        growth.push(fine / coarse - 1.0);
        lines.push(format!("x^{d}: sup {coarse:.4} → {fine:.4}"));
    }
    outcome(growth[0] < 0.05 && growth[1] > 0.5, lines.join("; "))
}

#[test]
fn acceptance_criteria() {
    let (c4, eps_x2) = one_dim_real();
    let results = [
        ("1 Howald family lct", howald_exact()),
        ("2 sandwich tightness", sandwich()),
        ("3 equidimensional equality", equidimensional()),
        ("4 one-dimensional real numerics", c4),
        ("5 Fourier decay", fourier(eps_x2)),
        ("6 p-adic xy", padic_xy()),
        ("7 p-adic lct fits", padic_fits()),
        ("8 algebra properties", algebra()),
        ("9 Łojasiewicz chain", chain()),
        ("10 convolution boundedness", convolution()),
    ];
    for (name, r) in &results {
        println!(
            "criterion {name}: {} ({})",
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|(_, r)| !r.pass)
        .map(|(n, _)| *n)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
