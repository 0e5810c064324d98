//! Built-in verification suites over known closed-form examples.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::invariants::{
    consistency_chain_check, delta_from_eps, eps_from_delta, eps_from_lct, eps_lower_bound,
    eps_upper_bound_complex, k_star_bounds_from_lct, k_star_upper_from_eps, lct_from_eps,
    reverse_young_self, young_combine,
};
use crate::lct::{as_monomial_ideal, lct_monomial, lct_principal_monomial};
use crate::mapspec::MapSpec;
use crate::padic::{
    ball_ratio_sequence, closed_form_xy_ratio, estimate_eps_padic, fit_padic_lct, xy_map,
    xy_ratio_lower_bound, EpsClassification, PAdicConfig,
};
use crate::poly::{integer, rational, ExponentVector, PolyMap, Polynomial};
use crate::real::{estimate_eps_star, fit_tail, sample_pushforward, SampleConfig};
use crate::report::{cmd_exact, Check, InvariantReport};
use crate::value::{BoundKind, ExponentValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    HowaldFamily,
    Equidimensional,
    OneDim,
    PadicXy,
    YoungAlgebra,
    Chain,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::HowaldFamily,
        Suite::Equidimensional,
        Suite::OneDim,
        Suite::PadicXy,
        Suite::YoungAlgebra,
        Suite::Chain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::HowaldFamily => "howald-family",
            Suite::Equidimensional => "equidimensional",
            Suite::OneDim => "one-dim",
            Suite::PadicXy => "padic-xy",
            Suite::YoungAlgebra => "young-algebra",
            Suite::Chain => "chain",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Seed used by the randomized checks.
pub const VERIFY_SEED: u64 = 20_240_611;

fn fin(n: i64, d: i64) -> ExponentValue {
    ExponentValue::finite(rational(n, d))
}

fn monomial_map(rows: &[Vec<u32>]) -> PolyMap {
    let comps = rows
        .iter()
        .map(|r| Polynomial::monomial(ExponentVector::new(r.clone()).unwrap(), integer(1)))
        .collect();
    PolyMap::new(rows[0].len(), comps).expect("well-formed monomial map")
}

fn power_product(n: usize, m: u32) -> PolyMap {
    monomial_map(&[vec![m; n]])
}

fn gradient_lct(map: &PolyMap) -> Option<ExponentValue> {
    let gens = map.jacobian_ideal_generators().ok()?;
    Some(lct_monomial(&as_monomial_ideal(&gens).ok()?).ok()?.value)
}

fn howald_family(out: &mut Vec<Check>) {
    let start = Instant::now();
    for n in 2..=5usize {
        for m in 2..=6i64 {
            let map = power_product(n, m as u32);
            let lambda = fin(n as i64, m * n as i64 - 1);
            let got = gradient_lct(&map);
            out.push(Check::new(
                format!("lct grad (x1..x{n})^{m}"),
                got.as_ref() == Some(&lambda),
                format!("{} vs {lambda}", got.map_or("-".into(), |g| g.to_string())),
            ));
            let truth = fin(1, m - 1);
            let lower = eps_lower_bound(&map).ok().map(|b| b.value);
            let upper = lower.as_ref().and_then(eps_upper_bound_complex);
            let ok = matches!((&lower, &upper), (Some(l), Some(u)) if *l <= truth && truth <= *u)
                && upper == Some(fin(n as i64, (m - 1) * n as i64 - 1));
            out.push(Check::new(
                format!("sandwich (x1..x{n})^{m}"),
                ok,
                format!(
                    "{} <= {truth} <= {}",
                    lower.map_or("-".into(), |v| v.to_string()),
                    upper.map_or("-".into(), |v| v.to_string())
                ),
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    out.push(Check::new(
        "runtime under 5 s",
        secs < 5.0,
        format!("{secs:.3} s"),
    ));
}

fn equidimensional(out: &mut Vec<Check>) {
    for d in [2u32, 3] {
        for m in [2usize, 3] {
            let rows: Vec<Vec<u32>> = (0..m)
                .map(|i| {
                    let mut r = vec![0; m];
                    r[0] = d;
                    if i > 0 {
                        r[i] = 1;
                    }
                    r
                })
                .collect();
            let map = monomial_map(&rows);
            let spec = MapSpec::from_map(map, None).expect("no point");
            let dm = (d as usize * m) as i64;
            let got = cmd_exact(&spec).ok().and_then(|r| r.exact);
            let eps = got.as_ref().and_then(|e| e.eps.exact.clone());
            let k = got.as_ref().and_then(|e| e.k_bounds.upper.clone());
            let ok = eps.as_ref().map(|e| &e.value) == Some(&fin(1, dm - 1))
                && k.as_ref().map(|k| k.value) == Some(dm as u64 + 1);
            out.push(Check::new(
                format!("d={d} m={m}"),
                ok,
                format!(
                    "eps {} (want 1/{}), k upper {} (want {})",
                    eps.map_or("-".into(), |e| e.value.to_string()),
                    dm - 1,
                    k.map_or("-".into(), |k| k.value.to_string()),
                    dm + 1
                ),
            ));
        }
    }
}

fn one_dim(out: &mut Vec<Check>) {
    for d in 2..=9u32 {
        let lct = lct_principal_monomial(&ExponentVector::new(vec![d]).unwrap())
            .unwrap()
            .value;
        let eps = eps_from_lct(&lct).unwrap();
        out.push(Check::new(
            format!("x^{d} exact"),
            eps == fin(1, d as i64 - 1),
            format!("eps = {eps}"),
        ));
    }
    let cfg = SampleConfig::uniform_cube(1, integer(-1), integer(1), 1_000_000, VERIFY_SEED);
    for d in [2u32, 3] {
        let map = power_product(1, d);
        let fit = sample_pushforward(&map, &cfg)
            .ok()
            .and_then(|s| fit_tail(&s, 40).ok())
            .map(|(_, f)| f);
        let (lambda, eps) = fit.as_ref().map_or((f64::NAN, f64::NAN), |f| {
            (f.lambda_hat, estimate_eps_star(f).value())
        });
        let want = 1.0 / (d as f64 - 1.0);
        out.push(Check::new(
            format!("x^{d} real tail"),
            (lambda - 1.0 / d as f64).abs() <= 0.05 && (eps - want).abs() <= 0.15 * want,
            format!("lambda_hat {lambda:.4}, eps_hat {eps:.4}"),
        ));
    }
    for d in [2u32, 3, 4] {
        let f = Polynomial::monomial(ExponentVector::new(vec![d]).unwrap(), integer(1));
        let c = fit_padic_lct(&f, 3, 12).map_or(f64::NAN, |fit| fit.c);
        out.push(Check::new(
            format!("x^{d} p-adic lct"),
            (c - 1.0 / d as f64).abs() <= 0.02,
            format!("c = {c:.4} at p = 3, k <= 12"),
        ));
    }
}

fn padic_xy(out: &mut Vec<Check>) {
    let zero = [BigInt::zero()];
    for p in [2u64, 3, 5] {
        let start = Instant::now();
        let table = PAdicConfig::new(p, 4)
            .ok()
            .and_then(|cfg| ball_ratio_sequence(&xy_map(), &cfg, &zero).ok());
        let secs = start.elapsed().as_secs_f64();
        let Some(table) = table else {
            out.push(Check::new(
                format!("p={p} table"),
                false,
                "enumeration failed",
            ));
            continue;
        };
        for row in &table.rows {
            let want = closed_form_xy_ratio(p, row.k);
            let bound = xy_ratio_lower_bound(p, row.k);
            out.push(Check::new(
                format!("p={p} k={}", row.k),
                row.ratio == want && row.ratio >= bound,
                format!("ratio {} = {want} >= {bound}", row.ratio),
            ));
        }
        if p == 5 {
            out.push(Check::new(
                "p=5 runtime under 30 s",
                secs < 30.0,
                format!("{secs:.3} s"),
            ));
        }
    }
    let fit = PAdicConfig::new(3, 12)
        .ok()
        .and_then(|cfg| estimate_eps_padic(&xy_map(), &cfg, &zero).ok());
    let ok = fit.as_ref().is_some_and(|e| {
        e.classification == EpsClassification::Infinite
            && e.fit.log_power == 1
            && (e.fit.c - 1.0).abs() <= 0.05
    });
    out.push(Check::new(
        "xy fit: lct 1, log power 1",
        ok,
        fit.map_or("fit failed".into(), |e| {
            format!("c = {:.4}, log power {}", e.fit.c, e.fit.log_power)
        }),
    ));
}

fn young_algebra(out: &mut Vec<Check>) {
    let unit: Vec<ExponentValue> = (1..=50).map(|i| fin(i, 51)).collect();
    let pos: Vec<ExponentValue> = (1..=50).map(|i| fin(i, 7)).collect();

    let lct_rt = unit.iter().all(|c| {
        let b = lct_from_eps(&eps_from_lct(c).unwrap());
        b.kind == BoundKind::Exact && b.value == *c
    });
    out.push(Check::new(
        "eps <-> lct round trip",
        lct_rt,
        "50 points in (0, 1)",
    ));
    let delta_rt = pos.iter().all(|e| eps_from_delta(&delta_from_eps(e)) == *e);
    out.push(Check::new(
        "eps <-> delta round trip",
        delta_rt,
        "50 points i/7",
    ));

    let mut comm = true;
    let mut mono = true;
    for a in &pos {
        for b in &pos {
            comm &= young_combine(a, b) == young_combine(b, a);
            for c in &pos {
                if a <= c {
                    mono &= young_combine(a, b) <= young_combine(c, b);
                }
            }
        }
    }
    comm &= pos
        .iter()
        .all(|e| young_combine(e, &ExponentValue::Infinite) == ExponentValue::Infinite);
    out.push(Check::new("young commutative", comm, "50 x 50 grid"));
    out.push(Check::new("young monotone", mono, "50 x 50 x 50 grid"));

    let rev = (1..=20).all(|i| {
        let e = fin(i, 21);
        reverse_young_self(&young_combine(&e, &e)).value == e
    });
    out.push(Check::new(
        "reverse young inverts self-combination",
        rev,
        "20 points i/21",
    ));

    let sandwich = unit.iter().all(|c| {
        let kb = k_star_bounds_from_lct(c).unwrap().value;
        let upper = k_star_upper_from_eps(&eps_from_lct(c).unwrap());
        let r = c.as_rational().unwrap().recip();
        kb.lower <= upper && (r.is_integer() || upper - kb.lower <= 1)
    });
    out.push(Check::new(
        "k-star sandwich",
        sandwich,
        "50 lct values i/51",
    ));
}

fn chain(out: &mut Vec<Check>) {
    let mut corpus: Vec<(String, PolyMap)> = (2..=9)
        .map(|d| (format!("x^{d}"), power_product(1, d)))
        .collect();
    for n in 2..=4 {
        for m in 2..=6 {
            corpus.push((format!("(x1..x{n})^{m}"), power_product(n, m)));
        }
    }
    for (name, map) in corpus {
        let f = map.components()[0].as_single_term().map(|(e, _)| e.clone());
        let lct_f = f
            .and_then(|e| lct_principal_monomial(&e).ok())
            .map(|l| l.value);
        let lct_grad = gradient_lct(&map);
        let (ok, detail) = match (&lct_grad, &lct_f) {
            (Some(g), Some(f)) => (
                consistency_chain_check(g, f),
                format!("lct(grad) = {g}, lct(f) = {f}"),
            ),
            _ => (false, "lct unavailable".into()),
        };
        out.push(Check::new(name, ok, detail));
    }
}

/// Runs one suite; the report passes iff every check does.
pub fn run_suite(suite: Suite) -> InvariantReport {
    run_suites(&[suite])
}

/// Runs several suites into one report.
pub fn run_suites(suites: &[Suite]) -> InvariantReport {
    let mut report = InvariantReport::new("verify");
    for &suite in suites {
        report.checks.extend(suite_checks(suite));
    }
    report
}

fn suite_checks(suite: Suite) -> Vec<Check> {
    let mut checks = Vec::new();
    match suite {
        Suite::HowaldFamily => howald_family(&mut checks),
        Suite::Equidimensional => equidimensional(&mut checks),
        Suite::OneDim => one_dim(&mut checks),
        Suite::PadicXy => padic_xy(&mut checks),
        Suite::YoungAlgebra => young_algebra(&mut checks),
        Suite::Chain => chain(&mut checks),
    }
    checks
        .into_iter()
        .map(|c| Check::new(format!("{suite}: {}", c.name), c.passed, c.detail))
        .collect()
}
