//! Versioned JSON reports and the command builders behind them.
//!
//! Every numeric field is wrapped in [`Sourced`], naming the operation that
//! produced it. The layout is described by `schema/esl-report-1.schema.json`
//! at the repository root.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::invariants::{
    consistency_chain_check, delta_from_eps, eps_from_lct, eps_upper_bound_complex,
    k_star_bounds_from_lct, k_star_upper_from_eps, InvariantError,
};
use crate::lct::{
    as_monomial_ideal, lct_diagonal_sum, lct_monomial, lct_principal_monomial, Lct, LctError,
};
use crate::mapspec::{MapSpec, MapSpecError};
use crate::padic::{
    ball_ratio_sequence, classify_fit, fit_mass_sequence, EpsClassification, PAdicConfig,
    PadicError, PadicLctFit, PadicMassTable,
};
use crate::poly::{integer, PolyError, PolyMap, Polynomial};
use crate::real::{
    default_frequency_grid, distributional_estimate_check, estimate_delta_star_1d,
    estimate_eps_star, fit_tail, sample_pushforward, sample_pushforward_with_workers, EpsEstimate,
    ExponentFit, FourierDecayFit, Histogram, RealError, SampleConfig,
};
use crate::value::ExponentValue;

pub const SCHEMA_VERSION: &str = "esl-report/1";

/// Shallowest p-adic table whose growth fit is classified.
pub const MIN_CLASSIFY_DEPTH: u32 = 8;

/// Relative tolerance when comparing `ε̂` with an exact `ε★`.
pub const EPS_RELATIVE_TOLERANCE: f64 = 0.15;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    MapSpec(#[from] MapSpecError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Lct(#[from] LctError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Real(#[from] RealError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// A value with the name of the operation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sourced<T> {
    pub value: T,
    pub source: &'static str,
}

fn sourced<T>(value: T, source: &'static str) -> Sourced<T> {
    Sourced { value, source }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapEcho {
    /// Canonical map-spec text.
    pub spec: String,
    pub n: usize,
    pub m: usize,
    pub point: Option<Vec<String>>,
    /// Components after moving the base point to the origin.
    pub localized: Vec<String>,
}

impl MapEcho {
    fn new(spec: &MapSpec, localized: &PolyMap) -> Self {
        MapEcho {
            spec: spec.to_string(),
            n: spec.n,
            m: spec.m,
            point: spec.point.as_ref().map(|p| {
                p.iter()
                    .map(|r| ExponentValue::finite(r.clone()).to_string())
                    .collect()
            }),
            localized: localized
                .components()
                .iter()
                .map(|c| c.to_string())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IdealReport {
    Monomial {
        generators: Vec<Vec<u32>>,
        display: String,
    },
    NotMonomial {
        minor: usize,
        guidance: String,
    },
    NotLocallyDominant,
}

/// What is known about an exponent: any of an exact value and two bounds.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Bounds {
    pub exact: Option<Sourced<ExponentValue>>,
    pub lower: Option<Sourced<ExponentValue>>,
    pub upper: Option<Sourced<ExponentValue>>,
}

impl Bounds {
    fn is_empty(&self) -> bool {
        self.exact.is_none() && self.lower.is_none() && self.upper.is_none()
    }

    fn map(&self, f: impl Fn(&ExponentValue) -> ExponentValue, source: &'static str) -> Bounds {
        let g =
            |s: &Option<Sourced<ExponentValue>>| s.as_ref().map(|s| sourced(f(&s.value), source));
        Bounds {
            exact: g(&self.exact),
            lower: g(&self.lower),
            upper: g(&self.upper),
        }
    }

    /// Best known lower estimate: the exact value, else the lower bound.
    pub fn floor(&self) -> Option<&ExponentValue> {
        self.exact
            .as_ref()
            .or(self.lower.as_ref())
            .map(|s| &s.value)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct KBounds {
    pub lower: Option<Sourced<u64>>,
    pub upper: Option<Sourced<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSection {
    pub jacobian_minors: Vec<String>,
    pub monomial_ideal: IdealReport,
    pub lct_jacobian: Option<Sourced<Lct>>,
    /// `lct(φ)` for scalar maps with monomial or diagonal data.
    pub lct_map: Option<Sourced<Lct>>,
    pub eps: Bounds,
    pub k_bounds: KBounds,
    pub delta: Bounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealSection {
    pub label: &'static str,
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
    pub sample_box: Vec<(String, String)>,
    pub fit: Sourced<ExponentFit>,
    pub eps_hat: Sourced<EpsEstimate>,
    pub fourier: Option<Sourced<FourierDecayFit>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PadicSection {
    pub p: u64,
    pub k_max: u32,
    pub table: Sourced<PadicMassTable>,
    pub fit: Option<Sourced<PadicLctFit>>,
    pub eps_hat: Option<Sourced<EpsClassification>>,
    pub log_explosion: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub map: Option<MapEcho>,
    pub exact: Option<ExactSection>,
    pub real: Option<RealSection>,
    pub padic: Option<PadicSection>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl InvariantReport {
    pub fn new(command: &'static str) -> Self {
        InvariantReport {
            schema: SCHEMA_VERSION,
            command,
            map: None,
            exact: None,
            real: None,
            padic: None,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn note(&mut self, s: &str) {
        if !self.notes.iter().any(|n| n == s) {
            self.notes.push(s.to_string());
        }
    }
}

/// Lowest-order term: in one variable `f = x^a · unit` near 0.
fn lowest_term(f: &Polynomial) -> Polynomial {
    f.terms().next().map_or_else(
        || f.clone(),
        |(e, c)| Polynomial::monomial(e.clone(), c.clone()),
    )
}

/// `lct(f)` at the origin when `f` is a monomial or a sum of pure powers of
/// distinct variables.
fn scalar_lct(f: &Polynomial) -> Result<Option<(Lct, &'static str)>, LctError> {
    if f.is_zero() || f.terms().any(|(e, _)| e.is_zero()) {
        return Ok(None);
    }
    if let Some((e, _)) = f.as_single_term() {
        return Ok(Some((lct_principal_monomial(e)?, "lct_principal_monomial")));
    }
    if f.nvars() == 1 {
        let low = lowest_term(f);
        let (e, _) = low.as_single_term().expect("one term");
        return Ok(Some((lct_principal_monomial(e)?, "lct_principal_monomial")));
    }
    let mut seen = vec![false; f.nvars()];
    let mut degrees = Vec::new();
    for (e, _) in f.terms() {
        let support: Vec<usize> = (0..e.len()).filter(|&i| e.entries()[i] > 0).collect();
        let [axis] = support[..] else { return Ok(None) };
        if std::mem::replace(&mut seen[axis], true) {
            return Ok(None);
        }
        degrees.push(e.entries()[axis] as u64);
    }
    Ok(Some((lct_diagonal_sum(&degrees)?, "lct_diagonal_sum")))
}

fn exact_section(map: &PolyMap, report: &mut InvariantReport) -> Result<ExactSection, ReportError> {
    let (n, m) = (map.source_dim(), map.target_dim());
    let minors = map.jacobian_minors()?;
    let reduced: Vec<Polynomial> = if n == 1 {
        minors.iter().map(lowest_term).collect()
    } else {
        minors.clone()
    };
    let (monomial_ideal, lct_jacobian) = match as_monomial_ideal(&reduced) {
        Ok(ideal) => {
            let lct = lct_monomial(&ideal)?;
            report.note("lct of a monomial ideal read off its Newton polyhedron (Howald)");
            (
                IdealReport::Monomial {
                    generators: ideal
                        .generators()
                        .iter()
                        .map(|g| g.entries().to_vec())
                        .collect(),
                    display: ideal.to_string(),
                },
                Some(sourced(lct, "lct_monomial")),
            )
        }
        Err(PolyError::NotMonomial { index }) => (
            IdealReport::NotMonomial {
                minor: index,
                guidance: "supply log-resolution data (ResolutionData) for this map".into(),
            },
            None,
        ),
        Err(PolyError::NotLocallyDominant) => (IdealReport::NotLocallyDominant, None),
        Err(e) => return Err(e.into()),
    };

    let lct_map = if m == 1 {
        scalar_lct(&map.components()[0])?.map(|(l, src)| sourced(l, src))
    } else {
        None
    };

    let mut eps = Bounds::default();
    if let Some(l) = &lct_map {
        eps.exact = Some(sourced(eps_from_lct(&l.value.value)?, "eps_from_lct"));
        report.note("one-dimensional formula: eps = lct/(1 - lct), infinite when lct >= 1");
    }
    if let Some(lj) = &lct_jacobian {
        if n == m {
            eps.exact = Some(sourced(lj.value.value.clone(), "eps_equidimensional"));
            report.note("equidimensional maps: eps equals the lct of the Jacobian ideal");
        }
        eps.lower = Some(sourced(lj.value.value.clone(), "eps_lower_bound"));
        report.note("eps is at least the lct of the Jacobian ideal");
        if let Some(u) = eps_upper_bound_complex(&lj.value.value) {
            eps.upper = Some(sourced(u, "eps_upper_bound_complex"));
            report.note("upper bound lambda/(1 - lambda) holds over the complex numbers");
        }
    }
    if eps.is_empty() {
        let index = match monomial_ideal {
            IdealReport::NotMonomial { minor, .. } => minor,
            _ => return Err(PolyError::NotLocallyDominant.into()),
        };
        return Err(InvariantError::Poly(PolyError::NotMonomial { index }).into());
    }

    let mut k_bounds = KBounds::default();
    if let Some(e) = eps.floor() {
        k_bounds.upper = Some(sourced(k_star_upper_from_eps(e), "k_star_upper_from_eps"));
        report.note("k-star upper bound from Young's convolution inequality");
    }
    if let Some(l) = &lct_map {
        let kb = k_star_bounds_from_lct(&l.value.value)?;
        if kb.caveat.is_none() {
            k_bounds.lower = Some(sourced(kb.value.lower, "k_star_bounds_from_lct"));
            if k_bounds
                .upper
                .as_ref()
                .is_none_or(|u| kb.value.upper < u.value)
            {
                k_bounds.upper = Some(sourced(kb.value.upper, "k_star_bounds_from_lct"));
            }
        }
    }
    let delta = eps.map(delta_from_eps, "delta_from_eps");
    report.note("delta = eps/(1 + eps)");

    if let (Some(x), Some(lo)) = (&eps.exact, &eps.lower) {
        report.checks.push(Check::new(
            "eps above Jacobian bound",
            x.value >= lo.value,
            format!("{} >= {}", x.value, lo.value),
        ));
    }
    if let (Some(x), Some(up)) = (&eps.exact, &eps.upper) {
        report.checks.push(Check::new(
            "eps below complex bound",
            x.value <= up.value,
            format!("{} <= {}", x.value, up.value),
        ));
    }
    if let (Some(lf), Some(lj)) = (&lct_map, &lct_jacobian) {
        report.checks.push(Check::new(
            "gradient chain",
            consistency_chain_check(&lj.value.value, &lf.value.value),
            format!(
                "lct(grad) = {}, lct(f) = {}",
                lj.value.value, lf.value.value
            ),
        ));
    }

    Ok(ExactSection {
        jacobian_minors: minors.iter().map(|p| p.to_string()).collect(),
        monomial_ideal,
        lct_jacobian,
        lct_map,
        eps,
        k_bounds,
        delta,
    })
}

/// Exact invariants of the map at its base point (the origin by default).
pub fn cmd_exact(spec: &MapSpec) -> Result<InvariantReport, ReportError> {
    let map = spec.localized()?;
    let mut report = InvariantReport::new("exact");
    report.map = Some(MapEcho::new(spec, &map));
    report.exact = Some(exact_section(&map, &mut report)?);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealOptions {
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
    pub workers: Option<usize>,
    pub fourier: bool,
}

fn compare_eps(est: &EpsEstimate, exact: &Bounds) -> Option<Check> {
    let hat = est.value();
    if let Some(x) = &exact.exact {
        let passed = match &x.value {
            ExponentValue::Infinite => hat.is_infinite(),
            v => {
                let e = v.to_f64();
                (hat - e).abs() <= EPS_RELATIVE_TOLERANCE * e
            }
        };
        return Some(Check::new(
            "eps_hat vs exact",
            passed,
            format!("eps_hat = {hat:.4}, exact = {}", x.value),
        ));
    }
    exact.lower.as_ref().map(|lo| {
        let passed = hat >= (1.0 - EPS_RELATIVE_TOLERANCE) * lo.value.to_f64();
        Check::new(
            "eps_hat vs lower bound",
            passed,
            format!("eps_hat = {hat:.4}, lower = {}", lo.value),
        )
    })
}

/// Monte Carlo estimate of `ε★` for a scalar map on `[-1, 1]^n` around the
/// base point. Returns the tail histogram alongside the report.
pub fn cmd_real(
    spec: &MapSpec,
    opts: &RealOptions,
) -> Result<(InvariantReport, Histogram), ReportError> {
    let map = spec.localized()?;
    if map.target_dim() != 1 {
        return Err(RealError::NotScalar(map.target_dim()).into());
    }
    let mut report = InvariantReport::new("real");
    report.map = Some(MapEcho::new(spec, &map));
    let cfg = SampleConfig::uniform_cube(
        map.source_dim(),
        integer(-1),
        integer(1),
        opts.samples,
        opts.seed,
    );
    let samples = match opts.workers {
        Some(w) => sample_pushforward_with_workers(&map, &cfg, w)?,
        None => sample_pushforward(&map, &cfg)?,
    };
    let (hist, fit) = fit_tail(&samples, opts.bins)?;
    let est = estimate_eps_star(&fit);
    let fourier = if opts.fourier {
        report.note("delta_hat from the decay of a tapered Monte Carlo Fourier transform");
        Some(sourced(
            estimate_delta_star_1d(&map, &cfg, &default_frequency_grid())?,
            "estimate_delta_star_1d",
        ))
    } else {
        None
    };
    report.note("fixed-measure estimates: uniform measure on [-1, 1]^n around the base point");
    report.note("tail fit of log density against log |y| over the 0.001..0.05 quantile window");

    match exact_section(&map, &mut report) {
        Ok(exact) => {
            report.checks.extend(compare_eps(&est, &exact.eps));
            if let Some(x) = &exact.eps.exact {
                let ok = distributional_estimate_check(&samples, &x.value);
                report.checks.push(Check::new(
                    "distributional estimate",
                    ok,
                    format!("at eps = {}", x.value),
                ));
            }
            report.exact = Some(exact);
        }
        Err(e) => report.notes.push(format!("no exact comparison: {e}")),
    }
    report.real = Some(RealSection {
        label: "fixed-measure estimate",
        samples: opts.samples,
        seed: opts.seed,
        bins: opts.bins,
        sample_box: vec![("-1".into(), "1".into()); map.source_dim()],
        fit: sourced(fit, "fit_tail"),
        eps_hat: sourced(est, "estimate_eps_star"),
        fourier,
    });
    Ok((report, hist))
}

/// Ratios grow but ever more slowly: polynomial, not geometric, growth.
fn log_explosion(table: &PadicMassTable) -> bool {
    let r: Vec<f64> = table.rows.iter().map(|row| ratio_f64(&row.ratio)).collect();
    if r.len() < 3 {
        return false;
    }
    let tail = &r[r.len() - 3..];
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    let steps: Vec<f64> = r.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let slowing = steps.windows(2).skip(1).all(|w| w[1] <= w[0] + 1e-12);
    increasing && slowing
}

fn ratio_f64(r: &crate::poly::Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact p-adic ball masses around the image of the base point, with a
/// growth fit for scalar maps.
pub fn cmd_padic(
    spec: &MapSpec,
    p: u64,
    k_max: u32,
    cell_budget: u64,
) -> Result<(InvariantReport, PadicMassTable), ReportError> {
    let map = spec.localized()?;
    let cfg = PAdicConfig::new(p, k_max)?.with_budget(cell_budget);
    let y = vec![BigInt::zero(); map.target_dim()];
    let table = ball_ratio_sequence(&map, &cfg, &y)?;
    let mut report = InvariantReport::new("padic");
    report.map = Some(MapEcho::new(spec, &map));
    report.note("masses are exact: Haar measure on Z_p^n, ratio = mass * p^(m k)");

    let (mut fit, mut eps_hat) = (None, None);
    if map.target_dim() == 1 && k_max < MIN_CLASSIFY_DEPTH {
        report.notes.push(format!(
            "eps not classified: depth {k_max} is below {MIN_CLASSIFY_DEPTH}"
        ));
    } else if map.target_dim() == 1 {
        match fit_mass_sequence(&table.masses(), p) {
            Ok(f) => {
                match classify_fit(&f) {
                    Ok(c) => eps_hat = Some(sourced(c, "classify_fit")),
                    Err(e) => report.notes.push(format!("eps not classified: {e}")),
                }
                fit = Some(sourced(f, "fit_mass_sequence"));
            }
            Err(e) => report.notes.push(format!("no fit: {e}")),
        }
    }
    let exploding = log_explosion(&table);
    if exploding {
        report.note("log-explosion detected");
    }
    report.padic = Some(PadicSection {
        p,
        k_max,
        table: sourced(table.clone(), "ball_ratio_sequence"),
        fit,
        eps_hat,
        log_explosion: exploding,
    });
    Ok((report, table))
}
