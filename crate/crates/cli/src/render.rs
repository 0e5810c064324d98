use std::fmt::Write as _;

use esl_core::padic::EpsClassification;
use esl_core::report::{Bounds, IdealReport, InvariantReport, Sourced};

fn bounds_line(out: &mut String, label: &str, b: &Bounds) {
    let mut parts = Vec::new();
    if let Some(x) = &b.exact {
        parts.push(format!("= {} [{}]", x.value, x.source));
    }
    if let Some(x) = &b.lower {
        parts.push(format!(">= {} [{}]", x.value, x.source));
    }
    if let Some(x) = &b.upper {
        parts.push(format!("<= {} [{}]", x.value, x.source));
    }
    if !parts.is_empty() {
        let _ = writeln!(out, "{label:<14}{}", parts.join(", "));
    }
}

/// Plain-text rendering of a report for the terminal.
pub fn summary(r: &InvariantReport) -> String {
    let mut out = String::new();
    if let Some(m) = &r.map {
        let _ = writeln!(
            out,
            "map           {}",
            m.spec.trim_end().replace('\n', "; ")
        );
        if m.point.is_some() {
            let _ = writeln!(out, "localized     ({})", m.localized.join(", "));
        }
    }
    if let Some(e) = &r.exact {
        let _ = writeln!(out, "minors        {}", e.jacobian_minors.join(", "));
        match &e.monomial_ideal {
            IdealReport::Monomial { display, .. } => {
                let _ = writeln!(out, "jacobian      {display}");
            }
            IdealReport::NotMonomial { minor, guidance } => {
                let _ = writeln!(
                    out,
                    "jacobian      minor {minor} is not a monomial; {guidance}"
                );
            }
            IdealReport::NotLocallyDominant => {
                let _ = writeln!(out, "jacobian      all minors vanish");
            }
        }
        if let Some(l) = &e.lct_jacobian {
            let _ = writeln!(out, "lct(J)        {} [{}]", l.value, l.source);
        }
        if let Some(l) = &e.lct_map {
            let _ = writeln!(out, "lct(f)        {} [{}]", l.value, l.source);
        }
        bounds_line(&mut out, "eps", &e.eps);
        let k = |v: &Option<Sourced<u64>>| v.as_ref().map_or("?".into(), |s| s.value.to_string());
        if e.k_bounds.lower.is_some() || e.k_bounds.upper.is_some() {
            let _ = writeln!(
                out,
                "k-star        {} ..= {}",
                k(&e.k_bounds.lower),
                k(&e.k_bounds.upper)
            );
        }
        bounds_line(&mut out, "delta", &e.delta);
    }
    if let Some(s) = &r.real {
        let f = &s.fit.value;
        let _ = writeln!(
            out,
            "real          N={} seed={} bins={} ({})",
            s.samples, s.seed, s.bins, s.label
        );
        let _ = writeln!(
            out,
            "lambda_hat    {:.4} +- {:.4} (log power {}, r2 {:.4}, {} bins)",
            f.lambda_hat, f.stderr, f.log_power, f.r2, f.bins_used
        );
        let _ = writeln!(out, "eps_hat       {:.4}", s.eps_hat.value.value());
        if let Some(d) = &s.fourier {
            let _ = writeln!(
                out,
                "delta_hat     {:.4} +- {:.4} ({:?})",
                d.value.delta_hat, d.value.stderr, d.value.status
            );
        }
    }
    if let Some(s) = &r.padic {
        let _ = writeln!(
            out,
            "p-adic        p={} engine={:?}",
            s.p, s.table.value.engine
        );
        let _ = writeln!(out, "  k  ratio");
        for row in &s.table.value.rows {
            let _ = writeln!(out, "{:>3}  {}", row.k, row.ratio);
        }
        if let Some(f) = &s.fit {
            let _ = writeln!(
                out,
                "fit           c = {:.4}, log power {}, period {}",
                f.value.c, f.value.log_power, f.value.period
            );
        }
        if let Some(e) = &s.eps_hat {
            let text = match e.value {
                EpsClassification::Infinite => "inf".to_string(),
                EpsClassification::Finite { eps } => format!("{eps:.4}"),
            };
            let _ = writeln!(out, "eps_hat       {text}");
        }
    }
    for c in &r.checks {
        let _ = writeln!(
            out,
            "{} {} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}
