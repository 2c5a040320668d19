//! Rendering and numeric cross-check helpers for the command-line front end.
//!
//! Exact fractions are always present in the output; decimal renderings are
//! annotations controlled by an explicit precision flag.

use crate::config::{StratumKind, SurfaceConfig};
use crate::delta::{DeltaCertificate, LemmaReport, ReportEntry};
use crate::lattice::{fmt_rat, Rat};
use crate::zariski::{ParamDecomp, PiecewiseFunc, QuadPoly};
use num_traits::ToPrimitive;
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    pub format: ReportFormat,
    pub digits: Option<u32>,
}

impl RenderOptions {
    fn value(&self, x: &Rat) -> String {
        match self.digits {
            None => fmt_rat(x),
            Some(d) => format!(
                "{} (~{:.*})",
                fmt_rat(x),
                d as usize,
                x.to_f64().unwrap_or(f64::NAN)
            ),
        }
    }
}

pub fn fmt_poly(p: &QuadPoly) -> String {
    use num_traits::{Signed, Zero};
    let mut terms: Vec<String> = Vec::new();
    let names = ["", "v", "v^2"];
    for (i, c) in p.c.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = fmt_rat(&c.abs());
        let body = if i == 0 {
            mag
        } else if mag == "1" {
            names[i].to_string()
        } else {
            format!("{mag}*{}", names[i])
        };
        if terms.is_empty() {
            terms.push(if c.is_negative() {
                format!("-{body}")
            } else {
                body
            });
        } else {
            terms.push(format!("{} {body}", if c.is_negative() { "-" } else { "+" }));
        }
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" ")
    }
}

pub fn fmt_piecewise(f: &PiecewiseFunc) -> String {
    let bs = f.breakpoints();
    f.pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            format!(
                "{} on [{}, {}]",
                fmt_poly(p),
                fmt_rat(&bs[i]),
                fmt_rat(&bs[i + 1])
            )
        })
        .collect::<Vec<_>>()
        .join(";  ")
}

// ---------------------------------------------------------------------------
// list / table
// ---------------------------------------------------------------------------

pub struct ListRow {
    pub name: String,
    pub singularities: String,
    pub lines: usize,
    pub delta: Rat,
}

pub fn render_list(rows: &[ListRow], opt: &RenderOptions) -> String {
    match opt.format {
        ReportFormat::Csv => {
            let mut out = String::from("name,singularities,lines,delta\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    r.name,
                    r.singularities,
                    r.lines,
                    fmt_rat(&r.delta)
                ));
            }
            out
        }
        ReportFormat::Json => {
            let arr: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "singularities": r.singularities,
                        "lines": r.lines,
                        "delta": fmt_rat(&r.delta),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&arr).unwrap() + "\n"
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            out.push_str("| name | singularities | lines | delta |\n");
            out.push_str("|---|---|---:|---|\n");
            for r in rows {
                out.push_str(&format!(
                    "| {} | {} | {} | {} |\n",
                    r.name,
                    r.singularities,
                    r.lines,
                    opt.value(&r.delta)
                ));
            }
            out
        }
    }
}

pub struct TableRow {
    pub degree: u32,
    pub name: String,
    pub singularities: String,
    pub lines: usize,
    pub expected_lines: usize,
    pub delta: Option<Rat>,
    pub expected_delta: Rat,
    pub exact: bool,
}

impl TableRow {
    pub fn pass(&self) -> bool {
        self.lines == self.expected_lines
            && self.exact
            && self.delta.as_ref() == Some(&self.expected_delta)
    }
}

pub fn render_table(rows: &[TableRow], opt: &RenderOptions) -> String {
    let status = |r: &TableRow| if r.pass() { "PASS" } else { "FAIL" };
    let delta_str = |r: &TableRow| match &r.delta {
        Some(d) => fmt_rat(d),
        None => "interval".to_string(),
    };
    match opt.format {
        ReportFormat::Csv => {
            let mut out =
                String::from("degree,name,singularities,lines,expected_lines,delta,expected_delta,status\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.degree,
                    r.name,
                    r.singularities,
                    r.lines,
                    r.expected_lines,
                    delta_str(r),
                    fmt_rat(&r.expected_delta),
                    status(r)
                ));
            }
            out
        }
        ReportFormat::Json => {
            let arr: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "degree": r.degree,
                        "name": r.name,
                        "singularities": r.singularities,
                        "lines": r.lines,
                        "expected_lines": r.expected_lines,
                        "delta": r.delta.as_ref().map(fmt_rat),
                        "expected_delta": fmt_rat(&r.expected_delta),
                        "pass": r.pass(),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&arr).unwrap() + "\n"
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            out.push_str("| K^2 | # lines | Sing(X) | delta(X) | expected | status |\n");
            out.push_str("|---:|---:|---|---|---|---|\n");
            for r in rows {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} |\n",
                    r.degree,
                    r.lines,
                    r.singularities,
                    delta_str(r),
                    fmt_rat(&r.expected_delta),
                    status(r)
                ));
            }
            out
        }
    }
}

// ---------------------------------------------------------------------------
// certificate
// ---------------------------------------------------------------------------

pub fn render_certificate(
    cfg: &SurfaceConfig,
    cert: &DeltaCertificate,
    opt: &RenderOptions,
) -> String {
    let stratum_rows: Vec<_> = cert
        .strata
        .iter()
        .map(|b| {
            let value = if b.exact {
                opt.value(&b.lower)
            } else {
                match &b.upper {
                    Some(u) => format!(">= {} (<= {})", opt.value(&b.lower), opt.value(u)),
                    None => format!(">= {}", opt.value(&b.lower)),
                }
            };
            (b, value)
        })
        .collect();
    match opt.format {
        ReportFormat::Json => {
            let strata: Vec<_> = cert
                .strata
                .iter()
                .map(|b| {
                    json!({
                        "stratum": b.stratum.label(),
                        "kind": match &b.stratum.kind {
                            StratumKind::AtPoint(_) => "point",
                            StratumKind::CurveGeneric(_) => "curve",
                            StratumKind::SurfaceGeneric => "generic",
                        },
                        "curves": b.stratum.curves_through,
                        "lower": fmt_rat(&b.lower),
                        "upper": b.upper.as_ref().map(fmt_rat),
                        "exact": b.exact,
                        "imported": b.imported,
                        "witness": b.witness_curve,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({
                "config": cert.config,
                "singularities": cfg.singularities,
                "global": cert.global().map(fmt_rat),
                "global_lower": fmt_rat(&cert.global_lower),
                "global_upper": cert.global_upper.as_ref().map(fmt_rat),
                "exact": cert.exact,
                "attaining_strata": cert.attaining,
                "strata": strata,
            }))
            .unwrap()
                + "\n"
        }
        ReportFormat::Csv => {
            let mut out = String::from("stratum,kind,delta,exact,witness\n");
            for (b, value) in &stratum_rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    b.stratum.label(),
                    match &b.stratum.kind {
                        StratumKind::AtPoint(_) => "point",
                        StratumKind::CurveGeneric(_) => "curve",
                        StratumKind::SurfaceGeneric => "generic",
                    },
                    value.replace(',', ";"),
                    b.exact,
                    b.witness_curve.clone().unwrap_or_default()
                ))
            }
            out
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            out.push_str(&format!(
                "# delta({}) [{}]\n\n",
                cert.config, cfg.singularities
            ));
            match cert.global() {
                Some(g) => out.push_str(&format!("global delta = {} (exact)\n", opt.value(g))),
                None => out.push_str(&format!(
                    "global delta in [{}, {}] (not certified exact)\n",
                    opt.value(&cert.global_lower),
                    cert.global_upper
                        .as_ref()
                        .map(|u| opt.value(u))
                        .unwrap_or_else(|| "inf".into())
                )),
            }
            if !cert.attaining.is_empty() {
                out.push_str(&format!(
                    "attained on: {}\n",
                    cert.attaining.join(", ")
                ));
            }
            out.push_str("\n| P | delta_P(S) | witness |\n|---|---|---|\n");
            for (b, value) in &stratum_rows {
                out.push_str(&format!(
                    "| {} | {} | {} |\n",
                    b.stratum.label(),
                    value,
                    b.witness_curve.clone().unwrap_or_default()
                ));
            }
            out
        }
    }
}

// ---------------------------------------------------------------------------
// decomposition dump
// ---------------------------------------------------------------------------

pub fn render_decomposition(
    cfg: &SurfaceConfig,
    dec: &ParamDecomp,
    s_value: &Rat,
    opt: &RenderOptions,
) -> String {
    let vol = dec.volume_function(cfg).expect("volume");
    let deg = dec.degree_function(cfg).expect("degree");
    if opt.format == ReportFormat::Json {
        let intervals: Vec<_> = dec
            .intervals
            .iter()
            .map(|iv| {
                json!({
                    "from": fmt_rat(&iv.lo),
                    "to": fmt_rat(&iv.hi),
                    "coefficients": iv.coeffs.iter().map(|(id, c)| {
                        json!({"curve": id, "offset": fmt_rat(&c.offset), "slope": fmt_rat(&c.slope)})
                    }).collect::<Vec<_>>(),
                })
            })
            .collect();
        let pieces = |f: &PiecewiseFunc| {
            let bs = f.breakpoints();
            f.pieces()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    json!({
                        "from": fmt_rat(&bs[i]),
                        "to": fmt_rat(&bs[i+1]),
                        "poly": [fmt_rat(&p.c[0]), fmt_rat(&p.c[1]), fmt_rat(&p.c[2])],
                    })
                })
                .collect::<Vec<_>>()
        };
        return serde_json::to_string_pretty(&json!({
            "config": cfg.name,
            "curve": dec.curve,
            "tau": fmt_rat(&dec.tau),
            "intervals": intervals,
            "volume": pieces(&vol),
            "degree": pieces(&deg),
            "s": fmt_rat(s_value),
        }))
        .unwrap()
            + "\n";
    }
    let mut out = String::new();
    out.push_str(&format!(
        "Zariski decomposition of -K - v*{} on {}\n",
        dec.curve, cfg.name
    ));
    out.push_str(&format!("tau = {}\n", opt.value(&dec.tau)));
    for iv in &dec.intervals {
        out.push_str(&format!(
            "  v in [{}, {}]:  N(v) = ",
            fmt_rat(&iv.lo),
            fmt_rat(&iv.hi)
        ));
        if iv.coeffs.is_empty() {
            out.push('0');
        } else {
            let parts: Vec<String> = iv
                .coeffs
                .iter()
                .map(|(id, c)| format!("({}) {}", c.render(), id))
                .collect();
            out.push_str(&parts.join(" + "));
        }
        out.push('\n');
    }
    out.push_str(&format!("P(v)^2  = {}\n", fmt_piecewise(&vol)));
    out.push_str(&format!("P(v).A  = {}\n", fmt_piecewise(&deg)));
    out.push_str(&format!("S_S(A)  = {}\n", opt.value(s_value)));
    out
}

// ---------------------------------------------------------------------------
// verification rendering
// ---------------------------------------------------------------------------

pub fn render_lemma_reports(reports: &[LemmaReport], verbose_mismatches: bool) -> String {
    let mut out = String::new();
    for r in reports {
        let status = if r.all_match() { "all-match" } else { "MISMATCH" };
        out.push_str(&format!(
            "{:<16} {:>6} / {:<6} [{}]  {}\n",
            r.key, r.config, r.curve, r.caption, status
        ));
        if verbose_mismatches && !r.all_match() {
            for ReportEntry {
                field,
                expected,
                got,
                matches,
            } in &r.entries
            {
                if !matches {
                    out.push_str(&format!("    {field}: expected {expected}\n"));
                    out.push_str(&format!("    {field}:      got {got}\n"));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// floating-point quadrature oracle
// ---------------------------------------------------------------------------

fn poly_f64(p: &QuadPoly, v: f64) -> f64 {
    let c: Vec<f64> = p.c.iter().map(|x| x.to_f64().unwrap()).collect();
    c[0] + v * (c[1] + v * c[2])
}

fn piece_bounds(f: &PiecewiseFunc) -> Vec<(f64, f64)> {
    let bs = f.breakpoints();
    (0..f.pieces().len())
        .map(|i| (bs[i].to_f64().unwrap(), bs[i + 1].to_f64().unwrap()))
        .collect()
}

/// Composite Simpson integration on a grid of about `nodes` points spread
/// over the pieces. Exact for quadratics up to floating-point rounding.
pub fn simpson(f: &PiecewiseFunc, nodes: usize) -> f64 {
    let bounds = piece_bounds(f);
    let total: f64 = bounds.iter().map(|(a, b)| b - a).sum();
    let mut acc = 0.0;
    for (piece, (a, b)) in f.pieces().iter().zip(&bounds) {
        let mut n = ((nodes as f64) * (b - a) / total).round() as usize;
        n = n.max(2);
        if n % 2 == 1 {
            n += 1;
        }
        let h = (b - a) / n as f64;
        let mut s = poly_f64(piece, *a) + poly_f64(piece, *b);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * poly_f64(piece, a + k as f64 * h);
        }
        acc += s * h / 3.0;
    }
    acc
}

/// Composite trapezoid integration on the same kind of grid.
pub fn trapezoid(f: &PiecewiseFunc, nodes: usize) -> f64 {
    let bounds = piece_bounds(f);
    let total: f64 = bounds.iter().map(|(a, b)| b - a).sum();
    let mut acc = 0.0;
    for (piece, (a, b)) in f.pieces().iter().zip(&bounds) {
        let n = (((nodes as f64) * (b - a) / total).round() as usize).max(1);
        let h = (b - a) / n as f64;
        let mut s = (poly_f64(piece, *a) + poly_f64(piece, *b)) / 2.0;
        for k in 1..n {
            s += poly_f64(piece, a + k as f64 * h);
        }
        acc += s * h;
    }
    acc
}

/// Relative error of a floating-point quadrature value against an exact one.
pub fn relative_error(approx: f64, exact: &Rat) -> f64 {
    let e = exact.to_f64().unwrap();
    if e == 0.0 {
        approx.abs()
    } else {
        ((approx - e) / e).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{rat, rint};

    #[test]
    fn poly_formatting() {
        assert_eq!(fmt_poly(&QuadPoly::new(rint(3), rint(-2), rat(-1, 2))), "3 - 2*v - 1/2*v^2");
        assert_eq!(fmt_poly(&QuadPoly::new(rint(0), rint(1), rint(0))), "v");
        assert_eq!(fmt_poly(&QuadPoly::constant(rint(0))), "0");
        assert_eq!(fmt_poly(&QuadPoly::new(rint(0), rint(0), rat(2, 3))), "2/3*v^2");
    }

    #[test]
    fn table_row_fail_is_reported() {
        let row = TableRow {
            degree: 3,
            name: "A1".into(),
            singularities: "A1".into(),
            lines: 21,
            expected_lines: 21,
            delta: Some(rint(1)),
            expected_delta: rat(6, 5),
            exact: true,
        };
        assert!(!row.pass());
        let opt = RenderOptions { format: ReportFormat::Csv, digits: None };
        let text = render_table(&[row], &opt);
        assert!(text.contains("FAIL"));
    }

    #[test]
    fn simpson_is_exact_on_quadratics() {
        let f = PiecewiseFunc::new(
            vec![rint(0), rint(2)],
            vec![QuadPoly::new(rint(3), rint(-2), rat(-1, 2))],
        )
        .unwrap();
        let exact = f.integrate(&rint(0), &rint(2)).unwrap();
        assert!(relative_error(simpson(&f, 100), &exact) < 1e-12);
        assert!(relative_error(trapezoid(&f, 10_000), &exact) < 1e-7);
    }
}
