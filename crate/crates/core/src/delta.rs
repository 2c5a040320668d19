//! Fujita functionals and delta-invariant certificates.
//!
//! For a negative curve `A` of a configuration, `S_S(A)` is the normalized
//! integral of `P(v)^2` up to the pseudo-effective threshold. The flag
//! functional refines the bound at a point `P` on `A` through
//! `h(v) = (P(v).A)(N(v).A)_P + (P(v).A)^2 / 2`, and the local bound is
//! `delta_P >= min(1/S_S(A), 1/S(W^A;P))` with `A_S(A) = 1` on the smooth
//! resolution. The surface-generic stratum carries the imported constant
//! `3/2` (points away from lines through singular points); it is metadata,
//! not a computation, and certificates mark it as such.

use crate::config::{PointStratum, StratumKind, SurfaceConfig, ValidationError};
use crate::lattice::{fmt_rat, parse_rat, rat, rint, Rat};
use crate::zariski::{param_zariski, ParamDecomp, PiecewiseFunc, QuadPoly, ZariskiError};
use num_traits::{Signed, Zero};
use once_cell::sync::Lazy;
use serde::Deserialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DeltaError {
    #[error(transparent)]
    Zariski(#[from] ZariskiError),
    #[error(transparent)]
    Config(#[from] ValidationError),
    #[error("stratum {stratum} does not lie on curve {curve}")]
    StratumNotOnCurve { stratum: String, curve: String },
}

/// Imported lower bound for points away from lines through singular points.
pub fn surface_generic_bound() -> Rat {
    rat(3, 2)
}

/// Evaluator with the parametric decompositions of one configuration
/// computed eagerly up front (immutable afterwards, safe to share).
pub struct DeltaEngine<'a> {
    pub cfg: &'a SurfaceConfig,
    decomps: BTreeMap<String, ParamDecomp>,
    s_curve: BTreeMap<String, Rat>,
}

impl<'a> DeltaEngine<'a> {
    pub fn new(cfg: &'a SurfaceConfig) -> Result<Self, DeltaError> {
        let mut decomps = BTreeMap::new();
        let mut s_curve = BTreeMap::new();
        for c in cfg.curves() {
            let dec = param_zariski(cfg, &c.id)?;
            let vol = dec.volume_function(cfg)?;
            let s = vol.integrate(&Rat::zero(), &dec.tau)? / rint(3);
            s_curve.insert(c.id.clone(), s);
            decomps.insert(c.id.clone(), dec);
        }
        Ok(DeltaEngine {
            cfg,
            decomps,
            s_curve,
        })
    }

    pub fn decomposition(&self, curve: &str) -> Result<&ParamDecomp, DeltaError> {
        self.decomps
            .get(curve)
            .ok_or_else(|| ValidationError::UnknownCurve(curve.to_string()).into())
    }

    /// `S_S(A) = (1/3) Int_0^tau P(v)^2 dv`.
    pub fn s_curve(&self, curve: &str) -> Result<&Rat, DeltaError> {
        self.s_curve
            .get(curve)
            .ok_or_else(|| ValidationError::UnknownCurve(curve.to_string()).into())
    }

    /// `(N(v).A)_P`: the local degree of the negative part along `A` at the
    /// stratum. Zero identically for the generic point of `A`; at a named
    /// point it sums the coefficient functions of the active curves through
    /// that point, weighted by local intersection multiplicities.
    pub fn local_n_degree(
        &self,
        curve: &str,
        stratum: &PointStratum,
    ) -> Result<PiecewiseFunc, DeltaError> {
        let dec = self.decomposition(curve)?;
        let point = match &stratum.kind {
            StratumKind::CurveGeneric(c) if c == curve => None,
            StratumKind::AtPoint(pid) => {
                let p = self
                    .cfg
                    .point(pid)
                    .ok_or_else(|| ValidationError::UnknownCurve(pid.clone()))?;
                if p.multiplicity_of(curve).is_none() {
                    return Err(DeltaError::StratumNotOnCurve {
                        stratum: stratum.label(),
                        curve: curve.to_string(),
                    });
                }
                Some(p)
            }
            _ => {
                return Err(DeltaError::StratumNotOnCurve {
                    stratum: stratum.label(),
                    curve: curve.to_string(),
                })
            }
        };
        let data = dec
            .intervals
            .iter()
            .map(|iv| {
                let mut offset = Rat::zero();
                let mut slope = Rat::zero();
                if let Some(p) = point {
                    let ma = p.multiplicity_of(curve).unwrap();
                    for (id, coeff) in &iv.coeffs {
                        if id == curve {
                            continue;
                        }
                        if let Some(mc) = p.multiplicity_of(id) {
                            let weight = rint((ma * mc) as i64);
                            offset += &coeff.offset * &weight;
                            slope += &coeff.slope * &weight;
                        }
                    }
                }
                (
                    iv.lo.clone(),
                    iv.hi.clone(),
                    QuadPoly::new(offset, slope, Rat::zero()),
                )
            })
            .collect();
        Ok(PiecewiseFunc::from_intervals(data)?)
    }

    /// `h(v) = (P(v).A)(N(v).A)_P + (P(v).A)^2 / 2`.
    pub fn h_function(
        &self,
        curve: &str,
        stratum: &PointStratum,
    ) -> Result<PiecewiseFunc, DeltaError> {
        let dec = self.decomposition(curve)?;
        let deg = dec.degree_function(self.cfg)?;
        let loc = self.local_n_degree(curve, stratum)?;
        let mut data = Vec::new();
        for iv in &dec.intervals {
            // both factors are affine on the interval
            let mid_probe = |f: &PiecewiseFunc, v: &Rat| f.eval(v).unwrap();
            let (p0, p1) = affine_on(&deg, &iv.lo, &iv.hi, &mid_probe);
            let (n0, n1) = affine_on(&loc, &iv.lo, &iv.hi, &mid_probe);
            // (p0 + p1 v)(n0 + n1 v) + (p0 + p1 v)^2/2
            let c0 = &p0 * &n0 + &p0 * &p0 / rint(2);
            let c1 = &p0 * &n1 + &p1 * &n0 + &p0 * &p1;
            let c2 = &p1 * &n1 + &p1 * &p1 / rint(2);
            data.push((iv.lo.clone(), iv.hi.clone(), QuadPoly::new(c0, c1, c2)));
        }
        Ok(PiecewiseFunc::from_intervals(data)?)
    }

    /// `S(W^A;P) = (2/3) Int_0^tau h(v) dv`.
    pub fn s_flag(&self, curve: &str, stratum: &PointStratum) -> Result<Rat, DeltaError> {
        let dec = self.decomposition(curve)?;
        let h = self.h_function(curve, stratum)?;
        Ok(h.integrate(&Rat::zero(), &dec.tau)? * rat(2, 3))
    }

    /// Per-stratum delta bound via estimation (1).
    pub fn delta_bounds(&self, stratum: &PointStratum) -> Result<DeltaBound, DeltaError> {
        if stratum.kind == StratumKind::SurfaceGeneric {
            return Ok(DeltaBound {
                stratum: stratum.clone(),
                lower: surface_generic_bound(),
                upper: None,
                witness_curve: None,
                exact: false,
                imported: true,
            });
        }
        let mut upper: Option<(Rat, String)> = None;
        let mut lower = Rat::zero();
        for id in &stratum.curves_through {
            let s = self.s_curve(id)?.clone();
            let inv_s = rint(1) / &s;
            if upper.as_ref().is_none_or(|(u, _)| inv_s < *u) {
                upper = Some((inv_s.clone(), id.clone()));
            }
            let sf = self.s_flag(id, stratum)?;
            let candidate = if sf.is_positive() {
                (rint(1) / sf).min(inv_s)
            } else {
                inv_s
            };
            lower = lower.max(candidate);
        }
        let (upper, witness) = upper.expect("stratum with no curve");
        let exact = lower == upper;
        Ok(DeltaBound {
            stratum: stratum.clone(),
            lower,
            upper: Some(upper),
            witness_curve: Some(witness),
            exact,
            imported: false,
        })
    }

    /// Shared, lazily-built engine for a built-in configuration. Engines are
    /// immutable after construction, so concurrent reads are safe.
    pub fn for_builtin(name: &str) -> Option<&'static DeltaEngine<'static>> {
        static CELLS: Lazy<BTreeMap<&'static str, once_cell::sync::OnceCell<DeltaEngine<'static>>>> =
            Lazy::new(|| {
                crate::config::BUILTIN_NAMES
                    .iter()
                    .map(|n| (*n, once_cell::sync::OnceCell::new()))
                    .collect()
            });
        let cell = CELLS.get(name)?;
        let cfg = crate::config::builtin(name)?;
        Some(cell.get_or_init(|| DeltaEngine::new(cfg).expect("builtin engine")))
    }

    /// Full certificate: every stratum bound plus the global aggregate.
    pub fn global_delta(&self) -> Result<DeltaCertificate, DeltaError> {
        let mut bounds = Vec::new();
        for stratum in self.cfg.strata() {
            bounds.push(self.delta_bounds(&stratum)?);
        }
        let global_lower = bounds
            .iter()
            .map(|b| b.lower.clone())
            .min()
            .expect("at least the generic stratum");
        let global_upper = bounds.iter().filter_map(|b| b.upper.clone()).min();
        let exact = global_upper.as_ref() == Some(&global_lower);
        let attaining = if exact {
            bounds
                .iter()
                .filter(|b| b.exact && b.upper.as_ref() == global_upper.as_ref())
                .map(|b| b.stratum.label())
                .collect()
        } else {
            Vec::new()
        };
        Ok(DeltaCertificate {
            config: self.cfg.name.clone(),
            strata: bounds,
            global_lower,
            global_upper,
            exact,
            attaining,
        })
    }
}

/// Reads an affine piece off a piecewise function on `[lo, hi]`.
fn affine_on(
    f: &PiecewiseFunc,
    lo: &Rat,
    hi: &Rat,
    probe: &dyn Fn(&PiecewiseFunc, &Rat) -> Rat,
) -> (Rat, Rat) {
    let mid = (lo + hi) / rint(2);
    let va = probe(f, &mid);
    let vb = probe(f, hi);
    let slope = (&vb - &va) / (hi - &mid);
    let offset = va - &slope * mid;
    (offset, slope)
}

/// Lower/upper delta bound on one stratum with the witness curve attaining
/// the upper bound (the incident curve with maximal `S`).
#[derive(Debug, Clone)]
pub struct DeltaBound {
    pub stratum: PointStratum,
    pub lower: Rat,
    /// `None` means unbounded above (no curve-based upper bound applies).
    pub upper: Option<Rat>,
    pub witness_curve: Option<String>,
    pub exact: bool,
    /// True when the lower bound is the imported surface-generic constant.
    pub imported: bool,
}

#[derive(Debug, Clone)]
pub struct DeltaCertificate {
    pub config: String,
    pub strata: Vec<DeltaBound>,
    pub global_lower: Rat,
    pub global_upper: Option<Rat>,
    pub exact: bool,
    pub attaining: Vec<String>,
}

impl DeltaCertificate {
    pub fn global(&self) -> Option<&Rat> {
        if self.exact {
            self.global_upper.as_ref()
        } else {
            None
        }
    }

    pub fn bound_for(&self, label: &str) -> Option<&DeltaBound> {
        self.strata.iter().find(|b| b.stratum.label() == label)
    }
}

// ---------------------------------------------------------------------------
// lemma corpus
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
pub struct LemmaCase {
    pub key: String,
    pub caption: String,
    pub config: String,
    pub curve: String,
    pub tau: String,
    pub p2: Vec<LemmaPiece>,
    pub pa: Vec<LemmaPiece>,
    pub s: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct LemmaPiece {
    pub from: String,
    pub to: String,
    pub poly: Vec<String>,
}

/// Expected decomposition data for one lemma, exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaExpectation {
    pub tau: Rat,
    pub volume_pieces: Vec<(Rat, Rat, QuadPoly)>,
    pub degree_pieces: Vec<(Rat, Rat, QuadPoly)>,
    pub s_value: Rat,
}

impl LemmaCase {
    pub fn expectation(&self) -> LemmaExpectation {
        let coeff = |p: &LemmaPiece, i: usize| {
            p.poly
                .get(i)
                .map(|s| parse_rat(s).unwrap())
                .unwrap_or_else(Rat::zero)
        };
        let parse_pieces = |ps: &[LemmaPiece]| {
            ps.iter()
                .map(|p| {
                    (
                        parse_rat(&p.from).unwrap(),
                        parse_rat(&p.to).unwrap(),
                        QuadPoly::new(coeff(p, 0), coeff(p, 1), coeff(p, 2)),
                    )
                })
                .collect()
        };
        LemmaExpectation {
            tau: parse_rat(&self.tau).unwrap(),
            volume_pieces: parse_pieces(&self.p2),
            degree_pieces: parse_pieces(&self.pa),
            s_value: parse_rat(&self.s).unwrap(),
        }
    }
}

/// The transcribed lemma corpus, one entry per Zariski-decomposition lemma.
pub static LEMMA_CORPUS: Lazy<Vec<LemmaCase>> = Lazy::new(|| {
    serde_json::from_str(include_str!("../data/lemmas.json")).expect("lemma corpus parses")
});

/// One comparison line of a verification report.
#[derive(Debug, Clone)]
pub struct ReportEntry {
    pub field: String,
    pub expected: String,
    pub got: String,
    pub matches: bool,
}

#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub key: String,
    pub caption: String,
    pub config: String,
    pub curve: String,
    pub entries: Vec<ReportEntry>,
}

impl LemmaReport {
    pub fn all_match(&self) -> bool {
        self.entries.iter().all(|e| e.matches)
    }
}

fn fmt_pieces(pieces: &[(Rat, Rat, QuadPoly)]) -> String {
    pieces
        .iter()
        .map(|(lo, hi, p)| {
            format!(
                "[{},{}]: {} + {} v + {} v^2",
                fmt_rat(lo),
                fmt_rat(hi),
                fmt_rat(&p.c[0]),
                fmt_rat(&p.c[1]),
                fmt_rat(&p.c[2])
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn func_pieces(f: &PiecewiseFunc) -> Vec<(Rat, Rat, QuadPoly)> {
    let bs = f.breakpoints();
    f.pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| (bs[i].clone(), bs[i + 1].clone(), p.clone()))
        .collect()
}

/// Coefficient-exact comparison of tau, the volume and degree pieces, and
/// `S_S(A)` against expected lemma data. Mismatches become report entries,
/// never errors.
pub fn verify_lemma(
    cfg: &SurfaceConfig,
    curve: &str,
    expected: &LemmaExpectation,
    meta: (&str, &str),
) -> Result<LemmaReport, DeltaError> {
    let dec = param_zariski(cfg, curve)?;
    let vol = dec.volume_function(cfg)?;
    let deg = dec.degree_function(cfg)?;
    let s = vol.integrate(&Rat::zero(), &dec.tau)? / rint(3);
    let mut entries = Vec::new();
    entries.push(ReportEntry {
        field: "tau".into(),
        expected: fmt_rat(&expected.tau),
        got: fmt_rat(&dec.tau),
        matches: dec.tau == expected.tau,
    });
    let got_vol = func_pieces(&vol);
    entries.push(ReportEntry {
        field: "P(v)^2".into(),
        expected: fmt_pieces(&expected.volume_pieces),
        got: fmt_pieces(&got_vol),
        matches: got_vol == expected.volume_pieces,
    });
    let got_deg = func_pieces(&deg);
    entries.push(ReportEntry {
        field: "P(v).A".into(),
        expected: fmt_pieces(&expected.degree_pieces),
        got: fmt_pieces(&got_deg),
        matches: got_deg == expected.degree_pieces,
    });
    entries.push(ReportEntry {
        field: "S_S(A)".into(),
        expected: fmt_rat(&expected.s_value),
        got: fmt_rat(&s),
        matches: s == expected.s_value,
    });
    Ok(LemmaReport {
        key: meta.0.to_string(),
        caption: meta.1.to_string(),
        config: cfg.name.clone(),
        curve: curve.to_string(),
        entries,
    })
}

/// Runs the whole transcribed corpus against the built-ins.
pub fn run_corpus() -> Result<Vec<LemmaReport>, DeltaError> {
    let mut out = Vec::new();
    for case in LEMMA_CORPUS.iter() {
        let cfg = crate::config::builtin(&case.config)
            .unwrap_or_else(|| panic!("corpus references unknown config {}", case.config));
        let report = verify_lemma(
            cfg,
            &case.curve,
            &case.expectation(),
            (&case.key, &case.caption),
        )?;
        out.push(report);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::builtin;

    fn engine(name: &str) -> &'static DeltaEngine<'static> {
        DeltaEngine::for_builtin(name).unwrap()
    }

    fn curve_stratum(cfg: &SurfaceConfig, id: &str) -> PointStratum {
        cfg.strata()
            .into_iter()
            .find(|s| s.kind == StratumKind::CurveGeneric(id.to_string()))
            .unwrap()
    }

    #[test]
    fn s_curve_examples() {
        assert_eq!(*engine("A1").s_curve("E").unwrap(), rat(5, 6));
        assert_eq!(*engine("A1").s_curve("L1").unwrap(), rat(17, 27));
        assert_eq!(*engine("E6").s_curve("E3").unwrap(), rint(3));
    }

    #[test]
    fn local_n_degree_zero_at_generic_point() {
        let eng = engine("A1");
        let st = curve_stratum(eng.cfg, "L1");
        let f = eng.local_n_degree("L1", &st).unwrap();
        assert!(f.eval(&rat(1, 2)).unwrap().is_zero());
        assert!(f.eval(&rat(7, 6)).unwrap().is_zero());
    }

    #[test]
    fn local_n_degree_at_root_crossing() {
        // P = L1 crossing E: coefficient of E is v/2 on [0,1] and E stays
        // active with the same coefficient on [1,4/3]
        let eng = engine("A1");
        let st = PointStratum {
            kind: StratumKind::AtPoint("E*L1".into()),
            curves_through: vec!["E".into(), "L1".into()],
        };
        let f = eng.local_n_degree("L1", &st).unwrap();
        assert_eq!(f.eval(&rat(1, 2)).unwrap(), rat(1, 4));
        assert_eq!(f.eval(&rint(1)).unwrap(), rat(1, 2));
        assert_eq!(f.eval(&rat(7, 6)).unwrap(), rat(7, 12));
    }

    #[test]
    fn stratum_off_curve_rejected() {
        let eng = engine("A1");
        let st = curve_stratum(eng.cfg, "E");
        assert!(matches!(
            eng.local_n_degree("L1", &st),
            Err(DeltaError::StratumNotOnCurve { .. })
        ));
    }

    #[test]
    fn h_at_zero_is_half_for_lines() {
        // h(0) = (P(0).A)^2/2 = 1/2 for a (-1)-curve A
        let eng = engine("A1");
        let st = curve_stratum(eng.cfg, "L1");
        let h = eng.h_function("L1", &st).unwrap();
        assert_eq!(h.eval(&rint(0)).unwrap(), rat(1, 2));
    }

    #[test]
    fn s_flag_generic_on_a5_line() {
        // A5 line L2,1: h = (1 - v/3)^2/2 on [0,3]; S(W;P) = 1/3
        let eng = engine("A5");
        let st = curve_stratum(eng.cfg, "L2,1");
        assert_eq!(eng.s_flag("L2,1", &st).unwrap(), rat(1, 3));
    }

    #[test]
    fn h_matches_lemma_display_on_a2a1_join_line() {
        // generic P on the line joining the A2 and A1 points:
        // h = (6-v)^2/72 on [0,3/2]
        let eng = engine("A2A1");
        let st = curve_stratum(eng.cfg, "L12");
        let h = eng.h_function("L12", &st).unwrap();
        let expect = |v: Rat| {
            let t = rint(6) - &v;
            &t * &t / rint(72)
        };
        for v in [rint(0), rat(1, 2), rint(1), rat(3, 2)] {
            assert_eq!(h.eval(&v).unwrap(), expect(v));
        }
    }

    #[test]
    fn engines_are_shareable_across_threads() {
        let eng = engine("D5");
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..4)
                .map(|_| scope.spawn(|| eng.global_delta().unwrap().global().cloned()))
                .collect();
            for h in handles {
                assert_eq!(h.join().unwrap(), Some(rat(9, 19)));
            }
        });
    }

    #[test]
    fn s_flag_bounds_from_lemmas() {
        // generic P on A = L1 in A1: S(W;P) <= 17/27
        let eng = engine("A1");
        let st = curve_stratum(eng.cfg, "L1");
        assert!(eng.s_flag("L1", &st).unwrap() <= rat(17, 27));
        // generic P on a line of A2 meeting E1: S(W;P) <= 2/3
        let eng2 = engine("A2");
        let st2 = curve_stratum(eng2.cfg, "L1,1");
        assert!(eng2.s_flag("L1,1", &st2).unwrap() <= rat(2, 3));
    }

    #[test]
    fn delta_bounds_examples() {
        let eng = engine("A1");
        let b = eng.delta_bounds(&curve_stratum(eng.cfg, "E")).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, rat(6, 5));
        let b = eng.delta_bounds(&curve_stratum(eng.cfg, "L1")).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, rat(27, 17));
        let eng6 = engine("E6");
        let b = eng6.delta_bounds(&curve_stratum(eng6.cfg, "E3")).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, rat(1, 3));
    }

    #[test]
    fn surface_generic_is_imported() {
        let eng = engine("A1");
        let st = PointStratum {
            kind: StratumKind::SurfaceGeneric,
            curves_through: vec![],
        };
        let b = eng.delta_bounds(&st).unwrap();
        assert!(b.imported && !b.exact);
        assert_eq!(b.lower, rat(3, 2));
        assert!(b.upper.is_none());
    }

    #[test]
    fn global_examples() {
        for (name, num, den) in [("A1", 6, 5), ("D5", 9, 19), ("3A2", 1, 1)] {
            let eng = engine(name);
            let cert = eng.global_delta().unwrap();
            assert!(cert.exact, "{name}");
            assert_eq!(cert.global(), Some(&rat(num, den)), "{name}");
            assert!(!cert.attaining.is_empty());
        }
    }

    #[test]
    fn two_a1_point_stratum_interval() {
        // L1,1 meets L2,1 in case 2A1: bound [54/35, 27/17], not exact
        let eng = engine("2A1");
        let strata = eng.cfg.strata();
        let st = strata
            .iter()
            .find(|s| matches!(&s.kind, StratumKind::AtPoint(p) if p == "L1,1*L2,1"))
            .unwrap();
        let b = eng.delta_bounds(st).unwrap();
        assert_eq!(b.lower, rat(54, 35));
        assert_eq!(b.upper, Some(rat(27, 17)));
        assert!(!b.exact);
    }

    #[test]
    fn corpus_all_match() {
        let reports = run_corpus().unwrap();
        assert_eq!(reports.len(), 32);
        for r in &reports {
            assert!(r.all_match(), "{}: {:?}", r.key, r.entries);
        }
        // the 28 distinct S values of the corpus
        let distinct: std::collections::BTreeSet<String> = LEMMA_CORPUS
            .iter()
            .map(|c| c.s.clone())
            .collect();
        assert_eq!(distinct.len(), 28);
    }

    #[test]
    fn perturbed_expectation_reports_mismatch() {
        let case = &LEMMA_CORPUS[0];
        let cfg = builtin(&case.config).unwrap();
        let mut exp = case.expectation();
        exp.s_value += rat(1, 1000);
        let report = verify_lemma(cfg, &case.curve, &exp, ("tweaked", "")).unwrap();
        assert!(!report.all_match());
        assert!(report
            .entries
            .iter()
            .any(|e| e.field == "S_S(A)" && !e.matches));
    }
}
