//! Exact parametric Zariski decomposition of `-K_S - vA` over the
//! negative-curve cone of a configuration.
//!
//! The active-set engine works entirely over the rationals. At a parameter
//! value the active set is grown by a fixpoint iteration ("add every curve
//! the candidate positive part meets negatively, re-solve, repeat");
//! parametrically the active set is frozen per interval, the coefficients
//! are affine functions of `v`, and the next breakpoint is the minimal
//! positive root among the candidate events: an inactive curve reaching
//! `P(v).C = 0` from above, an active coefficient reaching zero, or
//! `P(v)^2 = 0` (which defines tau). Activation right after a breakpoint is
//! decided with first-order (value, slope) comparisons, so no floating
//! point or epsilon guessing is involved anywhere.

use crate::config::{NegativeCurve, SurfaceConfig};
use crate::lattice::{
    anticanonical_class, fmt_rat, is_negative_definite, rint, solve_linear, DivisorClass, Rat,
};
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZariskiError {
    #[error("divisor is not pseudo-effective")]
    NotPseudoEffective,
    #[error("evaluation outside function domain [{lo}, {hi}]: {at}")]
    Domain { lo: String, hi: String, at: String },
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Config(#[from] crate::config::ValidationError),
}

// ---------------------------------------------------------------------------
// piecewise quadratic functions
// ---------------------------------------------------------------------------

/// Polynomial `c[0] + c[1] v + c[2] v^2` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadPoly {
    pub c: [Rat; 3],
}

impl QuadPoly {
    pub fn new(c0: Rat, c1: Rat, c2: Rat) -> Self {
        QuadPoly { c: [c0, c1, c2] }
    }

    pub fn constant(c0: Rat) -> Self {
        QuadPoly::new(c0, Rat::zero(), Rat::zero())
    }

    pub fn eval(&self, v: &Rat) -> Rat {
        &self.c[0] + v * (&self.c[1] + v * &self.c[2])
    }

    /// Antiderivative with zero constant term, evaluated at `v`.
    pub fn antiderivative_at(&self, v: &Rat) -> Rat {
        v * (&self.c[0] + v * (&self.c[1] / rint(2) + v * &self.c[2] / rint(3)))
    }

    /// Derivative value at `v`.
    pub fn derivative_at(&self, v: &Rat) -> Rat {
        &self.c[1] + v * rint(2) * &self.c[2]
    }

    /// Exact rational roots, sorted. Empty when there is none (including the
    /// irrational case, which cannot occur for the decompositions here).
    pub fn rational_roots(&self) -> Vec<Rat> {
        if self.c[2].is_zero() {
            if self.c[1].is_zero() {
                return Vec::new();
            }
            return vec![-&self.c[0] / &self.c[1]];
        }
        let disc = &self.c[1] * &self.c[1] - rint(4) * &self.c[0] * &self.c[2];
        if disc.is_negative() {
            return Vec::new();
        }
        match rat_sqrt(&disc) {
            None => Vec::new(),
            Some(sq) => {
                let two_a = rint(2) * &self.c[2];
                let mut roots = vec![(-&self.c[1] - &sq) / &two_a, (-&self.c[1] + &sq) / &two_a];
                roots.sort();
                roots.dedup();
                roots
            }
        }
    }
}

/// Exact square root of a non-negative rational, when it is a perfect square.
fn rat_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let ns = x.numer().sqrt();
    let ds = x.denom().sqrt();
    if &(&ns * &ns) == x.numer() && &(&ds * &ds) == x.denom() {
        Some(Rat::new(ns, ds))
    } else {
        None
    }
}

/// Piecewise polynomial of degree <= 2 with exact rational breakpoints,
/// continuous at interior breakpoints, defined on `[breaks[0], breaks[k]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseFunc {
    breaks: Vec<Rat>,
    pieces: Vec<QuadPoly>,
}

impl PiecewiseFunc {
    pub fn new(breaks: Vec<Rat>, pieces: Vec<QuadPoly>) -> Result<Self, ZariskiError> {
        if breaks.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(ZariskiError::Internal(
                "piecewise function needs k pieces and k+1 breakpoints".into(),
            ));
        }
        for w in breaks.windows(2) {
            if w[0] >= w[1] {
                return Err(ZariskiError::Internal(format!(
                    "breakpoints not strictly increasing: {} >= {}",
                    fmt_rat(&w[0]),
                    fmt_rat(&w[1])
                )));
            }
        }
        for i in 1..pieces.len() {
            let at = &breaks[i];
            if pieces[i - 1].eval(at) != pieces[i].eval(at) {
                return Err(ZariskiError::Internal(format!(
                    "discontinuity at breakpoint {}",
                    fmt_rat(at)
                )));
            }
        }
        Ok(PiecewiseFunc { breaks, pieces })
    }

    pub fn domain(&self) -> (&Rat, &Rat) {
        (self.breaks.first().unwrap(), self.breaks.last().unwrap())
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[QuadPoly] {
        &self.pieces
    }

    fn piece_index(&self, v: &Rat) -> Result<usize, ZariskiError> {
        let (lo, hi) = self.domain();
        if v < lo || v > hi {
            return Err(ZariskiError::Domain {
                lo: fmt_rat(lo),
                hi: fmt_rat(hi),
                at: fmt_rat(v),
            });
        }
        for i in 0..self.pieces.len() {
            if v <= &self.breaks[i + 1] {
                return Ok(i);
            }
        }
        Ok(self.pieces.len() - 1)
    }

    pub fn eval(&self, v: &Rat) -> Result<Rat, ZariskiError> {
        Ok(self.pieces[self.piece_index(v)?].eval(v))
    }

    /// Exact definite integral over `[a, b]`, which must lie in the domain.
    pub fn integrate(&self, a: &Rat, b: &Rat) -> Result<Rat, ZariskiError> {
        if a > b {
            return Ok(-self.integrate(b, a)?);
        }
        self.piece_index(a)?;
        self.piece_index(b)?;
        let mut total = Rat::zero();
        for i in 0..self.pieces.len() {
            let lo = (&self.breaks[i]).max(a).clone();
            let hi = (&self.breaks[i + 1]).min(b).clone();
            if lo < hi {
                total += self.pieces[i].antiderivative_at(&hi)
                    - self.pieces[i].antiderivative_at(&lo);
            }
        }
        Ok(total)
    }

    /// Builds from per-interval data, merging adjacent equal pieces.
    pub fn from_intervals(data: Vec<(Rat, Rat, QuadPoly)>) -> Result<Self, ZariskiError> {
        let mut breaks = Vec::new();
        let mut pieces: Vec<QuadPoly> = Vec::new();
        for (lo, hi, poly) in data {
            if breaks.is_empty() {
                breaks.push(lo.clone());
            }
            if let Some(last) = pieces.last() {
                if *last == poly {
                    *breaks.last_mut().unwrap() = hi;
                    continue;
                }
            }
            breaks.push(hi);
            pieces.push(poly);
        }
        PiecewiseFunc::new(breaks, pieces)
    }
}

// ---------------------------------------------------------------------------
// parametric decomposition
// ---------------------------------------------------------------------------

/// Coefficient function `slope * v + offset` of one active curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineCoeff {
    pub offset: Rat,
    pub slope: Rat,
}

impl AffineCoeff {
    pub fn eval(&self, v: &Rat) -> Rat {
        &self.offset + v * &self.slope
    }

    pub fn render(&self) -> String {
        match (self.slope.is_zero(), self.offset.is_zero()) {
            (true, _) => fmt_rat(&self.offset),
            (false, true) => format!("{}*v", fmt_rat(&self.slope)),
            (false, false) => {
                if self.offset.is_negative() {
                    format!("{}*v - {}", fmt_rat(&self.slope), fmt_rat(&-&self.offset))
                } else {
                    format!("{}*v + {}", fmt_rat(&self.slope), fmt_rat(&self.offset))
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecompInterval {
    pub lo: Rat,
    pub hi: Rat,
    /// Active curves and their coefficient functions, in curve-id order.
    pub coeffs: BTreeMap<String, AffineCoeff>,
}

/// The one-parameter decomposition of `-K_S - vA` on `[0, tau]`.
#[derive(Debug, Clone)]
pub struct ParamDecomp {
    pub curve: String,
    pub intervals: Vec<DecompInterval>,
    pub tau: Rat,
}

struct Engine<'a> {
    cfg: &'a SurfaceConfig,
    a: &'a NegativeCurve,
    anti_k: DivisorClass,
}

/// Affine function of v as (offset, slope).
type Affine = (Rat, Rat);

impl<'a> Engine<'a> {
    fn new(cfg: &'a SurfaceConfig, curve_id: &str) -> Result<Self, ZariskiError> {
        let a = cfg.curve(curve_id)?;
        Ok(Engine {
            cfg,
            a,
            anti_k: anticanonical_class(),
        })
    }

    /// Solves the orthogonality system on the active set: coefficients are
    /// affine in v. Returns None on singular Gram matrix.
    fn solve_active(&self, active: &BTreeSet<String>) -> Option<BTreeMap<String, AffineCoeff>> {
        if active.is_empty() {
            return Some(BTreeMap::new());
        }
        let ids: Vec<&String> = active.iter().collect();
        let classes: Vec<&DivisorClass> = ids
            .iter()
            .map(|id| &self.cfg.curve(id).unwrap().class)
            .collect();
        let gram: Vec<Vec<Rat>> = classes
            .iter()
            .map(|x| classes.iter().map(|y| x.intersect(y)).collect())
            .collect();
        let rhs0: Vec<Rat> = classes.iter().map(|c| self.anti_k.intersect(c)).collect();
        let rhs1: Vec<Rat> = classes.iter().map(|c| -self.a.class.intersect(c)).collect();
        let offset = solve_linear(&gram, &rhs0)?;
        let slope = solve_linear(&gram, &rhs1)?;
        Some(
            ids.into_iter()
                .zip(offset.into_iter().zip(slope))
                .map(|(id, (offset, slope))| (id.clone(), AffineCoeff { offset, slope }))
                .collect(),
        )
    }

    /// `P(v).target` as an affine function, given active coefficients.
    fn p_dot(&self, coeffs: &BTreeMap<String, AffineCoeff>, target: &DivisorClass) -> Affine {
        let mut offset = self.anti_k.intersect(target);
        let mut slope = -self.a.class.intersect(target);
        for (id, c) in coeffs {
            let pairing = self.cfg.curve(id).unwrap().class.intersect(target);
            if !pairing.is_zero() {
                offset -= &c.offset * &pairing;
                slope -= &c.slope * &pairing;
            }
        }
        (offset, slope)
    }

    /// `P(v)^2` as a quadratic, using `P^2 = P.(-K) - v (P.A)`.
    fn p_squared(&self, coeffs: &BTreeMap<String, AffineCoeff>) -> QuadPoly {
        let (k0, k1) = self.p_dot(coeffs, &self.anti_k);
        let (a0, a1) = self.p_dot(coeffs, &self.a.class);
        QuadPoly::new(k0, k1 - a0, -a1)
    }

    /// Active set at `v0 + eps` for infinitesimal positive eps: a quantity is
    /// treated as negative when its value at v0 is negative, or zero with
    /// negative slope.
    fn fixpoint(&self, v0: &Rat) -> Result<(BTreeSet<String>, BTreeMap<String, AffineCoeff>), ZariskiError> {
        let neg_at = |f: &Affine| {
            let val = &f.0 + v0 * &f.1;
            val.is_negative() || (val.is_zero() && f.1.is_negative())
        };
        let mut active: BTreeSet<String> = BTreeSet::new();
        for _guard in 0..4 * self.cfg.curves().count() + 8 {
            let coeffs = self.solve_active(&active).ok_or_else(|| {
                ZariskiError::Internal(format!(
                    "singular Gram matrix on active set {{{}}}",
                    active.iter().cloned().collect::<Vec<_>>().join(", ")
                ))
            })?;
            // drop coefficients that are negative just after v0
            let drop: Vec<String> = coeffs
                .iter()
                .filter(|(_, c)| neg_at(&(c.offset.clone(), c.slope.clone())))
                .map(|(id, _)| id.clone())
                .collect();
            if !drop.is_empty() {
                for id in drop {
                    active.remove(&id);
                }
                continue;
            }
            // add curves met negatively just after v0
            let mut grew = false;
            for c in self.cfg.curves() {
                if c.id == self.a.id || active.contains(&c.id) {
                    continue;
                }
                if neg_at(&self.p_dot(&coeffs, &c.class)) {
                    active.insert(c.id.clone());
                    grew = true;
                }
            }
            if !grew {
                return Ok((active, coeffs));
            }
        }
        Err(ZariskiError::Internal(
            "active-set iteration did not converge".into(),
        ))
    }

    fn build(&self) -> Result<ParamDecomp, ZariskiError> {
        let mut intervals = Vec::new();
        let mut v = Rat::zero();
        let curve_count = self.cfg.curves().count();
        for _guard in 0..2 * curve_count + 8 {
            let (active, coeffs) = self.fixpoint(&v)?;
            // candidate events strictly after v
            let mut next: Option<Rat> = None;
            let mut bump = |root: Rat| {
                if next.is_none() || next.as_ref().unwrap() > &root {
                    next = Some(root);
                }
            };
            for c in self.cfg.curves() {
                if c.id == self.a.id || active.contains(&c.id) {
                    continue;
                }
                let (f0, f1) = self.p_dot(&coeffs, &c.class);
                if f1.is_negative() {
                    let root = -&f0 / &f1;
                    if root > v {
                        bump(root);
                    }
                }
            }
            for c in coeffs.values() {
                if c.slope.is_negative() {
                    let root = -&c.offset / &c.slope;
                    if root > v {
                        bump(root);
                    }
                }
            }
            let p2 = self.p_squared(&coeffs);
            let tau_candidate = p2
                .rational_roots()
                .into_iter()
                .find(|r| r >= &v && (next.is_none() || r <= next.as_ref().unwrap()));
            if let Some(tau) = tau_candidate {
                if tau > v {
                    intervals.push(DecompInterval {
                        lo: v,
                        hi: tau.clone(),
                        coeffs,
                    });
                } else if let Some(last) = intervals.last_mut() {
                    // tau exactly at the previous event: close there
                    last.hi = tau.clone();
                }
                if intervals.is_empty() {
                    return Err(ZariskiError::Internal(
                        "pseudo-effective threshold at v = 0".into(),
                    ));
                }
                return Ok(ParamDecomp {
                    curve: self.a.id.clone(),
                    intervals,
                    tau,
                });
            }
            let next = next.ok_or_else(|| {
                ZariskiError::Internal(format!(
                    "no event and P(v)^2 stays positive past v = {} for curve {}",
                    fmt_rat(&v),
                    self.a.id
                ))
            })?;
            intervals.push(DecompInterval {
                lo: v.clone(),
                hi: next.clone(),
                coeffs,
            });
            v = next;
        }
        Err(ZariskiError::Internal(
            "interval construction did not terminate".into(),
        ))
    }
}

/// Exact parametric Zariski decomposition of `-K_S - vA` for a negative
/// curve `A` of the configuration.
pub fn param_zariski(cfg: &SurfaceConfig, curve_id: &str) -> Result<ParamDecomp, ZariskiError> {
    Engine::new(cfg, curve_id)?.build()
}

impl ParamDecomp {
    pub fn interval_for(&self, v: &Rat) -> Result<&DecompInterval, ZariskiError> {
        if v < &Rat::zero() || v > &self.tau {
            return Err(ZariskiError::Domain {
                lo: "0".into(),
                hi: fmt_rat(&self.tau),
                at: fmt_rat(v),
            });
        }
        Ok(self
            .intervals
            .iter()
            .find(|iv| v <= &iv.hi)
            .unwrap_or_else(|| self.intervals.last().unwrap()))
    }

    /// The positive part `P(v)` as a divisor class.
    pub fn positive_part_at(
        &self,
        cfg: &SurfaceConfig,
        v: &Rat,
    ) -> Result<DivisorClass, ZariskiError> {
        let iv = self.interval_for(v)?;
        let mut p = anticanonical_class().sub(&cfg.curve(&self.curve)?.class.scale(v));
        for (id, c) in &iv.coeffs {
            p = p.sub(&cfg.curve(id)?.class.scale(&c.eval(v)));
        }
        Ok(p)
    }

    /// Coefficients of `N(v)`, dropping exact zeros.
    pub fn negative_part_at(&self, v: &Rat) -> Result<Vec<(String, Rat)>, ZariskiError> {
        let iv = self.interval_for(v)?;
        Ok(iv
            .coeffs
            .iter()
            .map(|(id, c)| (id.clone(), c.eval(v)))
            .filter(|(_, x)| !x.is_zero())
            .collect())
    }

    /// `v -> P(v)^2` as an exact piecewise quadratic on `[0, tau]`.
    pub fn volume_function(&self, cfg: &SurfaceConfig) -> Result<PiecewiseFunc, ZariskiError> {
        let eng = Engine::new(cfg, &self.curve)?;
        PiecewiseFunc::from_intervals(
            self.intervals
                .iter()
                .map(|iv| (iv.lo.clone(), iv.hi.clone(), eng.p_squared(&iv.coeffs)))
                .collect(),
        )
    }

    /// `v -> P(v).A` as an exact piecewise (affine) function on `[0, tau]`.
    pub fn degree_function(&self, cfg: &SurfaceConfig) -> Result<PiecewiseFunc, ZariskiError> {
        let eng = Engine::new(cfg, &self.curve)?;
        PiecewiseFunc::from_intervals(
            self.intervals
                .iter()
                .map(|iv| {
                    let (c0, c1) = eng.p_dot(&iv.coeffs, &eng.a.class);
                    (iv.lo.clone(), iv.hi.clone(), QuadPoly::new(c0, c1, Rat::zero()))
                })
                .collect(),
        )
    }

    /// Structural validation of every spec invariant of the decomposition.
    /// `samples` interior rational points per interval are checked for
    /// nefness and orthogonality on top of the exact endpoint checks.
    pub fn validate(&self, cfg: &SurfaceConfig) -> Result<(), ZariskiError> {
        let eng = Engine::new(cfg, &self.curve)?;
        let bail = |msg: String| Err(ZariskiError::Internal(msg));
        let mut prev_active: Option<BTreeSet<String>> = None;
        let mut prev_hi: Option<(Rat, BTreeMap<String, AffineCoeff>)> = None;
        for iv in &self.intervals {
            if iv.lo >= iv.hi {
                return bail("empty interval".into());
            }
            let active: BTreeSet<String> = iv.coeffs.keys().cloned().collect();
            // coefficients >= 0 and non-decreasing on the whole interval
            // (affine: endpoints and slope sign suffice); monotonicity is
            // validated, not assumed
            for (id, c) in &iv.coeffs {
                if c.eval(&iv.lo).is_negative() || c.eval(&iv.hi).is_negative() {
                    return bail(format!("coefficient of {id} negative on interval"));
                }
                if c.slope.is_negative() {
                    return bail(format!("coefficient of {id} decreasing on interval"));
                }
            }
            // orthogonality identically in v (affine, zero at both endpoints)
            for id in &active {
                let f = eng.p_dot(&iv.coeffs, &cfg.curve(id)?.class);
                if !(&f.0 + &iv.lo * &f.1).is_zero() || !(&f.0 + &iv.hi * &f.1).is_zero() {
                    return bail(format!("P(v).{id} not identically zero on active set"));
                }
            }
            // nefness against every curve at endpoints (affine in v)
            for c in cfg.curves() {
                if c.id == self.curve {
                    continue;
                }
                let f = eng.p_dot(&iv.coeffs, &c.class);
                if (&f.0 + &iv.lo * &f.1).is_negative() || (&f.0 + &iv.hi * &f.1).is_negative() {
                    return bail(format!("P(v).{} negative on [{}, {}]", c.id, iv.lo, iv.hi));
                }
            }
            // negative-definite active Gram
            if !active.is_empty() {
                let classes: Vec<DivisorClass> = active
                    .iter()
                    .map(|id| cfg.curve(id).unwrap().class.clone())
                    .collect();
                if !is_negative_definite(&classes) {
                    return bail("active set Gram matrix not negative definite".into());
                }
            }
            // P^2 non-increasing (derivative affine: endpoints suffice)
            let p2 = eng.p_squared(&iv.coeffs);
            if p2.derivative_at(&iv.lo).is_positive() || p2.derivative_at(&iv.hi).is_positive() {
                return bail("P(v)^2 increasing somewhere".into());
            }
            // continuity with previous interval: N-coefficients agree at the joint
            if let Some((at, ref prev_coeffs)) = prev_hi {
                if at != iv.lo {
                    return bail("interval gap".into());
                }
                let ids: BTreeSet<&String> = prev_coeffs.keys().chain(iv.coeffs.keys()).collect();
                for id in ids {
                    let a = prev_coeffs.get(id).map(|c| c.eval(&at)).unwrap_or_else(Rat::zero);
                    let b = iv.coeffs.get(id).map(|c| c.eval(&at)).unwrap_or_else(Rat::zero);
                    if a != b {
                        return bail(format!("coefficient of {id} jumps at {}", fmt_rat(&at)));
                    }
                }
            }
            // monotone active sets (reported, not assumed)
            if let Some(prev) = &prev_active {
                if !prev.is_subset(&active) {
                    return bail("active set lost a curve between intervals".into());
                }
            }
            prev_active = Some(active);
            prev_hi = Some((iv.hi.clone(), iv.coeffs.clone()));
        }
        // tau is where the volume vanishes
        let vol = self.volume_function(cfg)?;
        if !vol.eval(&self.tau)?.is_zero() {
            return bail("P(tau)^2 != 0".into());
        }
        if self.intervals.first().map(|iv| iv.lo.clone()) != Some(Rat::zero()) {
            return bail("decomposition does not start at v = 0".into());
        }
        Ok(())
    }
}

/// Pseudo-effective threshold of `A` with respect to `-K`: the first zero
/// of `P(v)^2`, i.e. the endpoint of the parametric decomposition.
pub fn tau(cfg: &SurfaceConfig, curve_id: &str) -> Result<Rat, ZariskiError> {
    Ok(param_zariski(cfg, curve_id)?.tau)
}

/// `v -> P(v)^2`.
pub fn volume_function(cfg: &SurfaceConfig, curve_id: &str) -> Result<PiecewiseFunc, ZariskiError> {
    param_zariski(cfg, curve_id)?.volume_function(cfg)
}

/// `v -> P(v).A`.
pub fn degree_function(cfg: &SurfaceConfig, curve_id: &str) -> Result<PiecewiseFunc, ZariskiError> {
    param_zariski(cfg, curve_id)?.degree_function(cfg)
}

/// Nefness against the negative curves of the configuration. On a weak del
/// Pezzo resolution the Mori cone is generated by the (-1)- and (-2)-curves,
/// so this test is also sufficient.
pub fn is_nef(d: &DivisorClass, cfg: &SurfaceConfig) -> bool {
    cfg.curves().all(|c| !d.intersect(&c.class).is_negative())
}

/// Pointwise Zariski decomposition `D = P + N` of an arbitrary divisor class:
/// `P` nef, `P.C = 0` for every component of `N`, `supp N` negative definite,
/// all `N`-coefficients positive.
pub fn zariski_at(
    d: &DivisorClass,
    cfg: &SurfaceConfig,
) -> Result<(DivisorClass, Vec<(String, Rat)>), ZariskiError> {
    let mut active: BTreeSet<String> = BTreeSet::new();
    let curve_count = cfg.curves().count();
    for _guard in 0..4 * curve_count + 8 {
        // solve (D - sum x_i C_i).C_j = 0 on the active set
        let ids: Vec<String> = active.iter().cloned().collect();
        let coeffs: Vec<Rat> = if ids.is_empty() {
            Vec::new()
        } else {
            let classes: Vec<&DivisorClass> =
                ids.iter().map(|id| &cfg.curve(id).unwrap().class).collect();
            let gram: Vec<Vec<Rat>> = classes
                .iter()
                .map(|x| classes.iter().map(|y| x.intersect(y)).collect())
                .collect();
            let rhs: Vec<Rat> = classes.iter().map(|c| d.intersect(c)).collect();
            solve_linear(&gram, &rhs).ok_or(ZariskiError::NotPseudoEffective)?
        };
        if let Some(pos) = coeffs.iter().position(|x| x.is_negative()) {
            active.remove(&ids[pos]);
            continue;
        }
        let mut p = d.clone();
        for (id, x) in ids.iter().zip(&coeffs) {
            p = p.sub(&cfg.curve(id)?.class.scale(x));
        }
        let violated: Vec<String> = cfg
            .curves()
            .filter(|c| !active.contains(&c.id) && p.intersect(&c.class).is_negative())
            .map(|c| c.id.clone())
            .collect();
        if violated.is_empty() {
            if p.self_intersection().is_negative() {
                return Err(ZariskiError::NotPseudoEffective);
            }
            let n: Vec<(String, Rat)> = ids
                .into_iter()
                .zip(coeffs)
                .filter(|(_, x)| x.is_positive())
                .collect();
            if !n.is_empty() {
                let support: Vec<DivisorClass> = n
                    .iter()
                    .map(|(id, _)| cfg.curve(id).unwrap().class.clone())
                    .collect();
                if !is_negative_definite(&support) {
                    return Err(ZariskiError::Internal(
                        "negative part support not negative definite".into(),
                    ));
                }
            }
            return Ok((p, n));
        }
        active.extend(violated);
    }
    Err(ZariskiError::Internal(
        "pointwise active-set iteration did not converge".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::builtin;
    use crate::lattice::rat;

    #[test]
    fn integrate_constant_and_square() {
        let one = PiecewiseFunc::new(vec![rint(0), rint(2)], vec![QuadPoly::constant(rint(1))])
            .unwrap();
        assert_eq!(one.integrate(&rint(0), &rint(2)).unwrap(), rint(2));
        let sq = PiecewiseFunc::new(
            vec![rint(0), rint(1)],
            vec![QuadPoly::new(rint(0), rint(0), rint(1))],
        )
        .unwrap();
        assert_eq!(sq.integrate(&rint(0), &rint(1)).unwrap(), rat(1, 3));
        assert!(sq.eval(&rint(2)).is_err());
    }

    #[test]
    fn anticanonical_is_nef_on_builtins() {
        for cfg in crate::config::builtins() {
            assert!(is_nef(&anticanonical_class(), cfg), "{}", cfg.name);
        }
    }

    #[test]
    fn minus_k_minus_2e_not_nef_on_a1() {
        let cfg = builtin("A1").unwrap();
        let e = &cfg.curve("E").unwrap().class;
        let d = anticanonical_class().sub(&e.scale(&rint(2)));
        assert!(!is_nef(&d, cfg));
        // at v = 0 the divisor is -K, nef for every curve choice
        assert!(is_nef(&anticanonical_class(), cfg));
    }

    #[test]
    fn pointwise_nef_input_is_its_own_positive_part() {
        let cfg = builtin("A1").unwrap();
        let (p, n) = zariski_at(&anticanonical_class(), cfg).unwrap();
        assert_eq!(p, anticanonical_class());
        assert!(n.is_empty());
    }

    #[test]
    fn pointwise_line_meeting_root_at_v1() {
        // D = -K - 1*L1 on A1: N = (1/2) E
        let cfg = builtin("A1").unwrap();
        let a = &cfg.curve("L1").unwrap().class;
        let d = anticanonical_class().sub(a);
        let (p, n) = zariski_at(&d, cfg).unwrap();
        assert_eq!(n, vec![("E".to_string(), rat(1, 2))]);
        assert_eq!(p.intersect(&cfg.curve("E").unwrap().class), rint(0));
    }

    #[test]
    fn pointwise_line_at_v_five_fourths() {
        // D = -K - (5/4) L1 on A1: N = (5/8) E + (1/4)(five lines meeting L1)
        let cfg = builtin("A1").unwrap();
        let a = &cfg.curve("L1").unwrap().class;
        let d = anticanonical_class().sub(&a.scale(&rat(5, 4)));
        let (_, n) = zariski_at(&d, cfg).unwrap();
        let map: BTreeMap<String, Rat> = n.into_iter().collect();
        assert_eq!(map["E"], rat(5, 8));
        let quarter = map.values().filter(|x| **x == rat(1, 4)).count();
        assert_eq!(quarter, 5);
        assert_eq!(map.len(), 6);
    }

    #[test]
    fn not_pseudo_effective_detected() {
        let cfg = builtin("A1").unwrap();
        let a = &cfg.curve("L1").unwrap().class;
        // tau(L1) = 4/3; v = 2 is outside the pseudo-effective range
        let d = anticanonical_class().sub(&a.scale(&rint(2)));
        assert!(matches!(
            zariski_at(&d, cfg),
            Err(ZariskiError::NotPseudoEffective)
        ));
    }

    #[test]
    fn param_a1_root_intervals() {
        // A = E on A1: intervals [0,1], [1,3/2]; six lines active with (v-1)
        let cfg = builtin("A1").unwrap();
        let dec = param_zariski(cfg, "E").unwrap();
        assert_eq!(dec.tau, rat(3, 2));
        assert_eq!(dec.intervals.len(), 2);
        assert_eq!(dec.intervals[0].hi, rint(1));
        assert!(dec.intervals[0].coeffs.is_empty());
        let second = &dec.intervals[1].coeffs;
        assert_eq!(second.len(), 6);
        for c in second.values() {
            assert_eq!((c.offset.clone(), c.slope.clone()), (rint(-1), rint(1)));
        }
        dec.validate(cfg).unwrap();
    }

    #[test]
    fn param_a2_line_starts_with_two_thirds_arm() {
        // case V: a line meeting E1 has N(v) = (v/3)(2 E1 + E1') on [0,1]
        let cfg = builtin("A2").unwrap();
        let dec = param_zariski(cfg, "L1,1").unwrap();
        assert_eq!(dec.tau, rat(3, 2));
        assert_eq!(dec.intervals[0].hi, rint(1));
        let first = &dec.intervals[0].coeffs;
        assert_eq!(first["E1"], AffineCoeff { offset: rint(0), slope: rat(2, 3) });
        assert_eq!(first["E1'"], AffineCoeff { offset: rint(0), slope: rat(1, 3) });
        dec.validate(cfg).unwrap();
    }

    #[test]
    fn param_two_root_line_tau_two() {
        // 4A1, A = L12 meeting two roots: N = (v/2)(E1 + E2), then one line
        let cfg = builtin("4A1").unwrap();
        let dec = param_zariski(cfg, "L12").unwrap();
        assert_eq!(dec.tau, rint(2));
        let first = &dec.intervals[0].coeffs;
        assert_eq!(first.len(), 2);
        for c in first.values() {
            assert_eq!(c.slope, rat(1, 2));
        }
        dec.validate(cfg).unwrap();
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(builtin("A1").unwrap(), "L1").unwrap(), rat(4, 3));
        assert_eq!(tau(builtin("A1").unwrap(), "E").unwrap(), rat(3, 2));
        assert_eq!(tau(builtin("E6").unwrap(), "E3").unwrap(), rint(6));
    }

    #[test]
    fn volume_at_zero_is_three() {
        for (name, curve) in [("A1", "E"), ("A1", "L1"), ("E6", "E3"), ("D4", "E")] {
            let cfg = builtin(name).unwrap();
            let vol = volume_function(cfg, curve).unwrap();
            assert_eq!(vol.eval(&rint(0)).unwrap(), rint(3), "{name}/{curve}");
        }
    }

    #[test]
    fn volume_pieces_for_27_17_lemma() {
        // P^2 = 3 - 2v - v^2/2 on [0,1], (4-3v)^2/2 on [1,4/3]
        let cfg = builtin("A1").unwrap();
        let vol = volume_function(cfg, "L1").unwrap();
        assert_eq!(vol.breakpoints(), &[rint(0), rint(1), rat(4, 3)]);
        assert_eq!(
            vol.pieces()[0],
            QuadPoly::new(rint(3), rint(-2), rat(-1, 2))
        );
        assert_eq!(vol.pieces()[1], QuadPoly::new(rint(8), rint(-12), rat(9, 2)));
        let deg = degree_function(cfg, "L1").unwrap();
        assert_eq!(deg.pieces()[0], QuadPoly::new(rint(1), rat(1, 2), rint(0)));
        assert_eq!(deg.pieces()[1], QuadPoly::new(rint(6), rat(-9, 2), rint(0)));
    }

    #[test]
    fn volume_three_pieces_for_9_13_lemma() {
        // A4, A = E1: pieces 3-5v^2/6, v^2/6-2v+4, 2(3-v)^2/3 with breaks 1, 2
        let cfg = builtin("A4").unwrap();
        let vol = volume_function(cfg, "E1").unwrap();
        assert_eq!(
            vol.breakpoints(),
            &[rint(0), rint(1), rint(2), rint(3)]
        );
        assert_eq!(vol.pieces()[0], QuadPoly::new(rint(3), rint(0), rat(-5, 6)));
        assert_eq!(vol.pieces()[1], QuadPoly::new(rint(4), rint(-2), rat(1, 6)));
        assert_eq!(vol.pieces()[2], QuadPoly::new(rint(6), rint(-4), rat(2, 3)));
    }

    #[test]
    fn integral_of_a1_root_volume() {
        // so that S = (1/3) * (5/2) = 5/6
        let cfg = builtin("A1").unwrap();
        let vol = volume_function(cfg, "E").unwrap();
        let total = vol.integrate(&rint(0), &rat(3, 2)).unwrap();
        assert_eq!(total, rat(5, 2));
    }

    #[test]
    fn all_builtin_decompositions_validate() {
        for cfg in crate::config::builtins() {
            for c in cfg.curves() {
                let dec = param_zariski(cfg, &c.id)
                    .unwrap_or_else(|e| panic!("{}/{}: {e}", cfg.name, c.id));
                dec.validate(cfg)
                    .unwrap_or_else(|e| panic!("{}/{}: {e}", cfg.name, c.id));
            }
        }
    }
}
