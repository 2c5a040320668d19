//! Surface configurations: negative curves, point incidences and strata for
//! the 20 singular degree-3 surfaces, plus user-supplied ones.
//!
//! A configuration is determined by the simple roots of its singularity
//! subsystem inside the degree-3 root lattice. The (-1)-curves are derived by
//! exhaustive enumeration, incidences default to pairwise transverse
//! intersections at distinct points, and everything is re-validated on
//! construction: curve kinds, the Dynkin shape of the (-2)-graph, incidence
//! totals against the intersection pairing, and the expected line count.

use crate::lattice::{
    fmt_rat, parse_rat, rint, DivisorClass, Rat,
};
use num_traits::{Signed, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("class {0} is not a root: need cls^2 = -2 and cls.K = 0")]
    NotARoot(String),
    #[error("class {0} is not a (-1)-class on this surface")]
    NotALine(String),
    #[error("duplicate curve class {0}")]
    DuplicateClass(String),
    #[error("duplicate curve id `{0}`")]
    DuplicateId(String),
    #[error("curve `{id}` has kind {kind:?} but cls^2 = {sq}, cls.K = {ck}")]
    KindMismatch {
        id: String,
        kind: CurveKind,
        sq: String,
        ck: String,
    },
    #[error("point `{id}` references unknown curve `{curve}`")]
    UnknownCurveInPoint { id: String, curve: String },
    #[error("point `{0}` must lie on at least two curves")]
    PointTooSmall(String),
    #[error("incidence total for ({a}, {b}) is {got}, pairing gives {want}")]
    IncidenceMismatch {
        a: String,
        b: String,
        got: String,
        want: String,
    },
    #[error("(-2)-curve graph has Dynkin type {found}, label says {label}")]
    DynkinMismatch { found: String, label: String },
    #[error("bad singularity label `{0}`")]
    BadSingularityLabel(String),
    #[error("expected {want} lines, derived {got}")]
    LineCountMismatch { want: usize, got: usize },
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("negative intersection {pairing} between {a} and {b}")]
    NegativePairing { a: String, b: String, pairing: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    /// (-1)-curve: exceptional line, cls^2 = -1, cls.K = -1.
    MinusOne,
    /// (-2)-curve over a Du Val point: cls^2 = -2, cls.K = 0.
    MinusTwo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeCurve {
    pub id: String,
    pub class: DivisorClass,
    pub kind: CurveKind,
}

/// A named point together with the curves through it and the local
/// multiplicity of each curve branch. For a curve pair (C, C') the local
/// intersection number at the point is the product of the two multiplicities,
/// and the totals over all shared points must equal `C . C'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointIncidence {
    pub id: String,
    pub on_curves: Vec<(String, u32)>,
}

impl PointIncidence {
    pub fn multiplicity_of(&self, curve: &str) -> Option<u32> {
        self.on_curves
            .iter()
            .find(|(c, _)| c == curve)
            .map(|(_, m)| *m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub lines: usize,
    pub delta: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceConfig {
    pub name: String,
    pub singularities: String,
    curves: Vec<NegativeCurve>,
    points: Vec<PointIncidence>,
    pub expected: Option<Expected>,
    index: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum StratumKind {
    AtPoint(String),
    CurveGeneric(String),
    SurfaceGeneric,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointStratum {
    pub kind: StratumKind,
    pub curves_through: Vec<String>,
}

impl PointStratum {
    /// Row label mirroring the tables: the curve id, the point id, or `o/w`.
    pub fn label(&self) -> String {
        match &self.kind {
            StratumKind::AtPoint(p) => p.clone(),
            StratumKind::CurveGeneric(c) => c.clone(),
            StratumKind::SurfaceGeneric => "o/w".to_string(),
        }
    }
}

/// Enumerates the (-1)-classes present on the surface with the given
/// effective roots: those of the 27 classes `l` with `l^2 = l.K = -1`
/// pairing non-negatively against every root. Deterministic lexicographic
/// order on coefficient vectors.
pub fn enumerate_lines(roots: &[DivisorClass]) -> Result<Vec<DivisorClass>, ValidationError> {
    for r in roots {
        if !r.is_root_class() {
            return Err(ValidationError::NotARoot(r.to_string()));
        }
    }
    let mut out: Vec<DivisorClass> = all_line_classes()
        .iter()
        .filter(|l| roots.iter().all(|r| !l.intersect(r).is_negative()))
        .cloned()
        .collect();
    out.sort();
    Ok(out)
}

/// The 27 (-1)-classes of the full lattice, by exhaustive scan (cached).
pub fn all_line_classes() -> &'static [DivisorClass] {
    static LINES: Lazy<Vec<DivisorClass>> = Lazy::new(|| {
        let mut out = Vec::new();
        let k = crate::lattice::canonical_class();
        let mut m = [0i64; 7];
        for d in 0..=2i64 {
            m[0] = d;
            scan(&mut m, 1, &k, &mut out);
        }
        out.sort();
        out
    });
    return &LINES;

    fn scan(m: &mut [i64; 7], pos: usize, k: &DivisorClass, out: &mut Vec<DivisorClass>) {
        if pos == 7 {
            let cls = DivisorClass::from_ints(*m);
            if cls.self_intersection() == rint(-1) && cls.intersect(k) == rint(-1) {
                out.push(cls);
            }
            return;
        }
        for v in -2..=2 {
            m[pos] = v;
            scan(m, pos + 1, k, out);
        }
    }
}


fn auto_line_id(cls: &DivisorClass) -> String {
    let c = cls.coeffs();
    if c[0].is_zero() {
        let i = (1..7).find(|&i| !c[i].is_zero()).unwrap();
        return format!("e{i}");
    }
    if c[0] == rint(1) {
        let ij: Vec<usize> = (1..7).filter(|&i| c[i] == rint(-1)).collect();
        return format!("h{}{}", ij[0], ij[1]);
    }
    let skip = (1..7).find(|&i| c[i].is_zero()).unwrap();
    format!("q{skip}")
}

// ---------------------------------------------------------------------------
// Dynkin classification of the (-2)-curve graph
// ---------------------------------------------------------------------------

/// Classifies a simply-laced Dynkin diagram given as an adjacency list.
/// Returns e.g. "A3", "D4", "E6", or None when the shape is not ADE.
fn classify_component(nodes: &[usize], adj: &BTreeMap<usize, Vec<usize>>) -> Option<String> {
    let n = nodes.len();
    let deg = |v: usize| adj[&v].len();
    let edge_count: usize = nodes.iter().map(|&v| deg(v)).sum::<usize>() / 2;
    if edge_count != n - 1 {
        return None; // has a cycle: not a Dynkin tree
    }
    let branch: Vec<usize> = nodes.iter().copied().filter(|&v| deg(v) >= 3).collect();
    match branch.len() {
        0 => Some(format!("A{n}")),
        1 => {
            let b = branch[0];
            if deg(b) != 3 {
                return None;
            }
            // lengths of the three arms hanging off the branch node
            let mut arms: Vec<usize> = adj[&b]
                .iter()
                .map(|&start| {
                    let mut len = 1;
                    let mut prev = b;
                    let mut cur = start;
                    while let Some(&next) = adj[&cur].iter().find(|&&x| x != prev) {
                        prev = cur;
                        cur = next;
                        len += 1;
                    }
                    len
                })
                .collect();
            arms.sort();
            match arms.as_slice() {
                [1, 1, k] => Some(format!("D{}", k + 3)),
                [1, 2, 2] => Some("E6".to_string()),
                [1, 2, 3] => Some("E7".to_string()),
                [1, 2, 4] => Some("E8".to_string()),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Dynkin type of a set of root classes ("A3+2A1" style, factors sorted).
fn dynkin_type(roots: &[&NegativeCurve]) -> Option<String> {
    if roots.is_empty() {
        return Some(String::new());
    }
    let n = roots.len();
    let mut adj: BTreeMap<usize, Vec<usize>> = (0..n).map(|i| (i, Vec::new())).collect();
    for i in 0..n {
        for j in i + 1..n {
            let p = roots[i].class.intersect(&roots[j].class);
            if p == rint(1) {
                adj.get_mut(&i).unwrap().push(j);
                adj.get_mut(&j).unwrap().push(i);
            } else if !p.is_zero() {
                return None; // not a valid set of simple roots of curves
            }
        }
    }
    // connected components
    let mut seen = vec![false; n];
    let mut parts: Vec<String> = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        let mut comp = Vec::new();
        seen[s] = true;
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in &adj[&v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        parts.push(classify_component(&comp, &adj)?);
    }
    Some(normalize_label_parts(parts))
}

fn normalize_label_parts(mut parts: Vec<String>) -> String {
    // sort by rank descending then letter (E > D > A for same rank reads naturally)
    parts.sort_by(|a, b| {
        let ra: usize = a[1..].parse().unwrap_or(0);
        let rb: usize = b[1..].parse().unwrap_or(0);
        rb.cmp(&ra).then_with(|| b[..1].cmp(&a[..1]))
    });
    let mut grouped: Vec<(String, usize)> = Vec::new();
    for p in parts {
        match grouped.last_mut() {
            Some((q, k)) if *q == p => *k += 1,
            _ => grouped.push((p, 1)),
        }
    }
    grouped
        .into_iter()
        .map(|(p, k)| if k == 1 { p } else { format!("{k}{p}") })
        .collect::<Vec<_>>()
        .join("+")
}

/// Parses a singularity label like "A3+2A1" into its normalized form.
/// The empty label denotes a smooth surface (no roots).
fn parse_singularity_label(label: &str) -> Result<String, ValidationError> {
    if label.trim().is_empty() {
        return Ok(String::new());
    }
    let mut parts = Vec::new();
    for term in label.split('+') {
        let term = term.trim();
        let (count, rest) = match term.find(|c: char| c.is_ascii_alphabetic()) {
            Some(0) => (1usize, term),
            Some(i) => (
                term[..i]
                    .parse()
                    .map_err(|_| ValidationError::BadSingularityLabel(label.into()))?,
                &term[i..],
            ),
            None => return Err(ValidationError::BadSingularityLabel(label.into())),
        };
        let letter = &rest[..1];
        if !matches!(letter, "A" | "D" | "E") || rest[1..].parse::<usize>().is_err() {
            return Err(ValidationError::BadSingularityLabel(label.into()));
        }
        for _ in 0..count {
            parts.push(rest.to_string());
        }
    }
    Ok(normalize_label_parts(parts))
}

// ---------------------------------------------------------------------------
// construction & validation
// ---------------------------------------------------------------------------

/// Builds and validates a configuration.
///
/// `named_lines` may cover only part of the line set; remaining lines get
/// geometric ids (`e4`, `h12`, `q6`). `points` may be `None`, in which case
/// every intersecting curve pair meets transversally at its own point.
pub fn build_config(
    name: &str,
    singularities: &str,
    roots: Vec<(String, DivisorClass)>,
    named_lines: Vec<(String, DivisorClass)>,
    points: Option<Vec<PointIncidence>>,
    expected: Option<Expected>,
) -> Result<SurfaceConfig, ValidationError> {
    let mut curves: Vec<NegativeCurve> = Vec::new();
    for (id, class) in roots {
        if !class.is_root_class() {
            return Err(ValidationError::NotARoot(format!("{id} = {class}")));
        }
        curves.push(NegativeCurve {
            id,
            class,
            kind: CurveKind::MinusTwo,
        });
    }
    let root_classes: Vec<DivisorClass> = curves.iter().map(|c| c.class.clone()).collect();
    let lines = enumerate_lines(&root_classes)?;
    let mut by_class: BTreeMap<DivisorClass, String> = BTreeMap::new();
    for (id, class) in named_lines {
        if !lines.contains(&class) {
            return Err(ValidationError::NotALine(format!("{id} = {class}")));
        }
        if by_class.insert(class.clone(), id).is_some() {
            return Err(ValidationError::DuplicateClass(class.to_string()));
        }
    }
    // named lines first, in the order the line list provides
    for cls in &lines {
        let id = by_class
            .get(cls)
            .cloned()
            .unwrap_or_else(|| auto_line_id(cls));
        curves.push(NegativeCurve {
            id,
            class: cls.clone(),
            kind: CurveKind::MinusOne,
        });
    }

    // distinctness of classes and ids, kind invariants
    let mut seen_cls = BTreeSet::new();
    let mut seen_id = BTreeSet::new();
    for c in &curves {
        if !seen_cls.insert(c.class.clone()) {
            return Err(ValidationError::DuplicateClass(c.class.to_string()));
        }
        if !seen_id.insert(c.id.clone()) {
            return Err(ValidationError::DuplicateId(c.id.clone()));
        }
        let sq = c.class.self_intersection();
        let ck = c.class.intersect(&crate::lattice::canonical_class());
        let ok = match c.kind {
            CurveKind::MinusOne => sq == rint(-1) && ck == rint(-1),
            CurveKind::MinusTwo => sq == rint(-2) && ck.is_zero(),
        };
        if !ok {
            return Err(ValidationError::KindMismatch {
                id: c.id.clone(),
                kind: c.kind,
                sq: fmt_rat(&sq),
                ck: fmt_rat(&ck),
            });
        }
    }

    // Dynkin shape of the (-2)-graph against the label
    let root_refs: Vec<&NegativeCurve> = curves
        .iter()
        .filter(|c| c.kind == CurveKind::MinusTwo)
        .collect();
    let found = dynkin_type(&root_refs).ok_or_else(|| ValidationError::DynkinMismatch {
        found: "not a union of ADE trees".into(),
        label: singularities.into(),
    })?;
    let want = parse_singularity_label(singularities)?;
    if found != want {
        return Err(ValidationError::DynkinMismatch {
            found,
            label: singularities.into(),
        });
    }

    // points: explicit ones first, then defaults for uncovered pairs
    let idx: BTreeMap<String, usize> = curves
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.clone(), i))
        .collect();
    let mut pts: Vec<PointIncidence> = Vec::new();
    let mut covered: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    let mut point_ids = BTreeSet::new();
    if let Some(explicit) = points {
        for p in explicit {
            if p.on_curves.len() < 2 {
                return Err(ValidationError::PointTooSmall(p.id.clone()));
            }
            if !point_ids.insert(p.id.clone()) {
                return Err(ValidationError::DuplicateId(p.id.clone()));
            }
            for (cid, _) in &p.on_curves {
                if !idx.contains_key(cid) {
                    return Err(ValidationError::UnknownCurveInPoint {
                        id: p.id.clone(),
                        curve: cid.clone(),
                    });
                }
            }
            for a in 0..p.on_curves.len() {
                for b in a + 1..p.on_curves.len() {
                    let (ca, ma) = &p.on_curves[a];
                    let (cb, mb) = &p.on_curves[b];
                    let (ia, ib) = (idx[ca], idx[cb]);
                    let key = (ia.min(ib), ia.max(ib));
                    *covered.entry(key).or_insert_with(Rat::zero) +=
                        rint(*ma as i64) * rint(*mb as i64);
                }
            }
            pts.push(p);
        }
    }
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let pairing = curves[i].class.intersect(&curves[j].class);
            if pairing.is_negative() {
                return Err(ValidationError::NegativePairing {
                    a: curves[i].id.clone(),
                    b: curves[j].id.clone(),
                    pairing: fmt_rat(&pairing),
                });
            }
            let have = covered.get(&(i, j)).cloned().unwrap_or_else(Rat::zero);
            let missing = &pairing - &have;
            if missing.is_negative() || !missing.denom().eq(&1.into()) {
                return Err(ValidationError::IncidenceMismatch {
                    a: curves[i].id.clone(),
                    b: curves[j].id.clone(),
                    got: fmt_rat(&have),
                    want: fmt_rat(&pairing),
                });
            }
            let missing: i64 = missing.to_integer().try_into().unwrap_or(0);
            for k in 0..missing {
                let id = if pairing == rint(1) && missing == 1 {
                    format!("{}*{}", curves[i].id, curves[j].id)
                } else {
                    format!("{}*{}#{}", curves[i].id, curves[j].id, k + 1)
                };
                pts.push(PointIncidence {
                    id,
                    on_curves: vec![(curves[i].id.clone(), 1), (curves[j].id.clone(), 1)],
                });
            }
        }
    }

    let cfg = SurfaceConfig {
        name: name.to_string(),
        singularities: singularities.to_string(),
        curves,
        points: pts,
        expected,
        index: idx,
    };
    cfg.validate_incidences()?;
    if let Some(exp) = &cfg.expected {
        let got = cfg.lines().count();
        if got != exp.lines {
            return Err(ValidationError::LineCountMismatch {
                want: exp.lines,
                got,
            });
        }
    }
    Ok(cfg)
}

impl SurfaceConfig {
    pub fn curves(&self) -> impl Iterator<Item = &NegativeCurve> {
        self.curves.iter()
    }

    pub fn curve(&self, id: &str) -> Result<&NegativeCurve, ValidationError> {
        self.index
            .get(id)
            .map(|&i| &self.curves[i])
            .ok_or_else(|| ValidationError::UnknownCurve(id.to_string()))
    }

    pub fn roots(&self) -> impl Iterator<Item = &NegativeCurve> {
        self.curves.iter().filter(|c| c.kind == CurveKind::MinusTwo)
    }

    pub fn lines(&self) -> impl Iterator<Item = &NegativeCurve> {
        self.curves.iter().filter(|c| c.kind == CurveKind::MinusOne)
    }

    pub fn points(&self) -> impl Iterator<Item = &PointIncidence> {
        self.points.iter()
    }

    pub fn point(&self, id: &str) -> Option<&PointIncidence> {
        self.points.iter().find(|p| p.id == id)
    }

    /// Per curve pair: sum over shared points of the product of local
    /// multiplicities must equal the intersection number.
    fn validate_incidences(&self) -> Result<(), ValidationError> {
        for i in 0..self.curves.len() {
            for j in i + 1..self.curves.len() {
                let want = self.curves[i].class.intersect(&self.curves[j].class);
                let mut got = Rat::zero();
                for p in &self.points {
                    if let (Some(ma), Some(mb)) = (
                        p.multiplicity_of(&self.curves[i].id),
                        p.multiplicity_of(&self.curves[j].id),
                    ) {
                        got += rint(ma as i64) * rint(mb as i64);
                    }
                }
                if got != want {
                    return Err(ValidationError::IncidenceMismatch {
                        a: self.curves[i].id.clone(),
                        b: self.curves[j].id.clone(),
                        got: fmt_rat(&got),
                        want: fmt_rat(&want),
                    });
                }
            }
        }
        Ok(())
    }

    /// Weighted dual graph: one node per curve, edges carry the pairing.
    pub fn dual_graph(&self) -> DualGraph {
        let mut edges = BTreeMap::new();
        for i in 0..self.curves.len() {
            for j in i + 1..self.curves.len() {
                let w = self.curves[i].class.intersect(&self.curves[j].class);
                if !w.is_zero() {
                    edges.insert((self.curves[i].id.clone(), self.curves[j].id.clone()), w);
                }
            }
        }
        DualGraph {
            nodes: self.curves.iter().map(|c| c.id.clone()).collect(),
            edges,
        }
    }

    /// Combinatorial strata: one per named point, one generic per curve,
    /// and the surface-generic stratum.
    pub fn strata(&self) -> Vec<PointStratum> {
        let mut out = Vec::new();
        for c in &self.curves {
            out.push(PointStratum {
                kind: StratumKind::CurveGeneric(c.id.clone()),
                curves_through: vec![c.id.clone()],
            });
        }
        for p in &self.points {
            out.push(PointStratum {
                kind: StratumKind::AtPoint(p.id.clone()),
                curves_through: p.on_curves.iter().map(|(c, _)| c.clone()).collect(),
            });
        }
        out.push(PointStratum {
            kind: StratumKind::SurfaceGeneric,
            curves_through: Vec::new(),
        });
        out
    }

    /// Curves carrying a point stratum / passing through a point.
    pub fn curves_at_point(&self, pid: &str) -> Vec<&NegativeCurve> {
        match self.point(pid) {
            Some(p) => p
                .on_curves
                .iter()
                .filter_map(|(c, _)| self.curve(c).ok())
                .collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DualGraph {
    pub nodes: Vec<String>,
    pub edges: BTreeMap<(String, String), Rat>,
}

impl DualGraph {
    pub fn degree(&self, id: &str) -> usize {
        self.edges
            .keys()
            .filter(|(a, b)| a == id || b == id)
            .count()
    }

    pub fn weight(&self, a: &str, b: &str) -> Rat {
        self.edges
            .get(&(a.to_string(), b.to_string()))
            .or_else(|| self.edges.get(&(b.to_string(), a.to_string())))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }
}

// ---------------------------------------------------------------------------
// file format (JSON)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ConfigFile {
    name: String,
    singularities: String,
    roots: Vec<CurveEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lines: Option<Vec<CurveEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<PointEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expected: Option<ExpectedEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CurveEntry {
    Bare(Vec<serde_json::Value>),
    Named {
        id: String,
        class: Vec<serde_json::Value>,
    },
}

#[derive(Serialize, Deserialize)]
struct PointEntry {
    id: String,
    curves: Vec<(String, u32)>,
}

#[derive(Serialize, Deserialize)]
struct ExpectedEntry {
    lines: usize,
    delta: String,
}

fn value_to_rat(v: &serde_json::Value) -> Result<Rat, ValidationError> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(rint(i))
            } else {
                Err(ValidationError::Parse(format!("non-integer number {n}")))
            }
        }
        serde_json::Value::String(s) => {
            parse_rat(s).map_err(ValidationError::Parse)
        }
        other => Err(ValidationError::Parse(format!("bad coefficient {other}"))),
    }
}

fn entry_to_curve(e: &CurveEntry, fallback: Option<String>) -> Result<(Option<String>, DivisorClass), ValidationError> {
    let (id, class) = match e {
        CurveEntry::Bare(v) => (fallback, v),
        CurveEntry::Named { id, class } => (Some(id.clone()), class),
    };
    if class.len() != 7 {
        return Err(ValidationError::Parse(format!(
            "class must have 7 coefficients, got {}",
            class.len()
        )));
    }
    let mut coeffs: [Rat; 7] = std::array::from_fn(|_| Rat::zero());
    for (i, v) in class.iter().enumerate() {
        coeffs[i] = value_to_rat(v)?;
    }
    Ok((id, DivisorClass::new(coeffs)))
}

/// Parses the JSON configuration format; see the shipped `data/builtin`
/// files for the shape. Errors carry serde_json's line/column positions.
pub fn parse_config(text: &str) -> Result<SurfaceConfig, ValidationError> {
    let file: ConfigFile =
        serde_json::from_str(text).map_err(|e| ValidationError::Parse(e.to_string()))?;
    let mut roots = Vec::new();
    for (i, e) in file.roots.iter().enumerate() {
        let (id, class) = entry_to_curve(e, Some(format!("R{}", i + 1)))?;
        roots.push((id.unwrap(), class));
    }
    let mut named_lines = Vec::new();
    if let Some(lines) = &file.lines {
        for e in lines {
            let (id, class) = entry_to_curve(e, None)?;
            match id {
                Some(id) => named_lines.push((id, class)),
                None => named_lines.push((auto_line_id(&class), class)),
            }
        }
    }
    let points = file.points.map(|ps| {
        ps.into_iter()
            .map(|p| PointIncidence {
                id: p.id,
                on_curves: p.curves,
            })
            .collect()
    });
    let expected = match file.expected {
        Some(e) => Some(Expected {
            lines: e.lines,
            delta: parse_rat(&e.delta).map_err(ValidationError::Parse)?,
        }),
        None => None,
    };
    build_config(
        &file.name,
        &file.singularities,
        roots,
        named_lines,
        points,
        expected,
    )
}

/// Serializes a configuration in full (all lines and points explicit), so
/// that `parse_config(serialize_config(c))` reproduces `c` field-for-field.
pub fn serialize_config(cfg: &SurfaceConfig) -> String {
    let class_vals = |c: &DivisorClass| {
        c.coeffs()
            .iter()
            .map(|x| {
                if x.denom() == &1.into() {
                    serde_json::Value::Number(x.numer().to_string().parse().unwrap())
                } else {
                    serde_json::Value::String(fmt_rat(x))
                }
            })
            .collect::<Vec<_>>()
    };
    let file = ConfigFile {
        name: cfg.name.clone(),
        singularities: cfg.singularities.clone(),
        roots: cfg
            .roots()
            .map(|c| CurveEntry::Named {
                id: c.id.clone(),
                class: class_vals(&c.class),
            })
            .collect(),
        lines: Some(
            cfg.lines()
                .map(|c| CurveEntry::Named {
                    id: c.id.clone(),
                    class: class_vals(&c.class),
                })
                .collect(),
        ),
        points: Some(
            cfg.points()
                .map(|p| PointEntry {
                    id: p.id.clone(),
                    curves: p.on_curves.clone(),
                })
                .collect(),
        ),
        expected: cfg.expected.as_ref().map(|e| ExpectedEntry {
            lines: e.lines,
            delta: fmt_rat(&e.delta),
        }),
    };
    serde_json::to_string_pretty(&file).expect("config serialization")
}

// ---------------------------------------------------------------------------
// built-in registry
// ---------------------------------------------------------------------------

/// Registry order follows the case list I-XX.
pub const BUILTIN_NAMES: [&str; 20] = [
    "A1", "2A1", "3A1", "4A1", "A2", "A2A1", "A22A1", "2A2", "2A2A1", "3A2", "A3", "A3A1",
    "A32A1", "A4", "A4A1", "A5", "A5A1", "D4", "D5", "E6",
];

static BUILTIN_SOURCES: [(&str, &str); 20] = [
    ("A1", include_str!("../data/builtin/a1.json")),
    ("2A1", include_str!("../data/builtin/2a1.json")),
    ("3A1", include_str!("../data/builtin/3a1.json")),
    ("4A1", include_str!("../data/builtin/4a1.json")),
    ("A2", include_str!("../data/builtin/a2.json")),
    ("A2A1", include_str!("../data/builtin/a2a1.json")),
    ("A22A1", include_str!("../data/builtin/a22a1.json")),
    ("2A2", include_str!("../data/builtin/2a2.json")),
    ("2A2A1", include_str!("../data/builtin/2a2a1.json")),
    ("3A2", include_str!("../data/builtin/3a2.json")),
    ("A3", include_str!("../data/builtin/a3.json")),
    ("A3A1", include_str!("../data/builtin/a3a1.json")),
    ("A32A1", include_str!("../data/builtin/a32a1.json")),
    ("A4", include_str!("../data/builtin/a4.json")),
    ("A4A1", include_str!("../data/builtin/a4a1.json")),
    ("A5", include_str!("../data/builtin/a5.json")),
    ("A5A1", include_str!("../data/builtin/a5a1.json")),
    ("D4", include_str!("../data/builtin/d4.json")),
    ("D5", include_str!("../data/builtin/d5.json")),
    ("E6", include_str!("../data/builtin/e6.json")),
];

static BUILTINS: Lazy<BTreeMap<&'static str, SurfaceConfig>> = Lazy::new(|| {
    BUILTIN_SOURCES
        .iter()
        .map(|(name, src)| {
            let cfg = parse_config(src)
                .unwrap_or_else(|e| panic!("builtin {name} failed validation: {e}"));
            (*name, cfg)
        })
        .collect()
});

/// The validated built-in configuration with the given registry name.
pub fn builtin(name: &str) -> Option<&'static SurfaceConfig> {
    BUILTINS.get(name)
}

/// All 20 built-ins in registry order.
pub fn builtins() -> Vec<&'static SurfaceConfig> {
    BUILTIN_NAMES.iter().map(|n| &BUILTINS[n]).collect()
}

/// Raw JSON source of a built-in (used by negative-control tests).
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTIN_SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
}
