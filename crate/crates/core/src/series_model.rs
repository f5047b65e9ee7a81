//! Curve data at distinguished points and the finite presentation of a pre-limit g^1_d.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::metric_graph::{End, GraphError, Half, MetricGraph, PointRef, TangentDir};
use crate::scalar::{PValue, Scalar};

/// A point on a curve: either the marked point of a tangent direction or an opaque label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CPoint<K = Half> {
    Marked(K),
    Unmarked(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPoint {
    pub value: PValue,
    pub ram: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pole<K = Half> {
    pub point: CPoint<K>,
    pub order: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivEntry<K = Half> {
    pub point: CPoint<K>,
    pub mult: u32,
}

/// The value/ramification profile of `f_p` on the curve `C_p`, plus the divisor `D_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveData<K = Half> {
    pub genus: u32,
    pub marked: BTreeMap<K, MarkedPoint>,
    pub degree: u32,
    pub poles: Vec<Pole<K>>,
    pub divisor: Vec<DivEntry<K>>,
    /// Declared fibers over finite values: all ramification indices, marked ones included.
    pub fibers: BTreeMap<Scalar, Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurveViolation {
    ZeroDegree,
    ZeroRamification(String),
    ZeroOrder(String),
    ZeroMultiplicity(String),
    /// marked point with value infinity not listed as a pole (or with another order)
    InfinityNotPole(String),
    /// marked pole whose marked value is finite
    PoleNotInfinity(String),
    UnknownMarkedPoint(String),
    DuplicatePole(String),
    PoleOrderSum { sum: u32, degree: u32 },
    FiberOverflow { value: String, sum: u32, degree: u32 },
    FiberProfileSum { value: String, sum: u32, degree: u32 },
    FiberProfileMissesMarked { value: String },
}

impl fmt::Display for CurveViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CurveViolation::*;
        match self {
            ZeroDegree => write!(f, "f-degree must be at least 1"),
            ZeroRamification(k) => write!(f, "marked point {k} has ramification 0"),
            ZeroOrder(k) => write!(f, "pole {k} has order 0"),
            ZeroMultiplicity(k) => write!(f, "divisor entry {k} has multiplicity 0"),
            InfinityNotPole(k) => write!(f, "marked point {k} has value inf but no pole of that order"),
            PoleNotInfinity(k) => write!(f, "marked pole {k} has a finite value"),
            UnknownMarkedPoint(k) => write!(f, "{k} is not a marked point of this curve"),
            DuplicatePole(k) => write!(f, "pole {k} listed twice"),
            PoleOrderSum { sum, degree } => write!(f, "pole orders sum to {sum}, f-degree is {degree}"),
            FiberOverflow { value, sum, degree } => {
                write!(f, "marked ramification over {value} sums to {sum} > f-degree {degree}")
            }
            FiberProfileSum { value, sum, degree } => {
                write!(f, "fiber profile over {value} sums to {sum}, f-degree is {degree}")
            }
            FiberProfileMissesMarked { value } => {
                write!(f, "fiber profile over {value} does not contain the marked ramifications")
            }
        }
    }
}

/// True when `big` contains `small` as a sub-multiset.
fn contains_multiset(big: &[u32], small: &[u32]) -> bool {
    let mut counts: BTreeMap<u32, i64> = BTreeMap::new();
    for &x in big {
        *counts.entry(x).or_default() += 1;
    }
    for &x in small {
        let c = counts.entry(x).or_default();
        *c -= 1;
        if *c < 0 {
            return false;
        }
    }
    true
}

impl<K: Ord + Clone> CurveData<K> {
    /// Relabels marked points; used when moving curve data onto a subdivided graph.
    pub fn map_keys<L: Ord + Clone>(&self, f: impl Fn(&K) -> L) -> CurveData<L> {
        let mp = |p: &CPoint<K>| match p {
            CPoint::Marked(k) => CPoint::Marked(f(k)),
            CPoint::Unmarked(s) => CPoint::Unmarked(s.clone()),
        };
        CurveData {
            genus: self.genus,
            marked: self.marked.iter().map(|(k, v)| (f(k), v.clone())).collect(),
            degree: self.degree,
            poles: self.poles.iter().map(|p| Pole { point: mp(&p.point), order: p.order }).collect(),
            divisor: self.divisor.iter().map(|d| DivEntry { point: mp(&d.point), mult: d.mult }).collect(),
            fibers: self.fibers.clone(),
        }
    }

    /// Marked ramification indices over each finite value.
    pub fn marked_fibers(&self) -> BTreeMap<Scalar, Vec<u32>> {
        let mut out: BTreeMap<Scalar, Vec<u32>> = BTreeMap::new();
        for mp in self.marked.values() {
            if let PValue::Finite(c) = &mp.value {
                out.entry(c.clone()).or_default().push(mp.ram);
            }
        }
        out
    }

    /// Full fiber profile over a finite value: declared, or the marked rams padded with simple points.
    pub fn fiber_profile(&self, c: &Scalar) -> Vec<u32> {
        if let Some(p) = self.fibers.get(c) {
            let mut p = p.clone();
            p.sort_unstable();
            return p;
        }
        let mut rams: Vec<u32> = self
            .marked
            .values()
            .filter(|m| m.value == PValue::Finite(c.clone()))
            .map(|m| m.ram)
            .collect();
        let used: u32 = rams.iter().sum();
        rams.extend(std::iter::repeat_n(1, self.degree.saturating_sub(used) as usize));
        rams.sort_unstable();
        rams
    }

    /// Ramification indices of the unmarked points over a finite value.
    pub fn unmarked_over(&self, c: &Scalar) -> Vec<u32> {
        let mut prof = self.fiber_profile(c);
        for m in self.marked.values() {
            if m.value == PValue::Finite(c.clone()) {
                let i = prof.iter().position(|&r| r == m.ram).expect("profile contains marked rams");
                prof.remove(i);
            }
        }
        prof
    }

    pub fn unmarked_poles(&self) -> Vec<(String, u32)> {
        self.poles
            .iter()
            .filter_map(|p| match &p.point {
                CPoint::Unmarked(l) => Some((l.clone(), p.order)),
                CPoint::Marked(_) => None,
            })
            .collect()
    }

    pub fn divisor_degree(&self) -> u32 {
        self.divisor.iter().map(|d| d.mult).sum()
    }

    /// Checks the internal invariants. `show` renders marked keys for messages.
    pub fn violations(&self, show: impl Fn(&K) -> String) -> Vec<CurveViolation> {
        use CurveViolation::*;
        let mut out = Vec::new();
        let label = |p: &CPoint<K>| match p {
            CPoint::Marked(k) => show(k),
            CPoint::Unmarked(s) => s.clone(),
        };
        if self.degree == 0 {
            out.push(ZeroDegree);
        }
        for (k, m) in &self.marked {
            if m.ram == 0 {
                out.push(ZeroRamification(show(k)));
            }
        }
        let mut seen = BTreeSet::new();
        let mut marked_poles: BTreeMap<&K, u32> = BTreeMap::new();
        for p in &self.poles {
            if p.order == 0 {
                out.push(ZeroOrder(label(&p.point)));
            }
            if !seen.insert(&p.point) {
                out.push(DuplicatePole(label(&p.point)));
            }
            if let CPoint::Marked(k) = &p.point {
                match self.marked.get(k) {
                    None => out.push(UnknownMarkedPoint(show(k))),
                    Some(m) if !m.value.is_infinite() => out.push(PoleNotInfinity(show(k))),
                    _ => {}
                }
                marked_poles.insert(k, p.order);
            }
        }
        for (k, m) in &self.marked {
            if m.value.is_infinite() && marked_poles.get(k) != Some(&m.ram) {
                out.push(InfinityNotPole(show(k)));
            }
        }
        for d in &self.divisor {
            if d.mult == 0 {
                out.push(ZeroMultiplicity(label(&d.point)));
            }
            if let CPoint::Marked(k) = &d.point {
                if !self.marked.contains_key(k) {
                    out.push(UnknownMarkedPoint(show(k)));
                }
            }
        }
        let sum: u32 = self.poles.iter().map(|p| p.order).sum();
        if sum != self.degree {
            out.push(PoleOrderSum { sum, degree: self.degree });
        }
        let mf = self.marked_fibers();
        for (c, rams) in &mf {
            let s: u32 = rams.iter().sum();
            if s > self.degree {
                out.push(FiberOverflow { value: c.to_string(), sum: s, degree: self.degree });
            }
        }
        for (c, prof) in &self.fibers {
            let s: u32 = prof.iter().sum();
            if s != self.degree {
                out.push(FiberProfileSum { value: c.to_string(), sum: s, degree: self.degree });
            }
            if prof.contains(&0) {
                out.push(ZeroRamification(format!("fiber {c}")));
            }
            let marked = mf.get(c).cloned().unwrap_or_default();
            if !contains_multiset(prof, &marked) {
                out.push(FiberProfileMissesMarked { value: c.to_string() });
            }
        }
        out
    }
}

/// Curve data from `(tangent, value, ram)` triples; extra poles are simple and unmarked.
pub fn auto_curve<K: Ord + Clone>(marked: Vec<(K, PValue, u32)>, degree: u32, genus: u32) -> CurveData<K> {
    let mut m = BTreeMap::new();
    let mut poles = Vec::new();
    let mut used = 0;
    for (k, value, ram) in marked {
        if value.is_infinite() {
            poles.push(Pole { point: CPoint::Marked(k.clone()), order: ram });
            used += ram;
        }
        m.insert(k, MarkedPoint { value, ram });
    }
    let mut divisor = Vec::new();
    for i in 0..degree.saturating_sub(used) {
        let l = format!("x{}", i + 1);
        poles.push(Pole { point: CPoint::Unmarked(l.clone()), order: 1 });
        divisor.push(DivEntry { point: CPoint::Unmarked(l), mult: 1 });
    }
    CurveData { genus, marked: m, degree, poles, divisor, fibers: BTreeMap::new() }
}

/// Signed multiplicities and the local partition at one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDiagram<K = Half> {
    pub mult: BTreeMap<K, i64>,
    /// Classes of locally equivalent tangents keyed by their common value.
    pub classes: BTreeMap<PValue, Vec<K>>,
}

impl<K: Ord + Clone> LocalDiagram<K> {
    pub fn equivalent(&self, a: &K, b: &K) -> bool {
        self.classes.values().any(|c| c.contains(a) && c.contains(b))
    }

    pub fn incoming(&self) -> Vec<K> {
        self.classes.get(&PValue::Infinity).cloned().unwrap_or_default()
    }
}

/// `m(p,t) = -ram` on poles and `+ram` otherwise; tangents are equivalent iff their values agree.
pub fn local_diagram<K: Ord + Clone>(cd: &CurveData<K>) -> LocalDiagram<K> {
    let mut mult = BTreeMap::new();
    let mut classes: BTreeMap<PValue, Vec<K>> = BTreeMap::new();
    for (k, m) in &cd.marked {
        let r = m.ram as i64;
        mult.insert(k.clone(), if m.value.is_infinite() { -r } else { r });
        classes.entry(m.value.clone()).or_default().push(k.clone());
    }
    LocalDiagram { mult, classes }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub at: String,
    pub what: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.at, self.what)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid series presentation:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
    #[error("restriction: {0}")]
    Restrict(String),
    #[error("saturation: {0}")]
    Saturate(String),
}

/// Curve data at every vertex of a metric graph; points off the vertex set are implicit
/// projective lines carrying a generic degree-`|m|` function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesPresentation {
    pub graph: MetricGraph,
    pub curves: Vec<CurveData>,
    pub declared_genus: Option<u32>,
}

/// Human-readable name of a vertex tangent: `edge@vertex`, or with `#tail`/`#head` on loops.
pub fn half_key(g: &MetricGraph, h: Half) -> String {
    if h.edge >= g.edge_count() {
        return format!("<edge #{}>", h.edge);
    }
    let e = g.edge(h.edge);
    let base = format!("{}@{}", e.name, g.vertex_name(g.base_of(h)));
    if e.is_loop() {
        match h.end {
            End::Tail => format!("{base}#tail"),
            End::Head => format!("{base}#head"),
        }
    } else {
        base
    }
}

impl SeriesPresentation {
    pub fn new(
        graph: MetricGraph,
        curves: Vec<CurveData>,
        declared_genus: Option<u32>,
    ) -> Result<Self, ModelError> {
        let sp = SeriesPresentation { graph, curves, declared_genus };
        let v = sp.violations();
        if v.is_empty() {
            Ok(sp)
        } else {
            Err(ModelError::Invalid(v))
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let g = &self.graph;
        let mut out = Vec::new();
        if self.curves.len() != g.vertex_count() {
            out.push(Violation {
                at: "graph".into(),
                what: format!("{} vertices but {} curve records", g.vertex_count(), self.curves.len()),
            });
            return out;
        }
        for (v, cd) in self.curves.iter().enumerate() {
            let at = g.vertex_name(v).to_string();
            let tans: BTreeSet<Half> = g.halves_at(v).iter().copied().collect();
            let keys: BTreeSet<Half> = cd.marked.keys().copied().collect();
            for h in tans.difference(&keys) {
                out.push(Violation { at: at.clone(), what: format!("tangent {} has no marked point", half_key(g, *h)) });
            }
            for h in keys.difference(&tans) {
                let what = if h.edge < g.edge_count() {
                    format!("marked point {} is not a tangent here", half_key(g, *h))
                } else {
                    format!("marked point on unknown edge {}", h.edge)
                };
                out.push(Violation { at: at.clone(), what });
            }
            if !keys.is_subset(&tans) {
                continue;
            }
            for cv in cd.violations(|h| half_key(g, *h)) {
                out.push(Violation { at: at.clone(), what: cv.to_string() });
            }
        }
        if let Some(dg) = self.declared_genus {
            let total = g.genus() as u64 + self.curves.iter().map(|c| c.genus as u64).sum::<u64>();
            if total != dg as u64 {
                out.push(Violation {
                    at: "graph".into(),
                    what: format!("declared genus {dg} but graph plus curves give {total}"),
                });
            }
        }
        out
    }

    /// Tropical divisor `D_Γ(v) = deg D_v`.
    pub fn tropical_divisor(&self) -> Vec<u32> {
        self.curves.iter().map(|c| c.divisor_degree()).collect()
    }

    pub fn degree(&self) -> u32 {
        self.tropical_divisor().iter().sum()
    }

    pub fn total_genus(&self) -> u32 {
        self.graph.genus() as u32 + self.curves.iter().map(|c| c.genus).sum::<u32>()
    }

    pub fn local_diagrams(&self) -> Vec<LocalDiagram> {
        self.curves.iter().map(local_diagram).collect()
    }
}

/// Compatibility of `H_p` with `D_p` at one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointReport {
    pub vertex: usize,
    pub compatible: bool,
    /// Unmarked poles not covered by `D_p`, with the missing order.
    pub deficient: Vec<(String, u32)>,
    pub base_points: Vec<(CPoint, u32)>,
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagrammaticReport {
    pub points: Vec<PointReport>,
}

impl DiagrammaticReport {
    pub fn compatible(&self) -> bool {
        self.points.iter().all(|p| p.compatible)
    }

    pub fn refined(&self) -> bool {
        self.points.iter().all(|p| p.refined)
    }

    pub fn base_point_free(&self) -> bool {
        self.points.iter().all(|p| p.base_points.is_empty())
    }
}

fn point_report(v: usize, cd: &CurveData) -> PointReport {
    let mut d: BTreeMap<CPoint, i64> = BTreeMap::new();
    for e in &cd.divisor {
        *d.entry(e.point.clone()).or_default() += e.mult as i64;
    }
    let mut deficient = Vec::new();
    for (label, order) in cd.unmarked_poles() {
        let have = d.entry(CPoint::Unmarked(label.clone())).or_default();
        *have -= order as i64;
        if *have < 0 {
            deficient.push((label, (-*have) as u32));
            *have = 0;
        }
    }
    let base_points: Vec<(CPoint, u32)> =
        d.into_iter().filter(|(_, m)| *m > 0).map(|(p, m)| (p, m as u32)).collect();
    let refined = !cd.divisor.iter().any(|e| matches!(e.point, CPoint::Marked(_)));
    PointReport { vertex: v, compatible: deficient.is_empty(), deficient, base_points, refined }
}

/// Pointwise compatibility `D_p >= (unmarked poles of f_p)`, base points and refinedness.
pub fn check_diagrammatic(sp: &SeriesPresentation) -> DiagrammaticReport {
    DiagrammaticReport {
        points: sp.curves.iter().enumerate().map(|(v, cd)| point_report(v, cd)).collect(),
    }
}

/// Replaces every `D_p` by the unmarked-pole divisor of `f_p`.
pub fn strip_base_points(sp: &SeriesPresentation) -> SeriesPresentation {
    let mut out = sp.clone();
    for cd in &mut out.curves {
        cd.divisor = cd
            .unmarked_poles()
            .into_iter()
            .map(|(l, o)| DivEntry { point: CPoint::Unmarked(l), mult: o })
            .collect();
    }
    out
}

/// Label given to a marked point that loses its tangent under restriction.
pub fn cut_label(g: &MetricGraph, h: Half) -> String {
    format!("cut:{}", half_key(g, h))
}

/// Restriction to the closed connected subgraph spanned by `edges`.
///
/// At a boundary point the marked points of removed tangents become unmarked; each removed
/// pole of order `r` joins `D_p` with multiplicity `r`, and finite fibers keep their profile.
pub fn restrict(sp: &SeriesPresentation, edges: &BTreeSet<usize>) -> Result<SeriesPresentation, ModelError> {
    let g = &sp.graph;
    if edges.is_empty() {
        return Err(ModelError::Restrict("empty edge set".into()));
    }
    if let Some(&e) = edges.iter().find(|&&e| e >= g.edge_count()) {
        return Err(ModelError::Restrict(format!("unknown edge index {e}")));
    }
    let keep_v: BTreeSet<usize> = edges
        .iter()
        .flat_map(|&e| [g.edge(e).tail, g.edge(e).head])
        .collect();
    let emap: BTreeMap<usize, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let sub = MetricGraph::new(
        keep_v.iter().map(|&v| g.vertex_name(v).to_string()),
        edges.iter().map(|&e| {
            let ed = g.edge(e);
            (ed.name.clone(), g.vertex_name(ed.tail).to_string(), g.vertex_name(ed.head).to_string(), ed.length.clone())
        }),
    )
    .map_err(|e| ModelError::Restrict(e.to_string()))?;
    let mut curves = Vec::new();
    for &v in &keep_v {
        let cd = &sp.curves[v];
        let removed: Vec<Half> = g.halves_at(v).iter().copied().filter(|h| !edges.contains(&h.edge)).collect();
        let relabel = |p: &CPoint| -> CPoint {
            match p {
                CPoint::Marked(h) if removed.contains(h) => CPoint::Unmarked(cut_label(g, *h)),
                CPoint::Marked(h) => CPoint::Marked(Half::new(emap[&h.edge], h.end)),
                CPoint::Unmarked(s) => CPoint::Unmarked(s.clone()),
            }
        };
        let mut fibers = cd.fibers.clone();
        for h in &removed {
            if let PValue::Finite(c) = &cd.marked[h].value {
                fibers.entry(c.clone()).or_insert_with(|| cd.fiber_profile(c));
            }
        }
        let mut divisor: Vec<DivEntry> =
            cd.divisor.iter().map(|d| DivEntry { point: relabel(&d.point), mult: d.mult }).collect();
        for h in &removed {
            let m = &cd.marked[h];
            if m.value.is_infinite() {
                divisor.push(DivEntry { point: CPoint::Unmarked(cut_label(g, *h)), mult: m.ram });
            }
        }
        curves.push(CurveData {
            genus: cd.genus,
            marked: cd
                .marked
                .iter()
                .filter(|(h, _)| !removed.contains(h))
                .map(|(h, m)| (Half::new(emap[&h.edge], h.end), m.clone()))
                .collect(),
            degree: cd.degree,
            poles: cd.poles.iter().map(|p| Pole { point: relabel(&p.point), order: p.order }).collect(),
            divisor,
            fibers,
        });
    }
    let genus = sub.genus() as u32 + curves.iter().map(|c| c.genus).sum::<u32>();
    SeriesPresentation::new(sub, curves, Some(genus))
}

/// Curve data at a point lacking it in a metrized complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FillCurve {
    Explicit(CurveData<TangentDir>),
    /// A projective line with a generic function realizing these signed multiplicities.
    Generic(BTreeMap<TangentDir, i64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillIn {
    pub point: PointRef,
    pub curve: FillCurve,
}

/// Metrized-complex data: curves at a vertex subset plus a tropical divisor elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McData {
    pub graph: MetricGraph,
    pub curves: BTreeMap<usize, CurveData>,
    pub tropical: Vec<(PointRef, u32)>,
    pub declared_genus: Option<u32>,
}

/// Curve data of a projective line carrying a generic function with the given multiplicities:
/// outgoing tangents lie in distinct fibers and extra poles are simple and unmarked.
pub fn generic_curve<K: Ord + Clone>(mults: &BTreeMap<K, i64>) -> CurveData<K> {
    let pole_sum: i64 = mults.values().filter(|m| **m < 0).map(|m| -m).sum();
    let max_out = mults.values().copied().filter(|m| *m > 0).max().unwrap_or(0);
    let degree = pole_sum.max(max_out).max(1) as u32;
    let mut marked = BTreeMap::new();
    let mut poles = Vec::new();
    let mut next = 0i64;
    for (k, &m) in mults {
        if m < 0 {
            marked.insert(k.clone(), MarkedPoint { value: PValue::Infinity, ram: (-m) as u32 });
            poles.push(Pole { point: CPoint::Marked(k.clone()), order: (-m) as u32 });
        } else {
            marked.insert(k.clone(), MarkedPoint { value: PValue::Finite(Scalar::from_int(next)), ram: m as u32 });
            next += 1;
        }
    }
    let mut divisor = Vec::new();
    for i in 0..(degree as i64 - pole_sum) {
        let l = format!("gen{i}");
        poles.push(Pole { point: CPoint::Unmarked(l.clone()), order: 1 });
        divisor.push(DivEntry { point: CPoint::Unmarked(l), mult: 1 });
    }
    CurveData { genus: 0, marked, degree, poles, divisor, fibers: BTreeMap::new() }
}

/// Embeds metrized-complex data plus fill-ins into a series presentation on a subdivided graph.
pub fn saturate(mc: &McData, fills: &[FillIn]) -> Result<SeriesPresentation, ModelError> {
    let g = &mc.graph;
    let mut pts: Vec<PointRef> = fills.iter().map(|f| f.point.clone()).collect();
    pts.extend(mc.tropical.iter().map(|(p, _)| p.clone()));
    for p in &pts {
        g.check_point(p)?;
    }
    let mut seen = BTreeSet::new();
    for f in fills {
        if !seen.insert(f.point.clone()) {
            return Err(ModelError::Saturate(format!("two fill-ins at {}", show_point(g, &f.point))));
        }
        if let PointRef::Vertex(v) = f.point {
            if mc.curves.contains_key(&v) {
                return Err(ModelError::Saturate(format!("fill-in at {} which already has a curve", g.vertex_name(v))));
            }
        }
    }
    let (ng, tr) = g.subdivide(&pts)?;
    let to_half = |t: &TangentDir| -> Result<Half, ModelError> {
        let nt = tr.tangent(&ng, t);
        let PointRef::Vertex(v) = nt.base else {
            return Err(ModelError::Saturate("tangent base is not a vertex".into()));
        };
        debug_assert_eq!(ng.edge(nt.edge).end(nt.toward.other()), v);
        Ok(Half::new(nt.edge, nt.toward.other()))
    };
    let mut curves: Vec<Option<CurveData>> = vec![None; ng.vertex_count()];
    for (&v, cd) in &mc.curves {
        let nv = match tr.point(&PointRef::Vertex(v)) {
            PointRef::Vertex(x) => x,
            _ => unreachable!(),
        };
        let mut table = BTreeMap::new();
        for h in cd.marked.keys() {
            let t = TangentDir { base: PointRef::Vertex(v), edge: h.edge, toward: h.end.other() };
            table.insert(*h, to_half(&t)?);
        }
        let moved = cd.map_keys(|h| table[h]);
        curves[nv] = Some(moved);
    }
    for f in fills {
        let PointRef::Vertex(nv) = tr.point(&f.point) else { unreachable!() };
        let cd = match &f.curve {
            FillCurve::Explicit(c) => c.clone(),
            FillCurve::Generic(m) => generic_curve(m),
        };
        for k in cd.marked.keys() {
            if k.base != f.point {
                return Err(ModelError::Saturate(format!(
                    "fill-in at {} has a tangent based elsewhere",
                    show_point(g, &f.point)
                )));
            }
        }
        let refs = cd.poles.iter().map(|p| &p.point).chain(cd.divisor.iter().map(|d| &d.point));
        for r in refs {
            if let CPoint::Marked(t) = r {
                if !cd.marked.contains_key(t) {
                    return Err(ModelError::Saturate(format!(
                        "fill-in at {} refers to a tangent without a marked point",
                        show_point(g, &f.point)
                    )));
                }
            }
        }
        let mut table = BTreeMap::new();
        for t in cd.marked.keys() {
            table.insert(t.clone(), to_half(t)?);
        }
        let moved = cd.map_keys(|t| table[t]);
        curves[nv] = Some(moved);
    }
    for (p, mult) in &mc.tropical {
        let PointRef::Vertex(nv) = tr.point(p) else { unreachable!() };
        let have = curves[nv].as_ref().map(|c| c.divisor_degree());
        if have != Some(*mult) {
            return Err(ModelError::Saturate(format!(
                "tropical divisor has multiplicity {mult} at {} but the fill-in divisor has degree {}",
                show_point(g, p),
                have.map_or("none".into(), |d| d.to_string())
            )));
        }
    }
    let mut out = Vec::new();
    for (v, c) in curves.into_iter().enumerate() {
        match c {
            Some(c) => out.push(c),
            None => {
                return Err(ModelError::Saturate(format!("no curve data at {}", ng.vertex_name(v))));
            }
        }
    }
    let declared = mc.declared_genus;
    let sp = SeriesPresentation::new(ng, out, declared)?;
    // every edge must see opposite multiplicities from its two ends
    let ld = sp.local_diagrams();
    for (i, e) in sp.graph.edges().iter().enumerate() {
        let a = ld[e.tail].mult[&Half::new(i, End::Tail)];
        let b = ld[e.head].mult[&Half::new(i, End::Head)];
        if a != -b {
            return Err(ModelError::Saturate(format!(
                "edge {} gets multiplicity {a} from {} and {b} from {}",
                e.name,
                sp.graph.vertex_name(e.tail),
                sp.graph.vertex_name(e.head)
            )));
        }
    }
    Ok(sp)
}

pub fn show_point(g: &MetricGraph, p: &PointRef) -> String {
    match p {
        PointRef::Vertex(v) => g.vertex_name(*v).to_string(),
        PointRef::Interior { edge, offset } => format!("{}:{}", g.edge(*edge).name, offset),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn fin(n: i64, ram: u32) -> MarkedPoint {
        MarkedPoint { value: PValue::Finite(s(n)), ram }
    }

    fn inf(ram: u32) -> MarkedPoint {
        MarkedPoint { value: PValue::Infinity, ram }
    }

    fn unm(l: &str, order: u32) -> Pole<&'static str> {
        Pole { point: CPoint::Unmarked(l.into()), order }
    }

    /// The genus-1 local example: poles u1,u2 marked and one unmarked, fibers c and c'.
    fn local_example() -> CurveData<&'static str> {
        let marked = BTreeMap::from([
            ("u1", inf(1)),
            ("u2", inf(1)),
            ("v1", fin(0, 1)),
            ("w1", fin(1, 1)),
            ("w2", fin(1, 2)),
        ]);
        CurveData {
            genus: 1,
            marked,
            degree: 3,
            poles: vec![
                Pole { point: CPoint::Marked("u1"), order: 1 },
                Pole { point: CPoint::Marked("u2"), order: 1 },
                unm("u3", 1),
            ],
            divisor: vec![DivEntry { point: CPoint::Unmarked("u3".into()), mult: 1 }],
            fibers: BTreeMap::from([(s(0), vec![1, 1, 1])]),
        }
    }

    #[test]
    fn local_example_is_valid() {
        assert!(local_example().violations(|k| k.to_string()).is_empty());
    }

    #[test]
    fn infinity_without_pole_is_flagged() {
        let mut cd = local_example();
        cd.poles.remove(0);
        cd.poles.push(unm("extra", 1));
        let v = cd.violations(|k| k.to_string());
        assert!(v.contains(&CurveViolation::InfinityNotPole("u1".into())), "{v:?}");
    }

    #[test]
    fn short_fiber_profile_is_flagged() {
        let mut cd = local_example();
        cd.fibers.insert(s(0), vec![1, 1]);
        let v = cd.violations(|k| k.to_string());
        assert!(matches!(v[..], [CurveViolation::FiberProfileSum { sum: 2, degree: 3, .. }]), "{v:?}");
    }

    #[test]
    fn local_diagram_of_example() {
        let ld = local_diagram(&local_example());
        assert_eq!(ld.mult["u1"], -1);
        assert_eq!(ld.mult["u2"], -1);
        assert_eq!(ld.mult["w2"], 2);
        let mut outs: Vec<i64> = ld.mult.values().copied().filter(|m| *m > 0).collect();
        outs.sort();
        assert_eq!(outs, vec![1, 1, 2]);
        let parts: Vec<Vec<&str>> = ld.classes.values().cloned().collect();
        assert_eq!(parts, vec![vec!["v1"], vec!["w1", "w2"], vec!["u1", "u2"]]);
        assert_eq!(ld.incoming(), vec!["u1", "u2"]);
    }

    #[test]
    fn local_diagram_ordinary_and_closing() {
        let ord = generic_curve(&BTreeMap::from([("a", -1), ("b", 1)]));
        let ld = local_diagram(&ord);
        assert_eq!(ld.mult["a"], -1);
        assert_eq!(ld.mult["b"], 1);
        assert!(!ld.equivalent(&"a", &"b"));
        let closing = CurveData {
            genus: 0,
            marked: BTreeMap::from([("a", fin(0, 1)), ("b", fin(0, 1))]),
            degree: 2,
            poles: vec![unm("x", 1), unm("y", 1)],
            divisor: vec![],
            fibers: BTreeMap::new(),
        };
        let ld = local_diagram(&closing);
        assert_eq!(ld.classes.len(), 1);
        assert!(ld.equivalent(&"a", &"b"));
    }

    #[test]
    fn sum_of_incoming_bounded_by_degree() {
        let cd = local_example();
        let ld = local_diagram(&cd);
        let inc: i64 = ld.mult.values().filter(|m| **m < 0).map(|m| -m).sum();
        assert!(inc <= cd.degree as i64);
        assert_eq!(inc == cd.degree as i64, cd.unmarked_poles().is_empty());
    }

    #[test]
    fn compatibility_cases() {
        let mk = |div: Vec<(&str, u32)>| CurveData::<Half> {
            genus: 0,
            marked: BTreeMap::new(),
            degree: 2,
            poles: vec![Pole { point: CPoint::Unmarked("x1".into()), order: 1 }, Pole { point: CPoint::Unmarked("x2".into()), order: 1 }],
            divisor: div.into_iter().map(|(l, m)| DivEntry { point: CPoint::Unmarked(l.into()), mult: m }).collect(),
            fibers: BTreeMap::new(),
        };
        let r = point_report(0, &mk(vec![("x1", 1), ("x2", 1)]));
        assert!(r.compatible && r.base_points.is_empty() && r.refined);
        let r = point_report(0, &mk(vec![("x1", 1)]));
        assert!(!r.compatible);
        assert_eq!(r.deficient, vec![("x2".to_string(), 1)]);
        let r = point_report(0, &mk(vec![("x1", 1), ("x2", 1), ("b", 1)]));
        assert!(r.compatible);
        assert_eq!(r.base_points, vec![(CPoint::Unmarked("b".into()), 1)]);
    }

    #[test]
    fn fiber_defaults_are_simple() {
        let cd = local_example();
        assert_eq!(cd.fiber_profile(&s(1)), vec![1, 2]);
        assert_eq!(cd.unmarked_over(&s(1)), Vec::<u32>::new());
        assert_eq!(cd.unmarked_over(&s(0)), vec![1, 1]);
        assert_eq!(cd.fiber_profile(&s(7)), vec![1, 1, 1]);
    }
}
