//! Closed-form criteria for special graph shapes, and the saturation search.

use std::collections::{BTreeMap, BTreeSet};

use super::{analyze, smoothable, Verdict};
use crate::metric_graph::{End, Half, MetricGraph};
use crate::scalar::{PValue, Scalar};
use crate::series_model::{
    auto_curve, restrict, saturate, CPoint, CurveData, DivEntry, FillIn, MarkedPoint, McData, ModelError, Pole,
    SeriesPresentation,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CriterionError {
    #[error("the graph is not a tree")]
    NotTree,
    #[error("the graph is not a union of separate loops and bridges: {0}")]
    NotSeparateLoops(String),
    #[error("{0} is not a cut vertex")]
    NotCutVertex(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// On a tree, smoothable iff diagrammatic.
pub fn criterion_compact(sp: &SeriesPresentation) -> Result<bool, CriterionError> {
    if !sp.graph.is_tree() {
        return Err(CriterionError::NotTree);
    }
    // every cycle integral vanishes on a tree, so only the diagram can fail
    Ok(analyze(sp).is_ok())
}

/// Splits at a cut vertex: the edges of the first component of `Γ - {v}` against the rest.
/// Both halves are restrictions, so removed poles at `v` move into its divisor.
pub fn glue_decompose(
    sp: &SeriesPresentation,
    v: usize,
) -> Result<(SeriesPresentation, SeriesPresentation), CriterionError> {
    let g = &sp.graph;
    let mut group: Vec<Option<usize>> = vec![None; g.edge_count()];
    let mut n_groups = 0;
    for e in 0..g.edge_count() {
        if group[e].is_some() {
            continue;
        }
        let id = n_groups;
        n_groups += 1;
        group[e] = Some(id);
        if g.edge(e).is_loop() && g.edge(e).tail == v {
            continue;
        }
        let mut stack = vec![e];
        while let Some(f) = stack.pop() {
            let ed = g.edge(f);
            for w in [ed.tail, ed.head] {
                if w == v {
                    continue;
                }
                for h in g.halves_at(w) {
                    if group[h.edge].is_none() {
                        group[h.edge] = Some(id);
                        stack.push(h.edge);
                    }
                }
            }
        }
    }
    if n_groups < 2 {
        return Err(CriterionError::NotCutVertex(g.vertex_name(v).to_string()));
    }
    let first: BTreeSet<usize> = (0..g.edge_count()).filter(|&e| group[e] == Some(0)).collect();
    let rest: BTreeSet<usize> = (0..g.edge_count()).filter(|&e| group[e] != Some(0)).collect();
    Ok((restrict(sp, &first)?, restrict(sp, &rest)?))
}

/// The cycle blocks of a graph whose blocks are all bridges or simple cycles.
pub fn separate_loops(g: &MetricGraph) -> Result<Vec<Vec<usize>>, CriterionError> {
    let mut loops = Vec::new();
    for b in g.blocks() {
        if b.len() == 1 && !g.edge(b[0]).is_loop() {
            continue;
        }
        let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
        for &e in &b {
            *deg.entry(g.edge(e).tail).or_default() += 1;
            *deg.entry(g.edge(e).head).or_default() += 1;
        }
        if deg.len() != b.len() || deg.values().any(|&d| d != 2) {
            let names: Vec<&str> = b.iter().map(|&e| g.edge(e).name.as_str()).collect();
            return Err(CriterionError::NotSeparateLoops(format!("block {{{}}} is not a cycle", names.join(","))));
        }
        loops.push(b);
    }
    Ok(loops)
}

/// Per-loop classification of the minima of ρ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopReport {
    pub edges: Vec<usize>,
    pub minima: Vec<usize>,
    pub closing: Vec<usize>,
}

impl LoopReport {
    /// The loop passes unless exactly one minimum is opening.
    pub fn passes(&self) -> bool {
        self.minima.len() - self.closing.len() != 1
    }
}

/// Minima of ρ on each loop and which of them are closing.
pub fn loop_reports(sp: &SeriesPresentation) -> Result<Option<Vec<LoopReport>>, CriterionError> {
    let g = &sp.graph;
    let loops = separate_loops(g)?;
    let an = match analyze(sp) {
        Ok(an) => an,
        Err(_) => return Ok(None),
    };
    let mut out = Vec::new();
    for edges in loops {
        let vs: BTreeSet<usize> = edges.iter().flat_map(|&e| [g.edge(e).tail, g.edge(e).head]).collect();
        let low = vs.iter().map(|&v| an.rho.at(v)).min().expect("loop has vertices");
        let minima: Vec<usize> = vs.iter().copied().filter(|&v| an.rho.at(v) == low).collect();
        let closing = minima
            .iter()
            .copied()
            .filter(|&p| {
                let hs: Vec<Half> = g.halves_at(p).iter().copied().filter(|h| edges.contains(&h.edge)).collect();
                an.gd.local[p].equivalent(&hs[0], &hs[1])
            })
            .collect();
        out.push(LoopReport { edges, minima, closing });
    }
    Ok(Some(out))
}

/// Separate-loops criterion. A single minimum must be closing; with several minima the loop
/// fails exactly when one of them is opening.
pub fn criterion_loops(sp: &SeriesPresentation) -> Result<bool, CriterionError> {
    Ok(loop_reports(sp)?.is_some_and(|rs| rs.iter().all(LoopReport::passes)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationReport {
    pub results: Vec<Result<Verdict, ModelError>>,
    pub aggregate: bool,
}

pub fn saturation_check(mc: &McData, candidates: &[Vec<FillIn>]) -> SaturationReport {
    let results: Vec<Result<Verdict, ModelError>> =
        candidates.iter().map(|fills| saturate(mc, fills).map(|sp| smoothable(&sp))).collect();
    let aggregate = results.iter().any(|r| matches!(r, Ok(v) if v.is_smoothable()));
    SaturationReport { results, aggregate }
}

/// A pedal: two edges of equal length from the eye to a pedal vertex, and the values of `f`
/// at the two marked points they define on the eye.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pedal {
    pub length: Scalar,
    pub first: MarkedPoint,
    pub second: MarkedPoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eye {
    pub genus: u32,
    pub degree: u32,
    pub pedals: Vec<Pedal>,
    pub fibers: BTreeMap<Scalar, Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HmInput {
    TypeI(Eye),
    /// `left_center`, `right_center` are the values of `f_1`, `f_2` toward the central segment.
    TypeII {
        left: Eye,
        right: Eye,
        left_center: MarkedPoint,
        right_center: MarkedPoint,
        central_length: Scalar,
        degree: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HmError {
    #[error("marked points of pedal {0} differ in value or ramification")]
    PairMismatch(String),
    #[error("central ramification differs: {0} and {1}")]
    CentralRamMismatch(u32, u32),
    #[error("degree {degree} != {d1} + {d2} - {l}")]
    DegreeMismatch { degree: u32, d1: u32, d2: u32, l: u32 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `f -> 1/(f - c)` on curve data; the new polar part is the old fiber over `c`.
fn invert_curve<K: Ord + Clone>(cd: &CurveData<K>, c: &Scalar) -> CurveData<K> {
    let marked: BTreeMap<K, MarkedPoint> =
        cd.marked.iter().map(|(k, m)| (k.clone(), MarkedPoint { value: m.value.invert_at(c), ram: m.ram })).collect();
    let mut poles: Vec<Pole<K>> = marked
        .iter()
        .filter(|(_, m)| m.value.is_infinite())
        .map(|(k, m)| Pole { point: CPoint::Marked(k.clone()), order: m.ram })
        .collect();
    let mut divisor = Vec::new();
    for (i, r) in cd.unmarked_over(c).into_iter().enumerate() {
        let l = format!("x{}", i + 1);
        poles.push(Pole { point: CPoint::Unmarked(l.clone()), order: r });
        divisor.push(DivEntry { point: CPoint::Unmarked(l), mult: r });
    }
    let mut fibers: BTreeMap<Scalar, Vec<u32>> = cd
        .fibers
        .iter()
        .filter(|(k, _)| *k != c)
        .map(|(k, p)| ((k - c).recip(), p.clone()))
        .collect();
    let mut at_zero: Vec<u32> = cd.poles.iter().map(|p| p.order).collect();
    at_zero.sort_unstable();
    fibers.insert(Scalar::zero(), at_zero);
    CurveData { genus: cd.genus, marked, degree: cd.degree, poles, divisor, fibers }
}

fn check_pairs(eye: &Eye, offset: usize) -> Result<(), HmError> {
    for (i, p) in eye.pedals.iter().enumerate() {
        if p.first != p.second {
            return Err(HmError::PairMismatch(format!("p{}", offset + i + 1)));
        }
    }
    Ok(())
}

/// Adds the pedals of one eye; returns the eye's marked points.
fn add_pedals(
    eye: &Eye,
    o: &str,
    offset: usize,
    vs: &mut Vec<String>,
    es: &mut Vec<(String, String, String, Scalar)>,
) -> Vec<(usize, MarkedPoint, MarkedPoint)> {
    let mut out = Vec::new();
    for (i, p) in eye.pedals.iter().enumerate() {
        let k = offset + i + 1;
        vs.push(format!("p{k}"));
        out.push((es.len(), p.first.clone(), p.second.clone()));
        es.push((format!("a{k}"), o.to_string(), format!("p{k}"), p.length.clone()));
        es.push((format!("b{k}"), o.to_string(), format!("p{k}"), p.length.clone()));
    }
    out
}

fn pedal_curve(first: Half, second: Half, m: &MarkedPoint) -> CurveData {
    // finite on the eye: the pedal is a local maximum; a pole on the eye: a local minimum
    let value = if m.value.is_infinite() { PValue::Finite(Scalar::zero()) } else { PValue::Infinity };
    auto_curve(vec![(first, value.clone(), m.ram), (second, value, m.ram)], 2 * m.ram, 0)
}

fn eye_curve(eye: &Eye, marked: Vec<(Half, PValue, u32)>) -> CurveData {
    let mut cd = auto_curve(marked, eye.degree, eye.genus);
    cd.fibers = eye.fibers.clone();
    cd
}

/// Builds the regulated, base-point-free series from eye data and runs the pipeline.
pub fn criterion_harris_mumford(input: &HmInput) -> Result<(SeriesPresentation, Verdict), HmError> {
    let mut vs = Vec::new();
    let mut es = Vec::new();
    let sp = match input {
        HmInput::TypeI(eye) => {
            check_pairs(eye, 0)?;
            vs.push("o".to_string());
            let pairs = add_pedals(eye, "o", 0, &mut vs, &mut es);
            let g = MetricGraph::new(vs, es).map_err(ModelError::from)?;
            let mut curves = vec![None; g.vertex_count()];
            let marks = pairs
                .iter()
                .flat_map(|(e, a, b)| {
                    [(Half::new(*e, End::Tail), a.value.clone(), a.ram), (Half::new(e + 1, End::Tail), b.value.clone(), b.ram)]
                })
                .collect();
            curves[0] = Some(eye_curve(eye, marks));
            for (i, (e, a, _)) in pairs.iter().enumerate() {
                curves[i + 1] = Some(pedal_curve(Half::new(*e, End::Head), Half::new(e + 1, End::Head), a));
            }
            SeriesPresentation::new(g, curves.into_iter().map(Option::unwrap).collect(), None)?
        }
        HmInput::TypeII { left, right, left_center, right_center, central_length, degree } => {
            check_pairs(left, 0)?;
            check_pairs(right, left.pedals.len())?;
            if left_center.ram != right_center.ram {
                return Err(HmError::CentralRamMismatch(left_center.ram, right_center.ram));
            }
            let l = left_center.ram;
            if left.degree + right.degree != degree + l {
                return Err(HmError::DegreeMismatch { degree: *degree, d1: left.degree, d2: right.degree, l });
            }
            vs.push("o1".to_string());
            vs.push("o2".to_string());
            es.push(("c".to_string(), "o1".to_string(), "o2".to_string(), central_length.clone()));
            let lp = add_pedals(left, "o1", 0, &mut vs, &mut es);
            let rp = add_pedals(right, "o2", left.pedals.len(), &mut vs, &mut es);
            let g = MetricGraph::new(vs, es).map_err(ModelError::from)?;
            let marks = |pairs: &[(usize, MarkedPoint, MarkedPoint)]| -> Vec<(Half, PValue, u32)> {
                pairs
                    .iter()
                    .flat_map(|(e, a, b)| {
                        [(Half::new(*e, End::Tail), a.value.clone(), a.ram), (Half::new(e + 1, End::Tail), b.value.clone(), b.ram)]
                    })
                    .collect()
            };
            let mut m1 = marks(&lp);
            m1.push((Half::new(0, End::Tail), left_center.value.clone(), l));
            let mut m2 = marks(&rp);
            m2.push((Half::new(0, End::Head), right_center.value.clone(), l));
            let mut c1 = eye_curve(left, m1);
            let mut c2 = eye_curve(right, m2);
            // make the left end of the central segment finite and the right end a pole
            if left_center.value.is_infinite() {
                c1 = invert_curve(&c1, &Scalar::zero());
            }
            if let PValue::Finite(c) = &right_center.value {
                c2 = invert_curve(&c2, c);
            }
            let mut curves = vec![None; g.vertex_count()];
            curves[0] = Some(c1.clone());
            curves[1] = Some(c2.clone());
            for (i, (e, _, _)) in lp.iter().chain(&rp).enumerate() {
                let eye = if i < lp.len() { &c1 } else { &c2 };
                let m = &eye.marked[&Half::new(*e, End::Tail)];
                curves[i + 2] = Some(pedal_curve(Half::new(*e, End::Head), Half::new(e + 1, End::Head), m));
            }
            SeriesPresentation::new(g, curves.into_iter().map(Option::unwrap).collect(), None)?
        }
    };
    let verdict = smoothable(&sp);
    debug_assert!(verdict.is_smoothable(), "regulated construction must be smoothable");
    Ok((sp, verdict))
}
