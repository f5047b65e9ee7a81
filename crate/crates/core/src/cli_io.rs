//! Instance and report documents (JSON), diagnostics, and DOT exporters.
//!
//! All lengths and values are exact rationals written as strings (`"3/2"`, `"-4"`), with `"inf"`
//! for the point at infinity. Vertex tangents are named `edge@vertex`; a loop edge gets a
//! `#tail`/`#head` suffix. Interior graph points are written `edge:offset`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bifurcation::{BifPartitionSystem, BifurcationTree, PartitionTree, PtNode};
use crate::diagram_engine::{assemble, solve_rho};
use crate::metric_graph::{End, GraphError, Half, MetricGraph, PointRef, TangentDir};
use crate::scalar::{PValue, Scalar};
use crate::series_model::{
    half_key, show_point, CPoint, CurveData, DivEntry, FillCurve, FillIn, MarkedPoint, McData, ModelError, Pole,
    SeriesPresentation,
};
use crate::smoothing::{
    analyze, Analysis, DiagramFailure, HarmonicMorphismData, IgcWitness, ModEdge, ModVertex, Origin, TreePoint,
    Verdict,
};

// ---------------------------------------------------------------------------------------------
// instance documents

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub graph: GraphDoc,
    #[serde(default)]
    pub distinguished: BTreeMap<String, CurveDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrized_complex: Option<McDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub ends: [String; 2],
    pub length: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkDoc {
    pub value: PValue,
    pub ram: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleDoc {
    pub point: String,
    pub order: u32,
    #[serde(default)]
    pub marked: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivDoc {
    pub point: String,
    pub mult: u32,
    #[serde(default)]
    pub marked: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDoc {
    #[serde(default)]
    pub genus: u32,
    pub marked: BTreeMap<String, MarkDoc>,
    pub f_degree: u32,
    pub poles: Vec<PoleDoc>,
    #[serde(default)]
    pub divisor: Vec<DivDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fibers: BTreeMap<String, Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TropicalDoc {
    pub point: String,
    pub mult: u32,
}

/// A fill-in: either explicit curve data or the generic function with given multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillDoc {
    pub point: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<CurveDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generic: Option<BTreeMap<String, i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McDoc {
    #[serde(default)]
    pub tropical: Vec<TropicalDoc>,
    #[serde(default)]
    pub candidates: Vec<Vec<FillDoc>>,
}

/// A located problem in an input document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ParseError(pub Vec<Diagnostic>);

/// Finds the line of the first occurrence of `"needle"` in the source text.
fn line_of(text: &str, needle: &str) -> Option<usize> {
    let quoted = format!("\"{needle}\"");
    text.find(&quoted).map(|i| text[..i].matches('\n').count() + 1)
}

struct Ctx<'a> {
    text: &'a str,
    diags: Vec<Diagnostic>,
}

impl Ctx<'_> {
    fn err(&mut self, anchor: &str, message: impl Into<String>) {
        let line = line_of(self.text, anchor);
        self.diags.push(Diagnostic { line, message: message.into() });
    }
}

/// Parses `edge@vertex` (plus `#tail`/`#head` on loops) into a vertex tangent.
pub fn parse_half(g: &MetricGraph, key: &str) -> Result<Half, String> {
    let (body, suffix) = match key.split_once('#') {
        Some((b, s)) => (b, Some(s)),
        None => (key, None),
    };
    let (en, vn) = body.split_once('@').ok_or_else(|| format!("tangent key {key:?} is not of the form edge@vertex"))?;
    let e = g.edge_id(en).map_err(|_| format!("tangent key {key:?}: unknown edge {en:?}"))?;
    let v = g.vertex_id(vn).map_err(|_| format!("tangent key {key:?}: unknown vertex {vn:?}"))?;
    let edge = g.edge(e);
    let end = match (edge.is_loop(), suffix) {
        (true, Some("tail")) => End::Tail,
        (true, Some("head")) => End::Head,
        (true, _) => return Err(format!("tangent key {key:?}: loop edges need #tail or #head")),
        (false, Some(_)) => return Err(format!("tangent key {key:?}: suffix only allowed on loops")),
        (false, None) if edge.tail == v => End::Tail,
        (false, None) if edge.head == v => End::Head,
        (false, None) => return Err(format!("tangent key {key:?}: edge {en} does not touch {vn}")),
    };
    if edge.end(end) != v {
        return Err(format!("tangent key {key:?}: edge {en} does not touch {vn}"));
    }
    Ok(Half::new(e, end))
}

/// Parses a vertex name or `edge:offset`.
pub fn parse_point(g: &MetricGraph, s: &str) -> Result<PointRef, String> {
    if let Ok(v) = g.vertex_id(s) {
        return Ok(PointRef::Vertex(v));
    }
    let (en, off) = s.split_once(':').ok_or_else(|| format!("unknown point {s:?}"))?;
    let edge = g.edge_id(en).map_err(|_| format!("point {s:?}: unknown edge {en:?}"))?;
    let offset = Scalar::from_str(off).map_err(|e| format!("point {s:?}: {e}"))?;
    let p = PointRef::Interior { edge, offset };
    g.check_point(&p).map_err(|e| format!("point {s:?}: {e}"))?;
    Ok(p)
}

fn curve_from_doc<K: Ord + Clone>(
    ctx: &mut Ctx,
    at: &str,
    doc: &CurveDoc,
    key: &dyn Fn(&str) -> Result<K, String>,
) -> Option<CurveData<K>> {
    let before = ctx.diags.len();
    let mut marked = BTreeMap::new();
    for (k, m) in &doc.marked {
        match key(k) {
            Ok(h) => {
                marked.insert(h, MarkedPoint { value: m.value.clone(), ram: m.ram });
            }
            Err(e) => ctx.err(k, format!("{at}: {e}")),
        }
    }
    let point = |p: &str, is_marked: bool, ctx: &mut Ctx| -> Option<CPoint<K>> {
        if !is_marked {
            return Some(CPoint::Unmarked(p.to_string()));
        }
        match key(p) {
            Ok(h) => Some(CPoint::Marked(h)),
            Err(e) => {
                ctx.err(p, format!("{at}: {e}"));
                None
            }
        }
    };
    let mut poles = Vec::new();
    for p in &doc.poles {
        if let Some(pt) = point(&p.point, p.marked, ctx) {
            poles.push(Pole { point: pt, order: p.order });
        }
    }
    let mut divisor = Vec::new();
    for d in &doc.divisor {
        if let Some(pt) = point(&d.point, d.marked, ctx) {
            divisor.push(DivEntry { point: pt, mult: d.mult });
        }
    }
    let mut fibers = BTreeMap::new();
    for (c, rams) in &doc.fibers {
        match Scalar::from_str(c) {
            Ok(v) => {
                fibers.insert(v, rams.clone());
            }
            Err(e) => ctx.err(c, format!("{at}: fiber value: {e}")),
        }
    }
    (ctx.diags.len() == before).then_some(CurveData {
        genus: doc.genus,
        marked,
        degree: doc.f_degree,
        poles,
        divisor,
        fibers,
    })
}

fn curve_to_doc<K>(cd: &CurveData<K>, key: &dyn Fn(&K) -> String) -> CurveDoc {
    let pt = |p: &CPoint<K>| match p {
        CPoint::Marked(h) => (key(h), true),
        CPoint::Unmarked(l) => (l.clone(), false),
    };
    CurveDoc {
        genus: cd.genus,
        marked: cd
            .marked
            .iter()
            .map(|(k, m)| (key(k), MarkDoc { value: m.value.clone(), ram: m.ram }))
            .collect(),
        f_degree: cd.degree,
        poles: cd
            .poles
            .iter()
            .map(|p| {
                let (point, marked) = pt(&p.point);
                PoleDoc { point, order: p.order, marked }
            })
            .collect(),
        divisor: cd
            .divisor
            .iter()
            .map(|d| {
                let (point, marked) = pt(&d.point);
                DivDoc { point, mult: d.mult, marked }
            })
            .collect(),
        fibers: cd.fibers.iter().map(|(c, r)| (c.to_string(), r.clone())).collect(),
    }
}

fn graph_error(ctx: &mut Ctx, e: GraphError) {
    let anchor = match &e {
        GraphError::DuplicateVertex(v) => v.clone(),
        GraphError::DuplicateEdge(x) | GraphError::NonPositiveLength(x) => x.clone(),
        GraphError::DanglingEnd { edge, .. } => edge.clone(),
        _ => "graph".into(),
    };
    ctx.err(&anchor, e.to_string());
}

fn model_error(ctx: &mut Ctx, e: ModelError) {
    match e {
        ModelError::Invalid(vs) => {
            for v in vs {
                ctx.err(&v.at, v.to_string());
            }
        }
        ModelError::Graph(g) => graph_error(ctx, g),
        other => ctx.err("graph", other.to_string()),
    }
}

/// A parsed document: the graph, curves at the listed vertices, and the optional
/// metrized-complex block.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub doc: InstanceDoc,
    pub graph: MetricGraph,
    pub curves: BTreeMap<usize, CurveData>,
}

fn read_doc(text: &str) -> Result<InstanceDoc, ParseError> {
    serde_json::from_str(text).map_err(|e| {
        ParseError(vec![Diagnostic { line: Some(e.line()), message: format!("column {}: {e}", e.column()) }])
    })
}

fn build_instance(text: &str, doc: InstanceDoc) -> Result<Instance, ParseError> {
    let mut ctx = Ctx { text, diags: Vec::new() };
    let edges = doc.graph.edges.iter().map(|e| (e.id.clone(), e.ends[0].clone(), e.ends[1].clone(), e.length.clone()));
    let graph = match MetricGraph::new(doc.graph.vertices.iter().cloned(), edges) {
        Ok(g) => g,
        Err(e) => {
            graph_error(&mut ctx, e);
            return Err(ParseError(ctx.diags));
        }
    };
    let mut curves = BTreeMap::new();
    for (name, cd) in &doc.distinguished {
        let Ok(v) = graph.vertex_id(name) else {
            ctx.err(name, format!("distinguished point {name:?} is not a vertex"));
            continue;
        };
        let key = |k: &str| parse_half(&graph, k);
        if let Some(c) = curve_from_doc(&mut ctx, name, cd, &key) {
            curves.insert(v, c);
        }
    }
    if ctx.diags.is_empty() {
        Ok(Instance { doc, graph, curves })
    } else {
        Err(ParseError(ctx.diags))
    }
}

/// Parses any instance document without requiring curve data everywhere.
pub fn parse_document(text: &str) -> Result<Instance, ParseError> {
    let doc = read_doc(text)?;
    build_instance(text, doc)
}

/// Parses and validates a series presentation: every vertex must carry curve data.
pub fn parse_instance(text: &str) -> Result<SeriesPresentation, ParseError> {
    let inst = parse_document(text)?;
    inst.presentation(text)
}

impl Instance {
    pub fn presentation(&self, text: &str) -> Result<SeriesPresentation, ParseError> {
        let mut ctx = Ctx { text, diags: Vec::new() };
        let mut curves = Vec::new();
        for v in 0..self.graph.vertex_count() {
            match self.curves.get(&v) {
                Some(c) => curves.push(c.clone()),
                None => ctx.err("distinguished", format!("vertex {} has no curve data", self.graph.vertex_name(v))),
            }
        }
        if !ctx.diags.is_empty() {
            return Err(ParseError(ctx.diags));
        }
        SeriesPresentation::new(self.graph.clone(), curves, self.doc.genus).map_err(|e| {
            model_error(&mut ctx, e);
            ParseError(ctx.diags)
        })
    }

    /// Metrized-complex data and the saturation candidates.
    pub fn metrized_complex(&self, text: &str) -> Result<(McData, Vec<Vec<FillIn>>), ParseError> {
        let mut ctx = Ctx { text, diags: Vec::new() };
        let Some(mc) = &self.doc.metrized_complex else {
            ctx.err("graph", "document has no metrized_complex block");
            return Err(ParseError(ctx.diags));
        };
        let g = &self.graph;
        let mut tropical = Vec::new();
        for t in &mc.tropical {
            match parse_point(g, &t.point) {
                Ok(p) => tropical.push((p, t.mult)),
                Err(e) => ctx.err(&t.point, e),
            }
        }
        let mut candidates = Vec::new();
        for cand in &mc.candidates {
            let mut fills = Vec::new();
            for f in cand {
                let point = match parse_point(g, &f.point) {
                    Ok(p) => p,
                    Err(e) => {
                        ctx.err(&f.point, e);
                        continue;
                    }
                };
                let key = |k: &str| fill_tangent(g, &point, k);
                let curve = match (&f.explicit, &f.generic) {
                    (Some(cd), None) => curve_from_doc(&mut ctx, &f.point, cd, &key).map(FillCurve::Explicit),
                    (None, Some(ms)) => {
                        let mut out = BTreeMap::new();
                        for (k, m) in ms {
                            match key(k) {
                                Ok(t) => {
                                    out.insert(t, *m);
                                }
                                Err(e) => ctx.err(k, format!("{}: {e}", f.point)),
                            }
                        }
                        Some(FillCurve::Generic(out))
                    }
                    _ => {
                        ctx.err(&f.point, format!("fill-in at {}: give exactly one of explicit, generic", f.point));
                        None
                    }
                };
                if let Some(curve) = curve {
                    fills.push(FillIn { point, curve });
                }
            }
            candidates.push(fills);
        }
        if !ctx.diags.is_empty() {
            return Err(ParseError(ctx.diags));
        }
        let data = McData { graph: g.clone(), curves: self.curves.clone(), tropical, declared_genus: self.doc.genus };
        Ok((data, candidates))
    }
}

/// Tangent keys at a fill-in point: `edge@vertex` at vertices, `tail`/`head` at interior points.
fn fill_tangent(g: &MetricGraph, p: &PointRef, key: &str) -> Result<TangentDir, String> {
    match p {
        PointRef::Vertex(_) => {
            let h = parse_half(g, key)?;
            Ok(TangentDir { base: p.clone(), edge: h.edge, toward: h.end.other() })
        }
        PointRef::Interior { edge, .. } => {
            let toward = match key {
                "tail" => End::Tail,
                "head" => End::Head,
                _ => return Err(format!("interior tangent key must be tail or head, got {key:?}")),
            };
            Ok(TangentDir { base: p.clone(), edge: *edge, toward })
        }
    }
}

fn fill_key(g: &MetricGraph, t: &TangentDir) -> String {
    match t.base {
        PointRef::Vertex(_) => half_key(g, Half::new(t.edge, t.toward.other())),
        PointRef::Interior { .. } => match t.toward {
            End::Tail => "tail".into(),
            End::Head => "head".into(),
        },
    }
}

fn graph_doc(g: &MetricGraph) -> GraphDoc {
    GraphDoc {
        vertices: g.vertex_names().to_vec(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                id: e.name.clone(),
                ends: [g.vertex_name(e.tail).to_string(), g.vertex_name(e.head).to_string()],
                length: e.length.clone(),
            })
            .collect(),
    }
}

pub fn presentation_doc(sp: &SeriesPresentation) -> InstanceDoc {
    let g = &sp.graph;
    let key = |h: &Half| half_key(g, *h);
    InstanceDoc {
        graph: graph_doc(g),
        distinguished: sp
            .curves
            .iter()
            .enumerate()
            .map(|(v, cd)| (g.vertex_name(v).to_string(), curve_to_doc(cd, &key)))
            .collect(),
        genus: sp.declared_genus,
        metrized_complex: None,
    }
}

pub fn mc_doc(mc: &McData, candidates: &[Vec<FillIn>]) -> InstanceDoc {
    let g = &mc.graph;
    let key = |h: &Half| half_key(g, *h);
    let fills = candidates
        .iter()
        .map(|c| {
            c.iter()
                .map(|f| {
                    let fk = |t: &TangentDir| fill_key(g, t);
                    let (explicit, generic) = match &f.curve {
                        FillCurve::Explicit(cd) => (Some(curve_to_doc(cd, &fk)), None),
                        FillCurve::Generic(ms) => (None, Some(ms.iter().map(|(t, m)| (fk(t), *m)).collect())),
                    };
                    FillDoc { point: show_point(g, &f.point), explicit, generic }
                })
                .collect()
        })
        .collect();
    InstanceDoc {
        graph: graph_doc(g),
        distinguished: mc.curves.iter().map(|(v, cd)| (g.vertex_name(*v).to_string(), curve_to_doc(cd, &key))).collect(),
        genus: mc.declared_genus,
        metrized_complex: Some(McDoc {
            tropical: mc.tropical.iter().map(|(p, m)| TropicalDoc { point: show_point(g, p), mult: *m }).collect(),
            candidates: fills,
        }),
    }
}

/// Canonical pretty JSON of a series presentation.
pub fn serialize_instance(sp: &SeriesPresentation) -> String {
    to_json(&presentation_doc(sp))
}

pub fn to_json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("documents always serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------------------------
// Harris–Mumford input documents

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PedalDoc {
    pub length: Scalar,
    pub first: MarkDoc,
    pub second: MarkDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EyeDoc {
    #[serde(default)]
    pub genus: u32,
    pub degree: u32,
    pub pedals: Vec<PedalDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fibers: BTreeMap<Scalar, Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum HmDoc {
    #[serde(rename = "I")]
    TypeI { eye: EyeDoc },
    #[serde(rename = "II")]
    TypeII {
        left: EyeDoc,
        right: EyeDoc,
        left_center: MarkDoc,
        right_center: MarkDoc,
        central_length: Scalar,
        degree: u32,
    },
}

fn mark(m: &MarkDoc) -> MarkedPoint {
    MarkedPoint { value: m.value.clone(), ram: m.ram }
}

fn eye(e: &EyeDoc) -> crate::smoothing::Eye {
    crate::smoothing::Eye {
        genus: e.genus,
        degree: e.degree,
        pedals: e
            .pedals
            .iter()
            .map(|p| crate::smoothing::Pedal { length: p.length.clone(), first: mark(&p.first), second: mark(&p.second) })
            .collect(),
        fibers: e.fibers.clone(),
    }
}

pub fn parse_hm(text: &str) -> Result<crate::smoothing::HmInput, ParseError> {
    use crate::smoothing::HmInput;
    let doc: HmDoc = serde_json::from_str(text).map_err(|e| {
        ParseError(vec![Diagnostic { line: Some(e.line()), message: format!("column {}: {e}", e.column()) }])
    })?;
    Ok(match doc {
        HmDoc::TypeI { eye: e } => HmInput::TypeI(eye(&e)),
        HmDoc::TypeII { left, right, left_center, right_center, central_length, degree } => HmInput::TypeII {
            left: eye(&left),
            right: eye(&right),
            left_center: mark(&left_center),
            right_center: mark(&right_center),
            central_length,
            degree,
        },
    })
}

// ---------------------------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentRef {
    pub point: String,
    pub tangent: String,
    pub value: PValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationDoc {
    pub left: TangentRef,
    pub right: TangentRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDoc {
    pub edge: String,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaBeta {
    pub alpha: Scalar,
    pub beta: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNodeDoc {
    pub id: usize,
    pub depth: Scalar,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDoc {
    pub root: usize,
    pub nodes: Vec<TreeNodeDoc>,
    /// Bifurcation-tree node label to partition-tree node.
    pub theta: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentValueDoc {
    pub node: String,
    pub child: String,
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OriginDoc {
    Original { vertex: String },
    EdgePoint { edge: String, offset: Scalar },
    Branch { attach: usize, label: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ImageDoc {
    Node { node: usize },
    OnEdge { edge_to: usize, depth: Scalar },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModVertexDoc {
    pub origin: OriginDoc,
    pub image: ImageDoc,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModEdgeDoc {
    pub a: usize,
    pub b: usize,
    pub length: Scalar,
    pub factor: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_edge: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeValueDoc {
    pub node: usize,
    pub child: usize,
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphismDoc {
    pub degree: u32,
    pub branches: usize,
    pub tuning: BTreeMap<String, AlphaBeta>,
    /// Coordinate values on forward tangents of the partition tree.
    pub tree_values: Vec<TreeValueDoc>,
    pub vertices: Vec<ModVertexDoc>,
    pub edges: Vec<ModEdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum DiagramDoc {
    EdgeConflict { edge: String, tail_mult: i64, head_mult: i64 },
    Incompatible { vertex: String, deficient: BTreeMap<String, u32> },
    NotRefined { vertex: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum VerdictDoc {
    #[serde(rename = "NOT_DIAGRAMMATIC")]
    NotDiagrammatic { failure: DiagramDoc },
    #[serde(rename = "NOT_SOLVABLE")]
    NotSolvable { cycle: Vec<StepDoc>, integral: Scalar },
    #[serde(rename = "IGC_INFEASIBLE")]
    IgcInfeasible { forced_zero_beta: String, equations: Vec<EquationDoc>, multipliers: Vec<Scalar> },
    #[serde(rename = "SMOOTHABLE")]
    Smoothable {
        coefficients: BTreeMap<String, AlphaBeta>,
        system: BTreeMap<String, Vec<Vec<String>>>,
        delta: Scalar,
        tree: TreeDoc,
        tangent_values: Vec<TangentValueDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        morphism: Option<MorphismDoc>,
    },
}

impl VerdictDoc {
    pub fn kind(&self) -> &'static str {
        match self {
            VerdictDoc::NotDiagrammatic { .. } => "NOT_DIAGRAMMATIC",
            VerdictDoc::NotSolvable { .. } => "NOT_SOLVABLE",
            VerdictDoc::IgcInfeasible { .. } => "IGC_INFEASIBLE",
            VerdictDoc::Smoothable { .. } => "SMOOTHABLE",
        }
    }
}

/// Label of a bifurcation node: its level vertices joined by `+`.
pub fn node_label(g: &MetricGraph, bt: &BifurcationTree, x: usize) -> String {
    bt.nodes[x].level_vertices.iter().map(|v| g.vertex_name(*v)).collect::<Vec<_>>().join("+")
}

fn node_by_label(g: &MetricGraph, bt: &BifurcationTree, label: &str) -> Option<usize> {
    (0..bt.nodes.len()).find(|&x| node_label(g, bt, x) == label)
}

pub fn system_doc(g: &MetricGraph, bt: &BifurcationTree, sys: &BifPartitionSystem) -> BTreeMap<String, Vec<Vec<String>>> {
    sys.blocks
        .iter()
        .map(|(x, blocks)| {
            let bs = blocks.iter().map(|b| b.iter().map(|c| node_label(g, bt, *c)).collect()).collect();
            (node_label(g, bt, *x), bs)
        })
        .collect()
}

fn tree_doc(g: &MetricGraph, bt: &BifurcationTree, pt: &PartitionTree) -> TreeDoc {
    TreeDoc {
        root: pt.root,
        nodes: pt
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| TreeNodeDoc { id, depth: n.depth.clone(), parent: n.parent })
            .collect(),
        theta: pt.theta.iter().enumerate().map(|(x, z)| (node_label(g, bt, x), *z)).collect(),
    }
}

fn tree_from_doc(g: &MetricGraph, bt: &BifurcationTree, td: &TreeDoc, delta: &Scalar) -> Result<PartitionTree, String> {
    let mut nodes: Vec<PtNode> = td
        .nodes
        .iter()
        .map(|n| PtNode { depth: n.depth.clone(), parent: n.parent, children: Vec::new() })
        .collect();
    for (i, n) in td.nodes.iter().enumerate() {
        if n.id != i {
            return Err(format!("tree node ids must be 0..n in order, found {} at {i}", n.id));
        }
        if let Some(p) = n.parent {
            if p >= nodes.len() {
                return Err(format!("tree node {i} has unknown parent {p}"));
            }
            nodes[p].children.push(i);
        }
    }
    if td.root >= nodes.len() {
        return Err("tree root out of range".into());
    }
    let mut theta = vec![usize::MAX; bt.nodes.len()];
    for (label, z) in &td.theta {
        let x = node_by_label(g, bt, label).ok_or_else(|| format!("unknown bifurcation node {label:?}"))?;
        theta[x] = *z;
    }
    if theta.contains(&usize::MAX) {
        return Err("theta does not cover every bifurcation node".into());
    }
    Ok(PartitionTree { nodes, root: td.root, theta, delta: Some(delta.clone()) })
}

fn tangent_ref(sp: &SeriesPresentation, (v, h): (usize, Half)) -> TangentRef {
    TangentRef {
        point: sp.graph.vertex_name(v).to_string(),
        tangent: half_key(&sp.graph, h),
        value: sp.curves[v].marked[&h].value.clone(),
    }
}

fn morphism_doc(sp: &SeriesPresentation, hm: &HarmonicMorphismData) -> MorphismDoc {
    let g = &sp.graph;
    let origin = |o: &Origin| match o {
        Origin::Original(v) => OriginDoc::Original { vertex: g.vertex_name(*v).to_string() },
        Origin::EdgePoint { edge, offset } => OriginDoc::EdgePoint { edge: g.edge(*edge).name.clone(), offset: offset.clone() },
        Origin::Branch { attach, label } => OriginDoc::Branch { attach: *attach, label: label.clone() },
    };
    MorphismDoc {
        degree: hm.degree(),
        branches: hm.branch_count(),
        tuning: hm
            .tuning
            .iter()
            .enumerate()
            .map(|(v, (a, b))| (g.vertex_name(v).to_string(), AlphaBeta { alpha: a.clone(), beta: b.clone() }))
            .collect(),
        tree_values: hm
            .tangent_values
            .iter()
            .map(|((node, child), value)| TreeValueDoc { node: *node, child: *child, value: value.clone() })
            .collect(),
        vertices: hm
            .vertices
            .iter()
            .map(|mv| ModVertexDoc {
                origin: origin(&mv.origin),
                image: match &mv.image {
                    TreePoint::Node(z) => ImageDoc::Node { node: *z },
                    TreePoint::OnEdge { child, depth } => ImageDoc::OnEdge { edge_to: *child, depth: depth.clone() },
                },
                degree: mv.degree,
            })
            .collect(),
        edges: hm
            .edges
            .iter()
            .map(|e| ModEdgeDoc {
                a: e.a,
                b: e.b,
                length: e.length.clone(),
                factor: e.factor,
                original_edge: e.original_edge.map(|x| g.edge(x).name.clone()),
            })
            .collect(),
    }
}

/// Builds the verdict report; `morphism` adds the full witness morphism.
pub fn verdict_doc(sp: &SeriesPresentation, verdict: &Verdict, morphism: Option<&HarmonicMorphismData>) -> VerdictDoc {
    let g = &sp.graph;
    let vname = |v: usize| g.vertex_name(v).to_string();
    match verdict {
        Verdict::NotDiagrammatic(f) => VerdictDoc::NotDiagrammatic {
            failure: match f {
                DiagramFailure::EdgeConflict(c) => DiagramDoc::EdgeConflict {
                    edge: g.edge(c.edge).name.clone(),
                    tail_mult: c.tail_mult,
                    head_mult: c.head_mult,
                },
                DiagramFailure::Incompatible { vertex, deficient } => DiagramDoc::Incompatible {
                    vertex: vname(*vertex),
                    deficient: deficient.iter().cloned().collect(),
                },
                DiagramFailure::NotRefined { vertex } => DiagramDoc::NotRefined { vertex: vname(*vertex) },
            },
        },
        Verdict::NotSolvable(ob) => VerdictDoc::NotSolvable {
            cycle: ob.cycle.iter().map(|s| StepDoc { edge: g.edge(s.edge).name.clone(), forward: s.forward }).collect(),
            integral: ob.integral.clone(),
        },
        Verdict::IgcInfeasible(c) => VerdictDoc::IgcInfeasible {
            forced_zero_beta: vname(c.point),
            equations: c
                .equations
                .iter()
                .map(|e| EquationDoc { left: tangent_ref(sp, e.left), right: tangent_ref(sp, e.right) })
                .collect(),
            multipliers: c.multipliers.clone(),
        },
        Verdict::Smoothable(w) => {
            let an = analyze(sp).expect("a smoothable verdict has an analysis");
            witness_doc(sp, &an, w, morphism)
        }
    }
}

fn witness_doc(sp: &SeriesPresentation, an: &Analysis, w: &IgcWitness, morphism: Option<&HarmonicMorphismData>) -> VerdictDoc {
    let g = &sp.graph;
    let bt = &an.bt;
    VerdictDoc::Smoothable {
        coefficients: w
            .coefficients
            .iter()
            .map(|(v, (a, b))| (g.vertex_name(*v).to_string(), AlphaBeta { alpha: a.clone(), beta: b.clone() }))
            .collect(),
        system: system_doc(g, bt, &w.system),
        delta: w.delta.clone(),
        tree: tree_doc(g, bt, &w.tree),
        tangent_values: w
            .tangent_values
            .iter()
            .map(|((x, c), v)| TangentValueDoc { node: node_label(g, bt, *x), child: node_label(g, bt, *c), value: v.clone() })
            .collect(),
        morphism: morphism.map(|hm| morphism_doc(sp, hm)),
    }
}

/// Rebuilds a morphism from a witness report so it can be checked against the presentation.
pub fn morphism_from_doc(sp: &SeriesPresentation, doc: &VerdictDoc) -> Result<HarmonicMorphismData, String> {
    let VerdictDoc::Smoothable { delta, tree, morphism: Some(md), .. } = doc else {
        return Err("report carries no witness morphism".into());
    };
    let g = &sp.graph;
    let an = analyze(sp).map_err(|v| format!("presentation is {}", v.kind()))?;
    let bt = &an.bt;
    let tree = tree_from_doc(g, bt, tree, delta)?;
    let vid = |n: &str| g.vertex_id(n).map_err(|e| e.to_string());
    let eid = |n: &str| g.edge_id(n).map_err(|e| e.to_string());
    let mut vertices = Vec::new();
    for v in &md.vertices {
        let origin = match &v.origin {
            OriginDoc::Original { vertex } => Origin::Original(vid(vertex)?),
            OriginDoc::EdgePoint { edge, offset } => Origin::EdgePoint { edge: eid(edge)?, offset: offset.clone() },
            OriginDoc::Branch { attach, label } => Origin::Branch { attach: *attach, label: label.clone() },
        };
        let image = match &v.image {
            ImageDoc::Node { node } => TreePoint::Node(*node),
            ImageDoc::OnEdge { edge_to, depth } => TreePoint::OnEdge { child: *edge_to, depth: depth.clone() },
        };
        vertices.push(ModVertex { origin, image, degree: v.degree });
    }
    let mut edges = Vec::new();
    for e in &md.edges {
        let original_edge = e.original_edge.as_deref().map(eid).transpose()?;
        edges.push(ModEdge { a: e.a, b: e.b, length: e.length.clone(), factor: e.factor, original_edge });
    }
    let tv = md.tree_values.iter().map(|t| ((t.node, t.child), t.value.clone())).collect();
    let mut tuning = Vec::new();
    for v in 0..g.vertex_count() {
        let ab = md.tuning.get(g.vertex_name(v)).ok_or_else(|| format!("no tuning for {}", g.vertex_name(v)))?;
        tuning.push((ab.alpha.clone(), ab.beta.clone()));
    }
    Ok(HarmonicMorphismData { tree, vertices, edges, tangent_values: tv, tuning })
}

// ---------------------------------------------------------------------------------------------
// DOT

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The graph with vertex depths (when ρ exists) and edge multiplicities (when the diagram assembles).
pub fn dot_graph(sp: &SeriesPresentation) -> String {
    let g = &sp.graph;
    let gd = assemble(sp).ok();
    let rho = gd.as_ref().and_then(|gd| solve_rho(g, gd).ok());
    let mut out = String::from("digraph gamma {\n");
    for v in 0..g.vertex_count() {
        let name = esc(g.vertex_name(v));
        match &rho {
            Some(r) => writeln!(out, "  \"{name}\" [label=\"{name}\\nrho={}\"];", r.at(v)),
            None => writeln!(out, "  \"{name}\";"),
        }
        .unwrap();
    }
    for (i, e) in g.edges().iter().enumerate() {
        let (t, h) = (esc(g.vertex_name(e.tail)), esc(g.vertex_name(e.head)));
        let label = match &gd {
            Some(gd) => format!("{} m={} len={}", esc(&e.name), gd.slopes[i], e.length),
            None => format!("{} len={}", esc(&e.name), e.length),
        };
        writeln!(out, "  \"{t}\" -> \"{h}\" [label=\"{label}\"];").unwrap();
    }
    out.push_str("}\n");
    out
}

/// The bifurcation tree: nodes with depth, leaves drawn as double circles.
pub fn dot_biftree(g: &MetricGraph, bt: &BifurcationTree) -> String {
    let leaves: BTreeSet<usize> = bt.leaves().into_iter().collect();
    let mut out = String::from("digraph biftree {\n");
    for (x, n) in bt.nodes.iter().enumerate() {
        let label = esc(&node_label(g, bt, x));
        let shape = if leaves.contains(&x) { ", shape=doublecircle, leaf=true" } else { "" };
        writeln!(out, "  n{x} [label=\"{label}\\ndepth={}\"{shape}];", n.value).unwrap();
    }
    for (x, n) in bt.nodes.iter().enumerate() {
        if let Some(p) = n.parent {
            writeln!(out, "  n{p} -> n{x} [label=\"{}\"];", &bt.nodes[p].value - &n.value).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn dot_partition_tree(g: &MetricGraph, bt: &BifurcationTree, pt: &PartitionTree) -> String {
    let mut labels: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (x, z) in pt.theta.iter().enumerate() {
        labels.entry(*z).or_default().push(node_label(g, bt, x));
    }
    let mut out = String::from("digraph partition_tree {\n");
    for (z, n) in pt.nodes.iter().enumerate() {
        let tag = labels.get(&z).map(|l| esc(&l.join(","))).unwrap_or_default();
        writeln!(out, "  t{z} [label=\"{tag}\\ndepth={}\"];", n.depth).unwrap();
    }
    for (z, n) in pt.nodes.iter().enumerate() {
        if let Some(p) = n.parent {
            writeln!(out, "  t{p} -> t{z} [label=\"{}\"];", pt.edge_length(z)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// The modified graph of a witness morphism, edges labelled with expansion factors.
pub fn dot_witness(sp: &SeriesPresentation, hm: &HarmonicMorphismData) -> String {
    let g = &sp.graph;
    let mut out = format!("graph witness {{\n  label=\"degree {}\";\n", hm.degree());
    for (i, v) in hm.vertices.iter().enumerate() {
        let name = match &v.origin {
            Origin::Original(x) => g.vertex_name(*x).to_string(),
            Origin::EdgePoint { edge, offset } => format!("{}:{}", g.edge(*edge).name, offset),
            Origin::Branch { attach, label } => format!("m{attach}/{label}"),
        };
        let image = match &v.image {
            TreePoint::Node(z) => format!("t{z}"),
            TreePoint::OnEdge { child, depth } => format!("t{child}@{depth}"),
        };
        writeln!(out, "  m{i} [label=\"{}\\n-> {image} deg {}\"];", esc(&name), v.degree).unwrap();
    }
    for e in &hm.edges {
        writeln!(out, "  m{} -- m{} [label=\"x{} len={}\"];", e.a, e.b, e.factor, e.length).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::smoothing::{build_witness_morphism, smoothable, verify_harmonic};

    #[test]
    fn ebif_document_roundtrip() {
        let sp = fixtures::ebif();
        let text = serialize_instance(&sp);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, sp);
        assert_eq!(back.graph.vertex_count(), 8);
        assert_eq!(back.graph.edge_count(), 10);
        assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn zero_length_rejected_with_line() {
        let text = serialize_instance(&fixtures::single_edge(1, Scalar::one()));
        let bad = text.replacen("\"length\": \"1\"", "\"length\": \"0\"", 1);
        assert_ne!(bad, text);
        let err = parse_instance(&bad).unwrap_err();
        assert!(err.0[0].line.is_some());
        assert!(err.to_string().contains("non-positive length"), "{err}");
    }

    #[test]
    fn infinite_value_off_the_pole_list_rejected() {
        let sp = fixtures::single_edge(1, Scalar::one());
        let mut doc = presentation_doc(&sp);
        let cd = doc.distinguished.values_mut().find(|c| c.marked.values().any(|m| !m.value.is_infinite())).unwrap();
        for m in cd.marked.values_mut() {
            m.value = PValue::Infinity;
        }
        let err = parse_instance(&to_json(&doc)).unwrap_err();
        assert!(!err.0.is_empty());
    }

    #[test]
    fn unknown_tangent_key_and_bad_rational() {
        let text = serialize_instance(&fixtures::single_edge(1, Scalar::one()));
        let doc: InstanceDoc = serde_json::from_str(&text).unwrap();
        let mut d2 = doc.clone();
        let cd = d2.distinguished.values_mut().next().unwrap();
        let (k, m) = cd.marked.pop_first().unwrap();
        cd.marked.insert(format!("zz{k}"), m);
        let err = parse_instance(&to_json(&d2)).unwrap_err();
        assert!(err.to_string().contains("unknown edge"), "{err}");
        let bad = text.replacen("\"length\": \"1\"", "\"length\": \"1/0\"", 1);
        let err = parse_instance(&bad).unwrap_err();
        assert!(err.0[0].line.is_some());
    }

    #[test]
    fn verdict_reports_roundtrip_and_reverify() {
        for sp in [fixtures::ebif(), fixtures::nonsolvable_cycle(), fixtures::beta_forcing(), fixtures::lattice(3)] {
            let v = smoothable(&sp);
            let hm = match &v {
                Verdict::Smoothable(w) => Some(build_witness_morphism(&sp, w).unwrap()),
                _ => None,
            };
            let doc = verdict_doc(&sp, &v, hm.as_ref());
            assert_eq!(doc.kind(), v.kind());
            let text = to_json(&doc);
            let back: VerdictDoc = serde_json::from_str(&text).unwrap();
            assert_eq!(back, doc);
            if let Some(hm) = hm {
                let rebuilt = morphism_from_doc(&sp, &back).unwrap();
                assert_eq!(rebuilt, hm);
                verify_harmonic(&rebuilt, &sp).unwrap();
            }
        }
    }

    #[test]
    fn dot_outputs() {
        let sp = fixtures::single_edge(1, Scalar::one());
        let d = dot_graph(&sp);
        assert_eq!(d.matches(" -> ").count(), 1);
        assert_eq!(d.lines().filter(|l| l.contains("rho=")).count(), 2);

        let sp = fixtures::ebif();
        let an = analyze(&sp).unwrap();
        let d = dot_biftree(&sp.graph, &an.bt);
        assert_eq!(d.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count(), 6);
        assert_eq!(d.matches(" -> ").count(), 5);
        let leaves: BTreeSet<&str> = d
            .lines()
            .filter(|l| l.contains("leaf=true"))
            .map(|l| l.split('"').nth(1).unwrap().split("\\n").next().unwrap())
            .collect();
        let expect: BTreeSet<String> = an.bt.leaves().iter().map(|x| node_label(&sp.graph, &an.bt, *x)).collect();
        assert_eq!(leaves, expect.iter().map(|s| s.as_str()).collect());
    }
}
