//! Worked instances used by the tests, the acceptance suite and the FFI smoke tests.
//!
//! Curves built by [`auto_curve`] are base-point free: every pole not attached to a
//! marked point is an unmarked simple pole, and `D_p` is exactly those poles.

use std::collections::BTreeMap;

use crate::metric_graph::{End, Half, MetricGraph, PointRef, TangentDir};
use crate::scalar::{PValue, Scalar};
pub use crate::series_model::auto_curve;
use crate::series_model::{CurveData, FillCurve, FillIn, McData, SeriesPresentation};

fn sc(s: &str) -> Scalar {
    s.parse().expect("fixture rational")
}

fn pv(s: &str) -> PValue {
    s.parse().expect("fixture value")
}

/// Vertex tangent named by edge and base vertex (non-loop edges).
pub fn half(g: &MetricGraph, edge: &str, at: &str) -> Half {
    let e = g.edge_id(edge).expect("fixture edge");
    let v = g.vertex_id(at).expect("fixture vertex");
    let ed = g.edge(e);
    if ed.tail == v {
        Half::new(e, End::Tail)
    } else {
        assert_eq!(ed.head, v, "{edge} does not touch {at}");
        Half::new(e, End::Head)
    }
}

pub struct CurveSpec<'a> {
    pub vertex: &'a str,
    pub genus: u32,
    pub degree: u32,
    pub marked: Vec<(&'a str, &'a str, u32)>,
}

pub fn cs<'a>(vertex: &'a str, degree: u32, marked: &[(&'a str, &'a str, u32)]) -> CurveSpec<'a> {
    CurveSpec { vertex, genus: 0, degree, marked: marked.to_vec() }
}

pub fn graph(vertices: &[&str], edges: &[(&str, &str, &str, &str)]) -> MetricGraph {
    MetricGraph::new(
        vertices.iter().map(|v| v.to_string()),
        edges.iter().map(|(n, a, b, l)| (n.to_string(), a.to_string(), b.to_string(), sc(l))),
    )
    .expect("fixture graph")
}

pub fn build(g: MetricGraph, specs: &[CurveSpec]) -> SeriesPresentation {
    let mut curves: Vec<Option<CurveData>> = vec![None; g.vertex_count()];
    for s in specs {
        let v = g.vertex_id(s.vertex).expect("fixture vertex");
        let marked = s.marked.iter().map(|(e, val, r)| (half(&g, e, s.vertex), pv(val), *r)).collect();
        curves[v] = Some(auto_curve(marked, s.degree, s.genus));
    }
    let curves = curves
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.unwrap_or_else(|| panic!("no curve for {}", g.vertex_name(v))))
        .collect();
    SeriesPresentation::new(g, curves, None).expect("fixture presentation")
}

/// The merge-tree example: two roots, three middle vertices, three tops, all slopes 1.
pub fn ebif() -> SeriesPresentation {
    let mut edges = vec![("o1p1", "o1", "p1", "1"), ("o2p1", "o2", "p1", "1"), ("o2p2", "o2", "p2", "1"), ("o2p3", "o2", "p3", "1")];
    let names = ["p2q1", "p2q2", "p2q3", "p3q1", "p3q2", "p3q3"];
    for n in &names {
        edges.push((n, &n[0..2], &n[2..4], "1"));
    }
    let g = graph(&["o1", "o2", "p1", "p2", "p3", "q1", "q2", "q3"], &edges);
    let mut specs = vec![
        cs("o1", 1, &[("o1p1", "0", 1)]),
        cs("o2", 2, &[("o2p1", "0", 1), ("o2p2", "1", 1), ("o2p3", "1", 1)]),
        cs("p1", 2, &[("o1p1", "inf", 1), ("o2p1", "inf", 1)]),
        cs("p2", 1, &[("o2p2", "inf", 1), ("p2q1", "0", 1), ("p2q2", "1", 1), ("p2q3", "2", 1)]),
        cs("p3", 1, &[("o2p3", "inf", 1), ("p3q1", "0", 1), ("p3q2", "1", 1), ("p3q3", "2", 1)]),
    ];
    let qs: Vec<(String, String, String)> =
        ["q1", "q2", "q3"].iter().map(|q| (q.to_string(), format!("p2{q}"), format!("p3{q}"))).collect();
    for (q, a, b) in &qs {
        specs.push(CurveSpec { vertex: q, genus: 0, degree: 2, marked: vec![(a, "inf", 1), (b, "inf", 1)] });
    }
    build(g, &specs)
}

/// The eight-vertex cycle whose diagram integrates to 1.
pub fn nonsolvable_cycle() -> SeriesPresentation {
    let g = graph(
        &["v1", "v2", "v3", "v4", "v5", "v6", "v7", "v8"],
        &[
            ("e17", "v1", "v7", "1"),
            ("e78", "v7", "v8", "1"),
            ("e82", "v8", "v2", "1"),
            ("e32", "v3", "v2", "1"),
            ("e34", "v3", "v4", "2"),
            ("e64", "v6", "v4", "1"),
            ("e56", "v5", "v6", "1"),
            ("e15", "v1", "v5", "1"),
        ],
    );
    build(
        g,
        &[
            cs("v1", 2, &[("e17", "0", 1), ("e15", "0", 1)]),
            cs("v2", 2, &[("e82", "inf", 1), ("e32", "inf", 1)]),
            cs("v3", 1, &[("e32", "0", 1), ("e34", "1", 1)]),
            cs("v4", 2, &[("e34", "inf", 1), ("e64", "inf", 1)]),
            cs("v5", 1, &[("e15", "inf", 1), ("e56", "0", 1)]),
            cs("v6", 1, &[("e56", "inf", 1), ("e64", "0", 1)]),
            cs("v7", 1, &[("e17", "inf", 1), ("e78", "0", 1)]),
            cs("v8", 1, &[("e78", "inf", 1), ("e82", "0", 1)]),
        ],
    )
}

/// A star with three unit edges; `case` 1, 2 or 3 is the degree of `f` at the center.
/// Case 2 puts the first two tangents in one fiber.
pub fn lattice(case: u32) -> SeriesPresentation {
    let g = graph(&["p0", "p1", "p2", "p3"], &[("e1", "p0", "p1", "1"), ("e2", "p0", "p2", "1"), ("e3", "p0", "p3", "1")]);
    let vals = match case {
        1 => ["0", "1", "2"],
        2 => ["0", "0", "1"],
        3 => ["0", "0", "0"],
        _ => panic!("lattice case must be 1, 2 or 3"),
    };
    build(
        g,
        &[
            cs("p0", case, &[("e1", vals[0], 1), ("e2", vals[1], 1), ("e3", vals[2], 1)]),
            cs("p1", 1, &[("e1", "inf", 1)]),
            cs("p2", 1, &[("e2", "inf", 1)]),
            cs("p3", 1, &[("e3", "inf", 1)]),
        ],
    )
}

/// Two minima p, q on a 4-cycle sharing both forward fibers; p is closing, q is opening.
pub fn beta_forcing() -> SeriesPresentation {
    let g = graph(
        &["p", "q", "a", "b"],
        &[("pa", "p", "a", "1"), ("pb", "p", "b", "1"), ("qa", "q", "a", "1"), ("qb", "q", "b", "1")],
    );
    build(
        g,
        &[
            cs("p", 2, &[("pa", "0", 1), ("pb", "0", 1)]),
            cs("q", 1, &[("qa", "0", 1), ("qb", "1", 1)]),
            cs("a", 2, &[("pa", "inf", 1), ("qa", "inf", 1)]),
            cs("b", 2, &[("pb", "inf", 1), ("qb", "inf", 1)]),
        ],
    )
}

/// One edge of length `len` with slope `m` from `a` to `b`.
pub fn single_edge(m: u32, len: Scalar) -> SeriesPresentation {
    let g = MetricGraph::new(["a".to_string(), "b".to_string()], [("e".to_string(), "a".to_string(), "b".to_string(), len)])
        .expect("fixture graph");
    build(g, &[cs("a", m, &[("e", "0", m)]), cs("b", m, &[("e", "inf", m)])])
}

/// One unit edge whose ends declare signed multiplicities `ta` and `tb`.
pub fn segment_with_mults(ta: i64, tb: i64) -> SeriesPresentation {
    let g = graph(&["a", "b"], &[("e", "a", "b", "1")]);
    let spec = |v: &'static str, m: i64| {
        let r = m.unsigned_abs() as u32;
        cs(v, r, &[("e", if m < 0 { "inf" } else { "0" }, r)])
    };
    build(g, &[spec("a", ta), spec("b", tb)])
}

/// Path a -> b -> c with unit slopes; the middle curve has the given genus.
pub fn path3(mid_genus: u32) -> SeriesPresentation {
    let g = graph(&["a", "b", "c"], &[("ab", "a", "b", "1"), ("bc", "b", "c", "1")]);
    let mut mid = cs("b", 1, &[("ab", "inf", 1), ("bc", "0", 1)]);
    mid.genus = mid_genus;
    build(g, &[cs("a", 1, &[("ab", "0", 1)]), mid, cs("c", 1, &[("bc", "inf", 1)])])
}

/// A single loop with `closing.len()` minima at level 0 separated by maxima at level 1.
/// Minimum `i` is closing iff `closing[i]`.
pub fn loop_with_minima(closing: &[bool]) -> SeriesPresentation {
    let k = closing.len();
    assert!(k >= 1);
    let mut vs = Vec::new();
    for i in 0..k {
        vs.push(format!("m{i}"));
        vs.push(format!("M{i}"));
    }
    // r_i: m_i -> M_i, l_i: m_{i+1} -> M_i
    let mut es = Vec::new();
    for i in 0..k {
        es.push((format!("r{i}"), format!("m{i}"), format!("M{i}")));
        es.push((format!("l{i}"), format!("m{}", (i + 1) % k), format!("M{i}")));
    }
    let g = MetricGraph::new(vs.clone(), es.iter().map(|(n, a, b)| (n.clone(), a.clone(), b.clone(), Scalar::one())))
        .expect("fixture graph");
    let mut curves = Vec::new();
    for v in 0..g.vertex_count() {
        let name = g.vertex_name(v).to_string();
        let i: usize = name[1..].parse().unwrap();
        let cd = if name.starts_with('m') {
            let li = (i + k - 1) % k;
            let a = half(&g, &format!("r{i}"), &name);
            let b = half(&g, &format!("l{li}"), &name);
            let (vb, d) = if closing[i] { ("0", 2) } else { ("1", 1) };
            auto_curve(vec![(a, pv("0"), 1), (b, pv(vb), 1)], d, 0)
        } else {
            let a = half(&g, &format!("r{i}"), &name);
            let b = half(&g, &format!("l{i}"), &name);
            auto_curve(vec![(a, PValue::Infinity, 1), (b, PValue::Infinity, 1)], 2, 0)
        };
        curves.push(cd);
    }
    SeriesPresentation::new(g, curves, None).expect("fixture presentation")
}

/// Which way the banana example is saturated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BananaCase {
    /// ρ(p) = ρ(q): both ends share one bifurcation node.
    Level,
    /// ρ(q) > ρ(p).
    QHigher,
    /// ρ(p) > ρ(q).
    PHigher,
}

/// The genus-3 banana: vertices p, q and four unit edges L1..L4, with a tropical divisor of
/// degree 3 at the midpoint o of L1. `fp`, `fq` are the values of f along L2, L3, L4.
pub fn banana_mc(fp: [&str; 3], fq: [&str; 3]) -> McData {
    let g = graph(
        &["p", "q"],
        &[("L1", "p", "q", "1"), ("L2", "p", "q", "1"), ("L3", "p", "q", "1"), ("L4", "p", "q", "1")],
    );
    let curve = |at: &str, rams: [u32; 3], vals: [&str; 3]| {
        let mut fib: BTreeMap<&str, u32> = BTreeMap::new();
        for (v, r) in vals.iter().zip(rams) {
            *fib.entry(v).or_default() += r;
        }
        let degree = fib.values().copied().max().unwrap().max(1);
        let mut m = vec![(half(&g, "L1", at), PValue::Infinity, 1)];
        for (i, e) in ["L2", "L3", "L4"].iter().enumerate() {
            m.push((half(&g, e, at), pv(vals[i]), rams[i]));
        }
        auto_curve(m, degree, 0)
    };
    let curves = BTreeMap::from([(0, curve("p", [2, 1, 1], fp)), (1, curve("q", [1, 1, 2], fq))]);
    McData {
        tropical: vec![(PointRef::Interior { edge: 0, offset: Scalar::ratio(1, 2) }, 3)],
        graph: g,
        curves,
        declared_genus: None,
    }
}

fn tan(edge: usize, at: &Scalar, toward: End) -> TangentDir {
    TangentDir { base: PointRef::Interior { edge, offset: at.clone() }, edge, toward }
}

/// Fill-ins for one banana case. All multiplicity changes sit at these points.
pub fn banana_fills(case: BananaCase) -> Vec<FillIn> {
    let r = Scalar::ratio;
    let mut fills = Vec::new();
    // a point where the slope toward the tail is -a and toward the head is -b (both poles)
    let peak = |edge: usize, at: Scalar, a: i64, b: i64| FillIn {
        point: PointRef::Interior { edge, offset: at.clone() },
        curve: FillCurve::Generic(BTreeMap::from([(tan(edge, &at, End::Tail), -a), (tan(edge, &at, End::Head), -b)])),
    };
    // slope drop along the edge: from the `from` side it is incoming with ram a, out ram b
    let step = |edge: usize, at: Scalar, from: End, a: i64, b: i64| FillIn {
        point: PointRef::Interior { edge, offset: at.clone() },
        curve: FillCurve::Generic(BTreeMap::from([(tan(edge, &at, from), -a), (tan(edge, &at, from.other()), b)])),
    };
    let o = r(1, 2);
    let o_curve = |toward_p: u32, toward_q: u32| {
        let m = vec![
            (tan(0, &o, End::Tail), PValue::Finite(Scalar::zero()), toward_p),
            (tan(0, &o, End::Head), PValue::Finite(Scalar::zero()), toward_q),
        ];
        FillIn { point: PointRef::Interior { edge: 0, offset: o.clone() }, curve: FillCurve::Explicit(auto_curve(m, 3, 0)) }
    };
    match case {
        BananaCase::Level => {
            // all four edge integrals vanish
            fills.push(o_curve(1, 1));
            fills.push(peak(1, r(1, 3), 2, 1));
            fills.push(peak(2, r(1, 2), 1, 1));
            fills.push(peak(3, r(2, 3), 1, 2));
        }
        BananaCase::QHigher => {
            // every edge integrates to 1/4 from p to q
            fills.push(o_curve(1, 2));
            fills.push(step(0, r(3, 4), End::Tail, 2, 1));
            fills.push(peak(1, r(5, 12), 2, 1));
            fills.push(peak(2, r(5, 8), 1, 1));
            fills.push(peak(3, r(3, 4), 1, 2));
        }
        BananaCase::PHigher => {
            // every edge integrates to -1/4 from p to q
            fills.push(o_curve(2, 1));
            fills.push(step(0, r(1, 4), End::Head, 2, 1));
            fills.push(peak(1, r(1, 4), 2, 1));
            fills.push(peak(2, r(3, 8), 1, 1));
            fills.push(peak(3, r(7, 12), 1, 2));
        }
    }
    fills
}
