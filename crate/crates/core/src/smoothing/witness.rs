//! Harmonic morphisms from a modification of Γ onto the witness partition tree.
//!
//! Γ is cut at the preimages of tree nodes, every vertex is mapped to its tree node, and
//! each tree direction a vertex under-covers receives branch copies of the tree.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::{analyze, forward_value, IgcWitness};
use crate::bifurcation::{PartitionTree, TreeTangent};
use crate::metric_graph::Half;
use crate::scalar::Scalar;
use crate::series_model::{strip_base_points, CPoint, SeriesPresentation};

/// A point of the tree: a node, or a point inside the edge ending at `child`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TreePoint {
    Node(usize),
    OnEdge { child: usize, depth: Scalar },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Original(usize),
    /// A cut point inside an original edge, at `offset` from its tail.
    EdgePoint { edge: usize, offset: Scalar },
    /// A point of a tree copy hung at cut-graph vertex `attach` for the unmarked point `label`.
    Branch { attach: usize, label: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModVertex {
    pub origin: Origin,
    pub image: TreePoint,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModEdge {
    pub a: usize,
    pub b: usize,
    pub length: Scalar,
    pub factor: u32,
    pub original_edge: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicMorphismData {
    pub tree: PartitionTree,
    pub vertices: Vec<ModVertex>,
    pub edges: Vec<ModEdge>,
    /// Value of the tree coordinate on each forward tree tangent `(node, child)`.
    pub tangent_values: BTreeMap<(usize, usize), Scalar>,
    /// `g_p = α + β f_p` at each original vertex.
    pub tuning: Vec<(Scalar, Scalar)>,
}

impl HarmonicMorphismData {
    /// Degree over the root, which is the degree of the morphism.
    pub fn degree(&self) -> u32 {
        self.vertices.iter().filter(|v| v.image == TreePoint::Node(self.tree.root)).map(|v| v.degree).sum()
    }

    pub fn branch_count(&self) -> usize {
        let roots: BTreeSet<(usize, &str)> = self
            .vertices
            .iter()
            .filter_map(|v| match &v.origin {
                Origin::Branch { attach, label } => Some((*attach, label.as_str())),
                _ => None,
            })
            .collect();
        roots.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("the presentation is not smoothable ({0})")]
    NotSmoothable(&'static str),
    #[error("witness does not match the presentation: {0}")]
    Mismatch(String),
    #[error("fiber profile at {vertex} toward {tangent} covers {covered} of degree {degree}")]
    Fiber { vertex: String, tangent: String, covered: u32, degree: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HarmonicViolation {
    Metric { edge: usize, detail: String },
    Unbalanced { vertex: usize, tangent: String, sum: u32, degree: u32 },
    Original { vertex: String, detail: String },
    Expansion { edge: String, factor: u32, expected: u32 },
    Length { edge: String },
    Pullback { detail: String },
}

impl fmt::Display for HarmonicViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use HarmonicViolation::*;
        match self {
            Metric { edge, detail } => write!(f, "edge {edge}: {detail}"),
            Unbalanced { vertex, tangent, sum, degree } => {
                write!(f, "vertex {vertex} is unbalanced toward {tangent}: {sum} != {degree}")
            }
            Original { vertex, detail } => write!(f, "original vertex {vertex}: {detail}"),
            Expansion { edge, factor, expected } => {
                write!(f, "edge {edge} has expansion {factor}, multiplicity is {expected}")
            }
            Length { edge } => write!(f, "pieces of edge {edge} do not add up to its length"),
            Pullback { detail } => write!(f, "pullback of the root point: {detail}"),
        }
    }
}

fn show_tangent(t: TreeTangent) -> String {
    match t {
        TreeTangent::Forward(c) => format!("t{c}"),
        TreeTangent::Back => "back".into(),
    }
}

fn point_depth(tree: &PartitionTree, p: &TreePoint) -> Scalar {
    match p {
        TreePoint::Node(z) => tree.nodes[*z].depth.clone(),
        TreePoint::OnEdge { depth, .. } => depth.clone(),
    }
}

/// Tree tangent at `at` pointing to `other`, assuming both lie on one closed tree edge.
fn direction(tree: &PartitionTree, at: &TreePoint, other: &TreePoint) -> TreeTangent {
    if point_depth(tree, other) < point_depth(tree, at) {
        return TreeTangent::Back;
    }
    match other {
        TreePoint::Node(c) | TreePoint::OnEdge { child: c, .. } => TreeTangent::Forward(*c),
    }
}

fn required_tangents(tree: &PartitionTree, p: &TreePoint) -> Vec<TreeTangent> {
    match p {
        TreePoint::Node(z) => {
            let mut out: Vec<TreeTangent> = tree.nodes[*z].children.iter().map(|&c| TreeTangent::Forward(c)).collect();
            if tree.nodes[*z].parent.is_some() {
                out.push(TreeTangent::Back);
            }
            out
        }
        TreePoint::OnEdge { child, .. } => vec![TreeTangent::Forward(*child), TreeTangent::Back],
    }
}

/// Both points lie on one closed tree edge.
fn same_edge(tree: &PartitionTree, a: &TreePoint, b: &TreePoint) -> bool {
    let parent = |z: usize| tree.nodes[z].parent;
    match (a, b) {
        (TreePoint::Node(x), TreePoint::Node(y)) => parent(*x) == Some(*y) || parent(*y) == Some(*x),
        (TreePoint::Node(x), TreePoint::OnEdge { child, .. }) | (TreePoint::OnEdge { child, .. }, TreePoint::Node(x)) => {
            child == x || parent(*child) == Some(*x)
        }
        (TreePoint::OnEdge { child: c1, .. }, TreePoint::OnEdge { child: c2, .. }) => c1 == c2,
    }
}

struct Builder<'a> {
    tree: &'a PartitionTree,
    vertices: Vec<ModVertex>,
    edges: Vec<ModEdge>,
}

impl Builder<'_> {
    fn vertex(&mut self, origin: Origin, image: TreePoint, degree: u32) -> usize {
        self.vertices.push(ModVertex { origin, image, degree });
        self.vertices.len() - 1
    }

    fn edge(&mut self, a: usize, b: usize, length: Scalar, factor: u32, original_edge: Option<usize>) {
        self.edges.push(ModEdge { a, b, length, factor, original_edge });
    }

    /// Hangs `r` copies of the component of `T - {y}` in direction `tau` at `at`, glued along an
    /// initial segment of half the first tree edge and shrunk by `r` there.
    fn branch(&mut self, at: usize, y: usize, tau: TreeTangent, r: u32, label: &str) {
        let t = self.tree;
        let (nb, first, edge_child, sign) = match tau {
            TreeTangent::Forward(c) => (c, t.edge_length(c), c, Scalar::one()),
            TreeTangent::Back => (t.nodes[y].parent.expect("back tangent below the root"), t.edge_length(y), y, -Scalar::one()),
        };
        let mut comp = BTreeSet::from([nb]);
        let mut queue = VecDeque::from([nb]);
        while let Some(z) = queue.pop_front() {
            let node = &t.nodes[z];
            for w in node.children.iter().copied().chain(node.parent) {
                if w != y && comp.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        let origin = || Origin::Branch { attach: at, label: label.to_string() };
        let copy = |b: &mut Self| {
            let ids: BTreeMap<usize, usize> =
                comp.iter().map(|&z| (z, b.vertex(origin(), TreePoint::Node(z), 1))).collect();
            for &z in &comp {
                if let Some(p) = t.nodes[z].parent {
                    if comp.contains(&p) {
                        b.edge(ids[&p], ids[&z], t.edge_length(z), 1, None);
                    }
                }
            }
            ids[&nb]
        };
        if r == 1 {
            let c = copy(self);
            self.edge(at, c, first, 1, None);
            return;
        }
        let half = &first * &Scalar::ratio(1, 2);
        let depth = &t.nodes[y].depth + &(&sign * &half);
        let g = self.vertex(origin(), TreePoint::OnEdge { child: edge_child, depth }, r);
        self.edge(at, g, &half / &Scalar::from_int(r as i64), r, None);
        for _ in 0..r {
            let c = copy(self);
            self.edge(g, c, &first - &half, 1, None);
        }
    }
}

/// Builds the modification Γ^mod and its harmonic map onto the witness tree.
pub fn build_witness_morphism(sp: &SeriesPresentation, w: &IgcWitness) -> Result<HarmonicMorphismData, WitnessError> {
    let an = analyze(sp).map_err(|v| WitnessError::NotSmoothable(v.kind()))?;
    let g = &sp.graph;
    let tree = &w.tree;
    if tree.theta.len() != an.bt.nodes.len() {
        return Err(WitnessError::Mismatch("tree is over a different merge tree".into()));
    }
    let tnode = |v: usize| tree.theta[an.pm.vertex_node[v]];
    let tree_child = |v: usize, h: Half| -> Result<usize, WitnessError> {
        let (a, b) = (tnode(v), tree.theta[an.pm.forward[&h]]);
        tree.step_toward(a, b).ok_or_else(|| WitnessError::Mismatch(format!("tree does not descend at {}", g.vertex_name(v))))
    };

    // values on tree tangents: exceptional ones first, then fresh integers
    let mut values: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
    for v in an.ex.points() {
        let (a, b) = w
            .coefficients
            .get(&v)
            .ok_or_else(|| WitnessError::Mismatch(format!("no coefficients at {}", g.vertex_name(v))))?;
        if b.is_zero() {
            return Err(WitnessError::Mismatch(format!("β vanishes at {}", g.vertex_name(v))));
        }
        for &h in g.halves_at(v) {
            if an.gd.mult(h) <= 0 {
                continue;
            }
            let key = (tnode(v), tree_child(v, h)?);
            let val = a + &(forward_value(sp, v, h) * b);
            if let Some(old) = values.insert(key, val.clone()) {
                if old != val {
                    return Err(WitnessError::Mismatch(format!("two values on one tree tangent at {}", g.vertex_name(v))));
                }
            }
        }
    }
    for (y, node) in tree.nodes.iter().enumerate() {
        let used: BTreeSet<Scalar> = node.children.iter().filter_map(|&c| values.get(&(y, c)).cloned()).collect();
        let mut fresh = (0..).map(Scalar::from_int).filter(|s| !used.contains(s));
        for &c in &node.children {
            values.entry((y, c)).or_insert_with(|| fresh.next().expect("infinitely many integers"));
        }
    }
    let mut tuning = Vec::new();
    for v in 0..g.vertex_count() {
        if let Some(ab) = w.coefficients.get(&v) {
            tuning.push(ab.clone());
            continue;
        }
        let h = *g.halves_at(v).iter().find(|&&h| an.gd.mult(h) > 0).expect("ordinary point has a forward tangent");
        let xi = &values[&(tnode(v), tree_child(v, h)?)];
        tuning.push((xi - &forward_value(sp, v, h), Scalar::one()));
    }

    let mut b = Builder { tree, vertices: Vec::new(), edges: Vec::new() };
    for v in 0..g.vertex_count() {
        b.vertex(Origin::Original(v), TreePoint::Node(tnode(v)), sp.curves[v].degree);
    }
    // cut every edge at the tree nodes it crosses
    for (e, ed) in g.edges().iter().enumerate() {
        let s = an.gd.slopes[e];
        let m = s.unsigned_abs() as u32;
        let (lo, hi) = if s > 0 { (ed.tail, ed.head) } else { (ed.head, ed.tail) };
        let (a, top) = (tnode(lo), tnode(hi));
        let anc = tree.ancestors(top);
        let Some(pos) = anc.iter().position(|&z| z == a) else {
            return Err(WitnessError::Mismatch(format!("edge {} does not map monotonically", ed.name)));
        };
        let mids: Vec<usize> = anc[1..pos].iter().rev().copied().collect();
        let rho_lo = an.rho.at(lo);
        let ms = Scalar::from_int(m as i64);
        let mut prev = lo;
        let mut prev_depth = rho_lo.clone();
        for z in mids {
            let d = &tree.nodes[z].depth;
            let up = &(d - rho_lo) / &ms;
            let offset = if lo == ed.tail { up } else { &ed.length - &up };
            let id = b.vertex(Origin::EdgePoint { edge: e, offset }, TreePoint::Node(z), m);
            b.edge(prev, id, &(d - &prev_depth) / &ms, m, Some(e));
            prev = id;
            prev_depth = d.clone();
        }
        b.edge(prev, hi, &(an.rho.at(hi) - &prev_depth) / &ms, m, Some(e));
    }

    // repair balancing at every vertex of the cut graph
    let n_cut = b.vertices.len();
    for u in 0..n_cut {
        let TreePoint::Node(y) = b.vertices[u].image.clone() else { unreachable!() };
        let mut matched: BTreeMap<TreeTangent, u32> = BTreeMap::new();
        for ed in &b.edges {
            let other = if ed.a == u {
                ed.b
            } else if ed.b == u {
                ed.a
            } else {
                continue;
            };
            *matched.entry(direction(tree, &b.vertices[u].image, &b.vertices[other].image)).or_default() += ed.factor;
        }
        let degree = b.vertices[u].degree;
        for tau in required_tangents(tree, &TreePoint::Node(y)) {
            let unmarked: Vec<(String, u32)> = match (&b.vertices[u].origin, tau) {
                (Origin::Original(v), TreeTangent::Back) => sp.curves[*v].unmarked_poles(),
                (Origin::Original(v), TreeTangent::Forward(c)) => {
                    let (al, be) = &tuning[*v];
                    let cval = &(&values[&(y, c)] - al) / be;
                    let rams = sp.curves[*v].unmarked_over(&cval);
                    rams.into_iter().enumerate().map(|(i, r)| (format!("fib:{cval}:{i}"), r)).collect()
                }
                (_, TreeTangent::Back) => Vec::new(),
                (_, TreeTangent::Forward(c)) => {
                    if matched.contains_key(&TreeTangent::Forward(c)) {
                        Vec::new()
                    } else {
                        let xi = &values[&(y, c)];
                        (0..degree).map(|i| (format!("fib:{xi}:{i}"), 1)).collect()
                    }
                }
            };
            let covered = matched.get(&tau).copied().unwrap_or(0) + unmarked.iter().map(|(_, r)| r).sum::<u32>();
            if covered != degree {
                let vertex = match &b.vertices[u].origin {
                    Origin::Original(v) => g.vertex_name(*v).to_string(),
                    _ => format!("cut point {u}"),
                };
                return Err(WitnessError::Fiber { vertex, tangent: show_tangent(tau), covered, degree });
            }
            for (label, r) in unmarked {
                b.branch(u, y, tau, r, &label);
            }
        }
    }
    Ok(HarmonicMorphismData { tree: tree.clone(), vertices: b.vertices, edges: b.edges, tangent_values: values, tuning })
}

/// Checks metric compatibility, expansion factors on Γ, balancing with constant local degree,
/// and that the pullback of the root point retracts to the divisor of `sp`.
pub fn verify_harmonic(hm: &HarmonicMorphismData, sp: &SeriesPresentation) -> Result<(), HarmonicViolation> {
    use HarmonicViolation::*;
    let an = analyze(sp).map_err(|v| Original { vertex: "-".into(), detail: format!("presentation is {}", v.kind()) })?;
    let g = &sp.graph;
    let t = &hm.tree;
    let nv = hm.vertices.len();
    for (i, v) in hm.vertices.iter().enumerate() {
        let ok = match &v.image {
            TreePoint::Node(z) => *z < t.nodes.len(),
            TreePoint::OnEdge { child, depth } => {
                *child < t.nodes.len()
                    && t.nodes[*child].parent.is_some_and(|p| &t.nodes[p].depth < depth && depth < &t.nodes[*child].depth)
            }
        };
        if !ok {
            return Err(Metric { edge: usize::MAX, detail: format!("vertex {i} maps outside the tree") });
        }
    }
    // original vertices
    for v in 0..g.vertex_count() {
        let hits: Vec<&ModVertex> = hm.vertices.iter().filter(|x| x.origin == Origin::Original(v)).collect();
        let name = g.vertex_name(v).to_string();
        if hits.len() != 1 {
            return Err(Original { vertex: name, detail: format!("{} copies", hits.len()) });
        }
        if point_depth(t, &hits[0].image) != *an.rho.at(v) {
            return Err(Original { vertex: name, detail: "image depth differs from ρ".into() });
        }
        if hits[0].degree != sp.curves[v].degree {
            return Err(Original { vertex: name, detail: "local degree differs from deg f_p".into() });
        }
    }
    // expansion along Γ
    for (e, ed) in g.edges().iter().enumerate() {
        let expected = an.gd.slopes[e].unsigned_abs() as u32;
        let mut total = Scalar::zero();
        for piece in hm.edges.iter().filter(|p| p.original_edge == Some(e)) {
            if piece.factor != expected {
                return Err(Expansion { edge: ed.name.clone(), factor: piece.factor, expected });
            }
            total += &piece.length;
        }
        if total != ed.length {
            return Err(Length { edge: ed.name.clone() });
        }
    }
    // metric compatibility
    for (i, ed) in hm.edges.iter().enumerate() {
        if ed.a >= nv || ed.b >= nv || ed.factor == 0 || !ed.length.is_positive() {
            return Err(Metric { edge: i, detail: "bad endpoints, factor or length".into() });
        }
        let (ia, ib) = (&hm.vertices[ed.a].image, &hm.vertices[ed.b].image);
        if !same_edge(t, ia, ib) {
            return Err(Metric { edge: i, detail: "does not map into one tree edge".into() });
        }
        let dist = (&point_depth(t, ia) - &point_depth(t, ib)).abs();
        if dist != Scalar::from_int(ed.factor as i64) * &ed.length {
            return Err(Metric { edge: i, detail: format!("tree distance {dist} != factor x length") });
        }
    }
    // balancing
    let mut sums: Vec<BTreeMap<TreeTangent, u32>> = vec![BTreeMap::new(); nv];
    for ed in &hm.edges {
        let (ia, ib) = (&hm.vertices[ed.a].image, &hm.vertices[ed.b].image);
        *sums[ed.a].entry(direction(t, ia, ib)).or_default() += ed.factor;
        *sums[ed.b].entry(direction(t, ib, ia)).or_default() += ed.factor;
    }
    for (i, v) in hm.vertices.iter().enumerate() {
        for tau in required_tangents(t, &v.image) {
            let sum = sums[i].get(&tau).copied().unwrap_or(0);
            if sum != v.degree {
                return Err(Unbalanced { vertex: i, tangent: show_tangent(tau), sum, degree: v.degree });
            }
        }
    }
    // pullback of the point at infinity over the root, retracted onto Γ
    let retract = |mut i: usize| -> Option<usize> {
        loop {
            match &hm.vertices.get(i)?.origin {
                Origin::Original(v) => return Some(*v),
                Origin::Branch { attach, .. } if *attach < i => i = *attach,
                _ => return None,
            }
        }
    };
    let mut pulled: BTreeMap<(usize, String), u32> = BTreeMap::new();
    for (i, v) in hm.vertices.iter().enumerate() {
        if v.image != TreePoint::Node(t.root) {
            continue;
        }
        match &v.origin {
            Origin::Original(p) => {
                for (label, order) in sp.curves[*p].unmarked_poles() {
                    *pulled.entry((*p, label)).or_default() += order;
                }
            }
            Origin::Branch { label, .. } => {
                let p = retract(i).ok_or_else(|| Pullback { detail: format!("vertex {i} does not retract to Γ") })?;
                *pulled.entry((p, label.clone())).or_default() += v.degree;
            }
            Origin::EdgePoint { .. } => {
                return Err(Pullback { detail: format!("vertex {i} inside an edge maps to the root") });
            }
        }
    }
    let mut want: BTreeMap<(usize, String), u32> = BTreeMap::new();
    for (p, cd) in strip_base_points(sp).curves.iter().enumerate() {
        for d in &cd.divisor {
            if let CPoint::Unmarked(l) = &d.point {
                *want.entry((p, l.clone())).or_default() += d.mult;
            }
        }
    }
    if pulled != want {
        let show = |m: &BTreeMap<(usize, String), u32>| {
            m.iter().map(|((p, l), k)| format!("{k}*{l}@{}", g.vertex_name(*p))).collect::<Vec<_>>().join(" + ")
        };
        return Err(Pullback { detail: format!("got {}, want {}", show(&pulled), show(&want)) });
    }
    Ok(())
}
