//! Metric graphs with exact lengths: points, tangent directions, cycles, subdivision.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("edge {edge:?} refers to unknown vertex {vertex:?}")]
    DanglingEnd { edge: String, vertex: String },
    #[error("edge {0:?} has non-positive length")]
    NonPositiveLength(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
}

/// Which endpoint of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum End {
    Tail,
    Head,
}

impl End {
    pub fn other(self) -> End {
        match self {
            End::Tail => End::Head,
            End::Head => End::Tail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub tail: usize,
    pub head: usize,
    pub length: Scalar,
}

impl Edge {
    pub fn end(&self, e: End) -> usize {
        match e {
            End::Tail => self.tail,
            End::Head => self.head,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// A tangent direction at a vertex: the germ of `edge` leaving the endpoint `end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half {
    pub edge: usize,
    pub end: End,
}

impl Half {
    pub fn new(edge: usize, end: End) -> Self {
        Half { edge, end }
    }

    pub fn opposite(self) -> Half {
        Half { edge: self.edge, end: self.end.other() }
    }
}

/// A point of the metric graph. Interior offsets are measured from the tail.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointRef {
    Vertex(usize),
    Interior { edge: usize, offset: Scalar },
}

/// A tangent direction at an arbitrary point, pointing along `edge` toward its `toward` endpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TangentDir {
    pub base: PointRef,
    pub edge: usize,
    pub toward: End,
}

/// An oriented edge traversal inside a cycle; `forward` means tail to head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vindex: HashMap<String, usize>,
    eindex: HashMap<String, usize>,
    incident: Vec<Vec<Half>>,
}

impl MetricGraph {
    /// Builds a connected metric graph. Edge ends are given by vertex id.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String, String, Scalar)>,
    {
        let vertices: Vec<String> = vertices.into_iter().collect();
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut vindex = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vindex.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut es = Vec::new();
        let mut eindex = HashMap::new();
        for (name, a, b, length) in edges {
            let look = |v: &String| {
                vindex.get(v).copied().ok_or_else(|| GraphError::DanglingEnd {
                    edge: name.clone(),
                    vertex: v.clone(),
                })
            };
            let (tail, head) = (look(&a)?, look(&b)?);
            if !length.is_positive() {
                return Err(GraphError::NonPositiveLength(name));
            }
            if eindex.insert(name.clone(), es.len()).is_some() {
                return Err(GraphError::DuplicateEdge(name));
            }
            es.push(Edge { name, tail, head, length });
        }
        let mut incident = vec![Vec::new(); vertices.len()];
        for (i, e) in es.iter().enumerate() {
            incident[e.tail].push(Half::new(i, End::Tail));
            incident[e.head].push(Half::new(i, End::Head));
        }
        let g = MetricGraph { vertices, edges: es, vindex, eindex, incident };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.tail, e.head);
        }
        (1..self.vertices.len()).all(|v| uf.equiv(0, v))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_id(&self, name: &str) -> Result<usize, GraphError> {
        self.vindex.get(name).copied().ok_or_else(|| GraphError::UnknownVertex(name.into()))
    }

    pub fn edge_id(&self, name: &str) -> Result<usize, GraphError> {
        self.eindex.get(name).copied().ok_or_else(|| GraphError::UnknownEdge(name.into()))
    }

    /// First Betti number `#E - #V + 1`.
    pub fn genus(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn is_tree(&self) -> bool {
        self.genus() == 0
    }

    /// Tangent directions at a vertex, ordered by edge id with the tail side first.
    pub fn halves_at(&self, v: usize) -> &[Half] {
        &self.incident[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn base_of(&self, h: Half) -> usize {
        self.edges[h.edge].end(h.end)
    }

    /// The vertex reached by following `h` to the far end of its edge.
    pub fn far_end(&self, h: Half) -> usize {
        self.edges[h.edge].end(h.end.other())
    }

    pub fn total_length(&self) -> Scalar {
        self.edges.iter().map(|e| e.length.clone()).sum()
    }

    pub fn check_point(&self, p: &PointRef) -> Result<(), GraphError> {
        match p {
            PointRef::Vertex(v) if *v < self.vertices.len() => Ok(()),
            PointRef::Vertex(v) => Err(GraphError::InvalidPoint(format!("vertex index {v}"))),
            PointRef::Interior { edge, offset } => {
                let e = self
                    .edges
                    .get(*edge)
                    .ok_or_else(|| GraphError::InvalidPoint(format!("edge index {edge}")))?;
                if offset.is_positive() && offset < &e.length {
                    Ok(())
                } else {
                    Err(GraphError::InvalidPoint(format!(
                        "offset {offset} outside the open edge {:?}",
                        e.name
                    )))
                }
            }
        }
    }

    /// All tangent directions at `p`; a loop contributes two at its base vertex.
    pub fn tangents_at(&self, p: &PointRef) -> Result<Vec<TangentDir>, GraphError> {
        self.check_point(p)?;
        Ok(match p {
            PointRef::Vertex(v) => self.incident[*v]
                .iter()
                .map(|h| TangentDir { base: p.clone(), edge: h.edge, toward: h.end.other() })
                .collect(),
            PointRef::Interior { edge, .. } => [End::Tail, End::Head]
                .into_iter()
                .map(|toward| TangentDir { base: p.clone(), edge: *edge, toward })
                .collect(),
        })
    }

    /// Edge-id minimal spanning tree (Kruskal in edge order). `true` marks tree edges.
    pub fn spanning_tree(&self) -> Vec<bool> {
        let mut uf = UnionFind::new(self.vertices.len());
        self.edges.iter().map(|e| uf.union(e.tail, e.head)).collect()
    }

    /// Fundamental cycles of the spanning tree, one per non-tree edge in edge order.
    /// Each cycle starts with its non-tree edge traversed forward.
    pub fn cycle_basis(&self) -> Vec<Vec<Step>> {
        let in_tree = self.spanning_tree();
        self.cycle_basis_for(&in_tree)
    }

    /// Fundamental cycles for an arbitrary spanning tree given as an edge mask.
    pub fn cycle_basis_for(&self, in_tree: &[bool]) -> Vec<Vec<Step>> {
        let (parent, depth) = self.tree_parents(in_tree);
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if in_tree[i] {
                continue;
            }
            let mut cyc = vec![Step { edge: i, forward: true }];
            // walk from head back to tail through the tree
            let (mut a, mut b) = (e.head, e.tail);
            let mut down = Vec::new();
            while a != b {
                if depth[a] >= depth[b] {
                    let (pe, pv) = parent[a].expect("non-root has parent");
                    cyc.push(Step { edge: pe, forward: self.edges[pe].tail == a });
                    a = pv;
                } else {
                    let (pe, pv) = parent[b].expect("non-root has parent");
                    down.push(Step { edge: pe, forward: self.edges[pe].tail == pv });
                    b = pv;
                }
            }
            cyc.extend(down.into_iter().rev());
            out.push(cyc);
        }
        out
    }

    /// Parent edge/vertex and depth of every vertex in the tree rooted at vertex 0.
    pub fn tree_parents(&self, in_tree: &[bool]) -> (Vec<Option<(usize, usize)>>, Vec<usize>) {
        let n = self.vertices.len();
        let mut parent = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        depth[0] = 0;
        let mut q = VecDeque::from([0]);
        while let Some(v) = q.pop_front() {
            for h in &self.incident[v] {
                if !in_tree[h.edge] {
                    continue;
                }
                let w = self.far_end(*h);
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some((h.edge, v));
                    q.push_back(w);
                }
            }
        }
        (parent, depth)
    }

    /// Value at `p` of the function that is linear on edges and takes `values` at vertices.
    pub fn eval_pl(&self, values: &[Scalar], p: &PointRef) -> Result<Scalar, GraphError> {
        self.check_point(p)?;
        if values.len() != self.vertices.len() {
            return Err(GraphError::InvalidPoint("value vector has wrong length".into()));
        }
        Ok(match p {
            PointRef::Vertex(v) => values[*v].clone(),
            PointRef::Interior { edge, offset } => {
                let e = &self.edges[*edge];
                let (a, b) = (&values[e.tail], &values[e.head]);
                a + &(&(b - a) * &(offset / &e.length))
            }
        })
    }

    /// Subdivides at the given points. Original vertices and their ids are kept; new
    /// vertices are appended in (edge, offset) order.
    pub fn subdivide(&self, pts: &[PointRef]) -> Result<(MetricGraph, Translation), GraphError> {
        let mut cuts: BTreeMap<usize, BTreeSet<Scalar>> = BTreeMap::new();
        for p in pts {
            self.check_point(p)?;
            if let PointRef::Interior { edge, offset } = p {
                cuts.entry(*edge).or_default().insert(offset.clone());
            }
        }
        let mut names: BTreeSet<String> = self.vertices.iter().cloned().collect();
        let mut vertices = self.vertices.clone();
        let mut new_points = BTreeMap::new();
        for (&e, offs) in &cuts {
            for o in offs {
                let base = format!("{}:{}", self.edges[e].name, o);
                let mut name = base.clone();
                let mut k = 1;
                while names.contains(&name) {
                    name = format!("{base}#{k}");
                    k += 1;
                }
                names.insert(name.clone());
                new_points.insert((e, o.clone()), vertices.len());
                vertices.push(name);
            }
        }
        let mut enames: BTreeSet<String> = self.edges.iter().map(|e| e.name.clone()).collect();
        let mut edges = Vec::new();
        let mut pieces = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let Some(offs) = cuts.get(&i) else {
                pieces.push(vec![Piece { edge: edges.len(), start: Scalar::zero() }]);
                edges.push((e.name.clone(), vertices[e.tail].clone(), vertices[e.head].clone(), e.length.clone()));
                continue;
            };
            let mut list = Vec::new();
            let mut prev_v = e.tail;
            let mut prev_o = Scalar::zero();
            let stops = offs
                .iter()
                .map(|o| (new_points[&(i, o.clone())], o.clone()))
                .chain(std::iter::once((e.head, e.length.clone())));
            for (k, (v, o)) in stops.enumerate() {
                let mut name = format!("{}.{}", e.name, k);
                while enames.contains(&name) {
                    name.push('\'');
                }
                enames.insert(name.clone());
                list.push(Piece { edge: edges.len(), start: prev_o.clone() });
                edges.push((name, vertices[prev_v].clone(), vertices[v].clone(), &o - &prev_o));
                prev_v = v;
                prev_o = o;
            }
            pieces.push(list);
        }
        let g = MetricGraph::new(vertices, edges)?;
        Ok((g, Translation { pieces, new_points }))
    }

    /// Biconnected blocks as sorted edge lists, ordered by smallest edge id.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut time = 0;
        let mut stack: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_loop() {
                out.push(vec![i]);
            }
        }
        // iterative DFS: frames hold (vertex, parent edge, next incident index)
        let mut frames: Vec<(usize, Option<usize>, usize)> = vec![(0, None, 0)];
        disc[0] = 0;
        low[0] = 0;
        time += 1;
        while let Some(&mut (v, pe, ref mut idx)) = frames.last_mut() {
            if *idx < self.incident[v].len() {
                let h = self.incident[v][*idx];
                *idx += 1;
                let e = h.edge;
                if Some(e) == pe || self.edges[e].is_loop() {
                    continue;
                }
                let w = self.far_end(h);
                if disc[w] == usize::MAX {
                    stack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    frames.push((w, Some(e), 0));
                } else if disc[w] < disc[v] {
                    stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                frames.pop();
                if let (Some(&(u, _, _)), Some(e)) = (frames.last(), pe) {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let mut block = Vec::new();
                        while let Some(x) = stack.pop() {
                            block.push(x);
                            if x == e {
                                break;
                            }
                        }
                        block.sort_unstable();
                        out.push(block);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Piece {
    edge: usize,
    start: Scalar,
}

/// Maps points and tangents of a graph to its subdivision.
#[derive(Debug, Clone)]
pub struct Translation {
    pieces: Vec<Vec<Piece>>,
    new_points: BTreeMap<(usize, Scalar), usize>,
}

impl Translation {
    /// New edge ids covering an old edge, in tail-to-head order.
    pub fn edge_pieces(&self, e: usize) -> Vec<usize> {
        self.pieces[e].iter().map(|p| p.edge).collect()
    }

    pub fn point(&self, p: &PointRef) -> PointRef {
        match p {
            PointRef::Vertex(v) => PointRef::Vertex(*v),
            PointRef::Interior { edge, offset } => {
                if let Some(&v) = self.new_points.get(&(*edge, offset.clone())) {
                    return PointRef::Vertex(v);
                }
                let pc = self.pieces[*edge]
                    .iter()
                    .rev()
                    .find(|pc| &pc.start < offset)
                    .expect("offset lies in some piece");
                PointRef::Interior { edge: pc.edge, offset: offset - &pc.start }
            }
        }
    }

    pub fn tangent(&self, g_new: &MetricGraph, t: &TangentDir) -> TangentDir {
        let base = self.point(&t.base);
        let pcs = &self.pieces[t.edge];
        let edge = match (&t.base, &base) {
            (PointRef::Vertex(_), _) => match t.toward {
                End::Head => pcs[0].edge,
                End::Tail => pcs[pcs.len() - 1].edge,
            },
            (_, PointRef::Interior { edge, .. }) => *edge,
            (PointRef::Interior { .. }, PointRef::Vertex(v)) => {
                // the new vertex sits between two pieces
                let k = pcs
                    .iter()
                    .position(|pc| g_new.edge(pc.edge).tail == *v)
                    .expect("new vertex starts a piece");
                match t.toward {
                    End::Head => pcs[k].edge,
                    End::Tail => pcs[k - 1].edge,
                }
            }
        };
        TangentDir { base, edge, toward: t.toward }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    pub(crate) fn graph(vs: &[&str], es: &[(&str, &str, &str, Scalar)]) -> MetricGraph {
        MetricGraph::new(
            vs.iter().map(|v| v.to_string()),
            es.iter().map(|(n, a, b, l)| (n.to_string(), a.to_string(), b.to_string(), l.clone())),
        )
        .unwrap()
    }

    fn banana() -> MetricGraph {
        graph(
            &["p", "q"],
            &[("e1", "p", "q", s(1)), ("e2", "p", "q", s(1)), ("e3", "p", "q", s(1)), ("e4", "p", "q", s(1))],
        )
    }

    fn ebif() -> MetricGraph {
        let mut es = vec![("o1p1", "o1", "p1"), ("o2p1", "o2", "p1"), ("o2p2", "o2", "p2"), ("o2p3", "o2", "p3")];
        let names: Vec<(String, &str, &str)> = ["p2", "p3"]
            .iter()
            .flat_map(|p| ["q1", "q2", "q3"].map(move |q| (format!("{p}{q}"), *p, q)))
            .collect();
        let owned: Vec<(&str, &str, &str)> = names.iter().map(|(n, a, b)| (n.as_str(), *a, *b)).collect();
        es.extend(owned);
        graph(
            &["o1", "o2", "p1", "p2", "p3", "q1", "q2", "q3"],
            &es.iter().map(|(n, a, b)| (*n, *a, *b, s(1))).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn genus_examples() {
        assert_eq!(graph(&["a", "b"], &[("e", "a", "b", s(1))]).genus(), 0);
        assert_eq!(graph(&["a"], &[("e", "a", "a", s(1))]).genus(), 1);
        assert_eq!(banana().genus(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        let mk = |es: Vec<(String, String, String, Scalar)>| {
            MetricGraph::new(["a".to_string(), "b".to_string()], es)
        };
        assert_eq!(
            mk(vec![("e".into(), "a".into(), "b".into(), s(0))]),
            Err(GraphError::NonPositiveLength("e".into()))
        );
        assert_eq!(mk(vec![]), Err(GraphError::Disconnected));
        assert!(matches!(
            mk(vec![("e".into(), "a".into(), "z".into(), s(1))]),
            Err(GraphError::DanglingEnd { .. })
        ));
    }

    #[test]
    fn cycle_basis_examples() {
        let t = graph(&["a", "b", "c"], &[("e", "a", "b", s(1)), ("f", "b", "c", s(1))]);
        assert!(t.cycle_basis().is_empty());
        let l = graph(&["a"], &[("e", "a", "a", s(3))]);
        assert_eq!(l.cycle_basis(), vec![vec![Step { edge: 0, forward: true }]]);
        let b = banana().cycle_basis();
        assert_eq!(b.len(), 3);
        for (k, c) in b.iter().enumerate() {
            let mut es: Vec<usize> = c.iter().map(|s| s.edge).collect();
            es.sort();
            assert_eq!(es, vec![0, k + 1]);
        }
    }

    #[test]
    fn tangents_examples() {
        let g = ebif();
        let o2 = g.vertex_id("o2").unwrap();
        assert_eq!(g.tangents_at(&PointRef::Vertex(o2)).unwrap().len(), 3);
        let p2 = g.vertex_id("p2").unwrap();
        assert_eq!(g.tangents_at(&PointRef::Vertex(p2)).unwrap().len(), 4);
        let l = graph(&["a"], &[("e", "a", "a", s(3))]);
        let ts = l.tangents_at(&PointRef::Vertex(0)).unwrap();
        assert_eq!(ts.len(), 2);
        assert_ne!(ts[0], ts[1]);
        let mid = PointRef::Interior { edge: 0, offset: s(1) };
        assert_eq!(l.tangents_at(&mid).unwrap().len(), 2);
    }

    #[test]
    fn subdivision_examples() {
        let g = graph(&["a", "b"], &[("e", "a", "b", s(2))]);
        let (h, tr) = g.subdivide(&[PointRef::Interior { edge: 0, offset: s(1) }]).unwrap();
        assert_eq!(h.edge_count(), 2);
        assert!(h.edges().iter().all(|e| e.length == s(1)));
        assert_eq!(tr.point(&PointRef::Interior { edge: 0, offset: s(1) }), PointRef::Vertex(2));
        let (h0, _) = g.subdivide(&[]).unwrap();
        assert_eq!(h0, g);

        let l = graph(&["a"], &[("e", "a", "a", s(3))]);
        let (tri, _) = l
            .subdivide(&[PointRef::Interior { edge: 0, offset: s(1) }, PointRef::Interior { edge: 0, offset: s(2) }])
            .unwrap();
        assert_eq!(tri.vertex_count(), 3);
        assert_eq!(tri.genus(), 1);
        assert_eq!(tri.total_length(), s(3));
        assert!(tri.edges().iter().all(|e| e.length == s(1) && !e.is_loop()));
    }

    #[test]
    fn subdivision_translates_tangents() {
        let g = graph(&["a", "b"], &[("e", "a", "b", s(4))]);
        let p = PointRef::Interior { edge: 0, offset: s(1) };
        let q = PointRef::Interior { edge: 0, offset: s(3) };
        let (h, tr) = g.subdivide(std::slice::from_ref(&p)).unwrap();
        assert_eq!(tr.point(&q), PointRef::Interior { edge: 1, offset: s(2) });
        let t = TangentDir { base: p.clone(), edge: 0, toward: End::Head };
        let nt = tr.tangent(&h, &t);
        assert_eq!(nt.base, PointRef::Vertex(2));
        assert_eq!(h.edge(nt.edge).head, 1);
        let t0 = TangentDir { base: PointRef::Vertex(1), edge: 0, toward: End::Tail };
        assert_eq!(tr.tangent(&h, &t0).edge, 1);
    }

    #[test]
    fn eval_examples() {
        let g = graph(&["a", "b"], &[("e", "a", "b", s(1))]);
        let vals = vec![s(0), s(3)];
        assert_eq!(g.eval_pl(&vals, &PointRef::Vertex(1)).unwrap(), s(3));
        let third = PointRef::Interior { edge: 0, offset: Scalar::ratio(1, 3) };
        assert_eq!(g.eval_pl(&vals, &third).unwrap(), s(1));
        let g2 = graph(&["a", "b"], &[("e", "a", "b", s(2))]);
        let mid = PointRef::Interior { edge: 0, offset: s(1) };
        assert_eq!(g2.eval_pl(&[s(0), s(2)], &mid).unwrap(), s(1));
        assert!(g.eval_pl(&vals, &PointRef::Interior { edge: 0, offset: s(0) }).is_err());
    }

    #[test]
    fn blocks_of_cactus() {
        // two triangles sharing vertex c, plus a pendant edge and a self-loop
        let g = graph(
            &["a", "b", "c", "d", "e", "f"],
            &[
                ("1", "a", "b", s(1)),
                ("2", "b", "c", s(1)),
                ("3", "c", "a", s(1)),
                ("4", "c", "d", s(1)),
                ("5", "d", "e", s(1)),
                ("6", "e", "c", s(1)),
                ("7", "e", "f", s(1)),
                ("8", "f", "f", s(1)),
            ],
        );
        assert_eq!(g.blocks(), vec![vec![0, 1, 2], vec![3, 4, 5], vec![6], vec![7]]);
        assert_eq!(banana().blocks(), vec![vec![0, 1, 2, 3]]);
    }
}
