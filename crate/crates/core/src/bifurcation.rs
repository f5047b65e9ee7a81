//! Merge trees of ρ, their partition systems, and δ-glued partition trees.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use petgraph::unionfind::UnionFind;

use crate::diagram_engine::{GlobalDiagram, RhoSolution};
use crate::metric_graph::{Half, MetricGraph};
use crate::scalar::Scalar;

/// A closed superlevel component `{ρ̂ >= value}` that contains a vertex at level `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BifNode {
    pub value: Scalar,
    pub min_vertex: usize,
    pub parent: Option<usize>,
    /// One child per forward tangent (open superlevel component), sorted by id.
    pub children: Vec<usize>,
    /// Vertices at exactly this level inside the component.
    pub level_vertices: Vec<usize>,
    /// All vertices of the component.
    pub vertices: Vec<usize>,
}

/// Rooted metric merge tree with one node per (level, component) pair that carries a vertex.
/// Nodes are numbered by `(value, smallest contained vertex id)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BifurcationTree {
    pub nodes: Vec<BifNode>,
    pub root: usize,
}

/// A tangent direction of a tree at a node: toward a child, or toward the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TreeTangent {
    Forward(usize),
    Back,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionMaps {
    pub vertex_node: Vec<usize>,
    /// Child node entered by each forward vertex tangent.
    pub forward: BTreeMap<Half, usize>,
}

impl ProjectionMaps {
    pub fn pushforward(&self, h: Half) -> TreeTangent {
        match self.forward.get(&h) {
            Some(&c) => TreeTangent::Forward(c),
            None => TreeTangent::Back,
        }
    }
}

pub fn build_biftree(g: &MetricGraph, gd: &GlobalDiagram, rho: &RhoSolution) -> (BifurcationTree, ProjectionMaps) {
    let n = g.vertex_count();
    let mut by_level: BTreeMap<&Scalar, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        by_level.entry(&rho.values[v]).or_default().push(v);
    }
    let mut uf = UnionFind::new(n);
    let mut top: HashMap<usize, usize> = HashMap::new();
    let mut raw: Vec<BifNode> = Vec::new();
    let mut raw_forward: BTreeMap<Half, usize> = BTreeMap::new();
    let mut raw_vertex = vec![usize::MAX; n];
    for (value, level) in by_level.iter().rev() {
        let mut ups: Vec<(usize, Half, usize)> = Vec::new();
        for &v in level {
            for &h in g.halves_at(v) {
                if gd.mult(h) > 0 {
                    let w = g.far_end(h);
                    ups.push((v, h, top[&uf.find(w)]));
                }
            }
        }
        for &(v, h, _) in &ups {
            uf.union(v, g.far_end(h));
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in level {
            comps.entry(uf.find(v)).or_default().push(v);
        }
        for (r, members) in comps {
            let id = raw.len();
            let mut children: Vec<usize> =
                ups.iter().filter(|(v, _, _)| members.contains(v)).map(|(_, _, c)| *c).collect();
            children.sort_unstable();
            children.dedup();
            for &(v, h, c) in &ups {
                if members.contains(&v) {
                    raw_forward.insert(h, c);
                }
            }
            for &v in &members {
                raw_vertex[v] = id;
            }
            let mut vertices = members.clone();
            for &c in &children {
                raw[c].parent = Some(id);
                vertices.extend(raw[c].vertices.iter().copied());
            }
            vertices.sort_unstable();
            raw.push(BifNode {
                value: (*value).clone(),
                min_vertex: vertices[0],
                parent: None,
                children,
                level_vertices: members,
                vertices,
            });
            top.insert(r, id);
        }
    }
    // renumber by (value, min vertex)
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| (&raw[a].value, raw[a].min_vertex).cmp(&(&raw[b].value, raw[b].min_vertex)));
    let mut new_id = vec![0; raw.len()];
    for (i, &o) in order.iter().enumerate() {
        new_id[o] = i;
    }
    let nodes: Vec<BifNode> = order
        .iter()
        .map(|&o| {
            let r = &raw[o];
            let mut children: Vec<usize> = r.children.iter().map(|&c| new_id[c]).collect();
            children.sort_unstable();
            BifNode { parent: r.parent.map(|p| new_id[p]), children, ..r.clone() }
        })
        .collect();
    let root = nodes.iter().position(|x| x.parent.is_none()).expect("connected graph has a root");
    let pm = ProjectionMaps {
        vertex_node: raw_vertex.iter().map(|&x| new_id[x]).collect(),
        forward: raw_forward.into_iter().map(|(h, c)| (h, new_id[c])).collect(),
    };
    (BifurcationTree { nodes, root }, pm)
}

impl BifurcationTree {
    pub fn depth(&self, x: usize) -> &Scalar {
        &self.nodes[x].value
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&x| self.nodes[x].children.is_empty()).collect()
    }

    pub fn bifurcation_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&x| self.nodes[x].children.len() >= 2).collect()
    }

    /// Nodes of the minimal model: root, leaves and bifurcation nodes.
    pub fn minimal_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&x| x == self.root || self.nodes[x].children.len() != 1)
            .collect()
    }

    /// Edges of the minimal model as (parent, child, length).
    pub fn minimal_edges(&self) -> Vec<(usize, usize, Scalar)> {
        let keep: BTreeSet<usize> = self.minimal_nodes().into_iter().collect();
        let mut out = Vec::new();
        for &x in &keep {
            if x == self.root {
                continue;
            }
            let mut p = self.nodes[x].parent.expect("non-root");
            while !keep.contains(&p) {
                p = self.nodes[p].parent.expect("non-root");
            }
            out.push((p, x, self.depth(x) - self.depth(p)));
        }
        out.sort();
        out
    }

    pub fn ancestors(&self, mut x: usize) -> Vec<usize> {
        let mut out = vec![x];
        while let Some(p) = self.nodes[x].parent {
            out.push(p);
            x = p;
        }
        out
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        let aa: BTreeSet<usize> = self.ancestors(a).into_iter().collect();
        self.ancestors(b).into_iter().find(|x| aa.contains(x)).expect("common root")
    }

    /// Tree metric `d(x1,x2) = c1 + c2 - 2 c3`, `c3` the depth of the join.
    pub fn distance(&self, a: usize, b: usize) -> Scalar {
        let j = self.join(a, b);
        &(self.depth(a) + self.depth(b)) - &(Scalar::from_int(2) * self.depth(j))
    }

    /// Edges with both ends in the component.
    pub fn component_edges(&self, g: &MetricGraph, x: usize) -> Vec<usize> {
        let vs: BTreeSet<usize> = self.nodes[x].vertices.iter().copied().collect();
        (0..g.edge_count()).filter(|&e| vs.contains(&g.edge(e).tail) && vs.contains(&g.edge(e).head)).collect()
    }
}

/// A set partition of the forward tangents (children) at every bifurcation node.
/// Blocks are sorted and listed by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BifPartitionSystem {
    pub blocks: BTreeMap<usize, Vec<Vec<usize>>>,
}

impl BifPartitionSystem {
    pub fn finest(bt: &BifurcationTree) -> Self {
        BifPartitionSystem {
            blocks: bt
                .bifurcation_nodes()
                .into_iter()
                .map(|x| (x, bt.nodes[x].children.iter().map(|&c| vec![c]).collect()))
                .collect(),
        }
    }

    /// Block of child `c` at node `x`; nodes with one child have the trivial block.
    pub fn block_of(&self, x: usize, c: usize) -> Option<&Vec<usize>> {
        self.blocks.get(&x)?.iter().find(|b| b.contains(&c))
    }

    pub fn same_block(&self, x: usize, a: usize, b: usize) -> bool {
        a == b || self.block_of(x, a).is_some_and(|bl| bl.contains(&b))
    }

    /// Canonical form from arbitrary groupings.
    pub fn from_groups(groups: BTreeMap<usize, Vec<Vec<usize>>>) -> Self {
        let blocks = groups
            .into_iter()
            .map(|(x, bs)| {
                let mut bs: Vec<Vec<usize>> = bs
                    .into_iter()
                    .map(|mut b| {
                        b.sort_unstable();
                        b
                    })
                    .collect();
                bs.sort();
                (x, bs)
            })
            .collect();
        BifPartitionSystem { blocks }
    }
}

/// All restricted growth strings of length `n`, in lexicographic order.
pub fn restricted_growth_strings(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 0 } else { max + 1 };
        for k in 0..=limit {
            cur.push(k);
            rec(cur, max.max(k), n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        rec(&mut Vec::new(), 0, n, &mut out);
    }
    out
}

fn blocks_from_rgs(items: &[usize], rgs: &[usize]) -> Vec<Vec<usize>> {
    let k = rgs.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); k];
    for (&it, &b) in items.iter().zip(rgs) {
        out[b].push(it);
    }
    out
}

/// Iterator over all partition systems: the product over bifurcation nodes (in id order)
/// of restricted-growth-string enumerations, last node varying fastest.
pub struct SystemIter {
    nodes: Vec<(usize, Vec<usize>, Vec<Vec<usize>>)>,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for SystemIter {
    type Item = BifPartitionSystem;

    fn next(&mut self) -> Option<BifPartitionSystem> {
        if self.done {
            return None;
        }
        let blocks = self
            .nodes
            .iter()
            .zip(&self.idx)
            .map(|((x, items, rgss), &i)| (*x, blocks_from_rgs(items, &rgss[i])))
            .collect();
        let mut k = self.nodes.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < self.nodes[k].2.len() {
                break;
            }
            self.idx[k] = 0;
        }
        Some(BifPartitionSystem { blocks })
    }
}

pub fn enumerate_systems(bt: &BifurcationTree) -> SystemIter {
    let nodes: Vec<(usize, Vec<usize>, Vec<Vec<usize>>)> = bt
        .bifurcation_nodes()
        .into_iter()
        .map(|x| {
            let items = bt.nodes[x].children.clone();
            let r = restricted_growth_strings(items.len());
            (x, items, r)
        })
        .collect();
    let idx = vec![0; nodes.len()];
    SystemIter { nodes, idx, done: false }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtNode {
    pub depth: Scalar,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// A rooted metric tree through which ρ̂ factors, with the surjection Θ from the merge tree
/// recorded on merge-tree nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTree {
    pub nodes: Vec<PtNode>,
    pub root: usize,
    pub theta: Vec<usize>,
    pub delta: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("delta {delta} must satisfy 0 < delta < {bound}")]
    DeltaOutOfRange { delta: Scalar, bound: String },
    #[error("system is not over this tree: {0}")]
    BadSystem(String),
    #[error("partition tree is not over the same function: {0}")]
    DifferentRho(String),
}

impl PartitionTree {
    fn add(&mut self, depth: Scalar, parent: Option<usize>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(PtNode { depth, parent, children: Vec::new() });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        id
    }

    /// The merge tree itself, viewed as a partition tree.
    pub fn identity(bt: &BifurcationTree) -> Self {
        delta_glue(bt, &BifPartitionSystem::finest(bt), None).expect("finest system never glues")
    }

    /// The image of ρ̂ as a segment: the coarsest partition tree.
    pub fn segment(bt: &BifurcationTree) -> Self {
        let depths: BTreeSet<&Scalar> = bt.nodes.iter().map(|n| &n.value).collect();
        let mut pt = PartitionTree { nodes: Vec::new(), root: 0, theta: Vec::new(), delta: None };
        let mut at = BTreeMap::new();
        let mut prev = None;
        for d in depths {
            let id = pt.add(d.clone(), prev);
            at.insert(d.clone(), id);
            prev = Some(id);
        }
        pt.theta = bt.nodes.iter().map(|n| at[&n.value]).collect();
        pt
    }

    pub fn ancestors(&self, mut x: usize) -> Vec<usize> {
        let mut out = vec![x];
        while let Some(p) = self.nodes[x].parent {
            out.push(p);
            x = p;
        }
        out
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        let aa: BTreeSet<usize> = self.ancestors(a).into_iter().collect();
        self.ancestors(b).into_iter().find(|x| aa.contains(x)).expect("common root")
    }

    pub fn edge_length(&self, child: usize) -> Scalar {
        let p = self.nodes[child].parent.expect("non-root");
        &self.nodes[child].depth - &self.nodes[p].depth
    }

    /// Child of `anc` on the way to its strict descendant `x`.
    pub fn step_toward(&self, anc: usize, x: usize) -> Option<usize> {
        let mut cur = x;
        while let Some(p) = self.nodes[cur].parent {
            if p == anc {
                return Some(cur);
            }
            cur = p;
        }
        None
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&x| self.nodes[x].children.is_empty()).collect()
    }
}

/// Upper bound for δ: the smallest gap between distinct exceptional values.
pub fn delta_bound(exceptional_values: &BTreeSet<Scalar>) -> Option<Scalar> {
    let v: Vec<&Scalar> = exceptional_values.iter().collect();
    v.windows(2).map(|w| w[1] - w[0]).min()
}

pub fn default_delta(exceptional_values: &BTreeSet<Scalar>) -> Scalar {
    delta_bound(exceptional_values).map_or_else(Scalar::one, |g| g * Scalar::ratio(1, 2))
}

/// Checks `0 < δ < bound` before gluing.
pub fn delta_glue_checked(
    bt: &BifurcationTree,
    system: &BifPartitionSystem,
    delta: &Scalar,
    exceptional_values: &BTreeSet<Scalar>,
) -> Result<PartitionTree, TreeError> {
    let bound = delta_bound(exceptional_values);
    let ok = delta.is_positive() && bound.as_ref().is_none_or(|b| delta < b);
    if !ok {
        return Err(TreeError::DeltaOutOfRange {
            delta: delta.clone(),
            bound: bound.map_or("infinity".into(), |b| b.to_string()),
        });
    }
    delta_glue(bt, system, Some(delta.clone()))
}

/// Glues the initial segments of length δ of same-block branches at every bifurcation node.
pub fn delta_glue(
    bt: &BifurcationTree,
    system: &BifPartitionSystem,
    delta: Option<Scalar>,
) -> Result<PartitionTree, TreeError> {
    for (x, bs) in &system.blocks {
        let node = bt.nodes.get(*x).ok_or_else(|| TreeError::BadSystem(format!("no node {x}")))?;
        let mut all: Vec<usize> = bs.iter().flatten().copied().collect();
        all.sort_unstable();
        if all != node.children || bs.iter().any(|b| b.is_empty()) {
            return Err(TreeError::BadSystem(format!("blocks at node {x} do not partition its forward tangents")));
        }
    }
    let mut pt = PartitionTree { nodes: Vec::new(), root: 0, theta: vec![usize::MAX; bt.nodes.len()], delta: delta.clone() };
    let root = pt.add(bt.nodes[bt.root].value.clone(), None);
    pt.theta[bt.root] = root;
    let mut queue = VecDeque::from([bt.root]);
    while let Some(x) = queue.pop_front() {
        let tx = pt.theta[x];
        let blocks: Vec<Vec<usize>> = match system.blocks.get(&x) {
            Some(bs) => bs.clone(),
            None => bt.nodes[x].children.iter().map(|&c| vec![c]).collect(),
        };
        for block in blocks {
            if block.len() == 1 {
                let c = block[0];
                let tc = pt.add(bt.nodes[c].value.clone(), Some(tx));
                pt.theta[c] = tc;
                queue.push_back(c);
                continue;
            }
            let d = delta.clone().ok_or_else(|| TreeError::BadSystem("gluing needs a positive delta".into()))?;
            let end = bt.nodes[x].value.clone() + &d;
            // walk each branch through the window (value <= end)
            let mut window: Vec<usize> = Vec::new();
            let mut beyond: Vec<usize> = Vec::new();
            for &c in &block {
                let mut cur = c;
                while bt.nodes[cur].value <= end {
                    window.push(cur);
                    match bt.nodes[cur].children[..] {
                        [only] => cur = only,
                        _ => {
                            return Err(TreeError::DeltaOutOfRange {
                                delta: d.clone(),
                                bound: format!("the first branching above node {x}"),
                            })
                        }
                    }
                }
                beyond.push(cur);
            }
            let mut depths: BTreeSet<Scalar> = window.iter().map(|&w| bt.nodes[w].value.clone()).collect();
            depths.insert(end.clone());
            let mut at = BTreeMap::new();
            let mut prev = tx;
            for dep in depths {
                let id = pt.add(dep.clone(), Some(prev));
                at.insert(dep, id);
                prev = id;
            }
            for &w in &window {
                pt.theta[w] = at[&bt.nodes[w].value];
            }
            for &b in &beyond {
                let tb = pt.add(bt.nodes[b].value.clone(), Some(prev));
                pt.theta[b] = tb;
                queue.push_back(b);
            }
        }
    }
    Ok(pt)
}

fn check_over(bt: &BifurcationTree, pt: &PartitionTree) -> Result<(), TreeError> {
    if pt.theta.len() != bt.nodes.len() {
        return Err(TreeError::DifferentRho("node count mismatch".into()));
    }
    if pt.theta[bt.root] != pt.root {
        return Err(TreeError::DifferentRho("root does not map to root".into()));
    }
    for (x, &t) in pt.theta.iter().enumerate() {
        if t >= pt.nodes.len() || pt.nodes[t].depth != bt.nodes[x].value {
            return Err(TreeError::DifferentRho(format!("depth mismatch at merge-tree node {x}")));
        }
    }
    Ok(())
}

/// Reads the partition system off a partition tree: two forward tangents at a bifurcation node
/// share a block iff Θ sends them to the same tangent direction.
pub fn phi_lambda(bt: &BifurcationTree, pt: &PartitionTree) -> Result<BifPartitionSystem, TreeError> {
    check_over(bt, pt)?;
    let mut groups = BTreeMap::new();
    for x in bt.bifurcation_nodes() {
        let tx = pt.theta[x];
        let mut by_dir: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &c in &bt.nodes[x].children {
            let dir = pt
                .step_toward(tx, pt.theta[c])
                .ok_or_else(|| TreeError::DifferentRho(format!("Θ does not preserve the order at node {x}")))?;
            by_dir.entry(dir).or_default().push(c);
        }
        groups.insert(x, by_dir.into_values().collect());
    }
    Ok(BifPartitionSystem::from_groups(groups))
}

/// `pt1 <= pt2`: every identification of merge-tree points made by `pt1` is made by `pt2`.
/// Compared through the depths of joins of all pairs of merge-tree nodes.
pub fn refinement_leq(bt: &BifurcationTree, pt1: &PartitionTree, pt2: &PartitionTree) -> Result<bool, TreeError> {
    check_over(bt, pt1)?;
    check_over(bt, pt2)?;
    let n = bt.nodes.len();
    for a in 0..n {
        for b in a + 1..n {
            let j1 = &pt1.nodes[pt1.join(pt1.theta[a], pt1.theta[b])].depth;
            let j2 = &pt2.nodes[pt2.join(pt2.theta[a], pt2.theta[b])].depth;
            if j1 > j2 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram_engine::{assemble, exceptional_points, solve_rho};
    use crate::fixtures;
    use crate::series_model::SeriesPresentation;

    fn tree_of(sp: &SeriesPresentation) -> (BifurcationTree, ProjectionMaps, RhoSolution, GlobalDiagram) {
        let gd = assemble(sp).unwrap();
        let rho = solve_rho(&sp.graph, &gd).unwrap();
        let (bt, pm) = build_biftree(&sp.graph, &gd, &rho);
        (bt, pm, rho, gd)
    }

    #[test]
    fn ebif_tree_shape() {
        let sp = fixtures::ebif();
        let (bt, pm, _, _) = tree_of(&sp);
        let node = |v: &str| pm.vertex_node[sp.graph.vertex_id(v).unwrap()];
        let (x, y1, y2) = (node("o1"), node("p1"), node("p2"));
        let z: Vec<usize> = ["q1", "q2", "q3"].iter().map(|q| node(q)).collect();
        assert_eq!(node("o2"), x);
        assert_eq!(node("p3"), y2);
        assert_eq!(bt.root, x);
        assert_eq!(bt.nodes.len(), 6);
        let mut leaves = vec![y1, z[0], z[1], z[2]];
        leaves.sort();
        assert_eq!(bt.leaves(), leaves);
        let mut bif = vec![x, y2];
        bif.sort();
        assert_eq!(bt.bifurcation_nodes(), bif);
        assert_eq!(bt.minimal_nodes().len(), 6);
        assert!(bt.minimal_edges().iter().all(|(_, _, l)| *l == Scalar::one()));
        assert_eq!(bt.minimal_edges().len(), 5);
        assert_eq!(bt.distance(y1, z[0]), Scalar::from_int(3));
        let iota: Vec<String> =
            bt.component_edges(&sp.graph, y2).iter().map(|&e| sp.graph.edge(e).name.clone()).collect();
        assert_eq!(iota, vec!["p2q1", "p2q2", "p2q3", "p3q1", "p3q2", "p3q3"]);
    }

    #[test]
    fn ebif_pushforward() {
        let sp = fixtures::ebif();
        let (_, pm, _, _) = tree_of(&sp);
        let h = |e: &str, v: &str| fixtures::half(&sp.graph, e, v);
        assert_eq!(pm.pushforward(h("p2q1", "p2")), pm.pushforward(h("p3q1", "p3")));
        assert_ne!(pm.pushforward(h("p2q1", "p2")), pm.pushforward(h("p2q2", "p2")));
        assert_eq!(pm.pushforward(h("o2p2", "p2")), TreeTangent::Back);
        assert_eq!(pm.pushforward(h("o2p2", "o2")), pm.pushforward(h("o2p3", "o2")));
        assert_ne!(pm.pushforward(h("o2p1", "o2")), pm.pushforward(h("o2p2", "o2")));
    }

    #[test]
    fn segment_and_star_trees() {
        let sp = fixtures::single_edge(1, Scalar::from_int(2));
        let (bt, pm, rho, _) = tree_of(&sp);
        assert_eq!(bt.nodes.len(), 2);
        assert_eq!(bt.distance(pm.vertex_node[0], pm.vertex_node[1]), rho.values[1]);
        let sp = fixtures::lattice(1);
        let (bt, _, _, _) = tree_of(&sp);
        assert_eq!(bt.nodes.len(), 4);
        assert_eq!(bt.nodes[bt.root].children.len(), 3);
    }

    #[test]
    fn merge_tree_matches_flood_fill() {
        for sp in [fixtures::ebif(), fixtures::beta_forcing(), fixtures::loop_with_minima(&[true, false, true])] {
            let (bt, pm, rho, _) = tree_of(&sp);
            let g = &sp.graph;
            let levels: BTreeSet<&Scalar> = rho.values.iter().collect();
            for c in levels {
                // flood fill over edges whose both ends are >= c
                let up: Vec<usize> = (0..g.vertex_count()).filter(|&v| &rho.values[v] >= c).collect();
                let mut uf = UnionFind::new(g.vertex_count());
                for e in g.edges() {
                    if &rho.values[e.tail] >= c && &rho.values[e.head] >= c {
                        uf.union(e.tail, e.head);
                    }
                }
                for &v in &up {
                    // the tree node at level c above v
                    let anc = bt.ancestors(pm.vertex_node[v]);
                    let at_c = anc.iter().copied().rfind(|&a| bt.depth(a) >= c).unwrap();
                    let members: BTreeSet<usize> = bt.nodes[at_c].vertices.iter().copied().collect();
                    let flood: BTreeSet<usize> = up.iter().copied().filter(|&w| uf.equiv(v, w)).collect();
                    assert_eq!(members, flood);
                }
            }
        }
    }

    #[test]
    fn system_counts() {
        assert_eq!(restricted_growth_strings(3).len(), 5);
        assert_eq!(restricted_growth_strings(4).len(), 15);
        let sp = fixtures::ebif();
        let (bt, _, _, _) = tree_of(&sp);
        let all: Vec<_> = enumerate_systems(&bt).collect();
        assert_eq!(all.len(), 10);
        let set: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), 10);
        let sp = fixtures::single_edge(1, Scalar::one());
        let (bt, _, _, _) = tree_of(&sp);
        assert_eq!(enumerate_systems(&bt).count(), 1);
    }

    #[test]
    fn glue_roundtrip_and_order() {
        for sp in [fixtures::ebif(), fixtures::lattice(2)] {
            let (bt, _, rho, gd) = tree_of(&sp);
            let ex = exceptional_points(&sp, &gd, &rho);
            let delta = default_delta(&ex.values);
            let id = PartitionTree::identity(&bt);
            let seg = PartitionTree::segment(&bt);
            assert_eq!(phi_lambda(&bt, &id).unwrap(), BifPartitionSystem::finest(&bt));
            for s in enumerate_systems(&bt) {
                let pt = delta_glue_checked(&bt, &s, &delta, &ex.values).unwrap();
                assert_eq!(phi_lambda(&bt, &pt).unwrap(), s);
                assert!(refinement_leq(&bt, &id, &pt).unwrap());
                assert!(refinement_leq(&bt, &pt, &seg).unwrap());
            }
            assert!(delta_glue_checked(&bt, &BifPartitionSystem::finest(&bt), &Scalar::zero(), &ex.values).is_err());
            assert!(delta_glue_checked(&bt, &BifPartitionSystem::finest(&bt), &Scalar::one(), &ex.values).is_err());
        }
    }

    #[test]
    fn partition_example_glues_two_branches() {
        let sp = fixtures::ebif();
        let (bt, pm, _, _) = tree_of(&sp);
        let node = |v: &str| pm.vertex_node[sp.graph.vertex_id(v).unwrap()];
        let (y2, z1, z2, z3) = (node("p2"), node("q1"), node("q2"), node("q3"));
        let mut s = BifPartitionSystem::finest(&bt);
        s.blocks.insert(y2, vec![vec![z1, z2], vec![z3]]);
        let s = BifPartitionSystem::from_groups(s.blocks);
        let pt = delta_glue(&bt, &s, Some(Scalar::ratio(1, 2))).unwrap();
        assert_eq!(pt.nodes.len(), 7);
        let glued = pt.nodes[pt.theta[z1]].parent.unwrap();
        assert_eq!(pt.nodes[pt.theta[z2]].parent, Some(glued));
        assert_eq!(pt.nodes[glued].depth, Scalar::ratio(3, 2));
        assert_eq!(pt.nodes[pt.theta[z3]].parent, Some(pt.theta[y2]));
    }

    #[test]
    fn one_block_star_reads_back() {
        let sp = fixtures::lattice(3);
        let (bt, _, _, _) = tree_of(&sp);
        let x = bt.root;
        let mut s = BifPartitionSystem::finest(&bt);
        s.blocks.insert(x, vec![bt.nodes[x].children.clone()]);
        let pt = delta_glue(&bt, &s, Some(Scalar::ratio(1, 3))).unwrap();
        assert_eq!(phi_lambda(&bt, &pt).unwrap().blocks[&x], vec![bt.nodes[x].children.clone()]);
    }

    #[test]
    fn foreign_tree_rejected() {
        let a = tree_of(&fixtures::ebif()).0;
        let b = tree_of(&fixtures::lattice(1)).0;
        assert!(phi_lambda(&a, &PartitionTree::identity(&b)).is_err());
    }
}
