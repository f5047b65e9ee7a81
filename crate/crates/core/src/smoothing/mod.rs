//! The decision core: level filters, the linear IGC test, the verdict pipeline.

use std::collections::{BTreeMap, BTreeSet};

use crate::bifurcation::{
    build_biftree, default_delta, delta_glue, BifPartitionSystem, BifurcationTree, PartitionTree, ProjectionMaps,
};
use crate::diagram_engine::{
    assemble, exceptional_points, solve_rho, CycleObstruction, EdgeConflict, ExceptionalSet, GlobalDiagram,
    RhoSolution,
};
use crate::linalg::{avoid_hyperplanes, nullspace, row_combination, Row};
use crate::metric_graph::Half;
use crate::scalar::Scalar;
use crate::series_model::{check_diagrammatic, SeriesPresentation};

pub mod criteria;
pub mod witness;

pub use criteria::*;
pub use witness::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagramFailure {
    /// `D_p` misses part of the unmarked polar divisor of `f_p`.
    Incompatible { vertex: usize, deficient: Vec<(String, u32)> },
    /// `D_p` puts mass on a marked point.
    NotRefined { vertex: usize },
    EdgeConflict(EdgeConflict),
}

/// Linear relation `α_a + f_a(t_a) β_a = α_b + f_b(t_b) β_b` between two forward tangents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IgcEquation {
    pub left: (usize, Half),
    pub right: (usize, Half),
}

/// β at `point` vanishes on every solution: `Σ multipliers[i] · equations[i] = β_point`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IgcCertificate {
    pub point: usize,
    pub points: Vec<usize>,
    pub equations: Vec<IgcEquation>,
    pub multipliers: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IgcWitness {
    /// `(α_p, β_p)` per exceptional point, `β_p != 0`.
    pub coefficients: BTreeMap<usize, (Scalar, Scalar)>,
    /// Common value on each merge-tree tangent `(node, child)` that has exceptional representatives.
    pub tangent_values: BTreeMap<(usize, usize), Scalar>,
    pub system: BifPartitionSystem,
    pub delta: Scalar,
    pub tree: PartitionTree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NotDiagrammatic(DiagramFailure),
    NotSolvable(CycleObstruction),
    IgcInfeasible(IgcCertificate),
    Smoothable(Box<IgcWitness>),
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::NotDiagrammatic(_) => "NOT_DIAGRAMMATIC",
            Verdict::NotSolvable(_) => "NOT_SOLVABLE",
            Verdict::IgcInfeasible(_) => "IGC_INFEASIBLE",
            Verdict::Smoothable(_) => "SMOOTHABLE",
        }
    }

    pub fn is_smoothable(&self) -> bool {
        matches!(self, Verdict::Smoothable(_))
    }
}

/// Everything computed before the IGC step.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub gd: GlobalDiagram,
    pub rho: RhoSolution,
    pub ex: ExceptionalSet,
    pub bt: BifurcationTree,
    pub pm: ProjectionMaps,
}

/// Runs the diagrammatic, assembly and solvability stages; a negative verdict stops early.
pub fn analyze(sp: &SeriesPresentation) -> Result<Analysis, Verdict> {
    let rep = check_diagrammatic(sp);
    if let Some(p) = rep.points.iter().find(|p| !p.compatible) {
        return Err(Verdict::NotDiagrammatic(DiagramFailure::Incompatible {
            vertex: p.vertex,
            deficient: p.deficient.clone(),
        }));
    }
    if let Some(p) = rep.points.iter().find(|p| !p.refined) {
        return Err(Verdict::NotDiagrammatic(DiagramFailure::NotRefined { vertex: p.vertex }));
    }
    let gd = assemble(sp).map_err(|c| Verdict::NotDiagrammatic(DiagramFailure::EdgeConflict(c)))?;
    let rho = solve_rho(&sp.graph, &gd).map_err(|e| Verdict::NotSolvable(e.0))?;
    let ex = exceptional_points(sp, &gd, &rho);
    let (bt, pm) = build_biftree(&sp.graph, &gd, &rho);
    Ok(Analysis { gd, rho, ex, bt, pm })
}

/// Value of `f_p` at the marked point of a forward tangent.
pub fn forward_value(sp: &SeriesPresentation, v: usize, h: Half) -> Scalar {
    sp.curves[v].marked[&h].value.finite().cloned().expect("forward tangents carry finite values")
}

fn forward_halves(sp: &SeriesPresentation, gd: &GlobalDiagram, v: usize) -> Vec<Half> {
    sp.graph.halves_at(v).iter().copied().filter(|&h| gd.mult(h) > 0).collect()
}

/// `Tan^+` representatives by tree tangent: exceptional points only.
fn representatives(sp: &SeriesPresentation, an: &Analysis) -> BTreeMap<(usize, usize), Vec<(usize, Half)>> {
    let mut out: BTreeMap<(usize, usize), Vec<(usize, Half)>> = BTreeMap::new();
    for v in an.ex.points() {
        let x = an.pm.vertex_node[v];
        for h in forward_halves(sp, &an.gd, v) {
            out.entry((x, an.pm.forward[&h])).or_default().push((v, h));
        }
    }
    out
}

/// The homogeneous system of the IGC test over variables `(α_i, β_i)` at columns `2i, 2i+1`.
#[derive(Debug, Clone)]
pub struct IgcSystem {
    pub points: Vec<usize>,
    pub equations: Vec<IgcEquation>,
    pub rows: Vec<Row>,
}

impl IgcSystem {
    pub fn ncols(&self) -> usize {
        2 * self.points.len()
    }

    fn index(&self, v: usize) -> usize {
        self.points.binary_search(&v).expect("exceptional point")
    }

    /// Functional `g_a(t_a) - g_b(t_b)`.
    pub fn difference(&self, sp: &SeriesPresentation, a: (usize, Half), b: (usize, Half)) -> Row {
        let mut row = vec![Scalar::zero(); self.ncols()];
        let (ia, ib) = (self.index(a.0), self.index(b.0));
        row[2 * ia] += &Scalar::one();
        row[2 * ia + 1] += &forward_value(sp, a.0, a.1);
        row[2 * ib] -= &Scalar::one();
        row[2 * ib + 1] -= &forward_value(sp, b.0, b.1);
        row
    }

    pub fn beta(&self, v: usize) -> Row {
        let mut row = vec![Scalar::zero(); self.ncols()];
        row[2 * self.index(v) + 1] = Scalar::one();
        row
    }

    pub fn push(&mut self, sp: &SeriesPresentation, a: (usize, Half), b: (usize, Half)) {
        self.rows.push(self.difference(sp, a, b));
        self.equations.push(IgcEquation { left: a, right: b });
    }
}

/// One equation per pair of exceptional forward tangents sharing a merge-tree tangent.
pub fn igc_system(sp: &SeriesPresentation, an: &Analysis) -> IgcSystem {
    let mut sys = IgcSystem { points: an.ex.points(), equations: Vec::new(), rows: Vec::new() };
    for reps in representatives(sp, an).values() {
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                sys.push(sp, reps[i], reps[j]);
            }
        }
    }
    sys
}

/// Decides IGC with all `β_p != 0`. On success the witness carries the induced system and its
/// δ-glued tree; otherwise the first point (in vertex order) whose β is forced to vanish.
pub fn igc_feasible(sp: &SeriesPresentation, an: &Analysis) -> Result<IgcWitness, IgcCertificate> {
    let sys = igc_system(sp, an);
    let n = sys.ncols();
    let basis = nullspace(&sys.rows, n);
    for &v in &sys.points {
        let b = 2 * sys.index(v) + 1;
        if basis.iter().all(|x| x[b].is_zero()) {
            let multipliers = row_combination(&sys.rows, &sys.beta(v)).expect("β lies in the row space");
            return Err(IgcCertificate {
                point: v,
                points: sys.points.clone(),
                equations: sys.equations.clone(),
                multipliers,
            });
        }
    }
    let forms: Vec<Row> = sys.points.iter().map(|&v| sys.beta(v)).collect();
    let x = avoid_hyperplanes(&basis, &forms, n).expect("no β vanishes on the solution space");
    let coefficients: BTreeMap<usize, (Scalar, Scalar)> =
        sys.points.iter().enumerate().map(|(i, &v)| (v, (x[2 * i].clone(), x[2 * i + 1].clone()))).collect();
    let mut tangent_values = BTreeMap::new();
    for (key, reps) in representatives(sp, an) {
        let (v, h) = reps[0];
        let (a, b) = &coefficients[&v];
        tangent_values.insert(key, a + &(forward_value(sp, v, h) * b));
    }
    let system = induced_system(&an.bt, &tangent_values);
    let delta = default_delta(&an.ex.values);
    let tree = delta_glue(&an.bt, &system, Some(delta.clone())).expect("induced system glues below the gap");
    Ok(IgcWitness { coefficients, tangent_values, system, delta, tree })
}

/// Blocks by equal tangent value; tangents with no exceptional representative stay alone.
pub fn induced_system(bt: &BifurcationTree, values: &BTreeMap<(usize, usize), Scalar>) -> BifPartitionSystem {
    let mut groups = BTreeMap::new();
    for x in bt.bifurcation_nodes() {
        let mut by_value: BTreeMap<&Scalar, Vec<usize>> = BTreeMap::new();
        let mut blocks = Vec::new();
        for &c in &bt.nodes[x].children {
            match values.get(&(x, c)) {
                Some(val) => by_value.entry(val).or_default().push(c),
                None => blocks.push(vec![c]),
            }
        }
        blocks.extend(by_value.into_values());
        groups.insert(x, blocks);
    }
    BifPartitionSystem::from_groups(groups)
}

/// Level II (same block implies locally equivalent) or Level III (same block iff locally equivalent),
/// checked on all pairs of forward tangents at every vertex.
pub fn level_filter(system: &BifPartitionSystem, level: u8, sp: &SeriesPresentation, an: &Analysis) -> bool {
    for v in 0..sp.graph.vertex_count() {
        let x = an.pm.vertex_node[v];
        let fw = forward_halves(sp, &an.gd, v);
        for i in 0..fw.len() {
            for j in i + 1..fw.len() {
                let same = system.same_block(x, an.pm.forward[&fw[i]], an.pm.forward[&fw[j]]);
                let equiv = an.gd.local[v].equivalent(&fw[i], &fw[j]);
                let ok = match level {
                    2 => !same || equiv,
                    _ => same == equiv,
                };
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// Level IV: some `(α_p, β_p)`, all `β_p != 0`, makes values constant on every block and
/// distinct across blocks. Systems failing Level III are rejected first.
pub fn level4_membership(system: &BifPartitionSystem, sp: &SeriesPresentation, an: &Analysis) -> bool {
    if !level_filter(system, 3, sp, an) {
        return false;
    }
    let mut sys = igc_system(sp, an);
    let reps = representatives(sp, an);
    let mut forms: Vec<Row> = sys.points.iter().map(|&v| sys.beta(v)).collect();
    for (x, blocks) in &system.blocks {
        let block_reps: Vec<Vec<(usize, Half)>> = blocks
            .iter()
            .map(|b| b.iter().filter_map(|&c| reps.get(&(*x, c)).map(|r| r[0])).collect())
            .collect();
        for br in &block_reps {
            for w in br.windows(2) {
                sys.push(sp, w[0], w[1]);
            }
        }
        for i in 0..block_reps.len() {
            for j in i + 1..block_reps.len() {
                if let (Some(&a), Some(&b)) = (block_reps[i].first(), block_reps[j].first()) {
                    forms.push(sys.difference(sp, a, b));
                }
            }
        }
    }
    let n = sys.ncols();
    let basis = nullspace(&sys.rows, n);
    avoid_hyperplanes(&basis, &forms, n).is_some()
}

/// Full pipeline. The positive case also checks that the induced system is Level IV.
pub fn smoothable(sp: &SeriesPresentation) -> Verdict {
    let an = match analyze(sp) {
        Ok(an) => an,
        Err(v) => return v,
    };
    match igc_feasible(sp, &an) {
        Ok(w) => {
            debug_assert!(level4_membership(&w.system, sp, &an), "induced system must be Level IV");
            Verdict::Smoothable(Box::new(w))
        }
        Err(c) => Verdict::IgcInfeasible(c),
    }
}

/// Number of partition systems passing each level 2, 3, 4.
pub fn level_counts(sp: &SeriesPresentation, an: &Analysis) -> [usize; 3] {
    let mut out = [0; 3];
    for s in crate::bifurcation::enumerate_systems(&an.bt) {
        if level_filter(&s, 2, sp, an) {
            out[0] += 1;
            if level_filter(&s, 3, sp, an) {
                out[1] += 1;
                if level4_membership(&s, sp, an) {
                    out[2] += 1;
                }
            }
        }
    }
    out
}

/// Exceptional points that appear in some equation.
pub fn constrained_points(sys: &IgcSystem) -> BTreeSet<usize> {
    sys.equations.iter().flat_map(|e| [e.left.0, e.right.0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::dot;

    #[test]
    fn lattice_counts() {
        let expect = [(1, [1, 1, 1]), (2, [2, 1, 1]), (3, [5, 1, 1])];
        for (case, counts) in expect {
            let sp = fixtures::lattice(case);
            let an = analyze(&sp).unwrap();
            assert_eq!(level_counts(&sp, &an), counts, "case {case}");
        }
    }

    #[test]
    fn lattice_level4_examples() {
        let sp = fixtures::lattice(2);
        let an = analyze(&sp).unwrap();
        let x = an.bt.root;
        let ch = an.bt.nodes[x].children.clone();
        let two = BifPartitionSystem::from_groups(BTreeMap::from([(x, vec![vec![ch[0], ch[1]], vec![ch[2]]])]));
        assert!(level4_membership(&two, &sp, &an));
        assert!(!level4_membership(&BifPartitionSystem::finest(&an.bt), &sp, &an));
        let sp = fixtures::lattice(3);
        let an = analyze(&sp).unwrap();
        let one = BifPartitionSystem::from_groups(BTreeMap::from([(x, vec![ch.clone()])]));
        assert!(level4_membership(&one, &sp, &an));
        assert!(!level4_membership(&two, &sp, &an));
    }

    #[test]
    fn beta_forcing_names_q() {
        let sp = fixtures::beta_forcing();
        match smoothable(&sp) {
            Verdict::IgcInfeasible(c) => {
                assert_eq!(sp.graph.vertex_name(c.point), "q");
                let an = analyze(&sp).unwrap();
                let sys = igc_system(&sp, &an);
                let n = sys.ncols();
                let combo: Vec<Scalar> = (0..n)
                    .map(|k| {
                        let col: Vec<Scalar> = sys.rows.iter().map(|r| r[k].clone()).collect();
                        dot(&c.multipliers, &col)
                    })
                    .collect();
                assert_eq!(combo, sys.beta(c.point));
            }
            other => panic!("expected IGC_INFEASIBLE, got {}", other.kind()),
        }
    }

    #[test]
    fn pipeline_verdicts() {
        assert_eq!(smoothable(&fixtures::nonsolvable_cycle()).kind(), "NOT_SOLVABLE");
        assert_eq!(smoothable(&fixtures::segment_with_mults(-1, -1)).kind(), "NOT_DIAGRAMMATIC");
        for sp in [fixtures::ebif(), fixtures::lattice(1), fixtures::lattice(2), fixtures::lattice(3)] {
            assert!(smoothable(&sp).is_smoothable());
        }
    }

    #[test]
    fn witness_satisfies_equations() {
        let sp = fixtures::ebif();
        let an = analyze(&sp).unwrap();
        let w = igc_feasible(&sp, &an).unwrap();
        let sys = igc_system(&sp, &an);
        let x: Vec<Scalar> = sys.points.iter().flat_map(|v| [w.coefficients[v].0.clone(), w.coefficients[v].1.clone()]).collect();
        for r in &sys.rows {
            assert!(dot(r, &x).is_zero());
        }
        assert!(w.coefficients.values().all(|(_, b)| !b.is_zero()));
        // y2 sees q1,q2,q3 through both p2 and p3 with equal values: three blocks
        let y2 = an.pm.vertex_node[sp.graph.vertex_id("p2").unwrap()];
        assert_eq!(w.system.blocks[&y2].len(), 3);
    }

    #[test]
    fn single_exceptional_point_is_free() {
        let sp = fixtures::single_edge(2, Scalar::one());
        let an = analyze(&sp).unwrap();
        assert!(igc_system(&sp, &an).rows.is_empty());
        assert!(smoothable(&sp).is_smoothable());
    }

    #[test]
    fn loop_minima() {
        assert!(smoothable(&fixtures::loop_with_minima(&[true])).is_smoothable());
        assert!(!smoothable(&fixtures::loop_with_minima(&[false])).is_smoothable());
        assert!(smoothable(&fixtures::loop_with_minima(&[false, false])).is_smoothable());
        assert!(!smoothable(&fixtures::loop_with_minima(&[true, false])).is_smoothable());
    }
}
