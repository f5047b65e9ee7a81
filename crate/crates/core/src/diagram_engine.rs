//! Global diagram assembly, exactness of the multiplicity 1-form, and its integral ρ.

use std::collections::BTreeSet;

use crate::metric_graph::{End, Half, MetricGraph, Step};
use crate::scalar::Scalar;
use crate::series_model::{LocalDiagram, SeriesPresentation};

/// Per-edge slope of ρ in the tail-to-head direction, plus the local diagrams it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalDiagram {
    pub slopes: Vec<i64>,
    pub local: Vec<LocalDiagram>,
}

impl GlobalDiagram {
    /// Outgoing slope of ρ along a vertex tangent.
    pub fn mult(&self, h: Half) -> i64 {
        match h.end {
            End::Tail => self.slopes[h.edge],
            End::Head => -self.slopes[h.edge],
        }
    }
}

/// The two ends of an edge disagree: continuity needs `tail = -head`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeConflict {
    pub edge: usize,
    pub tail_mult: i64,
    pub head_mult: i64,
}

/// One multiplicity per edge from the endpoint local diagrams.
pub fn assemble(sp: &SeriesPresentation) -> Result<GlobalDiagram, EdgeConflict> {
    let local = sp.local_diagrams();
    let mut slopes = Vec::with_capacity(sp.graph.edge_count());
    for (i, e) in sp.graph.edges().iter().enumerate() {
        let a = local[e.tail].mult[&Half::new(i, End::Tail)];
        let b = local[e.head].mult[&Half::new(i, End::Head)];
        if a != -b {
            return Err(EdgeConflict { edge: i, tail_mult: a, head_mult: b });
        }
        slopes.push(a);
    }
    Ok(GlobalDiagram { slopes, local })
}

/// A cycle on which the 1-form integrates to a nonzero value (oriented so it is positive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleObstruction {
    pub cycle: Vec<Step>,
    pub integral: Scalar,
}

pub fn cycle_integral(g: &MetricGraph, gd: &GlobalDiagram, cycle: &[Step]) -> Scalar {
    cycle
        .iter()
        .map(|st| {
            let w = Scalar::from_int(gd.slopes[st.edge]) * &g.edge(st.edge).length;
            if st.forward {
                w
            } else {
                -w
            }
        })
        .sum()
}

/// Exactness test over a given cycle basis.
pub fn check_solvable_on(g: &MetricGraph, gd: &GlobalDiagram, basis: &[Vec<Step>]) -> Result<(), CycleObstruction> {
    for c in basis {
        let integral = cycle_integral(g, gd, c);
        if integral.is_zero() {
            continue;
        }
        if integral.is_negative() {
            let rev: Vec<Step> = c.iter().rev().map(|s| Step { edge: s.edge, forward: !s.forward }).collect();
            return Err(CycleObstruction { cycle: rev, integral: -integral });
        }
        return Err(CycleObstruction { cycle: c.clone(), integral });
    }
    Ok(())
}

/// Exactness on the fundamental cycles of the edge-id minimal spanning tree.
pub fn check_solvable(g: &MetricGraph, gd: &GlobalDiagram) -> Result<(), CycleObstruction> {
    check_solvable_on(g, gd, &g.cycle_basis())
}

/// ρ normalized to minimum 0; the slope on every edge equals its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoSolution {
    pub values: Vec<Scalar>,
}

impl RhoSolution {
    pub fn at(&self, v: usize) -> &Scalar {
        &self.values[v]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("the global diagram is not solvable (a cycle integrates to {})", .0.integral)]
pub struct NotSolvable(pub CycleObstruction);

pub fn solve_rho(g: &MetricGraph, gd: &GlobalDiagram) -> Result<RhoSolution, NotSolvable> {
    solve_rho_with_tree(g, gd, &g.spanning_tree())
}

/// Integrates along the given spanning tree from vertex 0 and shifts the minimum to 0.
pub fn solve_rho_with_tree(g: &MetricGraph, gd: &GlobalDiagram, in_tree: &[bool]) -> Result<RhoSolution, NotSolvable> {
    check_solvable_on(g, gd, &g.cycle_basis_for(in_tree)).map_err(NotSolvable)?;
    let (parent, depth) = g.tree_parents(in_tree);
    let mut order: Vec<usize> = (0..g.vertex_count()).collect();
    order.sort_by_key(|&v| depth[v]);
    let mut vals = vec![Scalar::zero(); g.vertex_count()];
    for v in order {
        if let Some((e, p)) = parent[v] {
            let ed = g.edge(e);
            let rise = Scalar::from_int(gd.slopes[e]) * &ed.length;
            vals[v] = if ed.tail == p { &vals[p] + &rise } else { &vals[p] - &rise };
        }
    }
    let min = vals.iter().min().cloned().unwrap_or_default();
    for x in &mut vals {
        *x -= &min;
    }
    Ok(RhoSolution { values: vals })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalSet {
    pub exceptional: Vec<bool>,
    pub values: BTreeSet<Scalar>,
}

impl ExceptionalSet {
    pub fn points(&self) -> Vec<usize> {
        (0..self.exceptional.len()).filter(|&v| self.exceptional[v]).collect()
    }

    /// Smallest gap between distinct exceptional values, if there are two.
    pub fn min_gap(&self) -> Option<Scalar> {
        let v: Vec<&Scalar> = self.values.iter().collect();
        v.windows(2).map(|w| w[1] - w[0]).min()
    }
}

/// A vertex is ordinary iff it has valence 2, opposite equal slopes and a rational curve.
pub fn is_ordinary(sp: &SeriesPresentation, gd: &GlobalDiagram, v: usize) -> bool {
    let hs = sp.graph.halves_at(v);
    hs.len() == 2 && gd.mult(hs[0]) == -gd.mult(hs[1]) && sp.curves[v].genus == 0
}

pub fn exceptional_points(sp: &SeriesPresentation, gd: &GlobalDiagram, rho: &RhoSolution) -> ExceptionalSet {
    let exceptional: Vec<bool> = (0..sp.graph.vertex_count()).map(|v| !is_ordinary(sp, gd, v)).collect();
    let values = (0..exceptional.len()).filter(|&v| exceptional[v]).map(|v| rho.values[v].clone()).collect();
    ExceptionalSet { exceptional, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn ebif_assembles_with_unit_multiplicities() {
        let sp = fixtures::ebif();
        let gd = assemble(&sp).unwrap();
        assert!(gd.slopes.iter().all(|&m| m == 1));
    }

    #[test]
    fn both_poles_conflict() {
        let sp = fixtures::segment_with_mults(-1, -1);
        assert_eq!(assemble(&sp), Err(EdgeConflict { edge: 0, tail_mult: -1, head_mult: -1 }));
        let sp = fixtures::segment_with_mults(2, -1);
        assert_eq!(assemble(&sp), Err(EdgeConflict { edge: 0, tail_mult: 2, head_mult: -1 }));
    }

    #[test]
    fn nonsolvable_cycle_integral_is_one() {
        let sp = fixtures::nonsolvable_cycle();
        let gd = assemble(&sp).unwrap();
        let obs = check_solvable(&sp.graph, &gd).unwrap_err();
        assert_eq!(obs.integral, Scalar::one());
        assert_eq!(obs.cycle.len(), 8);
        assert!(solve_rho(&sp.graph, &gd).is_err());
    }

    #[test]
    fn ebif_rho() {
        let sp = fixtures::ebif();
        let gd = assemble(&sp).unwrap();
        let rho = solve_rho(&sp.graph, &gd).unwrap();
        let at = |n: &str| rho.at(sp.graph.vertex_id(n).unwrap()).clone();
        assert_eq!(at("o1"), Scalar::zero());
        assert_eq!(at("o2"), Scalar::zero());
        for p in ["p1", "p2", "p3"] {
            assert_eq!(at(p), Scalar::one());
        }
        for q in ["q1", "q2", "q3"] {
            assert_eq!(at(q), Scalar::from_int(2));
        }
        let ex = exceptional_points(&sp, &gd, &rho);
        assert!(ex.exceptional.iter().all(|&b| b));
    }

    #[test]
    fn single_edge_rho() {
        let sp = fixtures::single_edge(3, Scalar::ratio(1, 2));
        let gd = assemble(&sp).unwrap();
        let rho = solve_rho(&sp.graph, &gd).unwrap();
        assert_eq!(rho.values, vec![Scalar::zero(), Scalar::ratio(3, 2)]);
    }

    #[test]
    fn ordinary_and_genus_one_vertices() {
        let sp = fixtures::path3(0);
        let gd = assemble(&sp).unwrap();
        assert!(is_ordinary(&sp, &gd, 1));
        let sp = fixtures::path3(1);
        let gd = assemble(&sp).unwrap();
        assert!(!is_ordinary(&sp, &gd, 1));
    }
}
