//! Seeded random instances shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smoothcx::metric_graph::MetricGraph;
use smoothcx::scalar::{PValue, Scalar};
use smoothcx::series_model::{auto_curve, SeriesPresentation};

pub const MAX_F_DEGREE: u32 = 4;

/// A graph skeleton with a target height at every vertex and a slope per edge.
struct Shape {
    rho: Vec<i64>,
    /// (tail, head, |slope|)
    edges: Vec<(usize, usize, u32)>,
}

/// Realizes a shape: edge lengths `|Δρ| / m`, curves with random finite values toward
/// higher neighbours and poles toward lower ones. `None` if some f-degree exceeds the cap.
fn realize(shape: &Shape, values: u32, rng: &mut ChaCha8Rng) -> Option<SeriesPresentation> {
    let n = shape.rho.len();
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let edges = shape.edges.iter().enumerate().map(|(i, &(a, b, m))| {
        let len = Scalar::ratio((shape.rho[a] - shape.rho[b]).abs(), m as i64);
        (format!("e{i}"), names[a].clone(), names[b].clone(), len)
    });
    let g = MetricGraph::new(names.clone(), edges).ok()?;
    let mut curves = Vec::new();
    for v in 0..n {
        let mut marked = Vec::new();
        let mut poles = 0;
        let mut fib: BTreeMap<u32, u32> = BTreeMap::new();
        for &h in g.halves_at(v) {
            let m = shape.edges[h.edge].2;
            if shape.rho[g.far_end(h)] > shape.rho[v] {
                let c = rng.gen_range(0..values);
                *fib.entry(c).or_default() += m;
                marked.push((h, PValue::Finite(Scalar::from_int(c as i64)), m));
            } else {
                poles += m;
                marked.push((h, PValue::Infinity, m));
            }
        }
        let need = poles.max(fib.values().copied().max().unwrap_or(0)).max(1);
        if need > MAX_F_DEGREE {
            return None;
        }
        let degree = if need < MAX_F_DEGREE && rng.gen_bool(0.2) { need + 1 } else { need };
        let genus = u32::from(rng.gen_bool(0.15));
        curves.push(auto_curve(marked, degree, genus));
    }
    SeriesPresentation::new(g, curves, None).ok()
}

fn height(rng: &mut ChaCha8Rng, avoid: &[i64]) -> i64 {
    loop {
        let r = rng.gen_range(0..5);
        if !avoid.contains(&r) {
            return r;
        }
    }
}

fn slope(rng: &mut ChaCha8Rng) -> u32 {
    if rng.gen_bool(0.75) {
        1
    } else {
        2
    }
}

fn oriented(rng: &mut ChaCha8Rng, a: usize, b: usize, m: u32) -> (usize, usize, u32) {
    if rng.gen_bool(0.5) {
        (a, b, m)
    } else {
        (b, a, m)
    }
}

/// A diagrammatic instance on a random tree with at most `max_edges` edges.
pub fn random_tree(seed: u64, max_edges: usize) -> SeriesPresentation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(2..=max_edges + 1);
        let mut rho = vec![height(&mut rng, &[])];
        let mut edges = Vec::new();
        for i in 1..n {
            let p = rng.gen_range(0..i);
            rho.push(height(&mut rng, &[rho[p]]));
            let m = slope(&mut rng);
            edges.push(oriented(&mut rng, p, i, m));
        }
        if let Some(sp) = realize(&Shape { rho, edges }, 3, &mut rng) {
            return sp;
        }
    }
}

/// A solvable instance whose blocks are bridges and 1 to 3 simple cycles.
pub fn random_cactus(seed: u64) -> SeriesPresentation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let cycles = rng.gen_range(1..=3);
        let bridges = rng.gen_range(0..=3);
        let mut parts: Vec<bool> = (0..cycles).map(|_| true).chain((0..bridges).map(|_| false)).collect();
        parts.shuffle(&mut rng);
        let mut rho = vec![height(&mut rng, &[])];
        let mut edges = Vec::new();
        for is_cycle in parts {
            let a = rng.gen_range(0..rho.len());
            if !is_cycle {
                rho.push(height(&mut rng, &[rho[a]]));
                let m = slope(&mut rng);
                edges.push(oriented(&mut rng, a, rho.len() - 1, m));
                continue;
            }
            let len = rng.gen_range(2..=4);
            let mut prev = a;
            for k in 1..len {
                let avoid = if k == len - 1 { vec![rho[prev], rho[a]] } else { vec![rho[prev]] };
                rho.push(height(&mut rng, &avoid));
                let cur = rho.len() - 1;
                let m = slope(&mut rng);
                edges.push(oriented(&mut rng, prev, cur, m));
                prev = cur;
            }
            let m = slope(&mut rng);
            edges.push(oriented(&mut rng, prev, a, m));
        }
        if let Some(sp) = realize(&Shape { rho, edges }, 2, &mut rng) {
            return sp;
        }
    }
}

/// Same presentation with every edge length multiplied by `lambda`.
pub fn scaled(sp: &SeriesPresentation, lambda: &Scalar) -> SeriesPresentation {
    let g = &sp.graph;
    let edges = g.edges().iter().map(|e| {
        (e.name.clone(), g.vertex_name(e.tail).to_string(), g.vertex_name(e.head).to_string(), &e.length * lambda)
    });
    let g2 = MetricGraph::new(g.vertex_names().to_vec(), edges).unwrap();
    SeriesPresentation::new(g2, sp.curves.clone(), sp.declared_genus).unwrap()
}

/// Vertices of a tree that separate it: valence at least two.
pub fn cut_vertices(sp: &SeriesPresentation) -> Vec<usize> {
    (0..sp.graph.vertex_count()).filter(|&v| sp.graph.valence(v) >= 2).collect()
}

