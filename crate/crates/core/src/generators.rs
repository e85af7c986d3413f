//! Random instances that satisfy the lattice or tree conditions by construction.

use std::collections::HashMap;

use rand::Rng;

use crate::error::Result;
use crate::graph::{build_graph, spanning_tree, t_basis, ClosedWalkBasis, Direction, DirectedGraph, OrientationRule};
use crate::synthesis::{CharacteristicPrescription, CycleKey, PrescriptionDomain};

/// Edge and face values on a lattice window with φ(e) ≤ λ² and every face between
/// its lower and upper edge products.
///
/// φ(e_{x,i}) = λ² exp(−a) with a = c(W + H − x₁ − x₂ + U), so φ grows toward the
/// upper-right corner and each face interval is non-empty.
pub fn lattice_prescription<R: Rng>(g: &DirectedGraph, lambda: f64, c: f64, rng: &mut R) -> CharacteristicPrescription {
    let lat = g.lattice().expect("lattice window");
    let (w, h) = (lat.width as f64, lat.height as f64);
    let mut p = CharacteristicPrescription::new(PrescriptionDomain::LatticeFacesAndEdges, f64::INFINITY);
    let mut log_edge = HashMap::new();
    let log_l2 = 2.0 * lambda.ln();
    for ((x, y), d) in lat.two_cycles() {
        let a = c * (w + h - x as f64 - y as f64 + rng.random::<f64>());
        log_edge.insert(((x, y), d), log_l2 - a);
        let (nx, ny) = match d {
            Direction::Horizontal => (x + 1, y),
            Direction::Vertical => (x, y + 1),
        };
        p.insert(CycleKey::edge(lat.vertex(x, y), lat.vertex(nx, ny)), (log_l2 - a).exp())
            .expect("positive");
    }
    for (x, y) in lat.faces() {
        let lo = log_edge[&((x, y), Direction::Vertical)] + log_edge[&((x, y), Direction::Horizontal)];
        let hi = log_edge[&((x + 1, y), Direction::Vertical)] + log_edge[&((x, y + 1), Direction::Horizontal)];
        let v = lo + (hi - lo) * rng.random::<f64>();
        p.insert(CycleKey::Face(lat.vertex(x, y)), v.exp()).expect("positive");
    }
    p
}

/// Connected symmetric graph on `n` vertices: a random tree plus `extra` chords.
pub fn random_graph<R: Rng>(n: usize, extra: usize, rng: &mut R) -> Result<DirectedGraph> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    let mut tries = 0;
    let mut added = 0;
    while added < extra && tries < 50 * extra {
        tries += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let e = (a.min(b), a.max(b));
        if a != b && !edges.contains(&e) {
            edges.push(e);
            added += 1;
        }
    }
    let arcs: Vec<(String, String)> = edges
        .iter()
        .flat_map(|&(a, b)| [(a.to_string(), b.to_string()), (b.to_string(), a.to_string())])
        .collect();
    build_graph(&arcs)
}

/// A basis rooted at vertex 0 and values with φ(e) ≤ s² on every edge and each basis
/// cycle inside its window, where s = λ/Δ.
pub fn basis_prescription<R: Rng>(
    g: &DirectedGraph,
    lambda: f64,
    rng: &mut R,
) -> Result<(ClosedWalkBasis, CharacteristicPrescription)> {
    let tree = spanning_tree(g, 0)?;
    let basis = t_basis(g, &tree, OrientationRule::LexSmaller)?;
    let log_s = (lambda / g.max_out_degree() as f64).ln();
    let mut p = CharacteristicPrescription::new(PrescriptionDomain::TreeBasis, f64::INFINITY);
    let mut log_edge = HashMap::new();
    for &(a, b) in &basis.two_cycles {
        if tree.contains_edge(a, b) {
            let v = 2.0 * log_s - 1.5 * rng.random::<f64>();
            log_edge.insert((a, b), v);
            p.insert(CycleKey::edge(a, b), v.exp())?;
        }
    }
    for (&(a, b), c) in basis.off_tree.iter().zip(&basis.chosen) {
        let l = c.len() as f64;
        // every other edge of c_e lies on the tree
        let prod: f64 = c
            .arcs()
            .map(|(x, y)| (x.min(y), x.max(y)))
            .filter(|&e| e != (a, b))
            .map(|e| log_edge[&e])
            .sum();
        let le = (2.0 * log_s).min(2.0 * (l - 1.0) * log_s + prod) - rng.random::<f64>();
        let lo = (1.0 - l) * log_s + le;
        let hi = (l - 1.0) * log_s + prod;
        let lc = lo + (hi - lo) * rng.random::<f64>();
        p.insert(CycleKey::edge(a, b), le.exp())?;
        p.insert(CycleKey::cycle(a, b), lc.exp())?;
    }
    Ok((basis, p))
}

/// Raises one 2-cycle to `factor` times the bound it must stay under.
pub fn inject_edge_violation(p: &mut CharacteristicPrescription, key: CycleKey, bound: f64, factor: f64) {
    p.values.insert(key, factor * bound);
}
