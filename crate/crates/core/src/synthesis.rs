//! Jump intensities with prescribed closed-walk characteristics, and their
//! constant-speed normalisation through a Perron eigenvector.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::characteristics::JumpIntensity;
use crate::error::{Error, Result};
use crate::graph::{ClosedWalkBasis, DirectedGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PrescriptionDomain {
    LatticeFacesAndEdges,
    TreeBasis,
}

/// Identifies a prescribed closed walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CycleKey {
    /// The 2-cycle on edge `(a, b)`, `a < b`.
    Edge(VertexId, VertexId),
    /// The clockwise lattice face with this lower-left vertex.
    Face(VertexId),
    /// The basis cycle of off-tree edge `(a, b)`, `a < b`.
    Cycle(VertexId, VertexId),
}

impl CycleKey {
    pub fn edge(a: VertexId, b: VertexId) -> Self {
        CycleKey::Edge(a.min(b), a.max(b))
    }

    pub fn cycle(a: VertexId, b: VertexId) -> Self {
        CycleKey::Cycle(a.min(b), a.max(b))
    }
}

#[derive(Debug, Clone)]
pub struct CharacteristicPrescription {
    pub domain: PrescriptionDomain,
    pub values: BTreeMap<CycleKey, f64>,
    pub bounded_above: f64,
}

impl CharacteristicPrescription {
    pub fn new(domain: PrescriptionDomain, bounded_above: f64) -> Self {
        CharacteristicPrescription {
            domain,
            values: BTreeMap::new(),
            bounded_above,
        }
    }

    pub fn insert(&mut self, key: CycleKey, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveRate {
                what: format!("prescribed characteristic {key:?}"),
                value,
            });
        }
        if value > self.bounded_above {
            return Err(Error::DomainError(format!(
                "prescribed characteristic {key:?} = {value} exceeds the bound {}",
                self.bounded_above
            )));
        }
        self.values.insert(key, value);
        Ok(())
    }

    fn get(&self, key: CycleKey) -> Result<f64> {
        self.values
            .get(&key)
            .copied()
            .ok_or_else(|| Error::PrescriptionIncomplete(format!("no value for {key:?}")))
    }

    /// Reads "edge x y value", "face x value" and "cycle x y value" lines.
    pub fn parse(g: &DirectedGraph, text: &str, domain: PrescriptionDomain, bounded_above: f64) -> Result<Self> {
        let mut p = Self::new(domain, bounded_above);
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: format!("{msg}: {line:?}"),
            };
            let value = |s: &str| s.parse::<f64>().map_err(|_| bad("bad value"));
            let key = match (f.first().copied(), f.len()) {
                (Some("edge"), 4) => CycleKey::edge(g.vertex(f[1])?, g.vertex(f[2])?),
                (Some("cycle"), 4) => CycleKey::cycle(g.vertex(f[1])?, g.vertex(f[2])?),
                (Some("face"), 3) => CycleKey::Face(g.vertex(f[1])?),
                _ => return Err(bad("expected edge/face/cycle line")),
            };
            p.insert(key, value(f[f.len() - 1])?)?;
        }
        Ok(p)
    }

    /// Lines in the format read by [`CharacteristicPrescription::parse`].
    pub fn to_text(&self, g: &DirectedGraph) -> String {
        let mut s = String::new();
        for (k, v) in &self.values {
            match *k {
                CycleKey::Edge(a, b) => s.push_str(&format!("edge {} {} {:.16e}\n", g.label(a), g.label(b), v)),
                CycleKey::Cycle(a, b) => s.push_str(&format!("cycle {} {} {:.16e}\n", g.label(a), g.label(b), v)),
                CycleKey::Face(a) => s.push_str(&format!("face {} {:.16e}\n", g.label(a), v)),
            }
        }
        s
    }
}

fn positive(what: String, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonPositiveRate { what, value: v })
    }
}

/// Realises φ on a 𝒯-basis. `free_values` maps a tree arc to its rate; tree edges
/// without an entry get rate 1.0 on their smaller-index arc.
pub fn synth_basis(
    g: &DirectedGraph,
    basis: &ClosedWalkBasis,
    phi: &CharacteristicPrescription,
    free_values: &HashMap<(VertexId, VertexId), f64>,
) -> Result<JumpIntensity> {
    if basis.num_vertices() != g.num_vertices() || basis.two_cycles != g.edges() {
        return Err(Error::BasisMismatch("basis was built for another graph".into()));
    }
    let mut log_rates = vec![f64::NAN; g.num_arcs()];
    let id = |a: VertexId, b: VertexId| g.arc_id(a, b).ok_or_else(|| Error::BasisMismatch(format!("{a} -> {b} is not an arc")));
    for &(a, b) in &basis.two_cycles {
        if !basis.tree.contains_edge(a, b) {
            continue;
        }
        let le = positive(format!("phi of edge {a}-{b}"), phi.get(CycleKey::edge(a, b))?)?.ln();
        let (x, y, v) = match (free_values.get(&(a, b)), free_values.get(&(b, a))) {
            (Some(&v), _) => (a, b, v),
            (None, Some(&v)) => (b, a, v),
            (None, None) => (a, b, 1.0),
        };
        let lv = positive(format!("free value on {x} -> {y}"), v)?.ln();
        log_rates[id(x, y)?] = lv;
        log_rates[id(y, x)?] = le - lv;
    }
    for (&(a, b), c) in basis.off_tree.iter().zip(&basis.chosen) {
        let le = positive(format!("phi of edge {a}-{b}"), phi.get(CycleKey::edge(a, b))?)?.ln();
        let lc = positive(format!("phi of cycle {a}-{b}"), phi.get(CycleKey::cycle(a, b))?)?.ln();
        let vs = c.vertices();
        let (x, y) = (vs[0], vs[1]);
        let mut rest = 0.0;
        for w in vs[1..].windows(2) {
            rest += log_rates[id(w[0], w[1])?];
        }
        let lxy = lc - rest;
        log_rates[id(x, y)?] = lxy;
        log_rates[id(y, x)?] = le - lxy;
    }
    JumpIntensity::from_arc_rates(g, log_rates.into_iter().map(f64::exp).collect())
}

/// Realises φ on every 2-cycle and face of a lattice window.
///
/// Faces of each row are merged left to right into the row strip; strips are then
/// removed bottom to top through their bottom-left edge, which no prescribed face
/// crosses in the opposite direction. What remains is a spanning tree, which takes
/// rate 1.0 on the smaller-index arc of each edge. Rates of the removed edges follow
/// in reverse removal order.
pub fn synth_lattice(g: &DirectedGraph, phi: &CharacteristicPrescription) -> Result<JumpIntensity> {
    let lat = g
        .lattice()
        .ok_or_else(|| Error::DomainError("lattice synthesis needs a lattice window".into()))?;
    let (w, h) = (lat.width, lat.height);
    let v = |x: usize, y: usize| lat.vertex(x, y);
    let log_edge = |a: VertexId, b: VertexId| -> Result<f64> {
        Ok(positive(format!("phi of edge {}-{}", g.label(a), g.label(b)), phi.get(CycleKey::edge(a, b))?)?.ln())
    };
    let log_face = |x: usize, y: usize| -> Result<f64> {
        Ok(positive(format!("phi of face {}", g.label(v(x, y))), phi.get(CycleKey::Face(v(x, y)))?)?.ln())
    };
    let id = |a: VertexId, b: VertexId| g.arc_id(a, b).unwrap_or(usize::MAX);

    let interior_vertical = |x: usize, y: usize| x >= 1 && x + 1 < w && y + 1 < h;
    let peeled = |x: usize, y: usize| x == 0 && y + 1 < h;

    let mut lr = vec![f64::NAN; g.num_arcs()];
    // spanning tree: every edge that is neither merged away nor peeled
    for (a, b) in g.edges() {
        let (ax, ay) = lat.coords(a);
        let (bx, by) = lat.coords(b);
        let removed = if ax == bx { interior_vertical(ax, ay.min(by)) } else { peeled(ax.min(bx), ay) };
        if !removed {
            lr[id(a, b)] = 0.0;
            lr[id(b, a)] = log_edge(a, b)?;
        }
    }
    let sum_arcs = |lr: &[f64], walk: &[VertexId]| -> f64 { walk.windows(2).map(|p| lr[id(p[0], p[1])]).sum() };

    for r in (0..h - 1).rev() {
        // clockwise boundary of the strip between rows r and r+1, ending with (1,r) → (0,r)
        let mut strip = vec![v(0, r)];
        strip.extend((0..w).map(|x| v(x, r + 1)));
        strip.extend((0..w).rev().map(|x| v(x, r)));
        let mut log_psi = 0.0;
        for x in 0..w - 1 {
            log_psi += log_face(x, r)?;
        }
        for x in 1..w - 1 {
            log_psi -= log_edge(v(x, r), v(x, r + 1))?;
        }
        let rest = sum_arcs(&lr, &strip[..strip.len() - 1]);
        let l10 = log_psi - rest;
        lr[id(v(1, r), v(0, r))] = l10;
        lr[id(v(0, r), v(1, r))] = log_edge(v(0, r), v(1, r))? - l10;
    }
    for r in 0..h - 1 {
        for x in (1..w - 1).rev() {
            // face f_x contains the upward arc (x,r) → (x,r+1); the rest of it is known
            let rest = sum_arcs(&lr, &[v(x, r + 1), v(x + 1, r + 1), v(x + 1, r), v(x, r)]);
            let up = log_face(x, r)? - rest;
            lr[id(v(x, r), v(x, r + 1))] = up;
            lr[id(v(x, r + 1), v(x, r))] = log_edge(v(x, r), v(x, r + 1))? - up;
        }
    }
    JumpIntensity::from_arc_rates(g, lr.into_iter().map(f64::exp).collect())
}

/// Perron eigenpair of the rate matrix K.
#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    /// max_z |(K h)(z) − v h(z)|.
    pub residual: f64,
    pub iterations: usize,
}

pub const POWER_ITERATION_CAP: usize = 1_000_000;

/// Gauge-transforms `j` into a constant-speed intensity k(z→z') = j(z→z') h(z')/h(z)
/// with K h = v h.
pub fn normalize_constant_speed(g: &DirectedGraph, j: &JumpIntensity) -> Result<(JumpIntensity, EigenResult)> {
    let n = g.num_vertices();
    let sigma = 0.5 * (0..n).map(|z| j.out_rate(g, z)).fold(0.0, f64::max);
    let apply = |h: &[f64], out: &mut [f64]| {
        for (z, o) in out.iter_mut().enumerate() {
            let start = g.arc_start(z);
            *o = g
                .neighbors(z)
                .iter()
                .enumerate()
                .map(|(i, &w)| j.rate_by_id(start + i) * h[w])
                .sum();
        }
    };
    let mut h = vec![1.0; n];
    let mut kh = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 0..POWER_ITERATION_CAP {
        apply(&h, &mut kh);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for z in 0..n {
            let q = kh[z] / h[z];
            lo = lo.min(q);
            hi = hi.max(q);
        }
        let v = 0.5 * (lo + hi);
        let hmax = h.iter().cloned().fold(0.0, f64::max);
        residual = (0..n).map(|z| (kh[z] - v * h[z]).abs()).fold(0.0, f64::max);
        if hi - lo <= 1e-12 * hi && residual <= 1e-10 * v * hmax {
            let logh: Vec<f64> = h.iter().map(|x| x.ln()).collect();
            let k = j.gauge(g, &logh)?;
            return Ok((
                k,
                EigenResult {
                    eigenvalue: v,
                    eigenvector: h,
                    residual,
                    iterations: it,
                },
            ));
        }
        let mut m = 0.0f64;
        for z in 0..n {
            h[z] = kh[z] + sigma * h[z];
            m = m.max(h[z]);
        }
        h.iter_mut().for_each(|x| *x /= m);
    }
    Err(Error::NoConvergence {
        iterations: POWER_ITERATION_CAP,
        residual,
    })
}
