//! Continuous-time random walks on finite graphs and their bridges.
//!
//! Graphs carrying boundary flags are windows into an infinite graph. A boundary
//! vertex z is killed at rate Λ − out(z), Λ the largest total rate, which is the
//! rate at which the walk on the infinite graph leaves the window when all
//! vertices share that speed. The lost mass is reported as the leak.

mod bessel;
mod envelopes;
mod girsanov;
mod sampler;

pub use bessel::{log_bessel_i, skellam_bridge_pmf, skellam_log_pmf};
pub use envelopes::{
    walk_count_log_bound, exact_lattice_tail, exact_tree_tail, lattice_envelope, tree_distance_chain,
    tree_envelope, LatticeTail,
};
pub use girsanov::{girsanov_log_weight, GirsanovWeight};
pub use sampler::{sample_bridge_paths, BridgeSampler, PathSample};

use rayon::prelude::*;
use serde::Serialize;

use crate::characteristics::JumpIntensity;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexId};

/// Largest boundary leak over [0, 1] for a run to count as valid.
pub const LEAK_THRESHOLD: f64 = 1e-9;

/// Poisson truncation used for exact tails; far below any probability of interest.
pub const EXACT_TOL: f64 = 1e-300;

/// Uniformised chain: U = I + Q/Λ, substochastic where the window kills.
#[derive(Debug, Clone)]
pub struct Uniformized<'g> {
    g: &'g DirectedGraph,
    rate: f64,
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl<'g> Uniformized<'g> {
    pub fn new(g: &'g DirectedGraph, j: &JumpIntensity) -> Result<Self> {
        if j.rates().len() != g.num_arcs() {
            return Err(Error::DomainError("intensity does not match the graph".into()));
        }
        let n = g.num_vertices();
        let out: Vec<f64> = (0..n).map(|z| j.out_rate(g, z)).collect();
        let rate = out.iter().cloned().fold(0.0, f64::max);
        let diag = (0..n)
            .map(|z| if g.is_boundary(z) { 0.0 } else { 1.0 - out[z] / rate })
            .collect();
        let off = j.rates().iter().map(|r| r / rate).collect();
        Ok(Uniformized { g, rate, diag, off })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn graph(&self) -> &DirectedGraph {
        self.g
    }

    pub(crate) fn diag(&self, z: VertexId) -> f64 {
        self.diag[z]
    }

    pub(crate) fn off(&self, arc: usize) -> f64 {
        self.off[arc]
    }

    /// out = v U.
    pub fn forward_step(&self, v: &[f64], out: &mut [f64]) {
        for (o, (vz, d)) in out.iter_mut().zip(v.iter().zip(&self.diag)) {
            *o = vz * d;
        }
        for (z, &vz) in v.iter().enumerate() {
            if vz == 0.0 {
                continue;
            }
            let start = self.g.arc_start(z);
            for (i, &w) in self.g.neighbors(z).iter().enumerate() {
                out[w] += vz * self.off[start + i];
            }
        }
    }

    /// out = U u.
    pub fn backward_step(&self, u: &[f64], out: &mut [f64]) {
        for (z, o) in out.iter_mut().enumerate() {
            let start = self.g.arc_start(z);
            *o = self.diag[z] * u[z]
                + self
                    .g
                    .neighbors(z)
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| self.off[start + i] * u[w])
                    .sum::<f64>();
        }
    }

    /// e_x P_t, with the truncation error of the Poisson mixture.
    pub fn forward_row(&self, x: VertexId, t: f64, tol: f64) -> (Vec<f64>, f64) {
        let mut v = vec![0.0; self.g.num_vertices()];
        v[x] = 1.0;
        self.mix(v, t, tol, |s, a, b| s.forward_step(a, b))
    }

    /// P_t e_y, i.e. z ↦ P_t(z, y).
    pub fn backward_column(&self, y: VertexId, t: f64, tol: f64) -> (Vec<f64>, f64) {
        let mut u = vec![0.0; self.g.num_vertices()];
        u[y] = 1.0;
        self.mix(u, t, tol, |s, a, b| s.backward_step(a, b))
    }

    fn mix(&self, mut v: Vec<f64>, t: f64, tol: f64, step: impl Fn(&Self, &[f64], &mut [f64])) -> (Vec<f64>, f64) {
        let (weights, err) = poisson_weights(self.rate * t, tol);
        let mut acc: Vec<f64> = v.iter().map(|x| x * weights[0]).collect();
        let mut next = vec![0.0; v.len()];
        for &w in &weights[1..] {
            step(self, &v, &mut next);
            std::mem::swap(&mut v, &mut next);
            for (a, x) in acc.iter_mut().zip(&v) {
                *a += w * x;
            }
        }
        (acc, err)
    }
}

/// Poisson(μ) probabilities up to the point where the remaining tail is below `tol`,
/// together with a bound on that tail.
pub fn poisson_weights(mu: f64, tol: f64) -> (Vec<f64>, f64) {
    if mu == 0.0 {
        return (vec![1.0], 0.0);
    }
    let mut out = Vec::new();
    let mut log_p = -mu;
    let mut n = 0usize;
    loop {
        out.push(log_p.exp());
        let next = log_p + mu.ln() - ((n + 1) as f64).ln();
        let ratio = mu / (n + 2) as f64;
        if (n + 1) as f64 > mu && ratio < 1.0 {
            let tail = next.exp() / (1.0 - ratio);
            if tail < tol || next < -745.0 {
                return (out, tail);
            }
        }
        log_p = next;
        n += 1;
    }
}

/// Dense P_t for small graphs.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionKernel {
    pub t: f64,
    pub n: usize,
    /// Row-major n × n.
    pub matrix: Vec<f64>,
    pub uniformization_rate: f64,
    pub uniformization_error: f64,
    /// Mass lost through the window boundary, per starting vertex.
    pub leak: Vec<f64>,
}

impl TransitionKernel {
    pub fn get(&self, x: VertexId, y: VertexId) -> f64 {
        self.matrix[x * self.n + y]
    }

    pub fn row(&self, x: VertexId) -> &[f64] {
        &self.matrix[x * self.n..(x + 1) * self.n]
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError(format!("time must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// P_t by uniformisation. Leak is reported per row, never raised here, because rows
/// started on the boundary always leak; callers check the rows they use.
pub fn transition_kernel(g: &DirectedGraph, j: &JumpIntensity, t: f64, tol: f64) -> Result<TransitionKernel> {
    check_time(t)?;
    let u = Uniformized::new(g, j)?;
    let n = g.num_vertices();
    let rows: Vec<(Vec<f64>, f64)> = (0..n).into_par_iter().map(|x| u.forward_row(x, t, tol)).collect();
    let uniformization_error = rows.first().map_or(0.0, |r| r.1);
    let leak = rows.iter().map(|(r, _)| (1.0 - r.iter().sum::<f64>()).max(0.0)).collect();
    let matrix = rows.into_iter().flat_map(|(r, _)| r).collect();
    Ok(TransitionKernel {
        t,
        n,
        matrix,
        uniformization_rate: u.rate(),
        uniformization_error,
        leak,
    })
}

/// Leak of the walk started at `x` over [0, 1].
pub fn leak_from(u: &Uniformized, x: VertexId) -> f64 {
    let (row, _) = u.forward_row(x, 1.0, EXACT_TOL);
    (1.0 - row.iter().sum::<f64>()).max(0.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct BridgeMarginal {
    pub x: VertexId,
    pub y: VertexId,
    pub t: f64,
    pub pmf: Vec<f64>,
    /// P_1(x, y).
    pub p1: f64,
    /// |Σ_z P_t(x,z) P_{1−t}(z,y) / P_1(x,y) − 1|.
    pub chapman_kolmogorov: f64,
    pub leak: f64,
}

impl BridgeMarginal {
    /// ln P(dist(X_t) ≥ r) for r = 0..=max dist.
    pub fn log_tails(&self, dist: &[usize]) -> Vec<f64> {
        let max = dist.iter().copied().max().unwrap_or(0);
        let mut mass = vec![0.0; max + 1];
        for (z, p) in self.pmf.iter().enumerate() {
            mass[dist[z]] += p;
        }
        let mut out = vec![0.0; max + 1];
        let mut acc = 0.0;
        for r in (0..=max).rev() {
            acc += mass[r];
            out[r] = acc.ln();
        }
        out[0] = 0.0;
        out
    }

    pub fn expectation(&self, f: impl Fn(VertexId) -> f64) -> f64 {
        self.pmf.iter().enumerate().map(|(z, p)| p * f(z)).sum()
    }
}

/// P^{xy}(X_t = z) ∝ P_t(x, z) P_{1−t}(z, y).
pub fn bridge_marginal(g: &DirectedGraph, j: &JumpIntensity, x: VertexId, y: VertexId, t: f64) -> Result<BridgeMarginal> {
    bridge_marginal_with_leak(g, j, x, y, t, LEAK_THRESHOLD)
}

/// As [`bridge_marginal`] with a caller-chosen leak threshold.
pub fn bridge_marginal_with_leak(
    g: &DirectedGraph,
    j: &JumpIntensity,
    x: VertexId,
    y: VertexId,
    t: f64,
    leak_threshold: f64,
) -> Result<BridgeMarginal> {
    check_time(t)?;
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    let u = Uniformized::new(g, j)?;
    let (full, _) = u.forward_row(x, 1.0, EXACT_TOL);
    let leak = (1.0 - full.iter().sum::<f64>()).max(0.0);
    if leak > leak_threshold {
        return Err(Error::WindowLeak {
            leak,
            threshold: leak_threshold,
        });
    }
    let p1 = full[y];
    if !(p1 > 0.0) {
        return Err(Error::UnreachableEndpoint {
            from: g.label(x).to_string(),
            to: g.label(y).to_string(),
        });
    }
    let (fwd, _) = u.forward_row(x, t, EXACT_TOL);
    let (bwd, _) = u.backward_column(y, 1.0 - t, EXACT_TOL);
    let mut pmf: Vec<f64> = fwd.iter().zip(&bwd).map(|(a, b)| a * b).collect();
    let s: f64 = pmf.iter().sum();
    pmf.iter_mut().for_each(|p| *p /= s);
    Ok(BridgeMarginal {
        x,
        y,
        t,
        pmf,
        p1,
        chapman_kolmogorov: (s / p1 - 1.0).abs(),
        leak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, lattice_window, line_window};

    #[test]
    fn two_state_closed_form() {
        let g = build_graph(&[("a", "b"), ("b", "a")]).unwrap();
        let (p, q) = (0.7, 1.9);
        let j = JumpIntensity::from_fn(&g, |a, _| if a == 0 { p } else { q }).unwrap();
        for t in [0.1, 0.5, 1.0] {
            let k = transition_kernel(&g, &j, t, 1e-16).unwrap();
            let e = (-(p + q) * t).exp();
            assert!((k.get(0, 1) - p / (p + q) * (1.0 - e)).abs() < 1e-14);
            assert!((k.get(1, 0) - q / (p + q) * (1.0 - e)).abs() < 1e-14);
            assert!(k.leak.iter().all(|&l| l < 1e-14));
        }
    }

    #[test]
    fn small_time_is_generator() {
        let g = lattice_window(3, 3).unwrap().into_finite();
        let j = JumpIntensity::from_fn(&g, |a, b| 1.0 + 0.1 * (a + 2 * b) as f64).unwrap();
        let t = 1e-6;
        let k = transition_kernel(&g, &j, t, 1e-18).unwrap();
        for (a, b) in g.arcs() {
            let r = j.rate(&g, a, b).unwrap();
            assert!((k.get(a, b) / (t * r) - 1.0).abs() < 1e-5);
        }
        assert!((k.get(4, 4) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn chapman_kolmogorov() {
        let g = lattice_window(4, 3).unwrap().into_finite();
        let j = JumpIntensity::from_fn(&g, |a, b| 0.5 + ((a * 7 + b * 3) % 5) as f64 * 0.3).unwrap();
        let (s, t) = (0.3, 0.45);
        let ks = transition_kernel(&g, &j, s, 1e-16).unwrap();
        let kt = transition_kernel(&g, &j, t, 1e-16).unwrap();
        let kst = transition_kernel(&g, &j, s + t, 1e-16).unwrap();
        let n = g.num_vertices();
        for x in 0..n {
            for y in 0..n {
                let c: f64 = (0..n).map(|z| ks.get(x, z) * kt.get(z, y)).sum();
                assert!((c - kst.get(x, y)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn skellam_on_line() {
        let g = line_window(-30, 30).unwrap();
        let j = JumpIntensity::constant(&g, 1.0).unwrap();
        let k = transition_kernel(&g, &j, 0.8, EXACT_TOL).unwrap();
        let x = g.vertex("0").unwrap();
        assert!(k.leak[x] < 1e-20);
        for i in -10i64..=10 {
            let y = g.vertex(&i.to_string()).unwrap();
            let want = skellam_log_pmf(1.0, 0.8, i).exp();
            assert!((k.get(x, y) / want - 1.0).abs() < 1e-11, "{i}");
        }
        assert!(k.leak[0] > 0.1);
    }

    #[test]
    fn bridge_endpoints_and_symmetry() {
        let g = line_window(-25, 25).unwrap();
        let j = JumpIntensity::constant(&g, 1.0).unwrap();
        let x = g.vertex("0").unwrap();
        let b0 = bridge_marginal(&g, &j, x, x, 0.0).unwrap();
        assert!((b0.pmf[x] - 1.0).abs() < 1e-15);
        let b1 = bridge_marginal(&g, &j, x, x, 1.0).unwrap();
        assert!((b1.pmf[x] - 1.0).abs() < 1e-15);
        let a = bridge_marginal(&g, &j, x, x, 0.3).unwrap();
        let b = bridge_marginal(&g, &j, x, x, 0.7).unwrap();
        let tv: f64 = a.pmf.iter().zip(&b.pmf).map(|(p, q)| (p - q).abs()).sum::<f64>() / 2.0;
        assert!(tv < 1e-13);
        assert!(a.chapman_kolmogorov < 1e-12);
        let want = skellam_bridge_pmf(1.0, 0.5, 0);
        let half = bridge_marginal(&g, &j, x, x, 0.5).unwrap();
        assert!((half.pmf[x] - want).abs() < 1e-12);
    }

    #[test]
    fn leak_is_detected() {
        let g = line_window(-3, 3).unwrap();
        let j = JumpIntensity::constant(&g, 1.0).unwrap();
        let x = g.vertex("0").unwrap();
        assert!(matches!(bridge_marginal(&g, &j, x, x, 0.5), Err(Error::WindowLeak { .. })));
    }
}
