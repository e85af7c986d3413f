//! Tail envelopes for constant-speed bridges and the exact simple-walk tails they bound.

use serde::Serialize;

use super::{bridge_marginal, leak_from, Uniformized, LEAK_THRESHOLD};
use crate::characteristics::JumpIntensity;
use crate::error::{Error, Result};
use crate::graph::{line_window, DirectedGraph};
use crate::pinned_poisson::LnFactorial;

/// −2R ln R + [ln(4λ²t(1−t)) + 2] R.
pub fn lattice_envelope(lambda: f64, t: f64, r: f64) -> f64 {
    -2.0 * r * r.ln() + ((4.0 * lambda * lambda * t * (1.0 - t)).ln() + 2.0) * r
}

/// −2R ln R + [2 + ln(λ²t(1−t)) + 3 ln(Δ−1)] R.
pub fn tree_envelope(lambda: f64, degree: usize, t: f64, r: f64) -> f64 {
    let d1 = (degree as f64 - 1.0).ln();
    -2.0 * r * r.ln() + (2.0 + (lambda * lambda * t * (1.0 - t)).ln() + 3.0 * d1) * r
}

/// ln[(λ²t(1−t))^R (Δ−1)^{3R} / R!²], the counting estimate before Stirling.
pub fn walk_count_log_bound(lambda: f64, degree: usize, t: f64, r: usize) -> f64 {
    let mut lf = LnFactorial::new();
    let rf = r as f64;
    rf * (lambda * lambda * t * (1.0 - t)).ln() + 3.0 * rf * (degree as f64 - 1.0).ln() - 2.0 * lf.get(r)
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeTail {
    /// (R, ln P^{00}(|X_t|₁ ≥ R)) for R = 0..=R_max.
    pub tail: Vec<(usize, f64)>,
    /// Bridge mean of one coordinate; zero by symmetry.
    pub mean: f64,
    pub leak: f64,
    pub window_radius: usize,
}

fn window_radius(r_max: usize, speed: f64) -> usize {
    r_max + (6.0 * speed).ceil() as usize + 10
}

/// Exact tail of the simple-walk bridge 0 → 0 on ℤ² (rate λ per arc), assembled from two
/// independent one-dimensional bridges on a line window.
pub fn exact_lattice_tail(lambda: f64, t: f64, r_max: usize) -> Result<LatticeTail> {
    let w = window_radius(r_max, 2.0 * lambda) as i64;
    let g = line_window(-w, w)?;
    let j = JumpIntensity::constant(&g, lambda)?;
    let x = g.vertex("0")?;
    let b = bridge_marginal(&g, &j, x, x, t)?;
    // mass of |X¹_t| = r
    let mut abs_mass = vec![0.0; w as usize + 1];
    let mut mean = 0.0;
    for (z, p) in b.pmf.iter().enumerate() {
        let i: i64 = g.label(z).parse().expect("line labels are integers");
        abs_mass[i.unsigned_abs() as usize] += p;
        mean += i as f64 * p;
    }
    let max = 2 * w as usize;
    let mut dist = vec![0.0; max + 1];
    for (r1, a) in abs_mass.iter().enumerate() {
        for (r2, c) in abs_mass.iter().enumerate() {
            dist[r1 + r2] += a * c;
        }
    }
    let mut acc = 0.0;
    let mut tails = vec![0.0; max + 1];
    for r in (0..=max).rev() {
        acc += dist[r];
        tails[r] = acc;
    }
    let tail = (0..=r_max)
        .map(|r| (r, if r == 0 { 0.0 } else { tails[r].ln() }))
        .collect();
    Ok(LatticeTail {
        tail,
        mean,
        leak: b.leak,
        window_radius: w as usize,
    })
}

/// Distance from the root of the simple walk on the Δ-regular tree, as a walk on
/// {0, ..., radius}: up at rate (Δ−1)λ (Δλ from the root), down at rate λ.
pub fn tree_distance_chain(degree: usize, lambda: f64, radius: usize) -> Result<(DirectedGraph, JumpIntensity)> {
    if degree < 2 {
        return Err(Error::DomainError(format!("degree must be at least 2, got {degree}")));
    }
    let g = line_window(0, radius as i64)?;
    let d = degree as f64;
    let j = JumpIntensity::from_fn(&g, |a, b| {
        if b < a {
            lambda
        } else if a == 0 {
            d * lambda
        } else {
            (d - 1.0) * lambda
        }
    })?;
    Ok((g, j))
}

/// Exact (R, ln P^{oo}(d(X_t, o) ≥ R)) for the simple-walk bridge at the root o of the Δ-regular tree.
pub fn exact_tree_tail(lambda: f64, degree: usize, t: f64, r_max: usize) -> Result<Vec<(usize, f64)>> {
    let radius = window_radius(r_max, degree as f64 * lambda);
    let (g, j) = tree_distance_chain(degree, lambda, radius)?;
    let leak = leak_from(&Uniformized::new(&g, &j)?, 0);
    if leak > LEAK_THRESHOLD {
        return Err(Error::WindowLeak {
            leak,
            threshold: LEAK_THRESHOLD,
        });
    }
    let b = bridge_marginal(&g, &j, 0, 0, t)?;
    let dist: Vec<usize> = (0..g.num_vertices()).collect();
    let tails = b.log_tails(&dist);
    Ok((0..=r_max).map(|r| (r, tails[r])).collect())
}
