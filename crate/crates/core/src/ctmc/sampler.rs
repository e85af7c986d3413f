//! Exact bridge paths by uniformisation: draw the number of uniformised events given
//! both endpoints, then each state given the backward likelihood of reaching y.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{poisson_weights, Uniformized, EXACT_TOL, LEAK_THRESHOLD};
use crate::characteristics::JumpIntensity;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexId, Walk};

#[derive(Debug, Clone, Serialize)]
pub struct PathSample {
    /// Increasing jump times in (0, 1).
    pub jump_times: Vec<f64>,
    /// States visited; one more than the number of jumps.
    pub states: Vec<VertexId>,
    pub log_weight: f64,
}

impl PathSample {
    pub fn state_at(&self, t: f64) -> VertexId {
        let k = self.jump_times.partition_point(|&s| s <= t);
        self.states[k]
    }

    pub fn walk(&self) -> Walk {
        Walk::from_vertices(self.states.clone())
    }

    pub fn num_jumps(&self) -> usize {
        self.jump_times.len()
    }
}

/// Precomputed backward vectors b_m = Uⁿ e_y and the law of the event count.
pub struct BridgeSampler<'g> {
    u: Uniformized<'g>,
    x: VertexId,
    y: VertexId,
    backward: Vec<Vec<f64>>,
    count_cdf: Vec<f64>,
}

impl<'g> BridgeSampler<'g> {
    pub fn new(g: &'g DirectedGraph, j: &JumpIntensity, x: VertexId, y: VertexId) -> Result<Self> {
        g.check_vertex(x)?;
        g.check_vertex(y)?;
        let u = Uniformized::new(g, j)?;
        let leak = super::leak_from(&u, x);
        if leak > LEAK_THRESHOLD {
            return Err(Error::WindowLeak {
                leak,
                threshold: LEAK_THRESHOLD,
            });
        }
        let (pois, _) = poisson_weights(u.rate(), EXACT_TOL);
        let n = g.num_vertices();
        let mut b = vec![0.0; n];
        b[y] = 1.0;
        let mut backward = vec![b];
        let mut mass: Vec<f64> = vec![pois[0] * backward[0][x]];
        for p in &pois[1..] {
            let mut next = vec![0.0; n];
            u.backward_step(backward.last().expect("non-empty"), &mut next);
            mass.push(p * next[x]);
            backward.push(next);
        }
        let total: f64 = mass.iter().sum();
        if !(total > 0.0) {
            return Err(Error::UnreachableEndpoint {
                from: g.label(x).to_string(),
                to: g.label(y).to_string(),
            });
        }
        let mut acc = 0.0;
        let count_cdf = mass
            .iter()
            .map(|m| {
                acc += m / total;
                acc
            })
            .collect();
        Ok(BridgeSampler {
            u,
            x,
            y,
            backward,
            count_cdf,
        })
    }

    pub fn sample(&self, rng: &mut impl Rng) -> PathSample {
        let g = self.u.graph();
        let draw: f64 = rng.random();
        let n_events = self.count_cdf.partition_point(|&c| c < draw).min(self.count_cdf.len() - 1);
        let mut times: Vec<f64> = (0..n_events).map(|_| rng.random::<f64>()).collect();
        times.sort_by(f64::total_cmp);
        let mut states = vec![self.x];
        let mut jump_times = Vec::new();
        let mut z = self.x;
        for (i, &s) in times.iter().enumerate() {
            let remaining = n_events - i - 1;
            let b = &self.backward[remaining];
            let norm = self.backward[remaining + 1][z];
            let mut r = rng.random::<f64>() * norm;
            let mut next = z;
            let stay = self.u.diag(z) * b[z];
            if r < stay {
                // virtual jump
            } else {
                r -= stay;
                let start = g.arc_start(z);
                let nb = g.neighbors(z);
                next = *nb.last().expect("connected graph");
                for (k, &w) in nb.iter().enumerate() {
                    let p = self.u.off(start + k) * b[w];
                    if r < p {
                        next = w;
                        break;
                    }
                    r -= p;
                }
            }
            if next != z {
                z = next;
                states.push(z);
                jump_times.push(s);
            }
        }
        debug_assert_eq!(z, self.y);
        PathSample {
            jump_times,
            states,
            log_weight: 0.0,
        }
    }
}

/// `n_paths` exact bridge paths x → y. Worker w draws its share from ChaCha8 seeded
/// with `seed ^ w`; output order is worker order, so a fixed (seed, workers) pair is
/// reproducible.
pub fn sample_bridge_paths(
    g: &DirectedGraph,
    j: &JumpIntensity,
    x: VertexId,
    y: VertexId,
    n_paths: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<PathSample>> {
    let sampler = BridgeSampler::new(g, j, x, y)?;
    let workers = workers.max(1);
    let chunks: Vec<Vec<PathSample>> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let share = n_paths / workers + usize::from(w < n_paths % workers);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ w as u64);
            (0..share).map(|_| sampler.sample(&mut rng)).collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}
