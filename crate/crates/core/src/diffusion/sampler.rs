//! Gradient-diffusion bridges by self-normalised importance sampling: Brownian-bridge
//! proposals on a uniform grid, weighted by exp(−∫₀¹ 𝒰(t, X_t) dt) with the trapezoid rule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::field::ReciprocalCharacteristicField;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SamplerOptions {
    /// Number of grid intervals M.
    pub steps: usize,
    pub n_paths: usize,
    pub seed: u64,
    pub workers: usize,
    /// Times to keep, snapped to the nearest grid point; `None` keeps the whole grid.
    pub record: Option<Vec<f64>>,
    /// Box on which the Hessian condition was certified; paths leaving it are counted.
    pub certified_box: Option<Vec<(f64, f64)>>,
}

impl SamplerOptions {
    pub fn new(steps: usize, n_paths: usize, seed: u64) -> Self {
        SamplerOptions {
            steps,
            n_paths,
            seed,
            workers: 1,
            record: None,
            certified_box: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PathEnsemble {
    pub dim: usize,
    pub steps: usize,
    /// Recorded grid times.
    pub times: Vec<f64>,
    /// n_paths × times × dim, row-major.
    pub values: Vec<f64>,
    pub log_weights: Vec<f64>,
    /// Normalised weights.
    pub weights: Vec<f64>,
    pub effective_sample_size: f64,
    /// Fraction of paths that left the certified box, if one was given.
    pub box_leak_fraction: Option<f64>,
    /// Smallest 𝒰 seen on any grid point.
    pub min_script_u: f64,
    /// Coordinate-wise range of all grid points of all paths.
    pub bounding_box: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailEstimate {
    pub prob: f64,
    pub std_error: f64,
    /// Unweighted number of paths in the event.
    pub exceedances: usize,
}

impl PathEnsemble {
    pub fn n_paths(&self) -> usize {
        self.log_weights.len()
    }

    pub fn time_index(&self, t: f64) -> Option<usize> {
        let k = (t * self.steps as f64).round() / self.steps as f64;
        self.times.iter().position(|&s| (s - k).abs() < 1e-12)
    }

    pub fn point(&self, path: usize, ti: usize) -> &[f64] {
        let start = (path * self.times.len() + ti) * self.dim;
        &self.values[start..start + self.dim]
    }

    /// Self-normalised E f(X_t) with its delta-method standard error.
    pub fn estimate(&self, ti: usize, f: impl Fn(&[f64]) -> f64) -> Estimate {
        let vals: Vec<f64> = (0..self.n_paths()).map(|i| f(self.point(i, ti))).collect();
        let value: f64 = vals.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
        let var: f64 = vals.iter().zip(&self.weights).map(|(v, w)| w * w * (v - value).powi(2)).sum();
        Estimate {
            value,
            std_error: var.sqrt(),
        }
    }

    /// Weighted variance of one coordinate.
    pub fn variance(&self, ti: usize, coord: usize) -> Estimate {
        let mean = self.estimate(ti, |z| z[coord]).value;
        self.estimate(ti, |z| (z[coord] - mean).powi(2))
    }

    pub fn tail(&self, ti: usize, f: impl Fn(&[f64]) -> f64, threshold: f64) -> TailEstimate {
        let mut exceedances = 0;
        let est = self.estimate(ti, |z| {
            if f(z) >= threshold {
                1.0
            } else {
                0.0
            }
        });
        for i in 0..self.n_paths() {
            if f(self.point(i, ti)) >= threshold {
                exceedances += 1;
            }
        }
        TailEstimate {
            prob: est.value,
            std_error: est.std_error,
            exceedances,
        }
    }
}

struct Chunk {
    values: Vec<f64>,
    log_weights: Vec<f64>,
    min_u: f64,
    bbox: Vec<(f64, f64)>,
    left_box: usize,
}

pub fn sample_diffusion_bridge(
    field: &ReciprocalCharacteristicField,
    x: &[f64],
    y: &[f64],
    opts: &SamplerOptions,
) -> Result<PathEnsemble> {
    let d = field.potential.dim;
    if x.len() != d || y.len() != d {
        return Err(Error::DomainError(format!("endpoints must have dimension {d}")));
    }
    if opts.steps < 2 || opts.n_paths == 0 {
        return Err(Error::DomainError("need at least 2 steps and 1 path".into()));
    }
    let m = opts.steps;
    let dt = 1.0 / m as f64;
    let keep: Vec<usize> = match &opts.record {
        None => (0..=m).collect(),
        Some(ts) => {
            let mut v: Vec<usize> = ts.iter().map(|t| (t.clamp(0.0, 1.0) * m as f64).round() as usize).collect();
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    let times: Vec<f64> = keep.iter().map(|&k| k as f64 * dt).collect();
    let workers = opts.workers.max(1);
    let u_end = (field.value(0.0, x), field.value(1.0, y));
    let chunks: Vec<Chunk> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let share = opts.n_paths / workers + usize::from(w < opts.n_paths % workers);
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ w as u64);
            let mut c = Chunk {
                values: Vec::with_capacity(share * keep.len() * d),
                log_weights: Vec::with_capacity(share),
                min_u: u_end.0.min(u_end.1),
                bbox: x.iter().zip(y).map(|(a, b)| (a.min(*b), a.max(*b))).collect(),
                left_box: 0,
            };
            let mut z = vec![0.0; d];
            for _ in 0..share {
                z.copy_from_slice(x);
                let mut integral = 0.5 * (u_end.0 + u_end.1);
                let mut ki = 0;
                let mut outside = false;
                if keep.first() == Some(&0) {
                    c.values.extend_from_slice(x);
                    ki = 1;
                }
                for k in 1..=m {
                    let t_prev = (k - 1) as f64 * dt;
                    let t = k as f64 * dt;
                    if k == m {
                        z.copy_from_slice(y);
                    } else {
                        let rem = 1.0 - t_prev;
                        let sd = (dt * (1.0 - t) / rem).sqrt();
                        for i in 0..d {
                            let n: f64 = StandardNormal.sample(&mut rng);
                            z[i] += (y[i] - z[i]) * dt / rem + sd * n;
                        }
                        let u = field.value(t, &z);
                        integral += u;
                        c.min_u = c.min_u.min(u);
                        for (i, b) in c.bbox.iter_mut().enumerate() {
                            b.0 = b.0.min(z[i]);
                            b.1 = b.1.max(z[i]);
                        }
                        if let Some(bx) = &opts.certified_box {
                            outside |= z.iter().zip(bx).any(|(v, (lo, hi))| v < lo || v > hi);
                        }
                    }
                    if ki < keep.len() && keep[ki] == k {
                        c.values.extend_from_slice(&z);
                        ki += 1;
                    }
                }
                c.left_box += usize::from(outside);
                c.log_weights.push(-integral * dt);
            }
            c
        })
        .collect();
    let mut values = Vec::with_capacity(opts.n_paths * keep.len() * d);
    let mut log_weights = Vec::with_capacity(opts.n_paths);
    let mut min_script_u = f64::INFINITY;
    let mut bounding_box = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    let mut left = 0;
    for c in chunks {
        values.extend(c.values);
        log_weights.extend(c.log_weights);
        min_script_u = min_script_u.min(c.min_u);
        for (b, cb) in bounding_box.iter_mut().zip(&c.bbox) {
            b.0 = b.0.min(cb.0);
            b.1 = b.1.max(cb.1);
        }
        left += c.left_box;
    }
    if log_weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::EvaluatorFailure("non-finite path weight".into()));
    }
    let top = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = log_weights.iter().map(|l| (l - top).exp()).collect();
    let s: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|r| r / s).collect();
    let ess = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
    let n = opts.n_paths;
    if ess < 0.01 * n as f64 {
        return Err(Error::DegenerateWeights { ess, n });
    }
    Ok(PathEnsemble {
        dim: d,
        steps: m,
        times,
        values,
        log_weights,
        weights,
        effective_sample_size: ess,
        box_leak_fraction: opts.certified_box.as_ref().map(|_| left as f64 / n as f64),
        min_script_u,
        bounding_box,
    })
}
