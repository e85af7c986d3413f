//! Path density of a jump intensity against the simple walk of rate λ.

use serde::Serialize;

use super::PathSample;
use crate::characteristics::JumpIntensity;
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GirsanovWeight {
    /// Σ_i [ln j(arc_i) − ln λ].
    pub jump_term: f64,
    /// ∫₀¹ (λ·deg(X_s) − out_j(X_s)) ds; constant for constant-speed j.
    pub time_term: f64,
}

impl GirsanovWeight {
    pub fn total(&self) -> f64 {
        self.jump_term + self.time_term
    }
}

pub fn girsanov_log_weight(g: &DirectedGraph, path: &PathSample, j: &JumpIntensity, lambda: f64) -> Result<GirsanovWeight> {
    let mut jump_term = 0.0;
    for w in path.states.windows(2) {
        let id = g.arc_id(w[0], w[1]).ok_or_else(|| Error::MissingRate {
            src: g.label(w[0]).to_string(),
            dst: g.label(w[1]).to_string(),
        })?;
        jump_term += j.log_rate_by_id(id) - lambda.ln();
    }
    let mut time_term = 0.0;
    let mut last = 0.0;
    for (k, &z) in path.states.iter().enumerate() {
        let until = path.jump_times.get(k).copied().unwrap_or(1.0);
        time_term += (lambda * g.degree(z) as f64 - j.out_rate(g, z)) * (until - last);
        last = until;
    }
    Ok(GirsanovWeight { jump_term, time_term })
}
