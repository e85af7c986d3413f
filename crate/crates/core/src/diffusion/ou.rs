//! Ornstein–Uhlenbeck bridges dX = −αX dt + dB in closed form.

use serde::Serialize;

use crate::error::{Error, Result};

/// (1 − e^{−x})/x, continuous at 0.
fn f(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x / 2.0 + x * x / 6.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// γ_α(t) = 2α(1 − e^{−2α}) / [(1 − e^{−2αt})(1 − e^{−2α(1−t)})], the inverse variance
/// of the bridge marginal at time t.
pub fn gamma_alpha(alpha: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::DomainError(format!("t must lie in (0, 1), got {t}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::DomainError(format!("alpha must be non-negative, got {alpha}")));
    }
    let a2 = 2.0 * alpha;
    Ok(f(a2) / (t * (1.0 - t) * f(a2 * t) * f(a2 * (1.0 - t))))
}

#[derive(Debug, Clone, Serialize)]
pub struct OuBridgeMoments {
    pub mean: Vec<f64>,
    /// Per-coordinate variance.
    pub variance: f64,
}

/// Completes the square in p_t(x, z) p_{1−t}(z, y).
pub fn ou_bridge_moments(alpha: f64, x: &[f64], y: &[f64], t: f64) -> Result<OuBridgeMoments> {
    gamma_alpha(alpha, t)?;
    if x.len() != y.len() {
        return Err(Error::DomainError("endpoints differ in dimension".into()));
    }
    let s = 1.0 - t;
    let a2 = 2.0 * alpha;
    // variance of the transition at time u is u f(2αu)
    let p_fwd = 1.0 / (t * f(a2 * t));
    let p_bwd = (-a2 * s).exp() / (s * f(a2 * s));
    let precision = p_fwd + p_bwd;
    let cf = (-alpha * t).exp() * p_fwd;
    let cb = (-alpha * s).exp() / (s * f(a2 * s));
    let mean = x.iter().zip(y).map(|(a, b)| (cf * a + cb * b) / precision).collect();
    Ok(OuBridgeMoments {
        mean,
        variance: 1.0 / precision,
    })
}
