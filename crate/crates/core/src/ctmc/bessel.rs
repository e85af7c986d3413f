//! Modified Bessel functions and the Skellam law of the simple walk on ℤ.

use crate::pinned_poisson::{log_sum_exp, LnFactorial};

/// ln I_n(z) = ln Σ_m (z/2)^{2m+n} / (m! (m+n)!), z > 0.
pub fn log_bessel_i(n: u64, z: f64) -> f64 {
    let n = n as usize;
    let lh = (z / 2.0).ln();
    let mut lf = LnFactorial::new();
    let mut terms = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for m in 0.. {
        let t = (2 * m + n) as f64 * lh - lf.get(m) - lf.get(m + n);
        terms.push(t);
        if t < best && t - best < -50.0 {
            break;
        }
        best = best.max(t);
    }
    log_sum_exp(terms.into_iter())
}

/// ln P(X_t = i) for the walk on ℤ jumping ±1 at rate λ each way: e^{−2λt} I_{|i|}(2λt).
pub fn skellam_log_pmf(lambda: f64, t: f64, i: i64) -> f64 {
    if t == 0.0 {
        return if i == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -2.0 * lambda * t + log_bessel_i(i.unsigned_abs(), 2.0 * lambda * t)
}

/// P^{00}(X_t = i) for the same walk pinned at 0 at time 1.
pub fn skellam_bridge_pmf(lambda: f64, t: f64, i: i64) -> f64 {
    (skellam_log_pmf(lambda, t, i) + skellam_log_pmf(lambda, 1.0 - t, -i) - skellam_log_pmf(lambda, 1.0, 0)).exp()
}
