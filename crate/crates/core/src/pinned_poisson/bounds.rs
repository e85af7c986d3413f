//! Poisson-type concentration bounds and the pinned-Poisson tail envelope.

use serde::Serialize;

use super::{log_sum_exp, mlsi::default_m_max, mlsi_machinery, LnFactorial};
use crate::error::{Error, Result};

fn check_lr(lambda: f64, r: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::DomainError(format!("lambda must be positive, got {lambda}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::DomainError(format!("R must be non-negative, got {r}")));
    }
    Ok(())
}

/// ln of exp(R − (R + 2λ) ln(1 + R/(2λ))).
pub fn herbst_log_bound(lambda: f64, r: f64) -> Result<f64> {
    check_lr(lambda, r)?;
    Ok(r - (r + 2.0 * lambda) * (r / (2.0 * lambda)).ln_1p())
}

pub fn herbst_bound(lambda: f64, r: f64) -> Result<f64> {
    herbst_log_bound(lambda, r).map(f64::exp)
}

/// ln of exp(−(R/4) ln(1 + R/(2λ))).
pub fn bobkov_log_bound(lambda: f64, r: f64) -> Result<f64> {
    check_lr(lambda, r)?;
    Ok(-(r / 4.0) * (r / (2.0 * lambda)).ln_1p())
}

/// Sharp Poisson deviation bound, ln of exp(−R(ln(1+R/λ) − 1) − λ ln(1+R/λ)).
pub fn chernoff_log_bound(lambda: f64, r: f64) -> Result<f64> {
    check_lr(lambda, r)?;
    let l = (r / lambda).ln_1p();
    Ok(-r * (l - 1.0) - lambda * l)
}

fn poisson_log_pmf(lf: &mut LnFactorial, lambda: f64, n: usize) -> f64 {
    -lambda + n as f64 * lambda.ln() - lf.get(n)
}

/// ln P(N ≥ threshold) for N ~ Poisson(λ), summed in log space.
pub fn poisson_log_tail(lambda: f64, threshold: f64) -> Result<f64> {
    check_lr(lambda, 0.0)?;
    let start = threshold.max(0.0).ceil() as usize;
    let mut lf = LnFactorial::new();
    if start == 0 {
        return Ok(0.0);
    }
    // below the mean the complement is cheaper and just as precise
    if (start as f64) <= lambda {
        let lower = log_sum_exp((0..start).map(|n| poisson_log_pmf(&mut LnFactorial::new(), lambda, n)));
        return Ok((-lower.exp()).ln_1p());
    }
    let first = poisson_log_pmf(&mut lf, lambda, start);
    let mut terms = vec![first];
    let mut n = start + 1;
    loop {
        let t = poisson_log_pmf(&mut lf, lambda, n);
        if t - first < -40.0 {
            break;
        }
        terms.push(t);
        n += 1;
    }
    Ok(log_sum_exp(terms.into_iter()))
}

/// Largest ψ_τ − h_τ over `taus` for N ~ Poisson(λ), where ψ_τ = ln E e^{τf(N)}
/// and h_τ = τ E f + λτγ(τ), γ(τ) = Σ_{k≥1} τ^k/(k·k!).
pub fn psi_vs_h_check(lambda: f64, f: &dyn Fn(usize) -> f64, taus: &[f64]) -> Result<f64> {
    check_lr(lambda, 0.0)?;
    let mut lf = LnFactorial::new();
    let tau_max = taus.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    // (λ e^τ)^n/n! has decayed far past double precision by this n
    let n_max = (4.0 * lambda * tau_max.exp() + 60.0) as usize;
    let lp: Vec<f64> = (0..=n_max).map(|n| poisson_log_pmf(&mut lf, lambda, n)).collect();
    let ef: f64 = lp.iter().enumerate().map(|(n, l)| l.exp() * f(n)).sum();
    let mut worst = f64::NEG_INFINITY;
    for &tau in taus {
        let psi = log_sum_exp(lp.iter().enumerate().map(|(n, l)| l + tau * f(n)));
        let h = tau * ef + lambda * tau * gamma(tau);
        worst = worst.max(psi - h);
    }
    Ok(worst)
}

fn gamma(tau: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        term *= tau / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Tail envelope ρ_Φ(f ≥ E f + R) ≤ (k+1)·herbst(λ_π, (k+1)(R − M)) for 1-Lipschitz f.
#[derive(Debug, Clone, Serialize)]
pub struct T70Envelope {
    pub k: u32,
    pub phi: f64,
    /// M = Φ + Φ^{1/(k+1)}/(k+1); the envelope needs R > M.
    pub shift: f64,
    /// MLSI constant of π_Φ.
    pub lambda_pi: f64,
}

impl T70Envelope {
    pub fn new(k: u32, phi: f64) -> Result<Self> {
        let rep = mlsi_machinery(k, phi, default_m_max(k))?;
        let v = k as f64 + 1.0;
        Ok(T70Envelope {
            k,
            phi,
            shift: phi + phi.powf(1.0 / v) / v,
            lambda_pi: rep.mlsi_constant,
        })
    }

    pub fn log_bound(&self, r: f64) -> Result<f64> {
        if !(r > self.shift) {
            return Err(Error::RNotInRegime {
                r,
                threshold: self.shift,
            });
        }
        let v = self.k as f64 + 1.0;
        Ok(v.ln() + herbst_log_bound(self.lambda_pi, v * (r - self.shift))?)
    }
}

/// ln of the envelope at a single R.
pub fn t70_envelope(k: u32, phi: f64, r: f64) -> Result<f64> {
    T70Envelope::new(k, phi)?.log_bound(r)
}
