//! Modified log-Sobolev constant of π_Φ through the smoothed ratio c̃.

use serde::Serialize;

use super::{log_sum_exp, log_weight, LnFactorial};
use crate::error::{Error, Result};

pub fn default_m_max(k: u32) -> usize {
    40 * (k as usize + 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct MlsiReport {
    pub k: u32,
    pub phi: f64,
    pub m_max: usize,
    /// c(m) = π(m−1)/π(m) for m in 0..=m_max+k+1.
    pub c: Vec<f64>,
    /// Smoothed ratio c̃(m) for m in 0..=m_max.
    pub c_tilde: Vec<f64>,
    /// inf_m c̃(m+1) − c̃(m) on the range.
    pub delta: f64,
    /// min_m c̃(m+k+1) − c̃(m), comparable with `asymptote_v_step`.
    pub delta_v_step: f64,
    /// Φ^{-1/(k+1)} k^{k/(k+1)}.
    pub asymptote_v_step: f64,
    /// ε with ε ≤ π/π̃ ≤ 1/ε on the range.
    pub epsilon: f64,
    /// δ₁^{-1} exp(4/ε₁), computed at Φ = 1.
    pub structural_constant: f64,
    /// Φ^{1/(k+1)} times `structural_constant`.
    pub mlsi_constant: f64,
}

struct Core {
    c: Vec<f64>,
    c_tilde: Vec<f64>,
    delta: f64,
    delta_v_step: f64,
    epsilon: f64,
}

fn core(k: u32, phi: f64, m_max: usize) -> Result<Core> {
    let v = k as usize + 1;
    let log_phi = phi.ln();
    let mut lf = LnFactorial::new();
    // unnormalised ln π(m); normalisation cancels in every ratio below
    let top = m_max + v;
    let mut lw = Vec::with_capacity(top / v + 2);
    for n in 0..=top / v + 1 {
        lw.push(log_weight(&mut lf, k, log_phi, n));
    }
    let log_pi = |m: usize| {
        let (n, a) = (m / v, (m % v) as f64 / v as f64);
        (1.0 - a) * lw[n] + a * lw[n + 1]
    };
    let mut c = vec![0.0; top + 1];
    for (m, cm) in c.iter_mut().enumerate().skip(1) {
        *cm = (log_pi(m - 1) - log_pi(m)).exp();
    }
    let c_at = |m: isize| if m <= 0 { 0.0 } else { c[m as usize] };
    let vf = v as f64;
    let c_tilde: Vec<f64> = (0..=m_max as isize)
        .map(|m| {
            let cm = c_at(m);
            let smooth: f64 = (0..v as isize)
                .map(|i| ((vf - i as f64) / vf) * (c_at(m + i) + c_at(m - i) - 2.0 * cm))
                .sum();
            cm + smooth / vf
        })
        .collect();
    let delta = c_tilde.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if !(delta > 0.0) {
        return Err(Error::RangeTooSmall(format!(
            "smoothed ratio is not increasing on 0..={m_max} (min increment {delta:e})"
        )));
    }
    let delta_v_step = (0..=m_max.saturating_sub(v))
        .map(|m| c_tilde[m + v] - c_tilde[m])
        .fold(f64::INFINITY, f64::min);
    let raw_pi: Vec<f64> = (0..=m_max).map(log_pi).collect();
    let mut acc = 0.0;
    let mut raw_tilde = vec![0.0];
    for ct in &c_tilde[1..] {
        acc -= ct.ln();
        raw_tilde.push(acc);
    }
    let zp = log_sum_exp(raw_pi.iter().copied());
    let zt = log_sum_exp(raw_tilde.iter().copied());
    let worst = raw_pi
        .iter()
        .zip(&raw_tilde)
        .map(|(a, b)| ((a - zp) - (b - zt)).abs())
        .fold(0.0, f64::max);
    Ok(Core {
        c,
        c_tilde,
        delta,
        delta_v_step,
        epsilon: (-worst).exp(),
    })
}

/// Runs the comparison on m ∈ 0..=m_max; needs m_max ≥ 10(k+1).
pub fn mlsi_machinery(k: u32, phi: f64, m_max: usize) -> Result<MlsiReport> {
    if k == 0 {
        return Err(Error::DomainError("k must be at least 1".into()));
    }
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::DomainError(format!("Phi must be positive, got {phi}")));
    }
    let v = k as usize + 1;
    if m_max < 10 * v {
        return Err(Error::RangeTooSmall(format!("m_max = {m_max} is below 10(k+1) = {}", 10 * v)));
    }
    let at = core(k, phi, m_max)?;
    let unit = if phi == 1.0 { None } else { Some(core(k, 1.0, m_max)?) };
    let (d1, e1) = unit.as_ref().map_or((at.delta, at.epsilon), |u| (u.delta, u.epsilon));
    let structural_constant = (4.0 / e1).exp() / d1;
    let kf = k as f64;
    Ok(MlsiReport {
        k,
        phi,
        m_max,
        c: at.c,
        c_tilde: at.c_tilde,
        delta: at.delta,
        delta_v_step: at.delta_v_step,
        asymptote_v_step: phi.powf(-1.0 / vf(v)) * kf.powf(kf / vf(v)),
        epsilon: at.epsilon,
        structural_constant,
        mlsi_constant: phi.powf(1.0 / vf(v)) * structural_constant,
    })
}

fn vf(v: usize) -> f64 {
    v as f64
}
