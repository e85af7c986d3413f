//! Pinned Poisson laws ρ_Φ(n) ∝ Φⁿ/(n!(kn)!) and their interpolation π_Φ on ℕ.

mod bounds;
mod mlsi;

pub use bounds::{
    bobkov_log_bound, chernoff_log_bound, herbst_bound, herbst_log_bound, poisson_log_tail, psi_vs_h_check,
    t70_envelope, T70Envelope,
};
pub use mlsi::{mlsi_machinery, default_m_max, MlsiReport};

use serde::Serialize;

use crate::error::{Error, Result};

/// `tail_tol` that pushes the support out to the 1e-300 floor.
pub const FULL_SUPPORT_TOL: f64 = 1e-294;

/// Relative weight below which the support is cut, whatever `tail_tol` says.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// ln n! for n ≤ len, grown on demand.
#[derive(Debug, Clone)]
pub(crate) struct LnFactorial(Vec<f64>);

impl LnFactorial {
    pub(crate) fn new() -> Self {
        LnFactorial(vec![0.0])
    }

    pub(crate) fn get(&mut self, n: usize) -> f64 {
        while self.0.len() <= n {
            let m = self.0.len();
            let last = self.0[m - 1];
            self.0.push(last + (m as f64).ln());
        }
        self.0[n]
    }
}

pub(crate) fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// ρ_Φ, the law of the first coordinate of a Poisson vector pinned to kN_k = N₋₁.
#[derive(Debug, Clone, Serialize)]
pub struct PinnedPoisson {
    pub k: u32,
    pub phi: f64,
    /// Probabilities on `0..=support_cut`.
    pub pmf: Vec<f64>,
    log_pmf: Vec<f64>,
    log_norm: f64,
    pub support_cut: usize,
    /// Upper bound on the neglected mass beyond `support_cut`.
    pub norm_error: f64,
}

/// Unnormalised log-weight n ln Φ − ln n! − ln (kn)!.
pub(crate) fn log_weight(lf: &mut LnFactorial, k: u32, log_phi: f64, n: usize) -> f64 {
    n as f64 * log_phi - lf.get(n) - lf.get(k as usize * n)
}

/// Builds ρ_Φ, cutting the support where the relative weight drops below
/// `tail_tol`·1e-6 (never below 1e-300).
pub fn rho(k: u32, phi: f64, tail_tol: f64) -> Result<PinnedPoisson> {
    if k == 0 {
        return Err(Error::DomainError("k must be at least 1".into()));
    }
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::DomainError(format!("Phi must be positive, got {phi}")));
    }
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::DomainError(format!("tail_tol must lie in (0, 1e-6], got {tail_tol}")));
    }
    let log_cut = (tail_tol * 1e-6).max(WEIGHT_FLOOR).ln();
    let log_phi = phi.ln();
    let mut lf = LnFactorial::new();
    let mut lw = vec![log_weight(&mut lf, k, log_phi, 0)];
    let mut best = lw[0];
    let mut n = 1;
    loop {
        let w = log_weight(&mut lf, k, log_phi, n);
        // weights are log-concave, so once past the mode and under the cut they stay under
        if w < best && w - best < log_cut {
            break;
        }
        best = best.max(w);
        lw.push(w);
        n += 1;
    }
    let log_norm = log_sum_exp(lw.iter().copied());
    let log_pmf: Vec<f64> = lw.iter().map(|w| w - log_norm).collect();
    let pmf: Vec<f64> = log_pmf.iter().map(|l| l.exp()).collect();
    let support_cut = pmf.len() - 1;
    let first_out = log_weight(&mut lf, k, log_phi, support_cut + 1) - log_norm;
    let next = log_weight(&mut lf, k, log_phi, support_cut + 2) - log_norm;
    let ratio = (next - first_out).exp();
    let norm_error = first_out.exp() / (1.0 - ratio);
    Ok(PinnedPoisson {
        k,
        phi,
        pmf,
        log_pmf,
        log_norm,
        support_cut,
        norm_error,
    })
}

impl PinnedPoisson {
    /// ln ρ_Φ(n) from the closed form; valid beyond the support too.
    pub fn log_pmf(&self, n: usize) -> f64 {
        if n < self.log_pmf.len() {
            return self.log_pmf[n];
        }
        let mut lf = LnFactorial::new();
        log_weight(&mut lf, self.k, self.phi.ln(), n) - self.log_norm
    }

    pub fn pmf(&self, n: usize) -> f64 {
        self.pmf.get(n).copied().unwrap_or(0.0)
    }

    pub fn expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.pmf.iter().enumerate().map(|(n, p)| p * f(n)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|n| n as f64)
    }

    /// ln ρ_Φ(n ≥ threshold).
    pub fn log_tail(&self, threshold: f64) -> f64 {
        let start = threshold.max(0.0).ceil() as usize;
        if start > self.support_cut {
            return f64::NEG_INFINITY;
        }
        log_sum_exp(self.log_pmf[start..].iter().copied())
    }

    /// n·Π_{i<k}(kn − i), the ratio ρ(n−1)/ρ(n) times Φ.
    pub fn falling(&self, n: usize) -> f64 {
        let kn = (self.k as usize * n) as f64;
        (0..self.k).fold(n as f64, |acc, i| acc * (kn - i as f64))
    }

    /// Largest relative deviation from ρ(n−1)/ρ(n) = n Π(kn−i)/Φ on the support.
    pub fn ratio_residual(&self) -> f64 {
        (1..=self.support_cut)
            .map(|n| {
                let got = (self.log_pmf[n - 1] - self.log_pmf[n]).exp();
                (got / (self.falling(n) / self.phi) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Residuals of the pinned-Poisson duality and of Chen's identity for a reference Poisson law.
#[derive(Debug, Clone, Serialize)]
pub struct DualityResidual {
    /// max_f |Φ E f(n+1) − E f(n) n Π(kn−i)|.
    pub max_residual: f64,
    /// max_f |λ E f(n+1) − E n f(n)| under Poisson(λ = Φ).
    pub chen_residual: f64,
}

pub fn check_duality(dist: &PinnedPoisson, test_fns: &[&dyn Fn(f64) -> f64]) -> DualityResidual {
    let mut max_residual = 0.0f64;
    for f in test_fns {
        let lhs = dist.phi * dist.expectation(|n| f(n as f64 + 1.0));
        let rhs = dist.expectation(|n| f(n as f64) * dist.falling(n));
        max_residual = max_residual.max((lhs - rhs).abs());
    }
    let lambda = dist.phi;
    let mut pois = Vec::new();
    let mut p = (-lambda).exp();
    let mut n = 0usize;
    while p > 1e-300 || (n as f64) < lambda {
        pois.push(p);
        n += 1;
        p *= lambda / n as f64;
    }
    let mut chen_residual = 0.0f64;
    for f in test_fns {
        let lhs: f64 = lambda * pois.iter().enumerate().map(|(n, p)| p * f(n as f64 + 1.0)).sum::<f64>();
        let rhs: f64 = pois.iter().enumerate().map(|(n, p)| p * n as f64 * f(n as f64)).sum();
        chen_residual = chen_residual.max((lhs - rhs).abs());
    }
    DualityResidual {
        max_residual,
        chen_residual,
    }
}

/// π_Φ(m) ∝ ρ_Φ(n(m))^{1−α(m)} ρ_Φ(n(m)+1)^{α(m)}.
#[derive(Debug, Clone, Serialize)]
pub struct InterpolationMeasure {
    pub k: u32,
    pub phi: f64,
    pub pmf: Vec<f64>,
    log_pmf: Vec<f64>,
    /// Z_Φ with ρ_Φ normalised.
    pub z_phi: f64,
}

impl InterpolationMeasure {
    pub fn n_of(&self, m: usize) -> usize {
        m / (self.k as usize + 1)
    }

    pub fn alpha_of(&self, m: usize) -> f64 {
        (m % (self.k as usize + 1)) as f64 / (self.k as f64 + 1.0)
    }

    pub fn log_pmf(&self, m: usize) -> f64 {
        self.log_pmf.get(m).copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn len(&self) -> usize {
        self.pmf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pmf.is_empty()
    }

    pub fn expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.pmf.iter().enumerate().map(|(m, p)| p * f(m)).sum()
    }
}

pub fn pi(k: u32, phi: f64) -> Result<InterpolationMeasure> {
    let r = rho(k, phi, FULL_SUPPORT_TOL)?;
    let v = k as usize + 1;
    let m_len = v * (r.support_cut + 1);
    let raw: Vec<f64> = (0..m_len)
        .map(|m| {
            let (n, a) = (m / v, (m % v) as f64 / v as f64);
            (1.0 - a) * r.log_pmf(n) + a * r.log_pmf(n + 1)
        })
        .collect();
    let log_z = log_sum_exp(raw.iter().copied());
    let z_phi = log_z.exp();
    if z_phi > v as f64 * (1.0 + 1e-12) {
        return Err(Error::DomainError(format!("Z_Phi = {z_phi} exceeds k+1 = {v}")));
    }
    let log_pmf: Vec<f64> = raw.iter().map(|x| x - log_z).collect();
    let pmf = log_pmf.iter().map(|x| x.exp()).collect();
    Ok(InterpolationMeasure {
        k,
        phi,
        pmf,
        log_pmf,
        z_phi,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InterpolationReport {
    /// E_π g − M.
    pub lhs: f64,
    /// E_ρ f.
    pub rhs: f64,
    /// M = Φ + Φ^{1/(k+1)}/(k+1).
    pub shift: f64,
    pub holds: bool,
    /// g is (1/(k+1))-Lipschitz on the computed range.
    pub g_lipschitz: bool,
}

/// Checks E_π g − M ≤ E_ρ f for g(m) = (1−α)f(n) + αf(n+1); `f` is shifted so f(0) = 0.
pub fn lemma_ll_check(k: u32, phi: f64, f: &dyn Fn(usize) -> f64) -> Result<InterpolationReport> {
    let r = rho(k, phi, FULL_SUPPORT_TOL)?;
    let p = pi(k, phi)?;
    let f0 = f(0);
    let fz = |n: usize| f(n) - f0;
    let g = |m: usize| {
        let (n, a) = (p.n_of(m), p.alpha_of(m));
        (1.0 - a) * fz(n) + a * fz(n + 1)
    };
    let shift = phi + phi.powf(1.0 / (k as f64 + 1.0)) / (k as f64 + 1.0);
    let lhs = p.expectation(g) - shift;
    let rhs = r.expectation(fz);
    let step = 1.0 / (k as f64 + 1.0) + 1e-12;
    let g_lipschitz = (0..p.len()).all(|m| (g(m + 1) - g(m)).abs() <= step);
    Ok(InterpolationReport {
        lhs,
        rhs,
        shift,
        holds: lhs <= rhs + 1e-12,
        g_lipschitz,
    })
}
