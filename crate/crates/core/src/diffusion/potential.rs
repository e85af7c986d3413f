//! Potentials U(t, z) for gradient diffusions dX = −∇U dt + dB, with a small registry.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DerivativeSource {
    Analytic,
    /// Central differences with inner step `h`.
    FiniteDifference { h: f64 },
}

/// 𝒰, ∇𝒰 and Hess 𝒰 at one point; `hess` is row-major d × d.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldValue {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

type ScalarFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;
type FieldFn = Arc<dyn Fn(f64, &[f64]) -> FieldValue + Send + Sync>;

#[derive(Clone)]
pub struct GradientPotential {
    pub name: String,
    pub dim: usize,
    pub source: DerivativeSource,
    pub time_homogeneous: bool,
    u: ScalarFn,
    grad: Option<VectorFn>,
    laplacian: Option<ScalarFn>,
    dt: Option<ScalarFn>,
    field: Option<FieldFn>,
}

impl fmt::Debug for GradientPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradientPotential")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("source", &self.source)
            .finish()
    }
}

fn norm2(z: &[f64]) -> f64 {
    z.iter().map(|x| x * x).sum()
}

fn diag_hess(d: usize, entries: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut h = vec![0.0; d * d];
    for i in 0..d {
        h[i * d + i] = entries(i);
    }
    h
}

impl GradientPotential {
    /// Only U is given; every derivative comes from central differences with step `h`.
    pub fn custom(name: &str, dim: usize, h: f64, time_homogeneous: bool, u: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        GradientPotential {
            name: name.to_string(),
            dim,
            source: DerivativeSource::FiniteDifference { h },
            time_homogeneous,
            u: Arc::new(u),
            grad: None,
            laplacian: None,
            dt: None,
            field: None,
        }
    }

    /// U ≡ 0, Brownian motion.
    pub fn zero(dim: usize) -> Self {
        GradientPotential {
            name: "zero".into(),
            dim,
            source: DerivativeSource::Analytic,
            time_homogeneous: true,
            u: Arc::new(|_, _| 0.0),
            grad: Some(Arc::new(move |_, z| vec![0.0; z.len()])),
            laplacian: Some(Arc::new(|_, _| 0.0)),
            dt: Some(Arc::new(|_, _| 0.0)),
            field: Some(Arc::new(move |_, z| FieldValue {
                value: 0.0,
                grad: vec![0.0; z.len()],
                hess: vec![0.0; z.len() * z.len()],
            })),
        }
    }

    /// U = α‖z‖²/2, so 𝒰 = α²‖z‖²/2 − dα/2.
    pub fn ou(alpha: f64, dim: usize) -> Self {
        Self::ou_plus_logcosh(alpha, 0.0, dim).renamed("ou")
    }

    /// U = α‖z‖²/2 + ε log cosh(z₁).
    pub fn ou_plus_logcosh(alpha: f64, eps: f64, dim: usize) -> Self {
        let d = dim as f64;
        GradientPotential {
            name: "ou-plus-logcosh".into(),
            dim,
            source: DerivativeSource::Analytic,
            time_homogeneous: true,
            u: Arc::new(move |_, z| alpha * norm2(z) / 2.0 + eps * log_cosh(z[0])),
            grad: Some(Arc::new(move |_, z| {
                let mut g: Vec<f64> = z.iter().map(|x| alpha * x).collect();
                g[0] += eps * z[0].tanh();
                g
            })),
            laplacian: Some(Arc::new(move |_, z| d * alpha + eps * sech2(z[0]))),
            dt: Some(Arc::new(|_, _| 0.0)),
            field: Some(Arc::new(move |_, z| {
                let (g, g1, g2) = logcosh_profile(alpha, eps, z[0]);
                let mut grad: Vec<f64> = z.iter().map(|x| alpha * alpha * x).collect();
                grad[0] += g1;
                let mut hess = diag_hess(z.len(), |_| alpha * alpha);
                hess[0] += g2;
                FieldValue {
                    value: alpha * alpha * norm2(z) / 2.0 - d * alpha / 2.0 + g,
                    grad,
                    hess,
                }
            })),
        }
    }

    /// U = a Σ_i (z_i² − 1)², a double well in each coordinate.
    pub fn quartic(a: f64, dim: usize) -> Self {
        // derivatives of a(z²−1)² in one variable
        let d = move |x: f64| {
            let u1 = 4.0 * a * x * (x * x - 1.0);
            let u2 = a * (12.0 * x * x - 4.0);
            let u3 = 24.0 * a * x;
            let u4 = 24.0 * a;
            (u1, u2, u3, u4)
        };
        GradientPotential {
            name: "quartic".into(),
            dim,
            source: DerivativeSource::Analytic,
            time_homogeneous: true,
            u: Arc::new(move |_, z| z.iter().map(|x| a * (x * x - 1.0).powi(2)).sum()),
            grad: Some(Arc::new(move |_, z| z.iter().map(|&x| d(x).0).collect())),
            laplacian: Some(Arc::new(move |_, z| z.iter().map(|&x| d(x).1).sum())),
            dt: Some(Arc::new(|_, _| 0.0)),
            field: Some(Arc::new(move |_, z| {
                let mut value = 0.0;
                let mut grad = Vec::with_capacity(z.len());
                let mut h = Vec::with_capacity(z.len());
                for &x in z {
                    let (u1, u2, u3, u4) = d(x);
                    value += 0.5 * u1 * u1 - 0.5 * u2;
                    grad.push(u1 * u2 - 0.5 * u3);
                    h.push(u2 * u2 + u1 * u3 - 0.5 * u4);
                }
                FieldValue {
                    value,
                    grad,
                    hess: diag_hess(z.len(), |i| h[i]),
                }
            })),
        }
    }

    /// Registry lookup for the command line.
    pub fn from_name(name: &str, alpha: f64, eps: f64, a: f64, dim: usize) -> Result<Self> {
        match name {
            "zero" => Ok(Self::zero(dim)),
            "ou" => Ok(Self::ou(alpha, dim)),
            "ou-plus-logcosh" => Ok(Self::ou_plus_logcosh(alpha, eps, dim)),
            "quartic" => Ok(Self::quartic(a, dim)),
            other => Err(Error::DomainError(format!(
                "unknown potential {other}; expected zero, ou, ou-plus-logcosh or quartic"
            ))),
        }
    }

    fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Same potential with the analytic derivatives dropped.
    pub fn finite_difference(&self, h: f64) -> Self {
        let mut p = Self::custom(&self.name, self.dim, h, self.time_homogeneous, |_, _| 0.0);
        p.u = self.u.clone();
        p
    }

    pub fn u(&self, t: f64, z: &[f64]) -> f64 {
        (self.u)(t, z)
    }

    fn step(&self) -> f64 {
        match self.source {
            DerivativeSource::Analytic => 1e-3,
            DerivativeSource::FiniteDifference { h } => h,
        }
    }

    pub fn grad(&self, t: f64, z: &[f64]) -> Vec<f64> {
        match &self.grad {
            Some(g) => g(t, z),
            None => fd_grad(&|z: &[f64]| self.u(t, z), z, self.step()),
        }
    }

    pub fn grad_fd(&self, t: f64, z: &[f64], h: f64) -> Vec<f64> {
        fd_grad(&|z: &[f64]| self.u(t, z), z, h)
    }

    pub fn laplacian(&self, t: f64, z: &[f64]) -> f64 {
        match &self.laplacian {
            Some(l) => l(t, z),
            None => {
                let h = self.step();
                let u0 = self.u(t, z);
                let mut w = z.to_vec();
                (0..z.len())
                    .map(|i| {
                        w[i] = z[i] + h;
                        let up = self.u(t, &w);
                        w[i] = z[i] - h;
                        let dn = self.u(t, &w);
                        w[i] = z[i];
                        (up - 2.0 * u0 + dn) / (h * h)
                    })
                    .sum()
            }
        }
    }

    pub fn dt(&self, t: f64, z: &[f64]) -> f64 {
        match &self.dt {
            Some(d) => d(t, z),
            None if self.time_homogeneous => 0.0,
            None => {
                let h = self.step();
                (self.u(t + h, z) - self.u(t - h, z)) / (2.0 * h)
            }
        }
    }

    pub(crate) fn analytic_field(&self) -> Option<&FieldFn> {
        self.field.as_ref()
    }

    /// Compares the analytic gradient with central differences on random probe points
    /// in [−2, 2]^d; returns the worst relative error.
    pub fn check_derivatives(&self, probes: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..probes {
            let t: f64 = rng.random_range(0.05..0.95);
            let z: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-2.0..2.0)).collect();
            let an = self.grad(t, &z);
            let fd = self.grad_fd(t, &z, 1e-5);
            for (a, b) in an.iter().zip(&fd) {
                let err = (a - b).abs() / a.abs().max(1.0);
                if !err.is_finite() {
                    return Err(Error::EvaluatorFailure(format!("non-finite gradient at {z:?}")));
                }
                worst = worst.max(err);
            }
        }
        if worst > 1e-5 {
            return Err(Error::EvaluatorFailure(format!(
                "analytic gradient of {} disagrees with finite differences (relative error {worst:e})",
                self.name
            )));
        }
        Ok(worst)
    }
}

pub(crate) fn fd_grad(f: &dyn Fn(&[f64]) -> f64, z: &[f64], h: f64) -> Vec<f64> {
    let mut w = z.to_vec();
    (0..z.len())
        .map(|i| {
            w[i] = z[i] + h;
            let up = f(&w);
            w[i] = z[i] - h;
            let dn = f(&w);
            w[i] = z[i];
            (up - dn) / (2.0 * h)
        })
        .collect()
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

/// The z₁-part g of 𝒰 for the log cosh perturbation and its first two derivatives:
/// g = αε z T + ε²T²/2 − εS/2 with T = tanh z, S = sech² z.
pub(crate) fn logcosh_profile(alpha: f64, eps: f64, z: f64) -> (f64, f64, f64) {
    let t = z.tanh();
    let s = sech2(z);
    let g = alpha * eps * z * t + 0.5 * eps * eps * t * t - 0.5 * eps * s;
    let g1 = alpha * eps * (t + z * s) + (eps * eps + eps) * t * s;
    let g2 = alpha * eps * (2.0 * s - 2.0 * z * t * s) + (eps * eps + eps) * s * (1.0 - 3.0 * t * t);
    (g, g1, g2)
}
