//! The harmonic characteristic 𝒰 = ½‖∇U‖² − ∂ₜU − ½ΔU and the Hessian condition.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use super::potential::{fd_grad, FieldValue, GradientPotential};
use crate::error::{Error, Result};

/// Slack on Hess 𝒰 ≥ α²/2.
pub const HESSIAN_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ReciprocalCharacteristicField {
    pub potential: GradientPotential,
    /// Outer step for the differences of 𝒰 when no analytic field exists.
    pub outer_step: f64,
}

pub fn script_u(p: &GradientPotential) -> ReciprocalCharacteristicField {
    let inner = match p.source {
        super::DerivativeSource::FiniteDifference { h } => h,
        super::DerivativeSource::Analytic => 1e-3,
    };
    ReciprocalCharacteristicField {
        potential: p.clone(),
        outer_step: 10.0 * inner,
    }
}

impl ReciprocalCharacteristicField {
    pub fn is_analytic(&self) -> bool {
        self.potential.analytic_field().is_some()
    }

    /// 𝒰(t, z) alone.
    pub fn value(&self, t: f64, z: &[f64]) -> f64 {
        if let Some(f) = self.potential.analytic_field() {
            return f(t, z).value;
        }
        self.value_from_u(t, z)
    }

    fn value_from_u(&self, t: f64, z: &[f64]) -> f64 {
        let p = &self.potential;
        let g = p.grad(t, z);
        0.5 * g.iter().map(|x| x * x).sum::<f64>() - p.dt(t, z) - 0.5 * p.laplacian(t, z)
    }

    pub fn eval(&self, t: f64, z: &[f64]) -> Result<FieldValue> {
        let fv = match self.potential.analytic_field() {
            Some(f) => f(t, z),
            None => self.eval_fd(t, z),
        };
        if !fv.value.is_finite() || fv.hess.iter().any(|x| !x.is_finite()) {
            return Err(Error::EvaluatorFailure(format!("non-finite field at t={t}, z={z:?}")));
        }
        Ok(fv)
    }

    /// Nested central differences; Hess 𝒰 is Richardson-extrapolated over steps H and H/2.
    pub fn eval_fd(&self, t: f64, z: &[f64]) -> FieldValue {
        let f = |w: &[f64]| self.value_from_u(t, w);
        let h = self.outer_step;
        let hess_at = |s: f64| {
            let d = z.len();
            let mut m = vec![0.0; d * d];
            let mut w = z.to_vec();
            let f0 = f(z);
            for i in 0..d {
                w[i] = z[i] + s;
                let up = f(&w);
                w[i] = z[i] - s;
                let dn = f(&w);
                w[i] = z[i];
                m[i * d + i] = (up - 2.0 * f0 + dn) / (s * s);
                for k in 0..i {
                    let mut corner = |a: f64, b: f64| {
                        w[i] = z[i] + a;
                        w[k] = z[k] + b;
                        let v = f(&w);
                        w[i] = z[i];
                        w[k] = z[k];
                        v
                    };
                    let v = (corner(s, s) - corner(s, -s) - corner(-s, s) + corner(-s, -s)) / (4.0 * s * s);
                    m[i * d + k] = v;
                    m[k * d + i] = v;
                }
            }
            m
        };
        let coarse = hess_at(h);
        let fine = hess_at(h / 2.0);
        let hess = fine.iter().zip(&coarse).map(|(a, b)| (4.0 * a - b) / 3.0).collect();
        FieldValue {
            value: f(z),
            grad: fd_grad(&f, z, h),
            hess,
        }
    }

    pub fn min_hess_eigenvalue(&self, t: f64, z: &[f64]) -> Result<f64> {
        let fv = self.eval(t, z)?;
        let d = z.len();
        let m = DMatrix::from_row_slice(d, d, &fv.hess);
        Ok(SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HessianReport {
    pub passed: bool,
    pub alpha: f64,
    /// α²/2.
    pub threshold: f64,
    pub min_eigenvalue: f64,
    pub witness_t: f64,
    pub witness_z: Vec<f64>,
    pub grid_points: usize,
}

/// min over a grid of the smallest eigenvalue of Hess 𝒰(t, z) against α²/2.
pub fn check_condition_e17(
    field: &ReciprocalCharacteristicField,
    alpha: f64,
    bounds: &[(f64, f64)],
    grid_n: usize,
) -> Result<HessianReport> {
    if grid_n < 8 {
        return Err(Error::DomainError(format!("grid_n must be at least 8, got {grid_n}")));
    }
    let d = field.potential.dim;
    if bounds.len() != d || bounds.iter().any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
        return Err(Error::DomainError("box must give one finite interval per dimension".into()));
    }
    let times: Vec<f64> = if field.potential.time_homogeneous {
        vec![0.5]
    } else {
        (0..grid_n).map(|i| (i as f64 + 0.5) / grid_n as f64).collect()
    };
    let per_t = grid_n.pow(d as u32);
    let total = per_t * times.len();
    let point = |idx: usize| {
        let t = times[idx / per_t];
        let mut rest = idx % per_t;
        let z: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| {
                let i = rest % grid_n;
                rest /= grid_n;
                lo + (hi - lo) * i as f64 / (grid_n - 1) as f64
            })
            .collect();
        (t, z)
    };
    let evals: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (t, z) = point(idx);
            field.min_hess_eigenvalue(t, &z)
        })
        .collect::<Result<_>>()?;
    let (best, min_eigenvalue) = evals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let (witness_t, witness_z) = point(best);
    let threshold = alpha * alpha / 2.0;
    Ok(HessianReport {
        passed: min_eigenvalue >= threshold - HESSIAN_TOL,
        alpha,
        threshold,
        min_eigenvalue,
        witness_t,
        witness_z,
        grid_points: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ou_field_is_exact() {
        let (a, d) = (1.3, 2);
        let f = script_u(&GradientPotential::ou(a, d));
        let z = [0.4, -1.1];
        let v = f.eval(0.3, &z).unwrap();
        assert!((v.value - (a * a * (0.16 + 1.21) / 2.0 - d as f64 * a / 2.0)).abs() < 1e-14);
        assert_eq!(v.hess, vec![a * a, 0.0, 0.0, a * a]);
        // the same from U alone
        let g = script_u(&GradientPotential::ou(a, d).finite_difference(1e-3));
        let w = g.eval(0.3, &z).unwrap();
        assert!((w.value - v.value).abs() < 1e-6);
        for (x, y) in w.hess.iter().zip(&v.hess) {
            assert!((x - y).abs() < 1e-4);
        }
    }

    #[test]
    fn zero_potential() {
        let f = script_u(&GradientPotential::zero(2));
        assert_eq!(f.value(0.5, &[3.0, -1.0]), 0.0);
        let r = check_condition_e17(&f, 0.5, &[(-1.0, 1.0), (-1.0, 1.0)], 8).unwrap();
        assert!(!r.passed && r.min_eigenvalue == 0.0);
    }

    #[test]
    fn logcosh_fd_matches_analytic() {
        let p = GradientPotential::ou_plus_logcosh(0.5, 0.1, 2);
        let an = script_u(&p);
        let fd = script_u(&p.finite_difference(1e-3));
        for z in [[0.3, -0.2], [1.4, 0.9], [-2.0, 0.1]] {
            let a = an.eval(0.5, &z).unwrap();
            let b = fd.eval(0.5, &z).unwrap();
            for (x, y) in a.hess.iter().zip(&b.hess) {
                assert!((x - y).abs() < 1e-4, "{z:?} {x} {y}");
            }
            for (x, y) in a.grad.iter().zip(&b.grad) {
                assert!((x - y).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn hessian_condition_cases() {
        let bx = [(-3.0, 3.0), (-3.0, 3.0)];
        let ou = check_condition_e17(&script_u(&GradientPotential::ou(1.0, 2)), 1.0, &bx, 8).unwrap();
        assert!(ou.passed && (ou.min_eigenvalue - 1.0).abs() < 1e-12);
        let lc = check_condition_e17(&script_u(&GradientPotential::ou_plus_logcosh(0.5, 0.1, 2)), 0.5, &bx, 33).unwrap();
        assert!(lc.passed);
        let lc = check_condition_e17(&script_u(&GradientPotential::ou_plus_logcosh(0.25, 0.1, 2)), 0.25, &bx, 61).unwrap();
        assert!(!lc.passed);
        let q = check_condition_e17(&script_u(&GradientPotential::quartic(1.0, 1)), 0.1, &[(-2.0, 2.0)], 81).unwrap();
        assert!(!q.passed && q.min_eigenvalue < 0.0);
        assert!(q.witness_z[0].abs() > 0.2 && q.witness_z[0].abs() < 0.9);
    }
}
