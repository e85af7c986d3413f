//! Empirical check of the Gaussian concentration envelope for bridges whose
//! harmonic characteristic is at least as convex as that of an OU process.

use serde::Serialize;

use super::field::{check_condition_e17, HessianReport, ReciprocalCharacteristicField};
use super::ou::gamma_alpha;
use super::sampler::{sample_diffusion_bridge, SamplerOptions};
use crate::error::{Error, Result};

/// Exceedances needed before an R counts.
pub const MIN_EXCEEDANCES: usize = 50;

#[derive(Debug, Clone, Serialize)]
pub struct AccordeonRow {
    pub r: f64,
    pub empirical_log_tail: f64,
    /// −γ_α(t) R²/2.
    pub gaussian_envelope: f64,
    /// Standard error of the log-tail, delta method.
    pub sigma_log: f64,
    pub exceedances: usize,
    pub counted: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AccordeonReport {
    pub t: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub mean_f: f64,
    pub rows: Vec<AccordeonRow>,
    pub hessian: HessianReport,
    pub effective_sample_size: f64,
    /// Fraction of paths leaving `opts.certified_box`, if one was given.
    pub box_leak_fraction: Option<f64>,
    pub passed: bool,
}

/// Compares ln P^{xy}(f(X_t) ≥ E f + R) with −γ_α(t)R²/2 + 3σ at every R with at
/// least [`MIN_EXCEEDANCES`] exceedances. The Hessian condition is checked on the
/// bounding box of the sampled paths and must hold for the report to pass. A
/// constant `f` has no exceedances at all and passes trivially.
#[allow(clippy::too_many_arguments)]
pub fn accordeon_check(
    field: &ReciprocalCharacteristicField,
    alpha: f64,
    x: &[f64],
    y: &[f64],
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    t: f64,
    r_grid: &[f64],
    opts: &SamplerOptions,
) -> Result<AccordeonReport> {
    let gamma = gamma_alpha(alpha, t)?;
    let mut o = opts.clone();
    o.record = Some(vec![t]);
    let ens = sample_diffusion_bridge(field, x, y, &o)?;
    let ti = ens.time_index(t).expect("recorded time");
    let mean_f = ens.estimate(ti, f).value;
    let mut rows = Vec::with_capacity(r_grid.len());
    let mut any_exceedance = false;
    for &r in r_grid {
        let te = ens.tail(ti, f, mean_f + r);
        any_exceedance |= te.exceedances > 0;
        let counted = te.exceedances >= MIN_EXCEEDANCES;
        let empirical_log_tail = te.prob.ln();
        let sigma_log = if te.prob > 0.0 { te.std_error / te.prob } else { f64::INFINITY };
        let gaussian_envelope = -gamma * r * r / 2.0;
        rows.push(AccordeonRow {
            r,
            empirical_log_tail,
            gaussian_envelope,
            sigma_log,
            exceedances: te.exceedances,
            counted,
            passed: !counted || empirical_log_tail <= gaussian_envelope + 3.0 * sigma_log,
        });
    }
    if any_exceedance && !rows.iter().any(|r| r.counted) {
        return Err(Error::InsufficientTail {
            min_exceedances: MIN_EXCEEDANCES,
        });
    }
    let grid_n = match ens.dim {
        1 => 201,
        2 => 41,
        _ => 8,
    };
    let hessian = check_condition_e17(field, alpha, &ens.bounding_box, grid_n)?;
    let passed = hessian.passed && rows.iter().all(|r| r.passed);
    Ok(AccordeonReport {
        t,
        alpha,
        gamma,
        mean_f,
        rows,
        hessian,
        effective_sample_size: ens.effective_sample_size,
        box_leak_fraction: ens.box_leak_fraction,
        passed,
    })
}
