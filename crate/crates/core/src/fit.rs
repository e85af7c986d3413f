//! Least-squares fits of log-tails against the Stirling-type expansion
//! a·R ln R + b·R + c·ln R + d.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailFit {
    /// Coefficient of R ln R.
    pub r_log_r: f64,
    /// Coefficient of R.
    pub linear: f64,
    pub log_r: f64,
    pub constant: f64,
    /// Root mean square residual.
    pub rms: f64,
}

fn solve(rows: Vec<Vec<f64>>, y: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let (n, p) = (rows.len(), rows.first().map_or(0, Vec::len));
    if n < p + 1 {
        return Err(Error::RangeTooSmall(format!("{n} points for {p} coefficients")));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::DomainError("non-finite log-tail in fit range".into()));
    }
    let a = DMatrix::from_fn(n, p, |i, k| rows[i][k]);
    let b = DVector::from_vec(y);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::DomainError(e.to_string()))?;
    let res = &a * &coef - &b;
    Ok((coef.iter().copied().collect(), (res.norm_squared() / n as f64).sqrt()))
}

/// Fits all four coefficients; points are (R, ln tail) with R ≥ 1.
pub fn fit_tail_expansion(points: &[(f64, f64)]) -> Result<TailFit> {
    let rows = points.iter().map(|&(r, _)| vec![r * r.ln(), r, r.ln(), 1.0]).collect();
    let (c, rms) = solve(rows, points.iter().map(|p| p.1).collect())?;
    Ok(TailFit {
        r_log_r: c[0],
        linear: c[1],
        log_r: c[2],
        constant: c[3],
        rms,
    })
}

/// Removes `lead`·R ln R and fits the rest on R, ln R and 1.
pub fn fit_with_fixed_lead(points: &[(f64, f64)], lead: f64) -> Result<TailFit> {
    let rows = points.iter().map(|&(r, _)| vec![r, r.ln(), 1.0]).collect();
    let y = points.iter().map(|&(r, l)| l - lead * r * r.ln()).collect();
    let (c, rms) = solve(rows, y)?;
    Ok(TailFit {
        r_log_r: lead,
        linear: c[0],
        log_r: c[1],
        constant: c[2],
        rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_coefficients() {
        let pts: Vec<(f64, f64)> = (5..30)
            .map(|r| {
                let r = r as f64;
                (r, -2.0 * r * r.ln() + 1.5 * r - 0.5 * r.ln() + 3.0)
            })
            .collect();
        let f = fit_tail_expansion(&pts).unwrap();
        assert!((f.r_log_r + 2.0).abs() < 1e-9 && (f.linear - 1.5).abs() < 1e-8);
        let g = fit_with_fixed_lead(&pts, -2.0).unwrap();
        assert!((g.linear - 1.5).abs() < 1e-9 && g.rms < 1e-9);
        assert!(fit_tail_expansion(&pts[..3]).is_err());
    }
}
