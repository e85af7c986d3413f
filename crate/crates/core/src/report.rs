//! CSV tables shared by the command line and the reproducibility checks.

use serde::Serialize;

use crate::characteristics::JumpIntensity;
use crate::ctmc::{bridge_marginal, lattice_envelope, sample_bridge_paths, tree_envelope};
use crate::diffusion::AccordeonReport;
use crate::error::Result;
use crate::graph::{distances_from, DirectedGraph, VertexId};
use crate::pinned_poisson::{herbst_log_bound, rho, T70Envelope, FULL_SUPPORT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Cell {
    Int(i64),
    Float(f64),
    /// Written as an empty field.
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

/// Doubles with 17 significant digits; infinities as `inf`/`-inf`.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    /// Column by name, as floats (`NaN` for missing cells).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[i] {
                    Cell::Int(v) => v as f64,
                    Cell::Float(v) => v,
                    Cell::Missing => f64::NAN,
                })
                .collect(),
        )
    }

    /// Header line then one line per row, LF endings.
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match *c {
                    Cell::Int(v) => v.to_string(),
                    Cell::Float(v) => format_f64(v),
                    Cell::Missing => String::new(),
                })
                .collect();
            s.push_str(&fields.join(","));
            s.push('\n');
        }
        s
    }
}

/// ln ρ_Φ(n ≥ E n + R) for R = 1..=r_max, next to the Herbst bound of a Poisson(Φ)
/// variable and the pinned envelope (empty where R is outside its regime).
pub fn pinned_poisson_tail_table(k: u32, phi: f64, r_max: usize) -> Result<Table> {
    let dist = rho(k, phi, FULL_SUPPORT_TOL)?;
    let env = T70Envelope::new(k, phi)?;
    let mean = dist.mean();
    let mut t = Table::new(&["R", "exact_log_tail", "herbst_log_bound", "t70_log_envelope"]);
    for r in 1..=r_max {
        let rf = r as f64;
        t.push(vec![
            Cell::Int(r as i64),
            dist.log_tail(mean + rf).into(),
            herbst_log_bound(phi, rf)?.into(),
            env.log_bound(rf).ok().into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Serialize)]
pub struct CtmcTailRun {
    pub table: Table,
    pub leak: f64,
    /// Bridge probability P(X₁ = y | X₀ = x).
    pub p1: f64,
    pub paths: usize,
}

/// Tails of dist(x, X_t) under the bridge x → y: exact, from `paths` sampled bridges,
/// and the constant-speed envelope for the graph's shape at rate `lambda`.
#[allow(clippy::too_many_arguments)]
pub fn ctmc_tail_table(
    g: &DirectedGraph,
    j: &JumpIntensity,
    x: VertexId,
    y: VertexId,
    t: f64,
    lambda: f64,
    paths: usize,
    seed: u64,
    workers: usize,
) -> Result<CtmcTailRun> {
    let dist = distances_from(g, x)?;
    let marg = bridge_marginal(g, j, x, y, t)?;
    let exact = marg.log_tails(&dist);
    let samples = sample_bridge_paths(g, j, x, y, paths, seed, workers)?;
    let mut counts = vec![0usize; exact.len()];
    for p in &samples {
        counts[dist[p.state_at(t)]] += 1;
    }
    let lattice = g.lattice().is_some();
    let mut table = Table::new(&["R", "exact_log_tail", "empirical_log_tail", "envelope"]);
    let mut above = paths;
    for (r, &e) in exact.iter().enumerate() {
        let rf = r as f64;
        let envelope = if r == 0 {
            0.0
        } else if lattice {
            lattice_envelope(lambda, t, rf)
        } else {
            tree_envelope(lambda, g.max_out_degree(), t, rf)
        };
        let emp = if paths == 0 { f64::NAN } else { (above as f64 / paths as f64).ln() };
        table.push(vec![Cell::Int(r as i64), e.into(), emp.into(), envelope.into()]);
        above -= counts[r];
    }
    Ok(CtmcTailRun {
        table,
        leak: marg.leak,
        p1: marg.p1,
        paths,
    })
}

pub fn accordeon_table(rep: &AccordeonReport) -> Table {
    let mut t = Table::new(&["R", "empirical_log_tail", "gaussian_envelope"]);
    for row in &rep.rows {
        t.push(vec![row.r.into(), row.empirical_log_tail.into(), row.gaussian_envelope.into()]);
    }
    t
}
