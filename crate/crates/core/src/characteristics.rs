//! Jump intensities, closed-walk characteristics Φ_j and the concentration conditions.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{closed_walks_from, ClosedWalkBasis, Direction, DirectedGraph, VertexId, Walk};

/// Relative slack used by every inequality check, applied in log space.
pub const CHECK_TOL: f64 = 1e-10;

/// Witnesses kept per report; the violation count is always exact.
pub const MAX_WITNESSES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Speed {
    Constant(f64),
    NonConstant,
}

/// Positive rate on every arc of a graph, indexed by arc id.
#[derive(Debug, Clone)]
pub struct JumpIntensity {
    rates: Vec<f64>,
    log_rates: Vec<f64>,
    speed: Speed,
}

impl JumpIntensity {
    /// Rates listed in arc-id order.
    pub fn from_arc_rates(g: &DirectedGraph, rates: Vec<f64>) -> Result<Self> {
        if rates.len() != g.num_arcs() {
            return Err(Error::DomainError(format!(
                "{} rates for {} arcs",
                rates.len(),
                g.num_arcs()
            )));
        }
        for (id, (a, b)) in g.arcs().enumerate() {
            let r = rates[id];
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::NonPositiveRate {
                    what: format!("rate {} -> {}", g.label(a), g.label(b)),
                    value: r,
                });
            }
        }
        let log_rates = rates.iter().map(|r| r.ln()).collect();
        let mut j = JumpIntensity {
            rates,
            log_rates,
            speed: Speed::NonConstant,
        };
        j.speed = j.detect_speed(g);
        Ok(j)
    }

    pub fn from_fn(g: &DirectedGraph, f: impl Fn(VertexId, VertexId) -> f64) -> Result<Self> {
        let rates = g.arcs().map(|(a, b)| f(a, b)).collect();
        Self::from_arc_rates(g, rates)
    }

    /// The simple walk j ≡ λ.
    pub fn constant(g: &DirectedGraph, lambda: f64) -> Result<Self> {
        Self::from_fn(g, |_, _| lambda)
    }

    /// Rates given by vertex labels; every arc of `g` must be listed.
    pub fn from_labeled(g: &DirectedGraph, entries: &[(String, String, f64)]) -> Result<Self> {
        let mut rates = vec![f64::NAN; g.num_arcs()];
        for (a, b, r) in entries {
            let (ia, ib) = (g.vertex(a)?, g.vertex(b)?);
            let id = g.arc_id(ia, ib).ok_or_else(|| {
                Error::DomainError(format!("rate given for {a} -> {b}, which is not an arc"))
            })?;
            rates[id] = *r;
        }
        if let Some((a, b)) = g.arcs().zip(&rates).find(|(_, r)| r.is_nan()).map(|(arc, _)| arc) {
            return Err(Error::MissingRate {
                src: g.label(a).to_string(),
                dst: g.label(b).to_string(),
            });
        }
        Self::from_arc_rates(g, rates)
    }

    fn detect_speed(&self, g: &DirectedGraph) -> Speed {
        let sums: Vec<f64> = (0..g.num_vertices()).map(|v| self.out_rate(g, v)).collect();
        let lo = sums.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sums.iter().cloned().fold(0.0, f64::max);
        if hi - lo <= CHECK_TOL * hi {
            Speed::Constant(sums.iter().sum::<f64>() / sums.len() as f64)
        } else {
            Speed::NonConstant
        }
    }

    pub fn speed(&self) -> Speed {
        self.speed
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn rate_by_id(&self, id: usize) -> f64 {
        self.rates[id]
    }

    pub fn log_rate_by_id(&self, id: usize) -> f64 {
        self.log_rates[id]
    }

    pub fn rate(&self, g: &DirectedGraph, a: VertexId, b: VertexId) -> Option<f64> {
        g.arc_id(a, b).map(|id| self.rates[id])
    }

    /// Total jump rate out of `v`.
    pub fn out_rate(&self, g: &DirectedGraph, v: VertexId) -> f64 {
        self.rates[g.arc_start(v)..g.arc_start(v) + g.degree(v)].iter().sum()
    }

    /// j(z→z') e^{φ(z')−φ(z)}; leaves every closed-walk characteristic unchanged.
    pub fn gauge(&self, g: &DirectedGraph, potential: &[f64]) -> Result<Self> {
        let rates = g
            .arcs()
            .zip(&self.log_rates)
            .map(|((a, b), lr)| (lr + potential[b] - potential[a]).exp())
            .collect();
        Self::from_arc_rates(g, rates)
    }

    /// "src dst rate" lines in arc-id order.
    pub fn to_text(&self, g: &DirectedGraph) -> String {
        let mut s = String::new();
        for ((a, b), r) in g.arcs().zip(&self.rates) {
            s.push_str(&format!("{} {} {:.16e}\n", g.label(a), g.label(b), r));
        }
        s
    }
}

/// Parses "src dst rate" lines.
pub fn parse_rates(text: &str) -> Result<Vec<(String, String, f64)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse {
            line: i + 1,
            msg: format!("expected \"src dst rate\", got {line:?}"),
        };
        if f.len() != 3 {
            return Err(bad());
        }
        let r: f64 = f[2].parse().map_err(|_| bad())?;
        out.push((f[0].to_string(), f[1].to_string(), r));
    }
    Ok(out)
}

/// log Φ_j(c), the sum of log-rates along the walk.
pub fn log_phi(g: &DirectedGraph, j: &JumpIntensity, c: &Walk) -> Result<f64> {
    let mut s = 0.0;
    for (a, b) in c.arcs() {
        let id = g.arc_id(a, b).ok_or_else(|| Error::MissingRate {
            src: a.to_string(),
            dst: b.to_string(),
        })?;
        s += j.log_rates[id];
    }
    Ok(s)
}

/// Φ_j(c) = Π j(x_i → x_{i+1}).
pub fn phi(g: &DirectedGraph, j: &JumpIntensity, c: &Walk) -> Result<f64> {
    log_phi(g, j, c).map(f64::exp)
}

fn log_phi_edge(g: &DirectedGraph, j: &JumpIntensity, a: VertexId, b: VertexId) -> f64 {
    match (g.arc_id(a, b), g.arc_id(b, a)) {
        (Some(x), Some(y)) => j.log_rates[x] + j.log_rates[y],
        _ => f64::NAN,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    LatticeE8,
    LatticeE7,
    TreeE1,
    TreeE2,
    PatchBound,
}

/// A failed inequality lhs ≤ rhs, with both sides also in log form.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub condition: Condition,
    pub walk: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
    pub log_lhs: f64,
    pub log_rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacteristicReport {
    pub checked_conditions: Vec<Condition>,
    pub passed: bool,
    /// Number of inequalities evaluated.
    pub checked: usize,
    pub violations: usize,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

struct Collector {
    checked: usize,
    violations: usize,
    witnesses: Vec<Witness>,
}

impl Collector {
    fn new() -> Self {
        Collector {
            checked: 0,
            violations: 0,
            witnesses: Vec::new(),
        }
    }

    fn check(&mut self, condition: Condition, walk: impl FnOnce() -> Vec<String>, log_lhs: f64, log_rhs: f64) {
        self.checked += 1;
        if log_lhs <= log_rhs + CHECK_TOL && !log_lhs.is_nan() && !log_rhs.is_nan() {
            return;
        }
        self.violations += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(Witness {
                condition,
                walk: walk(),
                lhs: log_lhs.exp(),
                rhs: log_rhs.exp(),
                log_lhs,
                log_rhs,
            });
        }
    }

    fn finish(self, checked_conditions: Vec<Condition>, notes: Vec<String>) -> CharacteristicReport {
        CharacteristicReport {
            checked_conditions,
            passed: self.violations == 0,
            checked: self.checked,
            violations: self.violations,
            witnesses: self.witnesses,
            notes,
        }
    }
}

/// Checks Φ(e) ≤ λ² on every 2-cycle (`LatticeE8`) and the two-sided face bound (`LatticeE7`)
/// on every face lying `margin` steps inside the window.
pub fn check_lattice_conditions(
    g: &DirectedGraph,
    j: &JumpIntensity,
    lambda: f64,
    margin: usize,
) -> Result<CharacteristicReport> {
    let lat = g
        .lattice()
        .ok_or_else(|| Error::DomainError("lattice conditions need a lattice window".into()))?;
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveRate {
            what: "lambda".into(),
            value: lambda,
        });
    }
    if lat.width < 2 + 2 * margin || lat.height < 2 + 2 * margin {
        return Err(Error::WindowTooSmall(format!(
            "{}x{} window has no face {} steps inside",
            lat.width, lat.height, margin
        )));
    }
    let inside = |x: usize, y: usize| x >= margin && y >= margin && x + margin < lat.width && y + margin < lat.height;
    let mut col = Collector::new();
    let log_l2 = 2.0 * lambda.ln();
    let edge = |x: usize, y: usize, d: Direction| {
        lat.two_cycle(x, y, d)
            .map(|w| log_phi(g, j, &w).unwrap_or(f64::NAN))
            .unwrap_or(f64::NAN)
    };
    for ((x, y), d) in lat.two_cycles() {
        let (nx, ny) = match d {
            Direction::Horizontal => (x + 1, y),
            Direction::Vertical => (x, y + 1),
        };
        if inside(x, y) && inside(nx, ny) {
            let labels = || vec![g.label(lat.vertex(x, y)).to_string(), g.label(lat.vertex(nx, ny)).to_string(), g.label(lat.vertex(x, y)).to_string()];
            col.check(Condition::LatticeE8, labels, edge(x, y, d), log_l2);
        }
    }
    for (x, y) in lat.faces() {
        if !(inside(x, y) && inside(x + 1, y + 1)) {
            continue;
        }
        let f = lat.face(x, y);
        let lf = log_phi(g, j, &f)?;
        let lower = edge(x, y, Direction::Vertical) + edge(x, y, Direction::Horizontal);
        let upper = edge(x + 1, y, Direction::Vertical) + edge(x, y + 1, Direction::Horizontal);
        col.check(Condition::LatticeE7, || f.labels(g), lower, lf);
        col.check(Condition::LatticeE7, || f.labels(g), lf, upper);
    }
    Ok(col.finish(vec![Condition::LatticeE8, Condition::LatticeE7], Vec::new()))
}

fn basis_matches(g: &DirectedGraph, basis: &ClosedWalkBasis) -> Result<()> {
    if basis.num_vertices() != g.num_vertices() {
        return Err(Error::BasisMismatch(format!(
            "basis has {} vertices, graph has {}",
            basis.num_vertices(),
            g.num_vertices()
        )));
    }
    if basis.two_cycles != g.edges() {
        return Err(Error::BasisMismatch("2-cycles differ from the graph's edges".into()));
    }
    for c in &basis.chosen {
        if c.arcs().any(|(a, b)| !g.has_arc(a, b)) {
            return Err(Error::BasisMismatch("basis cycle uses an arc outside the graph".into()));
        }
    }
    Ok(())
}

/// The δ note attached to tree reports.
pub const DELTA_NOTE: &str = "conditions use delta = 1/max_out_degree; the tree tail envelope uses (max_out_degree - 1)";

/// Checks `TreeE1` on every 2-cycle and the two-sided `TreeE2` bound on every chosen basis cycle,
/// with δ = 1/Δ.
pub fn check_tree_conditions(
    g: &DirectedGraph,
    j: &JumpIntensity,
    lambda: f64,
    basis: &ClosedWalkBasis,
) -> Result<CharacteristicReport> {
    basis_matches(g, basis)?;
    let log_s = (lambda / g.max_out_degree() as f64).ln();
    let mut col = Collector::new();
    for &(a, b) in &basis.two_cycles {
        let w = Walk::from_vertices(vec![a, b, a]);
        col.check(Condition::TreeE1, || w.labels(g), log_phi_edge(g, j, a, b), 2.0 * log_s);
    }
    for (&(a, b), c) in basis.off_tree.iter().zip(&basis.chosen) {
        let l = c.len() as f64;
        let le = log_phi_edge(g, j, a, b);
        let lc = log_phi(g, j, c)?;
        let mut neighbours: Vec<(VertexId, VertexId)> = c
            .arcs()
            .map(|(p, q)| (p.min(q), p.max(q)))
            .filter(|&e| e != (a, b))
            .collect();
        neighbours.sort_unstable();
        neighbours.dedup();
        let prod: f64 = neighbours.iter().map(|&(p, q)| log_phi_edge(g, j, p, q)).sum();
        col.check(Condition::TreeE2, || c.labels(g), (1.0 - l) * log_s + le, lc);
        col.check(Condition::TreeE2, || c.labels(g), lc, (l - 1.0) * log_s + prod);
    }
    Ok(col.finish(vec![Condition::TreeE1, Condition::TreeE2], vec![DELTA_NOTE.to_string()]))
}

/// Patch-bound base on the lattice: λ.
pub fn lattice_patch_base(lambda: f64) -> f64 {
    lambda
}

/// Patch-bound base on a general graph: λδ with δ = 1/Δ.
pub fn tree_patch_base(g: &DirectedGraph, lambda: f64) -> f64 {
    lambda / g.max_out_degree() as f64
}

/// Brute force: Φ_j(c) ≤ base^{ℓ(c)} for every simple closed walk with ℓ(c) ≤ `max_len`.
pub fn verify_patch_bound(
    g: &DirectedGraph,
    j: &JumpIntensity,
    base: f64,
    max_len: usize,
    cap: usize,
) -> Result<CharacteristicReport> {
    if !(base > 0.0) {
        return Err(Error::NonPositiveRate {
            what: "patch base".into(),
            value: base,
        });
    }
    let log_base = base.ln();
    let total = std::sync::atomic::AtomicUsize::new(0);
    let parts: Vec<Collector> = (0..g.num_vertices())
        .into_par_iter()
        .map(|v| {
            let mut col = Collector::new();
            if max_len >= 2 {
                closed_walks_from(g, v, max_len, &mut |vs, arcs| {
                    if total.fetch_add(1, std::sync::atomic::Ordering::Relaxed) >= cap {
                        return false;
                    }
                    let lp: f64 = arcs.iter().map(|&id| j.log_rates[id]).sum();
                    let walk_labels = || vs.iter().map(|&x| g.label(x).to_string()).collect();
                    col.check(Condition::PatchBound, walk_labels, lp, arcs.len() as f64 * log_base);
                    true
                });
            }
            col
        })
        .collect();
    if total.load(std::sync::atomic::Ordering::Relaxed) > cap {
        return Err(Error::BudgetExceeded { cap });
    }
    let mut col = Collector::new();
    for p in parts {
        col.checked += p.checked;
        col.violations += p.violations;
        let room = MAX_WITNESSES - col.witnesses.len();
        col.witnesses.extend(p.witnesses.into_iter().take(room));
    }
    Ok(col.finish(vec![Condition::PatchBound], Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, lattice_window, spanning_tree, t_basis, OrientationRule, DEFAULT_WALK_CAP};

    #[test]
    fn phi_products() {
        let g = build_graph(&[("a", "b"), ("b", "a")]).unwrap();
        let j = JumpIntensity::from_fn(&g, |a, _| if a == 0 { 2.0 } else { 3.0 }).unwrap();
        let e = Walk::new(&g, vec![0, 1, 0]).unwrap();
        assert!((phi(&g, &j, &e).unwrap() - 6.0).abs() < 1e-14);
        let g = lattice_window(3, 3).unwrap();
        let j = JumpIntensity::constant(&g, 1.7).unwrap();
        let f = g.lattice().unwrap().face(0, 0);
        assert!((phi(&g, &j, &f).unwrap() / 1.7f64.powi(4) - 1.0).abs() < 1e-14);
        assert_eq!(j.speed(), Speed::NonConstant);
    }

    #[test]
    fn lattice_checks() {
        let g = lattice_window(5, 5).unwrap();
        let j = JumpIntensity::constant(&g, 1.0).unwrap();
        let r = check_lattice_conditions(&g, &j, 1.0, 0).unwrap();
        assert!(r.passed && r.witnesses.is_empty());
        assert_eq!(r.checked, 40 + 2 * 16);

        let (a, b) = (g.vertex("2,2").unwrap(), g.vertex("3,2").unwrap());
        let j = JumpIntensity::from_fn(&g, |x, y| if (x, y) == (a, b) { 2.0 } else { 1.0 }).unwrap();
        let r = check_lattice_conditions(&g, &j, 1.0, 0).unwrap();
        assert!(!r.passed);
        let w = r.witnesses.iter().find(|w| w.condition == Condition::LatticeE8).unwrap();
        assert_eq!(w.walk, ["2,2", "3,2", "2,2"]);
        assert!((w.lhs - 2.0).abs() < 1e-12 && (w.rhs - 1.0).abs() < 1e-12);

        assert!(matches!(check_lattice_conditions(&g, &j, 1.0, 2), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn tree_checks() {
        let g = lattice_window(3, 3).unwrap();
        let t = spanning_tree(&g, 0).unwrap();
        let basis = t_basis(&g, &t, OrientationRule::LexSmaller).unwrap();
        // uniform rates meet both sides of TreeE2 exactly when λδ >= 1
        let lambda = 6.0;
        let s = lambda / 4.0;
        let j = JumpIntensity::constant(&g, s).unwrap();
        let r = check_tree_conditions(&g, &j, lambda, &basis).unwrap();
        assert!(r.passed, "{:?}", r.witnesses);
        assert_eq!(r.notes.len(), 1);

        // for λδ < 1 the lower side s^{1-ℓ}Φ(e) <= Φ(c_e) fails for uniform rates
        let j = JumpIntensity::constant(&g, 0.9 / 4.0).unwrap();
        let r = check_tree_conditions(&g, &j, 0.9, &basis).unwrap();
        assert!(!r.passed);
        assert!(r.witnesses.iter().all(|w| w.condition == Condition::TreeE2));

        let j = JumpIntensity::from_fn(&g, |a, b| if (a, b) == (0, 1) { 10.0 * s } else { s }).unwrap();
        let r = check_tree_conditions(&g, &j, lambda, &basis).unwrap();
        assert!(!r.passed);
        assert!(r.witnesses.iter().any(|w| w.walk == ["0,0", "0,1", "0,0"]));

        let other = lattice_window(2, 2).unwrap();
        let j = JumpIntensity::constant(&other, 1.0).unwrap();
        assert!(matches!(check_tree_conditions(&other, &j, 1.0, &basis), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn patch_bound_simple_walk_is_equality() {
        let g = lattice_window(4, 4).unwrap();
        let j = JumpIntensity::constant(&g, 1.3).unwrap();
        let r = verify_patch_bound(&g, &j, 1.3, 8, DEFAULT_WALK_CAP).unwrap();
        assert!(r.passed);
        let n = crate::graph::enumerate_simple_closed_walks(&g, 8, DEFAULT_WALK_CAP).unwrap().len();
        assert_eq!(r.checked, n);
        assert!(matches!(verify_patch_bound(&g, &j, 1.3, 8, 10), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn patch_bound_witness_is_the_violating_two_cycle() {
        let g = lattice_window(4, 4).unwrap();
        let (a, b) = (g.vertex("1,1").unwrap(), g.vertex("1,2").unwrap());
        let j = JumpIntensity::from_fn(&g, |x, y| if (x, y) == (a, b) { 1.5 } else { 1.0 }).unwrap();
        let r = verify_patch_bound(&g, &j, 1.0, 6, DEFAULT_WALK_CAP).unwrap();
        assert!(!r.passed);
        let twos: Vec<_> = r.witnesses.iter().filter(|w| w.walk.len() == 3).collect();
        assert_eq!(twos.len(), 2);
        assert!(twos.iter().all(|w| w.walk.contains(&"1,1".to_string()) && w.walk.contains(&"1,2".to_string())));
    }

    #[test]
    fn gauge_and_concatenation() {
        let g = lattice_window(3, 3).unwrap();
        let j = JumpIntensity::from_fn(&g, |a, b| 0.5 + (3 * a + b) as f64 * 0.1).unwrap();
        let pot: Vec<f64> = (0..9).map(|v| (v as f64 * 1.3).sin() * 2.0).collect();
        let k = j.gauge(&g, &pot).unwrap();
        let lat = g.lattice().unwrap();
        let f = lat.face(0, 0);
        let e = lat.two_cycle(0, 0, Direction::Horizontal).unwrap();
        for w in [&f, &e] {
            let (p, q) = (phi(&g, &j, w).unwrap(), phi(&g, &k, w).unwrap());
            assert!((p / q - 1.0).abs() < 1e-10);
        }
        let fe = f.concat(&e).unwrap();
        let prod = phi(&g, &j, &f).unwrap() * phi(&g, &j, &e).unwrap();
        assert!((phi(&g, &j, &fe).unwrap() / prod - 1.0).abs() < 1e-12);
        let er = crate::graph::reverse_walk(&e);
        assert!((phi(&g, &j, &er).unwrap() / phi(&g, &j, &e).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn labeled_rates() {
        let g = build_graph(&[("a", "b"), ("b", "a")]).unwrap();
        let rates = parse_rates("a b 2\nb a 3\n").unwrap();
        let j = JumpIntensity::from_labeled(&g, &rates).unwrap();
        assert_eq!(j.rate(&g, 1, 0), Some(3.0));
        let missing = parse_rates("a b 2\n").unwrap();
        assert!(matches!(JumpIntensity::from_labeled(&g, &missing), Err(Error::MissingRate { .. })));
        let zero = parse_rates("a b 0\nb a 1").unwrap();
        assert!(matches!(JumpIntensity::from_labeled(&g, &zero), Err(Error::NonPositiveRate { .. })));
        assert!(parse_rates("a b").is_err());
    }
}
