//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bridgelab::characteristics::{
    check_lattice_conditions, check_tree_conditions, lattice_patch_base, log_phi, tree_patch_base, verify_patch_bound,
    JumpIntensity,
};
use bridgelab::ctmc::{bridge_marginal, exact_lattice_tail, sample_bridge_paths, skellam_bridge_pmf};
use bridgelab::diffusion::{
    accordeon_check, gamma_alpha, sample_diffusion_bridge, script_u, GradientPotential, SamplerOptions,
};
use bridgelab::fit::{fit_tail_expansion, fit_with_fixed_lead};
use bridgelab::generators::{basis_prescription, inject_edge_violation, lattice_prescription, random_graph};
use bridgelab::graph::{
    distances_from, enumerate_simple_closed_walks, lattice_window, line_window, DirectedGraph, DEFAULT_WALK_CAP,
};
use bridgelab::pinned_poisson::{
    bobkov_log_bound, check_duality, herbst_log_bound, lemma_ll_check, poisson_log_tail, psi_vs_h_check, rho,
    T70Envelope, FULL_SUPPORT_TOL,
};
use bridgelab::report::{accordeon_table, ctmc_tail_table, pinned_poisson_tail_table};
use bridgelab::synthesis::{normalize_constant_speed, synth_basis, synth_lattice, CycleKey};

type Outcome = Result<String, String>;

/// Fixed so that sampled results do not depend on the machine.
const WORKERS: usize = 8;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_gamma() -> Outcome {
    let e = (-1.0f64).exp();
    let want = 2.0 * (1.0 - e * e) / ((1.0 - e) * (1.0 - e));
    let got = gamma_alpha(1.0, 0.5).map_err(|e| e.to_string())?;
    ensure((got - want).abs() <= 1e-12, || format!("gamma(1, 0.5) = {got}, want {want}"))?;
    let ts: Vec<f64> = (1..=1000).map(|i| i as f64 / 1001.0).collect();
    let alphas = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
    let mut worst_sym = 0.0f64;
    for &a in &alphas {
        let g: Vec<f64> = ts.iter().map(|&t| gamma_alpha(a, t).unwrap()).collect();
        for (i, &t) in ts.iter().enumerate() {
            let mirror = gamma_alpha(a, 1.0 - t).unwrap();
            worst_sym = worst_sym.max((g[i] / mirror - 1.0).abs());
        }
        for w in g.windows(3) {
            ensure(w[0] + w[2] - 2.0 * w[1] >= -1e-9 * w[1], || format!("not convex at alpha {a}"))?;
        }
    }
    ensure(worst_sym <= 1e-12, || format!("symmetry error {worst_sym:e}"))?;
    for &t in &ts {
        for a in alphas.windows(2) {
            ensure(gamma_alpha(a[0], t).unwrap() <= gamma_alpha(a[1], t).unwrap(), || {
                format!("not increasing in alpha at t = {t}")
            })?;
        }
    }
    let mut worst_lim = 0.0f64;
    for &t in &ts {
        worst_lim = worst_lim.max((gamma_alpha(1e-6, t).unwrap() * t * (1.0 - t) - 1.0).abs());
    }
    ensure(worst_lim <= 1e-5, || format!("small-alpha limit error {worst_lim:e}"))?;
    Ok(format!("value err {:.1e}, symmetry {worst_sym:.1e}, limit {worst_lim:.1e}", (got - want).abs()))
}

fn c2_ou_variance() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (ai, alpha) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let field = script_u(&GradientPotential::ou(alpha, 1));
        let mut o = SamplerOptions::new(200, 100_000, 1000 + ai as u64);
        o.workers = WORKERS;
        o.record = Some(vec![0.25, 0.5, 0.75]);
        let ens = sample_diffusion_bridge(&field, &[0.0], &[0.0], &o).map_err(|e| e.to_string())?;
        for t in [0.25, 0.5, 0.75] {
            let ti = ens.time_index(t).unwrap();
            let v = ens.variance(ti, 0).value * gamma_alpha(alpha, t).unwrap();
            ok &= (0.98..=1.02).contains(&v);
            lines.push(format!("a={alpha},t={t}:{v:.4}"));
        }
    }
    let msg = lines.join(" ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c3_gaussian_envelope() -> Outcome {
    let grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.1).collect();
    let mut lines = Vec::new();
    let mut ok = true;
    for alpha in [0.5, 1.0] {
        for (name, pot) in [
            ("ou", GradientPotential::ou(alpha, 2)),
            ("logcosh", GradientPotential::ou_plus_logcosh(alpha, 0.1, 2)),
        ] {
            let field = script_u(&pot);
            let mut o = SamplerOptions::new(200, 100_000, 77);
            o.workers = WORKERS;
            let rep = accordeon_check(&field, alpha, &[0.0, 0.0], &[0.0, 0.0], &|z| z[0], 0.5, &grid, &o)
                .map_err(|e| format!("{name} alpha {alpha}: {e}"))?;
            let counted = rep.rows.iter().filter(|r| r.counted).count();
            let margin = rep
                .rows
                .iter()
                .filter(|r| r.counted)
                .map(|r| r.empirical_log_tail - r.gaussian_envelope - 3.0 * r.sigma_log)
                .fold(f64::NEG_INFINITY, f64::max);
            ok &= rep.passed;
            lines.push(format!(
                "{name} a={alpha}: counted {counted}, worst margin {margin:.3}, hess {:.4}>={:.4}",
                rep.hessian.min_eigenvalue, rep.hessian.threshold
            ));
        }
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// ρ_Φ from conditioning independent N ~ Poisson(a), M ~ Poisson(b) on M = kN, with
/// a b^k = Φ. Poisson masses come from the recursion p(n) = p(n−1)·μ/n.
fn conditional_poisson_oracle(k: u32, phi: f64, len: usize) -> Vec<f64> {
    let b = 1.3f64;
    let a = phi / b.powi(k as i32);
    let kk = k as usize;
    let mut pb = vec![(-b).exp()];
    for m in 1..=kk * len {
        let prev = pb[m - 1];
        pb.push(prev * b / m as f64);
    }
    let mut pa = (-a).exp();
    let mut w = Vec::with_capacity(len);
    for n in 0..len {
        if n > 0 {
            pa *= a / n as f64;
        }
        w.push(pa * pb[kk * n]);
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn c4_pinned_poisson() -> Outcome {
    let mut worst_tv = 0.0f64;
    let mut worst_dual = 0.0f64;
    let polys: [&dyn Fn(f64) -> f64; 4] = [&|_| 1.0, &|x| x, &|x| x * x - 2.0 * x, &|x| x * x * x - x];
    for k in 1..=3u32 {
        for phi in [0.5, 1.0, 4.0] {
            let d = rho(k, phi, 1e-16).map_err(|e| e.to_string())?;
            let len = d.pmf.len().max(40);
            let oracle = conditional_poisson_oracle(k, phi, len);
            let tv = 0.5 * (0..len).map(|n| (d.pmf(n) - oracle[n]).abs()).sum::<f64>();
            worst_tv = worst_tv.max(tv);
            worst_dual = worst_dual.max(check_duality(&d, &polys).max_residual);
        }
    }
    ensure(worst_tv <= 1e-12, || format!("TV {worst_tv:e}"))?;
    ensure(worst_dual <= 1e-10, || format!("duality residual {worst_dual:e}"))?;
    Ok(format!("max TV {worst_tv:.1e}, max duality residual {worst_dual:.1e}"))
}

fn c5_herbst() -> Outcome {
    let mut min_gap = f64::INFINITY;
    for lambda in [0.5, 1.0, 5.0] {
        for r in 1..=30 {
            let rf = r as f64;
            let hb = herbst_log_bound(lambda, rf).unwrap();
            let exact = poisson_log_tail(lambda, lambda + rf).unwrap();
            ensure(hb >= exact, || format!("lambda {lambda}, R {r}: herbst {hb} < exact {exact}"))?;
            min_gap = min_gap.min(hb - exact);
            if rf >= 4.0 * lambda {
                let bb = bobkov_log_bound(lambda, rf).unwrap();
                ensure(hb <= bb, || format!("lambda {lambda}, R {r}: herbst {hb} > bobkov {bb}"))?;
            }
        }
    }
    Ok(format!("smallest log gap to exact tail {min_gap:.3}"))
}

fn c6_pinned_envelope() -> Outcome {
    let mut lines = Vec::new();
    let mut worst_slope = 0.0f64;
    for k in 1..=3u32 {
        for phi in [0.5, 1.0, 4.0] {
            let d = rho(k, phi, FULL_SUPPORT_TOL).map_err(|e| e.to_string())?;
            let env = T70Envelope::new(k, phi).map_err(|e| e.to_string())?;
            let mean = d.mean();
            let mut fit_pts = Vec::new();
            for r in 1..=40 {
                let rf = r as f64;
                let exact = d.log_tail(mean + rf);
                if let Ok(bound) = env.log_bound(rf) {
                    ensure(exact <= bound, || format!("k {k}, phi {phi}, R {r}: {exact} > {bound}"))?;
                }
                if r >= 10 {
                    fit_pts.push((rf, exact));
                }
            }
            let fit = fit_tail_expansion(&fit_pts).map_err(|e| e.to_string())?;
            let target = -(k as f64 + 1.0);
            let rel = (fit.r_log_r / target - 1.0).abs();
            worst_slope = worst_slope.max(rel);
            ensure(rel <= 0.05, || format!("k {k}, phi {phi}: slope {} vs {target}", fit.r_log_r))?;
            if phi == 1.0 {
                lines.push(format!("k={k}: {:.3}", fit.r_log_r));
            }
        }
    }
    Ok(format!("slopes at phi=1 {}; worst relative slope error {worst_slope:.3}", lines.join(", ")))
}

struct Instances {
    lattice: Vec<(DirectedGraph, JumpIntensity)>,
    general: Vec<(DirectedGraph, JumpIntensity)>,
}

fn c7_lattice_patch(store: &mut Vec<(DirectedGraph, JumpIntensity)>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lambda = 1.0;
    let g = lattice_window(8, 8).map_err(|e| e.to_string())?;
    let lat = g.lattice().unwrap();
    let mut checked = 0;
    for i in 0..20 {
        let c = rng.random_range(0.05..0.4);
        let mut p = lattice_prescription(&g, lambda, c, &mut rng);
        let j = synth_lattice(&g, &p).map_err(|e| e.to_string())?;
        let cond = check_lattice_conditions(&g, &j, lambda, 0).map_err(|e| e.to_string())?;
        ensure(cond.passed, || format!("instance {i} is not compliant"))?;
        let rep = verify_patch_bound(&g, &j, lattice_patch_base(lambda), 10, DEFAULT_WALK_CAP)
            .map_err(|e| e.to_string())?;
        ensure(rep.passed, || format!("instance {i}: {} violations, e.g. {:?}", rep.violations, rep.witnesses.first()))?;
        checked += rep.checked;
        let (x, y) = (rng.random_range(0..7), rng.random_range(0..8));
        let key = CycleKey::edge(lat.vertex(x, y), lat.vertex(x + 1, y));
        inject_edge_violation(&mut p, key, lambda * lambda, 1.5);
        let bad = synth_lattice(&g, &p).map_err(|e| e.to_string())?;
        let rep = verify_patch_bound(&g, &bad, lattice_patch_base(lambda), 10, DEFAULT_WALK_CAP)
            .map_err(|e| e.to_string())?;
        ensure(!rep.passed && !rep.witnesses.is_empty(), || format!("instance {i}: injection not detected"))?;
        store.push((g.clone(), j));
    }
    Ok(format!("20 instances, {checked} walks checked, all injections caught"))
}

fn c8_tree_patch(store: &mut Vec<(DirectedGraph, JumpIntensity)>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let lambda = 1.0;
    let mut checked = 0;
    for i in 0..10 {
        let n = rng.random_range(4..=12);
        let g = random_graph(n, rng.random_range(1..=n / 2 + 1), &mut rng).map_err(|e| e.to_string())?;
        let (basis, mut p) = basis_prescription(&g, lambda, &mut rng).map_err(|e| e.to_string())?;
        let j = synth_basis(&g, &basis, &p, &HashMap::new()).map_err(|e| e.to_string())?;
        let cond = check_tree_conditions(&g, &j, lambda, &basis).map_err(|e| e.to_string())?;
        ensure(cond.passed, || format!("graph {i} is not compliant: {:?}", cond.witnesses.first()))?;
        let base = tree_patch_base(&g, lambda);
        let rep = verify_patch_bound(&g, &j, base, n, DEFAULT_WALK_CAP).map_err(|e| e.to_string())?;
        ensure(rep.passed, || format!("graph {i}: {:?}", rep.witnesses.first()))?;
        checked += rep.checked;
        let edges = g.edges();
        let (a, b) = edges[rng.random_range(0..edges.len())];
        inject_edge_violation(&mut p, CycleKey::edge(a, b), base * base, 1.5);
        let bad = synth_basis(&g, &basis, &p, &HashMap::new()).map_err(|e| e.to_string())?;
        let rep = verify_patch_bound(&g, &bad, base, n, DEFAULT_WALK_CAP).map_err(|e| e.to_string())?;
        ensure(!rep.passed && !rep.witnesses.is_empty(), || format!("graph {i}: injection not detected"))?;
        store.push((g, j));
    }
    Ok(format!("10 graphs, {checked} walks checked, all injections caught"))
}

fn c9_normalization(inst: &Instances) -> Outcome {
    let mut worst_phi = 0.0f64;
    let mut worst_speed = 0.0f64;
    for (g, j) in inst.lattice.iter().chain(&inst.general) {
        let (k, eig) = normalize_constant_speed(g, j).map_err(|e| e.to_string())?;
        let v = eig.eigenvalue;
        for z in 0..g.num_vertices() {
            worst_speed = worst_speed.max((k.out_rate(g, z) - v).abs() / v);
        }
        for w in enumerate_simple_closed_walks(g, 8, DEFAULT_WALK_CAP).map_err(|e| e.to_string())? {
            let d = log_phi(g, &k, &w).unwrap() - log_phi(g, j, &w).unwrap();
            worst_phi = worst_phi.max(d.abs());
        }
    }
    ensure(worst_phi <= 1e-10, || format!("characteristic drift {worst_phi:e}"))?;
    ensure(worst_speed <= 1e-10, || format!("speed spread {worst_speed:e} of v"))?;
    Ok(format!(
        "{} instances, log-characteristic drift {worst_phi:.1e}, speed spread {worst_speed:.1e}·v",
        inst.lattice.len() + inst.general.len()
    ))
}

fn c10_ctmc_exactness() -> Outcome {
    let lambda = 1.0;
    let w = 30i64;
    let g = line_window(-w, w).map_err(|e| e.to_string())?;
    let j = JumpIntensity::constant(&g, lambda).unwrap();
    let x = g.vertex("0").unwrap();
    let label = |z: usize| g.label(z).parse::<i64>().unwrap();
    let mut worst_tv = 0.0f64;
    for t in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let m = bridge_marginal(&g, &j, x, x, t).map_err(|e| e.to_string())?;
        let tv = 0.5 * m
            .pmf
            .iter()
            .enumerate()
            .map(|(z, p)| (p - skellam_bridge_pmf(lambda, t, label(z))).abs())
            .sum::<f64>();
        worst_tv = worst_tv.max(tv);
    }
    ensure(worst_tv <= 1e-10, || format!("TV {worst_tv:e}"))?;
    let n = 100_000;
    let paths = sample_bridge_paths(&g, &j, x, x, n, 10, WORKERS).map_err(|e| e.to_string())?;
    let mut worst_z = 0.0f64;
    for t in [0.25, 0.5, 0.75] {
        let m = bridge_marginal(&g, &j, x, x, t).unwrap();
        let stats: [&dyn Fn(i64) -> f64; 3] = [&|i| i as f64, &|i| (i * i) as f64, &|i| f64::from(i == 0)];
        for f in stats {
            let mean = m.expectation(|z| f(label(z)));
            let var = m.expectation(|z| (f(label(z)) - mean).powi(2));
            let emp = paths.iter().map(|p| f(label(p.state_at(t)))).sum::<f64>() / n as f64;
            let z = (emp - mean).abs() / (var / n as f64).sqrt();
            worst_z = worst_z.max(z);
            ensure(z <= 3.0, || format!("t {t}: sampled {emp} vs exact {mean} ({z:.2} sigma)"))?;
        }
    }
    Ok(format!("max TV {worst_tv:.1e}; sampled mean, E X^2 and P(X=0) within {worst_z:.2} sigma"))
}

fn c11_lattice_fit() -> Outcome {
    let (lambda, t) = (1.0f64, 0.5f64);
    let tail = exact_lattice_tail(lambda, t, 16).map_err(|e| e.to_string())?;
    let pts: Vec<(f64, f64)> = tail.tail.iter().filter(|(r, _)| (8..=16).contains(r)).map(|&(r, l)| (r as f64, l)).collect();
    let free = fit_tail_expansion(&pts).map_err(|e| e.to_string())?;
    let fixed = fit_with_fixed_lead(&pts, -2.0).map_err(|e| e.to_string())?;
    let want = (4.0 * lambda * lambda * t * (1.0 - t)).ln() + 2.0;
    ensure((free.r_log_r + 2.0).abs() <= 0.1, || format!("R log R coefficient {}", free.r_log_r))?;
    ensure((fixed.linear - want).abs() <= 0.15, || format!("slope {} vs {want}", fixed.linear))?;
    ensure(tail.mean.abs() < 1e-12, || format!("bridge mean {}", tail.mean))?;
    Ok(format!("a = {:.4}, slope = {:.4} (target {want:.4}), leak {:.1e}", free.r_log_r, fixed.linear, tail.leak))
}

fn c12_lattice_comparison() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let lambda = 1.0;
    let t = 0.5;
    let g = lattice_window(10, 10).map_err(|e| e.to_string())?.into_finite();
    let x = g.lattice().unwrap().vertex(4, 5);
    let dist = distances_from(&g, x).unwrap();
    let s_raw = JumpIntensity::constant(&g, lambda).unwrap();
    let (s, s_eig) = normalize_constant_speed(&g, &s_raw).map_err(|e| e.to_string())?;
    let ms = bridge_marginal(&g, &s, x, x, t).map_err(|e| e.to_string())?;
    let ts = ms.log_tails(&dist);
    let mut lines = Vec::new();
    for i in 0..5 {
        let c = rng.random_range(0.1..0.4);
        let p = lattice_prescription(&g, lambda, c, &mut rng);
        let j = synth_lattice(&g, &p).map_err(|e| e.to_string())?;
        let (jn, j_eig) = normalize_constant_speed(&g, &j).map_err(|e| e.to_string())?;
        let mj = bridge_marginal(&g, &jn, x, x, t).map_err(|e| e.to_string())?;
        let tj = mj.log_tails(&dist);
        let log_z = mj.p1.ln() + j_eig.eigenvalue - s_eig.eigenvalue - ms.p1.ln();
        ensure(log_z <= 1e-10, || format!("instance {i}: ln Z = {log_z}"))?;
        let mut raw_exceed = 0;
        for (r, (a, b)) in tj.iter().zip(&ts).enumerate() {
            ensure(log_z + a <= b + 1e-10, || format!("instance {i}, R {r}: {} > {b}", log_z + a))?;
            raw_exceed += usize::from(*a > b + 1e-10);
        }
        lines.push(format!("lnZ={log_z:.3} raw>{raw_exceed}"));
    }
    Ok(lines.join(", "))
}

fn c13_psi_interpolation() -> Outcome {
    let taus: Vec<f64> = (1..=100).map(|i| i as f64 * 0.05).collect();
    let mut worst = f64::NEG_INFINITY;
    for lambda in [0.5, 1.0, 2.0] {
        for f in [&(|n: usize| n as f64) as &dyn Fn(usize) -> f64, &|n: usize| -(n as f64)] {
            worst = worst.max(psi_vs_h_check(lambda, f, &taus).map_err(|e| e.to_string())?);
        }
    }
    ensure(worst <= 1e-10, || format!("psi - h reaches {worst:e}"))?;
    for k in [1u32, 2] {
        for phi in [0.5, 1.0] {
            for (name, f) in [("id", &(|n: usize| n as f64) as &dyn Fn(usize) -> f64), ("half", &|n: usize| (n / 2) as f64)] {
                let r = lemma_ll_check(k, phi, f).map_err(|e| e.to_string())?;
                ensure(r.holds, || format!("k {k}, phi {phi}, {name}: {} > {}", r.lhs, r.rhs))?;
            }
        }
    }
    Ok(format!("max psi - h = {worst:.1e}; interpolation check holds in all 8 cases"))
}

fn c14_reproducible() -> Outcome {
    let pp = || pinned_poisson_tail_table(2, 1.0, 20).map(|t| t.to_csv());
    ensure(pp().map_err(|e| e.to_string())? == pp().unwrap(), || "pinned-poisson table differs".into())?;
    let g = lattice_window(8, 8).unwrap().into_finite();
    let j = JumpIntensity::constant(&g, 1.0).unwrap();
    let x = g.lattice().unwrap().vertex(3, 3);
    let ct = || ctmc_tail_table(&g, &j, x, x, 0.5, 1.0, 5000, 99, 4).map(|r| r.table.to_csv());
    ensure(ct().map_err(|e| e.to_string())? == ct().unwrap(), || "ctmc table differs".into())?;
    let field = script_u(&GradientPotential::ou_plus_logcosh(1.0, 0.1, 2));
    let mut o = SamplerOptions::new(100, 20_000, 5);
    o.workers = 4;
    let grid: Vec<f64> = (1..=10).map(|i| i as f64 * 0.1).collect();
    let ac = || {
        accordeon_check(&field, 1.0, &[0.0, 0.0], &[0.0, 0.0], &|z| z[0], 0.5, &grid, &o)
            .map(|r| accordeon_table(&r).to_csv())
    };
    ensure(ac().map_err(|e| e.to_string())? == ac().unwrap(), || "diffusion table differs".into())?;
    Ok("pinned-poisson, ctmc and diffusion tables byte-identical".into())
}

fn main() {
    let mut inst = Instances {
        lattice: Vec::new(),
        general: Vec::new(),
    };
    let mut failed = 0;
    let mut run = |id: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS {id:>2} {name} ({secs:.1}s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id:>2} {name} ({secs:.1}s): {msg}");
            }
        }
    };
    run(1, "gamma_alpha", &mut c1_gamma);
    run(2, "ou bridge variance", &mut c2_ou_variance);
    run(3, "gaussian envelope", &mut c3_gaussian_envelope);
    run(4, "pinned poisson exactness", &mut c4_pinned_poisson);
    run(5, "herbst domination", &mut c5_herbst);
    run(6, "pinned poisson envelope", &mut c6_pinned_envelope);
    run(7, "square patch bound", &mut || c7_lattice_patch(&mut inst.lattice));
    run(8, "tree patch bound", &mut || c8_tree_patch(&mut inst.general));
    run(9, "constant-speed normalization", &mut || c9_normalization(&inst));
    run(10, "ctmc bridge exactness", &mut c10_ctmc_exactness);
    run(11, "lattice tail expansion", &mut c11_lattice_fit);
    run(12, "lattice bridge comparison", &mut c12_lattice_comparison);
    run(13, "psi and interpolation checks", &mut c13_psi_interpolation);
    run(14, "reproducibility", &mut c14_reproducible);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 14 criteria passed");
}
