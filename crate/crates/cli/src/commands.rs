use std::collections::HashMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use bridgelab::characteristics::{
    check_lattice_conditions, check_tree_conditions, lattice_patch_base, log_phi, parse_rates, tree_patch_base,
    verify_patch_bound, CharacteristicReport, JumpIntensity, Speed,
};
use bridgelab::diffusion::{accordeon_check, script_u, GradientPotential, SamplerOptions};
use bridgelab::graph::{
    build_graph, lattice_window, parse_arc_list, spanning_tree, t_basis, ClosedWalkBasis, DirectedGraph,
    OrientationRule, Walk,
};
use bridgelab::report::{accordeon_table, ctmc_tail_table, pinned_poisson_tail_table};
use bridgelab::synthesis::{
    normalize_constant_speed, synth_basis, synth_lattice, CharacteristicPrescription, CycleKey, PrescriptionDomain,
};

use crate::output::{schema, schema_names, validate, Outputs};
use crate::{BridgeCmd, CharCmd, Cli, Cmd, DiffusionArgs, GraphSource, PinnedCmd, ReportCmd, SynthCmd, WORKERS_ENV};

struct Done {
    code: i32,
    run: Value,
}

fn done(passed: bool, run: Value) -> Done {
    Done {
        code: if passed { 0 } else { 2 },
        run,
    }
}

fn workers(cli: &Cli) -> Result<usize> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().with_context(|| format!("{WORKERS_ENV}={v:?}"))?;
        return Ok(n.max(1));
    }
    Ok(cli
        .common
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn graph_from_file(path: &Path) -> Result<DirectedGraph> {
    Ok(build_graph(&parse_arc_list(&read(path)?)?)?)
}

fn load_graph(src: &GraphSource) -> Result<DirectedGraph> {
    match (&src.graph, &src.lattice) {
        (Some(p), _) => graph_from_file(p),
        (None, Some(wh)) => {
            let g = lattice_window(wh[0], wh[1])?;
            Ok(if src.finite { g.into_finite() } else { g })
        }
        (None, None) => bail!("give --graph FILE or --lattice W H"),
    }
}

fn load_rates(g: &DirectedGraph, path: &Path) -> Result<JumpIntensity> {
    Ok(JumpIntensity::from_labeled(g, &parse_rates(&read(path)?)?)?)
}

fn root(g: &DirectedGraph, label: &Option<String>) -> Result<usize> {
    Ok(match label {
        Some(l) => g.vertex(l)?,
        None => 0,
    })
}

fn basis(g: &DirectedGraph, r: &Option<String>) -> Result<ClosedWalkBasis> {
    let tree = spanning_tree(g, root(g, r)?)?;
    Ok(t_basis(g, &tree, OrientationRule::LexSmaller)?)
}

fn condition_json(rep: &CharacteristicReport, lambda: f64, extra: Value) -> Result<Value> {
    let mut v = serde_json::to_value(rep)?;
    v["lambda"] = json!(lambda);
    if let Value::Object(m) = extra {
        for (k, x) in m {
            v[k] = x;
        }
    }
    Ok(v)
}

fn speed_json(j: &JumpIntensity) -> Value {
    match j.speed() {
        Speed::Constant(v) => json!(v),
        Speed::NonConstant => Value::Null,
    }
}

fn characteristics(cmd: &CharCmd, out: &mut Outputs) -> Result<Done> {
    match cmd {
        CharCmd::CheckLattice { src, rates, lambda, margin } => {
            let g = load_graph(src)?;
            let j = load_rates(&g, rates)?;
            let rep = check_lattice_conditions(&g, &j, *lambda, *margin)?;
            out.write_json("report.json", &condition_json(&rep, *lambda, json!({ "margin": margin }))?)?;
            Ok(done(rep.passed, json!({ "checked": rep.checked, "violations": rep.violations })))
        }
        CharCmd::CheckTree { graph, rates, lambda, root: r } => {
            let g = graph_from_file(graph)?;
            let j = load_rates(&g, rates)?;
            let b = basis(&g, r)?;
            let rep = check_tree_conditions(&g, &j, *lambda, &b)?;
            out.write_json("report.json", &condition_json(&rep, *lambda, json!({}))?)?;
            Ok(done(rep.passed, json!({ "checked": rep.checked, "violations": rep.violations })))
        }
        CharCmd::Patch {
            src,
            rates,
            lambda,
            base,
            max_len,
            cap,
        } => {
            let g = load_graph(src)?;
            let j = load_rates(&g, rates)?;
            let base = base.unwrap_or_else(|| {
                if g.lattice().is_some() {
                    lattice_patch_base(*lambda)
                } else {
                    tree_patch_base(&g, *lambda)
                }
            });
            let rep = verify_patch_bound(&g, &j, base, *max_len, *cap)?;
            out.write_json(
                "report.json",
                &condition_json(&rep, *lambda, json!({ "base": base, "max_len": max_len }))?,
            )?;
            Ok(done(rep.passed, json!({ "checked": rep.checked, "violations": rep.violations, "base": base })))
        }
        CharCmd::Basis { src, root: r } => {
            let g = load_graph(src)?;
            let b = basis(&g, r)?;
            let pair = |&(a, c): &(usize, usize)| json!([g.label(a), g.label(c)]);
            let v = json!({
                "root": g.label(b.tree.root()),
                "tree_edges": b.tree.edges().iter().map(pair).collect::<Vec<_>>(),
                "two_cycles": b.two_cycles.iter().map(pair).collect::<Vec<_>>(),
                "off_tree": b.off_tree.iter().map(pair).collect::<Vec<_>>(),
                "cycles": b.chosen.iter().map(|c| c.labels(&g)).collect::<Vec<_>>(),
            });
            out.write_json("basis.json", &v)?;
            Ok(done(true, json!({ "cycles": b.chosen.len() })))
        }
    }
}

/// Largest |ln Φ_j − ln φ| over the prescribed walks.
fn round_trip_error(g: &DirectedGraph, j: &JumpIntensity, p: &CharacteristicPrescription, b: Option<&ClosedWalkBasis>) -> Result<f64> {
    let mut worst = 0.0f64;
    for (k, &v) in &p.values {
        let w = match *k {
            CycleKey::Edge(a, c) => Walk::new(g, vec![a, c, a])?,
            CycleKey::Face(a) => {
                let lat = g.lattice().ok_or_else(|| anyhow!("face value on a non-lattice graph"))?;
                let (x, y) = lat.coords(a);
                lat.face(x, y)
            }
            CycleKey::Cycle(a, c) => {
                let b = b.ok_or_else(|| anyhow!("cycle value without a basis"))?;
                let i = b.off_tree.iter().position(|&e| e == (a, c)).ok_or_else(|| anyhow!("no basis cycle for {a}-{c}"))?;
                b.chosen[i].clone()
            }
        };
        worst = worst.max((log_phi(g, j, &w)? - v.ln()).abs());
    }
    Ok(worst)
}

fn synth(cmd: &SynthCmd, out: &mut Outputs) -> Result<Done> {
    let (g, j, err) = match cmd {
        SynthCmd::Lattice { lattice, prescription } => {
            let g = lattice_window(lattice[0], lattice[1])?;
            let p = CharacteristicPrescription::parse(&g, &read(prescription)?, PrescriptionDomain::LatticeFacesAndEdges, f64::INFINITY)?;
            let j = synth_lattice(&g, &p)?;
            let err = round_trip_error(&g, &j, &p, None)?;
            (g, j, Some(err))
        }
        SynthCmd::Basis { graph, prescription, root: r } => {
            let g = graph_from_file(graph)?;
            let b = basis(&g, r)?;
            let p = CharacteristicPrescription::parse(&g, &read(prescription)?, PrescriptionDomain::TreeBasis, f64::INFINITY)?;
            let j = synth_basis(&g, &b, &p, &HashMap::new())?;
            let err = round_trip_error(&g, &j, &p, Some(&b))?;
            (g, j, Some(err))
        }
        SynthCmd::Normalize { src, rates } => {
            let g = load_graph(src)?;
            let j = load_rates(&g, rates)?;
            let (k, eig) = normalize_constant_speed(&g, &j)?;
            out.write("rates.txt", &k.to_text(&g))?;
            let v = json!({
                "vertices": g.num_vertices(),
                "arcs": g.num_arcs(),
                "speed": speed_json(&k),
                "eigenvalue": eig.eigenvalue,
                "residual": eig.residual,
                "iterations": eig.iterations,
                "round_trip_error": Value::Null,
            });
            out.write_json("report.json", &v)?;
            return Ok(done(true, json!({ "eigenvalue": eig.eigenvalue })));
        }
    };
    out.write("rates.txt", &j.to_text(&g))?;
    let v = json!({
        "vertices": g.num_vertices(),
        "arcs": g.num_arcs(),
        "speed": speed_json(&j),
        "eigenvalue": Value::Null,
        "residual": Value::Null,
        "iterations": Value::Null,
        "round_trip_error": err,
    });
    out.write_json("report.json", &v)?;
    Ok(done(true, json!({ "round_trip_error": err })))
}

fn diffusion_run(pot: GradientPotential, name: &str, a: &DiffusionArgs, seed: u64, workers: usize, out: &mut Outputs) -> Result<Done> {
    let d = a.dim;
    let pick = |v: &Vec<f64>, what: &str| -> Result<Vec<f64>> {
        match v.len() {
            0 => Ok(vec![0.0; d]),
            n if n == d => Ok(v.clone()),
            n => bail!("--{what} has {n} coordinates, --dim is {d}"),
        }
    };
    let (x, y) = (pick(&a.x, "x")?, pick(&a.y, "y")?);
    if !(a.r_step > 0.0) || !(a.r_max >= a.r_step) {
        bail!("need 0 < --r-step <= --r-max");
    }
    let n_r = (a.r_max / a.r_step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (1..=n_r).map(|i| i as f64 * a.r_step).collect();
    let mut opts = SamplerOptions::new(a.steps, a.paths, seed);
    opts.workers = workers;
    opts.certified_box = a.certified_box.map(|h| vec![(-h, h); d]);
    let field = script_u(&pot);
    let rep = accordeon_check(&field, a.alpha, &x, &y, &|z| z[0], a.t, &grid, &opts)?;
    out.write("tail.csv", &accordeon_table(&rep).to_csv())?;
    let v = json!({
        "potential": name,
        "alpha": a.alpha,
        "t": a.t,
        "dim": d,
        "gamma": rep.gamma,
        "mean_f": rep.mean_f,
        "effective_sample_size": rep.effective_sample_size,
        "box_leak_fraction": rep.box_leak_fraction,
        "counted_rows": rep.rows.iter().filter(|r| r.counted).count(),
        "hessian": rep.hessian,
        "passed": rep.passed,
    });
    out.write_json("summary.json", &v)?;
    Ok(done(
        rep.passed,
        json!({
            "seed": seed,
            "M": a.steps,
            "ess": rep.effective_sample_size,
            "box_leak_fraction": rep.box_leak_fraction,
        }),
    ))
}

fn bridge(cmd: &BridgeCmd, seed: u64, workers: usize, out: &mut Outputs) -> Result<Done> {
    match cmd {
        BridgeCmd::Ctmc {
            src,
            rates,
            from,
            to,
            t,
            paths,
            lambda,
        } => {
            let g = load_graph(src)?;
            let j = match rates {
                Some(p) => load_rates(&g, p)?,
                None => JumpIntensity::constant(&g, *lambda)?,
            };
            let (x, y) = (g.vertex(from)?, g.vertex(to)?);
            let r = ctmc_tail_table(&g, &j, x, y, *t, *lambda, *paths, seed, workers)?;
            out.write("tail.csv", &r.table.to_csv())?;
            let v = json!({
                "from": from,
                "to": to,
                "t": t,
                "lambda": lambda,
                "leak": r.leak,
                "p1": r.p1,
                "paths": r.paths,
                "rows": r.table.rows.len(),
            });
            out.write_json("summary.json", &v)?;
            Ok(done(true, json!({ "seed": seed, "paths": paths, "leak": r.leak })))
        }
        BridgeCmd::Ou { run } => diffusion_run(GradientPotential::ou(run.alpha, run.dim), "ou", run, seed, workers, out),
        BridgeCmd::Diffusion {
            potential,
            eps,
            a,
            fd_step,
            run,
        } => {
            let mut p = GradientPotential::from_name(potential, run.alpha, *eps, *a, run.dim)?;
            if let Some(h) = fd_step {
                p = p.finite_difference(*h);
            }
            diffusion_run(p, potential, run, seed, workers, out)
        }
    }
}

fn report(cmd: &ReportCmd) -> Result<Done> {
    match cmd {
        ReportCmd::Check { file, schema: name } => {
            let v: Value = serde_json::from_str(&read(file)?).with_context(|| format!("parsing {}", file.display()))?;
            let errors = validate(name, &v)?;
            for e in &errors {
                println!("{e}");
            }
            if errors.is_empty() {
                println!("{} is a valid {name}", file.display());
            }
            Ok(done(errors.is_empty(), json!({ "schema": name, "errors": errors.len() })))
        }
        ReportCmd::Schema { name } => {
            match name {
                Some(n) => println!("{}", serde_json::to_string_pretty(&schema(n)?)?),
                None => schema_names().iter().for_each(|n| println!("{n}")),
            }
            Ok(done(true, Value::Null))
        }
    }
}

pub fn dispatch(cli: &Cli, command: &str) -> Result<i32> {
    let workers = workers(cli)?;
    let seed = cli.common.seed;
    let mut out = Outputs::new(&cli.common.out)?;
    let res = match &cli.cmd {
        Cmd::Characteristics { cmd } => characteristics(cmd, &mut out)?,
        Cmd::Synth { cmd } => synth(cmd, &mut out)?,
        Cmd::PinnedPoisson {
            cmd: PinnedCmd::Tail { k, phi, r_max },
        } => {
            let t = pinned_poisson_tail_table(*k, *phi, *r_max)?;
            out.write("tail.csv", &t.to_csv())?;
            done(true, json!({ "k": k, "phi": phi, "r_max": r_max }))
        }
        Cmd::Bridge { cmd } => bridge(cmd, seed, workers, &mut out)?,
        Cmd::Report { cmd } => report(cmd)?,
    };
    let mut config = serde_json::to_value(cli)?;
    config["common"]["workers"] = json!(workers);
    out.finish(command, config, seed, workers, res.code, res.run)?;
    Ok(res.code)
}
