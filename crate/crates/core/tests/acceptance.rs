//! Acceptance run: one line per criterion. Exits non-zero on any failure
//! except the known-false general form of criterion 4.
//! Reference values come from subset-enumeration oracles and the
//! brute-force checkers in `common`.

mod common;

use common::*;
use pumpkin::approx::approx_cover_pack;
use pumpkin::config::ThresholdRule;
use pumpkin::detect::{edge_bound, gamma, gamma_graph, has_pumpkin, lambda};
use pumpkin::exact::{branch_cover, brute_max_packing, brute_min_hitting, ic_cover};
use pumpkin::graph::{lift_model_at, minimize_model, verify_model, verify_packing, ContractionMap};
use pumpkin::hedgehog::{rooted_or_cutset, Hedgehog, HedgehogOutcome};
use pumpkin::io::{generate, Family};
use pumpkin::oracle::{Oracle, ORACLE_LIMIT};
use pumpkin::reduce::{enumerate_outgrowths, lift_cover, lift_packing, Reducer, StepKind};
use pumpkin::{MultiGraph, Params, VertexId, VertexSet};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(failures: &[String], detail: String) -> Verdict {
    let mut detail = detail;
    if let Some(first) = failures.first() {
        detail = format!("{detail}; {} failures, first: {first}", failures.len());
    }
    Verdict {
        pass: failures.is_empty(),
        detail,
    }
}

fn within(limit: Duration, start: Instant, failures: &mut Vec<String>) {
    let took = start.elapsed();
    if took > limit {
        failures.push(format!("took {:.1}s, limit {}s", took.as_secs_f64(), limit.as_secs()));
    }
}

fn is_free(g: &MultiGraph, c: u32, p: &Params) -> bool {
    has_pumpkin(g, c, p.budget).unwrap().is_none()
}

fn detection(p: &Params) -> Verdict {
    let start = Instant::now();
    let corpus = detection_corpus(500);
    let mut failures = vec![];
    let mut queries = 0;
    for (i, g) in corpus.iter().enumerate() {
        let best = Oracle::new(g).unwrap().max_pumpkin();
        for c in 1..=5u32 {
            queries += 1;
            match has_pumpkin(g, c, p.budget) {
                Ok(Some(m)) => {
                    if best < c as u64 {
                        failures.push(format!("graph {i} c={c}: model found, oracle max {best}"));
                    } else if let Err(d) = verify_model(g, &m, c) {
                        failures.push(format!("graph {i} c={c}: bad witness: {d}"));
                    }
                }
                Ok(None) if best >= c as u64 => failures.push(format!("graph {i} c={c}: missed, oracle max {best}")),
                Ok(None) => {}
                Err(e) => failures.push(format!("graph {i} c={c}: {e}")),
            }
        }
    }
    within(Duration::from_secs(300), start, &mut failures);
    verdict(
        &failures,
        format!("{} graphs, {queries} queries in {:.1}s", corpus.len(), start.elapsed().as_secs_f64()),
    )
}

/// Shared pass over the reduction corpus for the three reduction criteria.
struct ReductionRun {
    instances: usize,
    steps: usize,
    z2_steps: usize,
    preserve: Vec<String>,
    lift_checks: usize,
    lift: Vec<String>,
    outgrowths: usize,
    ratio: Vec<String>,
    /// Outgrowths whose Γ is c-pumpkin-free, the Z2 setting.
    free_outgrowths: usize,
    free_ratio: Vec<String>,
}

fn reduction_run(p: &Params) -> ReductionRun {
    let corpus = reduction_corpus(240);
    let mut run = ReductionRun {
        instances: corpus.len(),
        steps: 0,
        z2_steps: 0,
        preserve: vec![],
        lift_checks: 0,
        lift: vec![],
        outgrowths: 0,
        ratio: vec![],
        free_outgrowths: 0,
        free_ratio: vec![],
    };
    for (i, (g, c)) in corpus.iter().enumerate() {
        let c = *c;
        let (_, trace) = match Reducer::new(p.clone()).c_reduce(g, c) {
            Ok(t) => t,
            Err(e) => {
                run.preserve.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        let mut chain: Vec<&MultiGraph> = trace.snapshots.iter().collect();
        chain.push(&trace.reduced);
        let values: Vec<(usize, usize)> = chain
            .iter()
            .map(|h| {
                let o = Oracle::new(h).unwrap();
                (o.tau(c), o.nu(c))
            })
            .collect();
        run.steps += trace.steps.len();
        for (j, step) in trace.steps.iter().enumerate() {
            if step.kind != StepKind::Z1 {
                run.z2_steps += 1;
            }
            if values[j] != values[j + 1] {
                run.preserve.push(format!(
                    "instance {i} c={c} step {j} ({:?}): (tau, nu) {:?} -> {:?}",
                    step.kind,
                    values[j],
                    values[j + 1]
                ));
            }
        }

        // lifting optimal solutions of the reduced graph
        let (tau, nu) = values[0];
        let reduced = &trace.reduced;
        run.lift_checks += 1;
        let x = brute_min_hitting(reduced, c, reduced.vertex_count(), p).unwrap().hitting_set.unwrap();
        match lift_cover(&trace, &x, p.budget) {
            Ok(y) if y.len() == tau && y.len() == x.len() => {}
            Ok(y) => run.lift.push(format!("instance {i} c={c}: lifted cover {} vs tau {tau}", y.len())),
            Err(e) => run.lift.push(format!("instance {i} c={c}: lift_cover: {e}")),
        }
        let pk = brute_max_packing(reduced, c, p).unwrap();
        match lift_packing(&trace, &pk) {
            Ok(q) if q.len() == nu && verify_packing(g, &q, c).is_ok() => {}
            Ok(q) => run.lift.push(format!("instance {i} c={c}: lifted packing {} vs nu {nu}", q.len())),
            Err(e) => run.lift.push(format!("instance {i} c={c}: lift_packing: {e}")),
        }

        // λ ≤ 2γ wherever Z1 does not apply
        let mut z1_free: Vec<&MultiGraph> = trace
            .steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind != StepKind::Z1)
            .map(|(j, _)| &trace.snapshots[j])
            .collect();
        z1_free.push(&trace.reduced);
        for h in z1_free {
            if Reducer::new(p.clone()).find_z1(h, c).unwrap().is_some() {
                run.ratio.push(format!("instance {i}: Z1 still applies to a checked graph"));
                continue;
            }
            for og in enumerate_outgrowths(h) {
                run.outgrowths += 1;
                let (gm, _) = gamma(h, &og, p.budget).unwrap();
                let (lm, _) = lambda(h, &og, p.budget).unwrap();
                let free = is_free(&gamma_graph(h, &og), c, p);
                if free {
                    run.free_outgrowths += 1;
                }
                if lm > 2 * gm {
                    let msg = format!(
                        "instance {i} c={c} outgrowth ({}, {}) |C|={}: lambda {lm} > 2*gamma {gm}",
                        og.u,
                        og.v,
                        og.component.len()
                    );
                    if free {
                        run.free_ratio.push(msg.clone());
                    }
                    run.ratio.push(msg);
                }
            }
        }
    }
    run
}

fn preservation(run: &ReductionRun) -> Verdict {
    let mut failures = run.preserve.clone();
    if run.instances < 200 {
        failures.push(format!("only {} instances", run.instances));
    }
    if run.z2_steps == 0 {
        failures.push("no Z2 step exercised".into());
    }
    verdict(
        &failures,
        format!("{} instances, {} steps ({} Z2)", run.instances, run.steps, run.z2_steps),
    )
}

fn lifting(run: &ReductionRun) -> Verdict {
    verdict(&run.lift, format!("{} optimal covers and packings lifted", run.lift_checks))
}

/// The bound is checked on every outgrowth. It does not hold in that
/// generality: a Γ carrying a large pumpkin away from u and v breaks it
/// (see `lambda_bound_counterexample` in tests/reduction.rs). The bound
/// restricted to outgrowths with c-pumpkin-free Γ, which is all Z2 needs,
/// is reported alongside and must hold.
fn gamma_lambda(run: &ReductionRun) -> Verdict {
    let mut failures = run.ratio.clone();
    if run.outgrowths == 0 {
        failures.push("no outgrowth checked".into());
    }
    let mut v = verdict(
        &failures,
        format!(
            "{} outgrowths of Z1-free graphs; with free Gamma: {} checked, {} violations",
            run.outgrowths,
            run.free_outgrowths,
            run.free_ratio.len()
        ),
    );
    if let Some(first) = run.free_ratio.first() {
        v.detail = format!("{}; first with free Gamma: {first}", v.detail);
    }
    v
}

fn edge_bound_check(p: &Params) -> Verdict {
    let mut graphs: Vec<MultiGraph> = detection_corpus(500);
    for (g, c) in reduction_corpus(240) {
        let (h, _) = Reducer::new(p.clone()).c_reduce(&g, c).unwrap();
        graphs.push(g);
        graphs.push(h);
    }
    graphs.extend(exact_corpus(300));
    graphs.extend(large_corpus().into_iter().map(|(_, g)| g));
    let mut failures = vec![];
    let mut certified = 0;
    for (i, g) in graphs.iter().enumerate() {
        for c in 2..=5u32 {
            if !is_free(g, c, p) {
                continue;
            }
            certified += 1;
            let bound = edge_bound(c, g.vertex_count());
            let expect = (c as u64 - 1) * (2 * c as u64 - 1) * g.vertex_count() as u64;
            if bound != expect || g.edge_count() > bound {
                failures.push(format!("graph {i} c={c}: {} edges, bound {bound}", g.edge_count()));
            }
        }
    }
    if certified == 0 {
        failures.push("no graph certified free".into());
    }
    verdict(&failures, format!("{certified} certified-free (graph, c) pairs"))
}

fn exact_solvers(p: &Params) -> Verdict {
    let start = Instant::now();
    let corpus = exact_corpus(300);
    let mut failures = vec![];
    let mut runs = 0;
    for (i, g) in corpus.iter().enumerate() {
        let oracle = Oracle::new(g).unwrap();
        let vc = brute_vertex_cover(g);
        let fvs = brute_fvs(g);
        if oracle.tau(1) != vc || oracle.tau(2) != fvs {
            failures.push(format!("graph {i}: oracle tau disagrees with vertex cover or FVS"));
        }
        for c in 1..=3u32 {
            let tau = oracle.tau(c);
            for k in 0..=4usize {
                let expect = match c {
                    1 => vc <= k,
                    2 => fvs <= k,
                    _ => tau <= k,
                };
                for (name, res) in [("branch", branch_cover(g, c, k, p)), ("ic", ic_cover(g, c, k, p))] {
                    runs += 1;
                    match res {
                        Ok(r) if r.feasible != expect => failures.push(format!(
                            "graph {i} c={c} k={k}: {name} says {}, tau {tau}",
                            r.feasible
                        )),
                        Ok(r) => {
                            if let Some(x) = &r.hitting_set {
                                if x.len() > k || !is_free(&g.without(x), c, p) {
                                    failures.push(format!("graph {i} c={c} k={k}: {name} returned a bad set"));
                                }
                            }
                        }
                        Err(e) => failures.push(format!("graph {i} c={c} k={k}: {name}: {e}")),
                    }
                }
            }
        }
    }
    within(Duration::from_secs(600), start, &mut failures);
    verdict(
        &failures,
        format!("{} graphs, {runs} solver runs in {:.1}s", corpus.len(), start.elapsed().as_secs_f64()),
    )
}

fn approximation(p: &Params) -> Verdict {
    let mut cases: Vec<(String, MultiGraph, u32)> = vec![];
    for (i, g) in detection_corpus(500).into_iter().enumerate() {
        cases.push((format!("detect-{i}"), g, 1 + (i % 5) as u32));
    }
    for (i, (g, c)) in reduction_corpus(240).into_iter().enumerate() {
        cases.push((format!("reduce-{i}"), g, c));
    }
    for (i, g) in exact_corpus(300).into_iter().enumerate() {
        cases.push((format!("exact-{i}"), g, 1 + (i % 3) as u32));
    }
    for (name, g) in large_corpus() {
        for c in 1..=3 {
            cases.push((name.clone(), g.clone(), c));
        }
    }
    let mut failures = vec![];
    let mut sandwiched = 0;
    for (name, g, c) in &cases {
        let cert = match approx_cover_pack(g, *c, p) {
            Ok(cert) => cert,
            Err(e) => {
                failures.push(format!("{name} c={c}: {e}"));
                continue;
            }
        };
        if !is_free(&g.without(&cert.cover), *c, p) {
            failures.push(format!("{name} c={c}: cover misses a model"));
        }
        if let Err(e) = verify_packing(g, &cert.packing, *c) {
            failures.push(format!("{name} c={c}: packing: {e}"));
        }
        if !cert.ratio_holds {
            failures.push(format!(
                "{name} c={c}: ratio {} vs {}",
                cert.cover_size, cert.packing_size
            ));
        }
        if g.vertex_count() <= ORACLE_LIMIT {
            sandwiched += 1;
            let o = Oracle::new(g).unwrap();
            let (tau, nu) = (o.tau(*c), o.nu(*c));
            if !(cert.packing_size <= nu && nu <= tau && tau <= cert.cover_size) {
                failures.push(format!(
                    "{name} c={c}: packing {} nu {nu} tau {tau} cover {}",
                    cert.packing_size, cert.cover_size
                ));
            }
        }
    }
    verdict(
        &failures,
        format!("{} runs, {sandwiched} checked against oracles", cases.len()),
    )
}

fn hedgehog_of(path_len: usize, density: f64, seed: u64, extra_mult: bool) -> Hedgehog {
    let mut g = generate(&Family::Hedgehog { path_len, density }, seed).unwrap().to_graph().unwrap();
    if extra_mult {
        let mut r = rng(seed);
        for i in 0..path_len as u32 - 1 {
            if r.gen_bool(0.05) {
                g.add_edge(VertexId(i), VertexId(i + 1), 1).unwrap();
            }
        }
    }
    Hedgehog::new(g, (0..path_len as u32).map(VertexId).collect()).unwrap()
}

fn hedgehogs(p: &Params) -> Verdict {
    let mut failures = vec![];
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    // c = 1 at the full threshold: no fallback allowed
    let t1 = ThresholdRule::Full.threshold(1) as usize;
    for seed in 0..60u64 {
        let mut r = rng(seed);
        let len = r.gen_range(t1..=t1 + 150);
        let density = [0.0, 0.05, 0.3, 1.0][seed as usize % 4];
        let h = hedgehog_of(len, density, seed, seed % 2 == 1);
        match rooted_or_cutset(&h, 1, ThresholdRule::Full, p.budget) {
            Ok(rep) => {
                *counts.entry(format!("c1:{:?}", rep.case)).or_default() += 1;
                if rep.fallback || !h.check(&rep.outcome, 1) || rep.outcome == HedgehogOutcome::Neither {
                    failures.push(format!("c=1 seed {seed}: {:?} fallback={}", rep.case, rep.fallback));
                }
            }
            Err(e) => failures.push(format!("c=1 seed {seed}: {e}")),
        }
    }
    // c = 2 at a lowered threshold, fallback allowed
    let rule = ThresholdRule::Uniform(1000);
    for seed in 0..40u64 {
        let mut r = rng(100 + seed);
        let len = r.gen_range(1000..=1100);
        let density = [0.0, 0.002, 0.02, 0.3][seed as usize % 4];
        let h = hedgehog_of(len, density, 100 + seed, seed % 2 == 0);
        match rooted_or_cutset(&h, 2, rule, p.budget) {
            Ok(rep) => {
                *counts.entry(format!("c2:{:?}", rep.case)).or_default() += 1;
                if !h.check(&rep.outcome, 2) {
                    failures.push(format!("c=2 seed {seed}: {:?} does not verify", rep.case));
                }
            }
            Err(e) => failures.push(format!("c=2 seed {seed}: {e}")),
        }
    }
    let summary: Vec<String> = counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    verdict(&failures, format!("100 hedgehogs, cases {}", summary.join(" ")))
}

/// Bags are BFS balls of radius `radius` around random centres, so each
/// has diameter at most 2·radius inside the graph.
fn contraction_scenario(seed: u64) -> (MultiGraph, Vec<VertexSet>, u32) {
    let mut r = rng(5000 + seed);
    let n = r.gen_range(12..=30);
    let total = r.gen_range(2 * n as u32..=4 * n as u32);
    let g = random_multigraph(&mut r, n, total);
    let radius = r.gen_range(0..=2usize);
    let mut free: VertexSet = g.vertex_set();
    let mut order: Vec<VertexId> = g.vertices().collect();
    order.shuffle(&mut r);
    let mut bags = vec![];
    for centre in order {
        if !free.contains(&centre) {
            continue;
        }
        let dist = g.distances_within(centre, &free);
        let bag: VertexSet = dist.into_iter().filter(|&(_, d)| d <= radius).map(|(v, _)| v).collect();
        for v in &bag {
            free.remove(v);
        }
        bags.push(bag);
    }
    (g, bags, r.gen_range(1..=3))
}

fn contractions(p: &Params) -> Verdict {
    let mut failures = vec![];
    let mut lifted = 0;
    for seed in 0..100u64 {
        let (g, bags, c) = contraction_scenario(seed);
        let (h, cm) = ContractionMap::contract(&g, &bags).unwrap();
        let k = cm.max_diameter();
        let Some(m) = has_pumpkin(&h, c, p.budget).unwrap() else {
            continue;
        };
        let m = minimize_model(&h, &m, c).unwrap();
        let s = m.size();
        match lift_model_at(&g, &cm, &m, c, k) {
            Ok(big) => {
                lifted += 1;
                if let Err(d) = verify_model(&g, &big, c) {
                    failures.push(format!("scenario {seed}: lifted model invalid: {d}"));
                }
                let bound = k.max(1) * c as usize * s;
                if big.size() > bound {
                    failures.push(format!("scenario {seed}: size {} > k·c·s = {bound}", big.size()));
                }
            }
            Err(e) => failures.push(format!("scenario {seed}: {e}")),
        }
    }
    if lifted < 50 {
        failures.push(format!("only {lifted} scenarios had a model"));
    }
    verdict(&failures, format!("100 scenarios, {lifted} models lifted"))
}

fn strip_timing(v: &mut serde_json::Value) {
    if let Some(o) = v.as_object_mut() {
        o.remove("timing");
        for x in o.values_mut() {
            strip_timing(x);
        }
    } else if let Some(a) = v.as_array_mut() {
        a.iter_mut().for_each(strip_timing);
    }
}

fn normalize(stdout: &[u8]) -> String {
    let text = String::from_utf8_lossy(stdout).into_owned();
    if let Ok(mut v) = serde_json::from_str::<serde_json::Value>(&text) {
        strip_timing(&mut v);
        return v.to_string();
    }
    // bench CSV: drop the *_ms columns
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map(|h| h.clone()).unwrap_or_default();
    let keep: Vec<usize> = (0..headers.len()).filter(|&i| !headers[i].ends_with("_ms")).collect();
    let mut out = String::new();
    for rec in rdr.records().flatten() {
        let row: Vec<&str> = keep.iter().map(|&i| &rec[i]).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn cli_determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_pumpkin");
    let dir = tempfile::tempdir().unwrap();
    let path = |f: &str| dir.path().join(f).to_string_lossy().into_owned();
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let mut failures = vec![];

    let gen = run(&["generate", "random-multigraph", "--n", "10", "--p", "0.3", "--seed", "7", "--out", &path("g.txt")]);
    if !gen.status.success() {
        return verdict(&["generate failed".into()], String::new());
    }
    run(&["generate", "planted-pumpkins", "--count", "3", "--c", "2", "--seed", "3", "--out", &path("p.txt")]);
    std::fs::write(path("sol.json"), r#"{"cover": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]}"#).unwrap();
    let g = path("g.txt");
    let pl = path("p.txt");
    let commands: Vec<Vec<&str>> = vec![
        vec!["generate", "hedgehog", "--path-len", "20", "--seed", "5"],
        vec!["generate", "cactus", "--n", "15", "--seed", "5"],
        vec!["detect", &g],
        vec!["detect", &pl, "--c", "2"],
        vec!["reduce", &g, "--c", "2"],
        vec!["approx", &g, "--c", "2"],
        vec!["approx", &pl, "--c", "3"],
        vec!["exact", &g, "--c", "2", "--k", "3"],
        vec!["exact", &g, "--c", "2", "--k", "3", "--solver", "ic"],
        vec!["verify", &g, "--c", "1", "--solution", "SOL"],
        vec!["bench", "--count", "5", "--n", "8", "--seed", "11", "--c", "1,2"],
    ];
    let sol = path("sol.json");
    for cmd in &commands {
        let args: Vec<&str> = cmd.iter().map(|&a| if a == "SOL" { sol.as_str() } else { a }).collect();
        let a = run(&args);
        let b = run(&args);
        if a.status.code() != b.status.code() || normalize(&a.stdout) != normalize(&b.stdout) {
            failures.push(format!("`{}` differs between runs", cmd[0]));
        }
        if a.stdout.is_empty() {
            failures.push(format!("`{}` printed nothing", cmd.join(" ")));
        }
    }
    verdict(&failures, format!("{} commands run twice", commands.len()))
}

fn main() {
    let p = Params::default();
    let mut results: Vec<(u32, &str, Verdict)> = vec![];
    let guard = |f: &dyn Fn() -> Verdict| -> Verdict {
        catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Verdict {
                pass: false,
                detail: format!("panicked: {msg}"),
            }
        })
    };
    let mut report = |id: u32, name: &'static str, v: Verdict| {
        println!(
            "criterion {id:>2} {name}: {} ({})",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        results.push((id, name, v));
    };

    report(1, "detection matches oracle", guard(&|| detection(&p)));
    let run = catch_unwind(AssertUnwindSafe(|| reduction_run(&p)));
    match &run {
        Ok(run) => {
            report(2, "reductions preserve tau and nu", preservation(run));
            report(3, "cover and packing lifting", lifting(run));
            report(4, "lambda at most twice gamma", gamma_lambda(run));
        }
        Err(_) => {
            for (id, name) in [
                (2, "reductions preserve tau and nu"),
                (3, "cover and packing lifting"),
                (4, "lambda at most twice gamma"),
            ] {
                report(id, name, Verdict { pass: false, detail: "reduction run panicked".into() });
            }
        }
    }
    report(5, "edge bound on free graphs", guard(&|| edge_bound_check(&p)));
    report(6, "exact solvers", guard(&|| exact_solvers(&p)));
    report(7, "approximation certificate", guard(&|| approximation(&p)));
    report(8, "hedgehog outcomes", guard(&|| hedgehogs(&p)));
    report(9, "contraction lifting bound", guard(&|| contractions(&p)));
    report(10, "CLI determinism", guard(&cli_determinism));

    let failed: Vec<u32> = results.iter().filter(|(_, _, v)| !v.pass).map(|(id, _, _)| *id).collect();
    println!("{} of {} criteria passed", results.len() - failed.len(), results.len());
    // Criterion 4 states a bound that is false for outgrowths whose Γ has a
    // c-pumpkin; it is reported as failing but does not fail the run as
    // long as the restricted bound holds.
    let restricted_ok = run.as_ref().is_ok_and(|r| r.free_ratio.is_empty() && r.free_outgrowths > 0);
    let unexpected: Vec<u32> = failed.iter().copied().filter(|&id| !(id == 4 && restricted_ok)).collect();
    if failed.contains(&4) && restricted_ok {
        println!("criterion 4 fails on outgrowths with a pumpkin inside Gamma; the bound holds on every outgrowth with free Gamma");
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
