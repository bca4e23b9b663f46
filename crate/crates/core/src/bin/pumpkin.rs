use clap::{Args, Parser, Subcommand, ValueEnum};
use pumpkin::approx::approx_cover_pack;
use pumpkin::config::{Params, ThresholdRule};
use pumpkin::detect::{has_pumpkin, max_pumpkin, AnchoredQuery};
use pumpkin::exact::{branch_cover, ic_cover};
use pumpkin::graph::{verify_model, verify_packing, MultiGraph, PumpkinModel, VertexSet};
use pumpkin::io::{generate, Family, InstanceFile, RunReport, Timing};
use pumpkin::oracle::{Oracle, ORACLE_LIMIT};
use pumpkin::reduce::Reducer;
use pumpkin::PumpkinError;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "pumpkin", version, about = "Cover and pack c-pumpkin minors in multigraphs")]
struct Cli {
    #[command(flatten)]
    tune: Tuning,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Tuning {
    /// Node expansions per detection query.
    #[arg(long, global = true, env = "PUMPKIN_BUDGET")]
    budget: Option<u64>,
    /// Largest component a Z2 candidate may have.
    #[arg(long, global = true, env = "PUMPKIN_Z2_CAP")]
    z2_cap: Option<usize>,
    /// full, uniform:N or linear:N.
    #[arg(long, global = true, env = "PUMPKIN_HEDGEHOG_THRESHOLD")]
    hedgehog_threshold: Option<ThresholdRule>,
    #[arg(long, global = true, env = "PUMPKIN_SKELETON_K")]
    skeleton_k: Option<usize>,
    #[arg(long, global = true, env = "PUMPKIN_SKELETON_R")]
    skeleton_r: Option<usize>,
    #[arg(long, global = true, env = "PUMPKIN_SKELETON_B")]
    skeleton_b: Option<usize>,
    #[arg(long, global = true, env = "PUMPKIN_F_EFF")]
    f_eff: Option<f64>,
    #[arg(long, global = true, env = "PUMPKIN_H_EFF")]
    h_eff: Option<f64>,
    /// Longest path branched on by rule B.
    #[arg(long, global = true, env = "PUMPKIN_RULE_B_LEN")]
    rule_b_len: Option<usize>,
    #[arg(long, global = true, env = "PUMPKIN_ORACLE_LIMIT")]
    oracle_limit: Option<usize>,
    /// Reject duplicate edge records instead of merging them.
    #[arg(long, global = true, env = "PUMPKIN_STRICT")]
    strict: bool,
}

impl Tuning {
    fn params(&self) -> Params {
        let mut p = Params::default();
        if let Some(v) = self.budget {
            p.budget = v;
        }
        if let Some(v) = self.z2_cap {
            p.z2_component_cap = v;
        }
        if let Some(v) = self.hedgehog_threshold {
            p.hedgehog_rule = v;
        }
        p.skeleton_k = self.skeleton_k.or(p.skeleton_k);
        p.skeleton_r = self.skeleton_r.or(p.skeleton_r);
        if let Some(v) = self.skeleton_b {
            p.skeleton_b = v;
        }
        p.f_eff = self.f_eff.or(p.f_eff);
        if let Some(v) = self.h_eff {
            p.h_eff = v;
        }
        if let Some(v) = self.rule_b_len {
            p.rule_b_len = v;
        }
        if let Some(v) = self.oracle_limit {
            p.oracle_limit = v;
        }
        p
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Branch,
    Ic,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    RandomMultigraph,
    PlantedPumpkins,
    Cactus,
    Hedgehog,
    Regular,
}

#[derive(Subcommand)]
enum Command {
    /// Largest pumpkin and a witness model.
    Detect {
        instance: PathBuf,
        /// Also report whether a c-pumpkin exists.
        #[arg(long)]
        c: Option<u32>,
    },
    /// Apply Z1/Z2 until neither applies; print the reduced instance and trace.
    Reduce {
        instance: PathBuf,
        #[arg(long)]
        c: u32,
    },
    /// Cover and packing with the ratio certificate.
    Approx {
        instance: PathBuf,
        #[arg(long)]
        c: u32,
    },
    /// Decide whether a hitting set of size at most k exists.
    Exact {
        instance: PathBuf,
        #[arg(long)]
        c: u32,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "branch")]
        solver: Solver,
    },
    /// Check a cover and/or packing given as JSON.
    Verify {
        instance: PathBuf,
        #[arg(long)]
        c: u32,
        /// JSON with `cover` or `hitting_set` and/or `packing`; a run report is also accepted.
        #[arg(long)]
        solution: PathBuf,
    },
    /// Approximation against oracles over a corpus, as CSV.
    Bench {
        /// Directory of instance files; without it a random corpus is generated.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        c: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated instance.
    Generate {
        #[arg(value_enum)]
        family: FamilyName,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        max_mult: u32,
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        c: u32,
        #[arg(long, default_value = "path")]
        glue: String,
        #[arg(long, default_value_t = 64)]
        path_len: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<PumpkinError> for Failure {
    fn from(e: PumpkinError) -> Self {
        use PumpkinError::*;
        let code = match e {
            BudgetExceeded { .. } => 3,
            Internal(_) | SizeBound { .. } | NotAHittingSet { .. } | Contraction(_) => 1,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn input_error(msg: String) -> Failure {
    Failure { code: 2, msg }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load(path: &Path, strict: bool) -> Result<MultiGraph, Failure> {
    let (f, warnings) = InstanceFile::parse(&read(path)?, strict)?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(f.to_graph()?)
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| input_error(format!("{}: {e}", p.display()))),
        None => {
            // a closed pipe downstream is not an error here
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn emit(report: RunReport) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(&report).map_err(|e| input_error(e.to_string()))?;
    write_out(None, &format!("{text}\n"))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let params = cli.tune.params();
    let strict = cli.tune.strict;
    let start = Instant::now();
    let report = |command: &str, instance: &Path, c: Option<u32>, payload: Value, verified: BTreeMap<String, bool>| RunReport {
        command: command.into(),
        instance: instance.display().to_string(),
        c,
        params: params.clone(),
        payload,
        verified,
        timing: Timing {
            wall_ms: start.elapsed().as_secs_f64() * 1000.0,
        },
    };
    match cli.cmd {
        Command::Detect { instance, c } => {
            let g = load(&instance, strict)?;
            let (value, witness) = max_pumpkin(&AnchoredQuery::new(&g, u32::MAX), params.budget)?;
            let mut verified = BTreeMap::new();
            if let Some(m) = &witness {
                verified.insert("witness".into(), verify_model(&g, m, value).is_ok());
            }
            let mut payload = json!({ "max_pumpkin": value, "witness": witness });
            if let Some(c) = c {
                payload["has_pumpkin"] = json!(value >= c);
            }
            emit(report("detect", &instance, c, payload, verified))?;
            Ok(0)
        }
        Command::Reduce { instance, c } => {
            let g = load(&instance, strict)?;
            let (h, trace) = Reducer::new(params.clone()).c_reduce(&g, c)?;
            let replay_ok = trace.replay().map(|r| r == h).unwrap_or(false);
            let payload = json!({
                "reduced_instance": InstanceFile::from_graph(&h).serialize(),
                "trace": trace,
            });
            emit(report("reduce", &instance, Some(c), payload, BTreeMap::from([("replay".into(), replay_ok)])))?;
            Ok(0)
        }
        Command::Approx { instance, c } => {
            let g = load(&instance, strict)?;
            let cert = approx_cover_pack(&g, c, &params)?;
            let cover_ok = has_pumpkin(&g.without(&cert.cover), c, params.budget)?.is_none();
            let packing_ok = verify_packing(&g, &cert.packing, c).is_ok();
            let verified = BTreeMap::from([
                ("cover".into(), cover_ok),
                ("packing".into(), packing_ok),
                ("ratio".into(), cert.ratio_holds),
            ]);
            emit(report("approx", &instance, Some(c), to_value(&cert), verified))?;
            Ok(0)
        }
        Command::Exact { instance, c, k, solver } => {
            let g = load(&instance, strict)?;
            let res = match solver {
                Solver::Branch => branch_cover(&g, c, k, &params)?,
                Solver::Ic => ic_cover(&g, c, k, &params)?,
            };
            let mut verified = BTreeMap::new();
            if let Some(x) = &res.hitting_set {
                let ok = x.len() <= k && has_pumpkin(&g.without(x), c, params.budget)?.is_none();
                verified.insert("hitting_set".into(), ok);
            }
            let feasible = res.feasible;
            emit(report("exact", &instance, Some(c), to_value(&res), verified))?;
            Ok(if feasible { 0 } else { 1 })
        }
        Command::Verify { instance, c, solution } => {
            let g = load(&instance, strict)?;
            let raw: Value =
                serde_json::from_str(&read(&solution)?).map_err(|e| input_error(format!("{}: {e}", solution.display())))?;
            let body = raw.get("payload").cloned().unwrap_or(raw);
            let cover = body.get("cover").or_else(|| body.get("hitting_set")).filter(|v| !v.is_null());
            let packing = body.get("packing");
            if cover.is_none() && packing.is_none() {
                return Err(input_error("solution has neither a cover nor a packing".into()));
            }
            let mut payload = json!({});
            let mut verified = BTreeMap::new();
            if let Some(cv) = cover {
                let x: VertexSet = serde_json::from_value(cv.clone()).map_err(|e| input_error(format!("cover: {e}")))?;
                if let Some(v) = x.iter().find(|v| !g.contains(**v)) {
                    return Err(input_error(format!("cover names unknown vertex {v}")));
                }
                let survivor = has_pumpkin(&g.without(&x), c, params.budget)?;
                verified.insert("cover".into(), survivor.is_none());
                payload["cover_size"] = json!(x.len());
                payload["surviving_model"] = to_value(&survivor);
            }
            if let Some(pv) = packing {
                let pk: Vec<PumpkinModel> = serde_json::from_value(pv.clone()).map_err(|e| input_error(format!("packing: {e}")))?;
                let res = verify_packing(&g, &pk, c);
                verified.insert("packing".into(), res.is_ok());
                payload["packing_size"] = json!(pk.len());
                payload["packing_error"] = json!(res.err().map(|e| e.to_string()));
            }
            let ok = verified.values().all(|&b| b);
            emit(report("verify", &instance, Some(c), payload, verified))?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Bench {
            corpus,
            count,
            n,
            seed,
            c,
            out,
        } => {
            let instances = match &corpus {
                Some(dir) => read_corpus(dir, strict)?,
                None => (0..count as u64)
                    .map(|i| {
                        let fam = Family::RandomMultigraph { n, p: 0.35, max_mult: 3 };
                        let g = generate(&fam, seed + i)?.to_graph()?;
                        Ok((format!("random-{}", seed + i), g))
                    })
                    .collect::<Result<Vec<_>, PumpkinError>>()?,
            };
            let csv = bench(&instances, &c, &params)?;
            write_out(out.as_deref(), &csv)?;
            Ok(0)
        }
        Command::Generate {
            family,
            seed,
            n,
            p,
            max_mult,
            count,
            c,
            glue,
            path_len,
            density,
            d,
            out,
        } => {
            let fam = match family {
                FamilyName::RandomMultigraph => Family::RandomMultigraph { n, p, max_mult },
                FamilyName::PlantedPumpkins => Family::PlantedPumpkins {
                    count,
                    c,
                    glue: glue.parse()?,
                },
                FamilyName::Cactus => Family::Cactus { n },
                FamilyName::Hedgehog => Family::Hedgehog { path_len, density },
                FamilyName::Regular => Family::Regular { n, d },
            };
            write_out(out.as_deref(), &generate(&fam, seed)?.serialize())?;
            Ok(0)
        }
    }
}

fn read_corpus(dir: &Path, strict: bool) -> Result<Vec<(String, MultiGraph)>, Failure> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| input_error(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            Ok((name, load(&p, strict)?))
        })
        .collect()
}

fn bench(instances: &[(String, MultiGraph)], cs: &[u32], params: &Params) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(vec![]);
    let header = [
        "instance", "c", "n", "m", "tau_upper", "nu_lower", "oracle_tau", "oracle_nu", "ratio", "certified", "approx_ms", "oracle_ms",
    ];
    w.write_record(header).map_err(|e| input_error(e.to_string()))?;
    for (name, g) in instances {
        let oracle = if g.vertex_count() <= ORACLE_LIMIT { Some(Oracle::new(g)?) } else { None };
        for &c in cs {
            let t = Instant::now();
            let cert = approx_cover_pack(g, c, params)?;
            let approx_ms = t.elapsed().as_secs_f64() * 1000.0;
            let t = Instant::now();
            let (ot, on) = match &oracle {
                Some(o) => (o.tau(c).to_string(), o.nu(c).to_string()),
                None => (String::new(), String::new()),
            };
            let oracle_ms = t.elapsed().as_secs_f64() * 1000.0;
            let ratio = if cert.packing_size > 0 {
                format!("{:.4}", cert.cover_size as f64 / cert.packing_size as f64)
            } else {
                String::new()
            };
            let row = [
                name.clone(),
                c.to_string(),
                g.vertex_count().to_string(),
                g.edge_count().to_string(),
                cert.cover_size.to_string(),
                cert.packing_size.to_string(),
                ot,
                on,
                ratio,
                cert.ratio_holds.to_string(),
                format!("{approx_ms:.3}"),
                format!("{oracle_ms:.3}"),
            ];
            w.write_record(&row).map_err(|e| input_error(e.to_string()))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| input_error(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
