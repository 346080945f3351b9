//! Command-line front end. Every subcommand prints one JSON document.
//! Passing a directory runs the subcommand on each `*.json` file in it.
//!
//! Exit codes: 0 success, 1 violation or infeasibility, 2 malformed input,
//! 3 internal invariant failure.

use crate::align::{feasible_integer_multiflow, solve_multiflow, Solve};
use crate::almost::make_almost_unsplittable;
use crate::cuts::{check_cut_on, CutLimits, CutMode, Witness};
use crate::decompose::{decompose_unsplittable, verify_decomposition, Bound};
use crate::error::Error;
use crate::instance::{Instance, Multiflow};
use crate::io::{flow_to_record, totals_hash, totals_record, DecompositionFile, InstanceFile};
use crate::oracle::{enum_cap, enumerate_paths, exhaustive_feasibility, matrix_decomposability_probe, Probe, DEFAULT_PATH_CAP};
use crate::rational::fmt_rational;
use crate::sptree::{recognize_sp, Kind};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "spunsplit", version, about = "Unsplittable decompositions of multiflows on series-parallel digraphs")]
pub struct Cli {
    /// Worker threads for directory batches
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    Paths,
    Feasibility,
    Probe,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recognize the digraph and print its sp-tree
    Recognize { path: PathBuf },
    /// Check a cut condition
    Check {
        path: PathBuf,
        #[arg(long, default_value = "strengthened")]
        cut: CutMode,
    },
    /// Find a feasible multiflow or an infeasibility witness
    Solve {
        path: PathBuf,
        #[arg(long)]
        integer: bool,
    },
    /// Turn the file's flow into an almost unsplittable flow
    Almost { path: PathBuf },
    /// Decompose the file's total flow into unsplittable flows
    Decompose {
        path: PathBuf,
        #[arg(long, default_value = "dmax")]
        bound: Bound,
        /// Write the decomposition here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also probe whether the flow matrix itself decomposes
        #[arg(long)]
        probe: bool,
    },
    /// Re-check a decomposition file against an instance file
    Verify {
        instance: PathBuf,
        decomposition: PathBuf,
        #[arg(long)]
        bound: Option<Bound>,
    },
    /// Brute-force references
    Oracle {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "feasibility")]
        mode: OracleMode,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub json: Value,
}

impl Outcome {
    fn ok(json: Value) -> Self {
        Outcome { code: 0, json }
    }

    fn violation(json: Value) -> Self {
        Outcome { code: 1, json }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => 3,
        _ => 2,
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        Outcome { code: exit_code(&e), json: json!({ "error": e.to_string() }) }
    }
}

type Res<T> = std::result::Result<T, Error>;

fn load(path: &Path) -> Res<(Instance, Option<Multiflow>)> {
    InstanceFile::load(path)?.to_instance()
}

fn need_flow(x: Option<Multiflow>) -> Res<Multiflow> {
    x.ok_or_else(|| Error::Parse("the instance file has no flow".into()))
}

fn names(g: &[String], ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&i| g[i].clone()).collect()
}

fn recognize(path: &Path) -> Res<Outcome> {
    let raw = InstanceFile::load(path)?.resolve()?;
    let g = &raw.graph;
    match recognize_sp(g, raw.terminals.0, raw.terminals.1) {
        Ok(t) => {
            let nodes: Vec<Value> = t
                .nodes()
                .iter()
                .enumerate()
                .map(|(w, n)| {
                    json!({
                        "index": w,
                        "kind": match n.kind { Kind::P => "P", Kind::S => "S", Kind::Q => "Q" },
                        "u": g.nodes[n.u],
                        "v": g.nodes[n.v],
                        "children": n.children.map(|(a, b)| vec![a, b]),
                        "arc": n.arc.map(|e| g.arcs[e].name.clone()),
                    })
                })
                .collect();
            Ok(Outcome::ok(json!({ "series_parallel": true, "expression": t.to_expr().display(g), "tree": nodes })))
        }
        Err(w) => {
            let arcs: Vec<Value> = w
                .kernel_arcs
                .iter()
                .map(|(t, h, a)| {
                    let arcs: Vec<String> = a.iter().map(|&e| g.arcs[e].name.clone()).collect();
                    json!({ "tail": g.nodes[*t], "head": g.nodes[*h], "arcs": arcs })
                })
                .collect();
            Ok(Outcome::violation(json!({
                "series_parallel": false,
                "reason": w.reason,
                "kernel_nodes": names(&g.nodes, &w.kernel_nodes),
                "kernel_arcs": arcs,
            })))
        }
    }
}

fn check(path: &Path, mode: CutMode) -> Res<Outcome> {
    let raw = InstanceFile::load(path)?.resolve()?;
    let g = &raw.graph;
    match check_cut_on(g, &raw.commodities, mode, CutLimits::default())? {
        None => Ok(Outcome::ok(json!({ "mode": mode.to_string(), "ok": true }))),
        Some(c) => {
            let (key, items) = match &c.witness {
                Witness::Nodes(x) => ("nodes", names(&g.nodes, x)),
                Witness::Arcs(f) => ("arcs", f.iter().map(|&e| g.arcs[e].name.clone()).collect()),
            };
            let blocked: Vec<String> = c.blocked.iter().map(|&i| raw.commodities[i].name.clone()).collect();
            Ok(Outcome::violation(json!({
                "mode": mode.to_string(),
                "ok": false,
                "certificate": {
                    key: items,
                    "capacity": fmt_rational(&c.capacity),
                    "blocked_demand": fmt_rational(&c.blocked_demand),
                    "blocked": blocked,
                }
            })))
        }
    }
}

fn solve(path: &Path, integer: bool) -> Res<Outcome> {
    let (inst, _) = load(path)?;
    let out = if integer { feasible_integer_multiflow(&inst)? } else { solve_multiflow(&inst)? };
    match out {
        Solve::Feasible(x) => Ok(Outcome::ok(json!({
            "feasible": true,
            "flow": flow_to_record(&inst, &x),
            "totals": totals_record(&inst, &x),
        }))),
        Solve::Infeasible { split_cut, cut } => Ok(Outcome::violation(json!({
            "feasible": false,
            "cut": names(&inst.graph.nodes, &cut),
            "split_cut": split_cut,
        }))),
    }
}

fn almost(path: &Path) -> Res<Outcome> {
    let (inst, x) = load(path)?;
    let a = make_almost_unsplittable(&inst, &need_flow(x)?)?;
    let fractional: Vec<Value> = a
        .fractional
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(w, s)| {
            let c: Vec<String> = s.iter().map(|&i| inst.commodities[i].name.clone()).collect();
            json!({ "tree_node": w, "commodities": c })
        })
        .collect();
    Ok(Outcome::ok(json!({
        "flow": flow_to_record(&inst, &a.flow),
        "fractional": fractional,
        "swap_iterations": a.iterations,
    })))
}

fn probe_json(inst: &Instance, x: &Multiflow) -> Res<Value> {
    Ok(match matrix_decomposability_probe(inst, x, enum_cap())? {
        Probe::TriviallyDecomposable => json!({ "result": "trivially-decomposable" }),
        Probe::Inconclusive { reason } => json!({ "result": "inconclusive", "reason": reason }),
        Probe::Impossible(c) => {
            let forced: Vec<String> = c.forced_arcs.iter().map(|&e| inst.graph.arcs[e].name.clone()).collect();
            json!({ "result": "impossible", "forced_arcs": forced, "explored": c.explored })
        }
    })
}

fn decompose(path: &Path, bound: Bound, out: Option<&Path>, probe: bool) -> Res<Outcome> {
    let (inst, x) = load(path)?;
    let x = need_flow(x)?;
    let d = decompose_unsplittable(&inst, &x, bound)?;
    let rep = verify_decomposition(&inst, &x, &d.decomposition, bound, Some(&d.almost));
    if !rep.ok() {
        return Err(Error::Internal(format!("decomposition failed verification: {:?}", rep.failures)));
    }
    let file = DecompositionFile::from_decomposition(&inst, &d.decomposition, bound);
    let mut doc = json!({
        "report": {
            "bound": bound.to_string(),
            "d_max": fmt_rational(&d.report.d_max),
            "max_deviation": fmt_rational(&d.report.max_deviation),
            "support_size": d.decomposition.terms.len(),
            "verified": true,
        }
    });
    match out {
        Some(p) => {
            let text = serde_json::to_string_pretty(&file).expect("serializable") + "\n";
            std::fs::write(p, text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            doc["written"] = json!(p.display().to_string());
        }
        None => doc["decomposition"] = serde_json::to_value(&file).expect("serializable"),
    }
    if probe {
        doc["probe"] = probe_json(&inst, &x)?;
    }
    Ok(Outcome::ok(doc))
}

fn verify(instance: &Path, decomposition: &Path, bound: Option<Bound>) -> Res<Outcome> {
    let (inst, x) = load(instance)?;
    let x = need_flow(x)?;
    let file = DecompositionFile::load(decomposition)?;
    let bound = match bound {
        Some(b) => b,
        None => file.bound()?,
    };
    let d = file.to_decomposition(&inst)?;
    let mut rep = verify_decomposition(&inst, &x, &d, bound, None);
    if file.metadata.reconstruction_hash != totals_hash(&inst, &d.combined_totals(&inst)) {
        rep.failures.push(crate::decompose::Failure { check: "hash", detail: "reconstruction hash mismatch".into() });
    }
    let failures: Vec<Value> = rep.failures.iter().map(|f| json!({ "check": f.check, "detail": f.detail })).collect();
    let doc = json!({ "ok": rep.ok(), "bound": bound.to_string(), "failures": failures });
    Ok(if rep.ok() { Outcome::ok(doc) } else { Outcome::violation(doc) })
}

fn oracle(path: &Path, mode: OracleMode) -> Res<Outcome> {
    let (inst, x) = load(path)?;
    match mode {
        OracleMode::Paths => {
            let mut per = serde_json::Map::new();
            for c in &inst.commodities {
                let p = enumerate_paths(&inst.graph, c.source, c.sink, DEFAULT_PATH_CAP)?;
                let p: Vec<Vec<String>> =
                    p.iter().map(|p| p.iter().map(|&e| inst.graph.arcs[e].name.clone()).collect()).collect();
                per.insert(c.name.clone(), json!(p));
            }
            Ok(Outcome::ok(json!({ "paths": per })))
        }
        OracleMode::Feasibility => match exhaustive_feasibility(&inst, enum_cap())? {
            Some(x) => Ok(Outcome::ok(json!({ "feasible": true, "flow": flow_to_record(&inst, &x) }))),
            None => Ok(Outcome::violation(json!({ "feasible": false }))),
        },
        OracleMode::Probe => Ok(Outcome::ok(probe_json(&inst, &need_flow(x)?)?)),
    }
}

fn execute(cmd: &Command, path: &Path, out: Option<&Path>) -> Outcome {
    let r = match cmd {
        Command::Recognize { .. } => recognize(path),
        Command::Check { cut, .. } => check(path, *cut),
        Command::Solve { integer, .. } => solve(path, *integer),
        Command::Almost { .. } => almost(path),
        Command::Decompose { bound, probe, .. } => decompose(path, *bound, out, *probe),
        Command::Oracle { mode, .. } => oracle(path, *mode),
        Command::Verify { instance, decomposition, bound } => verify(instance, decomposition, *bound),
    };
    r.unwrap_or_else(Outcome::from)
}

fn batch(cmd: &Command, dir: &Path, jobs: usize, out: Option<&Path>) -> Outcome {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect(),
        Err(e) => return Error::Parse(format!("{}: {e}", dir.display())).into(),
    };
    files.sort();
    let run = || -> Vec<(PathBuf, Outcome)> {
        files
            .par_iter()
            .map(|f| {
                let target = out.map(|o| o.join(format!("{}.decomposition.json", f.file_stem().unwrap().to_string_lossy())));
                (f.clone(), execute(cmd, f, target.as_deref()))
            })
            .collect()
    };
    let results = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(e) => return Error::Internal(e.to_string()).into(),
    };
    let code = results.iter().map(|(_, o)| o.code).max().unwrap_or(0);
    let items: Vec<Value> = results
        .into_iter()
        .map(|(f, o)| json!({ "file": f.display().to_string(), "exit": o.code, "result": o.json }))
        .collect();
    Outcome { code, json: json!({ "batch": items }) }
}

/// Runs a parsed command line and returns its outcome.
pub fn run(cli: &Cli) -> Outcome {
    let (path, out) = match &cli.command {
        Command::Recognize { path }
        | Command::Check { path, .. }
        | Command::Solve { path, .. }
        | Command::Almost { path }
        | Command::Oracle { path, .. } => (path, None),
        Command::Decompose { path, out, .. } => (path, out.as_deref()),
        Command::Verify { instance, .. } => (instance, None),
    };
    if path.is_dir() {
        if matches!(cli.command, Command::Verify { .. }) {
            return Error::Argument("verify takes files, not directories".into()).into();
        }
        return batch(&cli.command, path, cli.jobs, out);
    }
    execute(&cli.command, path, out)
}

/// Parses `args`, runs, prints the JSON result and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let o = run(&cli);
    let text = serde_json::to_string_pretty(&o.json).expect("serializable");
    use std::io::Write;
    let _ = if o.code >= 2 {
        writeln!(std::io::stderr(), "{text}")
    } else {
        writeln!(std::io::stdout(), "{text}")
    };
    o.code
}
