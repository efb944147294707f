//! `holelab`: batch computations and verification campaigns over graph
//! corpora.
//!
//! Exit codes: 0 clean, 1 counterexample (or a rejected witness), 2 input
//! error, 3 some search ran out of budget. A counterexample takes
//! precedence over budget exhaustion.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use holelab::campaign::{
    emit_report, entry_seed, replay_counterexample, report_to_string, run_campaign, CampaignConfig, CampaignReport,
    Params, Predicate,
};
use holelab::gadgets::GadgetRecipe;
use holelab::holes::{collect_holes, residue_coverage};
use holelab::homology::{betti_numbers, euler_characteristic, is_k_balanced};
use holelab::invariants::invariant_report;
use holelab::io::{parse_corpus, write_graph, CorpusEntry, Format};
use holelab::structures::{
    close_hole, enumerate_jets, find_recirculator, jet_summary, refine_multicover, shower_from_bfs,
    verify_multicover, verify_oddity, verify_shower, Crest, Multicover, Oddity, RefinementBudget, StructureError,
};
use holelab::{Budget, Graph, DEFAULT_NODE_BUDGET};

#[derive(Parser)]
#[command(name = "holelab", version, about = "Exact hole, colouring and independence-complex computations")]
struct Cli {
    /// Search-node allowance per corpus entry.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    budget_nodes: u64,
    /// Seed for sampled checks and random gadgets.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Graph format; inferred from the file extension when omitted, else graph6.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clique number, chromatic number and χ^ρ of every graph.
    Invariants {
        input: PathBuf,
        /// Radii for χ^ρ.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        radii: Vec<usize>,
    },
    /// Holes counted by length, optionally with residue coverage.
    Holes {
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        min_len: usize,
        #[arg(long)]
        max_len: Option<usize>,
        /// Report which residues modulo this value hole lengths realise.
        #[arg(long)]
        modulus: Option<usize>,
        /// With --modulus, count only d-peripheral holes.
        #[arg(long, requires = "modulus")]
        d: Option<usize>,
        /// Include every hole in the output.
        #[arg(long)]
        list: bool,
    },
    /// Face counts, Euler characteristics and optionally Betti numbers of
    /// the independence complex.
    Homology {
        input: PathBuf,
        #[arg(long)]
        betti: bool,
    },
    /// Whether every induced subgraph has |S_even − S_odd| ≤ k.
    Balance {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Largest number of induced subgraphs to examine.
        #[arg(long, default_value_t = 1 << 16)]
        subgraph_budget: u64,
    },
    /// Build a gadget such as `findhole:24,2,2,4` and print it.
    Gadget { recipe: String },
    /// Build a shower by BFS and report its jets and a recirculator.
    Shower {
        input: PathBuf,
        /// Corpus entry to use.
        #[arg(long, default_value_t = 0)]
        entry: usize,
        #[arg(long)]
        root: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        drain: usize,
        /// Longest jet to enumerate (edges); defaults to the vertex count.
        #[arg(long)]
        max_jet_len: Option<usize>,
        #[arg(long, default_value_t = 3)]
        ell: usize,
        #[arg(long, default_value_t = 0)]
        d: usize,
    },
    /// Check a multicover witness given as JSON.
    Structures {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        entry: usize,
        #[arg(long)]
        witness: PathBuf,
    },
    /// Run a predicate campaign, or replay the counterexamples of a report.
    Verify {
        #[arg(required_unless_present = "replay")]
        input: Option<PathBuf>,
        #[arg(long, required_unless_present = "replay")]
        predicate: Option<Predicate>,
        /// Predicate parameter as key=value; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        /// A report written by an earlier run.
        #[arg(long, conflicts_with_all = ["input", "predicate", "params"])]
        replay: Option<PathBuf>,
    },
}

/// Input errors; they end the run with exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

#[derive(Default)]
struct Flags {
    counterexample: bool,
    budget: bool,
}

impl Flags {
    fn exit_code(&self) -> ExitCode {
        if self.counterexample {
            ExitCode::from(1)
        } else if self.budget {
            ExitCode::from(3)
        } else {
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(flags) => flags.exit_code(),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Flags, InputError> {
    let mut flags = Flags::default();
    let output = match &cli.command {
        Command::Invariants { input, radii } => {
            if radii.contains(&0) {
                return Err(InputError("radii must be at least 1".into()));
            }
            per_entry(cli, input, &mut flags, |g, budget| match invariant_report(g, radii, budget) {
                Ok(r) => Ok(Ok(json!(r))),
                Err(e) if e.is_budget() => Ok(Err(e.to_string())),
                Err(e) => Err(e.into()),
            })?
        }
        Command::Holes {
            input,
            min_len,
            max_len,
            modulus,
            d,
            list,
        } => {
            if modulus == &Some(0) {
                return Err(InputError("modulus must be at least 1".into()));
            }
            per_entry(cli, input, &mut flags, |g, budget| {
                let holes = match collect_holes(g, *min_len, *max_len, budget) {
                    Ok(h) => h,
                    Err(e) if e.is_budget() => return Ok(Err(e.to_string())),
                    Err(e) => return Err(e.into()),
                };
                let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
                for h in &holes {
                    *counts.entry(h.len()).or_default() += 1;
                }
                let mut out = json!({ "total": holes.len(), "counts": counts });
                if *list {
                    out["holes"] = json!(holes);
                }
                if let Some(m) = modulus {
                    match residue_coverage(g, *m, *d, budget) {
                        Ok(cov) => {
                            out["coverage"] = json!({
                                "modulus": cov.modulus,
                                "d": d,
                                "covered": cov.covered,
                                "missing": cov.missing(),
                                "complete": cov.is_complete(),
                                "witnesses": cov.witnesses,
                            })
                        }
                        Err(e) if e.is_budget() => return Ok(Err(e.to_string())),
                        Err(e) => return Err(e.into()),
                    }
                }
                Ok(Ok(out))
            })?
        }
        Command::Homology { input, betti } => per_entry(cli, input, &mut flags, |g, budget| {
            let r = if *betti {
                betti_numbers(g, budget).map(|r| json!(r))
            } else {
                euler_characteristic(g, budget).map(|r| json!(r))
            };
            Ok(r.map_err(|e| e.to_string()))
        })?,
        Command::Balance {
            input,
            k,
            subgraph_budget,
        } => {
            if *subgraph_budget == 0 {
                return Err(InputError("subgraph budget must be positive".into()));
            }
            let entries = load(input, cli.format)?;
            let results: Vec<Value> = entries
                .iter()
                .map(|e| {
                    let v = is_k_balanced(&e.graph, *k, *subgraph_budget, entry_seed(cli.seed, e.id));
                    json!({ "id": e.id, "vertices": e.graph.n(), "edges": e.graph.edge_count(), "result": v })
                })
                .collect();
            json!(results)
        }
        Command::Gadget { recipe } => {
            let recipe: GadgetRecipe = recipe.parse()?;
            let g = recipe.build(cli.seed)?;
            let text = write_graph(&g, cli.format.unwrap_or(Format::Graph6));
            match &cli.json_out {
                Some(_) => json!({
                    "recipe": recipe.description,
                    "seed": cli.seed,
                    "vertices": g.n(),
                    "edges": g.edge_count(),
                    "format": cli.format.unwrap_or(Format::Graph6),
                    "graph": text,
                }),
                None => {
                    print!("{text}");
                    return Ok(flags);
                }
            }
        }
        Command::Shower {
            input,
            entry,
            root,
            depth,
            drain,
            max_jet_len,
            ell,
            d,
        } => {
            let g = pick(input, cli.format, *entry)?;
            let mut budget = Budget::new(cli.budget_nodes);
            match shower_report(&g, *root, *depth, *drain, *max_jet_len, *ell, *d, &mut budget) {
                Ok(v) => v,
                Err(e) if e.is_budget() => {
                    flags.budget = true;
                    json!({ "budget_exhausted": true, "error": e.to_string() })
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Structures { input, entry, witness } => {
            let g = pick(input, cli.format, *entry)?;
            let text = read_text(witness)?;
            let w: Witness = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", witness.display()))?;
            let mut budget = Budget::new(cli.budget_nodes);
            match structures_report(&g, &w, &mut budget) {
                Ok((v, valid)) => {
                    flags.counterexample = !valid;
                    v
                }
                Err(e) if e.is_budget() => {
                    flags.budget = true;
                    json!({ "budget_exhausted": true, "error": e.to_string() })
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Verify {
            input,
            predicate,
            params,
            replay,
        } => {
            if let Some(path) = replay {
                return replay_report(cli, path);
            }
            let (input, predicate) = (input.as_ref().unwrap(), predicate.unwrap());
            let mut p = Params::default();
            for kv in params {
                p.set(kv)?;
            }
            let config = CampaignConfig {
                seed: cli.seed,
                budget_nodes: cli.budget_nodes,
                params: p,
            };
            let entries = load(input, cli.format)?;
            let report = run_campaign(predicate, &entries, &config)?;
            flags.counterexample = report.has_counterexamples();
            flags.budget = report.has_budget_failures();
            let s = &report.summary;
            let line = format!(
                "{predicate}: {} entries, {} passed, {} counterexamples, {} budget exhausted",
                s.entries, s.passed, s.counterexamples, s.budget_exhausted
            );
            match &cli.json_out {
                Some(path) => {
                    emit_report(&report, path)?;
                    println!("{line}");
                }
                None => {
                    print!("{}", report_to_string(&report));
                    eprintln!("{line}");
                }
            }
            return Ok(flags);
        }
    };
    write_json(&output, cli.json_out.as_deref())?;
    Ok(flags)
}

fn read_text(path: &Path) -> Result<String, InputError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path, format: Option<Format>) -> Result<Vec<CorpusEntry>, InputError> {
    let format = format.or_else(|| Format::from_extension(path)).unwrap_or(Format::Graph6);
    let text = read_text(path)?;
    parse_corpus(&text, format).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn pick(path: &Path, format: Option<Format>, entry: usize) -> Result<Graph, InputError> {
    let mut entries = load(path, format)?;
    if entry >= entries.len() {
        return Err(InputError(format!("entry {entry} out of range ({} graphs)", entries.len())));
    }
    Ok(entries.swap_remove(entry).graph)
}

fn write_json(v: &Value, path: Option<&Path>) -> Result<(), InputError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    match path {
        Some(p) => std::fs::write(p, s).map_err(|e| InputError(format!("{}: {e}", p.display()))),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

/// Runs `f` on every entry with a fresh budget. `f` returns `Ok(Err(msg))`
/// when the budget ran out.
fn per_entry<F>(cli: &Cli, input: &Path, flags: &mut Flags, mut f: F) -> Result<Value, InputError>
where
    F: FnMut(&Graph, &mut Budget) -> Result<Result<Value, String>, InputError>,
{
    let entries = load(input, cli.format)?;
    let mut out = Vec::with_capacity(entries.len());
    for e in &entries {
        let mut budget = Budget::new(cli.budget_nodes);
        let mut v = json!({ "id": e.id, "vertices": e.graph.n(), "edges": e.graph.edge_count() });
        match f(&e.graph, &mut budget)? {
            Ok(r) => v["result"] = r,
            Err(msg) => {
                flags.budget = true;
                v["budget_exhausted"] = json!(true);
                v["error"] = json!(msg);
            }
        }
        v["nodes_used"] = json!(budget.used().min(budget.limit()));
        out.push(v);
    }
    Ok(Value::Array(out))
}

#[allow(clippy::too_many_arguments)]
fn shower_report(
    g: &Graph,
    root: usize,
    depth: usize,
    drain: usize,
    max_jet_len: Option<usize>,
    ell: usize,
    d: usize,
    budget: &mut Budget,
) -> Result<Value, StructureError> {
    let s = shower_from_bfs(g, root, depth, drain)?.ok_or_else(|| {
        StructureError::Input(format!("vertex {drain} is not at distance {depth} from {root}"))
    })?;
    let report = verify_shower(g, &s);
    let jets = enumerate_jets(g, &s, max_jet_len.unwrap_or(g.n()), budget).map_err(|(_, e)| e)?;
    let summary = jet_summary(g, &s, &jets, ell, d, budget)?;
    let recirculator = find_recirculator(g, &s, g.n())?;
    let closed = match &recirculator {
        Some(r) => jets.iter().map(|j| close_hole(g, &j.path, r)).collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    Ok(json!({
        "shower": s,
        "report": report,
        "jets": jets.len(),
        "summary": summary,
        "recirculator": recirculator,
        "closed_holes": closed,
    }))
}

/// Input of the `structures` subcommand.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Witness {
    multicover: Multicover,
    /// Also require every covering set to be stable.
    #[serde(default)]
    stable: bool,
    crest: Option<Crest>,
    #[serde(default)]
    oddities: Vec<Oddity>,
    refinement: Option<RefinementBudget>,
}

fn structures_report(g: &Graph, w: &Witness, budget: &mut Budget) -> Result<(Value, bool), StructureError> {
    let mc = verify_multicover(g, &w.multicover, w.stable, w.crest.as_ref(), budget)?;
    let mut valid = mc.valid;
    let mut out = json!({ "multicover": mc });
    if !w.oddities.is_empty() {
        let reports: Vec<_> = w.oddities.iter().map(|o| verify_oddity(g, &w.multicover, o)).collect();
        valid &= reports.iter().all(|r| r.valid);
        out["oddities"] = json!(reports);
    }
    if let Some(rb) = &w.refinement {
        out["refinement"] = match refine_multicover(g, &w.multicover, rb, budget) {
            Ok(trace) => json!(trace),
            Err(e @ StructureError::ThresholdUnreachable { .. }) => json!({ "error": e.to_string() }),
            Err(e) => return Err(e),
        };
    }
    out["valid"] = json!(valid);
    Ok((out, valid))
}

fn replay_report(cli: &Cli, path: &Path) -> Result<Flags, InputError> {
    let text = read_text(path)?;
    let report: CampaignReport = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut results = Vec::new();
    let mut unconfirmed = Vec::new();
    for cx in &report.counterexamples {
        let confirmed = replay_counterexample(report.predicate, &report.config, cx)?;
        if !confirmed {
            unconfirmed.push(cx.id);
        }
        results.push(json!({ "id": cx.id, "confirmed": confirmed }));
    }
    let out = json!({
        "predicate": report.predicate,
        "replayed": results.len(),
        "confirmed": results.len() - unconfirmed.len(),
        "results": results,
    });
    write_json(&out, cli.json_out.as_deref())?;
    if !unconfirmed.is_empty() {
        return Err(InputError(format!("counterexamples {unconfirmed:?} did not replay")));
    }
    Ok(Flags {
        counterexample: !report.counterexamples.is_empty(),
        budget: false,
    })
}
