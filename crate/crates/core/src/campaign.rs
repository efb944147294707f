//! Predicate campaigns over graph corpora.
//!
//! Each entry is evaluated with its own node budget; entries run on a
//! worker pool and results are reported in entry order, so a report
//! depends only on the corpus, the parameters and the seed. Reports carry
//! no wall-clock time.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::budget::Budget;
use crate::graph::Graph;
use crate::holes::{
    anticomplete_hole_family, consecutive_hole_pairs, has_induced_cycle_divisible_by_three, residue_coverage,
    HoleError,
};
use crate::homology::{euler_characteristic, independence_parity, is_k_balanced, HomologyError, Parity};
use crate::invariants::{chromatic_number, clique_number, InvariantError};
use crate::io::{decode_graph6, encode_graph6, CorpusEntry};

/// Environment variable bounding the worker pool.
pub const THREADS_ENV: &str = "HOLELAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    KalaiBalance,
    TernaryEuler,
    CliqueParity,
    HoleModCoverage,
    ConsecutiveHoles,
}

impl Predicate {
    pub const ALL: [Predicate; 5] = [
        Predicate::KalaiBalance,
        Predicate::TernaryEuler,
        Predicate::CliqueParity,
        Predicate::HoleModCoverage,
        Predicate::ConsecutiveHoles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::KalaiBalance => "kalai_balance",
            Predicate::TernaryEuler => "ternary_euler",
            Predicate::CliqueParity => "clique_parity",
            Predicate::HoleModCoverage => "hole_mod_coverage",
            Predicate::ConsecutiveHoles => "consecutive_holes",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Predicate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Predicate::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Predicate::ALL.iter().map(|p| p.name()).collect();
                format!("unknown predicate '{s}' (expected one of {})", names.join(", "))
            })
    }
}

/// Predicate parameters. Unused fields are ignored by predicates that do
/// not need them.
///
/// For the hole predicates an entry is a counterexample candidate when
/// `ω ≤ kappa`, `χ > min_chi` and the hole property fails; without
/// `min_chi` the property is only reported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub k: u64,
    pub subgraph_budget: u64,
    pub ell: usize,
    pub d: Option<usize>,
    pub kappa: Option<usize>,
    pub min_chi: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            k: 1,
            subgraph_budget: 1 << 16,
            ell: 3,
            d: None,
            kappa: None,
            min_chi: None,
        }
    }
}

impl Params {
    /// Applies a `key=value` setting.
    pub fn set(&mut self, assignment: &str) -> Result<(), String> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got '{assignment}'"))?;
        let num = |v: &str| v.parse::<u64>().map_err(|_| format!("'{v}' is not a nonnegative integer"));
        match key {
            "k" => self.k = num(value)?,
            "subgraph_budget" => self.subgraph_budget = num(value)?,
            "ell" => self.ell = num(value)? as usize,
            "d" => self.d = Some(num(value)? as usize),
            "kappa" => self.kappa = Some(num(value)? as usize),
            "min_chi" => self.min_chi = Some(num(value)? as usize),
            _ => return Err(format!("unknown parameter '{key}'")),
        }
        Ok(())
    }

    fn validate(&self, predicate: Predicate) -> Result<(), CampaignError> {
        let needs_ell = matches!(predicate, Predicate::HoleModCoverage | Predicate::ConsecutiveHoles);
        if needs_ell && self.ell == 0 {
            return Err(CampaignError::Params("ell must be at least 1".into()));
        }
        if predicate == Predicate::KalaiBalance && self.subgraph_budget == 0 {
            return Err(CampaignError::Params("subgraph_budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub seed: u64,
    pub budget_nodes: u64,
    pub params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Counterexample,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryVerdict {
    pub id: usize,
    pub status: Status,
    pub nodes_used: u64,
    pub detail: Value,
}

/// A flagged entry with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub id: usize,
    pub graph6: String,
    pub witness: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub entries: usize,
    pub passed: usize,
    pub counterexamples: usize,
    pub budget_exhausted: usize,
}

/// Deterministic effort accounting: search nodes rather than seconds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub total_nodes: u64,
    pub max_entry_nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub predicate: Predicate,
    pub config: CampaignConfig,
    pub summary: Summary,
    pub timing: Timing,
    pub verdicts: Vec<EntryVerdict>,
    pub counterexamples: Vec<Counterexample>,
}

impl CampaignReport {
    pub fn has_counterexamples(&self) -> bool {
        !self.counterexamples.is_empty()
    }

    pub fn has_budget_failures(&self) -> bool {
        self.summary.budget_exhausted > 0
    }
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("bad counterexample {id}: {message}")]
    Replay { id: usize, message: String },
}

/// Worker count from `HOLELAB_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

pub fn run_campaign(
    predicate: Predicate,
    corpus: &[CorpusEntry],
    config: &CampaignConfig,
) -> Result<CampaignReport, CampaignError> {
    config.params.validate(predicate)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads_from_env() {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CampaignError::Pool(e.to_string()))?;
    let results: Vec<(EntryVerdict, Option<Counterexample>)> = pool.install(|| {
        corpus
            .par_iter()
            .map(|entry| evaluate_entry(predicate, entry.id, &entry.graph, config))
            .collect()
    });
    let mut verdicts = Vec::with_capacity(results.len());
    let mut counterexamples = Vec::new();
    for (v, cx) in results {
        verdicts.push(v);
        counterexamples.extend(cx);
    }
    let count = |s: Status| verdicts.iter().filter(|v| v.status == s).count();
    let summary = Summary {
        entries: verdicts.len(),
        passed: count(Status::Pass),
        counterexamples: count(Status::Counterexample),
        budget_exhausted: count(Status::BudgetExhausted),
    };
    let timing = Timing {
        total_nodes: verdicts.iter().map(|v| v.nodes_used).sum(),
        max_entry_nodes: verdicts.iter().map(|v| v.nodes_used).max().unwrap_or(0),
    };
    Ok(CampaignReport {
        predicate,
        config: config.clone(),
        summary,
        timing,
        verdicts,
        counterexamples,
    })
}

/// Per-entry seed for sampled checks.
pub fn entry_seed(seed: u64, id: usize) -> u64 {
    seed ^ (id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

enum Outcome {
    Pass(Value),
    Fail(Value),
}

#[derive(Debug)]
struct Exhaustion(Value);

impl From<InvariantError> for Exhaustion {
    fn from(e: InvariantError) -> Self {
        Exhaustion(json!({ "error": e.to_string() }))
    }
}

impl From<HoleError> for Exhaustion {
    fn from(e: HoleError) -> Self {
        Exhaustion(json!({ "error": e.to_string() }))
    }
}

impl From<HomologyError> for Exhaustion {
    fn from(e: HomologyError) -> Self {
        Exhaustion(json!({ "error": e.to_string() }))
    }
}

/// Evaluates one entry. Errors other than budget exhaustion cannot occur
/// for in-range graphs, so every failure is recorded as exhaustion.
pub fn evaluate_entry(
    predicate: Predicate,
    id: usize,
    g: &Graph,
    config: &CampaignConfig,
) -> (EntryVerdict, Option<Counterexample>) {
    let mut budget = Budget::new(config.budget_nodes);
    let seed = entry_seed(config.seed, id);
    let p = &config.params;
    let outcome = match predicate {
        Predicate::KalaiBalance => kalai_balance(g, p, seed, &mut budget),
        Predicate::TernaryEuler => ternary_euler(g, &mut budget),
        Predicate::CliqueParity => clique_parity(g, &mut budget),
        Predicate::HoleModCoverage => hole_mod_coverage(g, p, &mut budget),
        Predicate::ConsecutiveHoles => consecutive_holes(g, p, &mut budget),
    };
    let nodes_used = budget.used().min(budget.limit());
    match outcome {
        Ok(Outcome::Pass(detail)) => (
            EntryVerdict {
                id,
                status: Status::Pass,
                nodes_used,
                detail,
            },
            None,
        ),
        Ok(Outcome::Fail(detail)) => (
            EntryVerdict {
                id,
                status: Status::Counterexample,
                nodes_used,
                detail: detail.clone(),
            },
            Some(Counterexample {
                id,
                graph6: encode_graph6(g),
                witness: detail,
            }),
        ),
        Err(Exhaustion(detail)) => (
            EntryVerdict {
                id,
                status: Status::BudgetExhausted,
                nodes_used,
                detail,
            },
            None,
        ),
    }
}

fn kalai_balance(g: &Graph, p: &Params, seed: u64, budget: &mut Budget) -> Result<Outcome, Exhaustion> {
    let verdict = is_k_balanced(g, p.k, p.subgraph_budget, seed);
    let clique = clique_number(g, budget)?;
    let mut detail = json!({
        "balanced": verdict.balanced,
        "exhaustive": verdict.exhaustive,
        "witness": verdict.witness,
        "witness_parity": verdict.witness_parity,
        "omega": clique.size,
        "max_clique": clique.witness,
    });
    if !(verdict.balanced && verdict.exhaustive) {
        return Ok(Outcome::Pass(detail));
    }
    // a balanced graph has no clique on k+2 vertices and no k pairwise
    // anticomplete holes of lengths divisible by three
    let clique_violation = clique.size as u64 > p.k + 1;
    let family = if p.k >= 1 && p.k <= 8 {
        anticomplete_hole_family(g, &vec![(0, 3); p.k as usize], budget)?
    } else {
        None
    };
    detail["hole_family"] = json!(family);
    if clique_violation || family.is_some() {
        Ok(Outcome::Fail(detail))
    } else {
        Ok(Outcome::Pass(detail))
    }
}

fn ternary_euler(g: &Graph, budget: &mut Budget) -> Result<Outcome, Exhaustion> {
    let divisible = has_induced_cycle_divisible_by_three(g, budget)?;
    let euler = euler_characteristic(g, budget)?;
    let one_balanced = is_k_balanced(g, 1, u64::MAX, 0);
    let detail = json!({
        "divisible_induced_cycle": divisible,
        "euler_reduced": euler.euler_reduced,
        "one_balanced": one_balanced.balanced,
        "witness": one_balanced.witness,
        "witness_parity": one_balanced.witness_parity,
    });
    let small = euler.euler_reduced.abs() <= 1;
    // no divisible induced cycle exactly when every induced subgraph has
    // reduced Euler characteristic in {-1, 0, 1}
    let violated = (!divisible && !small) || (divisible != !one_balanced.balanced && one_balanced.exhaustive);
    Ok(if violated { Outcome::Fail(detail) } else { Outcome::Pass(detail) })
}

fn clique_parity(g: &Graph, budget: &mut Budget) -> Result<Outcome, Exhaustion> {
    let clique = clique_number(g, budget)?;
    let sub = g.induced_subgraph(&clique.witness).expect("clique in range").graph;
    let parity = independence_parity(&sub, budget)?;
    let whole = independence_parity(g, budget)?;
    let expected = Parity {
        even: 1,
        odd: clique.size as u128,
    };
    let detail = json!({
        "omega": clique.size,
        "max_clique": clique.witness,
        "clique_parity": parity,
        "graph_parity": whole,
    });
    let ok = g.is_clique(&clique.witness) && parity == expected;
    Ok(if ok { Outcome::Pass(detail) } else { Outcome::Fail(detail) })
}

fn candidate_gate(g: &Graph, p: &Params, budget: &mut Budget) -> Result<(Value, bool), Exhaustion> {
    let Some(min_chi) = p.min_chi else {
        return Ok((Value::Null, false));
    };
    let omega = clique_number(g, budget)?.size;
    if p.kappa.is_some_and(|k| omega > k) {
        return Ok((json!({ "omega": omega }), false));
    }
    let chi = chromatic_number(g, budget)?.chi;
    Ok((json!({ "omega": omega, "chi": chi }), chi > min_chi))
}

fn hole_mod_coverage(g: &Graph, p: &Params, budget: &mut Budget) -> Result<Outcome, Exhaustion> {
    let cov = residue_coverage(g, p.ell, p.d, budget)?;
    let (gate, candidate) = candidate_gate(g, p, budget)?;
    let detail = json!({
        "ell": p.ell,
        "d": p.d,
        "covered": cov.covered,
        "missing": cov.missing(),
        "witnesses": cov.witnesses,
        "complete": cov.is_complete(),
        "invariants": gate,
    });
    Ok(if candidate && !cov.is_complete() {
        Outcome::Fail(detail)
    } else {
        Outcome::Pass(detail)
    })
}

fn consecutive_holes(g: &Graph, p: &Params, budget: &mut Budget) -> Result<Outcome, Exhaustion> {
    let pairs = consecutive_hole_pairs(g, p.ell, budget)?;
    let (gate, candidate) = candidate_gate(g, p, budget)?;
    let detail = json!({
        "ell": p.ell,
        "pairs": pairs,
        "invariants": gate,
    });
    Ok(if candidate && pairs.is_empty() {
        Outcome::Fail(detail)
    } else {
        Outcome::Pass(detail)
    })
}

/// Serialises a report with a stable field order and a trailing newline.
pub fn report_to_string(report: &CampaignReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report is serialisable");
    s.push('\n');
    s
}

pub fn emit_report(report: &CampaignReport, path: &Path) -> Result<(), CampaignError> {
    std::fs::write(path, report_to_string(report))?;
    Ok(())
}

/// Re-evaluates a counterexample from its stored graph6 string and checks
/// that it is flagged again with the same witness.
pub fn replay_counterexample(
    predicate: Predicate,
    config: &CampaignConfig,
    cx: &Counterexample,
) -> Result<bool, CampaignError> {
    let g = decode_graph6(&cx.graph6).map_err(|message| CampaignError::Replay { id: cx.id, message })?;
    let (verdict, again) = evaluate_entry(predicate, cx.id, &g, config);
    Ok(verdict.status == Status::Counterexample && again.is_some_and(|a| a.witness == cx.witness))
}
