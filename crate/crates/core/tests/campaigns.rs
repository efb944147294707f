use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde_json::json;

use holelab::campaign::{
    replay_counterexample, report_to_string, run_campaign, CampaignConfig, Params, Predicate, Status,
};
use holelab::gadgets::{complete, complete_bipartite, cycle, mycielski_iterate, petersen, random_graph};
use holelab::holes::Hole;
use holelab::io::{decode_graph6, read_corpus, CorpusEntry, Format};
use holelab::{Graph, VertexSet};

fn entries(graphs: Vec<Graph>) -> Vec<CorpusEntry> {
    graphs
        .into_iter()
        .enumerate()
        .map(|(id, graph)| CorpusEntry {
            id,
            graph,
            format: Format::Graph6,
        })
        .collect()
}

fn small_corpus() -> Vec<CorpusEntry> {
    let mut graphs: Vec<Graph> = (4..=9).map(|n| cycle(n).unwrap()).collect();
    graphs.extend((2..=5).map(|n| complete(n).unwrap()));
    graphs.push(complete_bipartite(3, 3));
    graphs.push(petersen());
    graphs.push(mycielski_iterate(2).unwrap());
    graphs.extend((0..6).map(|s| random_graph(9, 0.35, s).unwrap()));
    entries(graphs)
}

fn fixture_upto(n: usize) -> Vec<CorpusEntry> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/graphs_upto7.g6");
    let mut all = read_corpus(&path, Format::Graph6).unwrap();
    all.retain(|e| e.graph.n() <= n);
    all
}

fn config(params: Params) -> CampaignConfig {
    CampaignConfig {
        seed: 2024,
        budget_nodes: 10_000_000,
        params,
    }
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

/// Compares against the stored report; `HOLELAB_BLESS=1` rewrites it.
fn check_golden(name: &str, text: &str) {
    let path = golden_path(name);
    if std::env::var_os("HOLELAB_BLESS").is_some() {
        std::fs::write(&path, text).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(want == text, "report for {name} differs from {}", path.display());
}

#[test]
fn golden_balance_report() {
    let r = run_campaign(Predicate::KalaiBalance, &small_corpus(), &config(Params::default())).unwrap();
    check_golden("kalai_balance", &report_to_string(&r));
}

#[test]
fn golden_homology_report() {
    let r = run_campaign(Predicate::TernaryEuler, &small_corpus(), &config(Params::default())).unwrap();
    check_golden("ternary_euler", &report_to_string(&r));
}

#[test]
fn golden_holes_report() {
    let p = Params {
        ell: 3,
        kappa: Some(2),
        min_chi: Some(2),
        ..Params::default()
    };
    let r = run_campaign(Predicate::HoleModCoverage, &small_corpus(), &config(p)).unwrap();
    check_golden("hole_mod_coverage", &report_to_string(&r));
}

#[test]
fn clique_parity_over_k2_to_k8() {
    let c = entries((2..=8).map(|n| complete(n).unwrap()).collect());
    let r = run_campaign(Predicate::CliqueParity, &c, &config(Params::default())).unwrap();
    assert_eq!(r.summary.counterexamples, 0);
    for (k, v) in r.verdicts.iter().enumerate() {
        assert_eq!(v.detail["clique_parity"], json!({ "even": 1, "odd": k + 2 }));
    }
}

#[test]
fn ternary_euler_over_small_graphs() {
    let c = fixture_upto(6);
    assert_eq!(c.len(), 1 + 1 + 2 + 4 + 11 + 34 + 156);
    let r = run_campaign(Predicate::TernaryEuler, &c, &config(Params::default())).unwrap();
    assert_eq!(r.summary.counterexamples, 0);
    assert_eq!(r.summary.budget_exhausted, 0);
    for v in &r.verdicts {
        if v.detail["divisible_induced_cycle"] == json!(false) {
            assert!(v.detail["euler_reduced"].as_i64().unwrap().abs() <= 1);
        }
    }
}

/// Hole lengths by checking every vertex subset for being a connected
/// 2-regular induced subgraph.
fn oracle_hole_lengths(g: &Graph) -> BTreeSet<usize> {
    (0u64..1 << g.n())
        .map(VertexSet::from_mask)
        .filter(|s| {
            s.len() >= 4 && s.iter().all(|v| g.neighbors(v).intersection_len(s) == 2) && g.is_connected_within(s)
        })
        .map(|s| s.len())
        .collect()
}

#[test]
fn grotzsch_coverage_matches_oracle() {
    let g = mycielski_iterate(2).unwrap();
    let want: BTreeSet<usize> = oracle_hole_lengths(&g).iter().map(|l| l % 3).collect();
    let p = Params {
        ell: 3,
        ..Params::default()
    };
    let r = run_campaign(Predicate::HoleModCoverage, &entries(vec![g]), &config(p)).unwrap();
    assert_eq!(r.verdicts[0].detail["covered"], json!(want));
    assert_eq!(want, BTreeSet::from([0, 1, 2]));
}

#[test]
fn counterexamples_replay_and_reverify() {
    let p = Params {
        ell: 3,
        kappa: Some(2),
        min_chi: Some(2),
        ..Params::default()
    };
    let c = entries(vec![cycle(5).unwrap(), cycle(7).unwrap(), cycle(6).unwrap(), petersen()]);
    let r = run_campaign(Predicate::HoleModCoverage, &c, &config(p)).unwrap();
    // C_6 has χ = 2 and is not a candidate; Petersen only has 5- and 6-holes
    let flagged: Vec<usize> = r.counterexamples.iter().map(|cx| cx.id).collect();
    assert_eq!(flagged, vec![0, 1, 3]);
    assert_eq!(r.counterexamples[2].witness["missing"], json!([1]));
    assert_eq!(r.verdicts[2].status, Status::Pass);
    for cx in &r.counterexamples {
        assert!(replay_counterexample(Predicate::HoleModCoverage, &r.config, cx).unwrap());
        let g = decode_graph6(&cx.graph6).unwrap();
        let lengths = oracle_hole_lengths(&g);
        for (res, hole) in cx.witness["witnesses"].as_object().unwrap() {
            let cyc: Vec<usize> = serde_json::from_value(hole.clone()).unwrap();
            let h = Hole::new(&g, cyc).unwrap();
            assert_eq!(h.len() % 3, res.parse::<usize>().unwrap());
        }
        for m in cx.witness["missing"].as_array().unwrap() {
            let m = m.as_u64().unwrap() as usize;
            assert!(lengths.iter().all(|l| l % 3 != m));
        }
    }
    let mut forged = r.counterexamples[0].clone();
    forged.graph6 = holelab::io::encode_graph6(&cycle(6).unwrap());
    assert!(!replay_counterexample(Predicate::HoleModCoverage, &r.config, &forged).unwrap());
}

#[test]
fn consecutive_holes_report_pairs() {
    let p = Params {
        ell: 3,
        ..Params::default()
    };
    let r = run_campaign(Predicate::ConsecutiveHoles, &entries(vec![petersen()]), &config(p)).unwrap();
    let pairs = r.verdicts[0].detail["pairs"].as_array().unwrap();
    let lengths: Vec<u64> = pairs.iter().map(|x| x["length"].as_u64().unwrap()).collect();
    assert_eq!(lengths, vec![5]);
}
