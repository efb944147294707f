//! Verifiable proof objects: multicovers and their crests, oddities, the
//! greedy refinement of a multicover, gradings and square edges, ρ-balls,
//! showers with their jets, bloodlines and recirculators.
//!
//! Objects store plain index data; every operation takes the host graph
//! explicitly so a witness can be re-checked against any graph.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{Budget, Exhausted};
use crate::graph::{Graph, GraphError, VertexSet};
use crate::holes::{Hole, HoleError};
use crate::invariants::{chromatic_number_of, clique_within, InvariantError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Hole(#[from] HoleError),
    #[error("{0}")]
    Input(String),
    #[error("expected {expected} thresholds, one per apex, got {got}")]
    ThresholdCount { expected: usize, got: usize },
    #[error("threshold {threshold} cannot be exceeded in round {round}")]
    ThresholdUnreachable { round: usize, threshold: usize },
    #[error("search budget of {limit} nodes exhausted")]
    Budget { limit: u64 },
    #[error("constructed witness failed verification: {0}")]
    Unverified(String),
}

impl StructureError {
    /// Whether the error only reports a spent budget.
    pub fn is_budget(&self) -> bool {
        match self {
            StructureError::Budget { .. } => true,
            StructureError::Invariant(e) => e.is_budget(),
            StructureError::Hole(e) => e.is_budget(),
            _ => false,
        }
    }
}

impl From<Exhausted> for StructureError {
    fn from(e: Exhausted) -> Self {
        StructureError::Budget { limit: e.limit }
    }
}

fn input(msg: impl Into<String>) -> StructureError {
    StructureError::Input(msg.into())
}

/// A family `(N_x : x ∈ X)` covering a target set `C`. `families[i]` is the
/// covering set of `apexes[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multicover {
    pub apexes: Vec<usize>,
    pub families: Vec<VertexSet>,
    pub target: VertexSet,
}

impl Multicover {
    pub fn len(&self) -> usize {
        self.apexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.apexes.is_empty()
    }

    pub fn apex_set(&self) -> VertexSet {
        self.apexes.iter().copied().collect()
    }

    pub fn family_union(&self) -> VertexSet {
        let mut u = VertexSet::new();
        for f in &self.families {
            u.union_with(f);
        }
        u
    }

    /// `X ∪ ⋃ N_x ∪ C`.
    pub fn ground(&self) -> VertexSet {
        let mut u = self.family_union();
        u.union_with(&self.apex_set());
        u.union_with(&self.target);
        u
    }
}

/// The subdivided `K_{k,|X|}` attached to a multicover: `spokes[i][j]` is the
/// vertex `a_{i,x}` joining `apexes[i]` to the `j`-th multicover apex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crest {
    pub apexes: Vec<usize>,
    pub spokes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum MulticoverViolation {
    VertexOutOfRange { vertex: usize },
    FamilyCount { apexes: usize, families: usize },
    RepeatedApex { apex: usize },
    ApexesAdjacent { x: usize, y: usize },
    NotANeighbour { apex: usize, vertex: usize },
    TargetOverlap { apex: usize, vertex: usize },
    ApexSeesTarget { apex: usize, vertex: usize },
    Uncovered { apex: usize, vertex: usize },
    CrossAdjacency { apex: usize, other_apex: usize, vertex: usize },
    FamilyNotStable { apex: usize, u: usize, v: usize },
    CrestShape { detail: String },
    CrestOverlap { vertex: usize },
    CrestMissingEdge { u: usize, v: usize },
    CrestExtraEdge { u: usize, v: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MulticoverReport {
    pub valid: bool,
    pub violation: Option<MulticoverViolation>,
    /// Clique number of `G[⋃ N_x]`, when the families are in range.
    pub cover_clique_number: Option<usize>,
}

/// Checks the multicover axioms, optionally stability of every family and
/// the crest bullets, and reports the first violation found.
pub fn verify_multicover(
    g: &Graph,
    mc: &Multicover,
    stable: bool,
    crest: Option<&Crest>,
    budget: &mut Budget,
) -> Result<MulticoverReport, StructureError> {
    let in_range = range_violation(g, mc, crest).is_none();
    let cover_clique_number = if in_range {
        Some(clique_within(g, &mc.family_union(), budget)?.size)
    } else {
        None
    };
    let violation = multicover_violation(g, mc, stable, crest);
    Ok(MulticoverReport {
        valid: violation.is_none(),
        violation,
        cover_clique_number,
    })
}

fn range_violation(g: &Graph, mc: &Multicover, crest: Option<&Crest>) -> Option<MulticoverViolation> {
    let mut all: Vec<usize> = mc.apexes.clone();
    all.extend(mc.families.iter().flat_map(|f| f.iter()));
    all.extend(mc.target.iter());
    if let Some(c) = crest {
        all.extend(&c.apexes);
        all.extend(c.spokes.iter().flatten());
    }
    all.into_iter()
        .find(|&v| v >= g.n())
        .map(|vertex| MulticoverViolation::VertexOutOfRange { vertex })
}

fn multicover_violation(g: &Graph, mc: &Multicover, stable: bool, crest: Option<&Crest>) -> Option<MulticoverViolation> {
    use MulticoverViolation::*;
    if let Some(v) = range_violation(g, mc, crest) {
        return Some(v);
    }
    if mc.apexes.len() != mc.families.len() {
        return Some(FamilyCount {
            apexes: mc.apexes.len(),
            families: mc.families.len(),
        });
    }
    let mut seen = VertexSet::new();
    for &x in &mc.apexes {
        if !seen.insert(x) {
            return Some(RepeatedApex { apex: x });
        }
    }
    let xs = mc.apex_set();
    if let Some((x, y)) = g.edge_within(&xs) {
        return Some(ApexesAdjacent { x, y });
    }
    for (&x, fam) in mc.apexes.iter().zip(&mc.families) {
        if let Some(v) = fam.iter().find(|&v| !g.has_edge(x, v)) {
            return Some(NotANeighbour { apex: x, vertex: v });
        }
        if mc.target.contains(x) {
            return Some(TargetOverlap { apex: x, vertex: x });
        }
        if let Some(v) = fam.intersection(&mc.target).first() {
            return Some(TargetOverlap { apex: x, vertex: v });
        }
        if let Some(v) = g.neighbors(x).intersection(&mc.target).first() {
            return Some(ApexSeesTarget { apex: x, vertex: v });
        }
        if let Some(v) = mc.target.iter().find(|&c| g.neighbors(c).is_disjoint(fam)) {
            return Some(Uncovered { apex: x, vertex: v });
        }
    }
    for (i, &x) in mc.apexes.iter().enumerate() {
        for (j, &y) in mc.apexes.iter().enumerate() {
            if i == j {
                continue;
            }
            let fam = &mc.families[i];
            let hit = if fam.contains(y) {
                Some(y)
            } else {
                g.neighbors(y).intersection(fam).first()
            };
            if let Some(v) = hit {
                return Some(CrossAdjacency {
                    apex: x,
                    other_apex: y,
                    vertex: v,
                });
            }
        }
    }
    if stable {
        for (&x, fam) in mc.apexes.iter().zip(&mc.families) {
            if let Some((u, v)) = g.edge_within(fam) {
                return Some(FamilyNotStable { apex: x, u, v });
            }
        }
    }
    crest.and_then(|c| crest_violation(g, mc, c))
}

fn crest_violation(g: &Graph, mc: &Multicover, crest: &Crest) -> Option<MulticoverViolation> {
    use MulticoverViolation::*;
    let k = crest.apexes.len();
    if k == 0 || crest.spokes.len() != k || crest.spokes.iter().any(|r| r.len() != mc.len()) {
        return Some(CrestShape {
            detail: format!(
                "need k >= 1 apexes and a {k} x {} spoke array",
                mc.len()
            ),
        });
    }
    let ground = mc.ground();
    let mut crest_set = VertexSet::new();
    for v in crest.apexes.iter().chain(crest.spokes.iter().flatten()) {
        if !crest_set.insert(*v) || ground.contains(*v) {
            return Some(CrestOverlap { vertex: *v });
        }
    }
    // spokes touch the ground only at their own apex
    for (row, &a) in crest.spokes.iter().zip(&crest.apexes) {
        for (&s, &x) in row.iter().zip(&mc.apexes) {
            if !g.has_edge(s, x) {
                return Some(CrestMissingEdge { u: s, v: x });
            }
            if !g.has_edge(s, a) {
                return Some(CrestMissingEdge { u: s, v: a });
            }
        }
    }
    for v in crest_set.iter() {
        for u in g.neighbors(v).intersection(&ground).iter() {
            if !crest_edge_allowed(mc, crest, v, u) {
                return Some(CrestExtraEdge { u: v.min(u), v: v.max(u) });
            }
        }
        for u in g.neighbors(v).intersection(&crest_set).iter().filter(|&u| u > v) {
            if !crest_edge_allowed(mc, crest, v, u) {
                return Some(CrestExtraEdge { u: v, v: u });
            }
        }
    }
    None
}

/// Which edges incident to the crest are permitted: spoke to its own
/// multicover apex, spoke to its own crest apex, and any pair of spokes
/// attached to the same multicover apex.
fn crest_edge_allowed(mc: &Multicover, crest: &Crest, u: usize, v: usize) -> bool {
    let locate = |w: usize| -> Option<(usize, usize)> {
        crest
            .spokes
            .iter()
            .enumerate()
            .find_map(|(i, row)| row.iter().position(|&s| s == w).map(|j| (i, j)))
    };
    let allowed_one_way = |s: usize, other: usize| -> bool {
        let Some((i, j)) = locate(s) else { return false };
        if other == mc.apexes[j] || other == crest.apexes[i] {
            return true;
        }
        matches!(locate(other), Some((_, j2)) if j2 == j)
    };
    allowed_one_way(u, v) || allowed_one_way(v, u)
}

/// An induced path of length three or five between two multicover apexes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Oddity {
    pub path: Vec<usize>,
}

impl Oddity {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum OddityViolation {
    VertexOutOfRange { vertex: usize },
    NotInducedPath { detail: String },
    Length { length: usize },
    EndNotApex { vertex: usize },
    ApexTouchesPath { apex: usize },
    OutsideGround { vertex: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OddityReport {
    pub valid: bool,
    pub violation: Option<OddityViolation>,
}

pub fn verify_oddity(g: &Graph, mc: &Multicover, oddity: &Oddity) -> OddityReport {
    let violation = oddity_violation(g, mc, &oddity.path);
    OddityReport {
        valid: violation.is_none(),
        violation,
    }
}

fn oddity_violation(g: &Graph, mc: &Multicover, path: &[usize]) -> Option<OddityViolation> {
    use OddityViolation::*;
    if let Some(&v) = path.iter().find(|&&v| v >= g.n()) {
        return Some(VertexOutOfRange { vertex: v });
    }
    if let Err(detail) = check_induced_path(g, path) {
        return Some(NotInducedPath { detail });
    }
    let len = path.len().saturating_sub(1);
    if len != 3 && len != 5 {
        return Some(Length { length: len });
    }
    let xs = mc.apex_set();
    let ends = [path[0], path[len]];
    if let Some(&v) = ends.iter().find(|&&v| !xs.contains(v)) {
        return Some(EndNotApex { vertex: v });
    }
    let on_path: VertexSet = path.iter().copied().collect();
    let touched = g.closed_neighborhood_of_set(&on_path);
    if let Some(x) = xs.iter().find(|&x| !ends.contains(&x) && touched.contains(x)) {
        return Some(ApexTouchesPath { apex: x });
    }
    let ground = mc.ground();
    path.iter()
        .find(|&&v| !ground.contains(v))
        .map(|&v| OutsideGround { vertex: v })
}

/// Checks that `path` is an induced path of `g` (a single vertex counts).
pub fn check_induced_path(g: &Graph, path: &[usize]) -> Result<(), String> {
    if path.is_empty() {
        return Err("empty path".into());
    }
    let mut seen = VertexSet::new();
    for &v in path {
        if v >= g.n() {
            return Err(format!("vertex {v} out of range"));
        }
        if !seen.insert(v) {
            return Err(format!("vertex {v} repeated"));
        }
    }
    for w in path.windows(2) {
        if !g.has_edge(w[0], w[1]) {
            return Err(format!("missing edge {}-{}", w[0], w[1]));
        }
    }
    for i in 0..path.len() {
        for j in i + 2..path.len() {
            if g.has_edge(path[i], path[j]) {
                return Err(format!("chord {}-{}", path[i], path[j]));
            }
        }
    }
    Ok(())
}

/// Caller-supplied chromatic thresholds `c_1, …, c_m` for the refinement,
/// one per apex, and the ambient bound `τ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementBudget {
    pub thresholds: Vec<usize>,
    pub tau: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    C,
    D,
}

/// One round of the refinement. `covers` says which of `C_i`, `D_i` the new
/// set `A_i` covers; it is anticomplete to the other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RefinementRound {
    pub round: usize,
    pub a: VertexSet,
    pub c: VertexSet,
    pub d: VertexSet,
    pub chi_c: usize,
    pub chi_d: usize,
    pub covers: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RefinementTrace {
    pub rounds: Vec<RefinementRound>,
}

/// Splits the target into shrinking pairs `C_i`, `D_i` so that every chosen
/// `A_h ⊆ N_h` covers one of them and is anticomplete to the other.
///
/// Round one takes `A_1 ⊆ N_1` inclusion-minimal with `χ(f(A_1)) > c_1`,
/// where `f(A)` is the set of target vertices with a neighbour in `A`; later
/// rounds take `A_i ⊆ N_i` minimal such that `f(A_i)` meets `C_{i-1}` or
/// `D_{i-1}` in a set of chromatic number above `c_i`, preferring `C`.
/// Minimal sets are found by dropping vertices in increasing order while
/// the property survives. Every round's postcondition is re-checked for all
/// earlier `A_h`.
pub fn refine_multicover(
    g: &Graph,
    mc: &Multicover,
    rb: &RefinementBudget,
    budget: &mut Budget,
) -> Result<RefinementTrace, StructureError> {
    if rb.thresholds.len() != mc.len() {
        return Err(StructureError::ThresholdCount {
            expected: mc.len(),
            got: rb.thresholds.len(),
        });
    }
    if mc.families.len() != mc.len() {
        return Err(input("one covering family per apex required"));
    }
    for f in &mc.families {
        g.check_set(f)?;
    }
    g.check_set(&mc.target)?;
    let f_of = |a: &VertexSet| g.neighborhood_of_set(a).intersection(&mc.target);
    let mut rounds: Vec<RefinementRound> = Vec::new();
    for (idx, (fam, &c_i)) in mc.families.iter().zip(&rb.thresholds).enumerate() {
        let round = idx + 1;
        let prev = rounds.last().map(|r| (r.c.clone(), r.d.clone()));
        let exceeds = |a: &VertexSet, budget: &mut Budget| -> Result<Option<Side>, StructureError> {
            let fa = f_of(a);
            match &prev {
                None => Ok((chromatic_number_of(g, &fa, budget)? > c_i).then_some(Side::C)),
                Some((c, d)) => {
                    if chromatic_number_of(g, &fa.intersection(c), budget)? > c_i {
                        Ok(Some(Side::C))
                    } else if chromatic_number_of(g, &fa.intersection(d), budget)? > c_i {
                        Ok(Some(Side::D))
                    } else {
                        Ok(None)
                    }
                }
            }
        };
        if exceeds(fam, budget)?.is_none() {
            return Err(StructureError::ThresholdUnreachable { round, threshold: c_i });
        }
        let mut a = fam.clone();
        for v in fam.iter() {
            a.remove(v);
            if exceeds(&a, budget)?.is_none() {
                a.insert(v);
            }
        }
        let side = exceeds(&a, budget)?.expect("minimal set keeps the property");
        let fa = f_of(&a);
        let (c, d) = match (&prev, side) {
            (None, _) => (fa.clone(), mc.target.difference(&fa)),
            (Some((c, d)), Side::C) => (fa.intersection(c), d.difference(&fa)),
            (Some((c, d)), Side::D) => (c.difference(&fa), fa.intersection(d)),
        };
        let chi_c = chromatic_number_of(g, &c, budget)?;
        let chi_d = chromatic_number_of(g, &d, budget)?;
        rounds.push(RefinementRound {
            round,
            a,
            c,
            d,
            chi_c,
            chi_d,
            covers: side,
        });
        check_refinement(g, &rounds)?;
    }
    Ok(RefinementTrace { rounds })
}

fn check_refinement(g: &Graph, rounds: &[RefinementRound]) -> Result<(), StructureError> {
    let last = rounds.last().unwrap();
    for r in rounds {
        let (cov, anti) = match r.covers {
            Side::C => (&last.c, &last.d),
            Side::D => (&last.d, &last.c),
        };
        if !(cov.is_subset(&g.neighborhood_of_set(&r.a)) && g.is_anticomplete(&r.a, anti)) {
            return Err(StructureError::Unverified(format!(
                "round {} set no longer covers one side and misses the other after round {}",
                r.round, last.round
            )));
        }
    }
    Ok(())
}

/// Extracts an oddity between the apexes owning `b1` and `b2`, following the
/// neighbour-count selection: `y_1 ∈ B_1 ∪ B_2` with the most neighbours in
/// the clique `Z`, then `z_2 ∈ Z` missed by `y_1`, `y_2` on the other side
/// seeing `z_2`, and `z_1 ∈ Z` seen by `y_1` but not `y_2`. Ties go to the
/// lowest index. Returns `None` when a selection step has no candidate.
pub fn find_oddity(
    g: &Graph,
    mc: &Multicover,
    b1: &VertexSet,
    b2: &VertexSet,
    d: &VertexSet,
    z: &VertexSet,
) -> Result<Option<Oddity>, StructureError> {
    for s in [b1, b2, d, z] {
        g.check_set(s)?;
    }
    if !z.is_subset(d) || !g.is_clique(z) || z.is_empty() {
        return Err(input("Z must be a nonempty clique inside D"));
    }
    if !g.covers(b1, d) || !g.covers(b2, d) {
        return Err(input("B1 and B2 must each cover D"));
    }
    let owner = |b: &VertexSet| -> Result<usize, StructureError> {
        mc.apexes
            .iter()
            .zip(&mc.families)
            .find(|(_, f)| !b.is_empty() && b.is_subset(f))
            .map(|(&x, _)| x)
            .ok_or_else(|| input("B1 and B2 must be nonempty subsets of covering families"))
    };
    let (mut x1, mut x2) = (owner(b1)?, owner(b2)?);
    if x1 == x2 {
        return Err(input("B1 and B2 must belong to different apexes"));
    }
    let (mut b1, mut b2) = (b1, b2);
    let both = b1.union(b2);
    let y1 = both
        .iter()
        .max_by_key(|&y| (g.neighbors(y).intersection_len(z), std::cmp::Reverse(y)))
        .unwrap();
    if !b1.contains(y1) {
        std::mem::swap(&mut b1, &mut b2);
        std::mem::swap(&mut x1, &mut x2);
    }
    let Some(z2) = z.iter().find(|&v| !g.has_edge(y1, v)) else {
        return Ok(None);
    };
    let Some(y2) = b2.iter().find(|&y| g.has_edge(y, z2)) else {
        return Ok(None);
    };
    let Some(z1) = z.iter().find(|&v| g.has_edge(y1, v) && !g.has_edge(y2, v)) else {
        return Ok(None);
    };
    let path = if g.has_edge(y1, y2) {
        vec![x1, y1, y2, x2]
    } else {
        vec![x1, y1, z1, z2, y2, x2]
    };
    let oddity = Oddity { path };
    match oddity_violation(g, mc, &oddity.path) {
        None => Ok(Some(oddity)),
        Some(v) => Err(StructureError::Unverified(format!("{v:?}"))),
    }
}

/// An ordered partition `(W_1, …, W_n)`; `tau`, when set, bounds the
/// chromatic number of every part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub parts: Vec<VertexSet>,
    pub tau: Option<usize>,
}

impl Grading {
    pub fn ground(&self) -> VertexSet {
        let mut u = VertexSet::new();
        for p in &self.parts {
            u.union_with(p);
        }
        u
    }

    /// Index of the part containing `v`.
    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum GradingViolation {
    Overlap { vertex: usize },
    Missing { vertex: usize },
    Extra { vertex: usize },
    TooColourful { part: usize, chi: usize },
}

/// Checks that `grading` partitions `ground` exactly and, if `tau` is set,
/// that every part is `tau`-colourable.
pub fn verify_grading(
    g: &Graph,
    ground: &VertexSet,
    grading: &Grading,
    budget: &mut Budget,
) -> Result<Option<GradingViolation>, StructureError> {
    let mut seen = VertexSet::new();
    for p in &grading.parts {
        g.check_set(p)?;
        if let Some(v) = p.intersection(&seen).first() {
            return Ok(Some(GradingViolation::Overlap { vertex: v }));
        }
        seen.union_with(p);
    }
    if let Some(v) = ground.difference(&seen).first() {
        return Ok(Some(GradingViolation::Missing { vertex: v }));
    }
    if let Some(v) = seen.difference(ground).first() {
        return Ok(Some(GradingViolation::Extra { vertex: v }));
    }
    if let Some(tau) = grading.tau {
        for (i, p) in grading.parts.iter().enumerate() {
            let chi = chromatic_number_of(g, p, budget)?;
            if chi > tau {
                return Ok(Some(GradingViolation::TooColourful { part: i, chi }));
            }
        }
    }
    Ok(None)
}

/// Position in `b_enum` of the first vertex adjacent to `v`.
fn earliest_parent_index(g: &Graph, b_enum: &[usize], v: usize) -> Option<usize> {
    b_enum.iter().position(|&b| g.has_edge(b, v))
}

/// The first vertex of `b_enum` adjacent to `v`.
pub fn earliest_parent(g: &Graph, b_enum: &[usize], v: usize) -> Result<usize, StructureError> {
    g.check_vertex(v)?;
    for &b in b_enum {
        g.check_vertex(b)?;
    }
    earliest_parent_index(g, b_enum, v)
        .map(|i| b_enum[i])
        .ok_or_else(|| input(format!("vertex {v} has no neighbour in the enumeration")))
}

fn check_enum_covers(g: &Graph, b_enum: &[usize], c: &VertexSet) -> Result<(), StructureError> {
    g.check_set(c)?;
    let b: VertexSet = b_enum.iter().copied().collect();
    g.check_set(&b)?;
    if b.len() != b_enum.len() {
        return Err(input("enumeration repeats a vertex"));
    }
    if !g.covers(&b, c) {
        return Err(input("enumeration does not cover the set"));
    }
    Ok(())
}

/// `W_i` is the set of vertices of `C` whose earliest parent is `b_i`.
pub fn grading_from_cover(g: &Graph, b_enum: &[usize], c: &VertexSet) -> Result<Grading, StructureError> {
    check_enum_covers(g, b_enum, c)?;
    let mut parts = vec![VertexSet::new(); b_enum.len()];
    for v in c.iter() {
        parts[earliest_parent_index(g, b_enum, v).unwrap()].insert(v);
    }
    Ok(Grading { parts, tau: None })
}

/// Edges `uv` of `G[C]` where the earliest parent of each end misses the
/// other end.
pub fn square_edges(g: &Graph, b_enum: &[usize], c: &VertexSet) -> Result<Vec<(usize, usize)>, StructureError> {
    check_enum_covers(g, b_enum, c)?;
    let mut out = Vec::new();
    for u in c.iter() {
        let pu = b_enum[earliest_parent_index(g, b_enum, u).unwrap()];
        for v in g.neighbors(u).intersection(c).iter().filter(|&v| v > u) {
            let pv = b_enum[earliest_parent_index(g, b_enum, v).unwrap()];
            if !g.has_edge(pu, v) && !g.has_edge(pv, u) {
                out.push((u, v));
            }
        }
    }
    Ok(out)
}

/// Whether every vertex earlier than another in the grading also has the
/// earlier earliest parent. A vertex of the grading with no parent in the
/// enumeration makes the pair incompatible.
pub fn is_compatible(g: &Graph, b_enum: &[usize], grading: &Grading) -> bool {
    let mut ranks: Vec<Vec<usize>> = Vec::with_capacity(grading.parts.len());
    for p in &grading.parts {
        let mut r = Vec::with_capacity(p.len());
        for v in p.iter() {
            if v >= g.n() {
                return false;
            }
            match earliest_parent_index(g, b_enum, v) {
                Some(i) => r.push(i),
                None => return false,
            }
        }
        ranks.push(r);
    }
    // max parent rank over W_1..W_{i-1} must be below min parent rank of W_i
    let mut max_before: Option<usize> = None;
    for r in &ranks {
        if let (Some(m), Some(&lo)) = (max_before, r.iter().min()) {
            if m >= lo {
                return false;
            }
        }
        if let Some(&hi) = r.iter().max() {
            max_before = Some(max_before.map_or(hi, |m| m.max(hi)));
        }
    }
    true
}

/// A centre `z ∈ X` with every vertex of `X` within `G[X]`-distance `rho`, or
/// `None` if there is none. The empty set is a ρ-ball without a centre.
pub fn rho_ball_centre(g: &Graph, x: &VertexSet, rho: usize) -> Result<Option<usize>, GraphError> {
    g.check_set(x)?;
    Ok(x.iter().find(|&z| {
        let dist = g.bfs_within(z, Some(x));
        x.iter().all(|v| matches!(dist[v], Some(d) if d <= rho))
    }))
}

pub fn is_rho_ball(g: &Graph, x: &VertexSet, rho: usize) -> Result<bool, GraphError> {
    Ok(x.is_empty() || rho_ball_centre(g, x, rho)?.is_some())
}

/// Layers `L_0, …, L_k` with a drain in `L_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shower {
    pub layers: Vec<VertexSet>,
    pub drain: usize,
}

impl Shower {
    /// The vertex of `L_0`, if that layer is a singleton.
    pub fn head(&self) -> Option<usize> {
        match self.layers.first() {
            Some(l) if l.len() == 1 => l.first(),
            _ => None,
        }
    }

    /// Index `k` of the last layer.
    pub fn depth(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn vertex_set(&self) -> VertexSet {
        let mut u = VertexSet::new();
        for l in &self.layers {
            u.union_with(l);
        }
        u
    }

    pub fn last_layer(&self) -> &VertexSet {
        self.layers.last().expect("shower has layers")
    }

    /// Vertices of `L_k` with a neighbour in `L_{k-1}`.
    pub fn floor(&self, g: &Graph) -> VertexSet {
        let k = self.depth();
        if k == 0 {
            return VertexSet::new();
        }
        let below = &self.layers[k - 1];
        self.layers[k]
            .iter()
            .filter(|&v| !g.neighbors(v).is_disjoint(below))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum ShowerViolation {
    NoLayers,
    VertexOutOfRange { vertex: usize },
    HeadNotSingleton { size: usize },
    LayersOverlap { vertex: usize },
    DrainNotInLastLayer { drain: usize },
    Uncovered { layer: usize, vertex: usize },
    LayerSkip { lower: usize, upper: usize, u: usize, v: usize },
    LastLayerDisconnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShowerReport {
    pub valid: bool,
    pub violation: Option<ShowerViolation>,
    pub floor: VertexSet,
}

pub fn verify_shower(g: &Graph, s: &Shower) -> ShowerReport {
    let violation = shower_violation(g, s);
    let floor = match violation {
        Some(ShowerViolation::NoLayers | ShowerViolation::VertexOutOfRange { .. }) => VertexSet::new(),
        _ => s.floor(g),
    };
    ShowerReport {
        valid: violation.is_none(),
        violation,
        floor,
    }
}

fn shower_violation(g: &Graph, s: &Shower) -> Option<ShowerViolation> {
    use ShowerViolation::*;
    if s.layers.is_empty() {
        return Some(NoLayers);
    }
    let mut seen = VertexSet::new();
    for l in &s.layers {
        if let Some(v) = l.last().filter(|&v| v >= g.n()) {
            return Some(VertexOutOfRange { vertex: v });
        }
        if let Some(v) = l.intersection(&seen).first() {
            return Some(LayersOverlap { vertex: v });
        }
        seen.union_with(l);
    }
    if s.drain >= g.n() {
        return Some(VertexOutOfRange { vertex: s.drain });
    }
    if s.layers[0].len() != 1 {
        return Some(HeadNotSingleton { size: s.layers[0].len() });
    }
    let k = s.depth();
    if !s.layers[k].contains(s.drain) {
        return Some(DrainNotInLastLayer { drain: s.drain });
    }
    for i in 1..k {
        let below = &s.layers[i - 1];
        if let Some(v) = s.layers[i].iter().find(|&v| g.neighbors(v).is_disjoint(below)) {
            return Some(Uncovered { layer: i, vertex: v });
        }
    }
    for i in 0..=k {
        for j in i + 2..=k {
            for u in s.layers[i].iter() {
                if let Some(v) = g.neighbors(u).intersection(&s.layers[j]).first() {
                    return Some(LayerSkip { lower: i, upper: j, u, v });
                }
            }
        }
    }
    if !g.is_connected_within(&s.layers[k]) {
        return Some(LastLayerDisconnected);
    }
    None
}

/// BFS layers from `root` up to depth `k`, with the last layer cut down to
/// the drain's component. `None` if the drain is not at distance `k`.
pub fn shower_from_bfs(g: &Graph, root: usize, k: usize, drain: usize) -> Result<Option<Shower>, GraphError> {
    g.check_vertex(root)?;
    g.check_vertex(drain)?;
    let dist = g.bfs_within(root, None);
    if dist[drain] != Some(k) {
        return Ok(None);
    }
    let mut layers = vec![VertexSet::new(); k + 1];
    for (v, d) in dist.iter().enumerate() {
        if let Some(d) = *d {
            if d <= k {
                layers[d].insert(v);
            }
        }
    }
    layers[k] = g.component_within(&layers[k], drain);
    let s = Shower { layers, drain };
    Ok(verify_shower(g, &s).valid.then_some(s))
}

/// An induced head-to-drain path inside the shower's vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Jet {
    pub path: Vec<usize>,
}

impl Jet {
    pub fn len(&self) -> usize {
        self.path.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.path.len() <= 1
    }
}

/// All jets with at most `max_len` edges, in DFS order from the head
/// (neighbours in increasing order). Running out of budget returns the
/// jets found so far together with the error.
pub fn enumerate_jets(
    g: &Graph,
    s: &Shower,
    max_len: usize,
    budget: &mut Budget,
) -> Result<Vec<Jet>, (Vec<Jet>, StructureError)> {
    let report = verify_shower(g, s);
    if let Some(v) = report.violation {
        return Err((vec![], input(format!("invalid shower: {v:?}"))));
    }
    let head = s.head().unwrap();
    let inside = s.vertex_set();
    let mut jets = Vec::new();
    if head == s.drain {
        jets.push(Jet { path: vec![head] });
        return Ok(jets);
    }
    let n = g.n();
    let mut path = vec![head];
    let mut cursors = vec![0usize];
    let mut on_path = vec![false; n];
    on_path[head] = true;
    // interior vertices adjacent to each vertex; the path end is excluded
    let mut blocked = vec![0u32; n];
    while let Some(&end) = path.last() {
        let k = path.len() - 1;
        let nbrs = g.neighbor_list(end);
        let Some(&w) = nbrs.get(cursors[k]) else {
            path.pop();
            cursors.pop();
            on_path[end] = false;
            if let Some(&prev) = path.last() {
                for &x in g.neighbor_list(prev) {
                    blocked[x] -= 1;
                }
            }
            continue;
        };
        cursors[k] += 1;
        if !inside.contains(w) || on_path[w] || blocked[w] > 0 {
            continue;
        }
        if k + 1 > max_len {
            continue;
        }
        if let Err(e) = budget.tick() {
            return Err((jets, e.into()));
        }
        if w == s.drain {
            let mut p = path.clone();
            p.push(w);
            jets.push(Jet { path: p });
            continue;
        }
        for &x in g.neighbor_list(end) {
            blocked[x] += 1;
        }
        path.push(w);
        cursors.push(0);
        on_path[w] = true;
    }
    Ok(jets)
}

/// Length of the longest run `r, r+1, …` (cyclically mod `ell`) inside
/// `residues`, capped at `ell`.
pub fn completeness(residues: &BTreeSet<usize>, ell: usize) -> usize {
    if ell == 0 || residues.is_empty() {
        return 0;
    }
    if residues.len() >= ell {
        return ell;
    }
    let mut best = 0;
    for &r in residues {
        if residues.contains(&((r + ell - 1) % ell)) {
            continue;
        }
        let mut t = 0;
        while residues.contains(&((r + t) % ell)) {
            t += 1;
        }
        best = best.max(t);
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JetSummary {
    pub ell: usize,
    pub d: usize,
    pub floor: VertexSet,
    pub lengths: BTreeSet<usize>,
    pub residues: BTreeSet<usize>,
    pub completeness: usize,
    /// Lengths of jets `J` whose floor exterior `floor ∖ N[V(J)]` has
    /// chromatic number above `d`.
    pub peripheral_lengths: BTreeSet<usize>,
    pub peripheral_residues: BTreeSet<usize>,
    pub peripheral_completeness: usize,
}

/// Whether the jet is `d`-peripheral. The largest floor subset
/// anticomplete to the jet is `floor ∖ N[V(J)]`, and χ is monotone, so
/// testing that one set decides the question.
pub fn jet_is_peripheral(
    g: &Graph,
    floor: &VertexSet,
    jet: &Jet,
    d: usize,
    budget: &mut Budget,
) -> Result<bool, StructureError> {
    let on: VertexSet = jet.path.iter().copied().collect();
    let x = floor.difference(&g.closed_neighborhood_of_set(&on));
    Ok(chromatic_number_of(g, &x, budget)? > d)
}

pub fn jet_summary(
    g: &Graph,
    s: &Shower,
    jets: &[Jet],
    ell: usize,
    d: usize,
    budget: &mut Budget,
) -> Result<JetSummary, StructureError> {
    if ell == 0 {
        return Err(input("modulus must be at least 1"));
    }
    let floor = s.floor(g);
    let lengths: BTreeSet<usize> = jets.iter().map(Jet::len).collect();
    let mut peripheral_lengths = BTreeSet::new();
    for j in jets {
        if !peripheral_lengths.contains(&j.len()) && jet_is_peripheral(g, &floor, j, d, budget)? {
            peripheral_lengths.insert(j.len());
        }
    }
    let residues: BTreeSet<usize> = lengths.iter().map(|l| l % ell).collect();
    let peripheral_residues: BTreeSet<usize> = peripheral_lengths.iter().map(|l| l % ell).collect();
    Ok(JetSummary {
        ell,
        d,
        floor,
        completeness: completeness(&residues, ell),
        peripheral_completeness: completeness(&peripheral_residues, ell),
        lengths,
        residues,
        peripheral_lengths,
        peripheral_residues,
    })
}

/// Distance layers `M_0 = {s}, M_1, …` from the drain inside `G[L_k]`.
pub fn drain_layers(g: &Graph, s: &Shower) -> Vec<VertexSet> {
    let last = s.last_layer();
    let dist = g.bfs_within(s.drain, Some(last));
    let mut layers: Vec<VertexSet> = Vec::new();
    for v in last.iter() {
        if let Some(d) = dist[v] {
            if layers.len() <= d {
                layers.resize(d + 1, VertexSet::new());
            }
            layers[d].insert(v);
        }
    }
    layers
}

/// The induced path from `v ∈ M_i` to the drain stepping to the
/// lowest-index neighbour in the previous drain layer each time.
pub fn bloodline(g: &Graph, s: &Shower, v: usize) -> Result<Vec<usize>, StructureError> {
    g.check_vertex(v)?;
    if s.layers.is_empty() || !s.last_layer().contains(s.drain) {
        return Err(input("drain must lie in the last layer"));
    }
    let m = drain_layers(g, s);
    let Some(i) = m.iter().position(|l| l.contains(v)) else {
        return Err(input(format!("vertex {v} is in no drain layer")));
    };
    let mut path = vec![v];
    let mut cur = v;
    for layer in m[..i].iter().rev() {
        cur = g.neighbors(cur).intersection(layer).first().expect("BFS layer has a predecessor");
        path.push(cur);
    }
    Ok(path)
}

/// A shortest induced drain-to-head path whose interior avoids the shower
/// and sees no shower vertex other than the drain and the head. At least
/// one interior vertex is required; returns `None` if none exists within
/// `max_len` edges.
pub fn find_recirculator(g: &Graph, s: &Shower, max_len: usize) -> Result<Option<Vec<usize>>, StructureError> {
    if let Some(v) = shower_violation(g, s) {
        if matches!(v, ShowerViolation::NoLayers | ShowerViolation::VertexOutOfRange { .. } | ShowerViolation::HeadNotSingleton { .. }) {
            return Err(input(format!("invalid shower: {v:?}")));
        }
    }
    let head = s.head().unwrap();
    let drain = s.drain;
    if head == drain || g.has_edge(head, drain) {
        return Ok(None);
    }
    let inside = s.vertex_set();
    let mut ends = VertexSet::singleton(head);
    ends.insert(drain);
    let rest = inside.difference(&ends);
    let mut allowed: VertexSet = g
        .vertices()
        .difference(&inside)
        .iter()
        .filter(|&w| g.neighbors(w).is_disjoint(&rest))
        .collect();
    allowed.union_with(&ends);
    // BFS from the drain; neither endpoint may be an interior vertex
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut dist = vec![usize::MAX; n];
    dist[drain] = 0;
    let mut queue = std::collections::VecDeque::from([drain]);
    while let Some(u) = queue.pop_front() {
        if u == head || dist[u] >= max_len {
            continue;
        }
        for &w in g.neighbor_list(u) {
            if !allowed.contains(w) || dist[w] != usize::MAX {
                continue;
            }
            if u == drain && w == head {
                continue;
            }
            dist[w] = dist[u] + 1;
            parent[w] = u;
            queue.push_back(w);
        }
    }
    if dist[head] == usize::MAX {
        return Ok(None);
    }
    let mut path = vec![head];
    while *path.last().unwrap() != drain {
        path.push(parent[*path.last().unwrap()]);
    }
    path.reverse();
    if let Err(e) = check_induced_path(g, &path) {
        return Err(StructureError::Unverified(e));
    }
    Ok(Some(path))
}

/// Joins a head-to-drain jet with a drain-to-head recirculator into a hole.
pub fn close_hole(g: &Graph, jet: &[usize], recirculator: &[usize]) -> Result<Hole, StructureError> {
    let (Some(&z0), Some(&s)) = (jet.first(), jet.last()) else {
        return Err(input("empty jet"));
    };
    if recirculator.first() != Some(&s) || recirculator.last() != Some(&z0) {
        return Err(input("recirculator must run from the jet's drain back to its head"));
    }
    let mut cycle = jet.to_vec();
    cycle.extend(&recirculator[1..recirculator.len().saturating_sub(1)]);
    Ok(Hole::new(g, cycle)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{complete, crest_gadget, cycle, multicover_gadget, path, random_graph};
    use crate::graph::GraphBuilder;
    use crate::holes::HoleDefect;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    fn b() -> Budget {
        Budget::default()
    }

    fn with_edges(g: &Graph, edges: &[(usize, usize)]) -> Graph {
        let mut gb = GraphBuilder::from(g);
        for &(u, v) in edges {
            gb.add_edge(u, v).unwrap();
        }
        gb.build()
    }

    // multicover_gadget(2, 3, 4): x0=0, N_0={1,2,3}, x1=4, N_1={5,6,7},
    // C={8,9,10,11}; c_j sees the (j mod 3)-th vertex of each family.
    fn figure_one() -> (Graph, Multicover) {
        let gd = multicover_gadget(2, 3, 4).unwrap();
        (gd.graph, gd.multicover)
    }

    #[test]
    fn figure_one_multicover_is_valid_and_stable() {
        let (g, mc) = figure_one();
        assert_eq!(mc.apexes, vec![0, 4]);
        assert_eq!(mc.target, set(&[8, 9, 10, 11]));
        let r = verify_multicover(&g, &mc, true, None, &mut b()).unwrap();
        assert!(r.valid, "{r:?}");
        assert_eq!(r.cover_clique_number, Some(1));
    }

    #[test]
    fn multicover_rejections() {
        let (g, mc) = figure_one();
        let g2 = with_edges(&g, &[(1, 2)]);
        let r = verify_multicover(&g2, &mc, true, None, &mut b()).unwrap();
        assert_eq!(r.violation, Some(MulticoverViolation::FamilyNotStable { apex: 0, u: 1, v: 2 }));
        assert_eq!(r.cover_clique_number, Some(2));
        assert!(verify_multicover(&g2, &mc, false, None, &mut b()).unwrap().valid);

        let g3 = with_edges(&g, &[(4, 1)]);
        let r = verify_multicover(&g3, &mc, false, None, &mut b()).unwrap();
        assert_eq!(
            r.violation,
            Some(MulticoverViolation::CrossAdjacency { apex: 0, other_apex: 4, vertex: 1 })
        );

        let g4 = with_edges(&g, &[(0, 8)]);
        let r = verify_multicover(&g4, &mc, false, None, &mut b()).unwrap();
        assert_eq!(r.violation, Some(MulticoverViolation::ApexSeesTarget { apex: 0, vertex: 8 }));

        let g5 = with_edges(&g, &[(0, 4)]);
        let r = verify_multicover(&g5, &mc, false, None, &mut b()).unwrap();
        assert_eq!(r.violation, Some(MulticoverViolation::ApexesAdjacent { x: 0, y: 4 }));

        let mut m2 = mc.clone();
        m2.target.insert(40);
        let r = verify_multicover(&g, &m2, false, None, &mut b()).unwrap();
        assert_eq!(r.violation, Some(MulticoverViolation::VertexOutOfRange { vertex: 40 }));
        assert_eq!(r.cover_clique_number, None);
    }

    #[test]
    fn flipping_any_forbidden_bit_is_rejected() {
        let (g, mc) = figure_one();
        let n = g.n();
        for u in 0..n {
            for v in u + 1..n {
                let mut gb = GraphBuilder::new(n);
                for (a, c) in g.edges() {
                    if (a, c) != (u, v) {
                        gb.add_edge(a, c).unwrap();
                    }
                }
                if !g.has_edge(u, v) {
                    gb.add_edge(u, v).unwrap();
                }
                let h = gb.build();
                let valid = verify_multicover(&h, &mc, true, None, &mut b()).unwrap().valid;
                // every edge of the gadget is required; the only permitted
                // additions join two families, a family and C, or C to itself
                let fam_of = |w: usize| mc.families.iter().position(|f| f.contains(w));
                let harmless = !g.has_edge(u, v)
                    && (matches!((fam_of(u), fam_of(v)), (Some(i), Some(j)) if i != j)
                        || (fam_of(u).is_some() && mc.target.contains(v))
                        || (mc.target.contains(u) && mc.target.contains(v)));
                if harmless {
                    assert!(valid, "{u}-{v}");
                } else {
                    assert!(!valid, "{u}-{v}");
                }
            }
        }
    }

    #[test]
    fn crest_gadget_verifies_and_rejects_extra_edges() {
        let (g, mc) = figure_one();
        let cg = crest_gadget(3, &g, &mc).unwrap();
        let r = verify_multicover(&cg.graph, &cg.multicover, true, Some(&cg.crest), &mut b()).unwrap();
        assert!(r.valid, "{r:?}");
        let a0 = cg.crest.apexes[0];
        let a1 = cg.crest.apexes[1];
        let s00 = cg.crest.spokes[0][0];
        let s01 = cg.crest.spokes[0][1];
        let s10 = cg.crest.spokes[1][0];
        for (u, v) in [(a0, a1), (s00, s01), (a0, 8), (s00, 4), (a1, s00), (s00, 1)] {
            let h = with_edges(&cg.graph, &[(u, v)]);
            let r = verify_multicover(&h, &cg.multicover, true, Some(&cg.crest), &mut b()).unwrap();
            assert!(!r.valid, "{u}-{v} accepted");
        }
        // spokes at the same multicover apex may touch
        let h = with_edges(&cg.graph, &[(s00, s10)]);
        assert!(verify_multicover(&h, &cg.multicover, true, Some(&cg.crest), &mut b()).unwrap().valid);
    }

    #[test]
    fn oddity_examples() {
        let (g, mc) = figure_one();
        // left: x0-1-5-x1 with the edge 1-5 added
        let left = with_edges(&g, &[(1, 5)]);
        assert!(verify_oddity(&left, &mc, &Oddity { path: vec![0, 1, 5, 4] }).valid);
        // right: x0-1-c0-c1-6-x1 with the edge c0-c1 added
        let right = with_edges(&g, &[(8, 9)]);
        assert!(verify_oddity(&right, &mc, &Oddity { path: vec![0, 1, 8, 9, 6, 4] }).valid);
        // length four: x0-1-8-5-x1 in the plain gadget
        let r = verify_oddity(&g, &mc, &Oddity { path: vec![0, 1, 8, 5, 4] });
        assert_eq!(r.violation, Some(OddityViolation::Length { length: 4 }));
        let r = verify_oddity(&right, &mc, &Oddity { path: vec![1, 8, 9, 6] });
        assert_eq!(r.violation, Some(OddityViolation::EndNotApex { vertex: 1 }));
    }

    #[test]
    fn oddity_touching_third_apex_is_rejected() {
        let gd = multicover_gadget(3, 2, 2).unwrap();
        // x0=0 {1,2}, x1=3 {4,5}, x2=6 {7,8}, C={9,10}
        let g = with_edges(&gd.graph, &[(1, 4)]);
        assert!(verify_oddity(&g, &gd.multicover, &Oddity { path: vec![0, 1, 4, 3] }).valid);
        let g = with_edges(&g, &[(6, 1)]);
        let r = verify_oddity(&g, &gd.multicover, &Oddity { path: vec![0, 1, 4, 3] });
        assert_eq!(r.violation, Some(OddityViolation::ApexTouchesPath { apex: 6 }));
    }

    #[test]
    fn find_oddity_follows_the_selection() {
        let (g, mc) = figure_one();
        let (n0, n1) = (&mc.families[0], &mc.families[1]);
        let right = with_edges(&g, &[(8, 9)]);
        let z = set(&[8, 9]);
        let o = find_oddity(&right, &mc, n0, n1, &mc.target, &z).unwrap().unwrap();
        assert_eq!(o.path, vec![0, 1, 8, 9, 6, 4]);

        let left = with_edges(&right, &[(1, 6)]);
        let o = find_oddity(&left, &mc, n0, n1, &mc.target, &z).unwrap().unwrap();
        assert_eq!(o.path, vec![0, 1, 6, 4]);

        // roles swap when the best vertex lies in B2
        let o = find_oddity(&right, &mc, n1, n0, &mc.target, &z).unwrap().unwrap();
        assert_eq!(o.path, vec![0, 1, 8, 9, 6, 4]);

        // a single Z vertex seen by everyone: no z_2
        let single = set(&[8]);
        let d = set(&[8]);
        let b1 = set(&[1]);
        let b2 = set(&[5]);
        assert_eq!(find_oddity(&g, &mc, &b1, &b2, &d, &single).unwrap(), None);
        assert!(matches!(
            find_oddity(&g, &mc, &b1, &b2, &mc.target, &single),
            Err(StructureError::Input(_))
        ));
    }

    #[test]
    fn refinement_examples() {
        // N_1 = {b}: forced
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (1, 3)]).unwrap();
        let mc = Multicover {
            apexes: vec![0],
            families: vec![set(&[1])],
            target: set(&[2, 3]),
        };
        let tr = refine_multicover(&g, &mc, &RefinementBudget { thresholds: vec![0], tau: 1 }, &mut b()).unwrap();
        assert_eq!(tr.rounds.len(), 1);
        assert_eq!(tr.rounds[0].a, set(&[1]));
        assert_eq!(tr.rounds[0].c, mc.target);
        assert!(tr.rounds[0].d.is_empty());

        let err = refine_multicover(&g, &mc, &RefinementBudget { thresholds: vec![1], tau: 1 }, &mut b());
        assert_eq!(err, Err(StructureError::ThresholdUnreachable { round: 1, threshold: 1 }));
        let err = refine_multicover(&g, &mc, &RefinementBudget { thresholds: vec![], tau: 1 }, &mut b());
        assert_eq!(err, Err(StructureError::ThresholdCount { expected: 1, got: 0 }));
    }

    #[test]
    fn refinement_on_figure_one() {
        let (g, mc) = figure_one();
        let tr = refine_multicover(&g, &mc, &RefinementBudget { thresholds: vec![0, 0], tau: 1 }, &mut b()).unwrap();
        assert_eq!(tr.rounds.len(), 2);
        // greedy drops 1 then 2; vertex 3 sees only c2 = 10
        assert_eq!(tr.rounds[0].a, set(&[3]));
        assert_eq!(tr.rounds[0].c, set(&[10]));
        assert_eq!(tr.rounds[0].d, set(&[8, 9, 11]));
        assert_eq!(tr.rounds[1].a, set(&[7]));
        assert_eq!(tr.rounds[1].covers, Side::C);
        // direct scan of the final postcondition
        let last = &tr.rounds[1];
        for r in &tr.rounds {
            let nb = g.neighborhood_of_set(&r.a);
            assert!(last.c.iter().all(|v| nb.contains(v)));
            assert!(last.d.iter().all(|v| !nb.contains(v)));
        }
    }

    #[test]
    fn refinement_postconditions_on_random_multicovers() {
        for seed in 0..20 {
            let gd = multicover_gadget(3, 3, 6).unwrap();
            let extra = random_graph(6, 0.4, seed).unwrap();
            let c0 = 12;
            let mut gb = GraphBuilder::from(&gd.graph);
            for (u, v) in extra.edges() {
                gb.add_edge(c0 + u, c0 + v).unwrap();
            }
            let g = gb.build();
            match refine_multicover(&g, &gd.multicover, &RefinementBudget { thresholds: vec![1, 0, 0], tau: 3 }, &mut b()) {
                Ok(tr) => {
                    let last = tr.rounds.last().unwrap();
                    assert!(last.c.is_disjoint(&last.d));
                    for r in &tr.rounds {
                        let nb = g.neighborhood_of_set(&r.a);
                        let (cov, anti) = match r.covers {
                            Side::C => (&last.c, &last.d),
                            Side::D => (&last.d, &last.c),
                        };
                        assert!(cov.is_subset(&nb) && anti.is_disjoint(&nb));
                    }
                }
                Err(StructureError::ThresholdUnreachable { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn grading_examples() {
        // star with centre 0
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let gr = grading_from_cover(&star, &[0], &set(&[1, 2, 3])).unwrap();
        assert_eq!(gr.parts, vec![set(&[1, 2, 3])]);
        assert!(is_compatible(&star, &[0], &gr));
        assert_eq!(earliest_parent(&star, &[0], 2).unwrap(), 0);

        let c4 = cycle(4).unwrap();
        let gr = grading_from_cover(&c4, &[0, 2], &set(&[1, 3])).unwrap();
        assert_eq!(gr.parts, vec![set(&[1, 3]), VertexSet::new()]);
        assert_eq!(earliest_parent(&c4, &[0, 2], 3).unwrap(), 0);

        let p4 = path(4);
        let gr = grading_from_cover(&p4, &[1, 2], &set(&[0, 3])).unwrap();
        assert_eq!(gr.parts, vec![set(&[0]), set(&[3])]);
        assert_eq!(earliest_parent(&p4, &[1, 2], 3).unwrap(), 2);
        assert!(is_compatible(&p4, &[1, 2], &gr));
        let reversed = Grading {
            parts: vec![set(&[3]), set(&[0])],
            tau: None,
        };
        assert!(!is_compatible(&p4, &[1, 2], &reversed));

        assert!(earliest_parent(&p4, &[2], 0).is_err());
        assert!(grading_from_cover(&p4, &[2], &set(&[0, 3])).is_err());
        assert_eq!(verify_grading(&p4, &set(&[0, 3]), &gr, &mut b()).unwrap(), None);
        assert_eq!(
            verify_grading(&p4, &set(&[0, 1, 3]), &gr, &mut b()).unwrap(),
            Some(GradingViolation::Missing { vertex: 1 })
        );
        let colourful = Grading {
            parts: vec![set(&[0, 1])],
            tau: Some(1),
        };
        assert_eq!(
            verify_grading(&p4, &set(&[0, 1]), &colourful, &mut b()).unwrap(),
            Some(GradingViolation::TooColourful { part: 0, chi: 2 })
        );
    }

    #[test]
    fn square_edge_examples() {
        // b1=0, b2=1, u=2, v=3
        let g = Graph::from_edges(4, [(0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(square_edges(&g, &[0, 1], &set(&[2, 3])).unwrap(), vec![(2, 3)]);
        let g2 = with_edges(&g, &[(0, 3)]);
        assert!(square_edges(&g2, &[0, 1], &set(&[2, 3])).unwrap().is_empty());
        let g3 = Graph::from_edges(4, [(0, 2), (1, 3)]).unwrap();
        assert!(square_edges(&g3, &[0, 1], &set(&[2, 3])).unwrap().is_empty());
    }

    #[test]
    fn rho_ball_examples() {
        let p5 = path(5);
        assert_eq!(rho_ball_centre(&p5, &p5.vertices(), 2).unwrap(), Some(2));
        assert!(!is_rho_ball(&p5, &p5.vertices(), 1).unwrap());
        assert!(is_rho_ball(&p5, &VertexSet::new(), 0).unwrap());
        // distances are measured inside G[X]
        let c6 = cycle(6).unwrap();
        assert!(is_rho_ball(&c6, &set(&[0, 1, 5]), 1).unwrap());
        assert!(!is_rho_ball(&c6, &set(&[0, 2]), 5).unwrap());
    }

    fn c9_shower() -> (Graph, Shower) {
        let g = cycle(9).unwrap();
        let s = shower_from_bfs(&g, 0, 4, 4).unwrap().unwrap();
        (g, s)
    }

    #[test]
    fn c9_shower_layers() {
        let (g, s) = c9_shower();
        assert_eq!(
            s.layers,
            vec![set(&[0]), set(&[1, 8]), set(&[2, 7]), set(&[3, 6]), set(&[4, 5])]
        );
        let r = verify_shower(&g, &s);
        assert!(r.valid);
        assert_eq!(r.floor, set(&[4, 5]));

        let skip = with_edges(&g, &[(1, 3)]);
        assert_eq!(
            verify_shower(&skip, &s).violation,
            Some(ShowerViolation::LayerSkip { lower: 1, upper: 3, u: 1, v: 3 })
        );
        let split = Shower {
            layers: s.layers[..4].to_vec(),
            drain: 3,
        };
        assert_eq!(verify_shower(&g, &split).violation, Some(ShowerViolation::LastLayerDisconnected));
    }

    #[test]
    fn bfs_shower_edge_cases() {
        let k2 = complete(2).unwrap();
        let s = shower_from_bfs(&k2, 0, 1, 1).unwrap().unwrap();
        assert!(verify_shower(&k2, &s).valid);
        let jets = enumerate_jets(&k2, &s, 5, &mut b()).unwrap();
        assert_eq!(jets, vec![Jet { path: vec![0, 1] }]);

        let g = Graph::disjoint_union(&[&k2, &k2]);
        assert_eq!(shower_from_bfs(&g, 0, 1, 3).unwrap(), None);
        assert_eq!(shower_from_bfs(&cycle(9).unwrap(), 0, 3, 4).unwrap(), None);
    }

    #[test]
    fn bfs_showers_always_verify() {
        for seed in 0..30 {
            let g = random_graph(12, 0.25, seed).unwrap();
            let dist = g.distances_from(0).unwrap();
            for (v, d) in dist.iter().enumerate() {
                if let Some(d) = *d {
                    let s = shower_from_bfs(&g, 0, d, v).unwrap().expect("drain at its own distance");
                    assert!(verify_shower(&g, &s).valid);
                }
            }
        }
    }

    #[test]
    fn c9_jets() {
        let (g, s) = c9_shower();
        let jets = enumerate_jets(&g, &s, 10, &mut b()).unwrap();
        assert_eq!(jets.iter().map(Jet::len).collect::<BTreeSet<_>>(), BTreeSet::from([4, 5]));
        let sum = jet_summary(&g, &s, &jets, 2, 0, &mut b()).unwrap();
        assert_eq!(sum.residues, BTreeSet::from([0, 1]));
        assert_eq!(sum.completeness, 2);
        assert!(sum.peripheral_lengths.is_empty());
        assert_eq!(sum.peripheral_completeness, 0);
        assert_eq!(enumerate_jets(&g, &s, 4, &mut b()).unwrap().len(), 1);
        let (partial, err) = enumerate_jets(&g, &s, 10, &mut Budget::new(3)).unwrap_err();
        assert!(partial.len() <= 1);
        assert_eq!(err, StructureError::Budget { limit: 3 });
    }

    #[test]
    fn jets_are_induced_paths() {
        for seed in 0..20 {
            let g = random_graph(10, 0.3, seed).unwrap();
            let dist = g.distances_from(0).unwrap();
            let Some((v, d)) = dist.iter().enumerate().filter_map(|(v, d)| d.map(|d| (v, d))).max_by_key(|p| p.1) else {
                continue;
            };
            let s = shower_from_bfs(&g, 0, d, v).unwrap().unwrap();
            let inside = s.vertex_set();
            let jets = enumerate_jets(&g, &s, 12, &mut b()).unwrap();
            // oracle: every simple path found by plain DFS that is induced
            let mut want = BTreeSet::new();
            let mut stack = vec![vec![0usize]];
            while let Some(p) = stack.pop() {
                let end = *p.last().unwrap();
                if end == v {
                    if check_induced_path(&g, &p).is_ok() {
                        want.insert(p);
                    }
                    continue;
                }
                for &w in g.neighbor_list(end) {
                    if inside.contains(w) && !p.contains(&w) {
                        let mut q = p.clone();
                        q.push(w);
                        stack.push(q);
                    }
                }
            }
            let got: BTreeSet<Vec<usize>> = jets.into_iter().map(|j| j.path).collect();
            assert_eq!(got, want, "seed {seed}");
        }
    }

    #[test]
    fn completeness_runs() {
        let r = |v: &[usize]| v.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(completeness(&r(&[]), 5), 0);
        assert_eq!(completeness(&r(&[0, 1, 2, 3, 4]), 5), 5);
        assert_eq!(completeness(&r(&[4, 0, 2]), 5), 2);
        assert_eq!(completeness(&r(&[1, 2, 3]), 7), 3);
        assert_eq!(completeness(&r(&[0]), 1), 1);
    }

    #[test]
    fn peripheral_jets() {
        // C_9 shower with an extra floor triangle hanging off vertex 5
        let (g, _) = c9_shower();
        let mut gb = GraphBuilder::from(&g);
        let a = gb.add_vertex();
        let c = gb.add_vertex();
        for (u, v) in [(5, a), (5, c), (a, c)] {
            gb.add_edge(u, v).unwrap();
        }
        let g = gb.build();
        let s = Shower {
            layers: vec![set(&[0]), set(&[1, 8]), set(&[2, 7]), set(&[3, 6]), set(&[4, 5, a, c])],
            drain: 4,
        };
        assert!(verify_shower(&g, &s).valid);
        assert_eq!(s.floor(&g), set(&[4, 5]));
        let jets = enumerate_jets(&g, &s, 10, &mut b()).unwrap();
        let floor = s.floor(&g);
        for j in &jets {
            assert!(!jet_is_peripheral(&g, &floor, j, 0, &mut b()).unwrap());
        }
    }

    #[test]
    fn bloodline_examples() {
        let (g, s) = c9_shower();
        assert_eq!(drain_layers(&g, &s), vec![set(&[4]), set(&[5])]);
        assert_eq!(bloodline(&g, &s, 5).unwrap(), vec![5, 4]);
        assert_eq!(bloodline(&g, &s, 4).unwrap(), vec![4]);
        assert!(bloodline(&g, &s, 3).is_err());

        let p = path(6);
        let s = Shower {
            layers: vec![set(&[0]), set(&[1, 2, 3, 4, 5])],
            drain: 3,
        };
        assert!(verify_shower(&p, &s).valid);
        assert_eq!(bloodline(&p, &s, 5).unwrap(), vec![5, 4, 3]);
        assert_eq!(bloodline(&p, &s, 1).unwrap(), vec![1, 2, 3]);
    }

    fn c9_with_loop() -> (Graph, Shower) {
        let (g, s) = c9_shower();
        let mut gb = GraphBuilder::from(&g);
        let fresh: Vec<usize> = (0..4).map(|_| gb.add_vertex()).collect();
        let mut chain = vec![4];
        chain.extend(&fresh);
        chain.push(0);
        for w in chain.windows(2) {
            gb.add_edge(w[0], w[1]).unwrap();
        }
        (gb.build(), s)
    }

    #[test]
    fn recirculator_examples() {
        let (g, s) = c9_shower();
        assert_eq!(find_recirculator(&g, &s, 20).unwrap(), None);

        let (g, s) = c9_with_loop();
        let r = find_recirculator(&g, &s, 20).unwrap().unwrap();
        assert_eq!(r, vec![4, 9, 10, 11, 12, 0]);
        assert_eq!(find_recirculator(&g, &s, 4).unwrap(), None);

        // a shortcut touching L_2 is rejected and the long loop is kept
        let mut gb = GraphBuilder::from(&g);
        let w = gb.add_vertex();
        gb.add_edge(4, w).unwrap();
        gb.add_edge(w, 0).unwrap();
        gb.add_edge(w, 2).unwrap();
        let g2 = gb.build();
        assert_eq!(find_recirculator(&g2, &s, 20).unwrap().unwrap(), vec![4, 9, 10, 11, 12, 0]);
    }

    #[test]
    fn close_hole_examples() {
        let (g, s) = c9_with_loop();
        let r = find_recirculator(&g, &s, 20).unwrap().unwrap();
        let h = close_hole(&g, &[0, 1, 2, 3, 4], &r).unwrap();
        assert_eq!(h.len(), 9);
        let h = close_hole(&g, &[0, 8, 7, 6, 5, 4], &r).unwrap();
        assert_eq!(h.len(), 10);

        let chorded = with_edges(&g, &[(10, 2)]);
        assert_eq!(
            close_hole(&chorded, &[0, 1, 2, 3, 4], &r),
            Err(StructureError::Hole(HoleError::Invalid(HoleDefect::Chord(2, 10))))
        );
    }
}
