//! Holes (induced cycles of length at least four): enumeration, residues of
//! hole lengths, peripherality, anticomplete families and consecutive
//! lengths.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::budget::{Budget, Exhausted};
use crate::graph::{Graph, GraphError, VertexSet};
use crate::invariants::{chromatic_number_of, InvariantError};

/// Why a vertex sequence is not a hole.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HoleDefect {
    #[error("cycle has {0} vertices; holes need at least four")]
    TooShort(usize),
    #[error("vertex {0} repeated")]
    Repeated(usize),
    #[error("consecutive vertices {0} and {1} are not adjacent")]
    Missing(usize, usize),
    #[error("chord {0}-{1}")]
    Chord(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HoleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("not a hole: {0}")]
    Invalid(#[from] HoleDefect),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("search budget of {limit} nodes exhausted after {} holes", partial.len())]
    Budget { partial: Vec<Hole>, limit: u64 },
    #[error("modulus must be at least 1")]
    ZeroModulus,
}

impl HoleError {
    /// Whether the error only reports a spent budget.
    pub fn is_budget(&self) -> bool {
        match self {
            HoleError::Budget { .. } => true,
            HoleError::Invariant(e) => e.is_budget(),
            _ => false,
        }
    }
}

/// An induced cycle, stored in canonical form: it starts at its smallest
/// vertex and continues towards the smaller of that vertex's two cycle
/// neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Hole {
    vertices: Vec<usize>,
}

impl Hole {
    /// Validates `cycle` as a hole of `g` and canonicalises it.
    pub fn new(g: &Graph, cycle: Vec<usize>) -> Result<Hole, HoleError> {
        check_hole(g, &cycle)?;
        Ok(Hole {
            vertices: canonical_rotation(cycle),
        })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().copied().collect()
    }

    /// Number of edges, which equals the number of vertices.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn residue(&self, modulus: usize) -> usize {
        self.len() % modulus
    }

    /// Re-checks the hole against `g` by a direct adjacency scan.
    pub fn validate(&self, g: &Graph) -> Result<(), HoleError> {
        check_hole(g, &self.vertices)
    }
}

fn check_hole(g: &Graph, cycle: &[usize]) -> Result<(), HoleError> {
    let k = cycle.len();
    for &v in cycle {
        g.check_vertex(v)?;
    }
    if k < 4 {
        return Err(HoleDefect::TooShort(k).into());
    }
    let set: VertexSet = cycle.iter().copied().collect();
    if set.len() != k {
        let mut seen = VertexSet::new();
        let dup = cycle.iter().find(|&&v| !seen.insert(v)).unwrap();
        return Err(HoleDefect::Repeated(*dup).into());
    }
    for i in 0..k {
        let (u, v) = (cycle[i], cycle[(i + 1) % k]);
        if !g.has_edge(u, v) {
            return Err(HoleDefect::Missing(u, v).into());
        }
    }
    for i in 0..k {
        for j in i + 2..k {
            if i == 0 && j == k - 1 {
                continue;
            }
            if g.has_edge(cycle[i], cycle[j]) {
                let (a, b) = (cycle[i].min(cycle[j]), cycle[i].max(cycle[j]));
                return Err(HoleDefect::Chord(a, b).into());
            }
        }
    }
    Ok(())
}

fn canonical_rotation(mut cycle: Vec<usize>) -> Vec<usize> {
    let k = cycle.len();
    let start = (0..k).min_by_key(|&i| cycle[i]).unwrap();
    cycle.rotate_left(start);
    if k > 2 && cycle[k - 1] < cycle[1] {
        cycle[1..].reverse();
    }
    cycle
}

/// Streaming enumeration of holes with lengths in `[min_len, max_len]`.
///
/// Each hole is found from its smallest vertex (the anchor) by growing
/// induced paths through larger vertices only, and is emitted once, in
/// canonical form. Anchors are processed in increasing order. When an
/// upper length is given, partial paths that cannot be closed within the
/// window are cut early: the closing segment would be a non-backtracking
/// walk through admissible vertices, and the set of such walk lengths is
/// computed exactly.
///
/// Running out of budget yields one `Err` and then ends the stream.
pub fn enumerate_holes<'a>(
    g: &'a Graph,
    min_len: usize,
    max_len: Option<usize>,
    budget: &'a mut Budget,
) -> HoleEnumerator<'a> {
    HoleEnumerator::new(g, min_len, max_len, budget)
}

/// Collects [`enumerate_holes`] into a vector, turning budget exhaustion
/// into [`HoleError::Budget`] with the holes found so far.
pub fn collect_holes(
    g: &Graph,
    min_len: usize,
    max_len: Option<usize>,
    budget: &mut Budget,
) -> Result<Vec<Hole>, HoleError> {
    let mut out = Vec::new();
    for h in enumerate_holes(g, min_len, max_len, budget) {
        match h {
            Ok(h) => out.push(h),
            Err(Exhausted { limit }) => return Err(HoleError::Budget { partial: out, limit }),
        }
    }
    Ok(out)
}

pub struct HoleEnumerator<'a> {
    g: &'a Graph,
    min_len: usize,
    max_len: usize,
    prune: bool,
    budget: &'a mut Budget,
    next_anchor: usize,
    anchor: usize,
    anchor_nbrs: VertexSet,
    path: Vec<usize>,
    cursors: Vec<usize>,
    on_path: Vec<bool>,
    /// Number of interior path vertices adjacent to each vertex.
    blocked: Vec<u32>,
    walks: WalkScratch,
    finished: bool,
}

impl<'a> HoleEnumerator<'a> {
    fn new(g: &'a Graph, min_len: usize, max_len: Option<usize>, budget: &'a mut Budget) -> Self {
        let n = g.n();
        let max = max_len.unwrap_or(usize::MAX).min(n);
        HoleEnumerator {
            g,
            min_len: min_len.max(4),
            max_len: max,
            prune: max_len.is_some(),
            budget,
            next_anchor: 0,
            anchor: 0,
            anchor_nbrs: VertexSet::new(),
            path: Vec::new(),
            cursors: Vec::new(),
            on_path: vec![false; n],
            blocked: vec![0; n],
            walks: WalkScratch::new(n),
            finished: false,
        }
    }

    fn push(&mut self, w: usize) {
        let k = self.path.len() - 1;
        if k >= 1 {
            let end = self.path[k];
            for &x in self.g.neighbor_list(end) {
                self.blocked[x] += 1;
            }
        }
        self.path.push(w);
        self.cursors.push(0);
        self.on_path[w] = true;
    }

    fn pop(&mut self) {
        let w = self.path.pop().unwrap();
        self.cursors.pop();
        self.on_path[w] = false;
        let k = self.path.len();
        if k >= 2 {
            let end = self.path[k - 1];
            for &x in self.g.neighbor_list(end) {
                self.blocked[x] -= 1;
            }
        }
    }

    fn admissible(&self, v: usize) -> bool {
        v > self.anchor && !self.on_path[v] && self.blocked[v] == 0
    }

    /// Whether some non-backtracking walk from the current endpoint through
    /// admissible vertices reaches a neighbour of the anchor with a length
    /// that lands the cycle inside the window.
    fn closable(&mut self) -> bool {
        let k = self.path.len() - 1;
        let end = self.path[k];
        // cycle length = (k + 1) + steps
        let lo = self.min_len.saturating_sub(k + 1).max(1);
        let hi = match self.max_len.checked_sub(k + 1) {
            Some(h) if h >= lo => h,
            _ => return false,
        };
        let g = self.g;
        let ws = &mut self.walks;
        ws.clear();
        for &w in g.neighbor_list(end) {
            if w > self.anchor && !self.on_path[w] && self.blocked[w] == 0 {
                ws.reach(w, end);
            }
        }
        for step in 1..=hi {
            if ws.frontier.is_empty() {
                return false;
            }
            if step >= lo && ws.frontier.iter().any(|&v| self.anchor_nbrs.contains(v)) {
                return true;
            }
            if step == hi {
                break;
            }
            ws.advance();
            for i in 0..ws.prev_frontier.len() {
                let v = ws.prev_frontier[i];
                if self.anchor_nbrs.contains(v) {
                    continue;
                }
                let (cnt, pred) = (ws.prev_cnt[v], ws.prev_pred[v]);
                for &w in g.neighbor_list(v) {
                    if (cnt >= 2 || pred != w) && w > self.anchor && !self.on_path[w] && self.blocked[w] == 0 {
                        ws.reach(w, v);
                    }
                }
            }
        }
        false
    }
}

/// Frontier bookkeeping for the non-backtracking walk test: for every
/// vertex reached at the current step, how many distinct predecessors it
/// was reached from (capped at 2) and one of them.
struct WalkScratch {
    cnt: Vec<u8>,
    pred: Vec<usize>,
    frontier: Vec<usize>,
    prev_cnt: Vec<u8>,
    prev_pred: Vec<usize>,
    prev_frontier: Vec<usize>,
}

impl WalkScratch {
    fn new(n: usize) -> Self {
        WalkScratch {
            cnt: vec![0; n],
            pred: vec![usize::MAX; n],
            frontier: Vec::new(),
            prev_cnt: vec![0; n],
            prev_pred: vec![usize::MAX; n],
            prev_frontier: Vec::new(),
        }
    }

    fn clear(&mut self) {
        for &v in &self.frontier {
            self.cnt[v] = 0;
        }
        for &v in &self.prev_frontier {
            self.prev_cnt[v] = 0;
        }
        self.frontier.clear();
        self.prev_frontier.clear();
    }

    fn reach(&mut self, w: usize, from: usize) {
        match self.cnt[w] {
            0 => {
                self.cnt[w] = 1;
                self.pred[w] = from;
                self.frontier.push(w);
            }
            1 if self.pred[w] != from => self.cnt[w] = 2,
            _ => {}
        }
    }

    /// Moves the current frontier into `prev_*` and empties the current one.
    fn advance(&mut self) {
        for &v in &self.prev_frontier {
            self.prev_cnt[v] = 0;
        }
        std::mem::swap(&mut self.cnt, &mut self.prev_cnt);
        std::mem::swap(&mut self.pred, &mut self.prev_pred);
        std::mem::swap(&mut self.frontier, &mut self.prev_frontier);
        self.frontier.clear();
    }
}

impl Iterator for HoleEnumerator<'_> {
    type Item = Result<Hole, Exhausted>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        let g = self.g;
        loop {
            if self.path.is_empty() {
                if self.next_anchor >= g.n() || self.min_len > self.max_len {
                    self.finished = true;
                    return None;
                }
                self.anchor = self.next_anchor;
                self.next_anchor += 1;
                self.anchor_nbrs = g.neighbors(self.anchor).clone();
                self.path.push(self.anchor);
                self.cursors.push(0);
                self.on_path[self.anchor] = true;
            }
            let k = self.path.len() - 1;
            let end = self.path[k];
            let nbrs = g.neighbor_list(end);
            let Some(&w) = nbrs.get(self.cursors[k]) else {
                if k == 0 {
                    self.on_path[end] = false;
                    self.path.clear();
                    self.cursors.clear();
                } else {
                    self.pop();
                }
                continue;
            };
            self.cursors[k] += 1;
            if !self.admissible(w) {
                continue;
            }
            if k >= 1 && self.anchor_nbrs.contains(w) {
                let len = k + 2;
                if k >= 2 && self.path[1] < w && len >= self.min_len && len <= self.max_len {
                    let mut vertices = self.path.clone();
                    vertices.push(w);
                    return Some(Ok(Hole { vertices }));
                }
                continue;
            }
            if k + 3 > self.max_len {
                continue;
            }
            if let Err(e) = self.budget.tick() {
                self.finished = true;
                return Some(Err(e));
            }
            self.push(w);
            if self.prune && self.path.len() >= 2 && !self.closable() {
                self.pop();
            }
        }
    }
}

/// Residues modulo `modulus` realised by hole lengths, each with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueCoverage {
    pub modulus: usize,
    pub covered: BTreeSet<usize>,
    pub witnesses: BTreeMap<usize, Hole>,
}

impl ResidueCoverage {
    pub fn is_complete(&self) -> bool {
        self.covered.len() == self.modulus
    }

    pub fn missing(&self) -> Vec<usize> {
        (0..self.modulus).filter(|r| !self.covered.contains(r)).collect()
    }
}

/// Residues of hole lengths modulo `ell`; with `d`, only `d`-peripheral
/// holes count. The witness for a residue is the first qualifying hole in
/// enumeration order.
pub fn residue_coverage(
    g: &Graph,
    ell: usize,
    d: Option<usize>,
    budget: &mut Budget,
) -> Result<ResidueCoverage, HoleError> {
    if ell == 0 {
        return Err(HoleError::ZeroModulus);
    }
    if let Some(d) = d {
        return peripheral_coverage(g, ell, d, budget);
    }
    let mut witnesses = BTreeMap::new();
    for h in enumerate_holes(g, 4, None, budget) {
        match h {
            Ok(h) => {
                witnesses.entry(h.residue(ell)).or_insert(h);
                if witnesses.len() == ell {
                    break;
                }
            }
            Err(Exhausted { limit }) => {
                return Err(HoleError::Budget {
                    partial: witnesses.into_values().collect(),
                    limit,
                })
            }
        }
    }
    Ok(ResidueCoverage {
        modulus: ell,
        covered: witnesses.keys().copied().collect(),
        witnesses,
    })
}

fn peripheral_coverage(g: &Graph, ell: usize, d: usize, budget: &mut Budget) -> Result<ResidueCoverage, HoleError> {
    let all = collect_holes(g, 4, None, budget)?;
    let mut witnesses = BTreeMap::new();
    for h in all {
        let r = h.residue(ell);
        if witnesses.contains_key(&r) {
            continue;
        }
        if is_d_peripheral(g, &h, d, budget)?.peripheral {
            witnesses.insert(r, h);
            if witnesses.len() == ell {
                break;
            }
        }
    }
    Ok(ResidueCoverage {
        modulus: ell,
        covered: witnesses.keys().copied().collect(),
        witnesses,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Peripherality {
    pub peripheral: bool,
    /// Vertices neither on the hole nor adjacent to it.
    pub exterior: VertexSet,
    pub exterior_chi: usize,
}

/// Whether `χ(G[X]) > d` for the exterior `X = V(G) ∖ N[V(H)]`. Since χ is
/// monotone under subsets, this maximal exterior decides the question.
pub fn is_d_peripheral(g: &Graph, hole: &Hole, d: usize, budget: &mut Budget) -> Result<Peripherality, HoleError> {
    hole.validate(g)?;
    let exterior = g.vertices().difference(&g.closed_neighborhood_of_set(&hole.vertex_set()));
    let exterior_chi = chromatic_number_of(g, &exterior, budget)?;
    Ok(Peripherality {
        peripheral: exterior_chi > d,
        exterior,
        exterior_chi,
    })
}

/// Pairwise anticomplete holes `H_1..H_n` with `|H_i| ≡ p_i (mod q_i)`.
///
/// `Ok(None)` means the exhaustive search found no such family; running out
/// of budget is an error instead.
pub fn anticomplete_hole_family(
    g: &Graph,
    specs: &[(usize, usize)],
    budget: &mut Budget,
) -> Result<Option<Vec<Hole>>, HoleError> {
    if specs.iter().any(|&(_, q)| q == 0) {
        return Err(HoleError::ZeroModulus);
    }
    if specs.is_empty() {
        return Ok(Some(Vec::new()));
    }
    let mut holes = collect_holes(g, 4, None, budget)?;
    holes.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let sets: Vec<VertexSet> = holes.iter().map(Hole::vertex_set).collect();
    let candidates: Vec<Vec<usize>> = specs
        .iter()
        .map(|&(p, q)| {
            (0..holes.len())
                .filter(|&i| holes[i].len() % q == p % q)
                .collect()
        })
        .collect();
    let mut chosen = Vec::with_capacity(specs.len());
    let limit = budget.limit();
    match family_search(g, &sets, &candidates, &mut chosen, budget) {
        Ok(true) => Ok(Some(chosen.into_iter().map(|i| holes[i].clone()).collect())),
        Ok(false) => Ok(None),
        Err(_) => Err(HoleError::Budget { partial: vec![], limit }),
    }
}

fn family_search(
    g: &Graph,
    sets: &[VertexSet],
    candidates: &[Vec<usize>],
    chosen: &mut Vec<usize>,
    budget: &mut Budget,
) -> Result<bool, Exhausted> {
    let depth = chosen.len();
    if depth == candidates.len() {
        return Ok(true);
    }
    for &i in &candidates[depth] {
        budget.tick()?;
        if chosen.iter().all(|&j| g.is_anticomplete(&sets[i], &sets[j])) {
            chosen.push(i);
            if family_search(g, sets, candidates, chosen, budget)? {
                return Ok(true);
            }
            chosen.pop();
        }
    }
    Ok(false)
}

/// Holes of two consecutive lengths `t`, `t + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsecutivePair {
    pub length: usize,
    pub shorter: Hole,
    pub longer: Hole,
}

/// Every `t > ell` such that `G` has holes of lengths `t` and `t + 1`.
pub fn consecutive_hole_pairs(g: &Graph, ell: usize, budget: &mut Budget) -> Result<Vec<ConsecutivePair>, HoleError> {
    let mut by_len: BTreeMap<usize, Hole> = BTreeMap::new();
    for h in collect_holes(g, ell + 1, None, budget)? {
        by_len.entry(h.len()).or_insert(h);
    }
    Ok(by_len
        .iter()
        .filter_map(|(&t, h)| {
            by_len.get(&(t + 1)).map(|h2| ConsecutivePair {
                length: t,
                shorter: h.clone(),
                longer: h2.clone(),
            })
        })
        .collect())
}

/// Whether `G` has an induced cycle (triangle or hole) whose length is a
/// multiple of three.
pub fn has_induced_cycle_divisible_by_three(g: &Graph, budget: &mut Budget) -> Result<bool, HoleError> {
    let has_triangle = g
        .edges()
        .any(|(u, v)| !g.neighbors(u).is_disjoint(g.neighbors(v)));
    if has_triangle {
        return Ok(true);
    }
    for h in enumerate_holes(g, 6, None, budget) {
        match h {
            Ok(h) if h.len() % 3 == 0 => return Ok(true),
            Ok(_) => {}
            Err(Exhausted { limit }) => return Err(HoleError::Budget { partial: vec![], limit }),
        }
    }
    Ok(false)
}
