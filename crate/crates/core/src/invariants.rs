//! Exact clique number, chromatic number and the local chromatic number
//! `χ^ρ` (maximum chromatic number of a closed radius-ρ ball).
//!
//! All searches draw from a [`Budget`]; running out is reported as an error
//! carrying the best bounds known at that point, never as an approximation.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::budget::Budget;
use crate::graph::{Graph, GraphError, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("clique search budget exhausted; best clique found has {best} vertices")]
    CliqueBudget { best: usize },
    #[error("colouring search budget exhausted; chromatic number lies in [{lower}, {upper}]")]
    ChromaticBudget { lower: usize, upper: usize },
    #[error("radius must be at least 1")]
    ZeroRadius,
}

impl InvariantError {
    /// Whether the error only reports a spent budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, InvariantError::CliqueBudget { .. } | InvariantError::ChromaticBudget { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clique {
    pub size: usize,
    pub witness: VertexSet,
}

/// An optimal colouring: `colors[v] < chi` for every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub chi: usize,
    pub colors: Vec<usize>,
}

impl Coloring {
    pub fn is_proper(&self, g: &Graph) -> bool {
        self.colors.len() == g.n()
            && self.colors.iter().all(|&c| c < self.chi)
            && g.edges().all(|(u, v)| self.colors[u] != self.colors[v])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub omega: usize,
    pub chi: usize,
    pub chi_rho: BTreeMap<usize, usize>,
    pub coloring: Vec<usize>,
    pub max_clique: VertexSet,
}

/// Maximum clique by branch and bound with a greedy-colouring bound.
pub fn clique_number(g: &Graph, budget: &mut Budget) -> Result<Clique, InvariantError> {
    clique_within(g, &g.vertices(), budget)
}

/// Maximum clique of `G[s]`, reported in host indices.
pub fn clique_within(g: &Graph, s: &VertexSet, budget: &mut Budget) -> Result<Clique, InvariantError> {
    g.check_set(s)?;
    let mut search = CliqueSearch {
        g,
        best: Vec::new(),
        current: Vec::new(),
        budget,
    };
    match search.expand(s.clone()) {
        Ok(()) => {
            let witness: VertexSet = search.best.iter().copied().collect();
            Ok(Clique {
                size: witness.len(),
                witness,
            })
        }
        Err(()) => Err(InvariantError::CliqueBudget {
            best: search.best.len(),
        }),
    }
}

struct CliqueSearch<'a> {
    g: &'a Graph,
    best: Vec<usize>,
    current: Vec<usize>,
    budget: &'a mut Budget,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, mut cand: VertexSet) -> Result<(), ()> {
        self.budget.tick().map_err(|_| ())?;
        if cand.is_empty() {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            return Ok(());
        }
        // Greedy colour classes give an upper bound on any clique in `cand`.
        let order = self.colour_order(&cand);
        for &(v, colour) in order.iter().rev() {
            if self.current.len() + colour <= self.best.len() {
                return Ok(());
            }
            self.current.push(v);
            let next = cand.intersection(self.g.neighbors(v));
            self.expand(next)?;
            self.current.pop();
            cand.remove(v);
        }
        Ok(())
    }

    /// Vertices of `cand` with 1-based greedy colour numbers, sorted by colour.
    fn colour_order(&self, cand: &VertexSet) -> Vec<(usize, usize)> {
        let mut uncoloured = cand.clone();
        let mut out = Vec::with_capacity(cand.len());
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut avail = uncoloured.clone();
            while let Some(v) = avail.first() {
                out.push((v, colour));
                uncoloured.remove(v);
                avail.remove(v);
                avail = avail.difference(self.g.neighbors(v));
            }
        }
        out
    }
}

/// Exact chromatic number with an optimal colouring witness.
///
/// Tries `k = ω, ω+1, …` below a DSATUR upper bound, each attempt a
/// saturation-ordered backtracking search with the maximum clique
/// pre-coloured.
pub fn chromatic_number(g: &Graph, budget: &mut Budget) -> Result<Coloring, InvariantError> {
    let n = g.n();
    if n == 0 {
        return Ok(Coloring { chi: 0, colors: vec![] });
    }
    let upper_colors = dsatur_greedy(g);
    let upper = upper_colors.iter().max().map_or(0, |c| c + 1);
    let clique = match clique_number(g, budget) {
        Ok(c) => c,
        Err(InvariantError::CliqueBudget { best }) => {
            return Err(InvariantError::ChromaticBudget { lower: best, upper })
        }
        Err(e) => return Err(e),
    };
    let lower = clique.size;
    for k in lower..upper {
        let mut search = KColoring::new(g, k, &clique.witness);
        match search.run(budget) {
            Ok(true) => {
                return Ok(Coloring {
                    chi: k,
                    colors: search.colors.into_iter().map(|c| c.unwrap()).collect(),
                })
            }
            Ok(false) => {}
            Err(()) => return Err(InvariantError::ChromaticBudget { lower: k, upper }),
        }
    }
    Ok(Coloring {
        chi: upper,
        colors: upper_colors,
    })
}

/// χ(G[s]).
pub fn chromatic_number_of(g: &Graph, s: &VertexSet, budget: &mut Budget) -> Result<usize, InvariantError> {
    if s.is_empty() {
        return Ok(0);
    }
    if g.is_stable(s) {
        return Ok(1);
    }
    let sub = g.induced_subgraph(s)?;
    Ok(chromatic_number(&sub.graph, budget)?.chi)
}

fn dsatur_greedy(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    let mut seen: Vec<VertexSet> = vec![VertexSet::new(); n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colors[v].is_none())
            .max_by_key(|&v| (seen[v].len(), g.degree(v), std::cmp::Reverse(v)))
            .unwrap();
        let c = (0..).find(|&c| !seen[v].contains(c)).unwrap();
        colors[v] = Some(c);
        for &w in g.neighbor_list(v) {
            seen[w].insert(c);
        }
    }
    colors.into_iter().map(Option::unwrap).collect()
}

struct KColoring<'a> {
    g: &'a Graph,
    k: usize,
    colors: Vec<Option<usize>>,
    /// `conflicts[v * k + c]`: coloured neighbours of `v` using colour `c`.
    conflicts: Vec<u32>,
    saturation: Vec<usize>,
    used: usize,
}

impl<'a> KColoring<'a> {
    fn new(g: &'a Graph, k: usize, clique: &VertexSet) -> Self {
        let mut s = KColoring {
            g,
            k,
            colors: vec![None; g.n()],
            conflicts: vec![0; g.n() * k],
            saturation: vec![0; g.n()],
            used: 0,
        };
        for (c, v) in clique.iter().enumerate() {
            s.assign(v, c);
        }
        s.used = clique.len();
        s
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.colors[v] = Some(c);
        for &w in self.g.neighbor_list(v) {
            let slot = &mut self.conflicts[w * self.k + c];
            if *slot == 0 {
                self.saturation[w] += 1;
            }
            *slot += 1;
        }
    }

    fn unassign(&mut self, v: usize, c: usize) {
        self.colors[v] = None;
        for &w in self.g.neighbor_list(v) {
            let slot = &mut self.conflicts[w * self.k + c];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[w] -= 1;
            }
        }
    }

    fn run(&mut self, budget: &mut Budget) -> Result<bool, ()> {
        budget.tick().map_err(|_| ())?;
        // most saturated, then highest degree, then lowest index
        let Some(v) = (0..self.g.n())
            .filter(|&v| self.colors[v].is_none())
            .max_by_key(|&v| (self.saturation[v], self.g.degree(v), std::cmp::Reverse(v)))
        else {
            return Ok(true);
        };
        if self.saturation[v] >= self.k {
            return Ok(false);
        }
        let prev_used = self.used;
        let limit = (self.used + 1).min(self.k);
        for c in 0..limit {
            if self.conflicts[v * self.k + c] != 0 {
                continue;
            }
            self.assign(v, c);
            self.used = prev_used.max(c + 1);
            if self.run(budget)? {
                return Ok(true);
            }
            self.unassign(v, c);
            self.used = prev_used;
        }
        Ok(false)
    }
}

/// `χ^ρ(G)`: the largest chromatic number of a closed ρ-ball; 0 for the
/// null graph.
pub fn chi_rho(g: &Graph, rho: usize, budget: &mut Budget) -> Result<usize, InvariantError> {
    if rho == 0 {
        return Err(InvariantError::ZeroRadius);
    }
    let mut seen: HashMap<VertexSet, usize> = HashMap::new();
    let mut best = 0;
    for v in 0..g.n() {
        let ball = g.ball(v, rho, true)?;
        if let Some(&c) = seen.get(&ball) {
            best = best.max(c);
            continue;
        }
        let c = chromatic_number_of(g, &ball, budget)?;
        seen.insert(ball, c);
        best = best.max(c);
    }
    Ok(best)
}

pub fn invariant_report(g: &Graph, radii: &[usize], budget: &mut Budget) -> Result<InvariantReport, InvariantError> {
    let clique = clique_number(g, budget)?;
    let coloring = chromatic_number(g, budget)?;
    let mut chi_rho_map = BTreeMap::new();
    for &rho in radii {
        chi_rho_map.insert(rho, chi_rho(g, rho, budget)?);
    }
    Ok(InvariantReport {
        omega: clique.size,
        chi: coloring.chi,
        chi_rho: chi_rho_map,
        coloring: coloring.colors,
        max_clique: clique.witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{complete, cycle, mycielski_iterate, petersen};

    fn chi(g: &Graph) -> usize {
        let c = chromatic_number(g, &mut Budget::default()).unwrap();
        assert!(c.is_proper(g));
        c.chi
    }

    fn omega(g: &Graph) -> usize {
        let c = clique_number(g, &mut Budget::default()).unwrap();
        assert!(g.is_clique(&c.witness));
        c.size
    }

    #[test]
    fn clique_examples() {
        assert_eq!(omega(&complete(5).unwrap()), 5);
        assert_eq!(omega(&cycle(7).unwrap()), 2);
        assert_eq!(omega(&petersen()), 2);
        assert_eq!(omega(&Graph::empty(0)), 0);
        assert_eq!(omega(&Graph::empty(3)), 1);
    }

    #[test]
    fn petersen_is_triangle_free_by_exhaustion() {
        let p = petersen();
        for a in 0..10 {
            for b in a + 1..10 {
                for c in b + 1..10 {
                    assert!(!(p.has_edge(a, b) && p.has_edge(b, c) && p.has_edge(a, c)));
                }
            }
        }
    }

    #[test]
    fn chromatic_examples() {
        assert_eq!(chi(&Graph::empty(0)), 0);
        assert_eq!(chi(&Graph::empty(4)), 1);
        assert_eq!(chi(&cycle(5).unwrap()), 3);
        assert_eq!(chi(&cycle(6).unwrap()), 2);
        assert_eq!(chi(&petersen()), 3);
        assert_eq!(chi(&mycielski_iterate(2).unwrap()), 4);
        assert_eq!(chi(&mycielski_iterate(3).unwrap()), 5);
    }

    #[test]
    fn budget_errors_bracket_the_answer() {
        let g = mycielski_iterate(3).unwrap();
        match chromatic_number(&g, &mut Budget::new(50)) {
            Err(InvariantError::ChromaticBudget { lower, upper }) => {
                assert!(lower <= 5 && 5 <= upper);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        assert!(matches!(
            clique_number(&complete(30).unwrap(), &mut Budget::new(3)),
            Err(InvariantError::CliqueBudget { .. })
        ));
    }

    #[test]
    fn chi_rho_examples() {
        let mut b = Budget::default();
        assert_eq!(chi_rho(&Graph::empty(0), 1, &mut b).unwrap(), 0);
        let c5 = cycle(5).unwrap();
        assert_eq!(chi_rho(&c5, 1, &mut b).unwrap(), 2);
        assert_eq!(chi_rho(&c5, 2, &mut b).unwrap(), 3);
        assert_eq!(chi_rho(&c5, 0, &mut b), Err(InvariantError::ZeroRadius));
    }

    #[test]
    fn report_is_consistent() {
        let g = mycielski_iterate(2).unwrap();
        let r = invariant_report(&g, &[1, 2, 3], &mut Budget::default()).unwrap();
        assert_eq!((r.omega, r.chi), (2, 4));
        assert!(r.chi_rho[&1] <= r.chi_rho[&2] && r.chi_rho[&2] <= r.chi_rho[&3]);
        assert!(r.chi_rho[&3] <= r.chi);
    }
}
