//! Graph constructors: the subdivided-bipartite hole gadget, canonical
//! multicover and crest gadgets, and the standard families used as test
//! substrates.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder, VertexSet};
use crate::structures::{Crest, Multicover};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("invalid parameters for {kind}: {reason}")]
    Parameters { kind: &'static str, reason: String },
    #[error("unknown gadget kind `{0}`")]
    UnknownKind(String),
    #[error("cannot parse gadget recipe `{0}`")]
    Recipe(String),
}

fn bad(kind: &'static str, reason: impl Into<String>) -> GadgetError {
    GadgetError::Parameters {
        kind,
        reason: reason.into(),
    }
}

pub fn cycle(n: usize) -> Result<Graph, GadgetError> {
    if n < 3 {
        return Err(bad("cycle", format!("need at least 3 vertices, got {n}")));
    }
    Ok(Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("in range"))
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("in range")
}

pub fn complete(n: usize) -> Result<Graph, GadgetError> {
    Ok(Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("in range"))
}

/// `K_{a,b}` with the `a` side on `0..a`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    Graph::from_edges(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)))).expect("in range")
}

/// Petersen graph: outer cycle `0..5`, spokes `i – i+5`, inner pentagram on `5..10`.
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(10, edges).expect("in range")
}

/// Mycielskian: vertices `v_i` (0..n), shadows `u_i` (n..2n) adjacent to
/// `N(v_i)`, and an apex `2n` adjacent to every shadow.
pub fn mycielski(g: &Graph) -> Graph {
    let n = g.n();
    let mut b = GraphBuilder::new(2 * n + 1);
    for (u, v) in g.edges() {
        b.add_edge(u, v).unwrap();
        b.add_edge(n + u, v).unwrap();
        b.add_edge(u, n + v).unwrap();
    }
    for i in 0..n {
        b.add_edge(n + i, 2 * n).unwrap();
    }
    b.build()
}

/// The Mycielski construction applied `t` times to `K_2`.
pub fn mycielski_iterate(t: usize) -> Result<Graph, GadgetError> {
    let mut g = complete(2)?;
    for _ in 0..t {
        g = mycielski(&g);
    }
    Ok(g)
}

/// Kneser graph `K(n, k)`: `k`-subsets of `0..n` in lexicographic order,
/// adjacent when disjoint.
pub fn kneser(n: usize, k: usize) -> Result<Graph, GadgetError> {
    if k == 0 || k > n {
        return Err(bad("kneser", format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let mut subsets: Vec<u64> = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        subsets.push(combo.iter().fold(0u64, |m, &i| m | 1 << i));
        let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
            break;
        };
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
    if n > 64 {
        return Err(bad("kneser", "ground set larger than 64"));
    }
    let m = subsets.len();
    let mut b = GraphBuilder::new(m);
    for i in 0..m {
        for j in i + 1..m {
            if subsets[i] & subsets[j] == 0 {
                b.add_edge(i, j).unwrap();
            }
        }
    }
    Ok(b.build())
}

/// Erdős–Rényi `G(n, p)`.
///
/// Generator: `ChaCha8Rng::seed_from_u64(seed)`; pairs `(u, v)`, `u < v`,
/// are visited with `u` ascending then `v` ascending, and each is an edge
/// when a fresh `f64` draw is below `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Result<Graph, GadgetError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(bad("random", format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                b.add_edge(u, v).unwrap();
            }
        }
    }
    Ok(b.build())
}

/// The graph obtained from `K_{ℓ,ℓ}` with bipartition `(A, B)` by joining
/// the pairs `{a_0,a_1}`, `{a_2,a_3}`, `{a_4,a_5}` and then subdividing
/// every `A–B` edge once and the three `A–A` edges `s_1`, `s_2`, `s_3` times.
///
/// Every edge has an endpoint of degree 2, so every cycle is a hole. The
/// vertex numbering is described by [`FindholeLayout`]: one `ℓ`-hole is
/// numbered `0..ℓ` in cyclic order and everything else follows.
pub fn findhole_gadget(ell: usize, subdivisions: [usize; 3]) -> Result<Graph, GadgetError> {
    let layout = FindholeLayout::new(ell, subdivisions)?;
    let mut b = GraphBuilder::new(layout.vertex_count());
    for i in 0..ell {
        b.set_label(layout.a(i), format!("a{i}"));
        b.set_label(layout.b(i), format!("b{i}"));
        for j in 0..ell {
            let s = layout.sub(i, j);
            b.set_label(s, format!("s{i}_{j}"));
            b.add_edge(layout.a(i), s).unwrap();
            b.add_edge(s, layout.b(j)).unwrap();
        }
    }
    for (p, chain) in layout.chains().iter().enumerate() {
        let mut prev = layout.a(2 * p);
        for (k, &v) in chain.iter().enumerate() {
            b.set_label(v, format!("p{p}_{k}"));
            b.add_edge(prev, v).unwrap();
            prev = v;
        }
        b.add_edge(prev, layout.a(2 * p + 1)).unwrap();
    }
    Ok(b.build())
}

/// Vertex numbering of [`findhole_gadget`].
///
/// A hole of length `ℓ` is built from the chosen `A–A` paths (the first
/// subset in mask order whose lengths fit `ℓ` modulo 4), each followed by
/// an excursion `a–s–b–s–a` through `b_0, b_1, ...`, with further unused
/// `a_i` (ascending) filling out the remaining excursions. That hole gets
/// the numbers `0..ℓ`, starting at its first `A` vertex. The rest follow:
/// remaining `a_i`, then `b_j`, then interiors of unused `A–A` paths, then
/// `A–B` subdivision vertices by `i` then `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FindholeLayout {
    pub ell: usize,
    pub subdivisions: [usize; 3],
    /// Mask of the `A–A` paths used by the numbered hole.
    pub used_chains: u8,
    a: Vec<usize>,
    b: Vec<usize>,
    sub: Vec<usize>,
    chains: [Vec<usize>; 3],
}

impl FindholeLayout {
    pub fn new(ell: usize, subdivisions: [usize; 3]) -> Result<Self, GadgetError> {
        if ell < 24 {
            return Err(bad("findhole", format!("need ell >= 24, got {ell}")));
        }
        if let Some(s) = subdivisions.iter().find(|&&s| s != 2 && s != 4) {
            return Err(bad("findhole", format!("subdivision counts must be 2 or 4, got {s}")));
        }
        let (used_chains, m) = (0u8..8)
            .find_map(|mask| {
                let picked: Vec<usize> = (0..3).filter(|p| mask >> p & 1 == 1).collect();
                let chain_len: usize = picked.iter().map(|&p| subdivisions[p] + 1).sum();
                let rest = ell.checked_sub(chain_len)?;
                let m = rest / 4;
                (rest % 4 == 0 && m >= picked.len().max(1)).then_some((mask, m))
            })
            .ok_or_else(|| bad("findhole", format!("no hole of length {ell} fits")))?;

        const UNSET: usize = usize::MAX;
        let mut a = vec![UNSET; ell];
        let mut b = vec![UNSET; ell];
        let mut sub = vec![UNSET; ell * ell];
        let mut chains: [Vec<usize>; 3] = subdivisions.map(|s| vec![UNSET; s]);
        let mut next = 0;
        let mut take = |slot: &mut usize| {
            *slot = next;
            next += 1;
        };

        let in_pair = |i: usize| i < 6 && used_chains >> (i / 2) & 1 == 1;
        let mut spare = (0..ell).filter(|&i| !in_pair(i));
        // A vertices of the hole, each tagged with whether a chain leaves it
        let mut route: Vec<(usize, bool)> = Vec::new();
        for p in (0..3).filter(|p| used_chains >> p & 1 == 1) {
            route.push((2 * p, true));
            route.push((2 * p + 1, false));
        }
        while route.len() < m + used_chains.count_ones() as usize {
            route.push((spare.next().unwrap(), false));
        }
        let mut excursion = 0;
        for (k, &(i, chained)) in route.iter().enumerate() {
            take(&mut a[i]);
            if chained {
                for slot in chains[i / 2].iter_mut() {
                    take(slot);
                }
            } else {
                let i2 = route[(k + 1) % route.len()].0;
                let j = excursion;
                excursion += 1;
                take(&mut sub[i * ell + j]);
                take(&mut b[j]);
                take(&mut sub[i2 * ell + j]);
            }
        }

        for slot in a.iter_mut().chain(b.iter_mut()).chain(chains.iter_mut().flatten()).chain(sub.iter_mut()) {
            if *slot == UNSET {
                take(slot);
            }
        }
        Ok(FindholeLayout {
            ell,
            subdivisions,
            used_chains,
            a,
            b,
            sub,
            chains,
        })
    }

    fn chain_total(&self) -> usize {
        self.subdivisions.iter().sum()
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.ell + self.ell * self.ell + self.chain_total()
    }

    pub fn edge_count(&self) -> usize {
        2 * self.ell * self.ell + self.chain_total() + 3
    }

    pub fn a(&self, i: usize) -> usize {
        self.a[i]
    }

    pub fn b(&self, j: usize) -> usize {
        self.b[j]
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        self.sub[i * self.ell + j]
    }

    /// Interior vertices of the three subdivided `A–A` edges, each listed
    /// from the `a_{2p}` end.
    pub fn chains(&self) -> &[Vec<usize>; 3] {
        &self.chains
    }

    /// The numbered `ℓ`-hole in cyclic order.
    pub fn hole(&self) -> Vec<usize> {
        (0..self.ell).collect()
    }
}

/// A graph together with a multicover living in it.
#[derive(Debug, Clone)]
pub struct MulticoverGadget {
    pub graph: Graph,
    pub multicover: Multicover,
}

/// The canonical realisation of a length-`len_x` multicover: apex `x_i`
/// followed by its `n_size` covering vertices, repeated per apex, then the
/// `c_size` target vertices. Target vertex `c_j` is joined to the
/// `(j mod n_size)`-th covering vertex of every apex; there are no other
/// edges, so every family and the target are stable.
pub fn multicover_gadget(len_x: usize, n_size: usize, c_size: usize) -> Result<MulticoverGadget, GadgetError> {
    if len_x == 0 || n_size == 0 || c_size == 0 {
        return Err(bad("multicover", "all counts must be at least 1"));
    }
    let block = 1 + n_size;
    let c0 = len_x * block;
    let mut b = GraphBuilder::new(c0 + c_size);
    let mut apexes = Vec::new();
    let mut families = Vec::new();
    for i in 0..len_x {
        let x = i * block;
        b.set_label(x, format!("x{i}"));
        apexes.push(x);
        let fam: VertexSet = (x + 1..x + block).collect();
        for (k, v) in fam.iter().enumerate() {
            b.set_label(v, format!("n{i}_{k}"));
            b.add_edge(x, v).unwrap();
        }
        for j in 0..c_size {
            b.add_edge(x + 1 + j % n_size, c0 + j).unwrap();
        }
        families.push(fam);
    }
    for j in 0..c_size {
        b.set_label(c0 + j, format!("c{j}"));
    }
    Ok(MulticoverGadget {
        graph: b.build(),
        multicover: Multicover {
            apexes,
            families,
            target: (c0..c0 + c_size).collect(),
        },
    })
}

/// A multicover gadget extended by a crest.
#[derive(Debug, Clone)]
pub struct CrestGadget {
    pub graph: Graph,
    pub multicover: Multicover,
    pub crest: Crest,
}

/// Appends the crest: `K_{k,|X|}` between fresh apexes `a_1..a_k` and the
/// multicover's index set, with every edge subdivided once. The fresh
/// apexes come first, then the subdivision vertices `a_{i,x}` row by row.
pub fn crest_gadget(k: usize, graph: &Graph, mc: &Multicover) -> Result<CrestGadget, GadgetError> {
    if k == 0 {
        return Err(bad("crest", "k must be at least 1"));
    }
    let mut b = GraphBuilder::from(graph);
    let apexes: Vec<usize> = (0..k).map(|_| b.add_vertex()).collect();
    let mut spokes = Vec::with_capacity(k);
    for (i, &a) in apexes.iter().enumerate() {
        b.set_label(a, format!("crest{i}"));
        let row: Vec<usize> = mc
            .apexes
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let s = b.add_vertex();
                b.set_label(s, format!("crest{i}_{j}"));
                b.add_edge(a, s).unwrap();
                b.add_edge(s, x).unwrap();
                s
            })
            .collect();
        spokes.push(row);
    }
    Ok(CrestGadget {
        graph: b.build(),
        multicover: mc.clone(),
        crest: Crest { apexes, spokes },
    })
}

/// Named standard families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Family {
    Cycle { n: usize },
    Complete { n: usize },
    CompleteBipartite { a: usize, b: usize },
    Petersen,
    MycielskiIterate { t: usize },
    Kneser { n: usize, k: usize },
    Random { n: usize, p: f64 },
}

/// Builds a member of a standard family; `seed` only affects `Random`.
pub fn standard_family(family: Family, seed: u64) -> Result<Graph, GadgetError> {
    match family {
        Family::Cycle { n } => cycle(n),
        Family::Complete { n } => complete(n),
        Family::CompleteBipartite { a, b } => Ok(complete_bipartite(a, b)),
        Family::Petersen => Ok(petersen()),
        Family::MycielskiIterate { t } => mycielski_iterate(t),
        Family::Kneser { n, k } => kneser(n, k),
        Family::Random { n, p } => random_graph(n, p, seed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    Findhole,
    Multicover,
    Crest,
    Cycle,
    Complete,
    CompleteBipartite,
    Petersen,
    MycielskiIterate,
    Kneser,
    Random,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 10] = [
        GadgetKind::Findhole,
        GadgetKind::Multicover,
        GadgetKind::Crest,
        GadgetKind::Cycle,
        GadgetKind::Complete,
        GadgetKind::CompleteBipartite,
        GadgetKind::Petersen,
        GadgetKind::MycielskiIterate,
        GadgetKind::Kneser,
        GadgetKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::Findhole => "findhole",
            GadgetKind::Multicover => "multicover",
            GadgetKind::Crest => "crest",
            GadgetKind::Cycle => "cycle",
            GadgetKind::Complete => "complete",
            GadgetKind::CompleteBipartite => "complete_bipartite",
            GadgetKind::Petersen => "petersen",
            GadgetKind::MycielskiIterate => "mycielski",
            GadgetKind::Kneser => "kneser",
            GadgetKind::Random => "random",
        }
    }

    fn arity(self) -> &'static [usize] {
        match self {
            GadgetKind::Findhole => &[4],
            GadgetKind::Multicover => &[3],
            GadgetKind::Crest => &[4],
            GadgetKind::Cycle | GadgetKind::Complete | GadgetKind::MycielskiIterate => &[1],
            GadgetKind::CompleteBipartite | GadgetKind::Kneser => &[2],
            GadgetKind::Petersen => &[0],
            GadgetKind::Random => &[2],
        }
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A textual gadget request such as `findhole:24,2,2,4` or `random:10,0.3`.
///
/// Integer parameters are stored as given; `random` keeps its edge
/// probability in per-mille (`random:10,0.3` stores `[10, 300]`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetRecipe {
    pub kind: GadgetKind,
    pub parameters: Vec<u64>,
    pub description: String,
}

impl FromStr for GadgetRecipe {
    type Err = GadgetError;

    fn from_str(s: &str) -> Result<Self, GadgetError> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let kind = GadgetKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| GadgetError::UnknownKind(name.to_string()))?;
        let raw: Vec<&str> = if args.is_empty() { vec![] } else { args.split(',').collect() };
        if !kind.arity().contains(&raw.len()) {
            return Err(GadgetError::Recipe(s.to_string()));
        }
        let mut parameters = Vec::with_capacity(raw.len());
        for (i, a) in raw.iter().enumerate() {
            let a = a.trim();
            let v = if kind == GadgetKind::Random && i == 1 {
                let p: f64 = a.parse().map_err(|_| GadgetError::Recipe(s.to_string()))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(GadgetError::Recipe(s.to_string()));
                }
                (p * 1000.0).round() as u64
            } else {
                a.parse().map_err(|_| GadgetError::Recipe(s.to_string()))?
            };
            parameters.push(v);
        }
        Ok(GadgetRecipe {
            kind,
            parameters,
            description: s.to_string(),
        })
    }
}

impl GadgetRecipe {
    pub fn build(&self, seed: u64) -> Result<Graph, GadgetError> {
        let p: Vec<usize> = self.parameters.iter().map(|&v| v as usize).collect();
        match self.kind {
            GadgetKind::Findhole => findhole_gadget(p[0], [p[1], p[2], p[3]]),
            GadgetKind::Multicover => Ok(multicover_gadget(p[0], p[1], p[2])?.graph),
            GadgetKind::Crest => {
                let mc = multicover_gadget(p[1], p[2], p[3])?;
                Ok(crest_gadget(p[0], &mc.graph, &mc.multicover)?.graph)
            }
            GadgetKind::Cycle => cycle(p[0]),
            GadgetKind::Complete => complete(p[0]),
            GadgetKind::CompleteBipartite => Ok(complete_bipartite(p[0], p[1])),
            GadgetKind::Petersen => Ok(petersen()),
            GadgetKind::MycielskiIterate => mycielski_iterate(p[0]),
            GadgetKind::Kneser => kneser(p[0], p[1]),
            GadgetKind::Random => random_graph(p[0], p[1] as f64 / 1000.0, seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::invariants::{chromatic_number, clique_number};

    #[test]
    fn small_families() {
        let c5 = cycle(5).unwrap();
        assert_eq!((c5.n(), c5.edge_count()), (5, 5));
        assert!(cycle(2).is_err());
        assert_eq!(complete(4).unwrap().edge_count(), 6);
        assert_eq!(complete_bipartite(2, 3).edge_count(), 6);
        assert_eq!(path(3).edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn kneser_5_2_is_petersen() {
        let k = kneser(5, 2).unwrap();
        assert_eq!((k.n(), k.edge_count()), (10, 15));
        assert!((0..10).all(|v| k.degree(v) == 3));
        // isomorphic to the standard labelling: search all bijections would be
        // 10!, so compare the invariants that pin Petersen down among cubic
        // graphs on 10 vertices: girth 5 and diameter 2.
        let p = petersen();
        for g in [&k, &p] {
            assert_eq!(clique_number(g, &mut Budget::default()).unwrap().size, 2);
            for u in 0..10 {
                let d = g.distances_from(u).unwrap();
                assert!(d.iter().all(|x| x.unwrap() <= 2));
            }
        }
        assert!(crate::holes::enumerate_holes(&k, 4, Some(4), &mut Budget::default())
            .next()
            .is_none());
        assert!(kneser(3, 0).is_err());
    }

    #[test]
    fn mycielski_sizes_and_chromatic_numbers() {
        let c5 = mycielski_iterate(1).unwrap();
        assert_eq!((c5.n(), c5.edge_count()), (5, 5));
        assert!((0..5).all(|v| c5.degree(v) == 2) && c5.is_connected_within(&c5.vertices()));
        let grotzsch = mycielski_iterate(2).unwrap();
        assert_eq!((grotzsch.n(), grotzsch.edge_count()), (11, 20));
        for t in 0..=3 {
            let g = mycielski_iterate(t).unwrap();
            assert_eq!(clique_number(&g, &mut Budget::default()).unwrap().size, 2);
            assert_eq!(chromatic_number(&g, &mut Budget::default()).unwrap().chi, t + 2);
        }
        assert_eq!(mycielski_iterate(4).unwrap().n(), 47);
    }

    #[test]
    fn random_graphs_are_reproducible() {
        let a = random_graph(20, 0.3, 7).unwrap();
        let b = random_graph(20, 0.3, 7).unwrap();
        let c = random_graph(20, 0.3, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(random_graph(6, 1.0, 1).unwrap().edge_count(), 15);
        assert_eq!(random_graph(6, 0.0, 1).unwrap().edge_count(), 0);
        assert!(random_graph(3, 1.5, 0).is_err());
    }

    #[test]
    fn findhole_counts_match_closed_form() {
        for ell in [24, 25, 32] {
            for subs in [[2, 2, 2], [2, 4, 4], [4, 4, 4]] {
                let g = findhole_gadget(ell, subs).unwrap();
                let layout = FindholeLayout::new(ell, subs).unwrap();
                let extra: usize = subs.iter().sum();
                assert_eq!(g.n(), 2 * ell + ell * ell + extra);
                assert_eq!(g.edge_count(), 2 * ell * ell + extra + 3);
                assert_eq!(g.n(), layout.vertex_count());
                assert_eq!(g.edge_count(), layout.edge_count());
            }
        }
        assert_eq!(findhole_gadget(24, [2, 2, 2]).unwrap().n(), 630);
        assert!(findhole_gadget(23, [2, 2, 2]).is_err());
        assert!(findhole_gadget(24, [2, 3, 2]).is_err());
    }

    #[test]
    fn findhole_layout_is_as_documented() {
        let layout = FindholeLayout::new(24, [2, 4, 2]).unwrap();
        let g = findhole_gadget(24, [2, 4, 2]).unwrap();
        assert_eq!(g.label(layout.a(3)), Some("a3"));
        assert_eq!(g.label(layout.b(5)), Some("b5"));
        assert_eq!(g.label(layout.sub(3, 5)), Some("s3_5"));
        let [p0, p1, _] = layout.chains();
        assert_eq!(p0.len(), 2);
        assert_eq!(p1.len(), 4);
        assert!(g.has_edge(layout.a(0), p0[0]));
        assert!(g.has_edge(p0[1], layout.a(1)));
        assert!(g.has_edge(layout.a(2), p1[0]));
        assert!(g.has_edge(p1[3], layout.a(3)));
        // A and B are stable and nonadjacent to each other
        for i in 0..24 {
            for j in 0..24 {
                assert!(!g.has_edge(layout.a(i), layout.b(j)));
                assert!(!g.has_edge(layout.a(i), layout.a(j)));
            }
        }
        // 24 = 4 * 6 needs no A–A path
        assert_eq!(layout.used_chains, 0);
        assert_eq!(layout.a(0), 0);
        assert_eq!(layout.sub(0, 0), 1);
        assert_eq!(layout.b(0), 2);
    }

    #[test]
    fn findhole_numbered_hole_is_a_hole() {
        for ell in 24..=32 {
            for mask in 0..8 {
                let subs = [0, 1, 2].map(|i| if mask >> i & 1 == 1 { 4 } else { 2 });
                let layout = FindholeLayout::new(ell, subs).unwrap();
                let g = findhole_gadget(ell, subs).unwrap();
                let hole = crate::holes::Hole::new(&g, layout.hole()).unwrap();
                assert_eq!(hole.len(), ell);
            }
        }
    }

    #[test]
    fn findhole_numbering_is_a_bijection() {
        let layout = FindholeLayout::new(27, [4, 4, 2]).unwrap();
        let mut all: Vec<usize> = (0..27).flat_map(|i| [layout.a(i), layout.b(i)]).collect();
        for i in 0..27 {
            for j in 0..27 {
                all.push(layout.sub(i, j));
            }
        }
        all.extend(layout.chains().iter().flatten());
        all.sort_unstable();
        assert_eq!(all, (0..layout.vertex_count()).collect::<Vec<_>>());
        // 27 = 3 + 24 uses only the short path
        assert_eq!(layout.used_chains, 0b100);
    }

    #[test]
    fn recipes_parse_and_build() {
        let r: GadgetRecipe = "findhole:24,2,2,4".parse().unwrap();
        assert_eq!(r.parameters, vec![24, 2, 2, 4]);
        assert_eq!(r.build(0).unwrap().n(), 24 * 2 + 576 + 8);
        let r: GadgetRecipe = "random:10,0.3".parse().unwrap();
        assert_eq!(r.parameters, vec![10, 300]);
        assert_eq!(r.build(5).unwrap(), random_graph(10, 0.3, 5).unwrap());
        assert_eq!("petersen".parse::<GadgetRecipe>().unwrap().build(0).unwrap(), petersen());
        assert!("cycle".parse::<GadgetRecipe>().is_err());
        assert!("banana:3".parse::<GadgetRecipe>().is_err());
        assert!("cycle:x".parse::<GadgetRecipe>().is_err());
        let crest: GadgetRecipe = "crest:1,2,3,4".parse().unwrap();
        assert_eq!(crest.build(0).unwrap().n(), 2 * 4 + 4 + 3);
    }

    #[test]
    fn standard_family_dispatch() {
        assert_eq!(standard_family(Family::Cycle { n: 5 }, 0).unwrap(), cycle(5).unwrap());
        assert_eq!(
            standard_family(Family::Random { n: 8, p: 0.5 }, 3).unwrap(),
            random_graph(8, 0.5, 3).unwrap()
        );
        assert_eq!(standard_family(Family::MycielskiIterate { t: 2 }, 0).unwrap().n(), 11);
    }
}
