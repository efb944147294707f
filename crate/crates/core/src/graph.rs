//! Immutable simple graphs over dense vertex indices, plus the set and
//! distance primitives the rest of the crate is written against.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
}

/// A set of vertex indices, stored as a bitset.
///
/// The word vector never carries trailing zero words, so two sets with the
/// same members compare equal regardless of how they were built.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    pub fn new() -> Self {
        VertexSet { words: Vec::new() }
    }

    pub fn singleton(v: usize) -> Self {
        let mut s = VertexSet::new();
        s.insert(v);
        s
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; n / 64];
        if !n.is_multiple_of(64) {
            words.push((1u64 << (n % 64)) - 1);
        }
        VertexSet { words }
    }

    /// Builds a set from the low `n` bits of a mask.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = VertexSet { words: vec![mask] };
        s.trim();
        s
    }

    /// The members as a `u64` mask, if all of them are below 64.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, v: usize) -> bool {
        let (w, b) = (v / 64, v % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, v: usize) -> bool {
        let (w, b) = (v / 64, v % 64);
        if w >= self.words.len() {
            return false;
        }
        let present = self.words[w] & (1 << b) != 0;
        self.words[w] &= !(1 << b);
        self.trim();
        present
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        let w = v / 64;
        w < self.words.len() && self.words[w] & (1 << (v % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> Members<'_> {
        Members {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn last(&self) -> Option<usize> {
        let w = self.words.len().checked_sub(1)?;
        Some(w * 64 + 63 - self.words[w].leading_zeros() as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, o) in words.iter_mut().zip(&short.words) {
            *w |= o;
        }
        VertexSet { words }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = VertexSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = VertexSet {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, a)| a & !other.words.get(i).copied().unwrap_or(0))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, a)| a & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::new();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = Members<'a>;
    fn into_iter(self) -> Members<'a> {
        self.iter()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Vec::<usize>::deserialize(d)?.into_iter().collect())
    }
}

/// Ascending iterator over the members of a [`VertexSet`].
pub struct Members<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Members<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + b);
            }
            self.idx += 1;
            self.cur = *self.words.get(self.idx)?;
        }
    }
}

/// Graph distance; disconnected pairs are [`Distance::Infinite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(d) => s.serialize_u64(*d as u64),
            Distance::Infinite => s.serialize_none(),
        }
    }
}

/// A finite simple graph on vertices `0..n`. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<VertexSet>,
    nbrs: Vec<Vec<usize>>,
    edge_count: usize,
    labels: Option<Vec<String>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Accumulates edges before freezing them into a [`Graph`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    adj: Vec<VertexSet>,
    labels: Option<Vec<String>>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            adj: vec![VertexSet::new(); n],
            labels: None,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Appends a fresh vertex and returns its index.
    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(VertexSet::new());
        if let Some(labels) = &mut self.labels {
            labels.push(String::new());
        }
        self.adj.len() - 1
    }

    /// Adds `uv`. Repeated edges are absorbed.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<&mut Self, GraphError> {
        let n = self.adj.len();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(self)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|s| s.contains(v))
    }

    pub fn set_label(&mut self, v: usize, label: impl Into<String>) {
        let n = self.adj.len();
        let labels = self.labels.get_or_insert_with(|| vec![String::new(); n]);
        labels[v] = label.into();
    }

    pub fn build(self) -> Graph {
        let nbrs: Vec<Vec<usize>> = self.adj.iter().map(VertexSet::to_vec).collect();
        let edge_count = nbrs.iter().map(Vec::len).sum::<usize>() / 2;
        Graph {
            adj: self.adj,
            nbrs,
            edge_count,
            labels: self.labels,
        }
    }
}

impl From<&Graph> for GraphBuilder {
    fn from(g: &Graph) -> Self {
        GraphBuilder {
            adj: g.adj.clone(),
            labels: g.labels.clone(),
        }
    }
}

/// An induced subgraph together with the map back to its host's indices.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `host_index[i]` is the host vertex behind local vertex `i`.
    pub host_index: Vec<usize>,
}

impl InducedSubgraph {
    pub fn to_host(&self, v: usize) -> usize {
        self.host_index[v]
    }

    pub fn to_host_set(&self, s: &VertexSet) -> VertexSet {
        s.iter().map(|v| self.host_index[v]).collect()
    }

    pub fn from_host(&self, v: usize) -> Option<usize> {
        self.host_index.binary_search(&v).ok()
    }
}

impl Graph {
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut b = GraphBuilder::new(n);
        for (u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Graph {
        GraphBuilder::new(n).build()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Graph, GraphError> {
        if labels.len() != self.n() {
            return Err(GraphError::LabelCount {
                expected: self.n(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    /// Neighbourhood of `v` as a set.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    /// Neighbourhood of `v` as an ascending slice.
    #[inline]
    pub fn neighbor_list(&self, v: usize) -> &[usize] {
        &self.nbrs[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.nbrs[v].len()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nbrs
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    pub fn check_set(&self, s: &VertexSet) -> Result<(), GraphError> {
        match s.last() {
            Some(v) => self.check_vertex(v),
            None => Ok(()),
        }
    }

    /// `G[s]`, relabelled to `0..|s|` in increasing host order.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<InducedSubgraph, GraphError> {
        self.check_set(s)?;
        let host_index = s.to_vec();
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in host_index.iter().enumerate() {
            local[v] = i;
        }
        let mut b = GraphBuilder::new(host_index.len());
        for (i, &v) in host_index.iter().enumerate() {
            for w in self.adj[v].intersection(s).iter() {
                if local[w] > i {
                    b.add_edge(i, local[w]).expect("indices are in range");
                }
            }
        }
        if let Some(labels) = &self.labels {
            for (i, &v) in host_index.iter().enumerate() {
                b.set_label(i, labels[v].clone());
            }
        }
        Ok(InducedSubgraph {
            graph: b.build(),
            host_index,
        })
    }

    /// BFS distances from `v` to every vertex (`None` when unreachable).
    pub fn distances_from(&self, v: usize) -> Result<Vec<Option<usize>>, GraphError> {
        self.check_vertex(v)?;
        Ok(self.bfs_within(v, None))
    }

    /// BFS from `v` that only walks through `within` when given.
    pub(crate) fn bfs_within(&self, v: usize, within: Option<&VertexSet>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.nbrs[u] {
                if dist[w].is_none() && within.is_none_or(|s| s.contains(w)) {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<Distance, GraphError> {
        self.check_vertex(v)?;
        Ok(match self.distances_from(u)?[v] {
            Some(d) => Distance::Finite(d),
            None => Distance::Infinite,
        })
    }

    /// Vertices at distance exactly `rho` from `v`, or at most `rho` when
    /// `closed` is set.
    pub fn ball(&self, v: usize, rho: usize, closed: bool) -> Result<VertexSet, GraphError> {
        let dist = self.distances_from(v)?;
        Ok(dist
            .iter()
            .enumerate()
            .filter(|(_, d)| match d {
                Some(d) if closed => *d <= rho,
                Some(d) => *d == rho,
                None => false,
            })
            .map(|(u, _)| u)
            .collect())
    }

    /// Union of the neighbourhoods of `s`, excluding nothing.
    pub fn neighborhood_of_set(&self, s: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new();
        for v in s {
            out.union_with(&self.adj[v]);
        }
        out
    }

    /// `s` together with every vertex adjacent to it.
    pub fn closed_neighborhood_of_set(&self, s: &VertexSet) -> VertexSet {
        let mut out = self.neighborhood_of_set(s);
        out.union_with(s);
        out
    }

    /// `a` and `b` are disjoint with no edge between them.
    pub fn is_anticomplete(&self, a: &VertexSet, b: &VertexSet) -> bool {
        a.is_disjoint(b) && a.iter().all(|v| self.adj[v].is_disjoint(b))
    }

    /// `b` is disjoint from `c` and every vertex of `c` has a neighbour in `b`.
    pub fn covers(&self, b: &VertexSet, c: &VertexSet) -> bool {
        b.is_disjoint(c) && c.iter().all(|v| !self.adj[v].is_disjoint(b))
    }

    pub fn is_stable(&self, s: &VertexSet) -> bool {
        s.iter().all(|v| self.adj[v].is_disjoint(s))
    }

    pub fn is_clique(&self, s: &VertexSet) -> bool {
        s.iter().all(|v| {
            let mut others = s.clone();
            others.remove(v);
            others.is_subset(&self.adj[v])
        })
    }

    /// First edge inside `s`, if any.
    pub fn edge_within(&self, s: &VertexSet) -> Option<(usize, usize)> {
        s.iter().find_map(|v| {
            self.adj[v]
                .intersection(s)
                .iter()
                .find(|&w| w > v)
                .map(|w| (v, w))
        })
    }

    /// Vertices of `s` reachable from `v` inside `G[s]`.
    pub fn component_within(&self, s: &VertexSet, v: usize) -> VertexSet {
        self.bfs_within(v, Some(s))
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_some())
            .map(|(u, _)| u)
            .collect()
    }

    /// `G[s]` is connected (the empty set counts as connected).
    pub fn is_connected_within(&self, s: &VertexSet) -> bool {
        match s.first() {
            None => true,
            Some(v) => self.component_within(s, v).len() == s.len(),
        }
    }

    /// Vertex-disjoint union, each part shifted past the previous ones.
    pub fn disjoint_union(parts: &[&Graph]) -> Graph {
        let n = parts.iter().map(|g| g.n()).sum();
        let mut b = GraphBuilder::new(n);
        let mut offset = 0;
        for g in parts {
            for (u, v) in g.edges() {
                b.add_edge(u + offset, v + offset).expect("in range");
            }
            offset += g.n();
        }
        b.build()
    }
}
