//! Fill graph and maximal-clique enumeration restricted to one edge.

use crate::error::{Error, Result};
use crate::matrix::IndexSet;

/// Fixed-capacity vertex bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    pub(crate) fn empty(n: usize) -> Self {
        VertexSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    #[inline]
    pub(crate) fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1 << (v % 64);
    }

    #[inline]
    pub(crate) fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    #[inline]
    pub(crate) fn contains(&self, v: usize) -> bool {
        self.words[v / 64] & (1 << (v % 64)) != 0
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub(crate) fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn intersection_len(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + bit)
            })
        })
    }
}

/// Undirected graph on `0..n` whose edges are the revealed off-diagonal pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillGraph {
    n: usize,
    adj: Vec<VertexSet>,
    edges: usize,
}

impl FillGraph {
    pub fn new(n: usize) -> Self {
        FillGraph {
            n,
            adj: vec![VertexSet::empty(n); n],
            edges: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::invalid(format!("self-loop at {i}")));
        }
        if !self.adj[i].contains(j) {
            self.adj[i].insert(j);
            self.adj[j].insert(i);
            self.edges += 1;
        }
        Ok(())
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.adj[i].contains(j)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Whether every pair of `vertices` is an edge.
    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(a, &u)| vertices[a + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: v,
                dim: self.n,
            })
        }
    }
}

/// All maximal cliques of `graph` that contain both `i` and `j`.
///
/// These are `{i, j} ∪ K` for the maximal cliques `K` of the subgraph induced
/// on the common neighbours of `i` and `j`, found with pivoted Bron–Kerbosch.
/// Every fully revealed principal submatrix containing `(i, j)` is a principal
/// submatrix of one of these, so by interlacing they carry the smallest
/// eigenvalue among all of them. Output is sorted.
pub fn maximal_cliques_with_edge(graph: &FillGraph, i: usize, j: usize) -> Result<Vec<IndexSet>> {
    graph.check(i)?;
    graph.check(j)?;
    if !graph.has_edge(i, j) {
        return Err(Error::invalid(format!(
            "edge ({i}, {j}) is not in the fill graph"
        )));
    }
    let candidates = graph.adj[i].intersection(&graph.adj[j]);
    let mut out = Vec::new();
    let mut current = vec![i, j];
    bron_kerbosch(
        graph,
        &mut current,
        candidates,
        VertexSet::empty(graph.n),
        &mut out,
    );
    let mut cliques: Vec<IndexSet> = out
        .into_iter()
        .map(|c| IndexSet::from_unsorted(c).expect("clique holds distinct vertices"))
        .collect();
    cliques.sort();
    Ok(cliques)
}

fn bron_kerbosch(
    graph: &FillGraph,
    current: &mut Vec<usize>,
    mut candidates: VertexSet,
    mut excluded: VertexSet,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() {
            out.push(current.clone());
        }
        return;
    }
    // pivot: vertex of P ∪ X with the most neighbours in P
    let pivot = candidates
        .union(&excluded)
        .iter()
        .max_by_key(|&u| graph.adj[u].intersection_len(&candidates))
        .expect("P is nonempty");
    let branch: Vec<usize> = candidates
        .iter()
        .filter(|&v| !graph.adj[pivot].contains(v))
        .collect();
    for v in branch {
        current.push(v);
        bron_kerbosch(
            graph,
            current,
            candidates.intersection(&graph.adj[v]),
            excluded.intersection(&graph.adj[v]),
            out,
        );
        current.pop();
        candidates.remove(v);
        excluded.insert(v);
    }
}
