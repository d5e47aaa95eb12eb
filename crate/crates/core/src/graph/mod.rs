//! Simple graphs on labeled nodes, with an optional block partition.
//!
//! Nodes are `0..n` internally. File formats and the CLI use `1..=n`.
//! Graphs with at most 64 nodes keep one `u64` adjacency row per node, which
//! is what the exhaustive enumeration and the MCMC change statistics lean on;
//! larger graphs use sorted neighbor sets.

mod io;

use std::collections::BTreeSet;

pub use io::{parse_edge_list, serialize_edge_list};

use crate::error::{Error, Result};

/// Largest node count stored with dense bitset rows.
pub const DENSE_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Adjacency {
    Dense(Vec<u64>),
    Sparse(Vec<BTreeSet<u32>>),
}

/// A simple graph (no self-loops, no multi-edges), directed or undirected.
///
/// Undirected edges are stored in both endpoint rows so `has_edge(i, j)` and
/// `has_edge(j, i)` always agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: usize,
    adj: Adjacency,
}

impl Graph {
    pub fn new(n: usize, directed: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyNodeSet);
        }
        let adj = if n <= DENSE_LIMIT {
            Adjacency::Dense(vec![0; n])
        } else {
            Adjacency::Sparse(vec![BTreeSet::new(); n])
        };
        Ok(Graph {
            n,
            directed,
            edges: 0,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of edges; an undirected edge counts once.
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for node in [i, j] {
            if node >= self.n {
                return Err(Error::NodeOutOfRange { node, n: self.n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        Ok(())
    }

    /// Returns `false` for out-of-range nodes and for `i == j`.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i >= self.n || j >= self.n {
            return false;
        }
        match &self.adj {
            Adjacency::Dense(rows) => rows[i] >> j & 1 == 1,
            Adjacency::Sparse(rows) => rows[i].contains(&(j as u32)),
        }
    }

    fn raw_set(&mut self, i: usize, j: usize, present: bool) {
        match &mut self.adj {
            Adjacency::Dense(rows) => {
                if present {
                    rows[i] |= 1 << j;
                } else {
                    rows[i] &= !(1 << j);
                }
            }
            Adjacency::Sparse(rows) => {
                if present {
                    rows[i].insert(j as u32);
                } else {
                    rows[i].remove(&(j as u32));
                }
            }
        }
    }

    /// Adds or removes edge `(i, j)`. Idempotent; mirrored when undirected.
    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) -> Result<()> {
        self.check_pair(i, j)?;
        if self.has_edge(i, j) == present {
            return Ok(());
        }
        self.raw_set(i, j, present);
        if !self.directed {
            self.raw_set(j, i, present);
        }
        if present {
            self.edges += 1;
        } else {
            self.edges -= 1;
        }
        Ok(())
    }

    pub fn with_edge(mut self, i: usize, j: usize) -> Result<Self> {
        self.set_edge(i, j, true)?;
        Ok(self)
    }

    /// Builds a graph from 0-based edge pairs.
    pub fn from_edges(n: usize, directed: bool, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n, directed)?;
        for &(i, j) in edges {
            g.set_edge(i, j, true)?;
        }
        Ok(g)
    }

    /// Out-neighbors of `i` (all neighbors when undirected), ascending.
    pub fn neighbors(&self, i: usize) -> Neighbors<'_> {
        match &self.adj {
            Adjacency::Dense(rows) => Neighbors::Dense(rows[i]),
            Adjacency::Sparse(rows) => Neighbors::Sparse(rows[i].iter()),
        }
    }

    pub fn out_degree(&self, i: usize) -> usize {
        match &self.adj {
            Adjacency::Dense(rows) => rows[i].count_ones() as usize,
            Adjacency::Sparse(rows) => rows[i].len(),
        }
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for i in 0..self.n {
            for j in self.neighbors(i) {
                deg[j] += 1;
            }
        }
        deg
    }

    /// Number of nodes adjacent to both `i` and `j`, excluding `i` and `j`.
    pub fn common_neighbors(&self, i: usize, j: usize) -> usize {
        match &self.adj {
            Adjacency::Dense(rows) => {
                let mask = !((1u64 << i) | (1u64 << j));
                (rows[i] & rows[j] & mask).count_ones() as usize
            }
            Adjacency::Sparse(rows) => {
                let (a, b) = if rows[i].len() <= rows[j].len() {
                    (&rows[i], &rows[j])
                } else {
                    (&rows[j], &rows[i])
                };
                a.iter()
                    .filter(|&&h| h as usize != i && h as usize != j && b.contains(&h))
                    .count()
            }
        }
    }

    /// Edge list in canonical order: `i < j` pairs when undirected, all
    /// ordered pairs when directed, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edges);
        for i in 0..self.n {
            for j in self.neighbors(i) {
                if self.directed || i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "permutation has length {} for {} nodes",
                perm.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        let mut g = Graph::new(self.n, self.directed)?;
        for (i, j) in self.edges() {
            g.set_edge(perm[i], perm[j], true)?;
        }
        Ok(g)
    }

    /// Subgraph induced by `nodes`; node `nodes[t]` becomes `t`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        let mut g = Graph::new(nodes.len(), self.directed)?;
        for (a, &i) in nodes.iter().enumerate() {
            for (b, &j) in nodes.iter().enumerate() {
                if a != b && (self.directed || a < b) && self.has_edge(i, j) {
                    g.set_edge(a, b, true)?;
                }
            }
        }
        Ok(g)
    }

    /// Decodes a bitmask over [`canonical_pairs`]: bit `q` set means pair `q`
    /// is an edge.
    pub fn from_mask(n: usize, directed: bool, mask: u64) -> Result<Graph> {
        let pairs = canonical_pairs(n, directed);
        if pairs.len() > 64 {
            return Err(Error::InvalidArgument(format!(
                "{} node pairs do not fit a 64-bit mask",
                pairs.len()
            )));
        }
        let mut g = Graph::new(n, directed)?;
        for (q, &(i, j)) in pairs.iter().enumerate() {
            if mask >> q & 1 == 1 {
                g.set_edge(i, j, true)?;
            }
        }
        Ok(g)
    }

    pub fn to_mask(&self) -> Result<u64> {
        let pairs = canonical_pairs(self.n, self.directed);
        if pairs.len() > 64 {
            return Err(Error::InvalidArgument(format!(
                "{} node pairs do not fit a 64-bit mask",
                pairs.len()
            )));
        }
        Ok(pairs
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| self.has_edge(i, j))
            .fold(0u64, |m, (q, _)| m | 1 << q))
    }
}

/// All node pairs an edge can occupy: `(i, j)` with `i < j` when undirected,
/// every ordered `i != j` when directed. Lexicographic order.
pub fn canonical_pairs(n: usize, directed: bool) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && (directed || i < j) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

pub enum Neighbors<'a> {
    Dense(u64),
    Sparse(std::collections::btree_set::Iter<'a, u32>),
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            Neighbors::Dense(bits) => {
                if *bits == 0 {
                    None
                } else {
                    let j = bits.trailing_zeros() as usize;
                    *bits &= *bits - 1;
                    Some(j)
                }
            }
            Neighbors::Sparse(it) => it.next().map(|&j| j as usize),
        }
    }
}

/// Partition of the node set into `K` non-empty blocks, ids `0..K`.
///
/// Serializes as the list of 1-based block labels, one per node.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "BlockLabels", into = "BlockLabels")]
pub struct BlockStructure {
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl BlockStructure {
    /// `assignment[i]` is the 0-based block of node `i`; ids must cover
    /// `0..K` with every block non-empty.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidBlocks("no nodes".into()));
        }
        let k = assignment.iter().max().map_or(0, |&m| m + 1);
        let mut members = vec![Vec::new(); k];
        for (i, &b) in assignment.iter().enumerate() {
            members[b].push(i);
        }
        if let Some(b) = members.iter().position(Vec::is_empty) {
            return Err(Error::InvalidBlocks(format!(
                "block {} is empty (ids must be contiguous)",
                b + 1
            )));
        }
        Ok(BlockStructure {
            assignment,
            members,
        })
    }

    /// Consecutive blocks of the given sizes: nodes `0..s0` in block 0, etc.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let assignment = sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
            .collect();
        BlockStructure::new(assignment)
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn block_count(&self) -> usize {
        self.members.len()
    }

    pub fn block_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn members(&self, block: usize) -> &[usize] {
        &self.members[block]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn max_block_size(&self) -> usize {
        self.members.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
struct BlockLabels(Vec<usize>);

impl TryFrom<BlockLabels> for BlockStructure {
    type Error = Error;

    fn try_from(labels: BlockLabels) -> Result<Self> {
        if labels.0.contains(&0) {
            return Err(Error::InvalidBlocks("block labels start at 1".into()));
        }
        BlockStructure::new(labels.0.into_iter().map(|b| b - 1).collect())
    }
}

impl From<BlockStructure> for BlockLabels {
    fn from(b: BlockStructure) -> Self {
        BlockLabels(b.assignment.into_iter().map(|x| x + 1).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_graph_is_empty() {
        let g = Graph::new(3, false).unwrap();
        assert_eq!((g.n(), g.edge_count()), (3, 0));
        let g = Graph::new(1, true).unwrap();
        assert_eq!((g.n(), g.edge_count()), (1, 0));
        assert_eq!(Graph::new(0, false), Err(Error::EmptyNodeSet));
    }

    #[test]
    fn set_edge_mirrors_and_is_idempotent() {
        let mut g = Graph::new(3, false).unwrap();
        g.set_edge(0, 1, true).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(1, 0));
        g.set_edge(0, 1, true).unwrap();
        g.set_edge(1, 0, true).unwrap();
        assert_eq!(g.edge_count(), 1);
        g.set_edge(1, 0, false).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(!g.has_edge(0, 1));
    }

    #[test]
    fn set_edge_rejects_bad_pairs() {
        let mut g = Graph::new(3, false).unwrap();
        assert_eq!(g.set_edge(0, 0, true), Err(Error::SelfLoop(0)));
        assert_eq!(
            g.set_edge(0, 3, true),
            Err(Error::NodeOutOfRange { node: 3, n: 3 })
        );
    }

    #[test]
    fn directed_edges_are_not_mirrored() {
        let g = Graph::from_edges(3, true, &[(0, 1), (1, 2)]).unwrap();
        assert!(g.has_edge(0, 1));
        assert!(!g.has_edge(1, 0));
        assert_eq!(g.in_degrees(), vec![0, 1, 1]);
    }

    #[test]
    fn sparse_and_dense_agree() {
        let edges = [(0, 1), (1, 2), (0, 2), (2, 3)];
        let small = Graph::from_edges(4, false, &edges).unwrap();
        let mut big = Graph::new(70, false).unwrap();
        for &(i, j) in &edges {
            big.set_edge(i, j, true).unwrap();
        }
        big.set_edge(65, 69, true).unwrap();
        assert_eq!(small.common_neighbors(0, 1), big.common_neighbors(0, 1));
        assert_eq!(small.common_neighbors(0, 1), 1);
        assert_eq!(
            small.neighbors(2).collect::<Vec<_>>(),
            big.neighbors(2).collect::<Vec<_>>()
        );
        assert_eq!(big.edges().last(), Some(&(65, 69)));
    }

    #[test]
    fn mask_round_trip() {
        for mask in 0..64u64 {
            let g = Graph::from_mask(4, false, mask).unwrap();
            assert_eq!(g.to_mask().unwrap(), mask);
            assert_eq!(g.edge_count(), mask.count_ones() as usize);
        }
    }

    #[test]
    fn blocks_must_be_contiguous() {
        assert!(BlockStructure::new(vec![0, 0, 2]).is_err());
        let b = BlockStructure::from_sizes(&[2, 3]).unwrap();
        assert_eq!(b.block_count(), 2);
        assert_eq!(b.members(1), &[2, 3, 4]);
        assert_eq!(b.max_block_size(), 3);
    }
}
