use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GraphError, NodeId, NodeSet, MAX_NODES};

/// One round's communication topology.
///
/// Stored as a dense bit matrix: `out[i]` holds the successors of `i`. Every
/// node carries a self-loop; constructors insert them, so no `Digraph` value
/// can violate that.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    out: Vec<u64>,
}

impl Digraph {
    /// Builds a digraph on `n` nodes from `edges`, adding all self-loops.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::identity(n)?;
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(GraphError::NodeOutOfRange { node: i.max(j), n });
            }
            g.out[i] |= 1 << j;
        }
        Ok(g)
    }

    /// The digraph with only a self-loop at each node.
    pub fn identity(n: usize) -> Result<Self, GraphError> {
        if n == 0 || n > MAX_NODES {
            return Err(GraphError::BadNodeCount(n));
        }
        Ok(Self {
            n,
            out: (0..n).map(|i| 1u64 << i).collect(),
        })
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::identity(n)?;
        let all = NodeSet::full(n).bits();
        g.out.iter_mut().for_each(|row| *row = all);
        Ok(g)
    }

    /// Builds a digraph from successor bit rows, forcing self-loops.
    pub fn from_rows(rows: Vec<u64>) -> Result<Self, GraphError> {
        let n = rows.len();
        let mut g = Self::identity(n)?;
        let mask = NodeSet::full(n).bits();
        for (i, row) in rows.into_iter().enumerate() {
            if row & !mask != 0 {
                return Err(GraphError::NodeOutOfRange {
                    node: 63 - (row & !mask).leading_zeros() as usize,
                    n,
                });
            }
            g.out[i] |= row;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.out[i.index()] >> j.index() & 1 == 1
    }

    pub fn out_neighbors(&self, i: NodeId) -> NodeSet {
        NodeSet::from_bits(self.out[i.index()])
    }

    pub fn in_neighbors(&self, j: NodeId) -> NodeSet {
        let bit = 1u64 << j.index();
        NodeSet::from_bits(
            self.out
                .iter()
                .enumerate()
                .filter(|(_, row)| *row & bit != 0)
                .fold(0, |acc, (i, _)| acc | 1 << i),
        )
    }

    /// Successor rows as raw bit masks.
    pub fn rows(&self) -> &[u64] {
        &self.out
    }

    /// Non-self-loop edges in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out.iter().enumerate().flat_map(|(i, &row)| {
            NodeSet::from_bits(row & !(1 << i))
                .iter()
                .map(move |j| (NodeId(i), j))
        })
    }

    /// Number of edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// The product `self ∘ other`: an edge `(i, j)` whenever some `k` has
    /// `(i, k)` in `self` and `(k, j)` in `other`.
    pub fn product(&self, other: &Digraph) -> Result<Digraph, GraphError> {
        if self.n != other.n {
            return Err(GraphError::NodeCountMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self.product_unchecked(other))
    }

    pub(crate) fn product_unchecked(&self, other: &Digraph) -> Digraph {
        let out = self
            .out
            .iter()
            .map(|&row| step_set(row, &other.out))
            .collect();
        Digraph { n: self.n, out }
    }

    /// Nodes reachable from `i` (including `i`).
    pub fn reachable_from(&self, i: NodeId) -> NodeSet {
        let mut seen = 1u64 << i.index();
        loop {
            let next = step_set(seen, &self.out);
            if next == seen {
                return NodeSet::from_bits(seen);
            }
            seen = next;
        }
    }

    /// Reflexive-transitive closure, Warshall style on bit rows.
    pub fn closure(&self) -> Digraph {
        let mut out = self.out.clone();
        for k in 0..self.n {
            let row_k = out[k];
            let bit = 1u64 << k;
            for row in out.iter_mut() {
                if *row & bit != 0 {
                    *row |= row_k;
                }
            }
        }
        Digraph { n: self.n, out }
    }

    /// Nodes with a path to every node.
    pub fn roots(&self) -> NodeSet {
        let all = NodeSet::full(self.n).bits();
        let closed = self.closure();
        NodeSet::from_bits(
            closed
                .out
                .iter()
                .enumerate()
                .filter(|(_, &row)| row == all)
                .fold(0, |acc, (i, _)| acc | 1 << i),
        )
    }

    pub fn is_rooted(&self) -> bool {
        !self.roots().is_empty()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.roots().len() == self.n
    }

    pub fn is_complete(&self) -> bool {
        let all = NodeSet::full(self.n).bits();
        self.out.iter().all(|&row| row == all)
    }

    /// Subgraph induced on `nodes`, re-indexed in ascending order.
    pub fn induced(&self, nodes: NodeSet) -> Result<Digraph, GraphError> {
        let members: Vec<NodeId> = nodes.iter().collect();
        let rows = members
            .iter()
            .map(|&i| {
                members
                    .iter()
                    .enumerate()
                    .filter(|(_, &j)| self.has_edge(i, j))
                    .fold(0u64, |acc, (k, _)| acc | 1 << k)
            })
            .collect();
        Digraph::from_rows(rows)
    }
}

/// One propagation step: the union of successor rows over the members of `set`.
pub(crate) fn step_set(set: u64, rows: &[u64]) -> u64 {
    let mut acc = 0;
    let mut rest = set;
    while rest != 0 {
        let k = rest.trailing_zeros() as usize;
        acc |= rows[k];
        rest &= rest - 1;
    }
    acc
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}; ", self.n)?;
        let edges: Vec<String> = self
            .edges()
            .map(|(i, j)| format!("{}->{}", i.0, j.0))
            .collect();
        write!(f, "{})", edges.join(" "))
    }
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let edges: Vec<(usize, usize)> = self.edges().map(|(i, j)| (i.0, j.0)).collect();
        (self.n, edges).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (n, edges): (usize, Vec<(usize, usize)>) = Deserialize::deserialize(d)?;
        Digraph::new(n, edges).map_err(serde::de::Error::custom)
    }
}
