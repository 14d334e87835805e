//! Digraphs with mandatory self-loops and dynamic graphs built from them.
//!
//! A [`Digraph`] is one round's topology; a [`DynamicGraph`] assigns a
//! digraph to every round `t >= 1`. Interval products `G(t:t')` compose the
//! rounds of a window and answer temporal reachability questions.

mod digraph;
mod dynamic;
pub mod text;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use digraph::step_set;
pub use digraph::Digraph;
pub use dynamic::{DynamicGraph, GeneratorFn, Schedule};

/// Largest supported node count (one `u64` bit row per node).
pub const MAX_NODES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node count {0} outside 1..={MAX_NODES}")]
    BadNodeCount(usize),
    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("node count mismatch: {left} vs {right}")]
    NodeCountMismatch { left: usize, right: usize },
    #[error("round numbering starts at 1 (got {0})")]
    RoundZero(usize),
    #[error("cycle part of a prefix/cycle schedule must be non-empty")]
    EmptyCycle,
    #[error("schedule generator failed at round {round}: {reason}")]
    Generator { round: usize, reason: String },
    #[error("operation requires a prefix/cycle schedule")]
    NotPeriodic,
}

/// An agent, identified by its index in `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

/// A set of nodes as a 64-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NodeSet(u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        NodeSet(bits)
    }

    pub fn from_nodes<I: IntoIterator<Item = NodeId>>(nodes: I) -> Self {
        NodeSet(nodes.into_iter().fold(0, |acc, i| acc | 1 << i.0))
    }

    pub fn singleton(i: NodeId) -> Self {
        NodeSet(1 << i.0)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: NodeId) -> bool {
        i.0 < 64 && self.0 >> i.0 & 1 == 1
    }

    pub fn insert(&mut self, i: NodeId) {
        self.0 |= 1 << i.0;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn first(self) -> Option<NodeId> {
        (self.0 != 0).then(|| NodeId(self.0.trailing_zeros() as usize))
    }

    pub fn iter(self) -> impl Iterator<Item = NodeId> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            (rest != 0).then(|| {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                NodeId(i)
            })
        })
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|i| i.0)).finish()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.0.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        NodeSet::from_nodes(iter)
    }
}

impl Serialize for NodeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|i| i.0))
    }
}

impl<'de> Deserialize<'de> for NodeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let nodes: Vec<usize> = Deserialize::deserialize(d)?;
        if let Some(bad) = nodes.iter().find(|&&i| i >= 64) {
            return Err(serde::de::Error::custom(format!("node {bad} out of range")));
        }
        Ok(nodes.into_iter().map(NodeId).collect())
    }
}
