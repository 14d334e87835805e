use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use super::{Digraph, GraphError, NodeId, NodeSet};

/// Round-indexed digraph source for schedules that are not eventually
/// periodic. Must be a pure function of the round number.
pub type GeneratorFn = Arc<dyn Fn(usize) -> Result<Digraph, GraphError> + Send + Sync>;

#[derive(Clone)]
pub enum Schedule {
    /// Rounds `1..=prefix.len()` come from `prefix`, then `cycle` repeats forever.
    PrefixCycle {
        prefix: Vec<Digraph>,
        cycle: Vec<Digraph>,
        /// `G(p+1 : p+L)`, the product of one aligned cycle.
        cycle_product: Digraph,
    },
    Generator(GeneratorFn),
}

/// A sequence of digraphs over a fixed node set, one per round `t >= 1`.
#[derive(Clone)]
pub struct DynamicGraph {
    n: usize,
    schedule: Schedule,
}

impl DynamicGraph {
    pub fn prefix_cycle(prefix: Vec<Digraph>, cycle: Vec<Digraph>) -> Result<Self, GraphError> {
        let first = cycle.first().ok_or(GraphError::EmptyCycle)?;
        let n = first.node_count();
        if let Some(bad) = prefix.iter().chain(&cycle).find(|g| g.node_count() != n) {
            return Err(GraphError::NodeCountMismatch {
                left: n,
                right: bad.node_count(),
            });
        }
        let cycle_product = cycle[1..]
            .iter()
            .fold(first.clone(), |acc, g| acc.product_unchecked(g));
        Ok(Self {
            n,
            schedule: Schedule::PrefixCycle {
                prefix,
                cycle,
                cycle_product,
            },
        })
    }

    pub fn static_graph(g: Digraph) -> Self {
        Self::prefix_cycle(Vec::new(), vec![g]).expect("single-digraph cycle is valid")
    }

    pub fn generator<F>(n: usize, f: F) -> Result<Self, GraphError>
    where
        F: Fn(usize) -> Result<Digraph, GraphError> + Send + Sync + 'static,
    {
        Digraph::identity(n)?;
        Ok(Self {
            n,
            schedule: Schedule::Generator(Arc::new(f)),
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.schedule, Schedule::PrefixCycle { .. })
    }

    /// `(prefix length, cycle length)` for prefix/cycle schedules.
    pub fn period(&self) -> Option<(usize, usize)> {
        match &self.schedule {
            Schedule::PrefixCycle { prefix, cycle, .. } => Some((prefix.len(), cycle.len())),
            Schedule::Generator(_) => None,
        }
    }

    /// Number of window start positions that can differ: `p + L`.
    /// Any start beyond it repeats one of them.
    pub fn distinct_starts(&self) -> Option<usize> {
        self.period().map(|(p, l)| p + l)
    }

    /// The digraph delivered in round `t` (`t >= 1`).
    pub fn digraph(&self, t: usize) -> Result<Cow<'_, Digraph>, GraphError> {
        if t == 0 {
            return Err(GraphError::RoundZero(t));
        }
        match &self.schedule {
            Schedule::PrefixCycle { prefix, cycle, .. } => {
                let g = if t <= prefix.len() {
                    &prefix[t - 1]
                } else {
                    &cycle[(t - prefix.len() - 1) % cycle.len()]
                };
                Ok(Cow::Borrowed(g))
            }
            Schedule::Generator(f) => {
                let g = f(t).map_err(|e| match e {
                    e @ GraphError::Generator { .. } => e,
                    other => GraphError::Generator {
                        round: t,
                        reason: other.to_string(),
                    },
                })?;
                if g.node_count() != self.n {
                    return Err(GraphError::Generator {
                        round: t,
                        reason: format!("produced {} nodes, expected {}", g.node_count(), self.n),
                    });
                }
                Ok(Cow::Owned(g))
            }
        }
    }

    /// `G(t : t_end)`. Empty windows (`t_end < t`) give the self-loop-only digraph.
    pub fn interval_graph(&self, t: usize, t_end: usize) -> Result<Digraph, GraphError> {
        if t == 0 {
            return Err(GraphError::RoundZero(t));
        }
        let mut acc = Digraph::identity(self.n)?;
        let mut r = t;
        while r <= t_end {
            if let Some((power, rounds)) = self.aligned_cycles(r, t_end) {
                acc = acc.product_unchecked(&power);
                r += rounds;
            } else {
                acc = acc.product_unchecked(&*self.digraph(r)?);
                r += 1;
            }
        }
        Ok(acc)
    }

    /// When `r` starts a cycle and the window holds at least one whole cycle,
    /// returns the product of all whole cycles and the rounds they cover.
    fn aligned_cycles(&self, r: usize, t_end: usize) -> Option<(Digraph, usize)> {
        let Schedule::PrefixCycle {
            prefix,
            cycle,
            cycle_product,
        } = &self.schedule
        else {
            return None;
        };
        let (p, l) = (prefix.len(), cycle.len());
        if l == 1 || r <= p || !(r - p - 1).is_multiple_of(l) {
            return None;
        }
        let k = (t_end + 1 - r) / l;
        (k > 0).then(|| (power(cycle_product, k), k * l))
    }

    /// `In_i(t : t_end)`, always containing `i`.
    pub fn in_neighbors(&self, i: NodeId, t: usize, t_end: usize) -> Result<NodeSet, GraphError> {
        Ok(self.interval_graph(t, t_end)?.in_neighbors(i))
    }

    /// Restriction to `nodes`, re-indexed ascending. Prefix/cycle only.
    pub fn induced(&self, nodes: NodeSet) -> Result<DynamicGraph, GraphError> {
        match &self.schedule {
            Schedule::PrefixCycle { prefix, cycle, .. } => {
                let restrict = |gs: &[Digraph]| -> Result<Vec<Digraph>, GraphError> {
                    gs.iter().map(|g| g.induced(nodes)).collect()
                };
                DynamicGraph::prefix_cycle(restrict(prefix)?, restrict(cycle)?)
            }
            Schedule::Generator(_) => Err(GraphError::NotPeriodic),
        }
    }
}

fn power(g: &Digraph, mut k: usize) -> Digraph {
    let mut base = g.clone();
    let mut acc: Option<Digraph> = None;
    while k > 0 {
        if k & 1 == 1 {
            acc = Some(match acc {
                Some(a) => a.product_unchecked(&base),
                None => base.clone(),
            });
        }
        k >>= 1;
        if k > 0 {
            base = base.product_unchecked(&base);
        }
    }
    acc.expect("power called with k > 0")
}

impl fmt::Debug for DynamicGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.schedule {
            Schedule::PrefixCycle { prefix, cycle, .. } => f
                .debug_struct("DynamicGraph")
                .field("n", &self.n)
                .field("prefix", prefix)
                .field("cycle", cycle)
                .finish(),
            Schedule::Generator(_) => f
                .debug_struct("DynamicGraph")
                .field("n", &self.n)
                .field("schedule", &"<generator>")
                .finish(),
        }
    }
}
