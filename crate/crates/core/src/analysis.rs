//! Connectivity characteristics of dynamic graphs.
//!
//! Exact answers need a prefix/cycle schedule: every window starting after
//! the prefix repeats one of the `L` cycle phases, so quantifying over all
//! rounds reduces to the `p + L` distinct window starts. Generator schedules
//! only get the capped estimates at the bottom of this module.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{step_set, Digraph, DynamicGraph, GraphError, NodeId, NodeSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("exact analysis needs a prefix/cycle schedule")]
    NotPeriodic,
    #[error("precondition failed: schedule is not rooted with delay {delta}")]
    NotRootedWithDelay { delta: usize },
    #[error("delay must be positive")]
    ZeroDelay,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Eccentricity of a node: the least window length after which it reaches
/// every node from every start round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Eccentricity {
    Finite(usize),
    Infinite,
    /// Capped search on a generator schedule did not find a witness `<= cap`.
    ExceedsCap(usize),
}

impl Eccentricity {
    pub fn finite(self) -> Option<usize> {
        match self {
            Eccentricity::Finite(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Eccentricity::Finite(_))
    }

    fn rank(self) -> (u8, usize) {
        match self {
            Eccentricity::Finite(d) => (0, d),
            Eccentricity::ExceedsCap(c) => (1, c),
            Eccentricity::Infinite => (2, 0),
        }
    }
}

impl PartialOrd for Eccentricity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Eccentricity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for Eccentricity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eccentricity::Finite(d) => write!(f, "{d}"),
            Eccentricity::Infinite => write!(f, "inf"),
            Eccentricity::ExceedsCap(c) => write!(f, ">{c}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformRooting {
    pub delay: usize,
    pub roots: NodeSet,
}

/// Connectivity classes of a prefix/cycle schedule, each with its least
/// witnessing delay (searched up to the caller's cap).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityClass {
    pub rooted_with_delay: Option<usize>,
    pub uniformly_rooted: Option<UniformRooting>,
    /// Least delay whose windows are all complete digraphs.
    pub strongly_connected_with_delay: Option<usize>,
    pub center: NodeSet,
    pub kernel: NodeSet,
    pub radius: Eccentricity,
    pub diameter: Eccentricity,
    pub eccentricities: Vec<Eccentricity>,
}

fn periodic(dg: &DynamicGraph) -> Result<(usize, usize), AnalysisError> {
    dg.period().ok_or(AnalysisError::NotPeriodic)
}

/// Rounds needed, starting at round `t` from `start`, until every node is
/// reached. `None` when the reached set settles on a proper subset: it has
/// stayed unchanged for a whole cycle inside the periodic part.
fn rounds_to_cover(dg: &DynamicGraph, start: u64, t: usize) -> Result<Option<usize>, GraphError> {
    let (p, l) = dg.period().ok_or(GraphError::NotPeriodic)?;
    let full = NodeSet::full(dg.node_count()).bits();
    let mut set = start;
    let mut stable = 0;
    let mut r = t;
    loop {
        let next = step_set(set, dg.digraph(r)?.rows());
        if next == full {
            return Ok(Some(r - t + 1));
        }
        if r > p {
            stable = if next == set { stable + 1 } else { 0 };
            if stable >= l {
                return Ok(None);
            }
        }
        set = next;
        r += 1;
    }
}

/// Exact eccentricity of `i` on a prefix/cycle schedule.
pub fn eccentricity(dg: &DynamicGraph, i: NodeId) -> Result<Eccentricity, AnalysisError> {
    let (p, l) = periodic(dg)?;
    let mut worst = 0;
    for t in 1..=p + l {
        match rounds_to_cover(dg, NodeSet::singleton(i).bits(), t)? {
            Some(d) => worst = worst.max(d),
            None => return Ok(Eccentricity::Infinite),
        }
    }
    Ok(Eccentricity::Finite(worst))
}

/// Center: nodes with finite eccentricity.
pub fn center(dg: &DynamicGraph) -> Result<NodeSet, AnalysisError> {
    let mut z = NodeSet::EMPTY;
    for i in (0..dg.node_count()).map(NodeId) {
        if eccentricity(dg, i)?.is_finite() {
            z.insert(i);
        }
    }
    Ok(z)
}

/// Kernel: nodes that, from every start round, eventually reach every node.
///
/// Computed per cycle phase as the fixpoint of repeated whole-cycle window
/// products; starts inside the prefix add nothing because a node idles on
/// its self-loop until the cycle begins.
pub fn kernel(dg: &DynamicGraph) -> Result<NodeSet, AnalysisError> {
    let (p, l) = periodic(dg)?;
    let n = dg.node_count();
    let full = NodeSet::full(n).bits();
    let rotations: Vec<Digraph> = (0..l)
        .map(|phase| dg.interval_graph(p + 1 + phase, p + phase + l))
        .collect::<Result<_, _>>()?;
    let mut k = NodeSet::EMPTY;
    'node: for i in 0..n {
        for rot in &rotations {
            let mut set = 1u64 << i;
            loop {
                let next = step_set(set, rot.rows());
                if next == set {
                    break;
                }
                set = next;
            }
            if set != full {
                continue 'node;
            }
        }
        k.insert(NodeId(i));
    }
    Ok(k)
}

/// Window digraphs `G(t : t+delta-1)` for every distinct start.
pub fn windows(dg: &DynamicGraph, delta: usize) -> Result<Vec<Digraph>, AnalysisError> {
    if delta == 0 {
        return Err(AnalysisError::ZeroDelay);
    }
    let (p, l) = periodic(dg)?;
    (1..=p + l)
        .map(|t| dg.interval_graph(t, t + delta - 1).map_err(Into::into))
        .collect()
}

pub fn is_rooted_with_delay(dg: &DynamicGraph, delta: usize) -> Result<bool, AnalysisError> {
    Ok(windows(dg, delta)?.iter().all(Digraph::is_rooted))
}

/// The common root set if every window of length `delta` has the same
/// non-empty root set.
pub fn uniform_roots(dg: &DynamicGraph, delta: usize) -> Result<Option<NodeSet>, AnalysisError> {
    let ws = windows(dg, delta)?;
    let first = ws[0].roots();
    Ok((!first.is_empty() && ws.iter().all(|w| w.roots() == first)).then_some(first))
}

pub fn classify(dg: &DynamicGraph, delta_cap: usize) -> Result<ConnectivityClass, AnalysisError> {
    periodic(dg)?;
    let mut rooted = None;
    let mut uniform = None;
    let mut strong = None;
    for delta in 1..=delta_cap {
        let ws = windows(dg, delta)?;
        let roots: Vec<NodeSet> = ws.iter().map(Digraph::roots).collect();
        if rooted.is_none() && roots.iter().all(|r| !r.is_empty()) {
            rooted = Some(delta);
        }
        if uniform.is_none() && !roots[0].is_empty() && roots.iter().all(|r| *r == roots[0]) {
            uniform = Some(UniformRooting {
                delay: delta,
                roots: roots[0],
            });
        }
        if strong.is_none() && ws.iter().all(Digraph::is_complete) {
            strong = Some(delta);
        }
        if rooted.is_some() && uniform.is_some() && strong.is_some() {
            break;
        }
    }
    let eccentricities: Vec<Eccentricity> = (0..dg.node_count())
        .map(|i| eccentricity(dg, NodeId(i)))
        .collect::<Result<_, _>>()?;
    let center = eccentricities
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_finite())
        .map(|(i, _)| NodeId(i))
        .collect();
    Ok(ConnectivityClass {
        rooted_with_delay: rooted,
        uniformly_rooted: uniform,
        strongly_connected_with_delay: strong,
        center,
        kernel: kernel(dg)?,
        radius: *eccentricities.iter().min().expect("n >= 1"),
        diameter: *eccentricities.iter().max().expect("n >= 1"),
        eccentricities,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReachVerdict {
    pub kernel: NodeSet,
    pub s0: usize,
    /// `delta * (n - |K|)`; the checked window is `[t, t + reach]`.
    pub reach: usize,
    pub windows_checked: usize,
    /// First window start and node whose in-neighbourhood misses the kernel.
    pub counterexample: Option<(usize, NodeId)>,
}

impl KernelReachVerdict {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks that from every round `t` in `[s0, horizon]` every node hears from
/// the kernel within `delta * (n - |K|) + 1` rounds, with `s0` taken as the
/// first round after the prefix.
pub fn kernel_reach_bound_check(
    dg: &DynamicGraph,
    delta: usize,
    horizon: usize,
) -> Result<KernelReachVerdict, AnalysisError> {
    let (p, _) = periodic(dg)?;
    if !is_rooted_with_delay(dg, delta)? {
        return Err(AnalysisError::NotRootedWithDelay { delta });
    }
    let k = kernel(dg)?;
    let n = dg.node_count();
    let reach = delta * (n - k.len());
    let s0 = p + 1;
    let mut verdict = KernelReachVerdict {
        kernel: k,
        s0,
        reach,
        windows_checked: 0,
        counterexample: None,
    };
    for t in s0..=horizon {
        let w = dg.interval_graph(t, t + reach)?;
        verdict.windows_checked += 1;
        if let Some(i) = (0..n)
            .map(NodeId)
            .find(|&i| w.in_neighbors(i).intersection(k).is_empty())
        {
            verdict.counterexample = Some((t, i));
            break;
        }
    }
    Ok(verdict)
}

/// Capped eccentricity for any schedule: window starts `1..=starts`, window
/// lengths up to `cap`. Advisory only on generator schedules.
pub fn capped_eccentricity(
    dg: &DynamicGraph,
    i: NodeId,
    starts: usize,
    cap: usize,
) -> Result<Eccentricity, GraphError> {
    let mut worst = 0;
    for t in 1..=starts {
        match capped_cover(dg, NodeSet::singleton(i).bits(), t, cap)? {
            Some(d) => worst = worst.max(d),
            None => return Ok(Eccentricity::ExceedsCap(cap)),
        }
    }
    Ok(Eccentricity::Finite(worst))
}

/// Capped kernel estimate: nodes reaching everyone within `lookahead` rounds
/// from each start in `1..=starts`.
pub fn capped_kernel(
    dg: &DynamicGraph,
    starts: usize,
    lookahead: usize,
) -> Result<NodeSet, GraphError> {
    let mut k = NodeSet::EMPTY;
    'node: for i in (0..dg.node_count()).map(NodeId) {
        for t in 1..=starts {
            if capped_cover(dg, NodeSet::singleton(i).bits(), t, lookahead)?.is_none() {
                continue 'node;
            }
        }
        k.insert(i);
    }
    Ok(k)
}

fn capped_cover(
    dg: &DynamicGraph,
    start: u64,
    t: usize,
    cap: usize,
) -> Result<Option<usize>, GraphError> {
    let full = NodeSet::full(dg.node_count()).bits();
    let mut set = start;
    for d in 1..=cap {
        set = step_set(set, dg.digraph(t + d - 1)?.rows());
        if set == full {
            return Ok(Some(d));
        }
    }
    Ok(None)
}
