//! Deterministic synchronous-round executor.
//!
//! Round `t` sends from the round `t-1` states, delivers along `G(t)` and
//! applies every node's transition. Traces keep one snapshot per node and
//! round (index 0 is the normalized initial state) plus the delivered
//! digraphs.

mod metrics;
mod protocols;
mod record;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Digraph, DynamicGraph, GraphError, NodeId};
use crate::sap::SapError;

pub use metrics::{measure_s0_t0, z_metrics, KernelSettling, SapHistory, ZMetrics};
pub use protocols::{
    Algorithm, FixedStepInfo, MinMax, MinMaxRecord, MinMaxSnapshot, Sap, SapFixed,
};
pub use record::{trace_jsonl, RoundRecord, TraceHeader};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("initial state vector has {init} entries for {graph} nodes")]
    NodeCountMismatch { graph: usize, init: usize },
    #[error("round {round}: {source}")]
    Schedule { round: usize, source: GraphError },
    #[error("round {round}, node {node}: {source}")]
    Step {
        round: usize,
        node: NodeId,
        source: SapError,
    },
    #[error("initial state of node {node}: {source}")]
    Initial { node: NodeId, source: SapError },
    #[error("horizon too short: {0}")]
    HorizonTooShort(String),
    #[error("center never synchronizes internally within the horizon")]
    CenterNotSynchronized,
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// A node automaton run by the engine.
pub trait Protocol: Sync {
    type State: Clone + Debug + PartialEq + Send + Sync + Serialize;
    type Message: Send + Sync;
    /// Per-round observable summary of a state.
    type Snapshot: Clone + Debug + PartialEq + Serialize;
    /// Per-round step details (flags, choices).
    type Record: Clone + Copy + Debug + Default + PartialEq + Serialize;

    fn name(&self) -> &'static str;
    fn sync_mode(&self) -> SyncMode;
    fn normalize_initial(
        &self,
        node: NodeId,
        state: Self::State,
    ) -> Result<Self::State, EngineError>;
    fn send(&self, state: &Self::State) -> Self::Message;
    fn step(
        &self,
        node: NodeId,
        state: &Self::State,
        inbox: &[(NodeId, &Self::Message)],
    ) -> Result<(Self::State, Self::Record), SapError>;
    /// Output clock `C_i`.
    fn output(&self, state: &Self::State) -> u64;
    fn snapshot(&self, state: &Self::State) -> Self::Snapshot;
    /// Rebuilds a full state from its snapshot when the snapshot is lossless.
    fn restore(&self, snapshot: &Self::Snapshot) -> Option<Self::State>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "period")]
pub enum SyncMode {
    /// All output clocks equal and advancing by exactly one per round.
    ExactIncrementing,
    /// All output clocks congruent modulo `P`.
    ModP(u64),
}

impl SyncMode {
    /// Default confirmation window for early stopping.
    pub fn default_window(self) -> usize {
        match self {
            SyncMode::ExactIncrementing => 3,
            SyncMode::ModP(p) => 2 * p as usize,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "round")]
pub enum SyncStatus {
    SynchronizedAt(usize),
    NotWithinHorizon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncVerdict {
    pub status: SyncStatus,
    pub mode: SyncMode,
}

impl SyncVerdict {
    pub fn round(&self) -> Option<usize> {
        match self.status {
            SyncStatus::SynchronizedAt(t) => Some(t),
            SyncStatus::NotWithinHorizon => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub horizon: usize,
    /// Stop once the predicate has held for this many rounds past the start
    /// of its current streak. `None` runs the full horizon.
    pub early_stop: Option<usize>,
    /// Keep full per-round states (needed for view-level checks on MinMax).
    pub keep_states: bool,
}

impl RunOptions {
    pub fn full(horizon: usize) -> Self {
        Self {
            horizon,
            early_stop: None,
            keep_states: false,
        }
    }

    pub fn early(horizon: usize, window: usize) -> Self {
        Self {
            horizon,
            early_stop: Some(window),
            keep_states: false,
        }
    }

    pub fn keeping_states(mut self) -> Self {
        self.keep_states = true;
        self
    }
}

pub struct Trace<P: Protocol> {
    pub n: usize,
    pub mode: SyncMode,
    /// `snapshots[t][i]` for `t` in `0..=rounds()`.
    pub snapshots: Vec<Vec<P::Snapshot>>,
    /// `records[t][i]`; row 0 is all defaults.
    pub records: Vec<Vec<P::Record>>,
    /// `outputs[t][i] = C_i(t)`.
    pub outputs: Vec<Vec<u64>>,
    /// `graphs[t - 1] = G(t)`.
    pub graphs: Vec<Digraph>,
    /// Full states per round when requested.
    pub states: Option<Vec<Vec<P::State>>>,
    pub final_states: Vec<P::State>,
}

impl<P: Protocol> Trace<P> {
    pub fn rounds(&self) -> usize {
        self.outputs.len() - 1
    }

    /// `G(t)` as delivered, `t >= 1`.
    pub fn digraph(&self, t: usize) -> &Digraph {
        &self.graphs[t - 1]
    }

    /// `G(s : t)` from the recorded digraphs (identity when `t < s`).
    pub fn interval_graph(&self, s: usize, t: usize) -> Digraph {
        let mut acc = Digraph::identity(self.n).expect("trace node count is valid");
        for r in s..=t {
            acc = acc.product_unchecked(self.digraph(r));
        }
        acc
    }

    pub fn verdict(&self) -> SyncVerdict {
        detect_sync(&self.outputs, self.mode)
    }
}

/// Executes `protocol` on `dg` from `init`.
pub fn run<P: Protocol>(
    protocol: &P,
    dg: &DynamicGraph,
    init: Vec<P::State>,
    opts: RunOptions,
) -> Result<Trace<P>, EngineError> {
    if opts.horizon == 0 {
        return Err(EngineError::ZeroHorizon);
    }
    let n = dg.node_count();
    if init.len() != n {
        return Err(EngineError::NodeCountMismatch {
            graph: n,
            init: init.len(),
        });
    }
    let mode = protocol.sync_mode();
    let mut current: Vec<P::State> = init
        .into_iter()
        .enumerate()
        .map(|(i, s)| protocol.normalize_initial(NodeId(i), s))
        .collect::<Result<_, _>>()?;

    let mut trace = Trace::<P> {
        n,
        mode,
        snapshots: vec![current.iter().map(|s| protocol.snapshot(s)).collect()],
        records: vec![vec![P::Record::default(); n]],
        outputs: vec![current.iter().map(|s| protocol.output(s)).collect()],
        graphs: Vec::new(),
        states: opts.keep_states.then(|| vec![current.clone()]),
        final_states: Vec::new(),
    };
    let mut streak = SyncStreak::new(mode);

    for t in 1..=opts.horizon {
        let g = dg
            .digraph(t)
            .map_err(|source| EngineError::Schedule { round: t, source })?
            .into_owned();
        let (next, recs) = step_round(protocol, &g, &current, t)?;
        current = next;
        let out: Vec<u64> = current.iter().map(|s| protocol.output(s)).collect();
        let held_since = streak.observe(t, &out);
        trace
            .snapshots
            .push(current.iter().map(|s| protocol.snapshot(s)).collect());
        trace.records.push(recs);
        trace.outputs.push(out);
        trace.graphs.push(g);
        if let Some(states) = trace.states.as_mut() {
            states.push(current.clone());
        }
        if let (Some(w), Some(s)) = (opts.early_stop, held_since) {
            if t - s >= w {
                break;
            }
        }
    }
    trace.final_states = current;
    Ok(trace)
}

/// New states and step records of one round.
pub type RoundResult<P> = (Vec<<P as Protocol>::State>, Vec<<P as Protocol>::Record>);

/// One communication-closed round: every message is produced from `prev`.
pub fn step_round<P: Protocol>(
    protocol: &P,
    g: &Digraph,
    prev: &[P::State],
    round: usize,
) -> Result<RoundResult<P>, EngineError> {
    let messages: Vec<P::Message> = prev.iter().map(|s| protocol.send(s)).collect();
    let mut states = Vec::with_capacity(prev.len());
    let mut records = Vec::with_capacity(prev.len());
    for (i, state) in prev.iter().enumerate() {
        let node = NodeId(i);
        let inbox: Vec<(NodeId, &P::Message)> = g
            .in_neighbors(node)
            .iter()
            .map(|j| (j, &messages[j.index()]))
            .collect();
        let (s, r) = protocol
            .step(node, state, &inbox)
            .map_err(|source| EngineError::Step {
                round,
                node,
                source,
            })?;
        states.push(s);
        records.push(r);
    }
    Ok((states, records))
}

/// Recomputes every round from the stored previous round and compares.
/// Returns the first mismatching round.
pub fn replay_check<P: Protocol>(
    protocol: &P,
    trace: &Trace<P>,
) -> Result<Option<usize>, EngineError> {
    let states: Vec<Vec<P::State>> = match &trace.states {
        Some(s) => s.clone(),
        None => {
            let restored: Option<Vec<Vec<P::State>>> = trace
                .snapshots
                .iter()
                .map(|row| row.iter().map(|s| protocol.restore(s)).collect())
                .collect();
            restored
                .ok_or_else(|| EngineError::Invalid("trace lacks full states for replay".into()))?
        }
    };
    for t in 1..=trace.rounds() {
        let (next, recs) = step_round(protocol, trace.digraph(t), &states[t - 1], t)?;
        if next != states[t] || recs != trace.records[t] {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

fn all_congruent(out: &[u64], p: u64) -> bool {
    out.iter().all(|c| c % p == out[0] % p)
}

fn all_equal(out: &[u64]) -> bool {
    out.iter().all(|&c| c == out[0])
}

fn advanced_by_one(prev: &[u64], out: &[u64]) -> bool {
    prev.iter()
        .zip(out)
        .all(|(a, b)| a.checked_add(1) == Some(*b))
}

/// Tracks the current run of rounds satisfying the sync predicate.
struct SyncStreak {
    mode: SyncMode,
    start: Option<usize>,
    prev: Option<Vec<u64>>,
}

impl SyncStreak {
    fn new(mode: SyncMode) -> Self {
        Self {
            mode,
            start: None,
            prev: None,
        }
    }

    fn observe(&mut self, t: usize, out: &[u64]) -> Option<usize> {
        let holds = match self.mode {
            SyncMode::ModP(p) => all_congruent(out, p),
            SyncMode::ExactIncrementing => all_equal(out),
        };
        self.start = if !holds {
            None
        } else {
            let continues = match (self.mode, self.start, &self.prev) {
                (SyncMode::ModP(_), Some(_), _) => true,
                (SyncMode::ExactIncrementing, Some(_), Some(prev)) => advanced_by_one(prev, out),
                _ => false,
            };
            if continues {
                self.start
            } else {
                Some(t)
            }
        };
        self.prev = Some(out.to_vec());
        self.start
    }
}

/// Earliest round `s >= 1` from which the predicate holds through the end of
/// the recorded outputs.
pub fn detect_sync(outputs: &[Vec<u64>], mode: SyncMode) -> SyncVerdict {
    let mut streak = SyncStreak::new(mode);
    let mut start = None;
    for (t, out) in outputs.iter().enumerate().skip(1) {
        start = streak.observe(t, out);
    }
    SyncVerdict {
        status: match start {
            Some(s) => SyncStatus::SynchronizedAt(s),
            None => SyncStatus::NotWithinHorizon,
        },
        mode,
    }
}
