//! Quantities measured from traces rather than predicted.

use serde::{Deserialize, Serialize};

use super::{EngineError, MinMax, Sap, SapFixed, Trace};
use crate::graph::{Digraph, NodeId, NodeSet};
use crate::sap::GrowthFunction;

/// Uniform view of a periodic-clock trace. Fixed-period traces appear with a
/// constant period factor and constant growth.
#[derive(Clone, Debug)]
pub struct SapHistory {
    pub period: u64,
    pub growth: GrowthFunction,
    /// `clocks[t][i]`, `t` in `0..=rounds`.
    pub clocks: Vec<Vec<u64>>,
    pub factors: Vec<Vec<u64>>,
    /// Growth applied at round `t` (row 0 all false).
    pub g_fired: Vec<Vec<bool>>,
    pub j_min: Vec<Vec<Option<NodeId>>>,
    /// `graphs[t - 1] = G(t)`.
    pub graphs: Vec<Digraph>,
}

impl SapHistory {
    pub fn rounds(&self) -> usize {
        self.clocks.len() - 1
    }

    pub fn n(&self) -> usize {
        self.clocks[0].len()
    }

    pub fn digraph(&self, t: usize) -> &Digraph {
        &self.graphs[t - 1]
    }

    /// All clocks congruent modulo `P` at round `t`.
    pub fn synchronized_at(&self, t: usize) -> bool {
        let row = &self.clocks[t];
        row.iter().all(|c| c % self.period == row[0] % self.period)
    }

    /// Largest clock value anywhere in the history.
    pub fn max_clock(&self) -> u64 {
        self.clocks.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Distinct clock values visited by each node, round 0 included.
    pub fn distinct_states(&self) -> Vec<usize> {
        (0..self.n())
            .map(|i| {
                let mut seen: Vec<u64> = self.clocks.iter().map(|row| row[i]).collect();
                seen.sort_unstable();
                seen.dedup();
                seen.len()
            })
            .collect()
    }
}

impl SapHistory {
    pub fn from_sap(trace: &Trace<Sap>, protocol: &Sap) -> Self {
        SapHistory {
            period: protocol.config.period,
            growth: protocol.config.growth.clone(),
            clocks: trace.outputs.clone(),
            factors: trace
                .snapshots
                .iter()
                .map(|r| r.iter().map(|s| s.period_factor).collect())
                .collect(),
            g_fired: trace
                .records
                .iter()
                .map(|r| r.iter().map(|x| x.g_fired).collect())
                .collect(),
            j_min: trace
                .records
                .iter()
                .map(|r| r.iter().map(|x| x.j_min).collect())
                .collect(),
            graphs: trace.graphs.clone(),
        }
    }

    pub fn from_fixed(trace: &Trace<SapFixed>, protocol: &SapFixed) -> Self {
        let p = protocol.period;
        let n = trace.n;
        let g_fired = std::iter::once(vec![false; n])
            .chain((1..=trace.rounds()).map(|t| {
                let prev = &trace.outputs[t - 1];
                (0..n)
                    .map(|i| {
                        let ins = trace.digraph(t).in_neighbors(NodeId(i));
                        let first = ins.first().expect("self-loop");
                        ins.iter()
                            .any(|j| prev[j.index()] % p != prev[first.index()] % p)
                    })
                    .collect()
            }))
            .collect();
        SapHistory {
            period: p,
            growth: GrowthFunction::Constant(protocol.m),
            clocks: trace.outputs.clone(),
            factors: vec![vec![protocol.m; n]; trace.outputs.len()],
            g_fired,
            j_min: trace
                .records
                .iter()
                .map(|r| r.iter().map(|x| x.j_min).collect())
                .collect(),
            graphs: trace.graphs.clone(),
        }
    }
}

/// Settling of the min-clocks `c_i(t) - t` in a MinMax trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSettling {
    /// Start of each node's final constant run of `c_i(t) - t`.
    pub settle_rounds: Vec<usize>,
    pub r0: usize,
    pub s0: usize,
    /// `delta * (n - |K|)`.
    pub reach: usize,
    /// `max(r0, s0 - 1) + 1 + reach`.
    pub t0: usize,
    /// `c_j(t) - t` for each kernel node `j`, read at `t0`.
    pub kernel_constants: Vec<(NodeId, i64)>,
}

impl KernelSettling {
    /// The common kernel constant, if all kernel nodes agree.
    pub fn c0(&self) -> Option<i64> {
        let first = self.kernel_constants.first()?.1;
        self.kernel_constants
            .iter()
            .all(|&(_, c)| c == first)
            .then_some(first)
    }
}

/// Measures `r_i`, `t0` and the kernel constant from a MinMax trace.
///
/// `s0` is the round from which the kernel reaches every node within
/// `delta * (n - |K|)` rounds (the first round after the prefix on
/// prefix/cycle schedules).
pub fn measure_s0_t0(
    trace: &Trace<MinMax>,
    kernel: NodeSet,
    delta: usize,
    s0: usize,
) -> Result<KernelSettling, EngineError> {
    if kernel.is_empty() {
        return Err(EngineError::Invalid("kernel must be non-empty".into()));
    }
    let end = trace.rounds();
    let offset = |t: usize, i: usize| -> Option<i64> {
        trace.snapshots[t][i].c.map(|c| c as i64 - t as i64)
    };
    let mut settle_rounds = Vec::with_capacity(trace.n);
    for i in 0..trace.n {
        let last = offset(end, i).expect("views are non-empty after a step");
        let mut r = end;
        while r > 0 && offset(r - 1, i) == Some(last) {
            r -= 1;
        }
        if r >= end {
            return Err(EngineError::HorizonTooShort(format!(
                "c_{i}(t) - t still changing at round {end}"
            )));
        }
        settle_rounds.push(r);
    }
    let r0 = *settle_rounds.iter().max().expect("n >= 1");
    let reach = delta * (trace.n - kernel.len());
    let t0 = r0.max(s0.saturating_sub(1)) + 1 + reach;
    if t0 > end {
        return Err(EngineError::HorizonTooShort(format!(
            "t0 = {t0} lies beyond the last round {end}"
        )));
    }
    let kernel_constants = kernel
        .iter()
        .map(|j| (j, offset(t0, j.index()).expect("stepped view")))
        .collect();
    Ok(KernelSettling {
        settle_rounds,
        r0,
        s0,
        reach,
        t0,
        kernel_constants,
    })
}

/// Center-relative quantities of a periodic-clock trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZMetrics {
    /// Least round from which all center clocks are equal and all center
    /// period factors equal `m_z`, through the end of the trace.
    pub t0: usize,
    pub m_z: u64,
    /// Indexed by round; `None` before `t0`.
    pub common_clock: Vec<Option<u64>>,
    pub s_z: Vec<Option<NodeSet>>,
    /// Smallest factor among nodes outside `S_Z(t)`; `None` when `S_Z(t) = V`
    /// or before `t0`.
    pub m_tilde: Vec<Option<u64>>,
}

pub fn z_metrics(h: &SapHistory, z: NodeSet) -> Result<ZMetrics, EngineError> {
    let first = z
        .first()
        .ok_or_else(|| EngineError::Invalid("center must be non-empty".into()))?
        .index();
    let end = h.rounds();
    let m_z = h.factors[end][first];
    let stable = |t: usize| {
        z.iter()
            .all(|k| h.clocks[t][k.index()] == h.clocks[t][first] && h.factors[t][k.index()] == m_z)
    };
    if end == 0 || !stable(end) {
        return Err(EngineError::CenterNotSynchronized);
    }
    let mut t0 = end;
    while t0 > 1 && stable(t0 - 1) {
        t0 -= 1;
    }
    let n = h.n();
    let mut common_clock = vec![None; end + 1];
    let mut s_z = vec![None; end + 1];
    let mut m_tilde = vec![None; end + 1];
    for t in t0..=end {
        let c = h.clocks[t][first];
        let synced: NodeSet = (0..n)
            .filter(|&i| h.clocks[t][i] % h.period == c % h.period)
            .map(NodeId)
            .collect();
        common_clock[t] = Some(c);
        m_tilde[t] = (0..n)
            .filter(|&i| !synced.contains(NodeId(i)))
            .map(|i| h.factors[t][i])
            .min();
        s_z[t] = Some(synced);
    }
    Ok(ZMetrics {
        t0,
        m_z,
        common_clock,
        s_z,
        m_tilde,
    })
}
