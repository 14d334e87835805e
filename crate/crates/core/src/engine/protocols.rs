use serde::{Deserialize, Serialize};

use super::{EngineError, Protocol, SyncMode};
use crate::graph::NodeId;
use crate::minmax::{minmax_send, minmax_step, MinMaxMessage, MinMaxState};
use crate::sap::{
    reduce_initial, sap_fixed_step, sap_step, SapConfig, SapError, SapMessage, SapState,
    SapStepInfo,
};

/// Algorithm selector used by configurations and trace headers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "algorithm")]
pub enum Algorithm {
    MinMax,
    Sap(SapConfig),
    SapFixed { period: u64, m: u64 },
}

/// The unbounded-clock automaton.
#[derive(Clone, Copy, Debug, Default)]
pub struct MinMax;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinMaxSnapshot {
    pub h: u64,
    /// `min view[1]`; absent for an empty initial view.
    pub c: Option<u64>,
    pub clock: u64,
    pub view_size: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinMaxRecord {
    /// The step repaired an all-empty inbox.
    pub degenerate: bool,
}

impl Protocol for MinMax {
    type State = MinMaxState;
    type Message = MinMaxMessage;
    type Snapshot = MinMaxSnapshot;
    type Record = MinMaxRecord;

    fn name(&self) -> &'static str {
        "minmax"
    }

    fn sync_mode(&self) -> SyncMode {
        SyncMode::ExactIncrementing
    }

    fn normalize_initial(&self, _: NodeId, state: MinMaxState) -> Result<MinMaxState, EngineError> {
        Ok(state)
    }

    fn send(&self, state: &MinMaxState) -> MinMaxMessage {
        minmax_send(state)
    }

    fn step(
        &self,
        _: NodeId,
        state: &MinMaxState,
        inbox: &[(NodeId, &MinMaxMessage)],
    ) -> Result<(MinMaxState, MinMaxRecord), SapError> {
        let out = minmax_step(state, inbox.iter().map(|(_, m)| *m));
        Ok((
            out.state,
            MinMaxRecord {
                degenerate: out.degenerate,
            },
        ))
    }

    fn output(&self, state: &MinMaxState) -> u64 {
        state.clock_out
    }

    fn snapshot(&self, state: &MinMaxState) -> MinMaxSnapshot {
        MinMaxSnapshot {
            h: state.h,
            c: state.min_clock(),
            clock: state.clock_out,
            view_size: state.view.len(),
        }
    }

    fn restore(&self, _: &MinMaxSnapshot) -> Option<MinMaxState> {
        None
    }
}

/// The self-adaptive-period automaton.
#[derive(Clone, Debug)]
pub struct Sap {
    pub config: SapConfig,
}

impl Sap {
    pub fn new(config: SapConfig) -> Self {
        Self { config }
    }
}

impl Protocol for Sap {
    type State = SapState;
    type Message = SapMessage;
    type Snapshot = SapState;
    type Record = SapStepInfo;

    fn name(&self) -> &'static str {
        "sap"
    }

    fn sync_mode(&self) -> SyncMode {
        SyncMode::ModP(self.config.period)
    }

    fn normalize_initial(&self, node: NodeId, state: SapState) -> Result<SapState, EngineError> {
        reduce_initial(state, &self.config, node)
            .map_err(|source| EngineError::Initial { node, source })
    }

    fn send(&self, state: &SapState) -> SapMessage {
        *state
    }

    fn step(
        &self,
        _: NodeId,
        state: &SapState,
        inbox: &[(NodeId, &SapMessage)],
    ) -> Result<(SapState, SapStepInfo), SapError> {
        let received: Vec<(NodeId, SapMessage)> = inbox.iter().map(|&(j, m)| (j, *m)).collect();
        sap_step(state, &received, &self.config)
    }

    fn output(&self, state: &SapState) -> u64 {
        state.clock
    }

    fn snapshot(&self, state: &SapState) -> SapState {
        *state
    }

    fn restore(&self, snapshot: &SapState) -> Option<SapState> {
        Some(*snapshot)
    }
}

/// The fixed-period automaton: clocks modulo `P * M`, state is the clock.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SapFixed {
    pub period: u64,
    pub m: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedStepInfo {
    pub j_min: Option<NodeId>,
}

impl SapFixed {
    pub fn new(period: u64, m: u64) -> Result<Self, SapError> {
        if period == 0 {
            return Err(SapError::ZeroPeriod);
        }
        if m == 0 {
            return Err(SapError::ZeroPeriodFactor(NodeId(0)));
        }
        period
            .checked_mul(m)
            .ok_or(SapError::Overflow("period product"))?;
        Ok(Self { period, m })
    }

    pub fn modulus(&self) -> u64 {
        self.period * self.m
    }
}

impl Protocol for SapFixed {
    type State = u64;
    type Message = u64;
    type Snapshot = u64;
    type Record = FixedStepInfo;

    fn name(&self) -> &'static str {
        "sap-fixed"
    }

    fn sync_mode(&self) -> SyncMode {
        SyncMode::ModP(self.period)
    }

    fn normalize_initial(&self, _: NodeId, clock: u64) -> Result<u64, EngineError> {
        Ok(clock % self.modulus())
    }

    fn send(&self, clock: &u64) -> u64 {
        *clock
    }

    fn step(
        &self,
        _: NodeId,
        _: &u64,
        inbox: &[(NodeId, &u64)],
    ) -> Result<(u64, FixedStepInfo), SapError> {
        let clocks: Vec<u64> = inbox.iter().map(|(_, c)| **c).collect();
        let clock = sap_fixed_step(&clocks, self.period, self.m)?;
        let j_min = inbox.iter().min_by_key(|(j, c)| (**c, *j)).map(|(j, _)| *j);
        Ok((clock, FixedStepInfo { j_min }))
    }

    fn output(&self, clock: &u64) -> u64 {
        *clock
    }

    fn snapshot(&self, clock: &u64) -> u64 {
        *clock
    }

    fn restore(&self, clock: &u64) -> Option<u64> {
        Some(*clock)
    }
}
