//! Finite-state periodic clocks with a self-adaptive period.
//!
//! Each node counts modulo `P * M_i` and enlarges `M_i` through the growth
//! function whenever it hears clocks that disagree modulo `P`. The
//! fixed-period variant keeps `M` constant.

mod bounds;
mod growth;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::NodeId;

pub use bounds::{
    fixed_memory_bound, sap_memory_bound, strong_bound, uniform_table_bound, uniform_trace_bound,
    BoundError, UniformTraceBound,
};
pub use growth::{GStar, GrowthFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SapError {
    #[error("period P must be positive")]
    ZeroPeriod,
    #[error("period factor must be positive (node {0})")]
    ZeroPeriodFactor(NodeId),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("growth table must be non-empty and non-decreasing")]
    BadGrowthTable,
    #[error("unrecognised growth function `{0}`")]
    BadGrowthSpec(String),
    #[error("empty inbox (self-loop missing)")]
    EmptyInbox,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SapState {
    pub clock: u64,
    pub period_factor: u64,
}

impl SapState {
    pub fn new(clock: u64, period_factor: u64) -> Self {
        Self {
            clock,
            period_factor,
        }
    }
}

/// Broadcast payload: a snapshot of the sender's state.
pub type SapMessage = SapState;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SapConfig {
    pub period: u64,
    pub growth: GrowthFunction,
}

impl SapConfig {
    pub fn new(period: u64, growth: GrowthFunction) -> Result<Self, SapError> {
        if period == 0 {
            return Err(SapError::ZeroPeriod);
        }
        Ok(Self { period, growth })
    }

    /// `P * m`, checked.
    pub fn modulus(&self, m: u64) -> Result<u64, SapError> {
        self.period
            .checked_mul(m)
            .ok_or(SapError::Overflow("period product"))
    }
}

/// Per-step details kept in traces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SapStepInfo {
    /// The growth function was applied this step.
    pub g_fired: bool,
    /// In-neighbour holding the smallest received clock (lowest id on ties).
    pub j_min: Option<NodeId>,
}

/// Brings an arbitrary initial clock into `[0, P * M)`.
pub fn reduce_initial(
    state: SapState,
    cfg: &SapConfig,
    node: NodeId,
) -> Result<SapState, SapError> {
    if state.period_factor == 0 {
        return Err(SapError::ZeroPeriodFactor(node));
    }
    Ok(SapState {
        clock: state.clock % cfg.modulus(state.period_factor)?,
        ..state
    })
}

/// One transition: clock from the old factor, then max factor, then growth
/// on mod-`P` disagreement among the received clocks.
pub fn sap_step(
    state: &SapState,
    received: &[(NodeId, SapMessage)],
    cfg: &SapConfig,
) -> Result<(SapState, SapStepInfo), SapError> {
    let &(j_min, min_msg) = received
        .iter()
        .min_by_key(|(j, m)| (m.clock, *j))
        .ok_or(SapError::EmptyInbox)?;
    let modulus = cfg.modulus(state.period_factor)?;
    let clock = min_msg
        .clock
        .checked_add(1)
        .ok_or(SapError::Overflow("clock"))?
        % modulus;
    let mut period_factor = received
        .iter()
        .map(|(_, m)| m.period_factor)
        .max()
        .expect("inbox is non-empty");
    let residue = min_msg.clock % cfg.period;
    let g_fired = received
        .iter()
        .any(|(_, m)| m.clock % cfg.period != residue);
    if g_fired {
        period_factor = cfg.growth.apply(period_factor)?;
    }
    Ok((
        SapState {
            clock,
            period_factor,
        },
        SapStepInfo {
            g_fired,
            j_min: Some(j_min),
        },
    ))
}

/// Fixed-period transition: `(min + 1) mod P*M`.
pub fn sap_fixed_step(received_clocks: &[u64], period: u64, m: u64) -> Result<u64, SapError> {
    let min = received_clocks.iter().min().ok_or(SapError::EmptyInbox)?;
    let modulus = period
        .checked_mul(m)
        .ok_or(SapError::Overflow("period product"))?;
    Ok((min + 1) % modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msgs(pairs: &[(u64, u64)]) -> Vec<(NodeId, SapMessage)> {
        pairs
            .iter()
            .enumerate()
            .map(|(j, &(c, m))| (NodeId(j), SapState::new(c, m)))
            .collect()
    }

    #[test]
    fn discordant_step_applies_growth() {
        let cfg = SapConfig::new(4, GrowthFunction::Successor).unwrap();
        let (s, info) = sap_step(&SapState::new(3, 2), &msgs(&[(3, 2), (6, 2)]), &cfg).unwrap();
        assert_eq!(s, SapState::new(4, 3));
        assert!(info.g_fired);
        assert_eq!(info.j_min, Some(NodeId(0)));
    }

    #[test]
    fn clocks_congruent_mod_p_do_not_trigger_growth() {
        // 3 and 7 agree modulo 4.
        let cfg = SapConfig::new(4, GrowthFunction::Successor).unwrap();
        let (s, info) = sap_step(&SapState::new(3, 2), &msgs(&[(3, 2), (7, 2)]), &cfg).unwrap();
        assert_eq!(s, SapState::new(4, 2));
        assert!(!info.g_fired);
    }

    #[test]
    fn concordant_step_keeps_factor() {
        let cfg = SapConfig::new(3, GrowthFunction::Affine).unwrap();
        let (s, info) = sap_step(&SapState::new(5, 4), &msgs(&[(5, 4), (5, 4)]), &cfg).unwrap();
        assert_eq!(s, SapState::new(6, 4));
        assert!(!info.g_fired);
    }

    #[test]
    fn wrap_to_zero() {
        let cfg = SapConfig::new(2, GrowthFunction::Successor).unwrap();
        let (s, _) = sap_step(&SapState::new(5, 3), &msgs(&[(5, 3), (5, 3)]), &cfg).unwrap();
        assert_eq!(s.clock, 0);
    }

    #[test]
    fn old_factor_sets_modulus() {
        // Neighbour brings a larger factor; the clock still wraps at P * old M.
        let cfg = SapConfig::new(2, GrowthFunction::Constant(9)).unwrap();
        let (s, _) = sap_step(&SapState::new(3, 2), &msgs(&[(3, 2), (5, 9)]), &cfg).unwrap();
        assert_eq!(s, SapState::new(0, 9));
    }

    #[test]
    fn ties_pick_lowest_id() {
        let cfg = SapConfig::new(2, GrowthFunction::Successor).unwrap();
        let inbox = vec![
            (NodeId(4), SapState::new(1, 1)),
            (NodeId(2), SapState::new(1, 1)),
        ];
        let (_, info) = sap_step(&SapState::new(1, 1), &inbox, &cfg).unwrap();
        assert_eq!(info.j_min, Some(NodeId(2)));
    }

    #[test]
    fn fixed_step_examples() {
        assert_eq!(sap_fixed_step(&[0, 0], 2, 3).unwrap(), 1);
        assert_eq!(sap_fixed_step(&[5], 2, 3).unwrap(), 0);
        assert_eq!(sap_fixed_step(&[], 2, 3), Err(SapError::EmptyInbox));
    }

    #[test]
    fn initial_reduction() {
        let cfg = SapConfig::new(2, GrowthFunction::Successor).unwrap();
        assert_eq!(
            reduce_initial(SapState::new(17, 3), &cfg, NodeId(0)).unwrap(),
            SapState::new(5, 3)
        );
        assert_eq!(
            reduce_initial(SapState::new(1, 0), &cfg, NodeId(2)),
            Err(SapError::ZeroPeriodFactor(NodeId(2)))
        );
        assert_eq!(
            SapConfig::new(0, GrowthFunction::Successor),
            Err(SapError::ZeroPeriod)
        );
    }
}
