//! The MinMax automaton: unbounded clocks driven by views of
//! `(value, depth)` pairs.
//!
//! Each step shifts every received pair by `(+1, +1)`, adds the smallest
//! shifted value at depth 0, and outputs the largest value whose depth is at
//! most half the node's age `h`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A finite set of `(value, depth)` pairs.
///
/// Stored sorted by `(depth, value)`. Shifting preserves that order, so the
/// union of neighbour views is a linear merge.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct View {
    by_depth: Vec<(u64, u64)>,
}

impl View {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Self {
        let mut by_depth: Vec<(u64, u64)> = pairs.into_iter().map(|(v, d)| (d, v)).collect();
        by_depth.sort_unstable();
        by_depth.dedup();
        Self { by_depth }
    }

    pub fn len(&self) -> usize {
        self.by_depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_depth.is_empty()
    }

    pub fn contains(&self, value: u64, depth: u64) -> bool {
        self.by_depth.binary_search(&(depth, value)).is_ok()
    }

    /// Pairs as `(value, depth)`, ordered by depth then value.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.by_depth.iter().map(|&(d, v)| (v, d))
    }

    /// Smallest value, the node's min-clock `c`.
    pub fn min_value(&self) -> Option<u64> {
        self.by_depth.iter().map(|&(_, v)| v).min()
    }

    /// Largest value among pairs with `2 * depth <= h`.
    pub fn max_value_within(&self, h: u64) -> Option<u64> {
        self.by_depth
            .iter()
            .take_while(|&&(d, _)| d.saturating_mul(2) <= h)
            .map(|&(_, v)| v)
            .max()
    }

    pub fn max_depth(&self) -> Option<u64> {
        self.by_depth.last().map(|&(d, _)| d)
    }
}

impl fmt::Debug for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

impl Serialize for View {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.pairs())
    }
}

impl<'de> Deserialize<'de> for View {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<(u64, u64)> = Deserialize::deserialize(d)?;
        Ok(View::from_pairs(pairs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinMaxState {
    pub h: u64,
    pub view: View,
    pub clock_out: u64,
}

impl MinMaxState {
    pub fn new(h: u64, view: View, clock_out: u64) -> Self {
        Self { h, view, clock_out }
    }

    /// `c = min view[1]`; absent only for an empty (never-stepped) view.
    pub fn min_clock(&self) -> Option<u64> {
        self.view.min_value()
    }
}

/// What a node broadcasts: its whole view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinMaxMessage {
    pub view: View,
}

pub fn minmax_send(state: &MinMaxState) -> MinMaxMessage {
    MinMaxMessage {
        view: state.view.clone(),
    }
}

/// Result of one step. `degenerate` marks the repair of an all-empty inbox,
/// where the depth-0 entry falls back to value 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinMaxStep {
    pub state: MinMaxState,
    pub degenerate: bool,
}

/// One transition. `received` must include the node's own message.
pub fn minmax_step<'a, I>(state: &MinMaxState, received: I) -> MinMaxStep
where
    I: IntoIterator<Item = &'a MinMaxMessage>,
{
    let views: Vec<&[(u64, u64)]> = received
        .into_iter()
        .map(|m| m.view.by_depth.as_slice())
        .collect();
    let mut merged = merge_shifted(&views);
    let (min, degenerate) = match merged.iter().map(|&(_, v)| v).min() {
        Some(m) => (m, false),
        None => (0, true),
    };
    // Shifted depths are >= 1, so the new depth-0 pair sorts first.
    merged.insert(0, (0, min));
    let view = View { by_depth: merged };
    let h = state.h + 1;
    let clock_out = view.max_value_within(h).expect("view holds a depth-0 pair");
    MinMaxStep {
        state: MinMaxState { h, view, clock_out },
        degenerate,
    }
}

/// Sorted, deduplicated union of the inputs with every pair shifted by one.
fn merge_shifted(views: &[&[(u64, u64)]]) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> =
        Vec::with_capacity(views.iter().map(|v| v.len()).max().unwrap_or(0));
    match views {
        [] => {}
        [only] => out.extend(only.iter().map(|&(d, v)| (d + 1, v + 1))),
        _ => {
            let mut all: Vec<(u64, u64)> = views.iter().flat_map(|v| v.iter().copied()).collect();
            all.sort_unstable();
            all.dedup();
            out.extend(all.into_iter().map(|(d, v)| (d + 1, v + 1)));
        }
    }
    out
}

/// Round after which every MinMax clock equals `c0 + t`:
/// `max{s0 + R, t0 + R + 1, 2(R + 1), 2 t0 + h0}` with `R = delta * (n - |K|)`.
pub fn t1_bound(s0: u64, t0: u64, reach: u64, h0_max: u64) -> u64 {
    (s0 + reach)
        .max(t0 + reach + 1)
        .max(2 * (reach + 1))
        .max(2 * t0 + h0_max)
}

/// Stabilization bound for a finite dynamic diameter `d`: `2D + h0`.
pub fn table_bound_diameter(d: u64, h0_max: u64) -> u64 {
    2 * d + h0_max
}

/// Stabilization bound for uniformly rooted schedules: `2D + 2R + h0`.
pub fn table_bound_uniform(d: u64, r: u64, h0_max: u64) -> u64 {
    2 * d + 2 * r + h0_max
}
