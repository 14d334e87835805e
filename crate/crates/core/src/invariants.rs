//! Trace properties of the two automata, checked exhaustively over recorded
//! executions. Each check returns how many instances it examined and every
//! instance that failed.

use serde::{Deserialize, Serialize};

use crate::engine::{MinMax, SapHistory, Trace, ZMetrics};
use crate::graph::{Digraph, NodeId, NodeSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub round: usize,
    pub detail: String,
}

impl Violation {
    pub fn new(check: &str, round: usize, detail: impl Into<String>) -> Self {
        Self {
            check: check.to_owned(),
            round,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub instances: usize,
    pub violations: Vec<Violation>,
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            instances: 0,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, round: usize, detail: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.violations
                .push(Violation::new(&self.name, round, detail()));
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(CheckOutcome::passed)
}

fn congruent(a: u64, b: u64, p: u64) -> bool {
    a % p == b % p
}

/// Persistence, propagation bound, factor monotonicity, step dichotomy and
/// path dichotomy. Interval checks cover every `[s, t]` with
/// `t - s < max_span` (all intervals when `None`).
pub fn check_sap_general(h: &SapHistory, max_span: Option<usize>) -> Vec<CheckOutcome> {
    let end = h.rounds();
    let n = h.n();
    let p = h.period;

    let mut persistence = CheckOutcome::new("persistence");
    if let Some(s) = (0..=end).find(|&t| h.synchronized_at(t)) {
        for t in s..=end {
            persistence.record(h.synchronized_at(t), t, || {
                format!("synchronized at {s} but not at {t}: {:?}", h.clocks[t])
            });
        }
    }

    let mut monotone = CheckOutcome::new("period factor monotone");
    let mut step = CheckOutcome::new("step dichotomy");
    for t in 1..=end {
        for i in 0..n {
            let (m_prev, m_now) = (h.factors[t - 1][i], h.factors[t][i]);
            monotone.record(m_now >= m_prev, t, || format!("M_{i}: {m_prev} -> {m_now}"));

            let c = h.clocks[t][i];
            let c_prev = h.clocks[t - 1][i];
            let Some(jm) = h.j_min[t][i] else {
                step.record(false, t, || format!("node {i} has no recorded minimizer"));
                continue;
            };
            let c_min = h.clocks[t - 1][jm.index()];
            let advance = c > 0 && c == c_min + 1;
            let wrap = c == 0 && c_prev + 1 == p * m_prev && c_prev == c_min;
            step.record(advance || wrap, t, || {
                format!("C_{i}: {c_prev} -> {c}, minimizer {jm} held {c_min}, M_{i} = {m_prev}")
            });
        }
    }

    let mut propagation = CheckOutcome::new("propagation bound");
    let mut path = CheckOutcome::new("path dichotomy");
    for s in 1..=end {
        let last = max_span.map_or(end, |span| end.min(s + span - 1));
        let mut acc = Digraph::identity(n).expect("n checked by history");
        for t in s..=last {
            acc = acc.product(h.digraph(t)).expect("same node count");
            let span = (t - s + 1) as u64;
            for (i, j) in acc.edges().chain((0..n).map(|x| (NodeId(x), NodeId(x)))) {
                let (i, j) = (i.index(), j.index());
                let ci = h.clocks[s - 1][i];
                let cj = h.clocks[t][j];
                propagation.record(cj <= ci + span, t, || {
                    format!(
                        "edge ({i},{j}) in G({s}:{t}): C_j = {cj} > C_i({}) + {span} = {}",
                        s - 1,
                        ci + span
                    )
                });
                let same_class = congruent(cj, ci + span, p);
                let grown = h
                    .growth
                    .apply(h.factors[s - 1][i])
                    .is_ok_and(|g| h.factors[t][j] >= g);
                path.record(same_class || grown, t, || {
                    format!(
                        "edge ({i},{j}) in G({s}:{t}): C_j = {cj}, C_i({}) = {ci}, M_j = {}, M_i({}) = {}",
                        s - 1,
                        h.factors[t][j],
                        s - 1,
                        h.factors[s - 1][i]
                    )
                });
            }
        }
    }
    vec![persistence, propagation, monotone, step, path]
}

/// Checks that need a finite dynamic diameter `d`: zero-or-synchronized,
/// headroom synchronization and the growth race.
pub fn check_sap_diameter(h: &SapHistory, d: usize) -> Vec<CheckOutcome> {
    let end = h.rounds();
    let p = h.period;
    let mut zero = CheckOutcome::new("zero or synchronized");
    let mut headroom = CheckOutcome::new("headroom synchronization");
    for t in 0..=end.saturating_sub(d) {
        if t + d > end {
            break;
        }
        let some_zero = (1..d).any(|k| h.clocks[t + k].contains(&0));
        zero.record(some_zero || h.synchronized_at(t + d), t, || {
            format!(
                "no zero clock in ({t}, {}) and not synchronized at {}",
                t + d,
                t + d
            )
        });
        let room = (0..h.n()).all(|i| h.clocks[t][i] + d as u64 <= p * h.factors[t][i]);
        if room {
            headroom.record(h.synchronized_at(t + d), t, || {
                format!("headroom at {t} but not synchronized at {}", t + d)
            });
        }
    }
    let mut race = CheckOutcome::new("growth race");
    let m0 = *h.factors[0].iter().min().expect("n >= 1");
    for q in 1..=end / d {
        let t = q * d;
        let min_m = *h.factors[t].iter().min().expect("n >= 1");
        let target = h.growth.iterate(m0, q as u64);
        race.record(
            h.synchronized_at(t) || target.as_ref().is_ok_and(|&g| min_m >= g),
            t,
            || format!("q = {q}: min M = {min_m}, g^q(M(0)) = {target:?}"),
        );
    }
    vec![zero, headroom, race]
}

/// Center-relative checks for uniformly rooted runs: `M~` non-decreasing
/// from `t0_Z`, the clock ceiling `C_j(t) < P M_Z + R` from `t0_Z + R`, and
/// the center growth bound at `t0_Z + qR`.
pub fn check_sap_uniform(h: &SapHistory, radius: usize, z: &ZMetrics) -> Vec<CheckOutcome> {
    let end = h.rounds();
    let p = h.period;
    let full = NodeSet::full(h.n());

    let mut mtilde = CheckOutcome::new("M~ non-decreasing");
    for t in z.t0..end {
        if let (Some(a), Some(b)) = (z.m_tilde[t], z.m_tilde[t + 1]) {
            mtilde.record(b >= a, t + 1, || format!("M~ {a} -> {b}"));
        }
    }

    let mut ceiling = CheckOutcome::new("clock ceiling");
    let cap = p * z.m_z + radius as u64;
    for t in (z.t0 + radius)..=end {
        for (j, &c) in h.clocks[t].iter().enumerate() {
            ceiling.record(c < cap, t, || format!("C_{j} = {c} >= P M_Z + R = {cap}"));
        }
    }

    let mut growth = CheckOutcome::new("center growth");
    if radius > 0 {
        let mut q = 1;
        while z.t0 + q * radius <= end {
            let t = z.t0 + q * radius;
            let synced = z.s_z[t] == Some(full);
            let target = h.growth.iterate(z.m_z, q as u64 - 1);
            let ok = synced || matches!((z.m_tilde[t], &target), (Some(m), Ok(g)) if m >= *g);
            growth.record(ok, t, || {
                format!(
                    "q = {q}: M~ = {:?}, g^(q-1)(M_Z) = {target:?}",
                    z.m_tilde[t]
                )
            });
            q += 1;
        }
    }
    vec![mtilde, ceiling, growth]
}

fn min_clock(trace: &Trace<MinMax>, t: usize, i: usize) -> Option<u64> {
    trace.snapshots[t][i].c
}

/// Per-step MinMax properties: `h` grows by one and `c_i(t+1) <= c_i(t)+1`.
pub fn check_minmax_steps(trace: &Trace<MinMax>) -> Vec<CheckOutcome> {
    let mut age = CheckOutcome::new("age increments");
    let mut slope = CheckOutcome::new("min-clock slope");
    for t in 1..=trace.rounds() {
        for i in 0..trace.n {
            let (a, b) = (trace.snapshots[t - 1][i].h, trace.snapshots[t][i].h);
            age.record(b == a + 1, t, || format!("h_{i}: {a} -> {b}"));
            if let (Some(a), Some(b)) = (min_clock(trace, t - 1, i), min_clock(trace, t, i)) {
                slope.record(b <= a + 1, t, || format!("c_{i}: {a} -> {b}"));
            }
        }
    }
    vec![age, slope]
}

/// `(v, d)` is in the view of `i` at `t` exactly when some `j` in
/// `In_i(t-d+1 : t)` had `c_j(t-d) = v - d`, for `0 <= d <= t-1`.
/// Needs a trace recorded with full states.
pub fn check_view_semantics(trace: &Trace<MinMax>) -> CheckOutcome {
    let mut out = CheckOutcome::new("view semantics");
    let Some(states) = &trace.states else {
        out.record(false, 0, || "trace was recorded without states".into());
        return out;
    };
    for (t, row) in states.iter().enumerate().skip(1) {
        for d in 0..t {
            let window = trace.interval_graph(t - d + 1, t);
            for (i, state) in row.iter().enumerate() {
                let mut expected: Vec<u64> = window
                    .in_neighbors(NodeId(i))
                    .iter()
                    .filter_map(|j| min_clock(trace, t - d, j.index()))
                    .map(|c| c + d as u64)
                    .collect();
                expected.sort_unstable();
                expected.dedup();
                let actual: Vec<u64> = state
                    .view
                    .pairs()
                    .filter(|&(_, depth)| depth == d as u64)
                    .map(|(v, _)| v)
                    .collect();
                out.record(actual == expected, t, || {
                    format!("node {i}, depth {d}: view has {actual:?}, oracle {expected:?}")
                });
            }
        }
    }
    out
}

/// From `t0` on, every min-clock is at most every kernel node's min-clock.
pub fn check_kernel_dominance(trace: &Trace<MinMax>, kernel: NodeSet, t0: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("kernel dominance");
    for t in t0..=trace.rounds() {
        for j in kernel.iter() {
            let cj = min_clock(trace, t, j.index());
            for i in 0..trace.n {
                let ci = min_clock(trace, t, i);
                out.record(matches!((ci, cj), (Some(a), Some(b)) if a <= b), t, || {
                    format!("c_{i} = {ci:?} exceeds kernel c_{j} = {cj:?}")
                });
            }
        }
    }
    out
}

/// From `from` on, every output equals `c0 + t`.
pub fn check_stabilized_value(trace: &Trace<MinMax>, c0: i64, from: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("stabilized value");
    for t in from..=trace.rounds() {
        let want = c0 + t as i64;
        for (i, &c) in trace.outputs[t].iter().enumerate() {
            out.record(c as i64 == want, t, || {
                format!("C_{i} = {c}, expected {want}")
            });
        }
    }
    out
}
