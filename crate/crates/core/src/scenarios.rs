//! Concrete schedules and adversaries with their suggested initial states
//! and closed-form expectations.
//!
//! Node names used in the three-node constructions: `i = 0`, `j = 1`,
//! `k = 2`.

use std::borrow::Cow;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{self, AnalysisError, ConnectivityClass, Eccentricity};
use crate::engine::SapHistory;
use crate::graph::{text, Digraph, DynamicGraph, GraphError, NodeId, NodeSet};
use crate::init::InitVectors;
use crate::invariants::Violation;
use crate::sap::{GrowthFunction, SapError, SapState};

const I: NodeId = NodeId(0);
const J: NodeId = NodeId(1);
const K: NodeId = NodeId(2);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("advertised property does not hold: {0}")]
    ClassMismatch(String),
    #[error("no schedule in the requested class after {attempts} attempts")]
    BudgetExhausted { attempts: usize },
    #[error("unknown scenario `{0}`")]
    Unknown(String),
    #[error("generator schedules have no finite text form")]
    NotExportable,
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sap(#[from] SapError),
}

fn precondition(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Precondition(msg.into())
}

/// A property a scenario promises about its schedule, checked against the
/// analysis at construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Claim {
    /// Least rooting delay equals the value.
    RootedWithDelay(usize),
    UniformlyRooted {
        delay: usize,
        roots: NodeSet,
    },
    NotUniformlyRootedAtAnyDelay,
    StronglyConnectedWithDelay(usize),
    /// The center is strictly smaller than the node set.
    NotStronglyConnectedAtAnyDelay,
    Center(NodeSet),
    DiameterAtMost(usize),
    /// Checked round by round by the generator itself.
    EveryRoundRooted,
}

impl Claim {
    fn check(&self, class: &ConnectivityClass, dg: &DynamicGraph) -> Result<(), ScenarioError> {
        let ok = match self {
            Claim::RootedWithDelay(d) => class.rooted_with_delay == Some(*d),
            Claim::UniformlyRooted { delay, roots } => class
                .uniformly_rooted
                .is_some_and(|u| u.delay == *delay && u.roots == *roots),
            Claim::NotUniformlyRootedAtAnyDelay => {
                analysis::uniform_roots(dg, saturation_delay(dg))?.is_none()
            }
            Claim::StronglyConnectedWithDelay(d) => class.strongly_connected_with_delay == Some(*d),
            Claim::NotStronglyConnectedAtAnyDelay => class.center != NodeSet::full(dg.node_count()),
            Claim::Center(z) => class.center == *z,
            Claim::DiameterAtMost(b) => class.diameter <= Eccentricity::Finite(*b),
            Claim::EveryRoundRooted => true,
        };
        if ok {
            Ok(())
        } else {
            Err(ScenarioError::ClassMismatch(format!("{self:?}")))
        }
    }
}

/// A delay past which every window's root set has settled: `p + (n+1) L`.
pub fn saturation_delay(dg: &DynamicGraph) -> usize {
    let (p, l) = dg.period().unwrap_or((0, 1));
    p + (dg.node_count() + 1) * l
}

/// Per-round predicates a run of the scenario must satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// Exactly `PM/2 + 1 - |[t]_{PM} - PM/2|` nodes hold `[t]_{PM}`; the rest
    /// hold `[t + PM/2]_{PM}`.
    Chain { modulus: u64 },
    /// `C_i = [t+1]`, `C_k = [t]`, `C_j = 1` if `[t] = 0` else `[t]`, all
    /// modulo `PM`.
    H { modulus: u64 },
    /// The block predicate holds at each listed boundary with the listed
    /// `(M_i, C_i)`.
    RootedBlocks {
        period: u64,
        boundaries: Vec<Boundary>,
    },
}

/// Which non-hub node is at clock 0 in the block predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Silent {
    K,
    J,
}

impl Silent {
    fn other(self) -> Self {
        match self {
            Silent::K => Silent::J,
            Silent::J => Silent::K,
        }
    }

    /// `(partner, silent)` nodes.
    fn nodes(self) -> (NodeId, NodeId) {
        match self {
            Silent::K => (J, K),
            Silent::J => (K, J),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Boundary {
    pub round: usize,
    pub m: u64,
    pub c: u64,
    pub silent: Silent,
}

/// `(M_i = M_x) ∧ (M_i ≥ M_s) ∧ (C_i = C_x) ∧ (C_i ≢_P 0) ∧ (C_i ≤ PM_i − 2) ∧ (C_s = 0)`
/// with `x` the partner and `s` the silent node.
pub fn block_predicate(silent: Silent, period: u64, clocks: &[u64], factors: &[u64]) -> bool {
    let (x, s) = silent.nodes();
    let (i, x, s) = (I.index(), x.index(), s.index());
    let mi = factors[i];
    factors[i] == factors[x]
        && mi >= factors[s]
        && clocks[i] == clocks[x]
        && !clocks[i].is_multiple_of(period)
        && clocks[i].saturating_add(2) <= period.saturating_mul(mi)
        && clocks[s] == 0
}

impl ClosedForm {
    pub fn check(&self, h: &SapHistory) -> Vec<Violation> {
        let mut out = Vec::new();
        match self {
            ClosedForm::Chain { modulus } => {
                let half = modulus / 2;
                for (t, row) in h.clocks.iter().enumerate() {
                    let r = t as u64 % modulus;
                    let other = (t as u64 + half) % modulus;
                    let expected = (half + 1 - r.abs_diff(half)) as usize;
                    let at_r = row.iter().filter(|&&c| c == r).count();
                    if at_r != expected || row.iter().any(|&c| c != r && c != other) {
                        out.push(Violation::new(
                            "chain closed form",
                            t,
                            format!("clocks {row:?}: expected {expected} at {r}, rest at {other}"),
                        ));
                    }
                }
            }
            ClosedForm::H { modulus } => {
                for (t, row) in h.clocks.iter().enumerate() {
                    let r = t as u64 % modulus;
                    let expected = [(t as u64 + 1) % modulus, if r == 0 { 1 } else { r }, r];
                    if row[..3] != expected {
                        out.push(Violation::new(
                            "H closed form",
                            t,
                            format!("clocks {row:?}, expected {expected:?}"),
                        ));
                    }
                }
            }
            ClosedForm::RootedBlocks { period, boundaries } => {
                for b in boundaries {
                    if b.round > h.rounds() {
                        out.push(Violation::new(
                            "block boundary",
                            b.round,
                            format!("trace ends at round {}", h.rounds()),
                        ));
                        continue;
                    }
                    let (c, m) = (&h.clocks[b.round], &h.factors[b.round]);
                    if !block_predicate(b.silent, *period, c, m)
                        || c[I.index()] != b.c
                        || m[I.index()] != b.m
                    {
                        out.push(Violation::new(
                            "block boundary",
                            b.round,
                            format!(
                                "clocks {c:?}, factors {m:?}; expected predicate with silent {:?}, M_i = {}, C_i = {}",
                                b.silent, b.m, b.c
                            ),
                        ));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub never_synchronizes: bool,
    pub closed_form: Option<ClosedForm>,
}

#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    /// The schedule a run uses.
    pub dynamic_graph: DynamicGraph,
    /// Prefix/cycle form for exact analysis; equal round by round to
    /// `dynamic_graph` (it *is* `dynamic_graph` when that is periodic).
    pub analysis_form: Option<DynamicGraph>,
    pub class: Option<ConnectivityClass>,
    pub claims: Vec<Claim>,
    pub suggested_init: InitVectors,
    pub expected: Expected,
    pub default_horizon: Option<usize>,
}

impl std::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("n", &self.dynamic_graph.node_count())
            .field("claims", &self.claims)
            .finish_non_exhaustive()
    }
}

impl Scenario {
    fn periodic(
        name: impl Into<String>,
        dg: DynamicGraph,
        delta_cap: usize,
        claims: Vec<Claim>,
    ) -> Result<Self, ScenarioError> {
        let class = analysis::classify(&dg, delta_cap)?;
        for claim in &claims {
            claim.check(&class, &dg)?;
        }
        Ok(Self {
            name: name.into(),
            analysis_form: Some(dg.clone()),
            dynamic_graph: dg,
            class: Some(class),
            claims,
            suggested_init: InitVectors::default(),
            expected: Expected::default(),
            default_horizon: None,
        })
    }

    fn generated(name: impl Into<String>, dg: DynamicGraph, claims: Vec<Claim>) -> Self {
        Self {
            name: name.into(),
            dynamic_graph: dg,
            analysis_form: None,
            class: None,
            claims,
            suggested_init: InitVectors::default(),
            expected: Expected::default(),
            default_horizon: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.dynamic_graph.node_count()
    }

    /// Schedule text (from the analysis form) followed by the init section.
    pub fn export(&self) -> Result<String, ScenarioError> {
        let form = self
            .analysis_form
            .as_ref()
            .ok_or(ScenarioError::NotExportable)?;
        let mut out = format!("# scenario {}\n", self.name);
        out.push_str(&text::to_text(form)?);
        out.push_str(&self.suggested_init.to_text());
        Ok(out)
    }
}

/// Static bidirectional path `0 - 1 - ... - (n-1)`.
pub fn bidirectional_chain(n: usize) -> Result<Digraph, GraphError> {
    Digraph::new(n, (1..n).flat_map(|i| [(i - 1, i), (i, i - 1)]))
}

/// Chain of `n > PM/2 + 1` nodes, node 0 at clock 0 and the rest at `PM/2`.
pub fn chain_counterexample(p: u64, m: u64, n: usize) -> Result<Scenario, ScenarioError> {
    if p == 0 || !p.is_multiple_of(2) {
        return Err(precondition(format!(
            "P must be even and positive, got {p}"
        )));
    }
    if m.is_multiple_of(2) {
        return Err(precondition(format!("M must be odd, got {m}")));
    }
    let modulus = p
        .checked_mul(m)
        .ok_or(SapError::Overflow("period product"))?;
    if n as u64 <= modulus / 2 + 1 {
        return Err(precondition(format!(
            "n must exceed PM/2 + 1 = {}, got {n}",
            modulus / 2 + 1
        )));
    }
    let dg = DynamicGraph::static_graph(bidirectional_chain(n)?);
    let mut s = Scenario::periodic(
        "chain",
        dg,
        n,
        vec![
            Claim::StronglyConnectedWithDelay(n - 1),
            Claim::DiameterAtMost(n - 1),
        ],
    )?;
    let init: Vec<u64> = (0..n)
        .map(|i| if i == 0 { 0 } else { modulus / 2 })
        .collect();
    s.suggested_init.sap_fixed = Some(init);
    s.expected = Expected {
        never_synchronizes: true,
        closed_form: Some(ClosedForm::Chain { modulus }),
    };
    s.default_horizon = Some(10 * modulus as usize);
    Ok(s)
}

/// Edges `i -> j`, `j <-> k`.
pub fn h_digraph() -> Digraph {
    Digraph::new(3, [(0, 1), (1, 2), (2, 1)]).expect("valid digraph")
}

pub fn h_counterexample(p: u64, m: u64) -> Result<Scenario, ScenarioError> {
    if p < 2 {
        return Err(precondition(format!("P must be at least 2, got {p}")));
    }
    if m < 1 {
        return Err(precondition("M must be at least 1"));
    }
    let modulus = p
        .checked_mul(m)
        .ok_or(SapError::Overflow("period product"))?;
    let dg = DynamicGraph::static_graph(h_digraph());
    let mut s = Scenario::periodic(
        "h",
        dg,
        3,
        vec![
            Claim::RootedWithDelay(1),
            Claim::UniformlyRooted {
                delay: 1,
                roots: NodeSet::singleton(I),
            },
            Claim::Center(NodeSet::singleton(I)),
        ],
    )?;
    s.suggested_init.sap_fixed = Some(vec![1, 1, 0]);
    s.suggested_init.sap = Some(vec![
        SapState::new(1, m),
        SapState::new(1, m),
        SapState::new(0, m),
    ]);
    s.expected = Expected {
        never_synchronizes: true,
        closed_form: Some(ClosedForm::H { modulus }),
    };
    s.default_horizon = Some(5 * modulus as usize);
    Ok(s)
}

/// `G`: `i -> j`, `i -> k`.
pub fn digraph_g() -> Digraph {
    Digraph::new(3, [(0, 1), (0, 2)]).expect("valid digraph")
}

/// `G` plus `k -> i`.
pub fn digraph_h_k() -> Digraph {
    Digraph::new(3, [(0, 1), (0, 2), (2, 0)]).expect("valid digraph")
}

/// `G` plus `j -> i`.
pub fn digraph_h_j() -> Digraph {
    Digraph::new(3, [(0, 1), (0, 2), (1, 0)]).expect("valid digraph")
}

/// Block boundaries from `(M0, c0)`: each block of length `PM - c` moves to
/// `(g^{PM-c-1}(M), PM - c)` and swaps the silent node. The last entry is
/// the state after the final block.
pub fn rooted_blocks(
    p: u64,
    m0: u64,
    c0: u64,
    g: &GrowthFunction,
    num_blocks: usize,
) -> Result<Vec<Boundary>, ScenarioError> {
    let pm0 = p
        .checked_mul(m0)
        .ok_or(SapError::Overflow("period product"))?;
    if p == 0 || c0 == 0 || c0 + 2 > pm0 || c0.is_multiple_of(p) {
        return Err(precondition(format!(
            "c0 must lie in 1..=PM0-2 and not be a multiple of P (P={p}, M0={m0}, c0={c0})"
        )));
    }
    let mut out = vec![Boundary {
        round: 0,
        m: m0,
        c: c0,
        silent: Silent::K,
    }];
    for _ in 0..num_blocks {
        let b = out.last().expect("non-empty");
        let pm = p
            .checked_mul(b.m)
            .ok_or(SapError::Overflow("period product"))?;
        let len = pm - b.c;
        let next = Boundary {
            round: b.round + len as usize,
            m: g.iterate(b.m, len - 1)?,
            c: len,
            silent: b.silent.other(),
        };
        out.push(next);
    }
    Ok(out)
}

/// Blockwise schedule: from a boundary with `(M, c)`, rounds are `G`
/// repeated `PM - c - 2` times, then `H_k` or `H_j` (matching the silent
/// node), then `I`. After the last block `G, I` repeats. Runs use a
/// generator over the same rounds.
pub fn rooted_counterexample(
    p: u64,
    m0: u64,
    c0: u64,
    g: GrowthFunction,
    num_blocks: usize,
) -> Result<Scenario, ScenarioError> {
    let boundaries = rooted_blocks(p, m0, c0, &g, num_blocks)?;
    let mut prefix = Vec::new();
    for pair in boundaries.windows(2) {
        let (b, next) = (&pair[0], &pair[1]);
        let len = next.round - b.round;
        prefix.extend(std::iter::repeat_n(digraph_g(), len - 2));
        prefix.push(match b.silent {
            Silent::K => digraph_h_k(),
            Silent::J => digraph_h_j(),
        });
        prefix.push(Digraph::identity(3)?);
    }
    let form = DynamicGraph::prefix_cycle(prefix, vec![digraph_g(), Digraph::identity(3)?])?;
    let mut s = Scenario::periodic(
        "rooted",
        form.clone(),
        2,
        vec![
            Claim::RootedWithDelay(2),
            Claim::Center(NodeSet::singleton(I)),
            Claim::NotUniformlyRootedAtAnyDelay,
        ],
    )?;
    s.dynamic_graph = DynamicGraph::generator(3, move |t| form.digraph(t).map(Cow::into_owned))?;
    s.suggested_init.sap = Some(vec![
        SapState::new(c0, m0),
        SapState::new(c0, m0),
        SapState::new(0, m0),
    ]);
    s.default_horizon = boundaries.last().map(|b| b.round);
    s.expected = Expected {
        never_synchronizes: true,
        closed_form: Some(ClosedForm::RootedBlocks {
            period: p,
            boundaries,
        }),
    };
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarPattern {
    Strict2Cycle,
    GrowingRuns,
}

/// Out-star from `hub` to every other node.
pub fn star(n: usize, hub: NodeId) -> Result<Digraph, GraphError> {
    Digraph::new(
        n,
        (0..n)
            .filter(|&x| x != hub.index())
            .map(|x| (hub.index(), x)),
    )
}

/// Hub of round `t` in the growing-runs pattern: runs of lengths
/// 1, 1, 2, 2, 3, 3, ... alternating between hubs 0 and 1.
pub fn growing_runs_hub(t: usize) -> NodeId {
    let mut remaining = t - 1;
    let mut run = 0usize;
    loop {
        let len = run / 2 + 1;
        if remaining < len {
            return NodeId(run % 2);
        }
        remaining -= len;
        run += 1;
    }
}

pub fn star_alternation(n: usize, pattern: StarPattern) -> Result<Scenario, ScenarioError> {
    if n < 3 {
        return Err(precondition(format!("need n >= 3, got {n}")));
    }
    match pattern {
        StarPattern::Strict2Cycle => {
            let dg = DynamicGraph::prefix_cycle(Vec::new(), vec![star(n, I)?, star(n, J)?])?;
            Scenario::periodic("star-2cycle", dg, 2, vec![Claim::RootedWithDelay(1)])
        }
        StarPattern::GrowingRuns => {
            let dg = DynamicGraph::generator(n, move |t| {
                if t == 0 {
                    return Err(GraphError::RoundZero(t));
                }
                star(n, growing_runs_hub(t))
            })?;
            Ok(Scenario::generated(
                "star-growing",
                dg,
                vec![Claim::EveryRoundRooted],
            ))
        }
    }
}

/// Complete digraph minus exactly `losses` seeded-random off-diagonal edges
/// per round. Every emitted digraph is checked for a root; an unrooted one
/// is reported as a generator failure.
pub fn link_loss_adversary(n: usize, losses: usize, seed: u64) -> Result<Scenario, ScenarioError> {
    if n < 2 {
        return Err(precondition(format!("need n >= 2, got {n}")));
    }
    if losses > 2 * n - 3 {
        return Err(precondition(format!(
            "losses must be at most 2n-3 = {}, got {losses}",
            2 * n - 3
        )));
    }
    let dg = DynamicGraph::generator(n, move |t| {
        let g = link_loss_round(n, losses, seed, t)?;
        if !g.is_rooted() {
            return Err(GraphError::Generator {
                round: t,
                reason: format!("unrooted digraph after {losses} losses"),
            });
        }
        Ok(g)
    })?;
    Ok(Scenario::generated(
        "link-loss",
        dg,
        vec![Claim::EveryRoundRooted],
    ))
}

/// The digraph of round `t`, without the rootedness check.
pub fn link_loss_round(
    n: usize,
    losses: usize,
    seed: u64,
    t: usize,
) -> Result<Digraph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    let off: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut keep = vec![true; off.len()];
    for idx in sample(&mut rng, off.len(), losses.min(off.len())) {
        keep[idx] = false;
    }
    Digraph::new(
        n,
        off.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e),
    )
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Each node sends one message per round, cycling through its neighbours
/// in ascending order. The cycle length is the lcm of the degrees.
pub fn round_robin_transform(g: &Digraph) -> Result<Scenario, ScenarioError> {
    let n = g.node_count();
    for (i, j) in g.edges() {
        if !g.has_edge(j, i) {
            return Err(precondition(format!("edge ({i},{j}) has no reverse")));
        }
    }
    if !g.is_strongly_connected() {
        return Err(precondition("graph is not connected"));
    }
    let neighbors: Vec<Vec<NodeId>> = (0..n)
        .map(|i| {
            g.out_neighbors(NodeId(i))
                .iter()
                .filter(|&j| j.index() != i)
                .collect()
        })
        .collect();
    let len = neighbors
        .iter()
        .map(|nb| nb.len().max(1))
        .fold(1, |acc, d| acc / gcd(acc, d) * d);
    let cycle = (0..len)
        .map(|r| {
            Digraph::new(
                n,
                neighbors
                    .iter()
                    .enumerate()
                    .filter(|(_, nb)| !nb.is_empty())
                    .map(|(i, nb)| (i, nb[r % nb.len()].index())),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let dg = DynamicGraph::prefix_cycle(Vec::new(), cycle)?;
    Scenario::periodic("round-robin", dg, 1, vec![Claim::DiameterAtMost(3 * n)])
}

/// Random spanning tree plus extra edges with probability `extra`, all
/// bidirectional.
pub fn random_connected_bidirectional(
    n: usize,
    extra: f64,
    seed: u64,
) -> Result<Digraph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        edges.push((parent, order[k]));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(extra) {
                edges.push((i, j));
            }
        }
    }
    Digraph::new(n, edges.into_iter().flat_map(|(a, b)| [(a, b), (b, a)]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetClass {
    Rooted,
    UniformlyRooted,
    StronglyConnected,
}

/// Attempts before `random_rooted` gives up.
pub const SAMPLING_BUDGET: usize = 20_000;

/// Rejection-sampled prefix/cycle schedule whose least delay for `class`
/// is at most `delta`. With `exclude_stronger`, rooted schedules are not
/// uniformly rooted at any delay and uniformly rooted ones have a center
/// other than `V`.
pub fn random_rooted(
    n: usize,
    delta: usize,
    class: TargetClass,
    exclude_stronger: bool,
    seed: u64,
) -> Result<Scenario, ScenarioError> {
    if n < 2 {
        return Err(precondition(format!("need n >= 2, got {n}")));
    }
    if delta < 1 {
        return Err(precondition("delta must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLING_BUDGET {
        let dg = match class {
            TargetClass::StronglyConnected => sample_dense(&mut rng, n, delta)?,
            TargetClass::UniformlyRooted => sample_uniform(&mut rng, n, exclude_stronger)?,
            TargetClass::Rooted => sample_rooted(&mut rng, n, delta)?,
        };
        let class_found = analysis::classify(&dg, delta)?;
        let mut claims = Vec::new();
        match class {
            TargetClass::StronglyConnected => match class_found.strongly_connected_with_delay {
                Some(d) => claims.push(Claim::StronglyConnectedWithDelay(d)),
                None => continue,
            },
            TargetClass::UniformlyRooted => {
                let Some(u) = class_found.uniformly_rooted else {
                    continue;
                };
                claims.push(Claim::UniformlyRooted {
                    delay: u.delay,
                    roots: u.roots,
                });
                if exclude_stronger {
                    if class_found.center == NodeSet::full(n) {
                        continue;
                    }
                    claims.push(Claim::NotStronglyConnectedAtAnyDelay);
                }
            }
            TargetClass::Rooted => {
                let Some(d) = class_found.rooted_with_delay else {
                    continue;
                };
                claims.push(Claim::RootedWithDelay(d));
                if exclude_stronger {
                    if analysis::uniform_roots(&dg, saturation_delay(&dg))?.is_some() {
                        continue;
                    }
                    claims.push(Claim::NotUniformlyRootedAtAnyDelay);
                }
            }
        }
        let name = format!(
            "random-{}",
            serde_json::to_value(class)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default()
        );
        return Scenario::periodic(name, dg, delta, claims);
    }
    Err(ScenarioError::BudgetExhausted {
        attempts: SAMPLING_BUDGET,
    })
}

fn random_digraph(
    rng: &mut ChaCha8Rng,
    n: usize,
    prob: f64,
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<Digraph, GraphError> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && allowed(i, j) && rng.gen_bool(prob) {
                edges.push((i, j));
            }
        }
    }
    Digraph::new(n, edges)
}

fn lengths(rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.gen_range(0..=2), rng.gen_range(1..=3))
}

fn assemble(
    rng: &mut ChaCha8Rng,
    mut make: impl FnMut(&mut ChaCha8Rng, bool) -> Result<Digraph, GraphError>,
) -> Result<DynamicGraph, GraphError> {
    let (p, l) = lengths(rng);
    let prefix = (0..p)
        .map(|_| make(rng, true))
        .collect::<Result<Vec<_>, _>>()?;
    let cycle = (0..l)
        .map(|_| make(rng, false))
        .collect::<Result<Vec<_>, _>>()?;
    DynamicGraph::prefix_cycle(prefix, cycle)
}

fn sample_dense(rng: &mut ChaCha8Rng, n: usize, delta: usize) -> Result<DynamicGraph, GraphError> {
    if delta == 1 {
        return assemble(rng, |_, _| Digraph::complete(n));
    }
    let prob = rng.gen_range(0.35..0.9);
    assemble(rng, |rng, _| random_digraph(rng, n, prob, |_, _| true))
}

/// Roots confined to a random proper subset `Z`: no edge enters `Z` from
/// outside, `Z` is internally dense. With `proper = false` `Z` may be `V`.
fn sample_uniform(
    rng: &mut ChaCha8Rng,
    n: usize,
    proper: bool,
) -> Result<DynamicGraph, GraphError> {
    let max = if proper { n - 1 } else { n };
    let size = rng.gen_range(1..=max);
    let z: Vec<bool> = {
        let picked = sample(rng, n, size).into_vec();
        (0..n).map(|i| picked.contains(&i)).collect()
    };
    let inner = rng.gen_range(0.4..0.95);
    let outward = rng.gen_range(0.3..0.9);
    let rest = rng.gen_range(0.0..0.6);
    assemble(rng, move |rng, _| {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let prob = match (z[i], z[j]) {
                    (true, true) => inner,
                    (true, false) => outward,
                    (false, true) => 0.0,
                    (false, false) => rest,
                };
                if i != j && prob > 0.0 && rng.gen_bool(prob) {
                    edges.push((i, j));
                }
            }
        }
        Digraph::new(n, edges)
    })
}

/// Cycle rounds never feed the anchor node; prefix rounds may, so windows
/// starting in the prefix can have other roots.
fn sample_rooted(rng: &mut ChaCha8Rng, n: usize, delta: usize) -> Result<DynamicGraph, GraphError> {
    let anchor = rng.gen_range(0..n);
    let sparse = rng.gen_range(0.1..0.5);
    let (mut p, l) = lengths(rng);
    p = p.max(1);
    let make = |rng: &mut ChaCha8Rng, in_prefix: bool| -> Result<Digraph, GraphError> {
        if delta > 1 && rng.gen_bool(0.3) {
            return random_digraph(rng, n, sparse, |_, j| in_prefix || j != anchor);
        }
        let root = if in_prefix {
            rng.gen_range(0..n)
        } else {
            anchor
        };
        let mut order: Vec<usize> = (0..n).filter(|&x| x != root).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut reached = vec![root];
        let mut edges = Vec::new();
        for x in order {
            let parent = reached[rng.gen_range(0..reached.len())];
            edges.push((parent, x));
            reached.push(x);
        }
        let extra = random_digraph(rng, n, sparse, |_, j| in_prefix || j != anchor)?;
        edges.extend(extra.edges().map(|(a, b)| (a.index(), b.index())));
        Digraph::new(n, edges)
    };
    let prefix = (0..p)
        .map(|_| make(rng, true))
        .collect::<Result<Vec<_>, _>>()?;
    let cycle = (0..l)
        .map(|_| make(rng, false))
        .collect::<Result<Vec<_>, _>>()?;
    DynamicGraph::prefix_cycle(prefix, cycle)
}

/// Parameters for building a scenario by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub period: u64,
    pub m: u64,
    pub n: usize,
    pub growth: GrowthFunction,
    pub c0: u64,
    pub blocks: usize,
    pub losses: usize,
    pub delta: usize,
    pub class: TargetClass,
    pub exclude_stronger: bool,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            period: 2,
            m: 3,
            n: 5,
            growth: GrowthFunction::Successor,
            c0: 1,
            blocks: 4,
            losses: 0,
            delta: 1,
            class: TargetClass::Rooted,
            exclude_stronger: true,
            seed: 0,
        }
    }
}

/// Names accepted by [`build`], with their parameters.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("chain", "period, m, n"),
    ("h", "period, m"),
    ("rooted", "period, m (M0), c0, growth, blocks"),
    ("star-2cycle", "n"),
    ("star-growing", "n"),
    ("link-loss", "n, losses, seed"),
    (
        "round-robin",
        "n, seed (random connected bidirectional source graph)",
    ),
    ("random-rooted", "n, delta, class, exclude_stronger, seed"),
];

pub fn build(name: &str, p: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    match name {
        "chain" => chain_counterexample(p.period, p.m, p.n),
        "h" => h_counterexample(p.period, p.m),
        "rooted" => rooted_counterexample(p.period, p.m, p.c0, p.growth.clone(), p.blocks),
        "star-2cycle" => star_alternation(p.n, StarPattern::Strict2Cycle),
        "star-growing" => star_alternation(p.n, StarPattern::GrowingRuns),
        "link-loss" => link_loss_adversary(p.n, p.losses, p.seed),
        "round-robin" => round_robin_transform(&random_connected_bidirectional(p.n, 0.3, p.seed)?),
        "random-rooted" => random_rooted(p.n, p.delta, p.class, p.exclude_stronger, p.seed),
        other => Err(ScenarioError::Unknown(other.to_owned())),
    }
}
