//! One seeded run: execution, bound selection, invariant checks and
//! scenario expectations.

use anyhow::{anyhow, Context, Result};
use clocksync::analysis::ConnectivityClass;
use clocksync::engine::{
    measure_s0_t0, run, trace_jsonl, z_metrics, Algorithm, MinMax, RunOptions, Sap, SapFixed,
    SapHistory, SyncStatus, Trace, TraceHeader, ZMetrics,
};
use clocksync::graph::{DynamicGraph, NodeSet};
use clocksync::init::{random_fixed, random_minmax, random_sap, InitVectors, MinMaxPreset};
use clocksync::invariants::{
    check_kernel_dominance, check_minmax_steps, check_sap_diameter, check_sap_general,
    check_sap_uniform, check_stabilized_value, CheckOutcome,
};
use clocksync::minmax::{t1_bound, table_bound_diameter, table_bound_uniform};
use clocksync::sap::{
    sap_memory_bound, strong_bound, uniform_table_bound, uniform_trace_bound, GrowthFunction,
    SapConfig,
};
use clocksync::scenarios::ClosedForm;
use serde::Serialize;

use crate::config::{load_init, AlgorithmChoice, ExperimentConfig, InitSource, Resolved};

/// Interval checks on longer traces use windows of at most `SPAN_CAP` rounds.
const FULL_SPAN_LIMIT: usize = 300;
const SPAN_CAP: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: u64,
    /// `None` when the horizon ended before the bound could be confirmed.
    pub satisfied: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckCount {
    pub name: String,
    pub instances: usize,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first: Option<String>,
}

impl From<&CheckOutcome> for CheckCount {
    fn from(o: &CheckOutcome) -> Self {
        Self {
            name: o.name.clone(),
            instances: o.instances,
            violations: o.violations.len(),
            first: o
                .violations
                .first()
                .map(|v| format!("round {}: {}", v.round, v.detail)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Measured {
    pub t0: Option<usize>,
    pub s0: Option<usize>,
    pub m_z: Option<u64>,
    pub max_m: Option<u64>,
    pub max_clock: Option<u64>,
    pub max_view_size: Option<usize>,
    pub max_distinct_states: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub init: &'static str,
    pub rounds: usize,
    pub status: SyncStatus,
    pub bounds: Vec<BoundCheck>,
    pub checks: Vec<CheckCount>,
    pub expectations: Vec<CheckCount>,
    pub measured: Measured,
    /// Measurements that failed, usually because the horizon was too short.
    pub diagnostics: Vec<String>,
    /// Bounds whose hypotheses do not hold for this run.
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn stabilization_round(&self) -> Option<usize> {
        match self.status {
            SyncStatus::SynchronizedAt(t) => Some(t),
            SyncStatus::NotWithinHorizon => None,
        }
    }

    pub fn assertions_passed(&self) -> bool {
        self.bounds.iter().all(|b| b.satisfied != Some(false))
            && self
                .checks
                .iter()
                .chain(&self.expectations)
                .all(|c| c.violations == 0)
    }

    pub fn measurement_failed(&self) -> bool {
        !self.diagnostics.is_empty() || self.bounds.iter().any(|b| b.satisfied.is_none())
    }
}

pub struct RunOutput {
    pub report: RunReport,
    pub trace_jsonl: Option<String>,
}

fn bound(name: &str, value: u64, status: SyncStatus, horizon: usize) -> BoundCheck {
    let satisfied = match status {
        SyncStatus::SynchronizedAt(t) => Some(t as u64 <= value),
        SyncStatus::NotWithinHorizon if (horizon as u64) >= value => Some(false),
        SyncStatus::NotWithinHorizon => None,
    };
    BoundCheck {
        name: name.to_owned(),
        value,
        satisfied,
    }
}

fn span(h: &SapHistory) -> Option<usize> {
    (h.rounds() > FULL_SPAN_LIMIT).then_some(SPAN_CAP)
}

/// Diameter of the center's induced schedule, when finite.
fn center_diameter(dg: &DynamicGraph, z: NodeSet, delta_cap: usize) -> Option<u64> {
    let induced = dg.induced(z).ok()?;
    let class = clocksync::analysis::classify(&induced, delta_cap).ok()?;
    class.diameter.finite().map(|d| d as u64)
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    resolved: &'a Resolved,
    seed: u64,
    horizon: usize,
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.resolved.dynamic_graph.node_count()
    }

    fn class(&self) -> Option<&ConnectivityClass> {
        self.resolved.class.as_ref()
    }

    fn init_vectors(&self) -> Result<Option<InitVectors>> {
        Ok(match &self.cfg.init {
            InitSource::Suggested => Some(self.resolved.init.clone()),
            InitSource::Random => None,
            InitSource::File(path) => Some(load_init(path)?),
        })
    }

    fn header(&self, algorithm: Algorithm) -> TraceHeader {
        TraceHeader {
            algorithm,
            n: self.n(),
            horizon: self.horizon,
            seed: Some(self.seed),
            scenario: Some(self.resolved.label.clone()),
        }
    }

    fn options(&self) -> RunOptions {
        let opts = RunOptions::full(self.horizon);
        if self.cfg.verbosity >= 2 {
            opts.keeping_states()
        } else {
            opts
        }
    }

    /// Scenario expectations apply to the algorithm their closed form
    /// describes, run from the suggested init.
    fn expectations(
        &self,
        algorithm: AlgorithmChoice,
        status: SyncStatus,
        history: &SapHistory,
        suggested: bool,
    ) -> Vec<CheckCount> {
        let Some(form) = &self.resolved.expected.closed_form else {
            return Vec::new();
        };
        let target = match form {
            ClosedForm::Chain { .. } | ClosedForm::H { .. } => AlgorithmChoice::SapFixed,
            ClosedForm::RootedBlocks { .. } => AlgorithmChoice::Sap,
        };
        if target != algorithm || !suggested {
            return Vec::new();
        }
        let window = self
            .resolved
            .expectation_horizon
            .unwrap_or(self.horizon)
            .min(self.horizon);
        let mut out = Vec::new();
        if self.resolved.expected.never_synchronizes {
            let early = matches!(status, SyncStatus::SynchronizedAt(t) if t <= window);
            out.push(CheckCount {
                name: "no synchronization".into(),
                instances: 1,
                violations: usize::from(early),
                first: early.then(|| format!("{status:?}")),
            });
        }
        let truncated = truncate(history, window);
        let violations = form.check(&truncated);
        out.push(CheckCount {
            name: "closed form".into(),
            instances: window + 1,
            violations: violations.len(),
            first: violations
                .first()
                .map(|v| format!("round {}: {}", v.round, v.detail)),
        });
        out
    }
}

fn truncate(h: &SapHistory, upto: usize) -> SapHistory {
    let mut t = h.clone();
    let keep = upto.min(h.rounds());
    t.clocks.truncate(keep + 1);
    t.factors.truncate(keep + 1);
    t.g_fired.truncate(keep + 1);
    t.j_min.truncate(keep + 1);
    t.graphs.truncate(keep);
    t
}

pub fn execute(cfg: &ExperimentConfig, resolved: &Resolved, seed: u64) -> Result<RunOutput> {
    let horizon = cfg
        .horizon
        .unwrap_or_else(|| cfg.default_horizon(resolved.dynamic_graph.node_count()));
    let ctx = Ctx {
        cfg,
        resolved,
        seed,
        horizon,
    };
    match cfg.algorithm {
        AlgorithmChoice::Minmax => run_minmax(&ctx),
        AlgorithmChoice::Sap => run_sap(&ctx),
        AlgorithmChoice::SapFixed => run_fixed(&ctx),
    }
}

fn finish<P: clocksync::engine::Protocol>(
    ctx: &Ctx,
    algorithm: Algorithm,
    trace: &Trace<P>,
    report: RunReport,
) -> Result<RunOutput> {
    let trace_jsonl = if ctx.cfg.verbosity >= 1 {
        Some(
            trace_jsonl(&ctx.header(algorithm), trace, ctx.cfg.verbosity)
                .context("serializing trace")?,
        )
    } else {
        None
    };
    Ok(RunOutput {
        report,
        trace_jsonl,
    })
}

fn base_report(seed: u64, init: &'static str, rounds: usize, status: SyncStatus) -> RunReport {
    RunReport {
        seed,
        init,
        rounds,
        status,
        bounds: Vec::new(),
        checks: Vec::new(),
        expectations: Vec::new(),
        measured: Measured::default(),
        diagnostics: Vec::new(),
        notes: Vec::new(),
    }
}

fn run_minmax(ctx: &Ctx) -> Result<RunOutput> {
    let (init, label) = match ctx.init_vectors()?.and_then(|v| v.minmax) {
        Some(v) => (v, "suggested"),
        None => {
            if let InitSource::File(p) = &ctx.cfg.init {
                return Err(anyhow!("init file {} has no minmax vector", p.display()));
            }
            let preset = MinMaxPreset {
                h_max: ctx.cfg.h0,
                ..MinMaxPreset::default()
            };
            (random_minmax(ctx.n(), &preset, ctx.seed)?, "random")
        }
    };
    let h0 = init.iter().map(|s| s.h).max().unwrap_or(0);
    let trace = run(&MinMax, &ctx.resolved.dynamic_graph, init, ctx.options())?;
    let status = trace.verdict().status;
    let mut report = base_report(ctx.seed, label, trace.rounds(), status);
    report.measured.max_view_size = trace.snapshots.iter().flatten().map(|s| s.view_size).max();
    let mut checks = check_minmax_steps(&trace);

    if let Some(class) = ctx.class() {
        if let Some(d) = class.diameter.finite() {
            report.bounds.push(bound(
                "2D + h(0)",
                table_bound_diameter(d as u64, h0),
                status,
                ctx.horizon,
            ));
        } else if let (Some(_), Some(r)) = (class.uniformly_rooted, class.radius.finite()) {
            match center_diameter(&ctx.resolved.dynamic_graph, class.center, ctx.cfg.delta_cap) {
                Some(dz) => report.bounds.push(bound(
                    "2D + 2R + h(0)",
                    table_bound_uniform(dz, r as u64, h0),
                    status,
                    ctx.horizon,
                )),
                None => report
                    .diagnostics
                    .push("center diameter not finite within the delay cap".into()),
            }
        }
        if let Some(delta) = class.rooted_with_delay {
            let s0 = ctx
                .resolved
                .dynamic_graph
                .period()
                .map_or(1, |(p, _)| p + 1);
            match measure_s0_t0(&trace, class.kernel, delta, s0) {
                Ok(settling) => {
                    report.measured.t0 = Some(settling.t0);
                    report.measured.s0 = Some(settling.s0);
                    let t1 = t1_bound(
                        settling.s0 as u64,
                        settling.t0 as u64,
                        settling.reach as u64,
                        h0,
                    );
                    report
                        .bounds
                        .push(bound("t1 (measured)", t1, status, ctx.horizon));
                    checks.push(check_kernel_dominance(&trace, class.kernel, settling.t0));
                    match settling.c0() {
                        Some(c0) if (t1 as usize) <= trace.rounds() => {
                            checks.push(check_stabilized_value(&trace, c0, t1 as usize))
                        }
                        Some(_) => report
                            .diagnostics
                            .push(format!("horizon too short: t1 = {t1}")),
                        None => report
                            .diagnostics
                            .push("kernel constants differ at t0".into()),
                    }
                }
                Err(e) => report.diagnostics.push(format!("measurement: {e}")),
            }
        }
    }
    report.checks = checks.iter().map(CheckCount::from).collect();
    finish(ctx, Algorithm::MinMax, &trace, report)
}

fn sap_checks(ctx: &Ctx, h: &SapHistory, z: Option<(usize, &ZMetrics)>) -> Vec<CheckCount> {
    let mut out = check_sap_general(h, span(h));
    if let Some(d) = ctx.class().and_then(|c| c.diameter.finite()) {
        out.extend(check_sap_diameter(h, d));
    }
    if let Some((r, zm)) = z {
        out.extend(check_sap_uniform(h, r, zm));
    }
    out.iter().map(CheckCount::from).collect()
}

fn run_sap(ctx: &Ctx) -> Result<RunOutput> {
    let (p, g) = (ctx.cfg.period, ctx.cfg.growth.clone());
    let sap = Sap::new(SapConfig::new(p, g.clone())?);
    let (init, label) = match ctx.init_vectors()?.and_then(|v| v.sap) {
        Some(v) => (v, "suggested"),
        None => {
            if let InitSource::File(path) = &ctx.cfg.init {
                return Err(anyhow!("init file {} has no sap vector", path.display()));
            }
            let clock_max = p.saturating_mul(ctx.cfg.m);
            (
                random_sap(ctx.n(), clock_max, ctx.cfg.m, ctx.seed)?,
                "random",
            )
        }
    };
    let m0_max = init.iter().map(|s| s.period_factor).max().unwrap_or(1);
    let trace = run(&sap, &ctx.resolved.dynamic_graph, init, ctx.options())?;
    let status = trace.verdict().status;
    let history = SapHistory::from_sap(&trace, &sap);
    let mut report = base_report(ctx.seed, label, trace.rounds(), status);
    report.measured.max_m = history.factors.iter().flatten().copied().max();
    report.measured.max_clock = Some(history.max_clock());

    let mut z_info = None;
    if let Some(class) = ctx.class() {
        if let Some(d) = class.diameter.finite() {
            match strong_bound(d as u64, p, &g) {
                Ok(b) => {
                    report
                        .bounds
                        .push(bound("(2 + g*(ceil(2D/P))) D", b, status, ctx.horizon))
                }
                Err(e) => report.notes.push(format!("time bound: {e}")),
            }
            match sap_memory_bound(d as u64, p, &g, m0_max) {
                Ok(b) => report.bounds.push(BoundCheck {
                    name: "max clock < (P+1) g^T(max M_i(0))".into(),
                    value: b,
                    satisfied: Some(history.max_clock() < b),
                }),
                Err(e) => report.notes.push(format!("memory bound: {e}")),
            }
        } else if let (Some(_), Some(r)) = (class.uniformly_rooted, class.radius.finite()) {
            match z_metrics(&history, class.center) {
                Ok(zm) => {
                    report.measured.t0 = Some(zm.t0);
                    report.measured.m_z = Some(zm.m_z);
                    match uniform_trace_bound(zm.t0 as u64, r as u64, p, zm.m_z, &g) {
                        Ok(tb) => {
                            report
                                .bounds
                                .push(bound("t2 (measured)", tb.t2, status, ctx.horizon))
                        }
                        Err(e) => report.notes.push(format!("measured bound: {e}")),
                    }
                    z_info = Some((r, zm));
                }
                Err(e) => report.diagnostics.push(format!("measurement: {e}")),
            }
            if let Some(dz) =
                center_diameter(&ctx.resolved.dynamic_graph, class.center, ctx.cfg.delta_cap)
            {
                match uniform_table_bound(r as u64, dz, p, &g, m0_max) {
                    Ok(b) => report.bounds.push(bound(
                        "uniformly rooted table bound",
                        b,
                        status,
                        ctx.horizon,
                    )),
                    Err(e) => report.notes.push(format!("table bound: {e}")),
                }
            }
        }
    }
    report.checks = sap_checks(ctx, &history, z_info.as_ref().map(|(r, z)| (*r, z)));
    report.expectations =
        ctx.expectations(AlgorithmChoice::Sap, status, &history, label == "suggested");
    finish(ctx, Algorithm::Sap(sap.config.clone()), &trace, report)
}

fn run_fixed(ctx: &Ctx) -> Result<RunOutput> {
    let (p, m) = (ctx.cfg.period, ctx.cfg.m);
    let fixed = SapFixed::new(p, m)?;
    let (init, label) = match ctx.init_vectors()?.and_then(|v| v.sap_fixed) {
        Some(v) => (v, "suggested"),
        None => {
            if let InitSource::File(path) = &ctx.cfg.init {
                return Err(anyhow!(
                    "init file {} has no sap-fixed vector",
                    path.display()
                ));
            }
            (random_fixed(ctx.n(), fixed.modulus(), ctx.seed)?, "random")
        }
    };
    let trace = run(&fixed, &ctx.resolved.dynamic_graph, init, ctx.options())?;
    let status = trace.verdict().status;
    let history = SapHistory::from_fixed(&trace, &fixed);
    let mut report = base_report(ctx.seed, label, trace.rounds(), status);
    report.measured.max_clock = Some(history.max_clock());
    report.measured.max_distinct_states = history.distinct_states().into_iter().max();
    if let Some(d) = ctx.class().and_then(|c| c.diameter.finite()) {
        // The fixed-period bound needs D <= PM/2.
        if 2 * d as u64 <= p * m {
            match strong_bound(d as u64, p, &GrowthFunction::Constant(m)) {
                Ok(b) => report
                    .bounds
                    .push(bound("3D (D <= PM/2)", b, status, ctx.horizon)),
                Err(e) => report.notes.push(format!("time bound: {e}")),
            }
        }
    }
    report.checks = sap_checks(ctx, &history, None);
    report.expectations = ctx.expectations(
        AlgorithmChoice::SapFixed,
        status,
        &history,
        label == "suggested",
    );
    finish(ctx, Algorithm::SapFixed { period: p, m }, &trace, report)
}
