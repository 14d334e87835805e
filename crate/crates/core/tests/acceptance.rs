//! Acceptance suite: one PASS/FAIL line per criterion, then a summary.
//! Tolerances are exact throughout (integer rounds and counts).

mod common;

use std::process::ExitCode;
use std::time::Instant;

use clocksync::analysis::{self, Eccentricity};
use clocksync::engine::{
    measure_s0_t0, run, z_metrics, MinMax, RunOptions, Sap, SapFixed, SapHistory, SyncStatus,
    Trace, ZMetrics,
};
use clocksync::graph::{Digraph, DynamicGraph, NodeId, NodeSet};
use clocksync::init::{random_fixed, random_minmax, random_sap, MinMaxPreset};
use clocksync::invariants::{
    check_kernel_dominance, check_minmax_steps, check_sap_diameter, check_sap_general,
    check_sap_uniform, check_stabilized_value, check_view_semantics, CheckOutcome,
};
use clocksync::minmax::{t1_bound, table_bound_diameter};
use clocksync::sap::{
    fixed_memory_bound, sap_memory_bound, strong_bound, uniform_table_bound, uniform_trace_bound,
    GrowthFunction, SapConfig,
};
use clocksync::scenarios::{
    bidirectional_chain, chain_counterexample, h_counterexample, link_loss_adversary,
    random_connected_bidirectional, random_rooted, rooted_counterexample, round_robin_transform,
    TargetClass,
};
use common::{
    brute_diameter, brute_diameter_capped, brute_kernel, brute_rooted, naive_fixed, naive_sap,
    rounds, temporal_reach,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Interval checks on traces longer than this use windows of at most
/// `SPAN_CAP` rounds.
const FULL_SPAN_LIMIT: usize = 300;
const SPAN_CAP: usize = 100;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

struct UniformRun {
    radius: usize,
    z: ZMetrics,
}

struct SapRun {
    source: String,
    history: SapHistory,
    diameter: Option<usize>,
    uniform: Option<UniformRun>,
}

#[derive(Default)]
struct Ctx {
    sap_runs: Vec<SapRun>,
    /// Per run: max distinct clock values on one node, from criterion 1.
    chain_state_counts: Vec<usize>,
    /// Per run: `(max clock, memory bound)` from criterion 4.
    clock_maxima: Vec<(u64, Option<u64>)>,
}

fn sync_round(status: SyncStatus) -> Option<usize> {
    match status {
        SyncStatus::SynchronizedAt(t) => Some(t),
        SyncStatus::NotWithinHorizon => None,
    }
}

fn fixed_matches_oracle(trace: &Trace<SapFixed>, init: &[u64], modulus: u64) -> bool {
    naive_fixed(&trace.graphs, init, modulus) == trace.outputs
}

fn sap_matches_oracle(trace: &Trace<Sap>, init: &[(u64, u64)], p: u64, g: &GrowthFunction) -> bool {
    let naive = naive_sap(&trace.graphs, init, p, |x| {
        g.apply(x).expect("no overflow at test scale")
    });
    let got: Vec<Vec<(u64, u64)>> = trace
        .snapshots
        .iter()
        .map(|row| row.iter().map(|s| (s.clock, s.period_factor)).collect())
        .collect();
    naive == got
}

fn criterion_1(ctx: &mut Ctx) -> Verdict {
    let dg = DynamicGraph::static_graph(bidirectional_chain(5).unwrap());
    let class = analysis::classify(&dg, 5).unwrap();
    let d = class.diameter.finite().unwrap();
    let oracle_d = brute_diameter(&dg);
    let growth = GrowthFunction::Constant(10);
    let bound = strong_bound(d as u64, 2, &growth).unwrap();
    let fixed = SapFixed::new(2, 10).unwrap();
    let mut worst = 0;
    let mut failures = Vec::new();
    let mut oracle_ok = true;
    for seed in 0..100 {
        let init = random_fixed(5, 1000, seed).unwrap();
        let trace = run(&fixed, &dg, init.clone(), RunOptions::full(60)).unwrap();
        oracle_ok &= fixed_matches_oracle(&trace, &init, 20);
        match sync_round(trace.verdict().status) {
            Some(t) if t as u64 <= bound => worst = worst.max(t),
            other => failures.push((seed, other)),
        }
        let history = SapHistory::from_fixed(&trace, &fixed);
        ctx.chain_state_counts
            .push(*history.distinct_states().iter().max().unwrap());
        ctx.sap_runs.push(SapRun {
            source: format!("c1 seed {seed}"),
            history,
            diameter: Some(d),
            uniform: None,
        });
    }
    verdict(
        d == 4 && oracle_d == Some(4) && bound == 12 && failures.is_empty() && oracle_ok,
        format!(
            "D = {d} (oracle {oracle_d:?}), bound = {bound}, worst SynchronizedAt = {worst} over 100 runs, \
             over-bound runs {failures:?}, engine = oracle: {oracle_ok}"
        ),
    )
}

fn criterion_2(ctx: &mut Ctx) -> Verdict {
    let s = chain_counterexample(2, 3, 5).unwrap();
    let fixed = SapFixed::new(2, 3).unwrap();
    let init = s.suggested_init.sap_fixed.clone().unwrap();
    let trace = run(&fixed, &s.dynamic_graph, init.clone(), RunOptions::full(60)).unwrap();
    let history = SapHistory::from_fixed(&trace, &fixed);
    let violations = s.expected.closed_form.as_ref().unwrap().check(&history);
    let oracle_ok = fixed_matches_oracle(&trace, &init, 6);
    let status = trace.verdict().status;
    let d = analysis::classify(&s.dynamic_graph, 5)
        .unwrap()
        .diameter
        .finite();
    ctx.sap_runs.push(SapRun {
        source: "c2 chain".into(),
        history,
        diameter: d,
        uniform: None,
    });
    verdict(
        status == SyncStatus::NotWithinHorizon && violations.is_empty() && oracle_ok,
        format!(
            "{status:?} over 60 rounds, closed-form violations {} across 61 rounds, engine = oracle: {oracle_ok}",
            violations.len()
        ),
    )
}

fn criterion_3(ctx: &mut Ctx) -> Verdict {
    let s = h_counterexample(2, 4).unwrap();
    let fixed = SapFixed::new(2, 4).unwrap();
    let init = s.suggested_init.sap_fixed.clone().unwrap();
    let trace = run(&fixed, &s.dynamic_graph, init.clone(), RunOptions::full(40)).unwrap();
    let history = SapHistory::from_fixed(&trace, &fixed);
    let violations = s.expected.closed_form.as_ref().unwrap().check(&history);
    let oracle_ok = fixed_matches_oracle(&trace, &init, 8);
    let status = trace.verdict().status;
    ctx.sap_runs.push(SapRun {
        source: "c3 H".into(),
        history,
        diameter: None,
        uniform: None,
    });
    verdict(
        status == SyncStatus::NotWithinHorizon && violations.is_empty() && oracle_ok,
        format!(
            "{status:?} over 40 rounds, closed-form violations {} across 41 rounds, engine = oracle: {oracle_ok}",
            violations.len()
        ),
    )
}

/// Center diameter for the memory bound; `None` when infinite.
fn center_diameter(dg: &DynamicGraph, z: NodeSet) -> Option<usize> {
    let induced = dg.induced(z).ok()?;
    analysis::classify(&induced, 1).ok()?.diameter.finite()
}

fn criterion_4(ctx: &mut Ctx) -> Verdict {
    let growth = GrowthFunction::Successor;
    let sap = Sap::new(SapConfig::new(2, growth.clone()).unwrap());

    // Static H with the adversarial fixed-period initialization, all M = 4.
    let s = h_counterexample(2, 4).unwrap();
    let class = s.class.clone().unwrap();
    let init = s.suggested_init.sap.clone().unwrap();
    let trace = run(&sap, &s.dynamic_graph, init.clone(), RunOptions::full(200)).unwrap();
    let pairs: Vec<(u64, u64)> = init.iter().map(|x| (x.clock, x.period_factor)).collect();
    let oracle_ok = sap_matches_oracle(&trace, &pairs, 2, &growth);
    let history = SapHistory::from_sap(&trace, &sap);
    let zm = z_metrics(&history, class.center).unwrap();
    let r = class.radius.finite().unwrap();
    let tb = uniform_trace_bound(zm.t0 as u64, r as u64, 2, zm.m_z, &growth).unwrap();
    let table = uniform_table_bound(r as u64, 1, 2, &growth, 4).unwrap();
    let h_sync = sync_round(trace.verdict().status);
    let h_ok = h_sync.is_some_and(|t| t as u64 <= tb.t2)
        && (zm.t0, zm.m_z, r, tb.q1, tb.t1, tb.t2) == (1, 4, 2, 6, 13, 23)
        && oracle_ok;
    ctx.clock_maxima
        .push((history.max_clock(), sap_memory_bound(1, 2, &growth, 4).ok()));
    ctx.sap_runs.push(SapRun {
        source: "c4 H".into(),
        history,
        diameter: None,
        uniform: Some(UniformRun {
            radius: r,
            z: zm.clone(),
        }),
    });
    let h_detail = format!(
        "H: SynchronizedAt {h_sync:?}, t0_Z = {}, M_Z = {}, R = {r}, q1 = {}, t1 = {}, t2 = {}, table bound {table}, \
         engine = oracle: {oracle_ok}",
        zm.t0, zm.m_z, tb.q1, tb.t1, tb.t2
    );

    let mut unsynced = Vec::new();
    let mut within_t2 = 0;
    let mut oracle_all = true;
    for seed in 0..50u64 {
        let n = 3 + (seed % 4) as usize;
        let delta = 1 + (seed % 2) as usize;
        let sc = random_rooted(n, delta, TargetClass::UniformlyRooted, true, seed).unwrap();
        let class = sc.class.clone().unwrap();
        let init = random_sap(n, 50, 4, seed).unwrap();
        let m0_max = init.iter().map(|x| x.period_factor).max().unwrap();
        let trace = run(
            &sap,
            &sc.dynamic_graph,
            init.clone(),
            RunOptions::full(2000),
        )
        .unwrap();
        let pairs: Vec<(u64, u64)> = init.iter().map(|x| (x.clock, x.period_factor)).collect();
        oracle_all &= sap_matches_oracle(&trace, &pairs, 2, &growth);
        let history = SapHistory::from_sap(&trace, &sap);
        let sync = sync_round(trace.verdict().status);
        if sync.is_none() {
            unsynced.push(seed);
        }
        let r = class.radius.finite().unwrap();
        let uniform = z_metrics(&history, class.center)
            .ok()
            .map(|z| UniformRun { radius: r, z });
        if let (Some(u), Some(t)) = (&uniform, sync) {
            if let Ok(tb) = uniform_trace_bound(u.z.t0 as u64, r as u64, 2, u.z.m_z, &growth) {
                within_t2 += usize::from(t as u64 <= tb.t2);
            }
        }
        let bound = center_diameter(&sc.dynamic_graph, class.center)
            .and_then(|dz| sap_memory_bound(dz as u64, 2, &growth, m0_max).ok());
        ctx.clock_maxima.push((history.max_clock(), bound));
        ctx.sap_runs.push(SapRun {
            source: format!("c4 random seed {seed}"),
            history,
            diameter: class.diameter.finite(),
            uniform,
        });
    }
    verdict(
        h_ok && unsynced.is_empty() && oracle_all,
        format!(
            "{h_detail}; random uniformly rooted: {}/50 synchronized within 2000 (unsynchronized seeds {unsynced:?}), \
             {within_t2}/50 within their measured t2, engine = oracle: {oracle_all}",
            50 - unsynced.len()
        ),
    )
}

fn criterion_5(ctx: &mut Ctx) -> Verdict {
    let growth = GrowthFunction::Successor;
    let s = rooted_counterexample(2, 2, 1, growth.clone(), 4).unwrap();
    // Block recurrence by hand: length PM - c, M' = g^(PM-c-1)(M), c' = PM - c.
    let (mut m, mut c, mut t) = (2u64, 1u64, 0u64);
    let mut expected = vec![(t, m, c)];
    for _ in 0..4 {
        let len = 2 * m - c;
        t += len;
        m += len - 1;
        c = len;
        expected.push((t, m, c));
    }
    let Some(clocksync::scenarios::ClosedForm::RootedBlocks { boundaries, .. }) =
        &s.expected.closed_form
    else {
        return verdict(false, "scenario lacks block expectations");
    };
    let listed: Vec<(u64, u64, u64)> = boundaries
        .iter()
        .map(|b| (b.round as u64, b.m, b.c))
        .collect();
    let horizon = s.default_horizon.unwrap();
    let sap = Sap::new(SapConfig::new(2, growth.clone()).unwrap());
    let init = s.suggested_init.sap.clone().unwrap();
    let trace = run(
        &sap,
        &s.dynamic_graph,
        init.clone(),
        RunOptions::full(horizon),
    )
    .unwrap();
    let pairs: Vec<(u64, u64)> = init.iter().map(|x| (x.clock, x.period_factor)).collect();
    let oracle_ok = sap_matches_oracle(&trace, &pairs, 2, &growth);
    let history = SapHistory::from_sap(&trace, &sap);
    let violations = s.expected.closed_form.as_ref().unwrap().check(&history);
    let class = s.class.clone().unwrap();
    let form = s.analysis_form.clone().unwrap();
    let (starts, cap) = common::exact_limits(&form);
    let center_oracle: Vec<usize> = (0..3)
        .filter(|&i| common::brute_eccentricity(&form, i, starts, cap).is_some())
        .collect();
    let status = trace.verdict().status;
    ctx.sap_runs.push(SapRun {
        source: "c5 rooted blocks".into(),
        history,
        diameter: None,
        uniform: None,
    });
    verdict(
        status == SyncStatus::NotWithinHorizon
            && listed == expected
            && violations.is_empty()
            && class.rooted_with_delay == Some(2)
            && class.center == NodeSet::singleton(NodeId(0))
            && center_oracle == vec![0]
            && oracle_ok,
        format!(
            "{status:?} over {horizon} rounds, boundaries (t, M_i, C_i) {listed:?} (hand recurrence agrees: {}), \
             boundary violations {}, rooted delay {:?}, center {:?} (oracle {center_oracle:?}), engine = oracle: {oracle_ok}",
            listed == expected,
            violations.len(),
            class.rooted_with_delay,
            class.center
        ),
    )
}

fn criterion_6() -> Verdict {
    let preset = MinMaxPreset {
        h_max: 0,
        ..MinMaxPreset::default()
    };
    let mut strong_fail = Vec::new();
    let mut diam_mismatch = Vec::new();
    let mut worst_slack = i64::MAX;
    for seed in 0..100u64 {
        let n = 2 + (seed % 5) as usize;
        let delta = 1 + ((seed / 5) % 2) as usize;
        let sc = random_rooted(n, delta, TargetClass::StronglyConnected, false, seed).unwrap();
        let d = sc.class.as_ref().unwrap().diameter.finite().unwrap();
        if brute_diameter(&sc.dynamic_graph) != Some(d) {
            diam_mismatch.push(seed);
        }
        let bound = table_bound_diameter(d as u64, 0);
        let init = random_minmax(n, &preset, seed).unwrap();
        let trace = run(&MinMax, &sc.dynamic_graph, init, RunOptions::early(200, 10)).unwrap();
        match sync_round(trace.verdict().status) {
            Some(t) if t as u64 <= bound => worst_slack = worst_slack.min(bound as i64 - t as i64),
            other => strong_fail.push((seed, other, bound)),
        }
    }

    let mut rooted_fail = Vec::new();
    let mut t1_fail = Vec::new();
    let mut measure_fail = Vec::new();
    let mut check_fail = Vec::new();
    let mut samples = Vec::new();
    for seed in 0..100u64 {
        let n = 3 + (seed % 4) as usize;
        let delta = 1 + ((seed / 4) % 2) as usize;
        let sc = random_rooted(n, delta, TargetClass::Rooted, true, seed).unwrap();
        let class = sc.class.clone().unwrap();
        let rooted_delta = class.rooted_with_delay.unwrap();
        let (p, _) = sc.dynamic_graph.period().unwrap();
        let init = random_minmax(n, &preset, seed).unwrap();
        let trace = run(
            &MinMax,
            &sc.dynamic_graph,
            init,
            RunOptions::early(2000, 60),
        )
        .unwrap();
        let Some(sync) = sync_round(trace.verdict().status) else {
            rooted_fail.push(seed);
            continue;
        };
        let settling = match measure_s0_t0(&trace, class.kernel, rooted_delta, p + 1) {
            Ok(s) => s,
            Err(e) => {
                measure_fail.push((seed, e.to_string()));
                continue;
            }
        };
        let t1 = t1_bound(
            settling.s0 as u64,
            settling.t0 as u64,
            settling.reach as u64,
            0,
        );
        if (t1 as usize) < sync {
            t1_fail.push((seed, sync, t1));
        }
        let mut checks: Vec<CheckOutcome> = check_minmax_steps(&trace);
        checks.push(check_kernel_dominance(&trace, class.kernel, settling.t0));
        match settling.c0() {
            Some(c0) => checks.push(check_stabilized_value(&trace, c0, t1 as usize)),
            None => check_fail.push((seed, "kernel constants differ".to_string())),
        }
        for c in checks.iter().filter(|c| !c.passed()) {
            check_fail.push((seed, c.name.clone()));
        }
        if samples.len() < 3 {
            samples.push(format!(
                "seed {seed}: s0 = {}, t0 = {}, t1 = {t1}, synchronized at {sync}",
                settling.s0, settling.t0
            ));
        }
    }
    verdict(
        strong_fail.is_empty()
            && diam_mismatch.is_empty()
            && rooted_fail.is_empty()
            && t1_fail.is_empty()
            && measure_fail.is_empty()
            && check_fail.is_empty(),
        format!(
            "strongly connected: {}/100 within 2D (min slack {worst_slack}, failures {strong_fail:?}, diameter \
             oracle mismatches {diam_mismatch:?}); rooted non-uniform: {}/100 synchronized within 2000, t1 below \
             observed {t1_fail:?}, measurement failures {measure_fail:?}, invariant failures {check_fail:?}; {}",
            100 - strong_fail.len(),
            100 - rooted_fail.len(),
            samples.join("; ")
        ),
    )
}

fn criterion_7() -> Verdict {
    let preset = MinMaxPreset {
        value_max: 30,
        depth_max: 5,
        h_max: 6,
        max_pairs: 4,
    };
    let mut violations = 0usize;
    let mut instances = 0usize;
    let mut library_disagrees = 0usize;
    for seed in 0..50u64 {
        let n = 2 + (seed % 4) as usize;
        let prob = 0.15 + 0.1 * (seed % 5) as f64;
        let dg = DynamicGraph::generator(n, move |t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j)
                .filter(|_| rng.gen_bool(prob))
                .collect();
            Digraph::new(n, edges)
        })
        .unwrap();
        let init = random_minmax(n, &preset, seed).unwrap();
        let trace = run(&MinMax, &dg, init, RunOptions::full(20).keeping_states()).unwrap();
        let states = trace.states.as_ref().unwrap();
        let graphs = rounds(&dg, 20);
        for t in 1..=20 {
            for d in 0..t {
                let reach = temporal_reach(&graphs, n, t - d + 1, t);
                for i in 0..n {
                    let mut oracle: Vec<u64> = (0..n)
                        .filter(|&j| reach[j][i])
                        .filter_map(|j| states[t - d][j].view.min_value())
                        .map(|c| c + d as u64)
                        .collect();
                    oracle.sort_unstable();
                    oracle.dedup();
                    let held: Vec<u64> = states[t][i]
                        .view
                        .pairs()
                        .filter(|&(_, depth)| depth == d as u64)
                        .map(|(v, _)| v)
                        .collect();
                    instances += 1;
                    violations += usize::from(held != oracle);
                }
            }
        }
        library_disagrees += check_view_semantics(&trace).violations.len();
    }
    verdict(
        violations == 0 && library_disagrees == 0,
        format!(
            "{instances} (i, t, d) instances over 50 runs, oracle violations {violations}, library checker violations \
             {library_disagrees}"
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut failures = Vec::new();
    let mut windows = 0;
    for seed in 0..30u64 {
        let n = 3 + (seed % 4) as usize;
        let delta = 1 + ((seed / 4) % 2) as usize;
        let sc = random_rooted(n, delta, TargetClass::Rooted, seed % 2 == 0, 1000 + seed).unwrap();
        let dg = &sc.dynamic_graph;
        let d = sc.class.as_ref().unwrap().rooted_with_delay.unwrap();
        let (p, _) = dg.period().unwrap();
        let horizon = p + 1 + 5 * d * n;
        let v = analysis::kernel_reach_bound_check(dg, d, horizon).unwrap();
        windows += v.windows_checked;
        let kernel: Vec<usize> = v.kernel.iter().map(NodeId::index).collect();
        let oracle_kernel = brute_kernel(dg);
        let graphs = rounds(dg, horizon + v.reach);
        let oracle_pass = (v.s0..=horizon).all(|t| {
            let reach = temporal_reach(&graphs, n, t, t + v.reach);
            (0..n).all(|i| oracle_kernel.iter().any(|&k| reach[k][i]))
        });
        if !v.passed() || kernel != oracle_kernel || !oracle_pass || v.s0 != p + 1 {
            failures.push((seed, v.counterexample, kernel, oracle_kernel, oracle_pass));
        }
    }
    verdict(
        failures.is_empty(),
        format!("30 schedules, {windows} windows checked, failures {failures:?}"),
    )
}

fn criterion_9() -> Verdict {
    let mut unrooted = 0;
    let mut unsynced = Vec::new();
    let mut worst = 0;
    for seed in 0..20u64 {
        let s = link_loss_adversary(6, 9, seed).unwrap();
        for t in 1..=500 {
            match s.dynamic_graph.digraph(t) {
                Ok(g) if brute_rooted(&g) && g.edges().count() == 30 - 9 => {}
                _ => unrooted += 1,
            }
        }
        let preset = MinMaxPreset {
            h_max: 10,
            ..MinMaxPreset::default()
        };
        let init = random_minmax(6, &preset, seed).unwrap();
        let trace = run(&MinMax, &s.dynamic_graph, init, RunOptions::early(500, 3)).unwrap();
        match sync_round(trace.verdict().status) {
            Some(t) => worst = worst.max(t),
            None => unsynced.push(seed),
        }
    }
    verdict(
        unrooted == 0 && unsynced.is_empty(),
        format!(
            "10000 emitted digraphs, unrooted or wrong loss count {unrooted}; MinMax synchronized in {}/20 runs \
             (latest at round {worst}, unsynchronized seeds {unsynced:?})",
            20 - unsynced.len()
        ),
    )
}

fn criterion_10(ctx: &mut Ctx) -> Verdict {
    let mut failures = Vec::new();
    let mut worst_ratio = (0, 1);
    let mut oracle_ok = true;
    for k in 0..20u64 {
        let n = 3 + (k % 6) as usize;
        let g = random_connected_bidirectional(n, 0.3, k).unwrap();
        let s = match round_robin_transform(&g) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("graph {k}: {e}"));
                continue;
            }
        };
        let d = s.class.as_ref().unwrap().diameter;
        let oracle_d = brute_diameter_capped(&s.dynamic_graph, 3 * n);
        if d.finite() != oracle_d || d > Eccentricity::Finite(3 * n) {
            failures.push(format!(
                "graph {k}: diameter {d} (oracle {oracle_d:?}) vs 3n = {}",
                3 * n
            ));
        }
        let p = 6 * n as u64;
        let fixed = SapFixed::new(p, 1).unwrap();
        for seed in 0..20u64 {
            let init = random_fixed(n, p, 100 * k + seed).unwrap();
            let trace = run(
                &fixed,
                &s.dynamic_graph,
                init.clone(),
                RunOptions::full(21 * n),
            )
            .unwrap();
            oracle_ok &= fixed_matches_oracle(&trace, &init, p);
            match sync_round(trace.verdict().status) {
                Some(t) if t <= 9 * n => {
                    if t * worst_ratio.1 > worst_ratio.0 * n {
                        worst_ratio = (t, n);
                    }
                }
                other => failures.push(format!(
                    "graph {k} seed {seed}: {other:?} vs 9n = {}",
                    9 * n
                )),
            }
            ctx.sap_runs.push(SapRun {
                source: format!("c10 graph {k} seed {seed}"),
                history: SapHistory::from_fixed(&trace, &fixed),
                diameter: d.finite(),
                uniform: None,
            });
        }
    }
    verdict(
        failures.is_empty() && oracle_ok,
        format!(
            "20 graphs x 20 inits, largest stabilization/n = {}/{}, engine = oracle: {oracle_ok}, failures {failures:?}",
            worst_ratio.0, worst_ratio.1
        ),
    )
}

fn criterion_11(ctx: &Ctx) -> Verdict {
    let mut totals: Vec<(String, usize, usize)> = Vec::new();
    let mut first = Vec::new();
    let mut uniform_runs = 0;
    for r in &ctx.sap_runs {
        let span = (r.history.rounds() > FULL_SPAN_LIMIT).then_some(SPAN_CAP);
        let mut outcomes = check_sap_general(&r.history, span);
        if let Some(d) = r.diameter {
            outcomes.extend(check_sap_diameter(&r.history, d));
        }
        if let Some(u) = &r.uniform {
            uniform_runs += 1;
            outcomes.extend(check_sap_uniform(&r.history, u.radius, &u.z));
        }
        for o in outcomes {
            if let Some(v) = o.violations.first() {
                if first.len() < 3 {
                    first.push(format!(
                        "{}: {} at {}: {}",
                        r.source, v.check, v.round, v.detail
                    ));
                }
            }
            match totals.iter_mut().find(|(name, _, _)| *name == o.name) {
                Some(entry) => {
                    entry.1 += o.instances;
                    entry.2 += o.violations.len();
                }
                None => totals.push((o.name.clone(), o.instances, o.violations.len())),
            }
        }
    }
    let all_zero = totals.iter().all(|t| t.2 == 0);
    let table: Vec<String> = totals
        .iter()
        .map(|(name, inst, viol)| format!("{name} {viol}/{inst}"))
        .collect();
    verdict(
        all_zero && uniform_runs > 0,
        format!(
            "{} SAP runs ({uniform_runs} with center checks); violations/instances: {}{}",
            ctx.sap_runs.len(),
            table.join(", "),
            if first.is_empty() {
                String::new()
            } else {
                format!("; first: {}", first.join(" | "))
            }
        ),
    )
}

fn criterion_12(ctx: &Ctx) -> Verdict {
    let fixed_bound = fixed_memory_bound(4, 2).unwrap() as usize;
    let worst_states = ctx.chain_state_counts.iter().copied().max().unwrap_or(0);
    let states_ok = worst_states <= fixed_bound;

    let checked: Vec<(u64, u64)> = ctx
        .clock_maxima
        .iter()
        .filter_map(|&(c, b)| b.map(|b| (c, b)))
        .collect();
    let clocks_ok = !checked.is_empty() && checked.iter().all(|&(c, b)| c < b);
    let h_entry = ctx.clock_maxima.first().copied();

    // Same chain with the period factor sized from the diameter: M = ceil(2D/P).
    let dg = DynamicGraph::static_graph(bidirectional_chain(5).unwrap());
    let sized = SapFixed::new(2, 4).unwrap();
    let sized_worst = (0..100)
        .map(|seed| {
            let trace = run(
                &sized,
                &dg,
                random_fixed(5, 1000, seed).unwrap(),
                RunOptions::full(60),
            )
            .unwrap();
            *SapHistory::from_fixed(&trace, &sized)
                .distinct_states()
                .iter()
                .max()
                .unwrap()
        })
        .max()
        .unwrap();

    verdict(
        states_ok && clocks_ok,
        format!(
            "criterion 1 runs (M = 10): max distinct clock values per node {worst_states} vs ceil(2B/P)P = \
             {fixed_bound} with B = D = 4; criterion 4 runs: {} of {} have a finite center diameter, max clock below \
             (P+1) g^T(max M_i(0)) in all of them: {clocks_ok} (H run: max clock {:?}, bound {:?}); supplementary: \
             with M = ceil(2D/P) = 4 the same runs visit at most {sized_worst} values",
            checked.len(),
            ctx.clock_maxima.len(),
            h_entry.map(|e| e.0),
            h_entry.and_then(|e| e.1),
        ),
    )
}

fn main() -> ExitCode {
    let mut ctx = Ctx::default();
    let mut results: Vec<(usize, Verdict)> = Vec::new();
    let mut report = |id: usize, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        println!(
            "criterion {id:>2} {} ({:.1}s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
        results.push((id, v));
    };
    report(1, &mut || criterion_1(&mut ctx));
    report(2, &mut || criterion_2(&mut ctx));
    report(3, &mut || criterion_3(&mut ctx));
    report(4, &mut || criterion_4(&mut ctx));
    report(5, &mut || criterion_5(&mut ctx));
    report(6, &mut criterion_6);
    report(7, &mut criterion_7);
    report(8, &mut criterion_8);
    report(9, &mut criterion_9);
    report(10, &mut || criterion_10(&mut ctx));
    report(11, &mut || criterion_11(&ctx));
    report(12, &mut || criterion_12(&ctx));
    let failed: Vec<usize> = results
        .iter()
        .filter(|(_, v)| !v.pass)
        .map(|(id, _)| *id)
        .collect();
    println!(
        "acceptance: {}/{} criteria passed{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failed: {failed:?}")
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
