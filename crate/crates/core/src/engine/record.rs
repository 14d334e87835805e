//! Line-delimited JSON trace records: one header, one line per round, one
//! summary. Field order is fixed by the struct definitions.

use serde::{Deserialize, Serialize};

use super::{Algorithm, Protocol, SyncVerdict, Trace};
use crate::graph::NodeId;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub algorithm: Algorithm,
    pub n: usize,
    pub horizon: usize,
    pub seed: Option<u64>,
    pub scenario: Option<String>,
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Line<'a, S: Serialize, R: Serialize, F: Serialize> {
    Header(&'a TraceHeader),
    Round(RoundRecord<'a, S, R, F>),
    Summary { rounds: usize, verdict: SyncVerdict },
}

#[derive(Serialize)]
pub struct RoundRecord<'a, S: Serialize, R: Serialize, F: Serialize> {
    pub t: usize,
    /// Non-self-loop edges of `G(t)`; absent for round 0.
    pub edges: Option<Vec<(NodeId, NodeId)>>,
    pub nodes: &'a [S],
    pub steps: &'a [R],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<&'a [F]>,
}

/// Serializes a trace. Verbosity 0 writes header and summary only, 1 adds
/// per-round snapshots, 2 adds full states when the trace kept them.
pub fn trace_jsonl<P: Protocol>(
    header: &TraceHeader,
    trace: &Trace<P>,
    verbosity: u8,
) -> Result<String, serde_json::Error> {
    let mut out = String::new();
    let mut push =
        |line: &Line<'_, P::Snapshot, P::Record, P::State>| -> Result<(), serde_json::Error> {
            out.push_str(&serde_json::to_string(line)?);
            out.push('\n');
            Ok(())
        };
    push(&Line::Header(header))?;
    if verbosity >= 1 {
        for t in 0..=trace.rounds() {
            push(&Line::Round(RoundRecord {
                t,
                edges: (t > 0).then(|| trace.digraph(t).edges().collect()),
                nodes: &trace.snapshots[t],
                steps: &trace.records[t],
                states: match (&trace.states, verbosity >= 2) {
                    (Some(states), true) => Some(&states[t]),
                    _ => None,
                },
            }))?;
        }
    }
    push(&Line::Summary {
        rounds: trace.rounds(),
        verdict: trace.verdict(),
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, RunOptions, SapFixed};
    use crate::graph::{Digraph, DynamicGraph};

    #[test]
    fn jsonl_layout_and_reproducibility() {
        let dg = DynamicGraph::static_graph(Digraph::new(2, [(0, 1)]).unwrap());
        let fixed = SapFixed::new(2, 2).unwrap();
        let header = TraceHeader {
            algorithm: Algorithm::SapFixed { period: 2, m: 2 },
            n: 2,
            horizon: 3,
            seed: Some(7),
            scenario: None,
        };
        let a = run(&fixed, &dg, vec![1, 2], RunOptions::full(3)).unwrap();
        let b = run(&fixed, &dg, vec![1, 2], RunOptions::full(3)).unwrap();
        let text = trace_jsonl(&header, &a, 1).unwrap();
        assert_eq!(text, trace_jsonl(&header, &b, 1).unwrap());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(
            lines[0],
            r#"{"record":"header","algorithm":{"algorithm":"sap_fixed","period":2,"m":2},"n":2,"horizon":3,"seed":7,"scenario":null}"#
        );
        assert_eq!(
            lines[2],
            r#"{"record":"round","t":1,"edges":[[0,1]],"nodes":[2,2],"steps":[{"j_min":0},{"j_min":0}]}"#
        );
        assert!(lines[5].starts_with(r#"{"record":"summary","rounds":3"#));
        assert_eq!(trace_jsonl(&header, &a, 0).unwrap().lines().count(), 2);
    }
}
