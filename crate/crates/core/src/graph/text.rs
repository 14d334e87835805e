//! Line-oriented schedule files.
//!
//! ```text
//! n=3
//! round 1: (0,1) (0,2)
//! cycle:
//! round 2: (1,2) (2,1)
//! ```
//!
//! Rounds are numbered consecutively from 1 and list their non-self-loop
//! edges. Rounds after the `cycle:` marker repeat forever. Blank lines and
//! `#` comments are ignored, and so are lines starting with `init`, which
//! belong to the initial-state section of scenario files.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Digraph, DynamicGraph, GraphError, Schedule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `n=<count>` header")]
    MissingHeader,
    #[error("missing `cycle:` marker or no rounds after it")]
    MissingCycle,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Writes a prefix/cycle schedule. Generators have no finite text form.
pub fn to_text(dg: &DynamicGraph) -> Result<String, GraphError> {
    let Schedule::PrefixCycle { prefix, cycle, .. } = dg.schedule() else {
        return Err(GraphError::NotPeriodic);
    };
    let mut out = format!("n={}\n", dg.node_count());
    let mut round = 1;
    for g in prefix {
        write_round(&mut out, round, g);
        round += 1;
    }
    out.push_str("cycle:\n");
    for g in cycle {
        write_round(&mut out, round, g);
        round += 1;
    }
    Ok(out)
}

fn write_round(out: &mut String, round: usize, g: &Digraph) {
    let _ = write!(out, "round {round}:");
    for (i, j) in g.edges() {
        let _ = write!(out, " ({i},{j})");
    }
    out.push('\n');
}

pub fn parse(input: &str) -> Result<DynamicGraph, ParseError> {
    let mut n: Option<usize> = None;
    let mut prefix = Vec::new();
    let mut cycle = Vec::new();
    let mut in_cycle = false;
    let mut next_round = 1;

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with("init") {
            continue;
        }
        if let Some(count) = line.strip_prefix("n=") {
            if n.is_some() {
                return Err(syntax(line_no, "duplicate header"));
            }
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| syntax(line_no, format!("bad node count `{count}`")))?;
            Digraph::identity(count).map_err(|e| syntax(line_no, e.to_string()))?;
            n = Some(count);
            continue;
        }
        let n = n.ok_or(ParseError::MissingHeader)?;
        if line == "cycle:" {
            if in_cycle {
                return Err(syntax(line_no, "duplicate `cycle:` marker"));
            }
            in_cycle = true;
            continue;
        }
        let rest = line
            .strip_prefix("round")
            .ok_or_else(|| syntax(line_no, format!("unexpected `{line}`")))?;
        let (num, edges) = rest
            .split_once(':')
            .ok_or_else(|| syntax(line_no, "expected `round <t>:`"))?;
        let round: usize = num
            .trim()
            .parse()
            .map_err(|_| syntax(line_no, format!("bad round number `{}`", num.trim())))?;
        if round != next_round {
            return Err(syntax(
                line_no,
                format!("expected round {next_round}, found {round}"),
            ));
        }
        next_round += 1;
        let g = Digraph::new(n, parse_edges(edges, line_no)?)
            .map_err(|e| syntax(line_no, e.to_string()))?;
        if in_cycle {
            cycle.push(g);
        } else {
            prefix.push(g);
        }
    }
    if n.is_none() {
        return Err(ParseError::MissingHeader);
    }
    if cycle.is_empty() {
        return Err(ParseError::MissingCycle);
    }
    Ok(DynamicGraph::prefix_cycle(prefix, cycle)?)
}

fn parse_edges(s: &str, line: usize) -> Result<Vec<(usize, usize)>, ParseError> {
    let mut edges = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| syntax(line, format!("expected `(` at `{rest}`")))?;
        let close = body
            .find(')')
            .ok_or_else(|| syntax(line, "unterminated edge"))?;
        let (a, b) = body[..close]
            .split_once(',')
            .ok_or_else(|| syntax(line, format!("bad edge `({})`", &body[..close])))?;
        let parse_node = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| syntax(line, format!("bad node `{}`", v.trim())))
        };
        edges.push((parse_node(a)?, parse_node(b)?));
        rest = body[close + 1..].trim_start();
    }
    Ok(edges)
}
