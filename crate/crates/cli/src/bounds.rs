//! Reference table of stabilization-time and memory bounds.

use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Args;
use clocksync::analysis;
use clocksync::minmax::{table_bound_diameter, table_bound_uniform};
use clocksync::sap::{
    fixed_memory_bound, sap_memory_bound, strong_bound, uniform_table_bound, GrowthFunction,
};
use serde::Serialize;

#[derive(Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    period: u64,
    #[arg(long, default_value = "successor", value_parser = crate::parse_growth)]
    growth: GrowthFunction,
    /// Largest initial period factor.
    #[arg(long, default_value_t = 1)]
    m0: u64,
    /// Largest initial `h` for MinMax.
    #[arg(long, default_value_t = 0)]
    h0: u64,
    /// Dynamic diameter `D`.
    #[arg(long)]
    diameter: Option<u64>,
    /// Radius `R` of a uniformly rooted schedule.
    #[arg(long)]
    radius: Option<u64>,
    /// Diameter of the center's induced schedule.
    #[arg(long)]
    center_diameter: Option<u64>,
    /// Node count `|V|`.
    #[arg(long)]
    nodes: Option<u64>,
    /// Known upper bound `B` on the diameter or radius; defaults to `D` or `R`.
    #[arg(long)]
    b: Option<u64>,
    /// Take `D`, `R`, the center diameter and `|V|` from a schedule file.
    #[arg(long)]
    schedule: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 8)]
    delta_cap: usize,
}

#[derive(Serialize)]
struct Row {
    record: &'static str,
    assumption: String,
    algorithm: String,
    kind: &'static str,
    value: Option<u64>,
    note: String,
}

fn row(assumption: &str, algorithm: &str, kind: &'static str, value: Result<u64, String>) -> Row {
    let (value, note) = match value {
        Ok(v) => (Some(v), String::new()),
        Err(e) => (None, e),
    };
    Row {
        record: "bound",
        assumption: assumption.to_owned(),
        algorithm: algorithm.to_owned(),
        kind,
        value,
        note,
    }
}

fn reference(assumption: &str, kind: &'static str, value: u64) -> Row {
    Row {
        note: "literature reference, not implemented".into(),
        ..row(assumption, "SynchMod", kind, Ok(value))
    }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

pub fn cmd_bounds(a: &BoundsArgs) -> Result<ExitCode> {
    if a.period == 0 {
        bail!("period must be positive");
    }
    let (mut d, mut r, mut dz, mut n) = (a.diameter, a.radius, a.center_diameter, a.nodes);
    if let Some(path) = &a.schedule {
        let (dg, _) = crate::config::load_schedule(path)?;
        let class = analysis::classify(&dg, a.delta_cap)?;
        d = d.or(class.diameter.finite().map(|x| x as u64));
        n = n.or(Some(dg.node_count() as u64));
        if class.uniformly_rooted.is_some() {
            r = r.or(class.radius.finite().map(|x| x as u64));
            if dz.is_none() {
                if let Ok(induced) = dg.induced(class.center) {
                    dz = analysis::classify(&induced, a.delta_cap)?
                        .diameter
                        .finite()
                        .map(|x| x as u64);
                }
            }
        }
    }
    let p = a.period;
    let g = &a.growth;
    let err = |e: clocksync::sap::BoundError| e.to_string();
    let mut rows = Vec::new();

    if let Some(d) = d {
        let b = a.b.unwrap_or(d);
        let fixed_m = ceil_div(2 * b, p).max(1);
        let cond = format!("diam = {d} <= B = {b}");
        rows.push(row(
            &cond,
            "MinMax",
            "time",
            Ok(table_bound_diameter(d, a.h0)),
        ));
        rows.push(row(
            &cond,
            &format!("SAP constant:{fixed_m}"),
            "time",
            strong_bound(d, p, &GrowthFunction::Constant(fixed_m)).map_err(err),
        ));
        rows.push(row(
            &cond,
            &format!("SAP constant:{fixed_m}"),
            "memory",
            fixed_memory_bound(b, p).map_err(err),
        ));
        rows.push(row(
            &cond,
            &format!("SAP {g}"),
            "time",
            strong_bound(d, p, g).map_err(err),
        ));
        rows.push(row(
            &cond,
            &format!("SAP {g}"),
            "memory",
            sap_memory_bound(d, p, g, a.m0).map_err(err),
        ));
        rows.push(reference(&cond, "time", 4 * p * ceil_div(b, p)));
        rows.push(reference(&cond, "memory", b));
    }
    if let Some(r) = r {
        let b = a.b.unwrap_or(r);
        let cond = format!("uniformly rooted, rad = {r} <= B = {b}");
        match dz {
            Some(dz) => {
                let cond_z = format!("{cond}, diam(Z) = {dz}");
                rows.push(row(
                    &cond_z,
                    "MinMax",
                    "time",
                    Ok(table_bound_uniform(dz, r, a.h0)),
                ));
                rows.push(row(
                    &cond_z,
                    &format!("SAP {g}"),
                    "time",
                    uniform_table_bound(r, dz, p, g, a.m0).map_err(err),
                ));
            }
            None => rows.push(row(
                &cond,
                "SAP / MinMax",
                "time",
                Err("needs --center-diameter".into()),
            )),
        }
        match n {
            Some(n) => rows.push(reference(&cond, "time", 6 * p * n * ceil_div(b, p))),
            None => rows.push(row(&cond, "SynchMod", "time", Err("needs --nodes".into()))),
        }
    }
    if rows.is_empty() {
        bail!("give --diameter, --radius or --schedule");
    }

    println!(
        "{:<44} {:<20} {:<7} {:>12}  note",
        "assumption", "algorithm", "kind", "bound"
    );
    for row in &rows {
        let v = row.value.map_or("-".to_string(), |v| v.to_string());
        println!(
            "{:<44} {:<20} {:<7} {:>12}  {}",
            row.assumption, row.algorithm, row.kind, v, row.note
        );
    }
    for row in &rows {
        println!("{}", serde_json::to_string(row)?);
    }
    Ok(ExitCode::SUCCESS)
}
