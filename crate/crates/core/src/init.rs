//! Initial-state presets and the `init` section of scenario files.
//!
//! ```text
//! init sap-fixed: 0 3 3
//! init sap: 1/4 1/4 0/4
//! init minmax: 0;0;5@0,3@1 2;0;4@0
//! ```
//!
//! SAP entries are `clock/period_factor`; MinMax entries are
//! `h;clock;value@depth,...` with an empty pair list allowed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minmax::{MinMaxState, View};
use crate::sap::SapState;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InitError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid preset: {0}")]
    Preset(String),
}

/// Ranges for seeded MinMax views. Every node gets between 1 and
/// `max_pairs` pairs, so the degenerate empty-view case never arises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinMaxPreset {
    pub value_max: u64,
    pub depth_max: u64,
    pub h_max: u64,
    pub max_pairs: usize,
}

impl Default for MinMaxPreset {
    fn default() -> Self {
        Self {
            value_max: 50,
            depth_max: 8,
            h_max: 0,
            max_pairs: 4,
        }
    }
}

pub fn random_minmax(
    n: usize,
    preset: &MinMaxPreset,
    seed: u64,
) -> Result<Vec<MinMaxState>, InitError> {
    if preset.max_pairs == 0 {
        return Err(InitError::Preset("max_pairs must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let k = rng.gen_range(1..=preset.max_pairs);
            let view = View::from_pairs((0..k).map(|_| {
                (
                    rng.gen_range(0..=preset.value_max),
                    rng.gen_range(0..=preset.depth_max),
                )
            }));
            let h = rng.gen_range(0..=preset.h_max);
            let clock = rng.gen_range(0..=preset.value_max);
            MinMaxState::new(h, view, clock)
        })
        .collect())
}

/// Clocks uniform in `[0, clock_max]`, factors uniform in `[1, m_max]`.
pub fn random_sap(
    n: usize,
    clock_max: u64,
    m_max: u64,
    seed: u64,
) -> Result<Vec<SapState>, InitError> {
    if m_max == 0 {
        return Err(InitError::Preset("period factors start at 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| SapState::new(rng.gen_range(0..=clock_max), rng.gen_range(1..=m_max)))
        .collect())
}

/// Clocks uniform in `[0, modulus)`.
pub fn random_fixed(n: usize, modulus: u64, seed: u64) -> Result<Vec<u64>, InitError> {
    if modulus == 0 {
        return Err(InitError::Preset("modulus must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| rng.gen_range(0..modulus)).collect())
}

/// Per-algorithm initial vectors; absent entries have no suggestion.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitVectors {
    pub minmax: Option<Vec<MinMaxState>>,
    pub sap: Option<Vec<SapState>>,
    pub sap_fixed: Option<Vec<u64>>,
}

impl InitVectors {
    pub fn is_empty(&self) -> bool {
        self.minmax.is_none() && self.sap.is_none() && self.sap_fixed.is_none()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(v) = &self.sap_fixed {
            let items: Vec<String> = v.iter().map(u64::to_string).collect();
            out.push_str(&format!("init sap-fixed: {}\n", items.join(" ")));
        }
        if let Some(v) = &self.sap {
            let items: Vec<String> = v
                .iter()
                .map(|s| format!("{}/{}", s.clock, s.period_factor))
                .collect();
            out.push_str(&format!("init sap: {}\n", items.join(" ")));
        }
        if let Some(v) = &self.minmax {
            let items: Vec<String> = v
                .iter()
                .map(|s| {
                    let pairs: Vec<String> =
                        s.view.pairs().map(|(v, d)| format!("{v}@{d}")).collect();
                    format!("{};{};{}", s.h, s.clock_out, pairs.join(","))
                })
                .collect();
            out.push_str(&format!("init minmax: {}\n", items.join(" ")));
        }
        out
    }

    /// Reads every `init` line of a scenario file, ignoring all other lines.
    pub fn parse(input: &str) -> Result<Self, InitError> {
        let mut out = InitVectors::default();
        for (idx, raw) in input.lines().enumerate() {
            let line = idx + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            let Some(rest) = text.strip_prefix("init ") else {
                continue;
            };
            let err = |message: String| InitError::Syntax { line, message };
            let (kind, body) = rest
                .split_once(':')
                .ok_or_else(|| err("expected `init <algorithm>: ...`".into()))?;
            let items = body.split_whitespace();
            match kind.trim() {
                "sap-fixed" => {
                    let v = items
                        .map(|s| s.parse().map_err(|_| err(format!("bad clock `{s}`"))))
                        .collect::<Result<_, _>>()?;
                    out.sap_fixed = Some(v);
                }
                "sap" => {
                    let v = items
                        .map(|s| {
                            let (c, m) = s
                                .split_once('/')
                                .ok_or_else(|| err(format!("expected clock/M, got `{s}`")))?;
                            match (c.parse(), m.parse()) {
                                (Ok(c), Ok(m)) => Ok(SapState::new(c, m)),
                                _ => Err(err(format!("bad entry `{s}`"))),
                            }
                        })
                        .collect::<Result<_, _>>()?;
                    out.sap = Some(v);
                }
                "minmax" => {
                    let v = items
                        .map(|s| parse_minmax(s).map_err(err))
                        .collect::<Result<_, _>>()?;
                    out.minmax = Some(v);
                }
                other => return Err(err(format!("unknown algorithm `{other}`"))),
            }
        }
        Ok(out)
    }
}

fn parse_minmax(s: &str) -> Result<MinMaxState, String> {
    let mut parts = s.splitn(3, ';');
    let (Some(h), Some(clock), Some(pairs)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(format!("expected h;clock;pairs, got `{s}`"));
    };
    let num = |x: &str| {
        x.parse::<u64>()
            .map_err(|_| format!("bad number `{x}` in `{s}`"))
    };
    let mut view = Vec::new();
    for p in pairs.split(',').filter(|p| !p.is_empty()) {
        let (v, d) = p
            .split_once('@')
            .ok_or_else(|| format!("expected value@depth, got `{p}`"))?;
        view.push((num(v)?, num(d)?));
    }
    Ok(MinMaxState::new(
        num(h)?,
        View::from_pairs(view),
        num(clock)?,
    ))
}
