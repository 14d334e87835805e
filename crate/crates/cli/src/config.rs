//! Experiment configuration: defaults, validation and schedule resolution.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use clocksync::analysis::{self, ConnectivityClass};
use clocksync::graph::{text, DynamicGraph};
use clocksync::init::InitVectors;
use clocksync::sap::GrowthFunction;
use clocksync::scenarios::{self, Expected, ScenarioParams, TargetClass};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmChoice {
    Minmax,
    Sap,
    SapFixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ClassChoice {
    Rooted,
    UniformlyRooted,
    StronglyConnected,
}

impl From<ClassChoice> for TargetClass {
    fn from(c: ClassChoice) -> Self {
        match c {
            ClassChoice::Rooted => TargetClass::Rooted,
            ClassChoice::UniformlyRooted => TargetClass::UniformlyRooted,
            ClassChoice::StronglyConnected => TargetClass::StronglyConnected,
        }
    }
}

/// Parameters consumed by scenario constructors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSettings {
    pub n: usize,
    pub c0: u64,
    pub blocks: usize,
    pub losses: usize,
    pub delta: usize,
    pub class: ClassChoice,
    pub include_stronger: bool,
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        Self {
            n: 5,
            c0: 1,
            blocks: 4,
            losses: 0,
            delta: 1,
            class: ClassChoice::Rooted,
            include_stronger: false,
        }
    }
}

/// Where initial states come from: the scenario or file suggestion, seeded
/// random vectors, or an init file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitSource {
    Suggested,
    Random,
    File(PathBuf),
}

impl std::str::FromStr for InitSource {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "suggested" => InitSource::Suggested,
            "random" => InitSource::Random,
            path => InitSource::File(PathBuf::from(path)),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmChoice,
    pub period: u64,
    pub growth: GrowthFunction,
    /// Period factor for `sap-fixed`; largest initial factor for random SAP
    /// inits; `M` or `M0` for scenarios.
    pub m: u64,
    /// Largest initial `h` for random MinMax inits.
    pub h0: u64,
    pub scenario: Option<String>,
    pub schedule: Option<PathBuf>,
    pub settings: ScenarioSettings,
    pub init: InitSource,
    pub horizon: Option<usize>,
    pub seed: u64,
    pub reps: usize,
    pub delta_cap: usize,
    pub verbosity: u8,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        match (&self.scenario, &self.schedule) {
            (Some(_), Some(_)) => {
                bail!("config: give either a scenario or a schedule file, not both")
            }
            (None, None) => bail!("config: a scenario or a schedule file is required"),
            _ => {}
        }
        if self.period == 0 {
            bail!("config: period must be positive");
        }
        if self.m == 0 {
            bail!("config: m must be positive");
        }
        if self.reps == 0 {
            bail!("config: reps must be at least 1");
        }
        if self.verbosity > 2 {
            bail!("config: verbosity must be 0, 1 or 2");
        }
        if self.horizon == Some(0) {
            bail!("config: horizon must be positive");
        }
        if self.delta_cap == 0 {
            bail!("config: delta cap must be positive");
        }
        Ok(())
    }

    pub fn scenario_params(&self) -> ScenarioParams {
        ScenarioParams {
            period: self.period,
            m: self.m,
            n: self.settings.n,
            growth: self.growth.clone(),
            c0: self.settings.c0,
            blocks: self.settings.blocks,
            losses: self.settings.losses,
            delta: self.settings.delta,
            class: self.settings.class.into(),
            exclude_stronger: !self.settings.include_stronger,
            seed: self.seed,
        }
    }

    /// `10 * n * P * max(M, 1)`.
    pub fn default_horizon(&self, n: usize) -> usize {
        10 * n * self.period as usize * self.m.max(1) as usize
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self =
            serde_json::from_str(&raw).with_context(|| format!("config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A schedule ready to run, with whatever is known about it.
pub struct Resolved {
    pub label: String,
    pub dynamic_graph: DynamicGraph,
    pub class: Option<ConnectivityClass>,
    pub init: InitVectors,
    pub expected: Expected,
    /// Rounds over which the scenario's expectations are stated.
    pub expectation_horizon: Option<usize>,
}

pub fn resolve(cfg: &ExperimentConfig) -> Result<Resolved> {
    if let Some(name) = &cfg.scenario {
        let s = scenarios::build(name, &cfg.scenario_params())
            .with_context(|| format!("scenario `{name}`"))?;
        return Ok(Resolved {
            label: s.name.clone(),
            dynamic_graph: s.dynamic_graph,
            class: s.class,
            init: s.suggested_init,
            expected: s.expected,
            expectation_horizon: s.default_horizon,
        });
    }
    let path = cfg.schedule.as_ref().expect("validated");
    let (dg, init) = load_schedule(path)?;
    let class = analysis::classify(&dg, cfg.delta_cap).context("analyzing schedule")?;
    Ok(Resolved {
        label: path.display().to_string(),
        dynamic_graph: dg,
        class: Some(class),
        init,
        expected: Expected::default(),
        expectation_horizon: None,
    })
}

/// Parses a schedule file and its optional init section.
pub fn load_schedule(path: &Path) -> Result<(DynamicGraph, InitVectors)> {
    let raw =
        fs::read_to_string(path).with_context(|| format!("reading schedule {}", path.display()))?;
    let dg = text::parse(&raw).with_context(|| format!("schedule {}", path.display()))?;
    let init =
        InitVectors::parse(&raw).with_context(|| format!("init section of {}", path.display()))?;
    Ok((dg, init))
}

pub fn load_init(path: &Path) -> Result<InitVectors> {
    let raw = fs::read_to_string(path)
        .with_context(|| format!("reading init file {}", path.display()))?;
    InitVectors::parse(&raw).with_context(|| format!("init file {}", path.display()))
}
