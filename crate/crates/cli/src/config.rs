//! Experiment configuration: one JSON document type covering all commands,
//! validated per command kind before anything runs.

use crate::{validation, CommonArgs, HarnessError, HarnessResult};
use dualrx_core::channel::EnvParams;
use dualrx_core::inference::{ObsMode, UnknownParam};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    CirCurve,
    SignalOverlay,
    MseVsS,
    MinSVsXi,
    Estimate,
}

impl ExperimentKind {
    pub fn command_name(self) -> &'static str {
        match self {
            ExperimentKind::CirCurve => "cir",
            ExperimentKind::SignalOverlay => "overlay",
            ExperimentKind::MseVsS => "mse",
            ExperimentKind::MinSVsXi => "min-s",
            ExperimentKind::Estimate => "estimate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Fast,
    Paper,
}

/// Time grid for curve-producing commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_start: f64,
    pub t_stop: f64,
    pub points: usize,
}

impl GridConfig {
    pub fn times(&self) -> Vec<f64> {
        if self.points == 0 {
            return Vec::new();
        }
        if self.points == 1 {
            return vec![self.t_start];
        }
        let step = (self.t_stop - self.t_start) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.t_start + step * i as f64).collect()
    }
}

/// Simulation block for overlay runs (seed and windows come from the
/// harness, not the file).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    #[serde(default = "default_t_sim")]
    pub t_sim: f64,
    pub t_end: f64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_true")]
    pub bridge_absorption: bool,
}

fn default_t_sim() -> f64 {
    1e-3
}

fn default_realizations() -> usize {
    2000
}

fn default_true() -> bool {
    true
}

/// Study block for estimator commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyBlock {
    #[serde(default)]
    pub unknown: Option<UnknownParam>,
    /// Unknowns for min-s panels (defaults to [mu, k]).
    #[serde(default)]
    pub unknowns: Option<Vec<UnknownParam>>,
    #[serde(default)]
    pub s_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub xi_grid: Option<Vec<f64>>,
    #[serde(default = "default_s_max")]
    pub s_max: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_mode")]
    pub mode: ObsMode,
    #[serde(default)]
    pub estimators: Option<Vec<String>>,
    /// Explicit bracket; studies default to [0.25, 4] x truth.
    #[serde(default)]
    pub bracket: Option<(f64, f64)>,
    /// Per-unknown true-value variants for min-s panels.
    #[serde(default)]
    pub variants: Option<std::collections::BTreeMap<String, Vec<f64>>>,
}

fn default_s_max() -> usize {
    25
}

fn default_trials() -> usize {
    1000
}

fn default_mode() -> ObsMode {
    ObsMode::Poisson
}

/// Estimation block for the `estimate` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateBlock {
    pub unknown: UnknownParam,
    pub bracket: (f64, f64),
    /// Observation CSV path, resolved relative to the config file.
    pub observations: PathBuf,
    /// Estimators never read the noise mean; this only unlocks the
    /// model-vs-sample diagnostics block in the report.
    #[serde(default)]
    pub noise_known: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub kind: Option<ExperimentKind>,
    pub env: EnvParams,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub sim: Option<SimBlock>,
    #[serde(default)]
    pub study: Option<StudyBlock>,
    #[serde(default)]
    pub estimate: Option<EstimateBlock>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    1
}

/// A fully resolved run: config plus CLI overrides, validated for the kind.
#[derive(Debug, Clone)]
pub struct EffectiveRun {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Directory the config came from (observation paths resolve here).
    pub base_dir: PathBuf,
}

impl EffectiveRun {
    pub fn load(kind: ExperimentKind, args: &CommonArgs) -> HarnessResult<Self> {
        let raw = std::fs::read_to_string(&args.config)
            .map_err(|e| HarnessError::Validation(format!("cannot read config {}: {e}", args.config.display())))?;
        let value: serde_json::Value = serde_json::from_str(&raw)
            .map_err(|e| HarnessError::Validation(format!("config is not valid JSON: {e}")))?;
        // a manifest from a previous run re-runs with its embedded config
        let (mut config, manifest_seed): (ExperimentConfig, Option<u64>) =
            if value.get("config").is_some() && value.get("code_version").is_some() {
                let manifest: crate::RunManifest = serde_json::from_value(value)
                    .map_err(|e| HarnessError::Validation(format!("malformed manifest: {e}")))?;
                let seed = manifest.seed;
                (manifest.config, Some(seed))
            } else {
                let cfg: ExperimentConfig = serde_json::from_value(value)
                    .map_err(|e| HarnessError::Validation(format!("malformed config: {e}")))?;
                (cfg, None)
            };
        if let Some(declared) = config.kind {
            if declared != kind {
                return validation(format!(
                    "config kind '{}' does not match the '{}' command",
                    declared.command_name(),
                    kind.command_name()
                ));
            }
        }
        config.kind = Some(kind);
        config
            .env
            .validate()
            .map_err(|e| HarnessError::Validation(format!("env: {e}")))?;
        let seed = args.seed.or(manifest_seed).unwrap_or(config.seed);
        let mut run = Self {
            kind,
            config,
            seed,
            out_dir: args.out.clone(),
            base_dir: args.config.parent().unwrap_or(Path::new(".")).to_path_buf(),
        };
        run.apply_profile(args.profile(), args.trials);
        run.config.seed = seed;
        run.validate()?;
        Ok(run)
    }

    fn apply_profile(&mut self, profile: Option<Profile>, trials_override: Option<usize>) {
        if let Some(profile) = profile {
            let (realizations, trials) = match profile {
                Profile::Fast => (400, 1000),
                Profile::Paper => (2000, 2000),
            };
            if let Some(sim) = self.config.sim.as_mut() {
                sim.realizations = realizations;
            }
            if let Some(study) = self.config.study.as_mut() {
                study.trials = trials;
            }
        }
        if let Some(n) = trials_override {
            if let Some(sim) = self.config.sim.as_mut() {
                sim.realizations = n;
            }
            if let Some(study) = self.config.study.as_mut() {
                study.trials = n;
            }
        }
    }

    fn validate(&self) -> HarnessResult<()> {
        let c = &self.config;
        match self.kind {
            ExperimentKind::CirCurve => {
                if c.grid.is_none() {
                    return validation("cir requires a 'grid' block");
                }
            }
            ExperimentKind::SignalOverlay => {
                let (Some(grid), Some(sim)) = (&c.grid, &c.sim) else {
                    return validation("overlay requires 'grid' and 'sim' blocks");
                };
                if sim.realizations < 2 {
                    return validation("overlay needs at least 2 realizations");
                }
                if grid.times().iter().any(|&t| !(c.env.delta..=sim.t_end).contains(&t)) {
                    return validation("overlay grid must lie within [delta, sim.t_end]");
                }
            }
            ExperimentKind::MseVsS => {
                let Some(study) = &c.study else {
                    return validation("mse requires a 'study' block");
                };
                if study.unknown.is_none() {
                    return validation("mse study requires 'unknown'");
                }
                match &study.s_grid {
                    None => return validation("mse study requires a non-empty 's_grid'"),
                    Some(g) if g.is_empty() => return validation("mse study requires a non-empty 's_grid'"),
                    Some(g) if g.contains(&0) => return validation("s_grid entries must be >= 1"),
                    _ => {}
                }
                if study.trials < 100 {
                    return validation("mse study needs >= 100 trials");
                }
            }
            ExperimentKind::MinSVsXi => {
                let Some(study) = &c.study else {
                    return validation("min-s requires a 'study' block");
                };
                match &study.xi_grid {
                    None => return validation("min-s study requires a non-empty 'xi_grid'"),
                    Some(g) if g.is_empty() => return validation("min-s study requires a non-empty 'xi_grid'"),
                    Some(g) if g.iter().any(|&x| x < 0.0) => return validation("xi_grid entries must be >= 0"),
                    _ => {}
                }
                if study.s_max == 0 {
                    return validation("s_max must be >= 1");
                }
                if study.trials < 100 {
                    return validation("min-s study needs >= 100 trials");
                }
            }
            ExperimentKind::Estimate => {
                let Some(est) = &c.estimate else {
                    return validation("estimate requires an 'estimate' block");
                };
                if !(est.bracket.0 > 0.0 && est.bracket.0 < est.bracket.1) {
                    return validation("estimate bracket must satisfy 0 < lo < hi");
                }
            }
        }
        Ok(())
    }

    pub fn observations_path(&self) -> Option<PathBuf> {
        self.config.estimate.as_ref().map(|e| {
            if e.observations.is_absolute() {
                e.observations.clone()
            } else {
                self.base_dir.join(&e.observations)
            }
        })
    }
}
