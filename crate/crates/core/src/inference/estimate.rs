//! Parameter estimators on windowed observations: difference estimation by
//! the method of moments, the per-receiver maximum-likelihood benchmark, and
//! the Monte Carlo study harness around them.
//!
//! Neither estimator reads the noise mean ξ. Difference estimation cancels
//! it by construction; the per-receiver estimator deliberately ignores it
//! and pays with bias when noise is present.

use super::{EstimationProblem, InferenceError, ObservationSet, Result, SkellamModel};
use crate::channel::{plateau_onset, Receiver, SeriesSpec};
use crate::numerics::{expand_bracket, find_root, NumericsError, RootSpec};
use crate::simulator::{run_realization, stream_rng, SimConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    De,
    MlRx1,
    MlRx2,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::De, EstimatorKind::MlRx1, EstimatorKind::MlRx2];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::De => "de",
            EstimatorKind::MlRx1 => "ml_rx1",
            EstimatorKind::MlRx2 => "ml_rx2",
        }
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How study observations are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObsMode {
    /// Direct Poisson draws from the asymptotic model (fast; large trials).
    Poisson,
    /// Full particle simulation with windows at the asymptotic stage
    /// (validates the Poisson modeling assumption).
    Particle,
}

fn root_spec(lo: f64, hi: f64) -> RootSpec {
    RootSpec {
        bracket_lo: lo,
        bracket_hi: hi,
        x_tol: 1e-10 * hi.abs().max(1.0),
        f_tol: 1e-9,
        max_iter: 200,
    }
}

/// Difference estimation: the ε̂ matching the model mean difference
/// `Ñ2(ε) - Ñ1(ε)` to the sample mean of `g̃`. The bracket is expanded
/// geometrically up to the unknown's physical limits if needed.
pub fn estimate_de(prob: &EstimationProblem, obs: &ObservationSet) -> Result<f64> {
    let target = obs.mean_diff();
    let f = |e: f64| {
        prob.mean_difference_at(e)
            .expect("bracket expansion stays within the unknown's physical limits")
            - target
    };
    let (limit_lo, limit_hi) = prob.unknown.physical_limits();
    let (lo, hi) = expand_bracket(&f, prob.bracket.0, prob.bracket.1, limit_lo, limit_hi, 80)
        .map_err(|e| InferenceError::EstimationFailure(format!("difference estimate: {e}")))?;
    find_root(f, &root_spec(lo, hi)).map_err(|e| match e {
        NumericsError::NoRoot { .. } => InferenceError::EstimationFailure(format!("difference estimate: {e}")),
        other => InferenceError::Numerics(other),
    })
}

/// A per-receiver estimate; `clamped` marks trials whose sample mean fell
/// outside the achievable range of `Ñ_j` over the bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlEstimate {
    pub value: f64,
    pub clamped: bool,
}

/// Single-receiver maximum likelihood under the (noise-blind) Poisson model:
/// solve `Ñ_j(ε̂) = mean(g_j)`, clamping to the nearer bracket end when the
/// mean is unreachable.
pub fn estimate_ml_rx(rx: Receiver, prob: &EstimationProblem, obs_j: &[u64]) -> Result<MlEstimate> {
    if obs_j.is_empty() {
        return Err(InferenceError::EstimationFailure("empty observation vector".into()));
    }
    let target = obs_j.iter().map(|&c| c as f64).sum::<f64>() / obs_j.len() as f64;
    let f = |e: f64| prob.mean_at(rx, e).expect("bracket stays within physical limits") - target;
    let (lo, hi) = prob.bracket;
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(MlEstimate { value: lo, clamped: false });
    }
    if f_hi == 0.0 {
        return Ok(MlEstimate { value: hi, clamped: false });
    }
    if (f_lo < 0.0) == (f_hi < 0.0) {
        let value = if f_lo.abs() <= f_hi.abs() { lo } else { hi };
        return Ok(MlEstimate { value, clamped: true });
    }
    let value = find_root(f, &root_spec(lo, hi))?;
    Ok(MlEstimate { value, clamped: false })
}

/// Monte Carlo study controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub trials: usize,
    /// Observations per trial (the S of the difference vector).
    pub s_count: usize,
    pub mode: ObsMode,
    pub seed: u64,
    /// Particle-mode step size.
    pub t_sim: f64,
}

impl StudyConfig {
    pub fn new(trials: usize, s_count: usize, mode: ObsMode, seed: u64) -> Self {
        Self { trials, s_count, mode, seed, t_sim: 1e-3 }
    }
}

/// Every estimator's outcome on every trial, from shared draws (paired
/// comparisons stay noise-free).
#[derive(Debug, Clone)]
pub struct TrialOutcomes {
    pub de: Vec<Option<f64>>,
    pub rx1: Vec<MlEstimate>,
    pub rx2: Vec<MlEstimate>,
    pub truth: f64,
}

impl TrialOutcomes {
    /// Normalized squared errors of one estimator over its usable trials.
    pub fn normalized_sq_errors(&self, which: EstimatorKind) -> Vec<f64> {
        let t = self.truth;
        let norm = |v: f64| (v - t) * (v - t) / (t * t);
        match which {
            EstimatorKind::De => self.de.iter().flatten().map(|&v| norm(v)).collect(),
            EstimatorKind::MlRx1 => self.rx1.iter().map(|e| norm(e.value)).collect(),
            EstimatorKind::MlRx2 => self.rx2.iter().map(|e| norm(e.value)).collect(),
        }
    }

    pub fn failures(&self, which: EstimatorKind) -> usize {
        match which {
            EstimatorKind::De => self.de.iter().filter(|d| d.is_none()).count(),
            _ => 0,
        }
    }

    pub fn clamp_count(&self, which: EstimatorKind) -> usize {
        match which {
            EstimatorKind::De => 0,
            EstimatorKind::MlRx1 => self.rx1.iter().filter(|e| e.clamped).count(),
            EstimatorKind::MlRx2 => self.rx2.iter().filter(|e| e.clamped).count(),
        }
    }
}

fn observations_for_trial(
    prob: &EstimationProblem,
    cfg: &StudyConfig,
    sim: Option<&SimConfig>,
    trial: u64,
) -> Result<ObservationSet> {
    match cfg.mode {
        ObsMode::Poisson => {
            let model = SkellamModel::from_env(&prob.known)?;
            let mut rng = stream_rng(cfg.seed, trial);
            let mut g1 = Vec::with_capacity(cfg.s_count);
            let mut g2 = Vec::with_capacity(cfg.s_count);
            for _ in 0..cfg.s_count {
                let (a, b) = super::sample_difference(&model, &mut rng);
                g1.push(a);
                g2.push(b);
            }
            ObservationSet::new(g1, g2)
        }
        ObsMode::Particle => {
            let sim = sim.expect("particle mode prepares a sim config");
            let rec = run_realization(&prob.known, sim, trial)?;
            ObservationSet::from_pairs(&rec.window_counts)
        }
    }
}

fn particle_sim_config(prob: &EstimationProblem, cfg: &StudyConfig) -> Result<SimConfig> {
    let plateau = plateau_onset(&prob.known, &SeriesSpec::default())?;
    let start = 2.0 * plateau;
    let mut sim = SimConfig::new(&prob.known, start, cfg.trials, cfg.seed);
    sim.t_sim = cfg.t_sim;
    Ok(sim.with_schedule(start, cfg.s_count))
}

/// Run all trials, computing every estimator on the same observations.
pub fn run_trials(prob: &EstimationProblem, cfg: &StudyConfig) -> Result<TrialOutcomes> {
    if cfg.trials == 0 || cfg.s_count == 0 {
        return Err(InferenceError::InvalidStudy("trials and s_count must be >= 1".into()));
    }
    let sim = match cfg.mode {
        ObsMode::Particle => Some(particle_sim_config(prob, cfg)?),
        ObsMode::Poisson => None,
    };
    let per_trial: Vec<(Option<f64>, MlEstimate, MlEstimate)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let obs = observations_for_trial(prob, cfg, sim.as_ref(), trial)?;
            let de = estimate_de(prob, &obs).ok();
            let rx1 = estimate_ml_rx(Receiver::Rx1, prob, obs.g1())?;
            let rx2 = estimate_ml_rx(Receiver::Rx2, prob, obs.g2())?;
            Ok((de, rx1, rx2))
        })
        .collect::<Result<_>>()?;
    let mut out = TrialOutcomes {
        de: Vec::with_capacity(cfg.trials),
        rx1: Vec::with_capacity(cfg.trials),
        rx2: Vec::with_capacity(cfg.trials),
        truth: prob.unknown.get(&prob.known),
    };
    for (de, rx1, rx2) in per_trial {
        out.de.push(de);
        out.rx1.push(rx1);
        out.rx2.push(rx2);
    }
    Ok(out)
}

/// Normalized mean squared error of one estimator over a study.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MseOutcome {
    pub norm_mse: f64,
    /// Monte Carlo standard error of `norm_mse`.
    pub std_err: f64,
    pub trials: usize,
    pub failures: usize,
    pub clamped: usize,
    /// False when more than 10% of trials failed.
    pub valid: bool,
}

/// Mean of `(ε̂ - ε*)²/ε*²` over successful trials.
pub fn mse_study(prob: &EstimationProblem, cfg: &StudyConfig, which: EstimatorKind) -> Result<MseOutcome> {
    let outcomes = run_trials(prob, cfg)?;
    Ok(summarize(&outcomes, which, cfg.trials))
}

/// Reduce already-computed trial outcomes for one estimator.
pub fn summarize(outcomes: &TrialOutcomes, which: EstimatorKind, trials: usize) -> MseOutcome {
    let errs = outcomes.normalized_sq_errors(which);
    let failures = outcomes.failures(which);
    let n = errs.len().max(1) as f64;
    let mean = errs.iter().sum::<f64>() / n;
    let var = errs.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n.max(2.0);
    MseOutcome {
        norm_mse: mean,
        std_err: (var / n).sqrt(),
        trials,
        failures,
        clamped: outcomes.clamp_count(which),
        valid: failures * 10 <= trials,
    }
}
