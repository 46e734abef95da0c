//! Skellam observation model for the per-window count difference, Fisher
//! information and Cramer-Rao bounds, analytic mean derivatives, and the
//! moment/maximum-likelihood estimators built on them.

mod estimate;
mod fisher;
mod skellam;

pub use estimate::{
    estimate_de, estimate_ml_rx, mse_study, run_trials, summarize, EstimatorKind, MlEstimate, MseOutcome,
    ObsMode, StudyConfig, TrialOutcomes,
};
pub use fisher::{crlb, crlb_normalized, fisher_information, gamma_deriv};
pub use skellam::{sample_difference, skellam_log_pmf, skellam_pmf, skellam_support};

use crate::channel::{asymptotic_signal, ChannelError, EnvParams, Receiver};
use crate::numerics::NumericsError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum InferenceError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("degenerate support: no integer reaches pmf threshold {threshold}")]
    DegenerateSupport { threshold: f64 },
    #[error("fisher information not positive: L = {l}, theta = {theta}, gamma = ({gamma1}, {gamma2})")]
    NonPositiveFisher { l: f64, theta: f64, gamma1: f64, gamma2: f64 },
    #[error("estimation failed: {0}")]
    EstimationFailure(String),
    #[error("study invalid: {0}")]
    InvalidStudy(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Sim(#[from] crate::simulator::SimError),
}

pub type Result<T> = std::result::Result<T, InferenceError>;

/// Which single channel parameter is treated as unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownParam {
    D2,
    Mu,
    V,
    K,
}

impl UnknownParam {
    pub const ALL: [UnknownParam; 4] = [UnknownParam::D2, UnknownParam::Mu, UnknownParam::V, UnknownParam::K];

    pub fn name(self) -> &'static str {
        match self {
            UnknownParam::D2 => "d2",
            UnknownParam::Mu => "mu",
            UnknownParam::V => "v",
            UnknownParam::K => "k",
        }
    }

    pub fn get(self, p: &EnvParams) -> f64 {
        match self {
            UnknownParam::D2 => p.d2,
            UnknownParam::Mu => p.mu,
            UnknownParam::V => p.v,
            UnknownParam::K => p.k,
        }
    }

    pub fn with_value(self, p: &EnvParams, value: f64) -> EnvParams {
        let mut q = *p;
        match self {
            UnknownParam::D2 => q.d2 = value,
            UnknownParam::Mu => q.mu = value,
            UnknownParam::V => q.v = value,
            UnknownParam::K => q.k = value,
        }
        q
    }

    /// Hard physical limits used when a bracket is expanded automatically.
    pub fn physical_limits(self) -> (f64, f64) {
        match self {
            UnknownParam::D2 => (1e-3, 1e6),
            UnknownParam::Mu => (1e-9, 1e12),
            UnknownParam::V => (1e-6, 1e4),
            UnknownParam::K => (1e-9, 1e4),
        }
    }
}

impl std::fmt::Display for UnknownParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for UnknownParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "d2" => Ok(UnknownParam::D2),
            "mu" => Ok(UnknownParam::Mu),
            "v" => Ok(UnknownParam::V),
            "k" => Ok(UnknownParam::K),
            other => Err(format!("unknown parameter '{other}' (expected d2|mu|v|k)")),
        }
    }
}

/// The pair of Poisson means governing one windowed observation at each
/// receiver: asymptotic signal plus the noise mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkellamModel {
    pub n_hat_1: f64,
    pub n_hat_2: f64,
}

impl SkellamModel {
    pub fn new(n_hat_1: f64, n_hat_2: f64) -> Result<Self> {
        if !(n_hat_1 > 0.0 && n_hat_1.is_finite()) || !(n_hat_2 > 0.0 && n_hat_2.is_finite()) {
            return Err(InferenceError::InvalidModel(format!(
                "poisson means must be positive and finite, got ({n_hat_1}, {n_hat_2})"
            )));
        }
        Ok(Self { n_hat_1, n_hat_2 })
    }

    /// `N̂_j = Ñ_j + ξ` from the channel asymptote.
    pub fn from_env(p: &EnvParams) -> Result<Self> {
        Self::new(
            asymptotic_signal(Receiver::Rx1, p)? + p.xi,
            asymptotic_signal(Receiver::Rx2, p)? + p.xi,
        )
    }

    /// Skellam argument `2 sqrt(N̂1 N̂2)`.
    pub fn bessel_arg(&self) -> f64 {
        2.0 * (self.n_hat_1 * self.n_hat_2).sqrt()
    }

    pub fn mean_difference(&self) -> f64 {
        self.n_hat_2 - self.n_hat_1
    }
}

/// `S` windowed counts per receiver plus the derived difference vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationSet {
    g1: Vec<u64>,
    g2: Vec<u64>,
    g_diff: Vec<i64>,
}

impl ObservationSet {
    pub fn new(g1: Vec<u64>, g2: Vec<u64>) -> Result<Self> {
        if g1.len() != g2.len() || g1.is_empty() {
            return Err(InferenceError::InvalidModel(format!(
                "observation vectors must be equal-length and non-empty, got {} and {}",
                g1.len(),
                g2.len()
            )));
        }
        let g_diff = g1.iter().zip(&g2).map(|(&a, &b)| b as i64 - a as i64).collect();
        Ok(Self { g1, g2, g_diff })
    }

    pub fn from_pairs(pairs: &[[u64; 2]]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| p[0]).collect(), pairs.iter().map(|p| p[1]).collect())
    }

    pub fn len(&self) -> usize {
        self.g1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g1.is_empty()
    }

    pub fn g1(&self) -> &[u64] {
        &self.g1
    }

    pub fn g2(&self) -> &[u64] {
        &self.g2
    }

    pub fn g_diff(&self) -> &[i64] {
        &self.g_diff
    }

    pub fn counts(&self, rx: Receiver) -> &[u64] {
        match rx {
            Receiver::Rx1 => &self.g1,
            Receiver::Rx2 => &self.g2,
        }
    }

    pub fn mean_diff(&self) -> f64 {
        self.g_diff.iter().map(|&d| d as f64).sum::<f64>() / self.g_diff.len() as f64
    }

    pub fn mean_counts(&self, rx: Receiver) -> f64 {
        let g = self.counts(rx);
        g.iter().map(|&c| c as f64).sum::<f64>() / g.len() as f64
    }
}

/// A single-unknown estimation task: the unknown, everything else assumed
/// known, and the search bracket.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimationProblem {
    pub unknown: UnknownParam,
    /// Known parameters; the unknown's slot carries the true value in
    /// studies and is ignored by the estimators themselves.
    pub known: EnvParams,
    pub bracket: (f64, f64),
    /// Estimators never read ξ; this only gates diagnostics output.
    pub noise_known: bool,
}

impl EstimationProblem {
    pub fn new(unknown: UnknownParam, known: EnvParams, bracket: (f64, f64)) -> Result<Self> {
        if !(bracket.0 < bracket.1) || !(bracket.0 > 0.0) {
            return Err(InferenceError::InvalidModel(format!(
                "bracket must satisfy 0 < lo < hi, got ({}, {})",
                bracket.0, bracket.1
            )));
        }
        known.validate()?;
        Ok(Self { unknown, known, bracket, noise_known: false })
    }

    /// Study default: bracket `[0.25 ε*, 4 ε*]` around the true value.
    pub fn for_study(unknown: UnknownParam, known: EnvParams) -> Result<Self> {
        let truth = unknown.get(&known);
        Self::new(unknown, known, (0.25 * truth, 4.0 * truth))
    }

    /// Channel asymptote difference `Ñ2(ε) - Ñ1(ε)` as a function of the
    /// unknown.
    pub fn mean_difference_at(&self, eps: f64) -> Result<f64> {
        let p = self.unknown.with_value(&self.known, eps);
        Ok(asymptotic_signal(Receiver::Rx2, &p)? - asymptotic_signal(Receiver::Rx1, &p)?)
    }

    /// Channel asymptote `Ñ_j(ε)` at one receiver.
    pub fn mean_at(&self, rx: Receiver, eps: f64) -> Result<f64> {
        let p = self.unknown.with_value(&self.known, eps);
        Ok(asymptotic_signal(rx, &p)?)
    }
}

/// Truncation threshold for the Skellam support search; the Fisher bracket's
/// ratio-expectation sum runs over this support.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThetaSpec {
    pub pmf_threshold: f64,
}

impl Default for ThetaSpec {
    fn default() -> Self {
        Self { pmf_threshold: 1e-3 }
    }
}

impl ThetaSpec {
    /// Tight support used wherever the bound itself must be accurate: the
    /// default 1e-3 threshold leaves a tail whose contribution to the Fisher
    /// bracket is amplified by w² and shifts the bound by integer factors.
    pub const TIGHT: ThetaSpec = ThetaSpec { pmf_threshold: 1e-12 };

    pub fn validate(&self) -> Result<()> {
        if !(self.pmf_threshold > 0.0 && self.pmf_threshold < 1.0) {
            return Err(InferenceError::InvalidModel(format!(
                "pmf_threshold must lie in (0, 1), got {}",
                self.pmf_threshold
            )));
        }
        Ok(())
    }
}
