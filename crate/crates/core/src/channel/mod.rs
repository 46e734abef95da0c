//! Analytic channel response for the 1D advection–diffusion–degradation
//! channel with two fully-absorbing receivers.
//!
//! Coordinate convention, fixed project-wide: the transmitter sits at the
//! origin, receiver 1 at `-d1`, receiver 2 at `+d2`, and the uniform flow
//! `+v` points toward receiver 2.

mod cir;
mod hitting;
mod volterra;

pub use cir::{asymptotic_signal, expected_absorbed, image_term, plateau_onset, received_signal, response_curve};
pub use hitting::{hitting_cdf, hitting_rate};
pub use volterra::{volterra_oracle, VolterraSolution};

use crate::numerics::NumericsError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ChannelError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series did not converge: partial value {partial} after {terms} terms")]
    SeriesNonConvergence { partial: f64, terms: usize },
    #[error("volterra oracle failed: {0}")]
    Oracle(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// Which absorbing receiver a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Receiver {
    Rx1,
    Rx2,
}

impl Receiver {
    pub const BOTH: [Receiver; 2] = [Receiver::Rx1, Receiver::Rx2];

    /// The `(-1)^j` factor of the flow prefactor: -1 for receiver 1, +1 for 2.
    pub fn flow_sign(self) -> f64 {
        match self {
            Receiver::Rx1 => -1.0,
            Receiver::Rx2 => 1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Receiver::Rx1 => 0,
            Receiver::Rx2 => 1,
        }
    }
}

impl std::fmt::Display for Receiver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Receiver::Rx1 => write!(f, "rx1"),
            Receiver::Rx2 => write!(f, "rx2"),
        }
    }
}

/// Full physical parameter set of the channel.
///
/// Units: distances in μm, times in s, `diffusion` in μm²/s, rates in 1/s,
/// `xi` in expected noise counts per observation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvParams {
    /// Distance from the transmitter to receiver 1 (placed at -d1).
    pub d1: f64,
    /// Distance from the transmitter to receiver 2 (placed at +d2).
    pub d2: f64,
    /// Uniform flow speed, directed from receiver 1 toward receiver 2 (> 0).
    pub v: f64,
    /// Diffusion coefficient.
    pub diffusion: f64,
    /// First-order degradation rate (> 0; the k = 0 channel is out of scope).
    pub k: f64,
    /// Continuous emission rate at the transmitter.
    pub mu: f64,
    /// Observation window length.
    pub delta: f64,
    /// Mean noise count per window at each receiver.
    pub xi: f64,
}

impl EnvParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(d1: f64, d2: f64, v: f64, diffusion: f64, k: f64, mu: f64, delta: f64, xi: f64) -> Result<Self> {
        let p = Self { d1, d2, v, diffusion, k, mu, delta, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.d1 > 0.0, "d1 must be > 0"),
            (self.d2 > 0.0, "d2 must be > 0"),
            (self.v > 0.0, "v must be > 0 (flow from receiver 1 toward receiver 2)"),
            (self.diffusion > 0.0, "diffusion must be > 0"),
            (self.k > 0.0, "k must be > 0 (k = 0 not supported)"),
            (self.mu > 0.0, "mu must be > 0"),
            (self.delta > 0.0, "delta must be > 0"),
            (self.xi >= 0.0, "xi must be >= 0"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(ChannelError::InvalidParams(msg.into()));
            }
        }
        for (name, val) in [
            ("d1", self.d1),
            ("d2", self.d2),
            ("v", self.v),
            ("diffusion", self.diffusion),
            ("k", self.k),
            ("mu", self.mu),
            ("delta", self.delta),
            ("xi", self.xi),
        ] {
            if !val.is_finite() {
                return Err(ChannelError::InvalidParams(format!("{name} must be finite, got {val}")));
            }
        }
        Ok(())
    }

    /// Inter-receiver distance `d = d1 + d2`.
    pub fn d(&self) -> f64 {
        self.d1 + self.d2
    }

    /// Distance from the transmitter to the given receiver.
    pub fn dist_to(&self, rx: Receiver) -> f64 {
        match rx {
            Receiver::Rx1 => self.d1,
            Receiver::Rx2 => self.d2,
        }
    }

    /// Decay wavenumber `κ = sqrt(v²/4D² + k/D)`.
    pub fn kappa(&self) -> f64 {
        (self.v * self.v / (4.0 * self.diffusion * self.diffusion) + self.k / self.diffusion).sqrt()
    }

    /// Effective degradation rate once the drift is folded in: `k + v²/4D`.
    pub fn k_eff(&self) -> f64 {
        self.k + self.v * self.v / (4.0 * self.diffusion)
    }
}

/// Truncation control for the image series of the time-varying response.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeriesSpec {
    /// Stop once a whole bracketed group falls below this fraction of the
    /// partial sum for two consecutive indices.
    pub rel_term_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        Self { rel_term_tol: 1e-12, max_terms: 200 }
    }
}

impl SeriesSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_term_tol > 0.0) {
            return Err(ChannelError::InvalidParams("rel_term_tol must be > 0".into()));
        }
        if self.max_terms < 1 {
            return Err(ChannelError::InvalidParams("max_terms must be >= 1".into()));
        }
        Ok(())
    }
}

/// Sampled response curves for both receivers on a common time grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CirCurve {
    pub times: Vec<f64>,
    pub values_rx1: Vec<f64>,
    pub values_rx2: Vec<f64>,
}

impl CirCurve {
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.values_rx1.len() || self.times.len() != self.values_rx2.len() {
            return Err(ChannelError::InvalidParams("curve vectors must share one length".into()));
        }
        if self.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ChannelError::InvalidParams("curve times must be strictly increasing".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) fn reference_params() -> EnvParams {
    EnvParams::new(20.0, 20.0, 6.0, 79.4, 0.8, 1000.0, 0.5, 0.0).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_params() {
        assert!(EnvParams::new(0.0, 20.0, 6.0, 79.4, 0.8, 1000.0, 0.5, 0.0).is_err());
        assert!(EnvParams::new(20.0, 20.0, -1.0, 79.4, 0.8, 1000.0, 0.5, 0.0).is_err());
        assert!(EnvParams::new(20.0, 20.0, 6.0, 79.4, 0.0, 1000.0, 0.5, 0.0).is_err());
        assert!(EnvParams::new(20.0, 20.0, 6.0, 79.4, 0.8, 1000.0, 0.5, -2.0).is_err());
    }

    #[test]
    fn derived_quantities() {
        let p = reference_params();
        assert_eq!(p.d(), 40.0);
        // mpmath: kappa = 0.10725273982893586
        assert!((p.kappa() - 0.107_252_739_828_935_86).abs() < 1e-15);
        assert!((p.k_eff() - 0.913_350_125_944_584_4).abs() < 1e-15);
    }
}
