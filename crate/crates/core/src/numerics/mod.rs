//! Stable special functions and generic numeric utilities shared by every
//! other module: scaled complementary error function, log-domain modified
//! Bessel functions and ratios, adaptive quadrature, bracketed root finding,
//! and central finite differences.
//!
//! All operations are pure functions of their arguments.

mod bessel;
mod erf;
mod quad;
mod root;

pub use bessel::{bessel_ratio, log_bessel_i};
pub use erf::{erf, erfc, erfcx};
pub(crate) use bessel::ratio_sweep;
pub(crate) use erf::erfcx_unchecked as erfcx_stable;
pub use quad::{integrate, IntegralEstimate, QuadratureSpec};
pub use root::{central_diff, default_diff_step, expand_bracket, find_root, RootSpec};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature tolerance not met: best estimate {best} with error estimate {error_estimate} after {panels} panels")]
    ToleranceNotMet {
        best: f64,
        error_estimate: f64,
        panels: usize,
    },
    #[error("no sign change over bracket [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")]
    NoRoot { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("root finding did not converge within {max_iter} iterations; best iterate {best} with |f|={f_best}")]
    RootNonConvergence { best: f64, f_best: f64, max_iter: usize },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;
