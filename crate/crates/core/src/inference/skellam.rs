//! Skellam probability mass function and its thresholded support.

use super::{InferenceError, Result, SkellamModel, ThetaSpec};
use crate::numerics::log_bessel_i;
use rand::rngs::SmallRng;
use rand_distr::{Distribution, Poisson};

/// `ln P(g̃ = n)` for the difference of the two windowed Poisson counts.
pub fn skellam_log_pmf(n: i64, m: &SkellamModel) -> Result<f64> {
    let x = m.bessel_arg();
    Ok(-(m.n_hat_1 + m.n_hat_2) + n as f64 / 2.0 * (m.n_hat_2 / m.n_hat_1).ln() + log_bessel_i(n, x)?)
}

/// `P(g̃ = n)`, always in (0, 1).
pub fn skellam_pmf(n: i64, m: &SkellamModel) -> Result<f64> {
    Ok(skellam_log_pmf(n, m)?.exp())
}

/// Contiguous integer range `[ζ1, ζ2]` on which the pmf stays at or above
/// the threshold; the pmf falls below it immediately outside both ends.
pub fn skellam_support(m: &SkellamModel, spec: &ThetaSpec) -> Result<(i64, i64)> {
    spec.validate()?;
    let mode = m.mean_difference().round() as i64;
    if skellam_pmf(mode, m)? < spec.pmf_threshold {
        return Err(InferenceError::DegenerateSupport { threshold: spec.pmf_threshold });
    }
    let mut lo = mode;
    while skellam_pmf(lo - 1, m)? >= spec.pmf_threshold {
        lo -= 1;
    }
    let mut hi = mode;
    while skellam_pmf(hi + 1, m)? >= spec.pmf_threshold {
        hi += 1;
    }
    Ok((lo, hi))
}

/// One draw of the windowed pair `(g1, g2)`; the difference is Skellam.
pub fn sample_difference(m: &SkellamModel, rng: &mut SmallRng) -> (u64, u64) {
    let p1 = Poisson::new(m.n_hat_1).expect("validated mean");
    let p2 = Poisson::new(m.n_hat_2).expect("validated mean");
    (p1.sample(rng) as u64, p2.sample(rng) as u64)
}
