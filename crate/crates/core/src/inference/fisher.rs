//! Analytic derivatives of the windowed means, Fisher information of the
//! difference observation, and the Cramer-Rao bounds built from it.

use super::{skellam_pmf, skellam_support, InferenceError, Result, SkellamModel, ThetaSpec, UnknownParam};
use crate::channel::{EnvParams, Receiver};
use crate::numerics::ratio_sweep;

/// `γ_j(ε) = ∂N̂_j/∂ε`, differentiated in closed form.
///
/// With `Ñ_j = μ δ E T / B`, `E = exp(σ_j d_j v / 2D)`,
/// `T = exp(-d_j κ) - exp((d_j - 2d) κ)`, `B = 1 - exp(-2 d κ)`, the chain
/// rule needs only `∂d_j/∂ε`, `∂d/∂ε` and `∂κ/∂ε`. The additive noise mean
/// ξ is constant, so `∂N̂_j/∂ε = ∂Ñ_j/∂ε`.
pub fn gamma_deriv(unknown: UnknownParam, rx: Receiver, p: &EnvParams) -> Result<f64> {
    p.validate()?;
    let d = p.d();
    let kappa = p.kappa();
    let dj = p.dist_to(rx);
    let sign = rx.flow_sign();
    let big_d = p.diffusion;
    let e = (sign * dj * p.v / (2.0 * big_d)).exp();
    let t = (-dj * kappa).exp() - ((dj - 2.0 * d) * kappa).exp();
    let b = 1.0 - (-2.0 * d * kappa).exp();
    if let UnknownParam::Mu = unknown {
        return Ok(p.delta * e * t / b);
    }
    // partials of the building blocks wrt the unknown
    let (ddj, dd, dkappa, de) = match unknown {
        UnknownParam::D2 => {
            let ddj = if rx == Receiver::Rx2 { 1.0 } else { 0.0 };
            (ddj, 1.0, 0.0, e * sign * p.v / (2.0 * big_d) * ddj)
        }
        UnknownParam::V => {
            let dkappa = p.v / (4.0 * big_d * big_d * kappa);
            (0.0, 0.0, dkappa, e * sign * dj / (2.0 * big_d))
        }
        UnknownParam::K => (0.0, 0.0, 1.0 / (2.0 * big_d * kappa), 0.0),
        UnknownParam::Mu => unreachable!(),
    };
    let e1 = (-dj * kappa).exp();
    let e2 = ((dj - 2.0 * d) * kappa).exp();
    let dt = -e1 * (ddj * kappa + dj * dkappa) - e2 * ((ddj - 2.0 * dd) * kappa + (dj - 2.0 * d) * dkappa);
    let db = (-2.0 * d * kappa).exp() * 2.0 * (dd * kappa + d * dkappa);
    Ok(p.mu * p.delta * ((de * t + e * dt) / b - e * t * db / (b * b)))
}

/// `ϑ = E[(I_{g̃-1}/I_{g̃})²]` summed over the thresholded support.
fn theta_sum(m: &SkellamModel, spec: &ThetaSpec) -> Result<f64> {
    let (lo, hi) = skellam_support(m, spec)?;
    let x = m.bessel_arg();
    // one backward sweep serves every ratio in the support: for n >= 1 the
    // ratio is 1/t_{n-1}, for n <= 0 it is t_{-n}
    let max_order = (hi.unsigned_abs().max(lo.unsigned_abs()) as usize).max(1);
    let t = ratio_sweep(x, max_order);
    let mut acc = 0.0;
    for n in lo..=hi {
        let r = if n >= 1 { 1.0 / t[(n - 1) as usize] } else { t[(-n) as usize] };
        acc += r * r * skellam_pmf(n, m)?;
    }
    Ok(acc)
}

/// Fisher information of `S` independent difference observations for the
/// given unknown.
///
/// The bracket is the single-observation score variance with the Skellam
/// ratio-moment identities substituted; the remaining ratio expectation ϑ is
/// summed over the thresholded support.
pub fn fisher_information(unknown: UnknownParam, p: &EnvParams, s_count: usize, spec: &ThetaSpec) -> Result<f64> {
    if s_count < 1 {
        return Err(InferenceError::InvalidModel("S must be >= 1".into()));
    }
    let m = SkellamModel::from_env(p)?;
    let g1 = gamma_deriv(unknown, Receiver::Rx1, p)?;
    let g2 = gamma_deriv(unknown, Receiver::Rx2, p)?;
    let theta = theta_sum(&m, spec)?;
    let (p1, p2) = (m.n_hat_1, m.n_hat_2);
    let w = (p2 / p1).sqrt() * g1 + (p1 / p2).sqrt() * g2;
    let l1 = (3.0 * p2 - p1) / (4.0 * p2 * p2) * g2 * g2
        + (3.0 * p1 - p2) / (4.0 * p1 * p1) * g1 * g1
        - (p1 + p2) / (2.0 * p1 * p2) * g1 * g2
        + (theta - (4.0 * p2 * p2 + 3.0 * p2 - p1) / (4.0 * p1 * p2)) * w * w;
    let l = s_count as f64 * l1;
    if !(l > 0.0) || !l.is_finite() {
        return Err(InferenceError::NonPositiveFisher { l, theta, gamma1: g1, gamma2: g2 });
    }
    Ok(l)
}

/// Cramer-Rao lower bound `1/L(ε)` on the variance of an unbiased estimator
/// from `S` difference observations. Uses the tight support threshold; the
/// loose default threshold distorts the bound by integer factors.
pub fn crlb(unknown: UnknownParam, p: &EnvParams, s_count: usize) -> Result<f64> {
    Ok(1.0 / fisher_information(unknown, p, s_count, &ThetaSpec::TIGHT)?)
}

/// CRLB divided by the squared true value (dimensionless).
pub fn crlb_normalized(unknown: UnknownParam, p: &EnvParams, s_count: usize) -> Result<f64> {
    let truth = unknown.get(p);
    Ok(crlb(unknown, p, s_count)? / (truth * truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{asymptotic_signal, reference_params};
    use crate::numerics::{central_diff, default_diff_step};

    fn gamma_fd(unknown: UnknownParam, rx: Receiver, p: &EnvParams) -> f64 {
        let x0 = unknown.get(p);
        central_diff(
            |x| asymptotic_signal(rx, &unknown.with_value(p, x)).unwrap() + p.xi,
            x0,
            default_diff_step(x0),
        )
    }

    #[test]
    fn gamma_mu_is_signal_over_mu() {
        let p = reference_params();
        for rx in Receiver::BOTH {
            let g = gamma_deriv(UnknownParam::Mu, rx, &p).unwrap();
            let want = asymptotic_signal(rx, &p).unwrap() / p.mu;
            assert!((g - want).abs() / want < 1e-14);
        }
    }

    #[test]
    fn gamma_signs_at_reference_params() {
        let p = reference_params();
        assert!(gamma_deriv(UnknownParam::D2, Receiver::Rx2, &p).unwrap() < 0.0);
        for rx in Receiver::BOTH {
            assert!(gamma_deriv(UnknownParam::K, rx, &p).unwrap() < 0.0);
        }
        assert!(gamma_deriv(UnknownParam::V, Receiver::Rx1, &p).unwrap() < 0.0);
        assert!(gamma_deriv(UnknownParam::V, Receiver::Rx2, &p).unwrap() > 0.0);
    }

    #[test]
    fn gamma_matches_finite_difference() {
        let p = reference_params();
        for unknown in UnknownParam::ALL {
            for rx in Receiver::BOTH {
                let analytic = gamma_deriv(unknown, rx, &p).unwrap();
                let fd = gamma_fd(unknown, rx, &p);
                let rel = (analytic - fd).abs() / analytic.abs().max(1e-12);
                assert!(rel < 1e-6, "{unknown}/{rx}: analytic {analytic} vs fd {fd}");
            }
        }
    }

    #[test]
    fn gamma_frozen_reference_values() {
        // sympy differentiation of the asymptote at the reference parameters
        let p = reference_params();
        let refs = [
            (UnknownParam::D2, Receiver::Rx1, 0.079_733_426_949_3),
            (UnknownParam::D2, Receiver::Rx2, -8.544_781_791_39),
            (UnknownParam::Mu, Receiver::Rx1, 0.027_120_107_176_5),
            (UnknownParam::Mu, Receiver::Rx2, 0.122_929_427_137),
            (UnknownParam::V, Receiver::Rx1, -4.586_369_040_89),
            (UnknownParam::V, Receiver::Rx2, 10.175_598_196_8),
            (UnknownParam::K, Receiver::Rx1, -30.985_543_360_6),
            (UnknownParam::K, Receiver::Rx2, -140.450_591_514),
        ];
        for (unknown, rx, want) in refs {
            let got = gamma_deriv(unknown, rx, &p).unwrap();
            assert!((got - want).abs() / want.abs() < 1e-11, "{unknown}/{rx}: {got} vs {want}");
        }
    }

    #[test]
    fn fisher_linear_in_observation_count() {
        let p = reference_params();
        let spec = ThetaSpec::TIGHT;
        for unknown in UnknownParam::ALL {
            let l1 = fisher_information(unknown, &p, 1, &spec).unwrap();
            let l2 = fisher_information(unknown, &p, 2, &spec).unwrap();
            assert!((l2 - 2.0 * l1).abs() / l2 < 1e-15);
        }
    }

    #[test]
    fn fisher_frozen_reference_values() {
        // mpmath score-variance evaluation at the reference parameters, xi = 0
        let p = reference_params();
        let refs = [
            (UnknownParam::D2, 0.495_913_573_1),
            (UnknownParam::Mu, 6.135_245_283e-5),
            (UnknownParam::V, 1.452_620_471),
            (UnknownParam::K, 80.087_983_67),
        ];
        for (unknown, want) in refs {
            let got = fisher_information(unknown, &p, 1, &ThetaSpec::TIGHT).unwrap();
            assert!((got - want).abs() / want < 1e-6, "{unknown}: {got} vs {want}");
        }
    }

    #[test]
    fn regularity_condition_over_tight_support() {
        // E[d ln p / d eps] = 0, summed over the tight support
        let p = reference_params();
        let m = SkellamModel::from_env(&p).unwrap();
        let (lo, hi) = skellam_support(&m, &ThetaSpec::TIGHT).unwrap();
        let x = m.bessel_arg();
        let max_order = (hi.unsigned_abs().max(lo.unsigned_abs()) as usize).max(1);
        let t = ratio_sweep(x, max_order);
        for unknown in UnknownParam::ALL {
            let g1 = gamma_deriv(unknown, Receiver::Rx1, &p).unwrap();
            let g2 = gamma_deriv(unknown, Receiver::Rx2, &p).unwrap();
            let w = (m.n_hat_2 / m.n_hat_1).sqrt() * g1 + (m.n_hat_1 / m.n_hat_2).sqrt() * g2;
            let b = 0.5 * (g2 / m.n_hat_2 - g1 / m.n_hat_1);
            let mut acc = 0.0;
            for n in lo..=hi {
                let r = if n >= 1 { 1.0 / t[(n - 1) as usize] } else { t[(-n) as usize] };
                let score = -(g1 + g2) + b * n as f64 + w * (r - n as f64 / x);
                acc += score * skellam_pmf(n, &m).unwrap();
            }
            // scale-free check: normalize by the score magnitude
            let scale = (g1 + g2).abs().max(w.abs());
            assert!((acc / scale).abs() < 1e-8, "{unknown}: regularity sum {acc}");
        }
    }

    #[test]
    fn crlb_halves_when_s_doubles() {
        let p = reference_params();
        let a = crlb(UnknownParam::V, &p, 5).unwrap();
        let b = crlb(UnknownParam::V, &p, 10).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn crlb_mu_improves_with_emission_rate() {
        let p = reference_params();
        let mut p_hot = p;
        p_hot.mu *= 4.0;
        let a = crlb_normalized(UnknownParam::Mu, &p, 10).unwrap();
        let b = crlb_normalized(UnknownParam::Mu, &p_hot, 10).unwrap();
        assert!(b < a, "normalized crlb should shrink with mu: {a} -> {b}");
    }

    #[test]
    fn normalized_crlb_positive_for_all_unknowns() {
        let p = reference_params();
        for unknown in UnknownParam::ALL {
            let c = crlb_normalized(unknown, &p, 10).unwrap();
            assert!(c > 0.0 && c.is_finite());
        }
    }
}
