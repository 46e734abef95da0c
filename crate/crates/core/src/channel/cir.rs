//! Time-varying expected absorbed counts under continuous emission (the image
//! series), the windowed received signal, and its long-time asymptote.
//!
//! Every `exp(x κ) * erfc(...)` product is evaluated through the scaled
//! complement: `exp(xκ) β(t) = erfcx(z) exp(-x²/4Dt - k_eff t)` with
//! `z = x/sqrt(4Dt) + sqrt(k_eff t)`, whose exponent is non-positive by
//! construction. The raw `exp(xκ)` would overflow already at the second
//! image for realistic parameters.

use super::{ChannelError, CirCurve, EnvParams, Receiver, Result, SeriesSpec};
use crate::numerics::{erfc, erfcx_stable, integrate, QuadratureSpec};
use std::collections::HashMap;

/// The two stabilized products `exp(xκ)·ω(t)` and `exp(-xκ)·ν(t)`.
struct OmegaNu {
    alpha_omega: f64,
    alphahat_nu: f64,
}

fn omega_nu(x: f64, t: f64, p: &EnvParams, quad: &QuadratureSpec) -> Result<OmegaNu> {
    let diffusion = p.diffusion;
    let k_eff = p.k_eff();
    let kappa = p.kappa();
    let alpha_omega = integrate(
        |u| {
            let a = x / (4.0 * diffusion * u).sqrt();
            let s = (k_eff * u).sqrt();
            erfcx_stable(a + s) * (-x * x / (4.0 * diffusion * u) - k_eff * u).exp()
        },
        0.0,
        t,
        quad,
    )?
    .value;
    let nu = integrate(
        |u| {
            let a = x / (4.0 * diffusion * u).sqrt();
            let s = (k_eff * u).sqrt();
            erfc(a - s)
        },
        0.0,
        t,
        quad,
    )?
    .value;
    Ok(OmegaNu { alpha_omega, alphahat_nu: (-x * kappa).exp() * nu })
}

fn image_term_inner(i: usize, x: f64, t: f64, a: u32, p: &EnvParams, on: &OmegaNu) -> f64 {
    let d = p.d();
    let kappa = p.kappa();
    let theta = d * (i as f64 + 1.0) * (i as f64 + a as f64);
    let k_eff = p.k_eff();
    let arg = x / (4.0 * p.diffusion * t).sqrt();
    let s = (k_eff * t).sqrt();
    // exp(xκ) β(t) and exp(-xκ) β̂(t), stabilized
    let alpha_beta = erfcx_stable(arg + s) * (-x * x / (4.0 * p.diffusion * t) - k_eff * t).exp();
    let alphahat_betahat = (-x * kappa).exp() * erfc(arg - s);
    // the β̂ coefficient is θ/sqrt(v² + 4kD); matches ∫₀ᵗ u f(x,u) du closed form
    let rad = (p.v * p.v + 4.0 * p.k * p.diffusion).sqrt();
    theta * kappa / 2.0 * (on.alpha_omega - on.alphahat_nu)
        - (i as f64 + 1.0) / 2.0 * (on.alpha_omega + on.alphahat_nu)
        - theta / rad * (alphahat_betahat - alpha_beta)
        + (i as f64 + 1.0) * t
}

/// One series term `R_i(x, t, a)` of the image expansion.
///
/// `a` selects which of the two image families the term belongs to (0 or 2).
pub fn image_term(i: usize, x: f64, t: f64, a: u32, p: &EnvParams, quad: &QuadratureSpec) -> Result<f64> {
    p.validate()?;
    if !(t > 0.0) {
        return Err(ChannelError::Domain(format!("t must be > 0, got {t}")));
    }
    if !(x > 0.0) {
        return Err(ChannelError::Domain(format!("x must be > 0, got {x}")));
    }
    let on = omega_nu(x, t, p, quad)?;
    Ok(image_term_inner(i, x, t, a, p, &on))
}

/// Expected number of molecules absorbed at `rx` by time `t` under continuous
/// emission.
///
/// The series is truncated once a whole four-term group stays below
/// `rel_term_tol` times the partial sum for two consecutive indices.
pub fn expected_absorbed(rx: Receiver, t: f64, p: &EnvParams, series: &SeriesSpec) -> Result<f64> {
    p.validate()?;
    series.validate()?;
    if !(t > 0.0) {
        return Err(ChannelError::Domain(format!("t must be > 0, got {t}")));
    }
    let quad = QuadratureSpec::default();
    let d = p.d();
    let dj = p.dist_to(rx);
    let prefactor = p.mu * (rx.flow_sign() * dj * p.v / (2.0 * p.diffusion)).exp();
    // ω/ν pairs repeat across groups: the (a=2) arguments of index i are the
    // (a=0) arguments of index i+1; cache on the exact x bits (t is fixed)
    let mut cache: HashMap<u64, OmegaNu> = HashMap::new();
    let mut term_at = |i: usize, x: f64, a: u32| -> Result<f64> {
        let on = match cache.entry(x.to_bits()) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(slot) => slot.insert(omega_nu(x, t, p, &quad)?),
        };
        Ok(image_term_inner(i, x, t, a, p, on))
    };
    let mut sum = 0.0;
    let mut quiet_groups = 0;
    for i in 0..series.max_terms {
        let fi = i as f64;
        let group = term_at(i, 2.0 * (fi + 1.0) * d + dj, 2)?
            - term_at(i, 2.0 * (fi + 2.0) * d - dj, 2)?
            - term_at(i, 2.0 * fi * d + dj, 0)?
            + term_at(i, 2.0 * (fi + 1.0) * d - dj, 0)?;
        sum += group;
        if group.abs() <= series.rel_term_tol * sum.abs() {
            quiet_groups += 1;
            if quiet_groups >= 2 {
                return Ok(sum.max(0.0) * prefactor);
            }
        } else {
            quiet_groups = 0;
        }
    }
    Err(ChannelError::SeriesNonConvergence { partial: sum * prefactor, terms: series.max_terms })
}

/// Received signal: molecules absorbed at `rx` within the window `[t-δ, t]`.
pub fn received_signal(rx: Receiver, t: f64, p: &EnvParams, series: &SeriesSpec) -> Result<f64> {
    if !(t > p.delta) {
        return Err(ChannelError::Domain(format!(
            "received signal needs t > delta, got t={t}, delta={}",
            p.delta
        )));
    }
    Ok(expected_absorbed(rx, t, p, series)? - expected_absorbed(rx, t - p.delta, p, series)?)
}

/// Long-time limit of the windowed received signal at `rx`.
///
/// Written with the flow prefactor folded into each exponent; both combined
/// exponents are non-positive for any valid parameters (κ >= v/2D), so the
/// expression never overflows even at extreme flow speeds.
pub fn asymptotic_signal(rx: Receiver, p: &EnvParams) -> Result<f64> {
    p.validate()?;
    let dj = p.dist_to(rx);
    let d = p.d();
    let kappa = p.kappa();
    let flow = rx.flow_sign() * dj * p.v / (2.0 * p.diffusion);
    Ok(p.mu * p.delta * ((flow - dj * kappa).exp() - (flow + (dj - 2.0 * d) * kappa).exp())
        / (1.0 - (-2.0 * d * kappa).exp()))
}

/// Expected absorbed counts at both receivers over a strictly increasing
/// time grid.
pub fn response_curve(times: &[f64], p: &EnvParams, series: &SeriesSpec) -> Result<CirCurve> {
    let mut curve = CirCurve {
        times: times.to_vec(),
        values_rx1: Vec::with_capacity(times.len()),
        values_rx2: Vec::with_capacity(times.len()),
    };
    for &t in times {
        curve.values_rx1.push(expected_absorbed(Receiver::Rx1, t, p, series)?);
        curve.values_rx2.push(expected_absorbed(Receiver::Rx2, t, p, series)?);
    }
    curve.validate()?;
    Ok(curve)
}

/// First time at which both receivers' windowed signals sit within 1% of
/// their asymptotes, scanned in half-window steps. Observation schedules are
/// typically placed at twice this time.
pub fn plateau_onset(p: &EnvParams, series: &SeriesSpec) -> Result<f64> {
    let asy = [asymptotic_signal(Receiver::Rx1, p)?, asymptotic_signal(Receiver::Rx2, p)?];
    let step = 0.5 * p.delta;
    for i in 1..=2000usize {
        let t = p.delta + step * i as f64;
        let ok = Receiver::BOTH.iter().all(|&rx| {
            received_signal(rx, t, p, series)
                .map(|dn| ((dn - asy[rx.index()]) / asy[rx.index()]).abs() < 1e-2)
                .unwrap_or(false)
        });
        if ok {
            return Ok(t);
        }
    }
    Err(ChannelError::Oracle("no plateau found within the scan range".into()))
}
