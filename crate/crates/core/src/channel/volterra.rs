//! Independent numerical oracle for the two-receiver absorption fractions.
//!
//! The coupled renewal equations
//!
//! ```text
//! P2(t) = F_v(d2, t, k, +v) - (P1 * f_v(d, ., k, +v))(t)
//! P1(t) = F_v(d1, t, k, -v) - (P2 * f_v(d, ., k, -v))(t)
//! ```
//!
//! are discretized on a uniform grid with trapezoidal convolution weights.
//! Both the kernel and the unknowns vanish at u = 0, so the trapezoid's
//! endpoint terms drop out and the system is strictly lower-triangular:
//! each step is explicit, no fixed-point iteration is needed.

use super::{hitting_cdf, hitting_rate, ChannelError, EnvParams, Receiver, Result};

/// Gridded absorption fractions from the renewal-equation solve.
#[derive(Debug, Clone)]
pub struct VolterraSolution {
    pub ts: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    step: f64,
}

impl VolterraSolution {
    pub fn step(&self) -> f64 {
        self.step
    }

    fn grid_index(&self, t: f64) -> Result<usize> {
        let idx = t / self.step;
        let rounded = idx.round();
        if (idx - rounded).abs() > 1e-6 || rounded < 0.0 || rounded as usize >= self.ts.len() {
            return Err(ChannelError::Oracle(format!("t = {t} is not on the oracle grid (step {})", self.step)));
        }
        Ok(rounded as usize)
    }

    /// Absorption fraction at a grid time.
    pub fn absorbed_fraction(&self, rx: Receiver, t: f64) -> Result<f64> {
        let i = self.grid_index(t)?;
        Ok(match rx {
            Receiver::Rx1 => self.p1[i],
            Receiver::Rx2 => self.p2[i],
        })
    }

    /// `mu * ∫₀ᵗ P_j(u) du` by the trapezoid rule: the oracle's counterpart
    /// of the expected absorbed count under continuous emission.
    pub fn cumulative_expected(&self, rx: Receiver, t: f64, mu: f64) -> Result<f64> {
        let n = self.grid_index(t)?;
        let p = match rx {
            Receiver::Rx1 => &self.p1,
            Receiver::Rx2 => &self.p2,
        };
        let mut s = 0.5 * (p[0] + p[n]);
        for v in &p[1..n] {
            s += v;
        }
        Ok(mu * s * self.step)
    }
}

/// Solve the renewal system on `n_steps` uniform intervals covering
/// `[0, t_end]`.
pub fn volterra_oracle(p: &EnvParams, t_end: f64, n_steps: usize) -> Result<VolterraSolution> {
    p.validate()?;
    if n_steps < 100 {
        return Err(ChannelError::Oracle(format!("n_steps must be >= 100, got {n_steps}")));
    }
    if !(t_end > 0.0) {
        return Err(ChannelError::Oracle(format!("t_end must be > 0, got {t_end}")));
    }
    let h = t_end / n_steps as f64;
    let n = n_steps + 1;
    let d = p.d();
    let mut kern_pos = vec![0.0; n];
    let mut kern_neg = vec![0.0; n];
    let mut cdf2 = vec![0.0; n];
    let mut cdf1 = vec![0.0; n];
    for i in 1..n {
        let t = i as f64 * h;
        kern_pos[i] = hitting_rate(d, t, p.k, p.v, p.diffusion)?;
        kern_neg[i] = hitting_rate(d, t, p.k, -p.v, p.diffusion)?;
        cdf2[i] = hitting_cdf(p.d2, t, p.k, p.v, p.diffusion)?;
        cdf1[i] = hitting_cdf(p.d1, t, p.k, -p.v, p.diffusion)?;
    }
    let mut p1 = vec![0.0; n];
    let mut p2 = vec![0.0; n];
    for i in 1..n {
        let mut conv2 = 0.0;
        let mut conv1 = 0.0;
        for m in 1..i {
            conv2 += p1[i - m] * kern_pos[m];
            conv1 += p2[i - m] * kern_neg[m];
        }
        p2[i] = cdf2[i] - h * conv2;
        p1[i] = cdf1[i] - h * conv1;
    }
    // invariants of a valid solve
    let mut prev1 = 0.0;
    let mut prev2 = 0.0;
    for i in 0..n {
        if !p1[i].is_finite() || !p2[i].is_finite() {
            return Err(ChannelError::Oracle(format!("non-finite fraction at step {i}")));
        }
        if p1[i] < -1e-9 || p2[i] < -1e-9 || p1[i] + p2[i] > 1.0 + 1e-9 {
            return Err(ChannelError::Oracle(format!(
                "fractions out of range at step {i}: p1={}, p2={}",
                p1[i], p2[i]
            )));
        }
        if p1[i] < prev1 - 1e-9 || p2[i] < prev2 - 1e-9 {
            return Err(ChannelError::Oracle(format!("fractions decreased at step {i}")));
        }
        prev1 = p1[i];
        prev2 = p2[i];
    }
    let ts = (0..n).map(|i| i as f64 * h).collect();
    Ok(VolterraSolution { ts, p1, p2, step: h })
}
