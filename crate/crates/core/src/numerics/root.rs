//! Bracketed root finding (Brent's method) and central finite differences.

use super::{NumericsError, Result};

/// Bracket, tolerances, and iteration budget for [`find_root`].
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct RootSpec {
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    /// Convergence on bracket width, in the unknown's units.
    pub x_tol: f64,
    /// Convergence on |f|.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl RootSpec {
    pub fn new(bracket_lo: f64, bracket_hi: f64) -> Self {
        Self { bracket_lo, bracket_hi, x_tol: 1e-10, f_tol: 1e-12, max_iter: 200 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bracket_lo < self.bracket_hi) {
            return Err(NumericsError::InvalidSpec(format!(
                "bracket_lo {} must be < bracket_hi {}",
                self.bracket_lo, self.bracket_hi
            )));
        }
        if !(self.x_tol > 0.0) || !(self.f_tol > 0.0) {
            return Err(NumericsError::InvalidSpec("root tolerances must be > 0".into()));
        }
        if self.max_iter < 1 {
            return Err(NumericsError::InvalidSpec("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Grow `[lo, hi]` geometrically (factor 2 about its midpoint, clamped to
/// `[limit_lo, limit_hi]`) until `f` changes sign over it. Returns the
/// expanded bracket, or the no-root error if the limits are reached first.
pub fn expand_bracket<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    limit_lo: f64,
    limit_hi: f64,
    max_expansions: usize,
) -> Result<(f64, f64)> {
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    for _ in 0..max_expansions {
        if f_lo == 0.0 || f_hi == 0.0 || (f_lo < 0.0) != (f_hi < 0.0) {
            return Ok((lo, hi));
        }
        if lo <= limit_lo && hi >= limit_hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let half = (hi - lo).max(f64::MIN_POSITIVE);
        lo = (mid - half).max(limit_lo);
        hi = (mid + half).min(limit_hi);
        f_lo = f(lo);
        f_hi = f(hi);
    }
    if f_lo == 0.0 || f_hi == 0.0 || (f_lo < 0.0) != (f_hi < 0.0) {
        return Ok((lo, hi));
    }
    Err(NumericsError::NoRoot { lo, hi, f_lo, f_hi })
}

/// Brent's method: inverse-quadratic/secant steps safeguarded by bisection.
/// Always converges for a valid sign-changing bracket.
pub fn find_root<F: Fn(f64) -> f64>(f: F, spec: &RootSpec) -> Result<f64> {
    spec.validate()?;
    let mut a = spec.bracket_lo;
    let mut b = spec.bracket_hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return Err(NumericsError::NoRoot { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }
    // keep |f(b)| <= |f(a)|
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..spec.max_iter {
        if fb.abs() <= spec.f_tol {
            return Ok(b);
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * spec.x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // interpolation step
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                // secant
                (2.0 * m * s, 1.0 - s)
            } else {
                // inverse quadratic
                let qq = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0)),
                    (qq - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if (fb < 0.0) == (fc < 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Err(NumericsError::RootNonConvergence { best: b, f_best: fb.abs(), max_iter: spec.max_iter })
}

/// Symmetric difference quotient `(f(x+h) - f(x-h)) / 2h`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Step size used throughout for derivative checks.
pub fn default_diff_step(x: f64) -> f64 {
    (1e-6 * x.abs()).max(1e-9)
}
