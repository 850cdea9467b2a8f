//! The archimedean density `∫_R dy / max(1, y²)`.

use serde::Serialize;

use super::ConstantsError;

/// Normalization of the real Haar measure.
pub const C_R: f64 = 2.0;

const MAX_DEPTH: u32 = 60;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, ConstantsError> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(ConstantsError::QuadratureNonConvergence);
    }
    Ok(adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Adaptive Simpson rule on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, ConstantsError> {
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    adapt(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArchimedeanCheck {
    /// `∫_R dy / max(1, y²)`.
    pub inner: f64,
    /// `C_R · inner`.
    pub value: f64,
}

/// Numerically integrate on `[-T, T]` and add the exact tail `2/T`.
pub fn tau_infinity_check() -> Result<ArchimedeanCheck, ConstantsError> {
    let t = 64.0;
    let f = |y: f64| 1.0 / (y * y).max(1.0);
    // Splitting at the kinks keeps every panel smooth.
    let pieces = [(-t, -1.0), (-1.0, 1.0), (1.0, t)];
    let mut inner = 2.0 / t;
    for (a, b) in pieces {
        inner += integrate(f, a, b, 1e-12)?;
    }
    Ok(ArchimedeanCheck { inner, value: C_R * inner })
}
