//! One-dimensional root bracketing and minimization.

use crate::error::{Error, Result};

/// `(√5 − 1)/2`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Bisection for a sign change of `f` on `[lo, hi]`, stopped once the bracket
/// is narrower than `xtol`. Returns the bracket midpoint.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let a_negative = fa < 0.0;
    while (b - a).abs() > xtol {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == a_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
/// Returns `(argmin, min)` once the bracket is narrower than `xtol`.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Offset of the vertex of the parabola through `(−h, y0)`, `(0, y1)`, `(h, y2)`.
pub fn parabolic_offset(y0: f64, y1: f64, y2: f64, h: f64) -> f64 {
    let curvature = y0 - 2.0 * y1 + y2;
    if curvature == 0.0 {
        0.0
    } else {
        0.5 * h * (y0 - y2) / curvature
    }
}
