//! Adaptive Simpson quadrature with an absolute error target.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    // Actual widths: near the resolution limit the rounded midpoint is off-centre.
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    // Tolerance below what the arithmetic can resolve on this piece.
    if delta.abs() <= 64.0 * f64::EPSILON * (left.abs() + right.abs())
        || !(a < lm && lm < m && m < rm && rm < b)
    {
        return Ok(left + right);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "no convergence on [{a}, {b}] (error estimate {:e})",
            delta.abs() / 15.0
        )));
    }
    let l = step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let r = step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Ok(l + r)
}

/// `∫_a^b f` to absolute accuracy about `tol`. `a > b` flips the sign.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature("infinite integration limits".into()));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo);
    let fb = f(hi);
    let fm = f(0.5 * (lo + hi));
    if !(fa.is_finite() && fb.is_finite() && fm.is_finite()) {
        return Err(Error::Quadrature(
            "integrand not finite at the limits".into(),
        ));
    }
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    Ok(sign * step(&f, lo, hi, fa, fm, fb, whole, tol, MAX_DEPTH)?)
}
