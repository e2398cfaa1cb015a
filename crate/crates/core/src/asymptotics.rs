//! Closed-form leading-order tail expansions, marginal tails, Gumbel
//! normalizing constants and the correspondence between horizon and level.
//!
//! Every evaluator returns the leading term only. Tail approximations carry a
//! flag when the returned value exceeds 0.5, where a first-order expansion is
//! no longer meaningful.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{binomial, gamma_function, std_normal_tail};

/// Probability above which a tail expansion is flagged as out of regime.
pub const REGIME_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailApprox {
    pub value: f64,
    pub regime_violated: bool,
}

impl TailApprox {
    fn new(value: f64) -> Self {
        Self {
            value,
            regime_violated: value > REGIME_LIMIT,
        }
    }
}

/// Standard Gaussian marginal: scaling `w(u) = u`, local time scale `q(u) = u^{-2/α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTailModel {
    pub alpha: f64,
}

impl GaussianTailModel {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha })
    }

    pub fn w(&self, u: f64) -> f64 {
        u
    }

    pub fn q(&self, u: f64) -> f64 {
        q_of_u(u, self.alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "alpha must lie in (0, 2], got {alpha}"
        )))
    }
}

fn check_rank(r: u32, n: u32) -> Result<f64> {
    Ok(binomial(r, n)?.as_f64())
}

pub fn q_of_u(u: f64, alpha: f64) -> f64 {
    u.powf(-2.0 / alpha)
}

/// Leading term `c_{r,n} Φ̄(u)^r` of `P(X_{r:n}(0) > u)`.
pub fn pointwise_orderstat_tail(r: u32, n: u32, u: f64) -> Result<f64> {
    let c = check_rank(r, n)?;
    Ok(c * std_normal_tail(u).powi(r as i32))
}

/// `T A_r c_{r,n} Φ̄(u)^r / q(u)` for the sup of the `r`-th order statistics
/// process of a standard stationary Gaussian process over `[0, T]`.
pub fn thm1_tail(
    r: u32,
    n: u32,
    horizon: f64,
    u: f64,
    alpha: f64,
    albin: f64,
) -> Result<TailApprox> {
    check_alpha(alpha)?;
    let c = check_rank(r, n)?;
    let value = horizon * albin * c * std_normal_tail(u).powi(r as i32) / q_of_u(u, alpha);
    Ok(TailApprox::new(value))
}

/// `P(|X(0)| > u)` for `X(0)` standard normal in `R^m`, leading term.
pub fn chi_tail(m: u32, u: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::Invalid("chi_tail needs m >= 1".into()));
    }
    let half_m = m as f64 / 2.0;
    let pre = 2f64.powf(1.0 - half_m) / gamma_function(half_m)?;
    Ok(pre * u.powi(m as i32 - 2) * (-u * u / 2.0).exp())
}

/// `P(ζ(0) > u)` for the skew-Gaussian marginal, leading term `δ^{m-1} chi_tail(m, u)`.
pub fn skew_tail(m: u32, delta: f64, u: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(delta.powi(m as i32 - 1) * chi_tail(m, u)?)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "delta must lie in (0, 1], got {delta}"
        )))
    }
}

/// Sup of the `r`-th order statistics process of a skew-Gaussian process:
/// `T Ã c_{r,n} δ^{rm-r} 2^{r-rm/2} Γ(m/2)^{-r} u^{2/α+rm-2r} e^{-r u²/2}`.
#[allow(clippy::too_many_arguments)]
pub fn thm_a_tail(
    r: u32,
    n: u32,
    m: u32,
    delta: f64,
    alpha: f64,
    horizon: f64,
    u: f64,
    albin: f64,
) -> Result<TailApprox> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    if m < 1 {
        return Err(Error::Invalid("m must be at least 1".into()));
    }
    let c = check_rank(r, n)?;
    let (rf, mf) = (r as f64, m as f64);
    let ln_value = horizon.ln()
        + albin.ln()
        + c.ln()
        + (rf * mf - rf) * delta.ln()
        + (rf - rf * mf / 2.0) * 2f64.ln()
        - rf * gamma_function(mf / 2.0)?.ln()
        + (2.0 / alpha + rf * mf - 2.0 * rf) * u.ln()
        - rf * u * u / 2.0;
    Ok(TailApprox::new(ln_value.exp()))
}

/// Gumbel normalization of the sup of the minimum order statistics process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GumbelConstants {
    pub a_t: f64,
    pub b_t: f64,
    pub d: f64,
    pub n: u32,
    pub alpha: f64,
    pub albin: f64,
}

impl GumbelConstants {
    pub fn normalize(&self, sup: f64) -> f64 {
        self.a_t * (sup - self.b_t)
    }
}

pub fn gumbel_constants(n: u32, alpha: f64, albin: f64, horizon: f64) -> Result<GumbelConstants> {
    check_alpha(alpha)?;
    if n < 1 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    if !(horizon > std::f64::consts::E) {
        return Err(Error::Domain(format!(
            "Gumbel normalization needs T > e, got {horizon}"
        )));
    }
    if !(albin > 0.0) {
        return Err(Error::Invalid(format!(
            "Albin constant must be positive, got {albin}"
        )));
    }
    let nf = n as f64;
    let ln_t = horizon.ln();
    let d = (nf / 2.0).powf(nf / 2.0 - 1.0 / alpha) * albin * (2.0 * PI).powf(-nf / 2.0);
    let a_t = (2.0 * nf * ln_t).sqrt();
    let b_t = (2.0 * ln_t / nf).sqrt() + ((1.0 / alpha - nf / 2.0) * ln_t.ln() + d.ln()) / a_t;
    Ok(GumbelConstants {
        a_t,
        b_t,
        d,
        n,
        alpha,
        albin,
    })
}

/// `ln T(u)` with `T(u) = (2π)^{n/2} / Ã u^{n - 2/α} e^{n u²/2}`.
pub fn log_horizon_for_threshold(n: u32, alpha: f64, albin: f64, u: f64) -> f64 {
    let nf = n as f64;
    nf / 2.0 * (2.0 * PI).ln() - albin.ln() + (nf - 2.0 / alpha) * u.ln() + nf * u * u / 2.0
}

pub fn horizon_for_threshold(n: u32, alpha: f64, albin: f64, u: f64) -> f64 {
    log_horizon_for_threshold(n, alpha, albin, u).exp()
}

/// Solve `T(u) = T` for `u > 1` on the log scale.
pub fn threshold_for_t(n: u32, alpha: f64, albin: f64, horizon: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n < 1 || !(albin > 0.0) || !(horizon > 0.0) {
        return Err(Error::Invalid(
            "threshold_for_t needs n >= 1, albin > 0, T > 0".into(),
        ));
    }
    let nf = n as f64;
    let target = horizon.ln();
    let f = |u: f64| log_horizon_for_threshold(n, alpha, albin, u) - target;
    // ln T(u) is increasing once n u² >= 2/α - n.
    let mut lo = (2.0 / (nf * alpha) - 1.0).max(1.0).sqrt();
    let mut hi = (4.0 * target.max(0.0) / nf).sqrt() + 10.0;
    if f(lo) > 0.0 {
        return Err(Error::NoRoot(format!(
            "T = {horizon} is below T(u) = {:e} at the smallest admissible level u = {lo}",
            f(lo).exp() * horizon
        )));
    }
    if f(hi) < 0.0 {
        return Err(Error::NoRoot(format!(
            "no root below u = {hi} for T = {horizon}"
        )));
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fu = f(u);
        if fu.abs() < 1e-13 {
            break;
        }
        if fu > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        // Newton step, falling back to bisection when it leaves the bracket.
        let slope = (nf - 2.0 / alpha) / u + nf * u;
        let next = u - fu / slope;
        u = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    if f(u).abs() >= 1e-12 {
        return Err(Error::NoRoot(format!(
            "log-residual {:e} after iteration",
            f(u)
        )));
    }
    Ok(u)
}

/// Large-`T` expansion of `u²` solving `T(u) = T`.
pub fn threshold_sq_expansion(n: u32, alpha: f64, albin: f64, horizon: f64) -> f64 {
    let nf = n as f64;
    let ln_t = horizon.ln();
    let e = 2.0 / (nf * alpha);
    2.0 * ln_t / nf
        + (e - 1.0) * ln_t.ln()
        + ((nf / 2.0).powf(1.0 - e) * albin.powf(2.0 / nf) / (2.0 * PI)).ln()
}

/// Standard Gumbel distribution function `exp(-e^{-x})`.
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}
