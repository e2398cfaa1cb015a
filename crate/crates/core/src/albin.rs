//! Monte Carlo estimation of generalized Albin constants
//! `A_r = lim_{a↓0} a⁻¹ P(sup_{k>=1} min_{i<=r} ξ_i(a k) <= 0)` for the drifted
//! fBm field `ξ(t) = sqrt(2) Z(t) - t^α + E`, and extrapolation in `a`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::processes::LimitField;
use crate::rng::split_stream;

/// 0.9999 quantile of the unit exponential, `ln 10^4`.
pub const EXP_QUANTILE: f64 = 9.210_340_371_976_184;
/// Multiple of the fBm standard deviation at the horizon added to the margin.
pub const HORIZON_SIGMAS: f64 = 2.0;

/// Pickands constant where it is known in closed form.
pub fn known_pickands(alpha: f64) -> Option<f64> {
    if alpha == 1.0 {
        Some(1.0)
    } else if alpha == 2.0 {
        Some(1.0 / std::f64::consts::PI.sqrt())
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AlbinConfig {
    pub r: usize,
    pub alpha: f64,
    pub grid_a: f64,
    pub horizon_t: f64,
    pub reps: usize,
    pub seed: u64,
}

impl AlbinConfig {
    pub fn horizon_points(&self) -> usize {
        // Relative slack so that 30 / 0.01 does not round up to 3001.
        ((self.horizon_t / self.grid_a) * (1.0 - 1e-12))
            .ceil()
            .max(1.0) as usize
    }

    /// Smallest horizon passing the drift-dominance rule
    /// `T^α >= q_exp + HORIZON_SIGMAS sqrt(2) T^{α/2}`.
    pub fn min_horizon(alpha: f64) -> f64 {
        let b = HORIZON_SIGMAS * std::f64::consts::SQRT_2;
        // Quadratic in s = T^{α/2}.
        let s = 0.5 * (b + (b * b + 4.0 * EXP_QUANTILE).sqrt());
        s.powf(2.0 / alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 1 {
            return Err(Error::Invalid("r must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::Invalid(format!(
                "alpha must lie in (0, 2], got {}",
                self.alpha
            )));
        }
        if !(self.grid_a > 0.0 && self.grid_a.is_finite()) {
            return Err(Error::Invalid(format!(
                "grid_a must be positive, got {}",
                self.grid_a
            )));
        }
        if self.reps < 1 {
            return Err(Error::Invalid("reps must be positive".into()));
        }
        let drift = self.horizon_t.powf(self.alpha);
        let margin = EXP_QUANTILE
            + HORIZON_SIGMAS * std::f64::consts::SQRT_2 * self.horizon_t.powf(self.alpha / 2.0);
        if !(drift >= margin) {
            return Err(Error::HorizonTooShort(format!(
                "T^alpha = {drift:.3} is below the margin {margin:.3}; need T >= {:.3}",
                Self::min_horizon(self.alpha)
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AlbinEstimate {
    pub value: f64,
    pub std_err: f64,
    pub config: AlbinConfig,
    pub hit_count: u64,
}

impl AlbinEstimate {
    pub fn from_hits(config: AlbinConfig, hit_count: u64) -> Self {
        let reps = config.reps as f64;
        let p = hit_count as f64 / reps;
        Self {
            value: p / config.grid_a,
            std_err: (p * (1.0 - p) / reps).sqrt() / config.grid_a,
            config,
            hit_count,
        }
    }
}

/// Hit counts for each `r` in `1..=r_max` from one nested simulation.
///
/// Replication `i` uses stream `(seed, i)`, so counts do not depend on the
/// number of worker threads.
pub fn nested_hit_counts(config: &AlbinConfig, r_max: usize) -> Result<Vec<u64>> {
    config.validate()?;
    let field = LimitField::new(config.alpha, config.grid_a, config.horizon_points())?;
    let r_max = r_max.max(1);
    let counts = (0..config.reps)
        .into_par_iter()
        .map_init(
            || (field.workspace(), vec![0u64; r_max]),
            |(ws, scratch), rep| {
                let stream = split_stream(config.seed, rep as u64);
                scratch.fill(0);
                // The field for r copies is the running minimum, so one draw of
                // r_max copies settles every smaller r too.
                ws.draw_nested(r_max, &stream, |r, sup| {
                    if sup <= 0.0 {
                        scratch[r - 1] = 1;
                    }
                });
                scratch.clone()
            },
        )
        .reduce(
            || vec![0u64; r_max],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(counts)
}

pub fn estimate_albin(config: &AlbinConfig) -> Result<AlbinEstimate> {
    let counts = nested_hit_counts(config, config.r)?;
    Ok(AlbinEstimate::from_hits(*config, counts[config.r - 1]))
}

/// Estimates over a decreasing sequence of grid spacings and their linear
/// extrapolation to `a = 0`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AlbinLadder {
    pub estimates: Vec<AlbinEstimate>,
    pub value: f64,
    pub std_err: f64,
    pub slope: f64,
    /// Weighted residual sum of squares of the linear fit.
    pub lack_of_fit: f64,
    pub dof: usize,
}

/// Weighted least-squares fit `value(a) = A + β a` with inverse-variance
/// weights (equal weights if any estimate has zero standard error).
pub fn extrapolate_albin(ladder: &[AlbinEstimate]) -> Result<AlbinLadder> {
    if ladder.len() < 3 {
        return Err(Error::Invalid(format!(
            "need at least 3 estimates, got {}",
            ladder.len()
        )));
    }
    let a: Vec<f64> = ladder.iter().map(|e| e.config.grid_a).collect();
    if a.iter().all(|&x| x == a[0]) {
        return Err(Error::DegenerateFit("all grid spacings are equal".into()));
    }
    if a.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid(
            "grid spacings must be strictly decreasing".into(),
        ));
    }
    let weighted = ladder.iter().all(|e| e.std_err > 0.0);
    let w: Vec<f64> = ladder
        .iter()
        .map(|e| {
            if weighted {
                1.0 / (e.std_err * e.std_err)
            } else {
                1.0
            }
        })
        .collect();
    let y: Vec<f64> = ladder.iter().map(|e| e.value).collect();
    let (mut sw, mut swx, mut swxx, mut swy, mut swxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..a.len() {
        sw += w[i];
        swx += w[i] * a[i];
        swxx += w[i] * a[i] * a[i];
        swy += w[i] * y[i];
        swxy += w[i] * a[i] * y[i];
    }
    let det = sw * swxx - swx * swx;
    if !(det > 0.0) {
        return Err(Error::DegenerateFit("singular normal equations".into()));
    }
    let intercept = (swxx * swy - swx * swxy) / det;
    let slope = (sw * swxy - swx * swy) / det;
    let rss: f64 = (0..a.len())
        .map(|i| w[i] * (y[i] - intercept - slope * a[i]).powi(2))
        .sum();
    let dof = a.len() - 2;
    let var_intercept = if weighted {
        swxx / det
    } else {
        swxx / det * rss / dof as f64
    };
    Ok(AlbinLadder {
        estimates: ladder.to_vec(),
        value: intercept,
        std_err: var_intercept.sqrt(),
        slope,
        lack_of_fit: rss,
        dof,
    })
}

/// Estimate at every spacing in `grid_a` (any order; sorted decreasing) and
/// extrapolate. All rungs share `base.seed`.
pub fn albin_ladder(base: &AlbinConfig, grid_a: &[f64]) -> Result<AlbinLadder> {
    let mut spacings = grid_a.to_vec();
    spacings.sort_by(|x, y| y.total_cmp(x));
    let estimates = spacings
        .iter()
        .map(|&a| estimate_albin(&AlbinConfig { grid_a: a, ..*base }))
        .collect::<Result<Vec<_>>>()?;
    extrapolate_albin(&estimates)
}
