//! Experiments binding simulation to the asymptotic formulas. Each runner
//! turns a parsed config into rows; identical configs give identical rows
//! regardless of the worker count.

pub mod config;
pub mod output;
pub mod sim;

use crate::albin::{
    albin_ladder, extrapolate_albin, known_pickands, nested_hit_counts, AlbinConfig, AlbinEstimate,
};
use crate::asymptotics::{gumbel_cdf, gumbel_constants, q_of_u, thm1_tail, thm_a_tail};
use crate::comparison::{
    matrix_from_rows, random_cases, verify_bound, BoundKind, ComparisonCase, GaussianPair,
};
use crate::error::{Error, Result};
use crate::gaussian::{build_embedding, CovarianceModel, UniformGrid, DEFAULT_CLAMP_TOLERANCE};
use crate::processes::{OrderStatSpec, SkewParams};
use crate::rng::{derive_seed, RandomStream};

pub use config::{
    AlbinCell, AlbinEstimateSpec, AlbinSource, AlbinTableParams, CaseSpec, CompareParams,
    ExperimentConfig, ExperimentKind, ExperimentParams, GumbelParams, KnownTag,
    MomentNormalization, MomentsParams, OutputFormat, OutputSpec, RandomCaseSpec, SkewSpec,
    TailprobParams,
};
pub use output::{ExperimentResult, Row, CSV_COLUMNS};
pub use sim::ProcessShape;

use sim::{simulate, strided_sup, sup, sup_abs};

// Stream tags keep the sub-experiments of one seed independent.
const TAG_PATHS: u64 = 0x7061_7468;
const TAG_ALBIN: u64 = 0x616c_6269;
const TAG_CASES: u64 = 0x6361_7365;
const TAG_VERIFY: u64 = 0x7665_7269;

pub fn run(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let seed = config.seed;
    match &config.params {
        ExperimentParams::Tailprob(p) => run_tailprob(seed, p),
        ExperimentParams::Gumbel(p) => run_gumbel(seed, p),
        ExperimentParams::Moments(p) => run_moments(seed, p),
        ExperimentParams::Albin(p) => run_albin_table(seed, p),
        ExperimentParams::Compare(p) => run_compare(seed, p),
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "{name} must be positive and finite, got {v}"
        )))
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

fn check_reps(reps: usize) -> Result<()> {
    if reps >= 2 {
        Ok(())
    } else {
        Err(Error::Invalid("reps must be at least 2".into()))
    }
}

fn as_u32(name: &str, v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Range(format!("{name} = {v} is too large")))
}

/// The constant used in a formula and a flag naming its origin.
pub fn resolve_albin(
    source: &AlbinSource,
    r: usize,
    alpha: f64,
    seed: u64,
) -> Result<(f64, String)> {
    match source {
        AlbinSource::Fixed(v) => {
            positive("albin", *v)?;
            Ok((*v, "albin=fixed".into()))
        }
        AlbinSource::Named(KnownTag::Known) => match (r, known_pickands(alpha)) {
            (1, Some(v)) => Ok((v, "albin=known".into())),
            _ => Err(Error::Invalid(format!(
                "no known constant for r = {r}, alpha = {alpha}; give a value or an estimate config"
            ))),
        },
        AlbinSource::Estimate { estimate } => {
            let first = *estimate
                .grid_a
                .first()
                .ok_or_else(|| Error::Invalid("estimate.grid_a is empty".into()))?;
            let base = AlbinConfig {
                r,
                alpha,
                grid_a: first,
                horizon_t: estimate.horizon,
                reps: estimate.reps,
                seed: derive_seed(seed, TAG_ALBIN),
            };
            let ladder = albin_ladder(&base, &estimate.grid_a)?;
            if !(ladder.value > 0.0) {
                return Err(Error::DegenerateFit(format!(
                    "extrapolated constant {} is not positive",
                    ladder.value
                )));
            }
            Ok((ladder.value, format!("albin=estimated:{:.6}", ladder.value)))
        }
    }
}

/// Largest admissible spacing at level `u`: a quarter of the excursion scale,
/// in the time units of `exp(-c |t|^α)`.
pub fn max_spacing(u: f64, alpha: f64, scale_c: f64) -> f64 {
    q_of_u(u, alpha) / 4.0 / scale_c.powf(1.0 / alpha)
}

/// Frequency of `{discrete sup > u}` for each level against the leading-order
/// tail formula. Every level gets a second row on the grid with half the
/// spacing; both rows come from the same paths (the coarse grid is every
/// other point of the fine one).
pub fn run_tailprob(seed: u64, p: &TailprobParams) -> Result<ExperimentResult> {
    let spec = OrderStatSpec::new(p.r, p.n)?;
    check_alpha(p.alpha)?;
    positive("scale_c", p.scale_c)?;
    positive("horizon", p.horizon)?;
    positive("spacing", p.spacing)?;
    check_reps(p.reps)?;
    if p.u.is_empty() {
        return Err(Error::Invalid("u list is empty".into()));
    }
    for &u in &p.u {
        positive("u", u)?;
        let limit = max_spacing(u, p.alpha, p.scale_c);
        if p.spacing > limit {
            return Err(Error::GridTooCoarse {
                spacing: p.spacing,
                limit,
                u,
            });
        }
    }
    let skew = p.skew.map(|s| SkewParams::new(s.delta, s.m)).transpose()?;
    let (albin, albin_flag) = resolve_albin(&p.albin, p.r, p.alpha, seed)?;

    let model = CovarianceModel::stable_exponential(p.alpha, p.scale_c)?;
    let fine = UniformGrid::covering(p.horizon, p.spacing / 2.0)?;
    let emb = build_embedding(&model, fine, DEFAULT_CLAMP_TOLERANCE)?;
    let shape = ProcessShape {
        r: spec.r,
        n: spec.n,
        skew,
    };
    let stream = RandomStream::new(derive_seed(seed, TAG_PATHS), 0);
    let sups: Vec<(f64, f64)> = simulate(&emb, shape, p.reps, &stream, |x| {
        (strided_sup(x, 2), sup(x))
    });

    // Formula time runs in units of the local scale c^{-1/α}.
    let t_eff = p.horizon * p.scale_c.powf(1.0 / p.alpha);
    let (r, n) = (as_u32("r", p.r)?, as_u32("n", p.n)?);
    let mut rows = Vec::with_capacity(2 * p.u.len());
    for &u in &p.u {
        let (approx, tag) = match skew {
            None => (
                thm1_tail(r, n, t_eff, u, p.alpha, albin)?,
                "formula=orderstat_sup_tail",
            ),
            Some(s) => (
                thm_a_tail(r, n, as_u32("m", s.m)?, s.delta, p.alpha, t_eff, u, albin)?,
                "formula=skew_orderstat_sup_tail",
            ),
        };
        for (refined, spacing) in [(false, p.spacing), (true, p.spacing / 2.0)] {
            let hits = sups
                .iter()
                .filter(|&&(coarse, fine)| if refined { fine } else { coarse } > u)
                .count();
            let mc = hits as f64 / p.reps as f64;
            let mut row =
                Row::new(ExperimentKind::Tailprob, p.reps, seed, mc).with_formula(approx.value);
            row.r = Some(p.r);
            row.n = Some(p.n);
            row.m = skew.map(|s| s.m);
            row.delta = skew.map(|s| s.delta);
            row.alpha = Some(p.alpha);
            row.horizon = Some(p.horizon);
            row.u = Some(u);
            row.spacing = Some(spacing);
            row.mc_se = Some((mc * (1.0 - mc) / p.reps as f64).sqrt());
            row = row.flag(tag).flag(albin_flag.clone()).flag(if refined {
                "grid=refined"
            } else {
                "grid=base"
            });
            if p.scale_c != 1.0 {
                row = row.flag(format!("scale_c={}", p.scale_c));
            }
            if approx.regime_violated {
                row = row.flag("regime_violated");
            }
            rows.push(row);
        }
    }
    Ok(ExperimentResult {
        kind: ExperimentKind::Tailprob,
        seed,
        rows,
    })
}

/// Kolmogorov-Smirnov distance between the empirical law of `sample` and `cdf`.
/// Sorts the sample in place.
pub fn ks_distance(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Level `sqrt(2 ln T / n)` around which the sup of the minimum lives.
fn typical_level(n: usize, horizon: f64) -> f64 {
    (2.0 * horizon.ln() / n as f64).sqrt()
}

/// Default grid resolution `h u^{2/α}` for the horizon-ladder experiments.
pub const DEFAULT_GRID_DELTA: f64 = 0.03;

/// Spacing from either a fixed value or a resolution relative to `level`.
fn ladder_spacing(
    spacing: Option<f64>,
    grid_delta: Option<f64>,
    level: f64,
    alpha: f64,
) -> Result<f64> {
    match (spacing, grid_delta) {
        (Some(_), Some(_)) => Err(Error::Invalid(
            "give spacing or grid_delta, not both".into(),
        )),
        (Some(h), None) => {
            positive("spacing", h)?;
            Ok(h)
        }
        (None, d) => {
            let d = d.unwrap_or(DEFAULT_GRID_DELTA);
            positive("grid_delta", d)?;
            Ok(d * level.max(1.0).powf(-2.0 / alpha))
        }
    }
}

fn check_ladder(horizons: &[f64]) -> Result<()> {
    if horizons.len() < 2 {
        return Err(Error::Invalid("need at least two horizons".into()));
    }
    for &t in horizons {
        if !(t > std::f64::consts::E && t.is_finite()) {
            return Err(Error::Invalid(format!("horizons must exceed e, got {t}")));
        }
    }
    Ok(())
}

/// Sup of the minimum of `n` paths over `[0, T]` for each replication.
fn min_process_sups(
    n: usize,
    alpha: f64,
    horizon: f64,
    spacing: f64,
    reps: usize,
    stream: &RandomStream,
    functional: fn(&[f64]) -> f64,
) -> Result<Vec<f64>> {
    let model = CovarianceModel::stable_exponential(alpha, 1.0)?;
    let grid = UniformGrid::covering(horizon, spacing)?;
    let emb = build_embedding(&model, grid, DEFAULT_CLAMP_TOLERANCE)?;
    let shape = ProcessShape {
        r: n,
        n,
        skew: None,
    };
    Ok(simulate(&emb, shape, reps, stream, functional))
}

/// Distance of the normalized sup of the minimum process to the Gumbel law,
/// one row per horizon.
pub fn run_gumbel(seed: u64, p: &GumbelParams) -> Result<ExperimentResult> {
    OrderStatSpec::new(p.n, p.n)?;
    check_alpha(p.alpha)?;
    check_reps(p.reps)?;
    check_ladder(&p.horizons)?;
    let (albin, albin_flag) = resolve_albin(&p.albin, p.n, p.alpha, seed)?;
    let n = as_u32("n", p.n)?;
    let mut rows = Vec::with_capacity(p.horizons.len());
    for (i, &horizon) in p.horizons.iter().enumerate() {
        let consts = gumbel_constants(n, p.alpha, albin, horizon)?;
        let spacing = ladder_spacing(p.spacing, p.grid_delta, consts.b_t, p.alpha)?;
        let stream = RandomStream::new(derive_seed(seed, TAG_PATHS), i as u64);
        let mut z = min_process_sups(p.n, p.alpha, horizon, spacing, p.reps, &stream, sup)?;
        for v in z.iter_mut() {
            *v = consts.normalize(*v);
        }
        let ks = ks_distance(&mut z, gumbel_cdf);
        let mut row = Row::new(ExperimentKind::Gumbel, p.reps, seed, ks);
        row.r = Some(p.n);
        row.n = Some(p.n);
        row.alpha = Some(p.alpha);
        row.horizon = Some(horizon);
        row.u = Some(consts.b_t);
        row.spacing = Some(spacing);
        rows.push(
            row.flag("formula=gumbel_limit")
                .flag("statistic=ks_distance")
                .flag(albin_flag.clone()),
        );
    }
    Ok(ExperimentResult {
        kind: ExperimentKind::Gumbel,
        seed,
        rows,
    })
}

/// `E[(sup |X_{n:n}| / norm_T)^p]` along a horizon ladder; the limit is 1.
pub fn run_moments(seed: u64, p: &MomentsParams) -> Result<ExperimentResult> {
    OrderStatSpec::new(p.n, p.n)?;
    check_alpha(p.alpha)?;
    positive("p", p.p)?;
    check_reps(p.reps)?;
    check_ladder(&p.horizons)?;
    let mut rows = Vec::with_capacity(p.horizons.len());
    for (i, &horizon) in p.horizons.iter().enumerate() {
        let level = typical_level(p.n, horizon);
        let norm = match p.normalization {
            MomentNormalization::SqrtLog => level,
            MomentNormalization::Literal => (2.0 / p.n as f64).sqrt() * horizon.ln(),
        };
        let spacing = ladder_spacing(p.spacing, p.grid_delta, level, p.alpha)?;
        let stream = RandomStream::new(derive_seed(seed, TAG_PATHS), i as u64);
        let sups = min_process_sups(p.n, p.alpha, horizon, spacing, p.reps, &stream, sup_abs)?;
        let (mean, se) = mean_and_se(sups.iter().map(|s| (s / norm).powf(p.p)));
        let mut row = Row::new(ExperimentKind::Moments, p.reps, seed, mean).with_formula(1.0);
        row.r = Some(p.n);
        row.n = Some(p.n);
        row.alpha = Some(p.alpha);
        row.horizon = Some(horizon);
        row.spacing = Some(spacing);
        row.mc_se = Some(se);
        let norm_flag = match p.normalization {
            MomentNormalization::SqrtLog => "normalization=sqrt_log",
            MomentNormalization::Literal => "normalization=literal",
        };
        rows.push(
            row.flag("formula=moment_limit")
                .flag(norm_flag)
                .flag(format!("p={}", p.p)),
        );
    }
    Ok(ExperimentResult {
        kind: ExperimentKind::Moments,
        seed,
        rows,
    })
}

/// Sequential mean and standard error of the mean.
fn mean_and_se(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut count, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for v in values {
        count += 1.0;
        let d = v - mean;
        mean += d / count;
        m2 += d * (v - mean);
    }
    let var = if count > 1.0 { m2 / (count - 1.0) } else { 0.0 };
    (mean, (var / count).sqrt())
}

/// Extrapolated generalized Albin constants, one block of rows per cell:
/// each rung of the spacing ladder, then the extrapolation (no spacing).
/// Cells sharing `α` are simulated together, so larger `r` reuses the copies
/// of smaller `r`.
pub fn run_albin_table(seed: u64, p: &AlbinTableParams) -> Result<ExperimentResult> {
    if p.cells.is_empty() {
        return Err(Error::Invalid("no cells".into()));
    }
    let mut spacings = p.grid_a.clone();
    spacings.sort_by(|x, y| y.total_cmp(x));
    spacings.dedup();
    if spacings.len() < 3 {
        return Err(Error::Invalid(
            "grid_a needs at least three distinct spacings".into(),
        ));
    }
    let mut alphas: Vec<f64> = Vec::new();
    for c in &p.cells {
        if c.r < 1 {
            return Err(Error::Invalid("r must be at least 1".into()));
        }
        check_alpha(c.alpha)?;
        if !alphas.contains(&c.alpha) {
            alphas.push(c.alpha);
        }
    }
    // counts[alpha index][rung][r - 1]
    let mut counts = Vec::with_capacity(alphas.len());
    for &alpha in &alphas {
        let r_max = p
            .cells
            .iter()
            .filter(|c| c.alpha == alpha)
            .map(|c| c.r)
            .max()
            .unwrap_or(1);
        let per_rung = spacings
            .iter()
            .map(|&a| {
                let cfg = AlbinConfig {
                    r: r_max,
                    alpha,
                    grid_a: a,
                    horizon_t: p.horizon,
                    reps: p.reps,
                    seed,
                };
                nested_hit_counts(&cfg, r_max)
            })
            .collect::<Result<Vec<_>>>()?;
        counts.push(per_rung);
    }
    let mut rows = Vec::new();
    for cell in &p.cells {
        let ai = alphas
            .iter()
            .position(|&a| a == cell.alpha)
            .expect("alpha registered");
        let estimates: Vec<AlbinEstimate> = spacings
            .iter()
            .zip(&counts[ai])
            .map(|(&a, c)| {
                let cfg = AlbinConfig {
                    r: cell.r,
                    alpha: cell.alpha,
                    grid_a: a,
                    horizon_t: p.horizon,
                    reps: p.reps,
                    seed,
                };
                AlbinEstimate::from_hits(cfg, c[cell.r - 1])
            })
            .collect();
        let ladder = extrapolate_albin(&estimates)?;
        let known = if cell.r == 1 {
            known_pickands(cell.alpha)
        } else {
            None
        };
        let base = |mc: f64, se: f64| {
            let mut row = Row::new(ExperimentKind::Albin, p.reps, seed, mc);
            row.r = Some(cell.r);
            row.alpha = Some(cell.alpha);
            row.horizon = Some(p.horizon);
            row.mc_se = Some(se);
            if let Some(k) = known {
                row = row.with_formula(k).flag("formula=pickands_known");
            }
            row
        };
        for e in &estimates {
            let mut row = base(e.value, e.std_err).flag("rung");
            row.spacing = Some(e.config.grid_a);
            rows.push(row);
        }
        rows.push(
            base(ladder.value, ladder.std_err)
                .flag("extrapolated")
                .flag(format!("slope={:.6e}", ladder.slope))
                .flag(format!("lack_of_fit={:.6e}", ladder.lack_of_fit)),
        );
    }
    Ok(ExperimentResult {
        kind: ExperimentKind::Albin,
        seed,
        rows,
    })
}

fn case_from_spec(c: &CaseSpec) -> Result<ComparisonCase> {
    let pair = GaussianPair::new(matrix_from_rows(&c.sigma1)?, matrix_from_rows(&c.sigma0)?)?;
    Ok(ComparisonCase {
        pair,
        u: c.u.clone(),
        n: c.n,
        k: c.k,
    })
}

/// Monte Carlo check of the comparison bound for every case. Rows carry
/// `verified`; the run counts as failed if any case fails.
pub fn run_compare(seed: u64, p: &CompareParams) -> Result<ExperimentResult> {
    check_reps(p.reps)?;
    let mut cases = p
        .cases
        .iter()
        .map(case_from_spec)
        .collect::<Result<Vec<_>>>()?;
    if let Some(rc) = p.random {
        let mut s = RandomStream::new(derive_seed(seed, TAG_CASES), 0);
        let mut extra = random_cases(rc.count, rc.max_d, rc.max_n, &mut s);
        if p.bound == BoundKind::SharpMinimum {
            for c in extra.iter_mut() {
                c.k = c.n;
            }
        }
        cases.extend(extra);
    }
    if cases.is_empty() {
        return Err(Error::Invalid("no comparison cases".into()));
    }
    let bound_flag = match p.bound {
        BoundKind::Comparison => "formula=orderstat_comparison",
        BoundKind::SharpMinimum => "formula=sharp_minimum_comparison",
    };
    let mut rows = Vec::with_capacity(cases.len());
    for (i, c) in cases.iter().enumerate() {
        let stream = RandomStream::new(derive_seed(seed, TAG_VERIFY), i as u64);
        let rep = verify_bound(&c.pair, &c.u, c.n, c.k, p.reps, &stream, p.bound)?;
        let mut row = Row::new(ExperimentKind::Compare, p.reps, seed, rep.lhs_estimate)
            .with_formula(rep.bound);
        row.r = Some(c.k);
        row.n = Some(c.n);
        row.mc_se = Some(rep.lhs_std_err);
        row.verified = Some(rep.pass);
        let u: Vec<String> = c.u.iter().map(|x| format!("{x:.6}")).collect();
        rows.push(
            row.flag(bound_flag)
                .flag(format!("d={}", c.pair.dimension()))
                .flag(format!("u={}", u.join("/")))
                .flag(format!("margin_sigmas={:.3}", rep.margin_sigmas))
                .flag(if rep.pass { "pass" } else { "fail" }),
        );
    }
    Ok(ExperimentResult {
        kind: ExperimentKind::Compare,
        seed,
        rows,
    })
}
