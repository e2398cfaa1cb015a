//! Normal-comparison bounds for the maximum and minimum order-statistics
//! vectors of `n` i.i.d. Gaussian vectors, and a Monte Carlo check of them.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::rng::RandomStream;

const SYMMETRY_TOL: f64 = 1e-12;
const EIGEN_FLOOR: f64 = -1e-10;
const MAX_JITTER: f64 = 1e-12;
pub const A_STAR_TOL: f64 = 1e-10;
/// Replications per Monte Carlo block; each block owns a child stream.
const BLOCK: usize = 8192;

/// Validate a correlation matrix: symmetric, unit diagonal, entries in
/// `[-1, 1]`, positive semidefinite up to rounding.
pub fn validate_correlation(m: &DMatrix<f64>) -> Result<()> {
    let d = m.nrows();
    if d == 0 || m.ncols() != d {
        return Err(Error::Invalid(
            "correlation matrix must be square and non-empty".into(),
        ));
    }
    for i in 0..d {
        if (m[(i, i)] - 1.0).abs() > SYMMETRY_TOL {
            return Err(Error::Invalid(format!(
                "diagonal entry {i} is {} (must be 1)",
                m[(i, i)]
            )));
        }
        for j in 0..d {
            let v = m[(i, j)];
            if !v.is_finite() || v.abs() > 1.0 {
                return Err(Error::Invalid(format!(
                    "entry ({i}, {j}) = {v} outside [-1, 1]"
                )));
            }
            if (v - m[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::Invalid(format!(
                    "matrix not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let eig = SymmetricEigen::new(m.clone());
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min < EIGEN_FLOOR {
        return Err(Error::Invalid(format!(
            "matrix not positive semidefinite (eigenvalue {min:e})"
        )));
    }
    Ok(())
}

/// Build a matrix from rows.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Invalid("matrix rows must all have length d".into()));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

/// Two correlation matrices of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPair {
    pub sigma1: DMatrix<f64>,
    pub sigma0: DMatrix<f64>,
}

impl GaussianPair {
    pub fn new(sigma1: DMatrix<f64>, sigma0: DMatrix<f64>) -> Result<Self> {
        validate_correlation(&sigma1)?;
        validate_correlation(&sigma0)?;
        if sigma1.nrows() != sigma0.nrows() {
            return Err(Error::Invalid("matrices differ in dimension".into()));
        }
        Ok(Self { sigma1, sigma0 })
    }

    pub fn dimension(&self) -> usize {
        self.sigma1.nrows()
    }

    pub fn swapped(&self) -> Self {
        Self {
            sigma1: self.sigma0.clone(),
            sigma0: self.sigma1.clone(),
        }
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        let d = self.dimension();
        (0..d).flat_map(move |i| {
            (i + 1..d).map(move |j| (i, j, self.sigma1[(i, j)], self.sigma0[(i, j)]))
        })
    }

    fn check_thresholds(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dimension() {
            return Err(Error::Invalid(format!(
                "threshold vector has length {}, expected {}",
                u.len(),
                self.dimension()
            )));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("thresholds must be finite".into()));
        }
        Ok(())
    }
}

/// Arcsine-difference bound on `|P(X <= u) - P(Y <= u)|`.
pub fn li_shao_bound(pair: &GaussianPair, u: &[f64]) -> Result<f64> {
    pair.check_thresholds(u)?;
    let sum: f64 = pair
        .pairs()
        .map(|(i, j, s1, s0)| {
            let a = (s1.asin() - s0.asin()).abs();
            let rho = s1.abs().max(s0.abs());
            a * (-(u[i] * u[i] + u[j] * u[j]) / (2.0 * (1.0 + rho))).exp()
        })
        .sum();
    Ok(sum / (2.0 * PI))
}

/// Which extreme order statistic is compared: `k = 1` (maximum) or `k = n` (minimum).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Max,
    Min,
}

impl Extreme {
    pub fn from_rank(k: usize, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        if k == n {
            Ok(Extreme::Min)
        } else if k == 1 {
            Ok(Extreme::Max)
        } else {
            Err(Error::Invalid(format!(
                "comparison bounds cover only k = 1 or k = n, got k={k}, n={n}"
            )))
        }
    }
}

/// `n` times the arcsine-difference bound; valid for `k ∈ {1, n}`.
pub fn orderstat_comparison_bound(
    pair: &GaussianPair,
    u: &[f64],
    n: usize,
    k: usize,
) -> Result<f64> {
    Extreme::from_rank(k, n)?;
    Ok(n as f64 * li_shao_bound(pair, u)?)
}

/// `∫_{σ0}^{σ1} (1 + |h|)^{2(n-1)} / (1 - h²)^{n/2} dh`, evaluated as
/// `∫ (1 + |sin θ|)^{2(n-1)} / cos^{n-1} θ dθ` between the arcsines.
pub fn a_star(sigma1: f64, sigma0: f64, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    for s in [sigma1, sigma0] {
        if !(s > -1.0 && s < 1.0) {
            return Err(Error::Domain(format!(
                "a_star endpoints must lie in (-1, 1), got {s}"
            )));
        }
    }
    if sigma1 == sigma0 {
        return Ok(0.0);
    }
    let (t0, t1) = (sigma0.asin(), sigma1.asin());
    if n == 1 {
        return Ok(t1 - t0);
    }
    let p = 2 * (n as i32 - 1);
    let q = n as i32 - 1;
    let g = move |th: f64| (1.0 + th.sin().abs()).powi(p) / th.cos().powi(q);
    // |sin θ| has a kink at 0.
    if t0 < 0.0 && t1 > 0.0 || t0 > 0.0 && t1 < 0.0 {
        Ok(adaptive_simpson(g, t0, 0.0, A_STAR_TOL / 2.0)?
            + adaptive_simpson(g, 0.0, t1, A_STAR_TOL / 2.0)?)
    } else {
        adaptive_simpson(g, t0, t1, A_STAR_TOL)
    }
}

/// Bound for the minimum vector using the `A*` integrals and `ū = min u_i > 0`.
pub fn minstat_sharp_bound(pair: &GaussianPair, u: &[f64], n: usize) -> Result<f64> {
    pair.check_thresholds(u)?;
    if n < 1 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    if u.iter().any(|&x| x <= 0.0) {
        return Err(Error::Invalid(
            "sharp minimum bound needs all thresholds > 0".into(),
        ));
    }
    let ubar = u.iter().copied().fold(f64::INFINITY, f64::min);
    let nf = n as f64;
    let mut sum = 0.0;
    for (_, _, s1, s0) in pair.pairs() {
        let rho = s1.abs().max(s0.abs());
        let a = a_star(s1, s0, n)?;
        sum += a.abs() * (-nf * ubar * ubar / (1.0 + rho)).exp();
    }
    Ok(nf / (2.0 * PI).powi(n as i32) * ubar.powi(-2 * (n as i32 - 1)) * sum)
}

/// Lower-triangular factor of `sigma`, adding at most `1e-12` to the diagonal.
pub fn cholesky_with_jitter(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(c) = sigma.clone().cholesky() {
        return Ok(c.l());
    }
    let d = sigma.nrows();
    let jittered = sigma + DMatrix::<f64>::identity(d, d) * MAX_JITTER;
    jittered
        .cholesky()
        .map(|c| c.l())
        .ok_or_else(|| Error::Factorization("Cholesky failed even after diagonal jitter".into()))
}

fn event_holds(
    l: &DMatrix<f64>,
    z: &[f64],
    u: &[f64],
    n: usize,
    extreme: Extreme,
    x: &mut [f64],
) -> bool {
    let d = u.len();
    match extreme {
        Extreme::Max => {
            for j in 0..n {
                mul_lower(l, &z[j * d..(j + 1) * d], x);
                if x.iter().zip(u).any(|(xi, ui)| xi > ui) {
                    return false;
                }
            }
            true
        }
        Extreme::Min => {
            let mut min = [f64::INFINITY; 16];
            let min = &mut min[..d];
            for j in 0..n {
                mul_lower(l, &z[j * d..(j + 1) * d], x);
                for (m, &xi) in min.iter_mut().zip(x.iter()) {
                    *m = m.min(xi);
                }
            }
            min.iter().zip(u).all(|(m, ui)| m <= ui)
        }
    }
}

fn mul_lower(l: &DMatrix<f64>, z: &[f64], out: &mut [f64]) {
    let d = z.len();
    for i in 0..d {
        let mut s = 0.0;
        for k in 0..=i {
            s += l[(i, k)] * z[k];
        }
        out[i] = s;
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    hits1: u64,
    hits0: u64,
    disagree_pos: u64,
    disagree_neg: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            hits1: self.hits1 + o.hits1,
            hits0: self.hits0 + o.hits0,
            disagree_pos: self.disagree_pos + o.disagree_pos,
            disagree_neg: self.disagree_neg + o.disagree_neg,
        }
    }
}

fn check_mc_inputs(d: usize, u: &[f64], n: usize, reps: usize) -> Result<()> {
    if u.len() != d {
        return Err(Error::Invalid(
            "threshold vector length must match the matrix".into(),
        ));
    }
    if d > 16 {
        return Err(Error::Invalid("Monte Carlo check supports d <= 16".into()));
    }
    if n < 1 || reps < 2 {
        return Err(Error::Invalid("need n >= 1 and reps >= 2".into()));
    }
    Ok(())
}

/// Common-random-number counts of the event under both factors.
fn crn_counts(
    l1: &DMatrix<f64>,
    l0: &DMatrix<f64>,
    u: &[f64],
    n: usize,
    extreme: Extreme,
    reps: usize,
    stream: &RandomStream,
) -> Counts {
    let d = u.len();
    let blocks = reps.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut s = stream.child(b as u64);
            let count = BLOCK.min(reps - b * BLOCK);
            let mut z = vec![0.0; n * d];
            let mut x = vec![0.0; d];
            let mut c = Counts::default();
            for _ in 0..count {
                s.fill_normal(&mut z);
                let e1 = event_holds(l1, &z, u, n, extreme, &mut x);
                let e0 = if std::ptr::eq(l1, l0) {
                    e1
                } else {
                    event_holds(l0, &z, u, n, extreme, &mut x)
                };
                c.hits1 += e1 as u64;
                c.hits0 += e0 as u64;
                c.disagree_pos += (e1 && !e0) as u64;
                c.disagree_neg += (!e1 && e0) as u64;
            }
            c
        })
        .reduce(Counts::default, |a, b| a + b)
}

/// Monte Carlo estimate and standard error of `P(X_{k:n} <= u)` componentwise.
pub fn mc_orderstat_cdf(
    sigma: &DMatrix<f64>,
    u: &[f64],
    n: usize,
    k: usize,
    reps: usize,
    stream: &RandomStream,
) -> Result<(f64, f64)> {
    validate_correlation(sigma)?;
    check_mc_inputs(sigma.nrows(), u, n, reps)?;
    let extreme = Extreme::from_rank(k, n)?;
    let l = cholesky_with_jitter(sigma)?;
    let c = crn_counts(&l, &l, u, n, extreme, reps, stream);
    let p = c.hits1 as f64 / reps as f64;
    Ok((p, (p * (1.0 - p) / reps as f64).sqrt()))
}

/// `P_1 - P_0` on common random numbers, with the standard error of the
/// paired difference.
pub fn mc_orderstat_cdf_difference(
    pair: &GaussianPair,
    u: &[f64],
    n: usize,
    k: usize,
    reps: usize,
    stream: &RandomStream,
) -> Result<(f64, f64)> {
    check_mc_inputs(pair.dimension(), u, n, reps)?;
    let extreme = Extreme::from_rank(k, n)?;
    let l1 = cholesky_with_jitter(&pair.sigma1)?;
    let l0 = cholesky_with_jitter(&pair.sigma0)?;
    let c = crn_counts(&l1, &l0, u, n, extreme, reps, stream);
    let nf = reps as f64;
    let mean = (c.disagree_pos as f64 - c.disagree_neg as f64) / nf;
    let second = (c.disagree_pos + c.disagree_neg) as f64 / nf;
    let var = (second - mean * mean).max(0.0) * nf / (nf - 1.0);
    Ok((mean, (var / nf).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `n` times the arcsine bound, `k ∈ {1, n}`.
    Comparison,
    /// `A*`-integral bound for the minimum, positive thresholds only.
    SharpMinimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub bound: f64,
    pub lhs_estimate: f64,
    pub lhs_std_err: f64,
    /// `(bound - |lhs|) / std_err`; infinite when the difference is exact.
    pub margin_sigmas: f64,
    pub pass: bool,
}

impl BoundReport {
    pub fn new(bound: f64, lhs_estimate: f64, lhs_std_err: f64) -> Self {
        let slack = bound - lhs_estimate.abs();
        let margin_sigmas = if lhs_std_err > 0.0 {
            slack / lhs_std_err
        } else if slack >= 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        Self {
            bound,
            lhs_estimate,
            lhs_std_err,
            margin_sigmas,
            pass: lhs_estimate.abs() <= bound + 3.0 * lhs_std_err,
        }
    }
}

pub fn verify_bound(
    pair: &GaussianPair,
    u: &[f64],
    n: usize,
    k: usize,
    reps: usize,
    stream: &RandomStream,
    kind: BoundKind,
) -> Result<BoundReport> {
    let bound = match kind {
        BoundKind::Comparison => orderstat_comparison_bound(pair, u, n, k)?,
        BoundKind::SharpMinimum => {
            if Extreme::from_rank(k, n)? != Extreme::Min {
                return Err(Error::Invalid(
                    "sharp bound applies to the minimum (k = n) only".into(),
                ));
            }
            minstat_sharp_bound(pair, u, n)?
        }
    };
    let (lhs, se) = mc_orderstat_cdf_difference(pair, u, n, k, reps, stream)?;
    Ok(BoundReport::new(bound, lhs, se))
}

/// A random correlation matrix `D^{-1/2} G Gᵀ D^{-1/2}` with Gaussian `G`.
pub fn random_correlation(d: usize, stream: &mut RandomStream) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| stream.normal());
    let s = &g * g.transpose();
    let mut c = DMatrix::from_fn(d, d, |i, j| s[(i, j)] / (s[(i, i)] * s[(j, j)]).sqrt());
    for i in 0..d {
        c[(i, i)] = 1.0;
        for j in 0..i {
            c[(j, i)] = c[(i, j)];
        }
    }
    c
}

/// One randomized verification case.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonCase {
    pub pair: GaussianPair,
    pub u: Vec<f64>,
    pub n: usize,
    pub k: usize,
}

/// `count` cases with `2 <= d <= max_d`, `1 <= n <= max_n`, `k ∈ {1, n}` and
/// thresholds uniform on `[0.5, 3]`.
pub fn random_cases(
    count: usize,
    max_d: usize,
    max_n: usize,
    stream: &mut RandomStream,
) -> Vec<ComparisonCase> {
    let max_d = max_d.max(2);
    let max_n = max_n.max(1);
    (0..count)
        .map(|_| {
            let d = 2 + (stream.uniform() * (max_d - 1) as f64) as usize;
            let n = 1 + (stream.uniform() * max_n as f64) as usize;
            let k = if stream.uniform() < 0.5 { 1 } else { n };
            let sigma1 = random_correlation(d, stream);
            let sigma0 = random_correlation(d, stream);
            let u = (0..d).map(|_| 0.5 + 2.5 * stream.uniform()).collect();
            ComparisonCase {
                pair: GaussianPair { sigma1, sigma0 },
                u,
                n,
                k,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::split_stream;

    fn pair2(s1: f64, s0: f64) -> GaussianPair {
        GaussianPair::new(
            DMatrix::from_row_slice(2, 2, &[1.0, s1, s1, 1.0]),
            DMatrix::from_row_slice(2, 2, &[1.0, s0, s0, 1.0]),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let bad_diag = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.9]);
        assert!(validate_correlation(&bad_diag).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.3, 1.0]);
        assert!(validate_correlation(&asym).is_err());
        let not_psd =
            DMatrix::from_row_slice(3, 3, &[1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0]);
        assert!(validate_correlation(&not_psd).is_err());
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(validate_correlation(&singular).is_ok());
        assert!(cholesky_with_jitter(&singular).is_ok());
    }

    #[test]
    fn li_shao_examples() {
        let same = pair2(0.4, 0.4);
        assert_eq!(li_shao_bound(&same, &[0.3, -1.0]).unwrap(), 0.0);
        let p = pair2(0.5, 0.0);
        assert!((li_shao_bound(&p, &[0.0, 0.0]).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        let want = (-8.0f64 / 3.0).exp() / 12.0;
        assert!((li_shao_bound(&p, &[2.0, 2.0]).unwrap() - want).abs() < 1e-15);
        assert!((want - 5.790_287_6e-3).abs() < 1e-10);
        assert!(li_shao_bound(&p, &[1.0]).is_err());
    }

    #[test]
    fn orderstat_bound_examples() {
        let p = pair2(0.5, 0.0);
        let u = [1.0, 1.0];
        assert_eq!(
            orderstat_comparison_bound(&p, &u, 1, 1).unwrap(),
            li_shao_bound(&p, &u).unwrap()
        );
        let b = orderstat_comparison_bound(&p, &u, 2, 2).unwrap();
        assert!((b - (-2.0f64 / 3.0).exp() / 6.0).abs() < 1e-15);
        assert!((b - 0.085_569_52).abs() < 1e-8);
        assert!(orderstat_comparison_bound(&p, &u, 3, 2).is_err());
        for n in 1..5 {
            assert_eq!(
                orderstat_comparison_bound(&pair2(0.2, 0.2), &u, n, n).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn a_star_closed_forms() {
        assert_eq!(a_star(0.3, 0.3, 3).unwrap(), 0.0);
        assert!((a_star(0.5, 0.0, 1).unwrap() - PI / 6.0).abs() < 1e-15);
        let want = -0.5 + 2.0 * 2f64.ln();
        assert!((a_star(0.5, 0.0, 2).unwrap() - want).abs() < 1e-9);
        assert!((a_star(0.0, 0.5, 2).unwrap() + want).abs() < 1e-9);
        // Straddling zero: ∫_{-0.5}^{0.5} (1+|h|)/(1-|h|) dh.
        assert!((a_star(0.5, -0.5, 2).unwrap() - 2.0 * want).abs() < 1e-9);
        // n = 3: ∫_0^x (1+h)^4/(1-h²)^{3/2} = ∫ (1+h)^{5/2} (1-h)^{-3/2}.
        let x: f64 = 0.6;
        let oracle = adaptive_simpson(
            |h: f64| (1.0 + h).powf(2.5) / (1.0 - h).powf(1.5),
            0.0,
            x,
            1e-13,
        )
        .unwrap();
        assert!((a_star(x, 0.0, 3).unwrap() - oracle).abs() < 1e-9);
        assert!(a_star(1.0, 0.0, 2).is_err());
        assert!(a_star(0.2, -1.0, 2).is_err());
    }

    #[test]
    fn a_star_near_one() {
        // Steep integrand near the upper end used to exhaust the subdivision depth.
        let v = a_star(0.995_195_031_856_301_5, 0.01, 3).unwrap();
        assert!((v - 140.403_411_091_009_39).abs() < 1e-9, "{v}");
    }

    #[test]
    fn sharp_bound_example() {
        let p = pair2(0.5, 0.0);
        let v = minstat_sharp_bound(&p, &[2.0, 2.0], 2).unwrap();
        let want =
            2.0 / (2.0 * PI).powi(2) * 0.25 * (-0.5 + 2.0 * 2f64.ln()) * (-8.0f64 / 1.5).exp();
        assert!((v / want - 1.0).abs() < 1e-9);
        assert!((v - 5.42e-5).abs() < 1e-6);
        assert_eq!(
            minstat_sharp_bound(&pair2(0.1, 0.1), &[1.0, 1.0], 3).unwrap(),
            0.0
        );
        assert!(minstat_sharp_bound(&p, &[0.0, 1.0], 2).is_err());
        // n = 1 is the arcsine structure at the smallest threshold.
        let one = minstat_sharp_bound(&p, &[1.0, 2.0], 1).unwrap();
        assert!((one - (PI / 6.0) / (2.0 * PI) * (-1.0f64 / 1.5).exp()).abs() < 1e-14);
    }

    #[test]
    fn mc_simple_probabilities() {
        let id1 = DMatrix::identity(1, 1);
        let s = split_stream(3, 0);
        let (p, se) = mc_orderstat_cdf(&id1, &[0.0], 2, 2, 100_000, &s).unwrap();
        assert!((p - 0.75).abs() < 4.0 * se);
        let (p, se) = mc_orderstat_cdf(&id1, &[0.0], 2, 1, 100_000, &s).unwrap();
        assert!((p - 0.25).abs() < 4.0 * se);
        let id2 = DMatrix::identity(2, 2);
        let (p, se) = mc_orderstat_cdf(&id2, &[0.0, 0.0], 1, 1, 100_000, &s).unwrap();
        assert!((p - 0.25).abs() < 4.0 * se);
        assert!(mc_orderstat_cdf(&id2, &[0.0, 0.0], 3, 2, 100, &s).is_err());
    }

    #[test]
    fn identical_matrices_pass_exactly() {
        let p = pair2(0.3, 0.3);
        let r = verify_bound(
            &p,
            &[1.0, 1.5],
            2,
            2,
            20_000,
            &split_stream(1, 1),
            BoundKind::Comparison,
        )
        .unwrap();
        assert_eq!(r.lhs_estimate, 0.0);
        assert_eq!(r.bound, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn random_cases_are_valid() {
        let mut s = split_stream(5, 0);
        for c in random_cases(30, 4, 3, &mut s) {
            assert!(GaussianPair::new(c.pair.sigma1.clone(), c.pair.sigma0.clone()).is_ok());
            assert!((2..=4).contains(&c.pair.dimension()));
            assert!((1..=3).contains(&c.n));
            assert!(c.k == 1 || c.k == c.n);
            assert!(c.u.iter().all(|&x| (0.5..=3.0).contains(&x)));
        }
    }
}
