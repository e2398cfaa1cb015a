//! Processes derived from raw Gaussian paths: order statistics across
//! independent copies, skew-Gaussian combinations, and the drifted fBm field
//! whose minimum over copies defines the generalized Albin constants.

use crate::error::{Error, Result};
use crate::gaussian::{FbmGenerator, FbmSampler, SamplePath, UniformGrid};
use crate::rng::RandomStream;

/// Rank `r` among `n` copies, `r = 1` the maximum and `r = n` the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderStatSpec {
    pub r: usize,
    pub n: usize,
}

impl OrderStatSpec {
    pub fn new(r: usize, n: usize) -> Result<Self> {
        if r < 1 || r > n {
            return Err(Error::Invalid(format!(
                "order statistic needs 1 <= r <= n, got r={r}, n={n}"
            )));
        }
        Ok(Self { r, n })
    }
}

/// `r`-th largest of `values`; reorders the slice.
pub fn rth_largest(values: &mut [f64], r: usize) -> f64 {
    let n = values.len();
    debug_assert!(r >= 1 && r <= n);
    if r == 1 {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else if r == n {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        let (_, v, _) = values.select_nth_unstable_by(r - 1, |a, b| b.total_cmp(a));
        *v
    }
}

/// Pointwise `r`-th largest across equally long columns, written into `out`.
pub fn order_statistic_into(columns: &[&[f64]], r: usize, out: &mut [f64]) {
    let n = columns.len();
    if r == 1 {
        out.copy_from_slice(columns[0]);
        for c in &columns[1..] {
            for (o, &v) in out.iter_mut().zip(c.iter()) {
                *o = o.max(v);
            }
        }
    } else if r == n {
        out.copy_from_slice(columns[0]);
        for c in &columns[1..] {
            for (o, &v) in out.iter_mut().zip(c.iter()) {
                *o = o.min(v);
            }
        }
    } else {
        let mut buf = vec![0.0; n];
        for (t, o) in out.iter_mut().enumerate() {
            for (b, c) in buf.iter_mut().zip(columns) {
                *b = c[t];
            }
            *o = rth_largest(&mut buf, r);
        }
    }
}

/// The `r`-th order statistics process of `paths` (one path per copy).
pub fn order_statistics_path(paths: &[SamplePath], spec: OrderStatSpec) -> Result<SamplePath> {
    if paths.len() != spec.n {
        return Err(Error::Invalid(format!(
            "expected {} paths, got {}",
            spec.n,
            paths.len()
        )));
    }
    let grid = paths[0].grid;
    if paths
        .iter()
        .any(|p| p.grid != grid || p.values.len() != grid.n_points)
    {
        return Err(Error::Invalid("paths do not share one grid".into()));
    }
    let columns: Vec<&[f64]> = paths.iter().map(|p| p.values.as_slice()).collect();
    let mut values = vec![0.0; grid.n_points];
    order_statistic_into(&columns, spec.r, &mut values);
    Ok(SamplePath { grid, values })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewParams {
    pub delta: f64,
    pub m: usize,
}

impl SkewParams {
    pub fn new(delta: f64, m: usize) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Invalid(format!(
                "delta must lie in (0, 1], got {delta}"
            )));
        }
        if m < 1 {
            return Err(Error::Invalid("m must be at least 1".into()));
        }
        Ok(Self { delta, m })
    }

    /// Weight of the independent Gaussian component, `sqrt(1 - δ²)`.
    pub fn gaussian_weight(&self) -> f64 {
        (1.0 - self.delta * self.delta).max(0.0).sqrt()
    }

    /// Gaussian paths consumed per skew path; the last one is skipped when `δ = 1`.
    pub fn paths_needed(&self) -> usize {
        if self.delta == 1.0 {
            self.m
        } else {
            self.m + 1
        }
    }
}

/// `δ |X(t)| + sqrt(1 - δ²) X_{m+1}(t)` for `components = [X_1, .., X_m, X_{m+1}]`.
/// With `δ = 1` the last component may be omitted.
pub fn skew_into(components: &[&[f64]], params: SkewParams, out: &mut [f64]) {
    let m = params.m;
    let w = params.gaussian_weight();
    for (t, o) in out.iter_mut().enumerate() {
        let norm2: f64 = components[..m].iter().map(|c| c[t] * c[t]).sum();
        let mut v = params.delta * norm2.sqrt();
        if w > 0.0 {
            v += w * components[m][t];
        }
        *o = v;
    }
}

pub fn skew_gaussian_path(paths: &[SamplePath], params: SkewParams) -> Result<SamplePath> {
    if paths.len() != params.m + 1 {
        return Err(Error::Invalid(format!(
            "skew-Gaussian path needs m + 1 = {} paths, got {}",
            params.m + 1,
            paths.len()
        )));
    }
    let grid = paths[0].grid;
    if paths.iter().any(|p| p.grid != grid) {
        return Err(Error::Invalid("paths do not share one grid".into()));
    }
    let columns: Vec<&[f64]> = paths.iter().map(|p| p.values.as_slice()).collect();
    let mut values = vec![0.0; grid.n_points];
    skew_into(&columns, params, &mut values);
    Ok(SamplePath { grid, values })
}

/// Minimum over `r` independent copies of `sqrt(2) Z(t) - t^α + E` on
/// `t = a, 2a, .., K a`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitFieldSample {
    pub a: f64,
    pub horizon_points: usize,
    /// `values[k - 1]` is the field at `t = k a`.
    pub values: Vec<f64>,
}

impl LimitFieldSample {
    pub fn sup(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Reusable sampler of the limit field for fixed `(alpha, a, K)`.
///
/// For a given stream, copy `i` depends only on the stream and `i`, so the
/// fields for `r` and `r' > r` copies are nested: the larger one is a minimum
/// over a superset.
#[derive(Debug, Clone)]
pub struct LimitField {
    pub alpha: f64,
    pub a: f64,
    pub horizon_points: usize,
    fbm: FbmGenerator,
    drift: Vec<f64>,
}

// Child-stream lanes of a replication stream.
const FBM_LANE: u64 = 0;
const EXP_LANE: u64 = 1;

impl LimitField {
    pub fn new(alpha: f64, a: f64, horizon_points: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Invalid(format!(
                "alpha must lie in (0, 2], got {alpha}"
            )));
        }
        if horizon_points < 1 {
            return Err(Error::Invalid("limit field needs K >= 1".into()));
        }
        let grid = UniformGrid::new(a, horizon_points + 1)?;
        let fbm = FbmGenerator::new(alpha / 2.0, grid)?;
        let drift = (1..=horizon_points)
            .map(|k| (a * k as f64).powf(alpha))
            .collect();
        Ok(Self {
            alpha,
            a,
            horizon_points,
            fbm,
            drift,
        })
    }

    pub fn workspace(&self) -> LimitFieldWorkspace<'_> {
        LimitFieldWorkspace {
            field: self,
            fbm: self.fbm.sampler(RandomStream::new(0, 0)),
            path: vec![0.0; self.horizon_points + 1],
            min: vec![0.0; self.horizon_points],
        }
    }
}

pub struct LimitFieldWorkspace<'a> {
    field: &'a LimitField,
    fbm: FbmSampler<'a>,
    path: Vec<f64>,
    min: Vec<f64>,
}

impl LimitFieldWorkspace<'_> {
    /// Draw the minimum over `r` copies; the result is in [`Self::values`].
    pub fn draw(&mut self, r: usize, stream: &RandomStream) {
        self.draw_nested(r, stream, |_, _| {});
    }

    /// Draw `r_max` copies, calling `visit(r, sup)` with the supremum of the
    /// running minimum after each copy `r = 1..=r_max`.
    pub fn draw_nested(
        &mut self,
        r_max: usize,
        stream: &RandomStream,
        mut visit: impl FnMut(usize, f64),
    ) {
        self.fbm.reset(stream.child(FBM_LANE));
        let mut exps = stream.child(EXP_LANE);
        self.min.fill(f64::INFINITY);
        for r in 1..=r_max {
            self.fbm.next_into(&mut self.path);
            let e = exps.exponential();
            let mut sup = f64::NEG_INFINITY;
            for ((m, &z), &d) in self
                .min
                .iter_mut()
                .zip(&self.path[1..])
                .zip(&self.field.drift)
            {
                let v = std::f64::consts::SQRT_2 * z - d + e;
                if v < *m {
                    *m = v;
                }
                sup = sup.max(*m);
            }
            visit(r, sup);
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.min
    }

    pub fn sup(&self) -> f64 {
        self.min.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn sample_limit_field(
    r: usize,
    alpha: f64,
    a: f64,
    horizon_points: usize,
    stream: &RandomStream,
) -> Result<LimitFieldSample> {
    if r < 1 {
        return Err(Error::Invalid("limit field needs r >= 1".into()));
    }
    let field = LimitField::new(alpha, a, horizon_points)?;
    let mut ws = field.workspace();
    ws.draw(r, stream);
    Ok(LimitFieldSample {
        a,
        horizon_points,
        values: ws.values().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::split_stream;

    fn path(values: Vec<f64>) -> SamplePath {
        let grid = UniformGrid::new(0.1, values.len()).unwrap();
        SamplePath { grid, values }
    }

    #[test]
    fn middle_of_three() {
        let ps = vec![path(vec![3.1]), path(vec![-0.2]), path(vec![0.7])];
        let out = order_statistics_path(&ps, OrderStatSpec::new(2, 3).unwrap()).unwrap();
        assert_eq!(out.values, vec![0.7]);
    }

    #[test]
    fn single_path_is_identity() {
        let p = path(vec![0.5, -1.0, 2.0]);
        let out = order_statistics_path(std::slice::from_ref(&p), OrderStatSpec::new(1, 1).unwrap()).unwrap();
        assert_eq!(out, p);
    }

    #[test]
    fn rejects_mismatched_input() {
        let a = path(vec![1.0, 2.0]);
        let b = path(vec![1.0, 2.0, 3.0]);
        assert!(order_statistics_path(&[a.clone(), b], OrderStatSpec::new(1, 2).unwrap()).is_err());
        assert!(order_statistics_path(&[a], OrderStatSpec::new(1, 2).unwrap()).is_err());
        assert!(OrderStatSpec::new(0, 2).is_err());
        assert!(OrderStatSpec::new(3, 2).is_err());
    }

    #[test]
    fn every_rank_matches_full_sort() {
        let mut s = split_stream(17, 0);
        for n in 1..=6 {
            let ps: Vec<SamplePath> = (0..n)
                .map(|_| path((0..50).map(|_| s.normal()).collect()))
                .collect();
            for r in 1..=n {
                let out = order_statistics_path(&ps, OrderStatSpec::new(r, n).unwrap()).unwrap();
                for t in 0..50 {
                    let mut col: Vec<f64> = ps.iter().map(|p| p.values[t]).collect();
                    col.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    assert_eq!(out.values[t], col[r - 1]);
                }
            }
        }
    }

    #[test]
    fn skew_examples() {
        let one = SkewParams::new(1.0, 1).unwrap();
        let x = path(vec![-1.5, 0.3]);
        let z = path(vec![9.0, 9.0]);
        let out = skew_gaussian_path(&[x, z.clone()], one).unwrap();
        assert_eq!(out.values, vec![1.5, 0.3]);

        let two = SkewParams::new(1.0, 2).unwrap();
        let out =
            skew_gaussian_path(&[path(vec![3.0]), path(vec![4.0]), path(vec![7.0])], two).unwrap();
        assert_eq!(out.values, vec![5.0]);

        let p = SkewParams::new(0.6, 1).unwrap();
        let out = skew_gaussian_path(&[path(vec![2.0]), path(vec![-1.0])], p).unwrap();
        assert!((out.values[0] - 0.4).abs() < 1e-15);

        assert!(skew_gaussian_path(&[path(vec![1.0])], p).is_err());
        assert!(SkewParams::new(0.0, 1).is_err());
        assert!(SkewParams::new(1.1, 1).is_err());
        assert!(SkewParams::new(0.5, 0).is_err());
    }

    #[test]
    fn limit_field_single_copy_matches_definition() {
        let stream = split_stream(8, 3);
        let (alpha, a, k) = (1.0, 0.05, 400);
        let sample = sample_limit_field(1, alpha, a, k, &stream).unwrap();
        // Rebuild the same fBm path and exponential from the documented lanes.
        let gen = FbmGenerator::new(0.5, UniformGrid::new(a, k + 1).unwrap()).unwrap();
        let mut z = vec![0.0; k + 1];
        gen.sampler(stream.child(FBM_LANE)).next_into(&mut z);
        let e = stream.child(EXP_LANE).exponential();
        for kk in 1..=k {
            let t = a * kk as f64;
            let want = std::f64::consts::SQRT_2 * z[kk] - t.powf(alpha) + e;
            assert!((sample.values[kk - 1] - want).abs() < 1e-12);
        }
        // Drift dominates at the far end of a long horizon.
        assert!(sample.values[k - 1] < 0.0);
    }

    #[test]
    fn limit_field_is_nested_in_r() {
        let field = LimitField::new(1.3, 0.02, 300).unwrap();
        let mut ws = field.workspace();
        for rep in 0..20 {
            let stream = split_stream(99, rep);
            ws.draw(1, &stream);
            let mut prev = ws.values().to_vec();
            for r in 2..=4 {
                ws.draw(r, &stream);
                for (a, b) in ws.values().iter().zip(&prev) {
                    assert!(a <= b);
                }
                prev = ws.values().to_vec();
            }
        }
    }
}
