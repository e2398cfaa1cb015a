//! Exact-in-law sampling of stationary Gaussian sequences and fractional
//! Brownian motion on uniform grids by circulant embedding.
//!
//! The covariance sequence `c_0 .. c_{M/2}` is wrapped into a symmetric
//! circulant of even size `M >= 2 (n - 1)`. With `λ` the (real) DFT of its first
//! row, `W = FFT(sqrt(λ / M) (Z1 + i Z2))` has independent real and imaginary
//! parts, each an exact sample of the first `n` terms. Every FFT therefore
//! yields two paths.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

pub const DEFAULT_CLAMP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceFamily {
    /// `ρ(t) = exp(-c |t|^α)`
    StableExponential,
}

/// Stationary correlation function with local index `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceModel {
    pub family: CovarianceFamily,
    pub alpha: f64,
    pub scale_c: f64,
}

impl CovarianceModel {
    pub fn stable_exponential(alpha: f64, scale_c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Invalid(format!(
                "alpha must lie in (0, 2], got {alpha}"
            )));
        }
        if !(scale_c > 0.0 && scale_c.is_finite()) {
            return Err(Error::Invalid(format!(
                "scale_c must be positive, got {scale_c}"
            )));
        }
        Ok(Self {
            family: CovarianceFamily::StableExponential,
            alpha,
            scale_c,
        })
    }

    pub fn correlation(&self, t: f64) -> f64 {
        match self.family {
            CovarianceFamily::StableExponential => (-self.scale_c * t.abs().powf(self.alpha)).exp(),
        }
    }

    /// Factor converting model time to the unit-scale time in which
    /// `1 - ρ(t) ~ |t|^α`.
    pub fn time_scale(&self) -> f64 {
        self.scale_c.powf(1.0 / self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub spacing: f64,
    pub n_points: usize,
}

impl UniformGrid {
    pub fn new(spacing: f64, n_points: usize) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Invalid(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        if n_points == 0 {
            return Err(Error::Invalid("grid needs at least one point".into()));
        }
        Ok(Self { spacing, n_points })
    }

    /// Grid covering `[0, horizon]` with points `0, spacing, ..., floor(horizon/spacing) spacing`.
    pub fn covering(horizon: f64, spacing: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Invalid(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        // Guard against 10.0 / 0.01 = 999.9999999999999.
        let steps = (horizon / spacing * (1.0 + 1e-12)).floor() as usize;
        Self::new(spacing, steps + 1)
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.spacing
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.n_points - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
}

impl SamplePath {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::Invalid(format!(
                "path has {} values but grid has {} points",
                values.len(),
                grid.n_points
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn sup(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Circulant spectrum of a covariance sequence, ready for sampling.
#[derive(Clone)]
pub struct SpectralEmbedding {
    pub grid: UniformGrid,
    /// Clamped eigenvalues of the circulant, length `M >= 2 (n_points - 1)`.
    pub eigenvalues: Vec<f64>,
    /// Magnitude of the most negative eigenvalue that was set to zero.
    pub clamp_report: f64,
    amplitudes: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralEmbedding")
            .field("grid", &self.grid)
            .field("size", &self.eigenvalues.len())
            .field("clamp_report", &self.clamp_report)
            .finish()
    }
}

/// Smallest even 5-smooth integer `>= n` (and `>= 2`).
pub fn fft_friendly_size(n: usize) -> usize {
    let mut m = n.max(2);
    if m % 2 == 1 {
        m += 1;
    }
    loop {
        let mut k = m;
        for p in [2, 3, 5] {
            while k.is_multiple_of(p) {
                k /= p;
            }
        }
        if k == 1 {
            return m;
        }
        m += 2;
    }
}

impl SpectralEmbedding {
    /// Embed the covariance sequence `cov(k)` (lag in grid steps) for `n` points.
    pub fn from_sequence(grid: UniformGrid, cov: impl Fn(usize) -> f64, tol: f64) -> Result<Self> {
        let n = grid.n_points;
        let size = fft_friendly_size(2 * n.saturating_sub(1));
        let half = size / 2;
        let mut row: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); size];
        for k in 0..=half {
            let c = cov(k);
            row[k] = Complex::new(c, 0.0);
            if k > 0 && k < half {
                row[size - k] = Complex::new(c, 0.0);
            }
        }
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);

        let max = row.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let min = row.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let limit = tol * max.max(0.0);
        if min < -limit {
            return Err(Error::Embedding {
                min_eigenvalue: min,
                tolerance: limit,
            });
        }
        let clamp_report = if min < 0.0 { -min } else { 0.0 };
        let eigenvalues: Vec<f64> = row.iter().map(|z| z.re.max(0.0)).collect();
        let amplitudes = eigenvalues
            .iter()
            .map(|&l| (l / size as f64).sqrt())
            .collect();
        Ok(Self {
            grid,
            eigenvalues,
            clamp_report,
            amplitudes,
            fft,
        })
    }

    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Fill `re` and `im` (each of length `n_points`) with two independent paths.
    pub fn sample_pair_into(
        &self,
        stream: &mut RandomStream,
        work: &mut Vec<Complex<f64>>,
        scratch: &mut Vec<Complex<f64>>,
        re: &mut [f64],
        im: &mut [f64],
    ) {
        let size = self.size();
        work.resize(size, Complex::new(0.0, 0.0));
        scratch.resize(self.fft.get_inplace_scratch_len(), Complex::new(0.0, 0.0));
        for (w, &a) in work.iter_mut().zip(&self.amplitudes) {
            let z1 = stream.normal();
            let z2 = stream.normal();
            *w = Complex::new(a * z1, a * z2);
        }
        self.fft.process_with_scratch(work, scratch);
        for ((r, i), w) in re.iter_mut().zip(im.iter_mut()).zip(work.iter()) {
            *r = w.re;
            *i = w.im;
        }
    }
}

/// Circulant embedding of `model` sampled on `grid`.
pub fn build_embedding(
    model: &CovarianceModel,
    grid: UniformGrid,
    tol: f64,
) -> Result<SpectralEmbedding> {
    if grid.n_points < 2 {
        return Err(Error::Invalid(
            "embedding needs at least two grid points".into(),
        ));
    }
    let spacing = grid.spacing;
    SpectralEmbedding::from_sequence(grid, |k| model.correlation(k as f64 * spacing), tol)
}

/// Draws paths from an embedding one at a time, using both halves of each FFT.
pub struct PathSampler<'a> {
    emb: &'a SpectralEmbedding,
    stream: RandomStream,
    work: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
    spare: Vec<f64>,
    has_spare: bool,
}

impl<'a> PathSampler<'a> {
    pub fn new(emb: &'a SpectralEmbedding, stream: RandomStream) -> Self {
        Self {
            emb,
            stream,
            work: Vec::new(),
            scratch: Vec::new(),
            spare: vec![0.0; emb.grid.n_points],
            has_spare: false,
        }
    }

    /// Restart on a new stream, keeping the buffers.
    pub fn reset(&mut self, stream: RandomStream) {
        self.stream = stream;
        self.has_spare = false;
    }

    pub fn into_stream(self) -> RandomStream {
        self.stream
    }

    pub fn next_into(&mut self, out: &mut [f64]) {
        assert_eq!(out.len(), self.emb.grid.n_points);
        if self.has_spare {
            out.copy_from_slice(&self.spare);
            self.has_spare = false;
        } else {
            self.emb.sample_pair_into(
                &mut self.stream,
                &mut self.work,
                &mut self.scratch,
                out,
                &mut self.spare,
            );
            self.has_spare = true;
        }
    }
}

/// One stationary path. Uses the first half of a fresh FFT pair.
pub fn sample_stationary_path(emb: &SpectralEmbedding, stream: &mut RandomStream) -> SamplePath {
    let n = emb.grid.n_points;
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    emb.sample_pair_into(stream, &mut Vec::new(), &mut Vec::new(), &mut re, &mut im);
    SamplePath {
        grid: emb.grid,
        values: re,
    }
}

/// Autocovariance of unit-spacing fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Reusable generator of standard fBm on a grid starting at `t = 0`.
#[derive(Debug, Clone)]
pub struct FbmGenerator {
    pub hurst: f64,
    pub grid: UniformGrid,
    increments: Option<SpectralEmbedding>,
}

impl FbmGenerator {
    pub fn new(hurst: f64, grid: UniformGrid) -> Result<Self> {
        if !(hurst > 0.0 && hurst <= 1.0) {
            return Err(Error::Invalid(format!(
                "hurst must lie in (0, 1], got {hurst}"
            )));
        }
        let increments = if hurst < 1.0 && grid.n_points >= 2 {
            let inc_grid = UniformGrid::new(grid.spacing, grid.n_points - 1)?;
            Some(SpectralEmbedding::from_sequence(
                inc_grid,
                |k| fgn_autocovariance(hurst, k),
                DEFAULT_CLAMP_TOLERANCE,
            )?)
        } else {
            None
        };
        Ok(Self {
            hurst,
            grid,
            increments,
        })
    }

    pub fn sampler(&self, stream: RandomStream) -> FbmSampler<'_> {
        let source = match self.increments.as_ref() {
            Some(emb) => FbmSource::Noise(PathSampler::new(emb, stream)),
            None => FbmSource::Line(stream),
        };
        FbmSampler {
            gen: self,
            source,
            inc: vec![0.0; self.grid.n_points.saturating_sub(1)],
        }
    }
}

enum FbmSource<'a> {
    /// Hurst 1: `Z(t) = t N`.
    Line(RandomStream),
    Noise(PathSampler<'a>),
}

pub struct FbmSampler<'a> {
    gen: &'a FbmGenerator,
    source: FbmSource<'a>,
    inc: Vec<f64>,
}

impl FbmSampler<'_> {
    pub fn reset(&mut self, stream: RandomStream) {
        match &mut self.source {
            FbmSource::Line(s) => *s = stream,
            FbmSource::Noise(p) => p.reset(stream),
        }
    }

    pub fn into_stream(self) -> RandomStream {
        match self.source {
            FbmSource::Line(s) => s,
            FbmSource::Noise(p) => p.into_stream(),
        }
    }

    /// Next fBm path, `out[k] = Z(k spacing)` with `out[0] = 0`.
    pub fn next_into(&mut self, out: &mut [f64]) {
        let grid = self.gen.grid;
        assert_eq!(out.len(), grid.n_points);
        out[0] = 0.0;
        match &mut self.source {
            FbmSource::Line(stream) => {
                let slope = stream.normal();
                for (k, v) in out.iter_mut().enumerate() {
                    *v = slope * grid.time(k);
                }
            }
            FbmSource::Noise(inner) => {
                inner.next_into(&mut self.inc);
                let scale = grid.spacing.powf(self.gen.hurst);
                let mut acc = 0.0;
                for (v, d) in out[1..].iter_mut().zip(&self.inc) {
                    acc += d * scale;
                    *v = acc;
                }
            }
        }
    }
}

/// One fBm path with Hurst index `hurst` on `grid`.
pub fn sample_fbm(hurst: f64, grid: UniformGrid, stream: &mut RandomStream) -> Result<SamplePath> {
    let gen = FbmGenerator::new(hurst, grid)?;
    let placeholder = RandomStream::new(stream.master_seed(), stream.stream_index());
    let mut sampler = gen.sampler(std::mem::replace(stream, placeholder));
    let mut values = vec![0.0; grid.n_points];
    sampler.next_into(&mut values);
    *stream = sampler.into_stream();
    Ok(SamplePath { grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::split_stream;

    #[test]
    fn fft_sizes_are_even_and_smooth() {
        assert_eq!(fft_friendly_size(0), 2);
        assert_eq!(fft_friendly_size(2), 2);
        assert_eq!(fft_friendly_size(7), 8);
        assert_eq!(fft_friendly_size(14), 16);
        assert_eq!(fft_friendly_size(2 * 1000), 2000);
        assert_eq!(fft_friendly_size(2 * 1001), 2048);
        assert_eq!(fft_friendly_size(62), 64);
    }

    #[test]
    fn covariance_model_shape() {
        let m = CovarianceModel::stable_exponential(1.0, 1.0).unwrap();
        assert_eq!(m.correlation(0.0), 1.0);
        assert_eq!(m.correlation(0.7), m.correlation(-0.7));
        assert!(m.correlation(1e-6) < 1.0);
        let local = (1.0 - m.correlation(1e-4)) / 1e-4;
        assert!((local - 1.0).abs() < 1e-3);
        // Berman condition.
        let far = m.correlation(1e3) * 1e3f64.ln();
        assert!(far < 1e-100);
        assert!(CovarianceModel::stable_exponential(2.5, 1.0).is_err());
        assert!(CovarianceModel::stable_exponential(0.0, 1.0).is_err());
        assert!(CovarianceModel::stable_exponential(1.0, 0.0).is_err());
    }

    #[test]
    fn ou_embedding_is_nonnegative() {
        let m = CovarianceModel::stable_exponential(1.0, 1.0).unwrap();
        let grid = UniformGrid::new(0.01, 2048).unwrap();
        let emb = build_embedding(&m, grid, DEFAULT_CLAMP_TOLERANCE).unwrap();
        assert_eq!(emb.clamp_report, 0.0);
        assert!(emb.eigenvalues.iter().all(|&l| l >= 0.0));
        assert!(emb.size() >= 2 * 2047);
    }

    #[test]
    fn two_point_embedding() {
        let m = CovarianceModel::stable_exponential(1.5, 1.0).unwrap();
        let grid = UniformGrid::new(0.3, 2).unwrap();
        let emb = build_embedding(&m, grid, DEFAULT_CLAMP_TOLERANCE).unwrap();
        let rho = m.correlation(0.3);
        let mut ev = emb.eigenvalues.clone();
        ev.sort_by(f64::total_cmp);
        assert_eq!(ev.len(), 2);
        assert!((ev[0] - (1.0 - rho)).abs() < 1e-15);
        assert!((ev[1] - (1.0 + rho)).abs() < 1e-15);
    }

    #[test]
    fn gaussian_correlation_never_clamps_silently() {
        let m = CovarianceModel::stable_exponential(2.0, 1.0).unwrap();
        let grid = UniformGrid::new(0.5, 64).unwrap();
        match build_embedding(&m, grid, DEFAULT_CLAMP_TOLERANCE) {
            Ok(emb) => {
                let max = emb.eigenvalues.iter().copied().fold(0.0, f64::max);
                assert!(emb.clamp_report <= DEFAULT_CLAMP_TOLERANCE * max);
            }
            Err(e) => assert!(matches!(e, Error::Embedding { .. })),
        }
        // A strongly correlated Gaussian kernel on a fine grid cannot be embedded.
        let m = CovarianceModel::stable_exponential(2.0, 0.01).unwrap();
        let grid = UniformGrid::new(0.1, 64).unwrap();
        assert!(matches!(
            build_embedding(&m, grid, DEFAULT_CLAMP_TOLERANCE),
            Err(Error::Embedding { .. })
        ));
    }

    #[test]
    fn embedding_rejects_single_point() {
        let m = CovarianceModel::stable_exponential(1.0, 1.0).unwrap();
        assert!(build_embedding(&m, UniformGrid::new(0.1, 1).unwrap(), 1e-10).is_err());
    }

    #[test]
    fn paths_are_deterministic() {
        let m = CovarianceModel::stable_exponential(1.0, 1.0).unwrap();
        let emb = build_embedding(&m, UniformGrid::new(0.01, 300).unwrap(), 1e-10).unwrap();
        let a = sample_stationary_path(&emb, &mut split_stream(5, 2));
        let b = sample_stationary_path(&emb, &mut split_stream(5, 2));
        assert_eq!(a, b);
        let c = sample_stationary_path(&emb, &mut split_stream(5, 3));
        assert_ne!(a, c);
    }

    #[test]
    fn fbm_starts_at_zero() {
        for h in [0.1, 0.5, 0.9, 1.0] {
            let grid = UniformGrid::new(0.05, 40).unwrap();
            let gen = FbmGenerator::new(h, grid).unwrap();
            let mut s = gen.sampler(split_stream(1, 0));
            let mut out = vec![1.0; 40];
            for _ in 0..5 {
                s.next_into(&mut out);
                assert_eq!(out[0], 0.0);
            }
        }
        assert!(FbmGenerator::new(0.0, UniformGrid::new(0.1, 4).unwrap()).is_err());
        assert!(FbmGenerator::new(1.2, UniformGrid::new(0.1, 4).unwrap()).is_err());
    }

    #[test]
    fn fgn_covariance_values() {
        assert_eq!(fgn_autocovariance(0.5, 0), 1.0);
        assert!(fgn_autocovariance(0.5, 3).abs() < 1e-15);
        assert!(fgn_autocovariance(0.75, 1) > 0.0);
        assert!(fgn_autocovariance(0.25, 1) < 0.0);
    }

    #[test]
    fn covering_grid_counts() {
        let g = UniformGrid::covering(10.0, 0.01).unwrap();
        assert_eq!(g.n_points, 1001);
        assert!((g.horizon() - 10.0).abs() < 1e-12);
        let g = UniformGrid::covering(1.0, 0.3).unwrap();
        assert_eq!(g.n_points, 4);
    }
}
