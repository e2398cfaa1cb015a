//! Replication engine for functionals of order-statistics paths.

use rayon::prelude::*;

use crate::gaussian::{PathSampler, SpectralEmbedding};
use crate::processes::{order_statistic_into, skew_into, SkewParams};
use crate::rng::RandomStream;

/// Replications per block. Block `b` draws from `stream.child(b)`, so the
/// output depends on the seed and this constant, never on the thread count.
pub const BLOCK_REPS: usize = 64;

/// `r`-th order statistic of `n` copies of a Gaussian or skew-Gaussian process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessShape {
    pub r: usize,
    pub n: usize,
    pub skew: Option<SkewParams>,
}

impl ProcessShape {
    fn components(&self) -> usize {
        self.skew.map_or(1, |s| s.paths_needed())
    }
}

struct Drawer<'a> {
    sampler: PathSampler<'a>,
    shape: ProcessShape,
    comps: Vec<Vec<f64>>,
    copies: Vec<Vec<f64>>,
    out: Vec<f64>,
}

impl<'a> Drawer<'a> {
    fn new(emb: &'a SpectralEmbedding, shape: ProcessShape) -> Self {
        let len = emb.grid.n_points;
        Self {
            sampler: PathSampler::new(emb, RandomStream::new(0, 0)),
            shape,
            comps: vec![vec![0.0; len]; shape.components()],
            copies: vec![vec![0.0; len]; shape.n],
            out: vec![0.0; len],
        }
    }

    fn draw(&mut self) -> &[f64] {
        for copy in self.copies.iter_mut() {
            match self.shape.skew {
                None => self.sampler.next_into(copy),
                Some(params) => {
                    for c in self.comps.iter_mut() {
                        self.sampler.next_into(c);
                    }
                    let cols: Vec<&[f64]> = self.comps.iter().map(Vec::as_slice).collect();
                    skew_into(&cols, params, copy);
                }
            }
        }
        if self.shape.n == 1 {
            return &self.copies[0];
        }
        let cols: Vec<&[f64]> = self.copies.iter().map(Vec::as_slice).collect();
        order_statistic_into(&cols, self.shape.r, &mut self.out);
        &self.out
    }
}

/// Apply `f` to `reps` independent paths; results come back in replication order.
pub fn simulate<T, F>(
    emb: &SpectralEmbedding,
    shape: ProcessShape,
    reps: usize,
    stream: &RandomStream,
    f: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync,
{
    let blocks = reps.div_ceil(BLOCK_REPS);
    let per_block: Vec<Vec<T>> = (0..blocks)
        .into_par_iter()
        .map_init(
            || Drawer::new(emb, shape),
            |drawer, b| {
                drawer.sampler.reset(stream.child(b as u64));
                let count = BLOCK_REPS.min(reps - b * BLOCK_REPS);
                (0..count).map(|_| f(drawer.draw())).collect()
            },
        )
        .collect();
    per_block.into_iter().flatten().collect()
}

pub fn sup(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Max over every `stride`-th point, starting at index 0.
pub fn strided_sup(values: &[f64], stride: usize) -> f64 {
    values
        .iter()
        .step_by(stride)
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn sup_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}
