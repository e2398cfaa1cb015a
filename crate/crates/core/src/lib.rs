//! Simulation and asymptotics for extremes of order-statistics processes
//! generated by stationary Gaussian and skew-Gaussian processes.

pub mod albin;
pub mod asymptotics;
pub mod comparison;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod processes;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use albin::{AlbinConfig, AlbinEstimate, AlbinLadder};
pub use asymptotics::{GaussianTailModel, GumbelConstants, TailApprox};
pub use comparison::{BoundKind, BoundReport, GaussianPair};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, ExperimentKind, ExperimentResult};
pub use gaussian::{CovarianceModel, SamplePath, SpectralEmbedding, UniformGrid};
pub use processes::{LimitFieldSample, OrderStatSpec, SkewParams};
pub use rng::{split_stream, RandomStream};
pub use special::BinomialCoefficient;
