//! The divisibility network of the natural numbers.
//!
//! Nodes are the labels `1..=N`; two distinct labels are linked when one
//! divides the other. Nothing here materializes adjacency lists: degrees,
//! edge counts, triangles and clustering are computed arithmetically from
//! divisor-count sieves, with brute-force routes kept alongside for
//! cross-checking at small sizes.
//!
//! Real-valued results are generic over [`Scalar`] (`f32` or `f64`);
//! clustering coefficients are also available exactly as [`Exact`]
//! rationals. The aliases at the bottom of this file fix the scalar to
//! `f64` for the common case.

pub mod error;
pub mod floor_sum;
pub mod graph;
pub mod metrics;
pub mod patterns;
pub mod powerlaw;
pub mod scalar;
pub mod sieve;

pub use error::{Error, Result};
pub use graph::{DegreeSequence, DivisibilityGraph, NetworkSpec};
pub use scalar::Scalar;
pub use sieve::{Factorization, SieveTables};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact rational value of a clustering coefficient.
pub type Exact = num_rational::Ratio<u64>;

pub type GlobalMetricsF64 = metrics::GlobalMetrics<f64>;
pub type GlobalMetricsF32 = metrics::GlobalMetrics<f32>;
pub type PowerLawFitF64 = powerlaw::PowerLawFit<f64>;
pub type GoodnessOfFitF64 = powerlaw::GoodnessOfFit<f64>;
pub type LogBinnedHistogramF64 = powerlaw::LogBinnedHistogram<f64>;
pub type LogBinnedMeanF64 = powerlaw::LogBinnedMean<f64>;
pub type ClusteringProfileF64 = patterns::ClusteringProfile<f64>;
pub type ClusteringProfileF32 = patterns::ClusteringProfile<f32>;
pub type DensityGridF64 = patterns::DensityGrid<f64>;
pub type SymmetryProfileF64 = patterns::SymmetryProfile<f64>;
