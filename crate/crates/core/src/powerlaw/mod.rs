//! Scale-freeness checks for degree data: discrete power-law MLE, KS-based
//! `k_min` selection, semiparametric bootstrap p-values and log binning.

mod bootstrap;
mod fit;
mod histogram;
mod sample;
pub mod zeta;

pub use bootstrap::{bootstrap_pvalue, bootstrap_pvalue_with, replicate_rng, GoodnessOfFit};
pub use fit::{
    fit_alpha, fit_alpha_with, ks_distance, select_kmin, select_kmin_with, AlphaEstimator, KminScan,
    PowerLawFit,
};
pub use histogram::{log_binned_histogram, loglog_slope, tail_slope, LogBinnedHistogram, LogBinnedMean};
pub use sample::{DiscretePowerLaw, DEFAULT_TABLE_CAP};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::graph::DivisibilityGraph;
use crate::metrics::{local_clustering, ClusteringPath};
use crate::scalar::Scalar;

/// Mean local clustering per power-of-two degree bin. Isolated nodes are
/// left out since degree 0 has no bin.
pub fn clustering_degree_profile<T: Scalar>(graph: &DivisibilityGraph<'_>) -> Result<LogBinnedMean<T>> {
    let spec = graph.spec();
    let pairs: Vec<(u64, T)> = (1..=spec.size())
        .into_par_iter()
        .filter(|&i| !spec.is_removed(i))
        .map(|i| {
            let lc = local_clustering(graph, i, ClusteringPath::Arithmetic)?;
            Ok((lc.degree, lc.value::<T>()))
        })
        .collect::<Result<_>>()?;
    Ok(LogBinnedMean::from_pairs(pairs))
}

/// Serialized form of a fit plus its goodness-of-fit test.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport<T: Scalar> {
    pub k_min: u64,
    pub alpha: T,
    pub ks: T,
    pub n_tail: usize,
    pub p_value: Option<T>,
    pub n_synthetic: usize,
    pub seed: u64,
}

impl<T: Scalar> FitReport<T> {
    pub fn new(fit: &PowerLawFit<T>, gof: Option<&GoodnessOfFit<T>>, seed: u64) -> Self {
        Self {
            k_min: fit.k_min,
            alpha: fit.alpha,
            ks: fit.ks_distance,
            n_tail: fit.n_tail,
            p_value: gof.map(|g| g.p_value),
            n_synthetic: gof.map_or(0, |g| g.n_synthetic),
            seed,
        }
    }
}
