//! Logarithmic binning with bins `[2^b, 2^{b+1})`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

fn bin_of(v: u64) -> usize {
    (63 - v.leading_zeros()) as usize
}

fn edges(bins: usize) -> Vec<u64> {
    (0..=bins).map(|b| 1u64 << b).collect()
}

fn center<T: Scalar>(lo: u64) -> T {
    cast::<T, _>(lo) * cast::<T, _>(2.0).sqrt()
}

/// Counts per power-of-two bin divided by the bin width.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogBinnedHistogram<T: Scalar> {
    /// `bins + 1` edges: `1, 2, 4, …`
    pub bin_edges: Vec<u64>,
    pub counts: Vec<u64>,
    pub densities: Vec<T>,
}

impl<T: Scalar> LogBinnedHistogram<T> {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(geometric bin center, density)` for occupied bins.
    pub fn points(&self) -> Vec<(T, T)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(b, _)| (center(self.bin_edges[b]), self.densities[b]))
            .collect()
    }
}

pub fn log_binned_histogram<T: Scalar>(values: &[u64]) -> Result<LogBinnedHistogram<T>> {
    if values.contains(&0) {
        return Err(Error::InvalidParameter("log binning needs values ≥ 1".into()));
    }
    let bins = values.iter().map(|&v| bin_of(v) + 1).max().unwrap_or(0);
    let mut counts = vec![0u64; bins];
    for &v in values {
        counts[bin_of(v)] += 1;
    }
    let densities = counts.iter().enumerate().map(|(b, &c)| cast::<T, _>(c) / cast(1u64 << b)).collect();
    Ok(LogBinnedHistogram { bin_edges: edges(bins), counts, densities })
}

/// Mean of a per-item value inside each power-of-two bin of a key.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogBinnedMean<T: Scalar> {
    pub bin_edges: Vec<u64>,
    pub counts: Vec<u64>,
    /// `NaN`-free: empty bins hold 0 and are skipped by [`Self::points`].
    pub means: Vec<T>,
}

impl<T: Scalar> LogBinnedMean<T> {
    /// Accumulates in input order, so the result is deterministic for a
    /// deterministic input sequence. Items with key 0 are skipped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, T)>) -> Self {
        let mut counts: Vec<u64> = Vec::new();
        let mut sums: Vec<T> = Vec::new();
        for (k, v) in pairs {
            if k == 0 {
                continue;
            }
            let b = bin_of(k);
            if b >= counts.len() {
                counts.resize(b + 1, 0);
                sums.resize(b + 1, T::zero());
            }
            counts[b] += 1;
            sums[b] = sums[b] + v;
        }
        let means =
            counts.iter().zip(&sums).map(|(&c, &s)| if c == 0 { T::zero() } else { s / cast(c) }).collect();
        Self { bin_edges: edges(counts.len()), counts, means }
    }

    pub fn points(&self) -> Vec<(T, T)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(b, _)| (center(self.bin_edges[b]), self.means[b]))
            .collect()
    }
}

/// Least-squares slope of `ln y` against `ln x`, skipping non-positive `y`.
pub fn loglog_slope<T: Scalar>(points: &[(T, T)]) -> Option<T> {
    let pts: Vec<(T, T)> = points
        .iter()
        .filter(|(x, y)| *x > T::zero() && *y > T::zero())
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n: T = cast(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > T::zero()).then(|| sxy / sxx)
}

/// Slope over the points whose `x` lies within `decades` powers of ten of
/// the largest `x`.
pub fn tail_slope<T: Scalar>(points: &[(T, T)], decades: T) -> Option<T> {
    let x_max = points.iter().map(|p| p.0).fold(T::neg_infinity(), T::max);
    let cut = x_max / cast::<T, _>(10.0).powf(decades);
    let tail: Vec<(T, T)> = points.iter().copied().filter(|p| p.0 >= cut).collect();
    loglog_slope(&tail)
}
