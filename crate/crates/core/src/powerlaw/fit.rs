//! Discrete power-law MLE and KS-based `k_min` selection.

use serde::Serialize;

use super::zeta::hurwitz_zeta;
use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaEstimator {
    /// `1 + n / Σ ln(k_i / (k_min − ½))`.
    Approximate,
    /// `1 + n / Σ ln(k_i / (k_i − ½))`. Kept for comparison; it does not recover α.
    Literal,
    /// Numerical maximization of the Hurwitz-zeta normalized likelihood.
    Exact,
}

/// Settings for the `k_min` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KminScan {
    /// Candidates leaving fewer tail observations than this are skipped.
    pub min_tail: usize,
    pub estimator: AlphaEstimator,
}

impl KminScan {
    /// Closed-form estimator with a 50-observation tail floor. Cheaper, but biased for small `k_min`.
    pub fn approximate() -> Self {
        Self { min_tail: 50, estimator: AlphaEstimator::Approximate }
    }
}

/// Exact likelihood, no tail floor beyond the two points needed for a fit.
impl Default for KminScan {
    fn default() -> Self {
        Self { min_tail: 2, estimator: AlphaEstimator::Exact }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit<T: Scalar> {
    pub k_min: u64,
    pub alpha: T,
    pub ks_distance: T,
    pub n_tail: usize,
}

pub fn fit_alpha<T: Scalar>(degrees: &[u64], k_min: u64) -> Result<T> {
    fit_alpha_with(degrees, k_min, AlphaEstimator::Approximate)
}

pub fn fit_alpha_with<T: Scalar>(degrees: &[u64], k_min: u64, estimator: AlphaEstimator) -> Result<T> {
    if k_min == 0 {
        return Err(Error::InvalidParameter("k_min must be positive".into()));
    }
    let tail: Vec<u64> = degrees.iter().copied().filter(|&k| k >= k_min).collect();
    if tail.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} observations at or above k_min = {k_min}",
            tail.len()
        )));
    }
    if k_min == 1 && tail.iter().all(|&k| k == 1) {
        return Err(Error::Degenerate("every tail value equals k_min = 1".into()));
    }
    let n: T = cast(tail.len());
    let log_sum: T = tail.iter().map(|&k| cast::<T, _>(k).ln()).sum();
    Ok(alpha_from_sums(estimator, &tail, n, log_sum, k_min))
}

fn alpha_from_sums<T: Scalar>(estimator: AlphaEstimator, tail: &[u64], n: T, log_sum: T, k_min: u64) -> T {
    let half: T = cast(0.5);
    match estimator {
        AlphaEstimator::Approximate => T::one() + n / (log_sum - n * (cast::<T, _>(k_min) - half).ln()),
        AlphaEstimator::Literal => {
            let s: T = tail
                .iter()
                .map(|&k| {
                    let k: T = cast(k);
                    (k / (k - half)).ln()
                })
                .sum();
            T::one() + n / s
        }
        AlphaEstimator::Exact => exact_mle(n, log_sum, k_min),
    }
}

/// Maximizes `−α Σ ln k − n ln ζ(α, k_min)` (concave in α) by golden-section
/// search on `(1, 12]`.
fn exact_mle<T: Scalar>(n: T, log_sum: T, k_min: u64) -> T {
    let a: T = cast(k_min);
    let loglik = |alpha: T| -alpha * log_sum - n * hurwitz_zeta(alpha, a).ln();
    let inv_phi: T = cast(0.618_033_988_749_894_8);
    let (mut lo, mut hi): (T, T) = (cast(1.0 + 1e-6), cast(12.0));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (loglik(x1), loglik(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = loglik(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = loglik(x1);
        }
    }
    (lo + hi) / cast(2.0)
}

/// Sorted distinct values with counts and suffix sums used by the scan.
struct Tally<T> {
    values: Vec<u64>,
    counts: Vec<usize>,
    /// `tail_n[c]` = observations ≥ `values[c]`
    tail_n: Vec<usize>,
    /// `tail_log[c]` = Σ ln k over observations ≥ `values[c]`
    tail_log: Vec<T>,
}

impl<T: Scalar> Tally<T> {
    fn new(data: &[u64]) -> Self {
        let mut sorted = data.to_vec();
        sorted.sort_unstable();
        let mut values = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for &v in &sorted {
            if values.last() == Some(&v) {
                *counts.last_mut().unwrap() += 1;
            } else {
                values.push(v);
                counts.push(1);
            }
        }
        let d = values.len();
        let mut tail_n = vec![0; d + 1];
        let mut tail_log = vec![T::zero(); d + 1];
        for c in (0..d).rev() {
            tail_n[c] = tail_n[c + 1] + counts[c];
            tail_log[c] = tail_log[c + 1] + cast::<T, _>(counts[c]) * cast::<T, _>(values[c]).ln();
        }
        Self { values, counts, tail_n, tail_log }
    }

    fn tail_values(&self, c: usize) -> Vec<u64> {
        self.values[c..]
            .iter()
            .zip(&self.counts[c..])
            .flat_map(|(&v, &n)| std::iter::repeat_n(v, n))
            .collect()
    }

    /// Largest gap between the empirical tail CDF and the fitted discrete
    /// CDF. Both are step functions; between consecutive observed values the
    /// model keeps rising while the data stay flat, so each segment is checked
    /// at both ends.
    fn ks(&self, c: usize, alpha: T) -> T {
        let k_min = self.values[c];
        let n: T = cast(self.tail_n[c]);
        let z_min = hurwitz_zeta(alpha, cast(k_min));
        let mut cum = 0usize;
        let mut d = T::zero();
        for j in c..self.values.len() {
            let x = self.values[j];
            let zx = if x == k_min { z_min } else { hurwitz_zeta(alpha, cast(x)) };
            let before_data = cast::<T, _>(cum) / n;
            let before_model = T::one() - zx / z_min;
            cum += self.counts[j];
            let at_data = cast::<T, _>(cum) / n;
            let at_model = T::one() - (zx - cast::<T, _>(x).powf(-alpha)) / z_min;
            d = d.max((before_data - before_model).abs()).max((at_data - at_model).abs());
        }
        d
    }

    fn alpha(&self, c: usize, estimator: AlphaEstimator) -> T {
        let n: T = cast(self.tail_n[c]);
        match estimator {
            AlphaEstimator::Literal => {
                alpha_from_sums(estimator, &self.tail_values(c), n, self.tail_log[c], self.values[c])
            }
            _ => alpha_from_sums(estimator, &[], n, self.tail_log[c], self.values[c]),
        }
    }
}

/// KS distance between `data` restricted to `k ≥ k_min` and a discrete
/// power law with the given exponent.
pub fn ks_distance<T: Scalar>(data: &[u64], k_min: u64, alpha: T) -> Result<T> {
    let tally = Tally::<T>::new(data);
    let c = tally
        .values
        .iter()
        .position(|&v| v >= k_min)
        .ok_or_else(|| Error::InsufficientData(format!("no observations at or above {k_min}")))?;
    // measure against the requested k_min, not the first observed value above it
    let mut tally = tally;
    if tally.values[c] != k_min {
        tally.values.insert(c, k_min);
        tally.counts.insert(c, 0);
        tally.tail_n.insert(c, tally.tail_n[c]);
        tally.tail_log.insert(c, tally.tail_log[c]);
    }
    Ok(tally.ks(c, alpha))
}

pub fn select_kmin<T: Scalar>(degrees: &[u64]) -> Result<PowerLawFit<T>> {
    select_kmin_with(degrees, &KminScan::default())
}

/// Scans every distinct observed value (except the largest) as `k_min`, fits
/// α and keeps the candidate with the smallest KS distance; ties go to the
/// smaller `k_min`.
pub fn select_kmin_with<T: Scalar>(degrees: &[u64], scan: &KminScan) -> Result<PowerLawFit<T>> {
    if degrees.contains(&0) {
        return Err(Error::InvalidParameter("degrees must be positive".into()));
    }
    let tally = Tally::<T>::new(degrees);
    if tally.values.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "{} distinct values, need at least 10",
            tally.values.len()
        )));
    }
    let floor = scan.min_tail.max(2);
    let mut best: Option<PowerLawFit<T>> = None;
    for c in 0..tally.values.len() - 1 {
        if tally.tail_n[c] < floor {
            break;
        }
        let k_min = tally.values[c];
        let alpha = tally.alpha(c, scan.estimator);
        if !alpha.is_finite() || alpha <= T::one() {
            continue;
        }
        let ks = tally.ks(c, alpha);
        if best.is_none_or(|b| ks < b.ks_distance) {
            best = Some(PowerLawFit { k_min, alpha, ks_distance: ks, n_tail: tally.tail_n[c] });
        }
    }
    best.ok_or_else(|| {
        Error::InsufficientData(format!("no k_min candidate leaves {floor} tail observations"))
    })
}
