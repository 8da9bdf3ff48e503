use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::fit::{select_kmin_with, KminScan, PowerLawFit};
use super::sample::{DiscretePowerLaw, DEFAULT_TABLE_CAP};
use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodnessOfFit<T: Scalar> {
    pub p_value: T,
    pub n_synthetic: usize,
    pub seed: u64,
    /// Synthetic sets whose KS distance reached the empirical one.
    pub exceedances: usize,
}

/// Random stream for one synthetic replicate: depends only on `(seed, index)`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn bootstrap_pvalue<T: Scalar>(
    degrees: &[u64],
    fit: &PowerLawFit<T>,
    n_synthetic: usize,
    seed: u64,
) -> Result<GoodnessOfFit<T>> {
    bootstrap_pvalue_with(degrees, fit, n_synthetic, seed, &KminScan::default())
}

/// Semiparametric bootstrap: every synthetic set has the data's length;
/// each element comes from the fitted power law with probability
/// `n_tail / n` and otherwise is resampled from the observed values below
/// `k_min`. Each set is refitted with the full `k_min` scan and the p-value
/// is the fraction whose KS distance is at least the empirical one.
pub fn bootstrap_pvalue_with<T: Scalar>(
    degrees: &[u64],
    fit: &PowerLawFit<T>,
    n_synthetic: usize,
    seed: u64,
    scan: &KminScan,
) -> Result<GoodnessOfFit<T>> {
    if n_synthetic == 0 {
        return Err(Error::InvalidParameter("n_synthetic must be positive".into()));
    }
    if degrees.is_empty() {
        return Err(Error::InsufficientData("empty degree list".into()));
    }
    let below: Vec<u64> = degrees.iter().copied().filter(|&k| k < fit.k_min).collect();
    let p_tail = fit.n_tail as f64 / degrees.len() as f64;
    let model =
        DiscretePowerLaw::new(fit.alpha.to_f64().expect("finite alpha"), fit.k_min, DEFAULT_TABLE_CAP);
    let n = degrees.len();
    let distances: Vec<Result<T>> = (0..n_synthetic as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(seed, r);
            let synthetic: Vec<u64> = (0..n)
                .map(|_| {
                    if below.is_empty() || rng.gen::<f64>() < p_tail {
                        model.sample(&mut rng)
                    } else {
                        below[rng.gen_range(0..below.len())]
                    }
                })
                .collect();
            select_kmin_with::<T>(&synthetic, scan).map(|f| f.ks_distance)
        })
        .collect();
    let mut exceedances = 0;
    for d in distances {
        if d? >= fit.ks_distance {
            exceedances += 1;
        }
    }
    Ok(GoodnessOfFit {
        p_value: cast::<T, _>(exceedances) / cast(n_synthetic),
        n_synthetic,
        seed,
        exceedances,
    })
}
