use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::DivisibilityGraph;
use crate::scalar::{cast, Scalar};

use super::CHUNK;

/// Integer edge-end degree moments.
///
/// With `S1 = Σ k_a k_b`, `S2 = Σ (k_a + k_b)/2` and `S3 = Σ (k_a² + k_b²)/2`
/// over edges, `r = (S1/m − (S2/m)²) / (S3/m − (S2/m)²)`. `S2` and `S3` are
/// stored doubled so everything stays integral until the final division.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct DegreeCorrelation {
    pub edges: u64,
    pub s1: u128,
    pub s2x2: u128,
    pub s3x2: u128,
}

impl DegreeCorrelation {
    #[inline]
    pub fn push(&mut self, ka: u64, kb: u64) {
        let (a, b) = (ka as u128, kb as u128);
        self.edges += 1;
        self.s1 += a * b;
        self.s2x2 += a + b;
        self.s3x2 += a * a + b * b;
    }

    pub fn merge(self, o: Self) -> Self {
        Self {
            edges: self.edges + o.edges,
            s1: self.s1 + o.s1,
            s2x2: self.s2x2 + o.s2x2,
            s3x2: self.s3x2 + o.s3x2,
        }
    }

    /// `r = (4m·S1 − S2x2²) / (2m·S3x2 − S2x2²)`, computed exactly in i128.
    pub fn coefficient<T: Scalar>(&self) -> Result<T> {
        if self.edges == 0 {
            return Err(Error::Undefined("assortativity (no edges)"));
        }
        let overflow =
            || Error::Capacity { what: "assortativity accumulator", requested: self.edges, limit: u64::MAX };
        let m = self.edges as i128;
        let s1 = i128::try_from(self.s1).map_err(|_| overflow())?;
        let s2 = i128::try_from(self.s2x2).map_err(|_| overflow())?;
        let s3 = i128::try_from(self.s3x2).map_err(|_| overflow())?;
        let sq = s2.checked_mul(s2).ok_or_else(overflow)?;
        let num = m.checked_mul(4).and_then(|x| x.checked_mul(s1)).ok_or_else(overflow)? - sq;
        let den = m.checked_mul(2).and_then(|x| x.checked_mul(s3)).ok_or_else(overflow)? - sq;
        if den == 0 {
            return Err(Error::Undefined("assortativity (zero degree variance)"));
        }
        Ok(cast::<T, _>(num as f64 / den as f64))
    }
}

/// Degree assortativity of the divisibility network; edges are enumerated
/// as `(j, kj)` pairs.
pub fn assortativity<T: Scalar>(graph: &DivisibilityGraph<'_>) -> Result<T> {
    let spec = graph.spec();
    let n = spec.size();
    let degrees = graph.degree_sequence();
    let k = |i: u32| degrees.get(i).unwrap_or(0) as u64;
    let half = n / 2;
    let chunks = half.div_ceil(CHUNK);
    let acc = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK + 1;
            let hi = (lo + CHUNK - 1).min(half);
            let mut acc = DegreeCorrelation::default();
            for j in lo..=hi {
                if spec.is_removed(j) {
                    continue;
                }
                let kj = k(j);
                let mut b = 2 * j;
                while b <= n {
                    if !spec.is_removed(b) {
                        acc.push(kj, k(b));
                    }
                    b += j;
                }
            }
            acc
        })
        .reduce(DegreeCorrelation::default, DegreeCorrelation::merge);
    acc.coefficient()
}

/// Assortativity of an arbitrary undirected simple graph given as an edge list.
pub fn assortativity_of_edges<T: Scalar>(edges: &[(u32, u32)]) -> Result<T> {
    let mut degree = std::collections::HashMap::<u32, u64>::new();
    for &(a, b) in edges {
        *degree.entry(a).or_default() += 1;
        *degree.entry(b).or_default() += 1;
    }
    let mut acc = DegreeCorrelation::default();
    for &(a, b) in edges {
        acc.push(degree[&a], degree[&b]);
    }
    acc.coefficient()
}
