//! Global and local metrics of the divisibility network.
//!
//! Every count has an arithmetic fast path; the brute-force routes used to
//! check them live in this module's tests and in the acceptance suite.

mod assortativity;
mod clustering;

pub use assortativity::{assortativity, assortativity_of_edges, DegreeCorrelation};
pub use clustering::{
    local_clustering, upper_half_closed_form, ws_clustering, ClusteringPath, LocalClustering,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::floor_sum::{divisor_summatory, for_each_quotient};
use crate::graph::{edge_count, DegreeSequence, DivisibilityGraph, NetworkSpec};
use crate::scalar::{cast, Scalar};

/// Euler–Mascheroni constant, to the precision used by the asymptotic formula.
pub const EULER_GAMMA: f64 = 0.5772156649;

/// Largest size for the neighbor-correction route taken when nodes are removed.
pub const REMOVAL_PATH_CAP: u32 = 1 << 20;

/// Labels per chunk for parallel sweeps; fixed so reductions do not depend
/// on the thread count.
pub(crate) const CHUNK: u32 = 4096;

/// Sums `f(i)` over `1..=n` in fixed-size chunks, combining chunk totals
/// in label order.
pub(crate) fn ordered_sum<T, F>(n: u32, f: F) -> T
where
    T: Scalar,
    F: Fn(u32) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK + 1;
            let hi = (lo + CHUNK - 1).min(n);
            (lo..=hi).fold(T::zero(), |acc, i| acc + f(i))
        })
        .collect();
    partials.into_iter().fold(T::zero(), |a, b| a + b)
}

/// `⟨k⟩ = 2m / n` over the present nodes.
pub fn average_degree<T: Scalar>(spec: &NetworkSpec) -> T {
    let m = edge_count(spec);
    cast::<T, _>(2 * m) / cast(spec.present_count())
}

/// `2 ln n + 2(2γ − 1) − 2`, i.e. `2 ln n − 1.6911…`.
pub fn average_degree_asymptotic<T: Scalar>(n: u64) -> T {
    let two: T = cast(2.0);
    let gamma: T = cast(EULER_GAMMA);
    two * cast::<T, _>(n).ln() + two * (two * gamma - T::one()) - two
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleMode {
    /// True triangle count (divisibility chains `a | b | c`).
    Exact,
    /// `Σ_i Σ_{k=2..⌊n/i⌋} ⌊n/(ki)⌋`, i.e. without the `−1` per term; equals exact + m.
    Literal,
}

/// Number of triangles.
///
/// With no removals this is `Σ_i (D(M) − 2M + 1)` over `M = ⌊N/i⌋`, grouped by
/// distinct quotient. With removals every triangle is counted once at its
/// middle element `b` as `(present proper divisors) × (present proper multiples)`.
pub fn triangle_count(graph: &DivisibilityGraph<'_>, mode: TriangleMode) -> Result<u64> {
    let spec = graph.spec();
    let n = spec.size() as u64;
    if !spec.has_removals() {
        let mut total = 0u64;
        for_each_quotient(n, |q, count| {
            let per = match mode {
                TriangleMode::Exact => divisor_summatory(q) + 1 - 2 * q,
                TriangleMode::Literal => divisor_summatory(q) - q,
            };
            total += count * per;
        });
        return Ok(total);
    }
    if mode == TriangleMode::Literal {
        return Err(Error::InvalidParameter(
            "the literal triangle expression is only defined without removals".into(),
        ));
    }
    if spec.size() > REMOVAL_PATH_CAP {
        return Err(Error::Capacity {
            what: "triangle count with removed nodes",
            requested: n,
            limit: REMOVAL_PATH_CAP as u64,
        });
    }
    let removed = spec.removed();
    let tables = graph.tables();
    let size = spec.size();
    let chunks = size.div_ceil(CHUNK);
    let total = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK + 1;
            let hi = (lo + CHUNK - 1).min(size);
            let mut acc = 0u64;
            for b in lo..=hi {
                if spec.is_removed(b) {
                    continue;
                }
                let mut below = tables.divisor_count(b) as u64 - 1;
                let mut above = (size / b) as u64 - 1;
                for &r in removed {
                    if r < b && b % r == 0 {
                        below -= 1;
                    } else if r > b && r % b == 0 {
                        above -= 1;
                    }
                }
                acc += below * above;
            }
            acc
        })
        .sum();
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripletConvention {
    /// Unordered paths of length two, `Σ C(k_i, 2)`.
    Paths,
    /// `Σ (k_i² − k_i)`, twice the path count.
    Doubled,
}

pub fn connected_triplets(degrees: &DegreeSequence, convention: TripletConvention) -> u64 {
    let paths: u64 = degrees
        .iter()
        .map(|(_, k)| {
            let k = k as u64;
            k * k.saturating_sub(1) / 2
        })
        .sum();
    match convention {
        TripletConvention::Paths => paths,
        TripletConvention::Doubled => 2 * paths,
    }
}

/// Transitivity `3T / Σ C(k_i, 2)`.
pub fn global_clustering<T: Scalar>(graph: &DivisibilityGraph<'_>) -> Result<T> {
    let triplets = connected_triplets(&graph.degree_sequence(), TripletConvention::Paths);
    let triangles = triangle_count(graph, TriangleMode::Exact)?;
    transitivity(triangles, triplets)
}

fn transitivity<T: Scalar>(triangles: u64, triplets: u64) -> Result<T> {
    if triplets == 0 {
        return Err(Error::Undefined("global clustering (no connected triplets)"));
    }
    Ok(cast::<T, _>(3 * triangles) / cast(triplets))
}

/// All global metrics at one size. Undefined values serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalMetrics<T: Scalar> {
    pub n: u32,
    pub removed: Vec<u32>,
    pub m: u64,
    pub avg_degree: T,
    pub avg_degree_asymptotic: T,
    pub triangles: u64,
    pub connected_triplets: u64,
    pub global_clustering: Option<T>,
    pub ws_clustering: T,
    pub assortativity: Option<T>,
}

impl<T: Scalar> GlobalMetrics<T> {
    pub fn compute(graph: &DivisibilityGraph<'_>) -> Result<Self> {
        let spec = graph.spec();
        let degrees = graph.degree_sequence();
        let m = edge_count(spec);
        let triangles = triangle_count(graph, TriangleMode::Exact)?;
        let connected_triplets = connected_triplets(&degrees, TripletConvention::Paths);
        let global_clustering = optional(transitivity(triangles, connected_triplets))?;
        let assortativity = optional(assortativity(graph))?;
        Ok(Self {
            n: spec.size(),
            removed: spec.removed().to_vec(),
            m,
            avg_degree: average_degree(spec),
            avg_degree_asymptotic: average_degree_asymptotic(spec.size().max(1) as u64),
            triangles,
            connected_triplets,
            global_clustering,
            ws_clustering: ws_clustering(graph)?,
            assortativity,
        })
    }
}

fn optional<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}
