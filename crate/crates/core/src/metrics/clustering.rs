use serde::Serialize;

use crate::error::{Error, Result};
use crate::floor_sum::divisor_summatory;
use crate::graph::{divides_either, DivisibilityGraph};
use crate::scalar::{cast, Scalar};
use crate::sieve::Factorization;
use crate::Exact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringPath {
    /// Enumerate neighbor pairs and test each for adjacency.
    Oracle,
    /// Count linked neighbor pairs from divisor counts and floor sums.
    Arithmetic,
    /// Product formula over the prime exponents; upper half only.
    ClosedForm,
}

/// Degree and number of linked neighbor pairs of one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalClustering {
    pub degree: u64,
    pub links: u64,
}

impl LocalClustering {
    pub fn pairs(&self) -> u64 {
        self.degree * self.degree.saturating_sub(1) / 2
    }

    /// Exact coefficient; nodes with degree below 2 get 0.
    pub fn exact(&self) -> Exact {
        match self.pairs() {
            0 => Exact::from_integer(0),
            p => Exact::new(self.links, p),
        }
    }

    pub fn value<T: Scalar>(&self) -> T {
        match self.pairs() {
            0 => T::zero(),
            p => cast::<T, _>(self.links) / cast(p),
        }
    }
}

pub fn local_clustering(
    graph: &DivisibilityGraph<'_>,
    i: u32,
    path: ClusteringPath,
) -> Result<LocalClustering> {
    // validates the label and removal state
    graph.degree(i)?;
    match path {
        ClusteringPath::Oracle => Ok(oracle(graph, i)),
        ClusteringPath::Arithmetic => Ok(arithmetic(graph, i)),
        ClusteringPath::ClosedForm => closed_form_for(graph, i),
    }
}

fn oracle(graph: &DivisibilityGraph<'_>, i: u32) -> LocalClustering {
    let nb = graph.neighbors(i).expect("checked by caller");
    let mut links = 0;
    for (a, &x) in nb.iter().enumerate() {
        for &y in &nb[a + 1..] {
            if divides_either(x, y) {
                links += 1;
            }
        }
    }
    LocalClustering { degree: nb.len() as u64, links }
}

/// `E_i = D_i + X_i + M_i`: divisor–divisor chains, divisor–multiple pairs
/// (always linked through `i`) and multiple–multiple chains.
pub(crate) fn arithmetic(graph: &DivisibilityGraph<'_>, i: u32) -> LocalClustering {
    let tables = graph.tables();
    let n = graph.size();
    let d_i = tables.divisor_count(i) as u64;
    let mult = (n / i) as u64;
    let divisors = tables.divisors(i).expect("label within sieve limit");
    let below: u64 = divisors[..divisors.len() - 1].iter().map(|&d| tables.divisor_count(d) as u64 - 1).sum();
    let across = (d_i - 1) * (mult - 1);
    let above = divisor_summatory(mult) + 1 - 2 * mult;
    let full = LocalClustering { degree: d_i + mult - 2, links: below + across + above };
    if !graph.spec().has_removals() {
        return full;
    }
    remove_correction(graph, i, full)
}

/// Drops removed neighbors: each removed neighbor `r` takes away its common
/// neighbors with `i`; pairs of removed neighbors that are linked were
/// subtracted twice and are added back.
fn remove_correction(graph: &DivisibilityGraph<'_>, i: u32, full: LocalClustering) -> LocalClustering {
    let gone: Vec<u32> = graph.spec().removed().iter().copied().filter(|&r| divides_either(r, i)).collect();
    let mut links = full.links;
    for (a, &r) in gone.iter().enumerate() {
        links -= common_neighbors(graph, i, r);
        links += gone[a + 1..].iter().filter(|&&s| divides_either(r, s)).count() as u64;
    }
    LocalClustering { degree: full.degree - gone.len() as u64, links }
}

/// Common neighbors, in the full graph, of two labels where one divides the other.
fn common_neighbors(graph: &DivisibilityGraph<'_>, a: u32, b: u32) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let t = graph.tables();
    (t.divisor_count(lo) as u64 - 1)
        + (t.divisor_count(hi / lo) as u64 - 2)
        + ((graph.size() / hi) as u64 - 1)
}

fn closed_form_for(graph: &DivisibilityGraph<'_>, i: u32) -> Result<LocalClustering> {
    if graph.spec().has_removals() {
        return Err(Error::Domain("closed form requires an unmodified network".into()));
    }
    let n = graph.size();
    if 2 * (i as u64) <= n as u64 {
        return Err(Error::Domain(format!("{i} is not in ({}/2, {n}]", n)));
    }
    let f = graph.tables().factorize(i)?;
    if f.prime_powers.len() < 2 {
        return Err(Error::Domain(format!("{i} is a unit, prime or prime power")));
    }
    Ok(upper_half_closed_form(&f))
}

/// `(∏ C(j+2, 2) − 2s + 1) / C(s−1, 2)` with `s = ∏ (j + 1)`, for labels in
/// `(N/2, N]` whose only neighbors are their proper divisors.
pub fn upper_half_closed_form(f: &Factorization) -> LocalClustering {
    let s = f.divisor_count();
    let prod: u64 = f
        .prime_powers
        .iter()
        .map(|&(_, j)| {
            let j = j as u64;
            (j + 2) * (j + 1) / 2
        })
        .product();
    LocalClustering { degree: s - 1, links: prod + 1 - 2 * s }
}

/// Mean local clustering over present nodes, degree-<2 nodes counting as 0.
pub fn ws_clustering<T: Scalar>(graph: &DivisibilityGraph<'_>) -> Result<T> {
    let spec = graph.spec();
    let total = super::ordered_sum(spec.size(), |i| {
        if spec.is_removed(i) {
            T::zero()
        } else {
            arithmetic(graph, i).value::<T>()
        }
    });
    Ok(total / cast(spec.present_count()))
}
