//! The implicit divisibility graph on labels `1..=N`.
//!
//! Labels are 1-based everywhere. Degrees and edge counts come from the
//! divisor-count table and floor sums; neighbor lists are produced on demand
//! and are only meant for small networks and oracle work.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::floor_sum::divisor_summatory;
use crate::sieve::SieveTables;

/// Default cap on the number of removed labels.
pub const DEFAULT_MAX_REMOVED: usize = 16;

/// Size plus a small set of removed labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct NetworkSpec {
    size: u32,
    removed: Vec<u32>,
}

impl NetworkSpec {
    pub fn new(size: u32) -> Result<Self> {
        Self::with_removed(size, [])
    }

    pub fn with_removed(size: u32, removed: impl IntoIterator<Item = u32>) -> Result<Self> {
        Self::with_removed_cap(size, removed, DEFAULT_MAX_REMOVED)
    }

    pub fn with_removed_cap(
        size: u32,
        removed: impl IntoIterator<Item = u32>,
        max_removed: usize,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("network size must be at least 1".into()));
        }
        let mut removed: Vec<u32> = removed.into_iter().collect();
        removed.sort_unstable();
        removed.dedup();
        if let Some(&bad) = removed.iter().find(|&&r| r == 0 || r > size) {
            return Err(Error::OutOfRange { label: bad as u64, size: size as u64 });
        }
        if removed.len() > max_removed {
            return Err(Error::Capacity {
                what: "removed set",
                requested: removed.len() as u64,
                limit: max_removed as u64,
            });
        }
        Ok(Self { size, removed })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Removed labels, ascending.
    pub fn removed(&self) -> &[u32] {
        &self.removed
    }

    pub fn has_removals(&self) -> bool {
        !self.removed.is_empty()
    }

    #[inline]
    pub fn is_removed(&self, i: u32) -> bool {
        !self.removed.is_empty() && self.removed.binary_search(&i).is_ok()
    }

    pub fn present_count(&self) -> u32 {
        self.size - self.removed.len() as u32
    }

    fn check(&self, i: u32) -> Result<()> {
        if i == 0 || i > self.size {
            return Err(Error::OutOfRange { label: i as u64, size: self.size as u64 });
        }
        Ok(())
    }

    fn check_present(&self, i: u32) -> Result<()> {
        self.check(i)?;
        if self.is_removed(i) {
            return Err(Error::RemovedNode(i));
        }
        Ok(())
    }

    /// True iff `i ≠ j`, neither is removed and one divides the other.
    pub fn adjacent(&self, i: u32, j: u32) -> Result<bool> {
        self.check(i)?;
        self.check(j)?;
        Ok(divides_either(i, j) && !self.is_removed(i) && !self.is_removed(j))
    }
}

#[inline]
pub(crate) fn divides_either(a: u32, b: u32) -> bool {
    a != b && (b.is_multiple_of(a) || a.is_multiple_of(b))
}

/// Edge count `m = Σ_{j=1..N} (floor(N/j) − 1)`, corrected for removed
/// labels by inclusion–exclusion. Needs no sieve.
pub fn edge_count(spec: &NetworkSpec) -> u64 {
    let n = spec.size as u64;
    let full = divisor_summatory(n) - n;
    let r = spec.removed();
    let incident: u64 = r.iter().map(|&x| trial_divisor_count(x) + n / x as u64 - 2).sum();
    let mut shared = 0u64;
    for (a, &x) in r.iter().enumerate() {
        for &y in &r[a + 1..] {
            if divides_either(x, y) {
                shared += 1;
            }
        }
    }
    full + shared - incident
}

fn trial_divisor_count(n: u32) -> u64 {
    let n = n as u64;
    let mut c = 0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            c += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    c
}

/// A [`NetworkSpec`] bound to sieve tables that cover it.
#[derive(Debug, Clone, Copy)]
pub struct DivisibilityGraph<'t> {
    tables: &'t SieveTables,
    spec: &'t NetworkSpec,
}

impl<'t> DivisibilityGraph<'t> {
    pub fn new(tables: &'t SieveTables, spec: &'t NetworkSpec) -> Result<Self> {
        if tables.limit() < spec.size() {
            return Err(Error::InvalidParameter(format!(
                "sieve limit {} does not cover network size {}",
                tables.limit(),
                spec.size()
            )));
        }
        Ok(Self { tables, spec })
    }

    pub fn tables(&self) -> &'t SieveTables {
        self.tables
    }

    pub fn spec(&self) -> &'t NetworkSpec {
        self.spec
    }

    pub fn size(&self) -> u32 {
        self.spec.size()
    }

    pub fn adjacent(&self, i: u32, j: u32) -> Result<bool> {
        self.spec.adjacent(i, j)
    }

    /// Proper divisors and proper multiples of `i`, minus removed labels.
    pub fn neighbors(&self, i: u32) -> Result<Vec<u32>> {
        self.spec.check_present(i)?;
        let n = self.size();
        let mut out = self.tables.divisors(i)?;
        out.pop();
        out.extend((2..=n / i).map(|k| k * i));
        if self.spec.has_removals() {
            out.retain(|&x| !self.spec.is_removed(x));
        }
        Ok(out)
    }

    /// Degree with no removals: `d(i) + floor(N/i) − 2`.
    #[inline]
    pub(crate) fn full_degree(&self, i: u32) -> u32 {
        self.tables.divisor_count(i) + self.size() / i - 2
    }

    /// Number of removed labels adjacent to `i` (in the full graph).
    #[inline]
    pub(crate) fn removed_neighbor_count(&self, i: u32) -> u32 {
        self.spec.removed().iter().filter(|&&r| divides_either(r, i)).count() as u32
    }

    #[inline]
    pub(crate) fn degree_unchecked(&self, i: u32) -> u32 {
        let k = self.full_degree(i);
        if self.spec.has_removals() {
            k - self.removed_neighbor_count(i)
        } else {
            k
        }
    }

    pub fn degree(&self, i: u32) -> Result<u32> {
        self.spec.check_present(i)?;
        Ok(self.degree_unchecked(i))
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        let degrees = (1..=self.size())
            .into_par_iter()
            .map(|i| if self.spec.is_removed(i) { 0 } else { self.degree_unchecked(i) })
            .collect();
        DegreeSequence { spec: self.spec.clone(), degrees }
    }

    pub fn edge_count(&self) -> u64 {
        edge_count(self.spec)
    }
}

/// Degrees `k_1..k_N`; removed labels are absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    spec: NetworkSpec,
    degrees: Vec<u32>,
}

impl DegreeSequence {
    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    /// Degree of label `i`, or `None` if it is removed or out of range.
    pub fn get(&self, i: u32) -> Option<u32> {
        if i == 0 || i > self.spec.size() || self.spec.is_removed(i) {
            None
        } else {
            Some(self.degrees[i as usize - 1])
        }
    }

    /// `(label, degree)` for every present node, ascending by label.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.degrees
            .iter()
            .enumerate()
            .map(|(idx, &k)| (idx as u32 + 1, k))
            .filter(move |&(i, _)| !self.spec.is_removed(i))
    }

    /// Degrees of the present nodes, ascending by label.
    pub fn values(&self) -> Vec<u64> {
        self.iter().map(|(_, k)| k as u64).collect()
    }

    /// `Σ k_i`, which equals `2m`.
    pub fn total(&self) -> u64 {
        self.iter().map(|(_, k)| k as u64).sum()
    }
}
