//! Clustering as a function of node label: full profiles, successive
//! differences, the Δc density grid and its symmetry statistic, the
//! (N/3, N/2] / (N/2, N] band check and rescaled overlays of two sizes.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{DivisibilityGraph, NetworkSpec};
use crate::metrics::{local_clustering, ClusteringPath, LocalClustering};
use crate::scalar::{cast, Scalar};
use crate::Exact;

/// Largest size held fully in memory by [`clustering_profile`].
pub const DEFAULT_PROFILE_CAP: u32 = 1 << 22;
pub const X_CELLS: usize = 128;
pub const Y_CELLS_PER_SIDE: usize = 100;
/// Differences with `|Δc|` below this sit on the axis and carry no side.
pub const AXIS_HALF_WIDTH: f64 = 0.005;

const STREAM_CHUNK: u32 = 1 << 16;

fn arithmetic(graph: &DivisibilityGraph<'_>, i: u32) -> LocalClustering {
    local_clustering(graph, i, ClusteringPath::Arithmetic).expect("present label")
}

/// `c_1..c_N`; removed labels hold 0 and read back as `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringProfile<T: Scalar> {
    pub spec: NetworkSpec,
    pub values: Vec<T>,
}

impl<T: Scalar> ClusteringProfile<T> {
    pub fn get(&self, i: u32) -> Option<T> {
        (i >= 1 && i <= self.spec.size() && !self.spec.is_removed(i)).then(|| self.values[i as usize - 1])
    }

    /// `(label, c)` over present labels.
    pub fn iter(&self) -> impl Iterator<Item = (u32, T)> + '_ {
        (1..=self.spec.size()).filter_map(|i| self.get(i).map(|c| (i, c)))
    }
}

pub fn clustering_profile<T: Scalar>(graph: &DivisibilityGraph<'_>) -> Result<ClusteringProfile<T>> {
    clustering_profile_capped(graph, DEFAULT_PROFILE_CAP)
}

pub fn clustering_profile_capped<T: Scalar>(
    graph: &DivisibilityGraph<'_>,
    cap: u32,
) -> Result<ClusteringProfile<T>> {
    let spec = graph.spec();
    if spec.size() > cap {
        return Err(Error::Capacity {
            what: "in-memory clustering profile",
            requested: spec.size() as u64,
            limit: cap as u64,
        });
    }
    let values = (1..=spec.size())
        .into_par_iter()
        .map(|i| if spec.is_removed(i) { T::zero() } else { arithmetic(graph, i).value() })
        .collect();
    Ok(ClusteringProfile { spec: spec.clone(), values })
}

/// Writes `index,value` rows for every present label, computing fixed-size
/// chunks in parallel and writing them in label order. Memory stays bounded
/// by one chunk, so this works above the in-memory cap.
pub fn write_profile_csv<T: Scalar, W: Write>(graph: &DivisibilityGraph<'_>, out: &mut W) -> Result<()> {
    let spec = graph.spec();
    let n = spec.size();
    writeln!(out, "index,value")?;
    let mut lo = 1u32;
    while lo <= n {
        let hi = lo.saturating_add(STREAM_CHUNK - 1).min(n);
        let rows: Vec<(u32, T)> = (lo..=hi)
            .into_par_iter()
            .filter(|&i| !spec.is_removed(i))
            .map(|i| (i, arithmetic(graph, i).value()))
            .collect();
        for (i, c) in rows {
            writeln!(out, "{i},{c}")?;
        }
        if hi == n {
            break;
        }
        lo = hi + 1;
    }
    Ok(())
}

/// `Δc = c_i − c_{i+1}` along consecutive present labels.
pub fn successive_differences<T: Scalar>(profile: &ClusteringProfile<T>) -> Vec<T> {
    let present: Vec<T> = profile.iter().map(|(_, c)| c).collect();
    present.windows(2).map(|w| w[0] - w[1]).collect()
}

/// Occupancy of 128 columns × (100 + 100) rows of height 0.01 over the
/// `(i, Δc_i)` scatter.
///
/// Columns have width `(len + 1) / 128` in the index, i.e. the network size
/// over 128; each column is normalized by its own point count, so a short
/// final column is handled the same way as a full one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid<T: Scalar> {
    pub x_cells: usize,
    pub y_cells_per_side: usize,
    pub cell_height: f64,
    /// Points per column (nominally size / 128).
    pub column_points: Vec<u64>,
    /// Points per column with `|Δc| < 0.005`, excluded from both sides.
    pub axis_counts: Vec<u64>,
    /// `counts[x][row]`, row 0..100 for y = −100..−1 and 100..200 for y = 1..100.
    pub counts: Vec<Vec<u64>>,
    pub rho: Vec<Vec<T>>,
}

fn row_index(y: i32) -> usize {
    debug_assert!(y != 0 && y.unsigned_abs() as usize <= Y_CELLS_PER_SIDE);
    if y < 0 {
        (y + Y_CELLS_PER_SIDE as i32) as usize
    } else {
        Y_CELLS_PER_SIDE - 1 + y as usize
    }
}

impl<T: Scalar> DensityGrid<T> {
    /// `ρ(x, y)` for `x ∈ 1..=128`, `y ∈ ±1..=±100`.
    pub fn rho(&self, x: usize, y: i32) -> T {
        self.rho[x - 1][row_index(y)]
    }

    pub fn count(&self, x: usize, y: i32) -> u64 {
        self.counts[x - 1][row_index(y)]
    }
}

pub fn density_grid<T: Scalar>(diffs: &[T]) -> Result<DensityGrid<T>> {
    if diffs.is_empty() {
        return Err(Error::InsufficientData("no differences to grid".into()));
    }
    let size = diffs.len() as u64 + 1;
    let rows = 2 * Y_CELLS_PER_SIDE;
    let axis: T = cast(AXIS_HALF_WIDTH);
    let hundred: T = cast(Y_CELLS_PER_SIDE);
    let empty = || (vec![0u64; X_CELLS], vec![0u64; X_CELLS], vec![vec![0u64; rows]; X_CELLS]);
    let (column_points, axis_counts, counts) = diffs
        .par_iter()
        .enumerate()
        .fold(empty, |(mut col, mut ax, mut cnt), (idx, &d)| {
            let i = idx as u64 + 1;
            // x = ceil(i / (size/128))
            let x = ((i * X_CELLS as u64).div_ceil(size) as usize).clamp(1, X_CELLS) - 1;
            col[x] += 1;
            if d.abs() < axis {
                ax[x] += 1;
            } else {
                let mag = (d.abs() * hundred).ceil().to_i32().unwrap_or(1).clamp(1, Y_CELLS_PER_SIDE as i32);
                let y = if d < T::zero() { -mag } else { mag };
                cnt[x][row_index(y)] += 1;
            }
            (col, ax, cnt)
        })
        .reduce(empty, |(mut c1, mut a1, mut n1), (c2, a2, n2)| {
            for x in 0..X_CELLS {
                c1[x] += c2[x];
                a1[x] += a2[x];
                for r in 0..rows {
                    n1[x][r] += n2[x][r];
                }
            }
            (c1, a1, n1)
        });
    let rho = counts
        .iter()
        .zip(&column_points)
        .map(|(row, &pts)| {
            row.iter().map(|&c| if pts == 0 { T::zero() } else { cast::<T, _>(c) / cast(pts) }).collect()
        })
        .collect();
    Ok(DensityGrid {
        x_cells: X_CELLS,
        y_cells_per_side: Y_CELLS_PER_SIDE,
        cell_height: 0.01,
        column_points,
        axis_counts,
        counts,
        rho,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryProfile<T: Scalar> {
    pub phi: Vec<T>,
}

impl<T: Scalar> SymmetryProfile<T> {
    pub fn max(&self) -> T {
        self.phi.iter().copied().fold(T::zero(), T::max)
    }
}

/// `φ(x) = (1/100) Σ_{y=1..100} |ρ(x, y) − ρ(x, −y)|`.
pub fn symmetry_quantifier<T: Scalar>(grid: &DensityGrid<T>) -> SymmetryProfile<T> {
    let per_side = grid.y_cells_per_side;
    let phi = (1..=grid.x_cells)
        .map(|x| {
            let s: T = (1..=per_side as i32).map(|y| (grid.rho(x, y) - grid.rho(x, -y)).abs()).sum();
            s / cast(per_side)
        })
        .collect();
    SymmetryProfile { phi }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    /// Primes and prime powers in `(N/3, N/2]`, expected `c = 1`.
    Unit,
    /// Primes in `(N/2, N]`, expected `c = 0`.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandViolation {
    pub label: u32,
    pub band: Band,
    #[serde(serialize_with = "ser_exact")]
    pub value: Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandReport {
    pub n: u32,
    pub unit_band_checked: u64,
    pub zero_band_checked: u64,
    pub violations: Vec<BandViolation>,
}

/// Checks every prime / prime power in `(N/3, N/2]` for `c = 1` and every
/// prime in `(N/2, N]` for `c = 0`.
pub fn band_check(graph: &DivisibilityGraph<'_>) -> Result<BandReport> {
    let spec = graph.spec();
    let n = spec.size();
    if n < 6 {
        return Err(Error::InvalidParameter(format!("band check needs N ≥ 6, got {n}")));
    }
    if spec.has_removals() {
        return Err(Error::InvalidParameter("band check applies to the unmodified network".into()));
    }
    let tables = graph.tables();
    let n64 = n as u64;
    let checked: Vec<(Band, u32, Exact)> = (1..=n)
        .into_par_iter()
        .filter_map(|i| {
            let i64_ = i as u64;
            let band = if 2 * i64_ > n64 && tables.is_prime(i) {
                Band::Zero
            } else if 3 * i64_ > n64 && 2 * i64_ <= n64 && is_prime_power(tables, i) {
                Band::Unit
            } else {
                return None;
            };
            Some((band, i, arithmetic(graph, i).exact()))
        })
        .collect();
    let mut report = BandReport { n, unit_band_checked: 0, zero_band_checked: 0, violations: vec![] };
    for (band, label, value) in checked {
        let expected = match band {
            Band::Unit => {
                report.unit_band_checked += 1;
                Exact::from_integer(1)
            }
            Band::Zero => {
                report.zero_band_checked += 1;
                Exact::from_integer(0)
            }
        };
        if value != expected {
            report.violations.push(BandViolation { label, band, value });
        }
    }
    Ok(report)
}

fn is_prime_power(tables: &crate::sieve::SieveTables, i: u32) -> bool {
    if i < 2 {
        return false;
    }
    let p = tables.spf(i);
    let mut m = i;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// One network's `(i/N, c_i)` scatter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlaySeries<T: Scalar> {
    pub spec: NetworkSpec,
    pub points: Vec<(T, T)>,
}

/// Clustering values in one rescaled region, restricted to exponent shapes
/// present in that region for both networks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    /// `(lo, hi]` on the rescaled axis, as `(1/lo_inv, 1/hi_inv]`.
    pub lo_inv: u32,
    pub hi_inv: u32,
    pub common_shapes: usize,
    #[serde(serialize_with = "ser_exact_set")]
    pub values_a: BTreeSet<Exact>,
    #[serde(serialize_with = "ser_exact_set")]
    pub values_b: BTreeSet<Exact>,
    #[serde(serialize_with = "ser_exact_set")]
    pub shared: BTreeSet<Exact>,
}

impl RegionReport {
    pub fn intersection_size(&self) -> usize {
        self.shared.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StretchOverlay<T: Scalar> {
    pub a: OverlaySeries<T>,
    pub b: OverlaySeries<T>,
    pub regions: Vec<RegionReport>,
}

/// Regions `(1/2, 1]`, `(1/3, 1/2]`, `(1/4, 1/3]` as `(lo_inv, hi_inv)`.
pub const OVERLAY_REGIONS: [(u32, u32); 3] = [(2, 1), (3, 2), (4, 3)];

fn region_of(i: u32, n: u32) -> Option<usize> {
    let (i, n) = (i as u64, n as u64);
    OVERLAY_REGIONS.iter().position(|&(lo, hi)| lo as u64 * i > n && hi as u64 * i <= n)
}

type ShapeValues = Vec<BTreeMap<Vec<u32>, BTreeSet<Exact>>>;

fn series_and_shapes<T: Scalar>(graph: &DivisibilityGraph<'_>) -> (OverlaySeries<T>, ShapeValues) {
    let spec = graph.spec();
    let n = spec.size();
    let nt: T = cast(n);
    let rows: Vec<(u32, LocalClustering)> =
        (1..=n).into_par_iter().filter(|&i| !spec.is_removed(i)).map(|i| (i, arithmetic(graph, i))).collect();
    let mut shapes: ShapeValues = vec![BTreeMap::new(); OVERLAY_REGIONS.len()];
    let mut points = Vec::with_capacity(rows.len());
    for (i, lc) in rows {
        points.push((cast::<T, _>(i) / nt, lc.value::<T>()));
        if let Some(r) = region_of(i, n) {
            let shape = graph.tables().factorize(i).expect("label in range").shape();
            shapes[r].entry(shape).or_default().insert(lc.exact());
        }
    }
    (OverlaySeries { spec: spec.clone(), points }, shapes)
}

pub fn stretch_overlay<T: Scalar>(
    a: &DivisibilityGraph<'_>,
    b: &DivisibilityGraph<'_>,
) -> Result<StretchOverlay<T>> {
    let (sa, shapes_a) = series_and_shapes::<T>(a);
    let (sb, shapes_b) = series_and_shapes::<T>(b);
    let regions = OVERLAY_REGIONS
        .iter()
        .enumerate()
        .map(|(r, &(lo_inv, hi_inv))| {
            let common: Vec<&Vec<u32>> =
                shapes_a[r].keys().filter(|k| shapes_b[r].contains_key(*k)).collect();
            let collect = |m: &BTreeMap<Vec<u32>, BTreeSet<Exact>>| -> BTreeSet<Exact> {
                common.iter().flat_map(|k| m[*k].iter().copied()).collect()
            };
            let values_a = collect(&shapes_a[r]);
            let values_b = collect(&shapes_b[r]);
            let shared = values_a.intersection(&values_b).copied().collect();
            RegionReport { lo_inv, hi_inv, common_shapes: common.len(), values_a, values_b, shared }
        })
        .collect();
    Ok(StretchOverlay { a: sa, b: sb, regions })
}

fn ser_exact<S: Serializer>(v: &Exact, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_exact_set<S: Serializer>(v: &BTreeSet<Exact>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|e| e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::SieveTables;

    fn graph_for(n: u32) -> (SieveTables, NetworkSpec) {
        (SieveTables::build(n).unwrap(), NetworkSpec::new(n).unwrap())
    }

    #[test]
    fn four_node_profile_and_diffs() {
        let (t, s) = graph_for(4);
        let g = DivisibilityGraph::new(&t, &s).unwrap();
        let p: ClusteringProfile<f64> = clustering_profile(&g).unwrap();
        let want = [1.0 / 3.0, 1.0, 0.0, 1.0];
        for (got, w) in p.values.iter().zip(want) {
            assert!((got - w).abs() < 1e-15);
        }
        let d = successive_differences(&p);
        assert_eq!(d.len(), 3);
        for (got, w) in d.iter().zip([-2.0 / 3.0, 1.0, -1.0]) {
            assert!((got - w).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_profile_has_zero_diffs() {
        let p = ClusteringProfile { spec: NetworkSpec::new(5).unwrap(), values: vec![0.25f64; 5] };
        assert_eq!(successive_differences(&p), vec![0.0; 4]);
    }

    #[test]
    fn profile_cap() {
        let (t, s) = graph_for(100);
        let g = DivisibilityGraph::new(&t, &s).unwrap();
        assert!(matches!(clustering_profile_capped::<f64>(&g, 99), Err(Error::Capacity { .. })));
    }

    #[test]
    fn streamed_csv_matches_in_memory() {
        let (t, s) = graph_for(70_000);
        let g = DivisibilityGraph::new(&t, &s).unwrap();
        let p: ClusteringProfile<f64> = clustering_profile(&g).unwrap();
        let mut buf = Vec::new();
        write_profile_csv::<f64, _>(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("index,value"));
        for (line, (i, c)) in lines.zip(p.iter()) {
            assert_eq!(line, format!("{i},{c}"));
        }
    }

    #[test]
    fn zero_diffs_go_to_the_axis() {
        let g: DensityGrid<f64> = density_grid(&vec![0.0; 1023]).unwrap();
        assert_eq!(g.axis_counts.iter().sum::<u64>(), 1023);
        assert!(g.rho.iter().flatten().all(|&r| r == 0.0));
        assert!(symmetry_quantifier(&g).phi.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn alternating_halves_are_mirrored() {
        let diffs: Vec<f64> = (0..8191).map(|i| if i % 2 == 0 { 0.5 } else { -0.5 }).collect();
        let g = density_grid(&diffs).unwrap();
        for x in 1..=X_CELLS {
            assert!((g.rho(x, 50) - 0.5).abs() <= 1.0 / 63.0, "x={x}");
            assert!((g.rho(x, -50) - 0.5).abs() <= 1.0 / 63.0, "x={x}");
            let mass: u64 = g.counts[x - 1].iter().sum::<u64>() + g.axis_counts[x - 1];
            assert_eq!(mass, g.column_points[x - 1]);
        }
        assert_eq!(g.column_points[0], 64);
        assert_eq!(g.column_points[127], 63);
        assert!(symmetry_quantifier(&g).max() < 0.001);
    }

    #[test]
    fn one_sided_mass() {
        let g: DensityGrid<f64> = density_grid(&vec![0.007; 255]).unwrap();
        let phi = symmetry_quantifier(&g);
        for x in 1..=X_CELLS {
            assert_eq!(g.rho(x, 1), 1.0);
            assert_eq!(phi.phi[x - 1], g.rho(x, 1) / 100.0);
        }
    }

    #[test]
    fn empty_diffs_rejected() {
        assert!(density_grid::<f64>(&[]).is_err());
    }

    #[test]
    fn extreme_rows() {
        let g: DensityGrid<f64> = density_grid(&[1.0, -1.0, 0.004, -0.006]).unwrap();
        assert_eq!(g.counts.iter().map(|c| c[row_index(100)]).sum::<u64>(), 1);
        assert_eq!(g.counts.iter().map(|c| c[row_index(-100)]).sum::<u64>(), 1);
        assert_eq!(g.counts.iter().map(|c| c[row_index(-1)]).sum::<u64>(), 1);
        assert_eq!(g.axis_counts.iter().sum::<u64>(), 1);
    }

    #[test]
    fn band_examples() {
        let (t, s) = graph_for(1 << 10);
        let g = DivisibilityGraph::new(&t, &s).unwrap();
        let r = band_check(&g).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.unit_band_checked > 0 && r.zero_band_checked > 0);

        let (t7, s7) = graph_for(7);
        let g7 = DivisibilityGraph::new(&t7, &s7).unwrap();
        let r7 = band_check(&g7).unwrap();
        // 5 and 7 in (3.5, 7]; 3 in (7/3, 7/2]
        assert_eq!(r7.zero_band_checked, 2);
        assert_eq!(r7.unit_band_checked, 1);
        assert!(r7.violations.is_empty());

        // N = 6: 2 is not above N/3, so only 3 is in the unit band
        let (t6, s6) = graph_for(6);
        let g6 = DivisibilityGraph::new(&t6, &s6).unwrap();
        assert_eq!(band_check(&g6).unwrap().unit_band_checked, 1);

        let (t5, s5) = graph_for(5);
        assert!(band_check(&DivisibilityGraph::new(&t5, &s5).unwrap()).is_err());
    }

    #[test]
    fn overlay_shapes_agree_across_doubling() {
        let t = SieveTables::build(1 << 14).unwrap();
        let sa = NetworkSpec::new(1 << 13).unwrap();
        let sb = NetworkSpec::new(1 << 14).unwrap();
        let ga = DivisibilityGraph::new(&t, &sa).unwrap();
        let gb = DivisibilityGraph::new(&t, &sb).unwrap();
        let o: StretchOverlay<f64> = stretch_overlay(&ga, &gb).unwrap();
        assert_eq!(o.a.points.len(), 1 << 13);
        let two_thirds = Exact::new(2, 3);
        assert!(o.regions[0].values_a.contains(&two_thirds));
        assert!(o.regions[0].values_b.contains(&two_thirds));
        for r in &o.regions {
            assert!(r.common_shapes > 0);
            assert_eq!(r.values_a, r.values_b, "region 1/{}..1/{}", r.lo_inv, r.hi_inv);
            assert_eq!(r.intersection_size(), r.values_a.len());
        }
    }

    #[test]
    fn identical_overlay() {
        let (t, s) = graph_for(500);
        let g = DivisibilityGraph::new(&t, &s).unwrap();
        let o: StretchOverlay<f64> = stretch_overlay(&g, &g).unwrap();
        assert_eq!(o.a.points, o.b.points);
    }
}
