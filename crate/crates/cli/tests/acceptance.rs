//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fail.
//!
//! Criteria 1 to 10 run twice, on a 4-thread and a 1-thread pool; criterion 11
//! compares every value they produced byte for byte, then repeats the
//! comparison for CLI output files.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use divnet::graph::edge_count;
use divnet::metrics::{
    assortativity, local_clustering, triangle_count, ClusteringPath, GlobalMetrics, TriangleMode,
};
use divnet::patterns::{
    band_check, clustering_profile, density_grid, successive_differences, symmetry_quantifier,
};
use divnet::powerlaw::{
    bootstrap_pvalue_with, clustering_degree_profile, select_kmin_with, tail_slope, KminScan, PowerLawFit,
};
use divnet::{DivisibilityGraph, Exact, NetworkSpec, SieveTables};

struct Outcome {
    pass: bool,
    detail: String,
    /// Every computed value the verdict depends on, in a fixed textual form.
    artifact: String,
    elapsed: Duration,
}

type Check = fn() -> (bool, String, String);

fn timed(f: Check) -> Outcome {
    let t = Instant::now();
    let (pass, detail, artifact) = f();
    Outcome { pass, detail, artifact, elapsed: t.elapsed() }
}

fn graph_tables(n: u32) -> SieveTables {
    SieveTables::build(n).expect("sieve")
}

fn tail_degrees(t: &SieveTables, spec: &NetworkSpec) -> Vec<u64> {
    let g = DivisibilityGraph::new(t, spec).unwrap();
    g.degree_sequence().values().into_iter().filter(|&k| k > 0).collect()
}

fn fit_at(t: &SieveTables, spec: &NetworkSpec) -> PowerLawFit<f64> {
    select_kmin_with(&tail_degrees(t, spec), &KminScan::default()).expect("fit")
}

fn c1_scaling_index() -> (bool, String, String) {
    let start = Instant::now();
    let n = 1 << 15;
    let t = graph_tables(n);
    let f = fit_at(&t, &NetworkSpec::new(n).unwrap());
    let secs = start.elapsed().as_secs_f64();
    let pass = (1.9..=2.2).contains(&f.alpha) && secs < 60.0;
    (
        pass,
        format!(
            "N=2^15 alpha={:.4} k_min={} n_tail={} in [1.9, 2.2], {secs:.2}s < 60s",
            f.alpha, f.k_min, f.n_tail
        ),
        format!("{f:?}"),
    )
}

fn c2_bootstrap_pvalues() -> (bool, String, String) {
    let t = graph_tables(1024);
    let mut pass = true;
    let mut detail = String::new();
    let mut art = String::new();
    for (n, lo, hi) in [(256u32, 0.56, 0.68), (512, 0.89, 1.0), (1024, 0.95, 1.0)] {
        let d = tail_degrees(&t, &NetworkSpec::new(n).unwrap());
        let scan = KminScan::default();
        let f: PowerLawFit<f64> = select_kmin_with(&d, &scan).unwrap();
        let g = bootstrap_pvalue_with(&d, &f, 2500, 7, &scan).unwrap();
        let ok = (lo..=hi).contains(&g.p_value);
        pass &= ok;
        write!(detail, "N={n} p={} in [{lo}, {hi}]{}; ", g.p_value, if ok { "" } else { " NO" }).unwrap();
        write!(art, "{f:?} {g:?};").unwrap();
    }
    (pass, format!("2500 synthetics, seed 7: {detail}"), art)
}

fn c3_average_degree() -> (bool, String, String) {
    let mut pass = true;
    let mut detail = String::new();
    let mut art = String::new();
    for k in [14u32, 18, 22] {
        let n = 1u32 << k;
        let spec = NetworkSpec::new(n).unwrap();
        let avg = 2.0 * edge_count(&spec) as f64 / n as f64;
        let asym = 2.0 * (n as f64).ln() - 1.6912;
        let gap = (avg - asym).abs();
        pass &= gap < 0.05;
        write!(detail, "2^{k}: |{avg:.4} - {asym:.4}|={gap:.1e}; ").unwrap();
        write!(art, "{avg:?};").unwrap();
    }
    // Brute force m(N) for every N ≤ 2^11: each new node links to its proper
    // divisors, found by trial division.
    let t = graph_tables(1 << 11);
    let mut m = 0u64;
    let mut mismatches = 0;
    for n in 1..=(1u32 << 11) {
        m += (1..n).filter(|&j| n % j == 0).count() as u64;
        let spec = NetworkSpec::new(n).unwrap();
        let g = DivisibilityGraph::new(&t, &spec).unwrap();
        if edge_count(&spec) != m || g.degree_sequence().total() != 2 * m {
            mismatches += 1;
        }
    }
    pass &= mismatches == 0;
    write!(detail, "brute-force m mismatches for N <= 2^11: {mismatches}").unwrap();
    (pass, detail, art)
}

fn c4_clustering() -> (bool, String, String) {
    let t = graph_tables(1 << 18);
    let global = |k: u32| {
        let spec = NetworkSpec::new(1 << k).unwrap();
        let g = DivisibilityGraph::new(&t, &spec).unwrap();
        GlobalMetrics::<f64>::compute(&g).unwrap()
    };
    let (a, b, c) = (global(10), global(14), global(18));
    let (ca, cb, cc) =
        (a.global_clustering.unwrap(), b.global_clustering.unwrap(), c.global_clustering.unwrap());
    let ws = global(15).ws_clustering;
    let pass = ca > cb && cb > cc && (0.55..=0.70).contains(&ws);
    (
        pass,
        format!("C(2^10)={ca:.5} > C(2^14)={cb:.5} > C(2^18)={cc:.6}; C_WS(2^15)={ws:.4} in [0.55, 0.70]"),
        format!("{ca:?} {cb:?} {cc:?} {ws:?}"),
    )
}

fn c5_dissortativity() -> (bool, String, String) {
    let t = graph_tables(1 << 20);
    let rs: Vec<(u32, f64)> = (8..=20)
        .step_by(2)
        .map(|k| {
            let spec = NetworkSpec::new(1 << k).unwrap();
            let g = DivisibilityGraph::new(&t, &spec).unwrap();
            (k, assortativity::<f64>(&g).unwrap())
        })
        .collect();
    let negative = rs.iter().all(|&(_, r)| r < 0.0);
    let last: Vec<f64> = rs[rs.len() - 3..].iter().map(|&(_, r)| r.abs()).collect();
    let decreasing = last[0] > last[1] && last[1] > last[2];
    let listing: Vec<String> = rs.iter().map(|(k, r)| format!("2^{k}:{r:.4}")).collect();
    (
        negative && decreasing,
        format!(
            "r<0 at all sizes: {negative}; |r| decreasing over last three: {decreasing}; {}",
            listing.join(" ")
        ),
        format!("{rs:?}"),
    )
}

/// Brute-force state grown one label at a time: for each present node its
/// degree and number of linked neighbor pairs, plus the triangle count.
struct Incremental {
    removed: Vec<u32>,
    degree: Vec<u64>,
    links: Vec<u64>,
    triangles: u64,
}

impl Incremental {
    fn new(removed: &[u32]) -> Self {
        Self { removed: removed.to_vec(), degree: vec![0], links: vec![0], triangles: 0 }
    }

    /// Adds label `n = len`; its neighbors at this size are its proper divisors.
    fn grow(&mut self) -> u32 {
        let n = self.degree.len() as u32;
        self.degree.push(0);
        self.links.push(0);
        if self.removed.contains(&n) {
            return n;
        }
        let divs: Vec<u32> = (1..n).filter(|&j| n.is_multiple_of(j) && !self.removed.contains(&j)).collect();
        self.degree[n as usize] = divs.len() as u64;
        for &a in &divs {
            self.degree[a as usize] += 1;
        }
        for (x, &a) in divs.iter().enumerate() {
            for &b in &divs[x + 1..] {
                if b % a == 0 {
                    self.triangles += 1;
                    self.links[a as usize] += 1;
                    self.links[b as usize] += 1;
                    self.links[n as usize] += 1;
                }
            }
        }
        n
    }
}

/// Degree assortativity from the dense double sum over all node pairs,
/// scaled by 2m so that every term is an integer.
fn dense_assortativity(n: u32, degree: &[u64]) -> Option<f64> {
    let two_m: i64 = degree[1..=n as usize].iter().sum::<u64>() as i64;
    let (mut num, mut den) = (0i128, 0i128);
    for i in 1..=n {
        let ki = degree[i as usize] as i64;
        let (mut row_num, mut row_den) = (0i64, 0i64);
        for j in 1..=n {
            let kj = degree[j as usize] as i64;
            let a = (i != j && (i % j == 0 || j % i == 0)) as i64;
            let kk = ki * kj;
            row_num += (two_m * a - kk) * kk;
            row_den += (two_m * ki * (i == j) as i64 - kk) * kk;
        }
        num += row_num as i128;
        den += row_den as i128;
    }
    (den != 0).then(|| num as f64 / den as f64)
}

fn c6_oracle_equivalence() -> (bool, String, String) {
    let max = 1u32 << 11;
    let t = graph_tables(max);
    let (mut tri_bad, mut local_bad, mut closed_bad, mut closed_checked, mut assort_bad) = (0, 0, 0, 0u64, 0);
    let mut max_assort_gap = 0f64;
    let mut removal_bad = 0;
    let removal_sets: [&[u32]; 5] = [&[], &[1], &[1, 2], &[1, 2, 3], &[1, 2, 3, 4]];
    for removed in removal_sets {
        let mut inc = Incremental::new(removed);
        for _ in 1..=max {
            let n = inc.grow();
            if removed.iter().any(|&r| r > n) {
                continue;
            }
            let spec = NetworkSpec::with_removed(n, removed.iter().copied()).unwrap();
            let g = DivisibilityGraph::new(&t, &spec).unwrap();
            let bad_here = (1..=n)
                .filter(|&i| !spec.is_removed(i))
                .filter(|&i| {
                    let lc = local_clustering(&g, i, ClusteringPath::Arithmetic).unwrap();
                    (lc.degree, lc.links) != (inc.degree[i as usize], inc.links[i as usize])
                })
                .count();
            let tri_ok = triangle_count(&g, TriangleMode::Exact).unwrap() == inc.triangles;
            if removed.is_empty() {
                local_bad += bad_here;
                tri_bad += !tri_ok as u32;
                for i in (n / 2 + 1..=n).filter(|&i| t.factorize(i).unwrap().prime_powers.len() >= 2) {
                    closed_checked += 1;
                    let cf = local_clustering(&g, i, ClusteringPath::ClosedForm).unwrap().exact();
                    let (k, e) = (inc.degree[i as usize], inc.links[i as usize]);
                    if cf != Exact::new(e, k * (k - 1) / 2) {
                        closed_bad += 1;
                    }
                }
                if let Some(dense) = dense_assortativity(n, &inc.degree) {
                    let r = assortativity::<f64>(&g).unwrap();
                    let gap = (r - dense).abs();
                    max_assort_gap = max_assort_gap.max(gap);
                    if gap >= 1e-9 {
                        assort_bad += 1;
                    }
                }
            } else {
                removal_bad += bad_here + !tri_ok as usize;
            }
        }
    }
    let pass = tri_bad == 0
        && local_bad == 0
        && closed_bad == 0
        && closed_checked > 0
        && assort_bad == 0
        && removal_bad == 0;
    (
        pass,
        format!(
            "N <= 2^11: triangle mismatches {tri_bad}; local clustering mismatches {local_bad}; \
             closed form mismatches {closed_bad}/{closed_checked}; assortativity max gap {max_assort_gap:.1e} \
             (over 1e-9: {assort_bad}); removal-set mismatches {removal_bad}"
        ),
        format!("{tri_bad} {local_bad} {closed_bad} {closed_checked} {assort_bad} {max_assort_gap:?} {removal_bad}"),
    )
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn is_prime_power(n: u32) -> bool {
    let Some(p) = (2..=n).find(|d| n.is_multiple_of(*d)) else { return false };
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

fn c7_bands() -> (bool, String, String) {
    let mut pass = true;
    let mut detail = String::new();
    let mut art = String::new();
    let t = graph_tables(1 << 12);
    for k in [10u32, 12] {
        let n = 1u32 << k;
        let spec = NetworkSpec::new(n).unwrap();
        let g = DivisibilityGraph::new(&t, &spec).unwrap();
        let report = band_check(&g).unwrap();
        // The same bands, with membership by trial division and values from
        // pairwise neighbor enumeration.
        let mut oracle_violations = 0;
        let (mut unit, mut zero) = (0, 0);
        for i in 1..=n {
            let c = local_clustering(&g, i, ClusteringPath::Oracle).unwrap().exact();
            if 3 * i > n && 2 * i <= n && is_prime_power(i) {
                unit += 1;
                oracle_violations += (c != Exact::from_integer(1)) as u32;
            } else if 2 * i > n && is_prime(i) {
                zero += 1;
                oracle_violations += (c != Exact::from_integer(0)) as u32;
            }
        }
        let ok = report.violations.is_empty()
            && oracle_violations == 0
            && report.unit_band_checked == unit
            && report.zero_band_checked == zero;
        pass &= ok;
        write!(
            detail,
            "2^{k}: {} + {} nodes checked, violations {} (oracle {oracle_violations}); ",
            report.unit_band_checked,
            report.zero_band_checked,
            report.violations.len()
        )
        .unwrap();
        write!(art, "{report:?};").unwrap();
    }
    (pass, detail, art)
}

fn c8_clustering_degree() -> (bool, String, String) {
    let n = 1 << 15;
    let t = graph_tables(n);
    let spec = NetworkSpec::new(n).unwrap();
    let g = DivisibilityGraph::new(&t, &spec).unwrap();
    let ck = clustering_degree_profile::<f64>(&g).unwrap();
    let slope = tail_slope(&ck.points(), 2.0);
    let pass = slope.is_some_and(|s| (-1.25..=-0.75).contains(&s));
    (
        pass,
        format!("N=2^15 slope of c(k) over upper two decades = {slope:?}, in [-1.25, -0.75]"),
        format!("{ck:?}"),
    )
}

fn c9_symmetry() -> (bool, String, String) {
    let n = 1 << 13;
    let t = graph_tables(n);
    let spec = NetworkSpec::new(n).unwrap();
    let g = DivisibilityGraph::new(&t, &spec).unwrap();
    let p = clustering_profile::<f64>(&g).unwrap();
    let grid = density_grid(&successive_differences(&p)).unwrap();
    let phi = symmetry_quantifier(&grid);
    let max = phi.max();
    (max < 0.05, format!("N=2^13 max phi = {max} < 0.05"), format!("{:?}", phi.phi))
}

fn c10_hub_removal() -> (bool, String, String) {
    let max = 1u32 << 14;
    let t = graph_tables(1 << 15);
    let mut mismatched = Vec::new();
    for n in 1..=max {
        let spec = NetworkSpec::with_removed(n, [1]).unwrap();
        let g = DivisibilityGraph::new(&t, &spec).unwrap();
        let seq = g.degree_sequence();
        let isolated: Vec<u32> = seq.iter().filter(|&(_, k)| k == 0).map(|(i, _)| i).collect();
        let expected: Vec<u32> = (n / 2 + 1..=n).filter(|&i| is_prime(i)).collect();
        if isolated != expected {
            mismatched.push(n);
        }
    }
    let n = 1 << 15;
    let base = fit_at(&t, &NetworkSpec::new(n).unwrap());
    let mut art = format!("{mismatched:?} {base:?}");
    let mut shifts = String::new();
    let mut pass = mismatched.is_empty();
    for hubs in 1..=4u32 {
        let f = fit_at(&t, &NetworkSpec::with_removed(n, 1..=hubs).unwrap());
        let shift = f.alpha - base.alpha;
        if hubs == 1 {
            pass &= shift.abs() <= 0.3;
        }
        let set: Vec<String> = (1..=hubs).map(|h| h.to_string()).collect();
        write!(shifts, " {{{}}}:{shift:+.4}", set.join(",")).unwrap();
        write!(art, " {f:?}").unwrap();
    }
    (
        pass,
        format!(
            "isolated == primes in (N/2, N] for every N <= 2^14 (mismatches: {}); N=2^15 alpha {:.4}, shift after removing{shifts}, |shift {{1}}| <= 0.3",
            mismatched.len(),
            base.alpha
        ),
        art,
    )
}

const CRITERIA: [(&str, Check); 10] = [
    ("scaling index", c1_scaling_index),
    ("bootstrap p-values", c2_bootstrap_pvalues),
    ("average degree", c3_average_degree),
    ("clustering decay and saturation", c4_clustering),
    ("dissortativity", c5_dissortativity),
    ("oracle equivalence", c6_oracle_equivalence),
    ("band structure", c7_bands),
    ("clustering-degree scaling", c8_clustering_degree),
    ("difference symmetry", c9_symmetry),
    ("hub-removal robustness", c10_hub_removal),
];

fn run_all(threads: usize) -> Vec<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| CRITERIA.iter().map(|&(_, f)| timed(f)).collect())
}

fn cli_outputs(dir: &Path, threads: &str, args: &[&str]) -> Vec<(String, Vec<u8>)> {
    let status = Command::new(env!("CARGO_BIN_EXE_divnet"))
        .args(["--threads", threads, "--output-dir"])
        .arg(dir)
        .args(args)
        .env_remove("DIVNET_CACHE_DIR")
        .output()
        .expect("cli runs")
        .status;
    assert!(status.success(), "{args:?} failed");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "manifest.json")
        .map(|e| (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap()))
        .collect();
    files.sort();
    files
}

fn c11_cli_determinism() -> (bool, String) {
    let runs: [&[&str]; 6] = [
        &["fit", "--size", "2^8", "--n-synthetic", "300", "--seed", "7"],
        &["sweep", "--max-size", "2^14"],
        &["diff-symmetry", "--size", "2^13"],
        &["hub-removal", "--size", "2^13"],
        &["band-check", "--size", "2^12"],
        &["overlay", "--size", "2^11"],
    ];
    let mut differing = Vec::new();
    let mut files = 0;
    for args in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let one = cli_outputs(a.path(), "1", args);
        let four = cli_outputs(b.path(), "4", args);
        files += one.len();
        if one != four {
            differing.push(args[0]);
        }
    }
    (
        differing.is_empty(),
        format!("CLI: {files} files from {} commands, differing: {differing:?}", runs.len()),
    )
}

fn main() {
    // Test harness flags such as --nocapture or a filter are accepted and ignored.
    let wall = Instant::now();
    let four = run_all(4);
    let one = run_all(1);
    let mut failures = 0;
    println!();
    for (k, ((name, _), o)) in CRITERIA.iter().zip(&four).enumerate() {
        failures += !o.pass as u32;
        println!(
            "{} C{:<2} {name}: {} [{:.2}s]",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            o.elapsed.as_secs_f64()
        );
    }
    let same: Vec<bool> =
        four.iter().zip(&one).map(|(a, b)| a.artifact == b.artifact && a.pass == b.pass).collect();
    let lib_ok = same.iter().all(|&s| s);
    let (cli_ok, cli_detail) = c11_cli_determinism();
    let c11 = lib_ok && cli_ok;
    failures += !c11 as u32;
    let differing: Vec<usize> = same.iter().enumerate().filter(|(_, &s)| !s).map(|(k, _)| k + 1).collect();
    println!(
        "{} C11 determinism: criteria 1-10 on 4 vs 1 threads byte-identical (differing: {differing:?}); {cli_detail}",
        if c11 { "PASS" } else { "FAIL" }
    );
    println!("acceptance: {} of 11 passed in {:.1}s", 11 - failures, wall.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
