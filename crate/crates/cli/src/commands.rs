use std::collections::BTreeMap;
use std::fmt;
use std::io;

use divnet::graph::edge_count;
use divnet::metrics::{average_degree, average_degree_asymptotic, ws_clustering, GlobalMetrics};
use divnet::patterns::{
    band_check, clustering_profile, density_grid, stretch_overlay, successive_differences,
    symmetry_quantifier, write_profile_csv, Band,
};
use divnet::powerlaw::{
    bootstrap_pvalue_with, clustering_degree_profile, fit_alpha_with, ks_distance, log_binned_histogram,
    select_kmin_with, tail_slope, FitReport, KminScan, LogBinnedHistogram, PowerLawFit,
};
use divnet::sieve::{load_or_build, CacheOutcome};
use divnet::{DivisibilityGraph, NetworkSpec, SieveTables};
use serde_json::{json, Value};

use crate::output::{Cell, Format, RunOutput};
use crate::{Command, Common, FitOptions, NetArgs};

#[derive(Debug)]
pub enum Failure {
    Lib(divnet::Error),
    /// The command ran and wrote its outputs, but a check it performs failed.
    Check(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(e) => e.fmt(f),
            Failure::Check(msg) => f.write_str(msg),
        }
    }
}

impl From<divnet::Error> for Failure {
    fn from(e: divnet::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(divnet::Error::Io(e))
    }
}

type Outcome = Result<Value, Failure>;

const HUB_SETS: usize = 4;

pub fn run(common: &Common, command: &Command) -> Outcome {
    let mut out = RunOutput::create(&common.output_dir, common.format)?;
    let result = match command {
        Command::DegreeDist(a) => degree_dist(common, &mut out, a),
        Command::Fit(a) => fit(common, &mut out, a),
        Command::Metrics(a) => metrics(common, &mut out, a),
        Command::Sweep(a) => sweep(common, &mut out, a),
        Command::Profile(a) => profile(common, &mut out, a),
        Command::DiffSymmetry(a) => diff_symmetry(common, &mut out, a),
        Command::HubRemoval(a) => hub_removal(common, &mut out, a),
        Command::BandCheck(a) => band(common, &mut out, a.size),
        Command::Overlay(a) => overlay(common, &mut out, a),
    };
    let (summary, check) = match result {
        Ok(v) => (v, None),
        Err(Failure::Check(msg)) => (Value::Null, Some(msg)),
        Err(e) => return Err(e),
    };
    if !summary.is_null() {
        out.json("summary.json", &summary)?;
    }
    let config = json!({ "common": common, "args": command });
    out.finish(command.name(), &config, rayon::current_num_threads())?;
    match check {
        Some(msg) => Err(Failure::Check(msg)),
        None => Ok(summary),
    }
}

fn tables(common: &Common, limit: u32) -> Result<SieveTables, Failure> {
    match &common.cache_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let (t, outcome) = load_or_build(dir, limit)?;
            let what = match outcome {
                CacheOutcome::Hit => "loaded",
                CacheOutcome::Built => "built and cached",
                CacheOutcome::Rebuilt => "rebuilt (cache was invalid)",
            };
            eprintln!("sieve to {limit}: {what} in {}", dir.display());
            Ok(t)
        }
        None => Ok(SieveTables::build(limit)?),
    }
}

fn spec_of(net: &NetArgs) -> Result<NetworkSpec, Failure> {
    Ok(NetworkSpec::with_removed(net.size, net.removed.iter().copied())?)
}

fn nonzero_degrees(graph: &DivisibilityGraph<'_>) -> (Vec<u64>, u64) {
    let all = graph.degree_sequence().values();
    let isolated = all.iter().filter(|&&k| k == 0).count() as u64;
    (all.into_iter().filter(|&k| k > 0).collect(), isolated)
}

fn hist_rows(h: &LogBinnedHistogram<f64>) -> Vec<Vec<Cell>> {
    h.counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let lo = h.bin_edges[b];
            vec![
                lo.into(),
                (h.bin_edges[b + 1] - 1).into(),
                c.into(),
                h.densities[b].into(),
                (lo as f64 * 2f64.sqrt()).into(),
            ]
        })
        .collect()
}

const HIST_HEADER: [&str; 5] = ["bin_lo", "bin_hi", "count", "density", "center"];

fn degree_dist(common: &Common, out: &mut RunOutput, a: &NetArgs) -> Outcome {
    let spec = spec_of(a)?;
    let t = tables(common, a.size)?;
    let graph = DivisibilityGraph::new(&t, &spec)?;
    let (degrees, isolated) = nonzero_degrees(&graph);
    let hist = log_binned_histogram::<f64>(&degrees)?;
    out.table("degree_hist", &HIST_HEADER, hist_rows(&hist))?;
    let mut freq: BTreeMap<u64, u64> = BTreeMap::new();
    for &k in &degrees {
        *freq.entry(k).or_default() += 1;
    }
    if isolated > 0 {
        freq.insert(0, isolated);
    }
    out.table("degree_counts", &["degree", "count"], freq.iter().map(|(&k, &c)| vec![k.into(), c.into()]))?;
    Ok(json!({
        "n": a.size,
        "removed": spec.removed(),
        "nodes": spec.present_count(),
        "isolated": isolated,
        "edges": edge_count(&spec),
        "bins": hist.counts.len(),
    }))
}

fn scan_of(o: &FitOptions) -> KminScan {
    KminScan { min_tail: o.min_tail, estimator: o.estimator.into() }
}

fn fit_and_test(degrees: &[u64], o: &FitOptions) -> Result<(PowerLawFit<f64>, FitReport<f64>), Failure> {
    let scan = scan_of(o);
    let fit = select_kmin_with::<f64>(degrees, &scan)?;
    let gof = match o.n_synthetic {
        0 => None,
        n => Some(bootstrap_pvalue_with(degrees, &fit, n, o.seed, &scan)?),
    };
    let report = FitReport::new(&fit, gof.as_ref(), o.seed);
    Ok((fit, report))
}

fn fit(common: &Common, out: &mut RunOutput, a: &crate::FitArgs) -> Outcome {
    let spec = spec_of(&a.net)?;
    let t = tables(common, a.net.size)?;
    let graph = DivisibilityGraph::new(&t, &spec)?;
    let (degrees, _) = nonzero_degrees(&graph);
    let (_, report) = fit_and_test(&degrees, &a.fit)?;
    let fixed = match a.k_min {
        Some(k) => {
            let alpha: f64 = fit_alpha_with(&degrees, k, a.fit.estimator.into())?;
            let ks: f64 = ks_distance(&degrees, k, alpha)?;
            let n_tail = degrees.iter().filter(|&&d| d >= k).count();
            json!({ "k_min": k, "alpha": alpha, "ks": ks, "n_tail": n_tail })
        }
        None => Value::Null,
    };
    let summary = json!({
        "n": a.net.size,
        "removed": spec.removed(),
        "estimator": a.fit.estimator,
        "min_tail": a.fit.min_tail,
        "fit": report,
        "fixed_k_min": fixed,
    });
    out.json("fit.json", &summary)?;
    Ok(summary)
}

const METRIC_HEADER: [&str; 10] = [
    "n",
    "removed",
    "m",
    "avg_degree",
    "avg_degree_asymptotic",
    "triangles",
    "connected_triplets",
    "global_clustering",
    "ws_clustering",
    "assortativity",
];

fn removed_cell(removed: &[u32]) -> Cell {
    Cell::S(removed.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
}

fn metric_row(g: &GlobalMetrics<f64>) -> Vec<Cell> {
    vec![
        g.n.into(),
        removed_cell(&g.removed),
        g.m.into(),
        g.avg_degree.into(),
        g.avg_degree_asymptotic.into(),
        g.triangles.into(),
        g.connected_triplets.into(),
        g.global_clustering.into(),
        g.ws_clustering.into(),
        g.assortativity.into(),
    ]
}

fn metrics(common: &Common, out: &mut RunOutput, a: &NetArgs) -> Outcome {
    let spec = spec_of(a)?;
    let t = tables(common, a.size)?;
    let graph = DivisibilityGraph::new(&t, &spec)?;
    let g = GlobalMetrics::<f64>::compute(&graph)?;
    out.table("metrics", &METRIC_HEADER, [metric_row(&g)])?;
    Ok(serde_json::to_value(&g).expect("metrics serialize"))
}

fn sweep(common: &Common, out: &mut RunOutput, a: &crate::SweepArgs) -> Outcome {
    if a.min_size > a.max_size {
        return Err(divnet::Error::InvalidParameter("--min-size exceeds --max-size".into()).into());
    }
    let mut sizes = vec![a.min_size];
    while let Some(next) = sizes.last().unwrap().checked_mul(2).filter(|&s| s <= a.max_size) {
        sizes.push(next);
    }
    let specs = sizes
        .iter()
        .map(|&n| NetworkSpec::with_removed(n, a.removed.iter().copied()))
        .collect::<divnet::Result<Vec<_>>>()?;
    if a.degree_only {
        let rows: Vec<Value> = specs
            .iter()
            .map(|s| {
                json!({
                    "n": s.size(),
                    "removed": s.removed(),
                    "m": edge_count(s),
                    "avg_degree": average_degree::<f64>(s),
                    "avg_degree_asymptotic": average_degree_asymptotic::<f64>(s.size() as u64),
                })
            })
            .collect();
        let header = &METRIC_HEADER[..5];
        out.table(
            "sweep",
            header,
            specs.iter().map(|s| {
                vec![
                    s.size().into(),
                    removed_cell(s.removed()),
                    edge_count(s).into(),
                    average_degree::<f64>(s).into(),
                    average_degree_asymptotic::<f64>(s.size() as u64).into(),
                ]
            }),
        )?;
        return Ok(json!({ "rows": rows }));
    }
    let t = tables(common, *sizes.last().unwrap())?;
    let rows = specs
        .iter()
        .map(|s| {
            let graph = DivisibilityGraph::new(&t, s)?;
            GlobalMetrics::<f64>::compute(&graph)
        })
        .collect::<divnet::Result<Vec<_>>>()?;
    out.table("sweep", &METRIC_HEADER, rows.iter().map(metric_row))?;
    Ok(json!({ "rows": rows }))
}

fn profile(common: &Common, out: &mut RunOutput, a: &NetArgs) -> Outcome {
    let spec = spec_of(a)?;
    let t = tables(common, a.size)?;
    let graph = DivisibilityGraph::new(&t, &spec)?;
    match out.format() {
        Format::Csv => out.file("profile.csv", |w| {
            write_profile_csv::<f64, _>(&graph, w).map_err(|e| match e {
                divnet::Error::Io(io) => io,
                other => io::Error::other(other.to_string()),
            })
        })?,
        Format::Json => {
            let p = clustering_profile::<f64>(&graph)?;
            out.table("profile", &["index", "value"], p.iter().map(|(i, c)| vec![i.into(), c.into()]))?;
        }
    }
    let ck = clustering_degree_profile::<f64>(&graph)?;
    out.table(
        "clustering_degree",
        &["bin_lo", "bin_hi", "count", "mean_clustering", "center"],
        ck.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(b, &c)| {
            let lo = ck.bin_edges[b];
            vec![
                lo.into(),
                (ck.bin_edges[b + 1] - 1).into(),
                c.into(),
                ck.means[b].into(),
                (lo as f64 * 2f64.sqrt()).into(),
            ]
        }),
    )?;
    Ok(json!({
        "n": a.size,
        "removed": spec.removed(),
        "ws_clustering": ws_clustering::<f64>(&graph)?,
        "ck_slope_upper_two_decades": tail_slope(&ck.points(), 2.0),
    }))
}

fn diff_symmetry(common: &Common, out: &mut RunOutput, a: &NetArgs) -> Outcome {
    let spec = spec_of(a)?;
    let t = tables(common, a.size)?;
    let graph = DivisibilityGraph::new(&t, &spec)?;
    let p = clustering_profile::<f64>(&graph)?;
    let diffs = successive_differences(&p);
    let labels: Vec<u32> = p.iter().map(|(i, _)| i).collect();
    let grid = density_grid(&diffs)?;
    let phi = symmetry_quantifier(&grid);
    out.table(
        "differences",
        &["position", "label", "delta"],
        diffs.iter().enumerate().map(|(k, &d)| vec![(k + 1).into(), labels[k].into(), d.into()]),
    )?;
    let per_side = grid.y_cells_per_side as i32;
    let grid_rows = (1..=grid.x_cells).flat_map(|x| {
        let grid = &grid;
        (-per_side..=per_side)
            .filter(|&y| y != 0)
            .map(move |y| vec![x.into(), y.into(), grid.count(x, y).into(), grid.rho(x, y).into()])
    });
    out.table("grid", &["x", "y", "count", "rho"], grid_rows)?;
    out.table(
        "phi",
        &["x", "phi", "points", "axis_points"],
        (0..grid.x_cells).map(|x| {
            vec![(x + 1).into(), phi.phi[x].into(), grid.column_points[x].into(), grid.axis_counts[x].into()]
        }),
    )?;
    Ok(json!({
        "n": a.size,
        "removed": spec.removed(),
        "differences": diffs.len(),
        "axis_points": grid.axis_counts.iter().sum::<u64>(),
        "max_phi": phi.max(),
    }))
}

fn hub_removal(common: &Common, out: &mut RunOutput, a: &crate::HubArgs) -> Outcome {
    let t = tables(common, a.size)?;
    let mut hist_rows_all = Vec::new();
    let mut fit_rows = Vec::new();
    let mut fits = Vec::new();
    for hubs in 0..=HUB_SETS as u32 {
        let spec = NetworkSpec::with_removed(a.size, 1..=hubs)?;
        let graph = DivisibilityGraph::new(&t, &spec)?;
        let (degrees, isolated) = nonzero_degrees(&graph);
        let hist = log_binned_histogram::<f64>(&degrees)?;
        for mut row in hist_rows(&hist) {
            row.insert(0, hubs.into());
            hist_rows_all.push(row);
        }
        let (_, report) = fit_and_test(&degrees, &a.fit)?;
        fit_rows.push(vec![
            hubs.into(),
            report.k_min.into(),
            report.alpha.into(),
            report.ks.into(),
            report.n_tail.into(),
            report.p_value.into(),
            isolated.into(),
            edge_count(&spec).into(),
        ]);
        fits.push(
            json!({ "hubs_removed": hubs, "removed": spec.removed(), "isolated": isolated, "fit": report }),
        );
    }
    let mut header = vec!["hubs_removed"];
    header.extend(HIST_HEADER);
    out.table("hub_degree_hist", &header, hist_rows_all)?;
    out.table(
        "hub_fits",
        &["hubs_removed", "k_min", "alpha", "ks", "n_tail", "p_value", "isolated", "edges"],
        fit_rows,
    )?;
    Ok(json!({ "n": a.size, "estimator": a.fit.estimator, "min_tail": a.fit.min_tail, "sets": fits }))
}

fn band(common: &Common, out: &mut RunOutput, size: u32) -> Outcome {
    let spec = NetworkSpec::new(size)?;
    let t = tables(common, size)?;
    let graph = DivisibilityGraph::new(&t, &spec)?;
    let report = band_check(&graph)?;
    out.json("band_check.json", &report)?;
    out.table(
        "band_violations",
        &["label", "band", "value"],
        report.violations.iter().map(|v| {
            let band = match v.band {
                Band::Unit => "unit",
                Band::Zero => "zero",
            };
            vec![v.label.into(), Cell::S(band.into()), Cell::S(v.value.to_string())]
        }),
    )?;
    if !report.violations.is_empty() {
        out.json("summary.json", &report)?;
        return Err(Failure::Check(format!("{} band violations at N = {size}", report.violations.len())));
    }
    Ok(serde_json::to_value(&report).expect("report serializes"))
}

fn overlay(common: &Common, out: &mut RunOutput, a: &crate::OverlayArgs) -> Outcome {
    let size_b = match a.size_b {
        Some(b) => b,
        None => a
            .size
            .checked_mul(2)
            .ok_or_else(|| divnet::Error::InvalidParameter("twice --size overflows; pass --size-b".into()))?,
    };
    let t = tables(common, a.size.max(size_b))?;
    let (sa, sb) = (NetworkSpec::new(a.size)?, NetworkSpec::new(size_b)?);
    let (ga, gb) = (DivisibilityGraph::new(&t, &sa)?, DivisibilityGraph::new(&t, &sb)?);
    let ov = stretch_overlay::<f64>(&ga, &gb)?;
    for (stem, series) in [("overlay_a", &ov.a), ("overlay_b", &ov.b)] {
        out.table(stem, &["x", "clustering"], series.points.iter().map(|&(x, c)| vec![x.into(), c.into()]))?;
    }
    let summary = json!({ "a": sa, "b": sb, "regions": ov.regions });
    out.json("overlay.json", &summary)?;
    Ok(summary)
}
