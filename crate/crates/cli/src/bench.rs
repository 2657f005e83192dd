//! Parameter sweeps. One record per (axis value, method, trial), in grid
//! order regardless of how many workers run the cells.

use crate::args::{Axis, BenchArgs};
use crate::commands::load_points;
use crate::config::RunConfig;
use crate::report::{peak_rss_kb, timed, write_or_print, Failure, SCHEMA_VERSION};
use epsample::partition::random_probes;
use epsample::sampling::random_sample;
use epsample::{
    approx_error, build_partition, exact_error, partition_sample, plant_anomaly, sample_labeled, scan_discrepancy,
    PlantParams, Presample, SampleMethod,
};
use rayon::prelude::*;
use serde::Serialize;

/// Fast constructions are repeated until this much time has passed.
pub const MIN_TIMED_SECONDS: f64 = 0.05;

pub const CSV_COLUMNS: [&str; 20] = [
    "schema",
    "axis",
    "value",
    "method",
    "trial",
    "seed",
    "n",
    "k",
    "t",
    "b",
    "ham_t",
    "seconds",
    "peak_rss_kb",
    "error",
    "cells",
    "max_crossing",
    "imbalance",
    "leaves_per_r2",
    "discrepancy_error",
    "status",
];

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BenchMetrics {
    pub error: Option<f64>,
    pub cells: Option<usize>,
    pub max_crossing: Option<usize>,
    /// `max cell size · t / n`; at most 2 for a valid partition.
    pub imbalance: Option<f64>,
    pub leaves_per_r2: Option<f64>,
    pub discrepancy_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub schema: u32,
    pub axis: Axis,
    pub value: usize,
    pub trial: usize,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_rss_kb: Option<u64>,
    pub metrics: BenchMetrics,
    /// `ok`, or the error that stopped this cell.
    pub status: String,
    #[serde(skip)]
    pub exit_code: Option<u8>,
}

impl BenchRecord {
    fn csv_row(&self) -> Vec<String> {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map_or_else(String::new, |v| v.to_string())
        }
        let c = &self.config;
        let m = &self.metrics;
        vec![
            self.schema.to_string(),
            self.axis.name().to_string(),
            self.value.to_string(),
            c.method.to_string(),
            self.trial.to_string(),
            c.seed.to_string(),
            c.n.to_string(),
            c.k.to_string(),
            c.t.to_string(),
            opt(c.b),
            c.ham_t.to_string(),
            opt(self.seconds),
            opt(self.peak_rss_kb),
            opt(m.error),
            opt(m.cells),
            opt(m.max_crossing),
            opt(m.imbalance),
            opt(m.leaves_per_r2),
            opt(m.discrepancy_error),
            self.status.clone(),
        ]
    }
}

pub fn default_values(axis: Axis) -> Vec<usize> {
    match axis {
        Axis::Branching => vec![8, 16, 22, 32],
        Axis::InputSize => vec![25_000, 50_000, 100_000, 200_000],
        Axis::OutputSize => vec![100, 400, 1000],
        Axis::HamT => vec![5, 11, 21],
    }
}

pub fn default_methods(axis: Axis) -> Vec<SampleMethod> {
    match axis {
        Axis::Branching => vec![SampleMethod::Mat, SampleMethod::Chan],
        Axis::HamT => vec![SampleMethod::Ham, SampleMethod::DoubleHam],
        Axis::InputSize | Axis::OutputSize => SampleMethod::ALL.to_vec(),
    }
}

/// The branching factor only matters to the cutting-based builders.
fn uses_branching(m: SampleMethod) -> bool {
    matches!(m, SampleMethod::Mat | SampleMethod::Chan | SampleMethod::ChanSimple)
}

pub struct Grid {
    pub base: RunConfig,
    pub axis: Axis,
    pub cells: Vec<(usize, RunConfig, usize)>,
}

pub fn grid(args: &BenchArgs) -> Result<Grid, Failure> {
    let mut base = RunConfig::from_args("bench", &args.common)?;
    if args.trials == 0 {
        return Err(Failure::config("--trials must be positive"));
    }
    if args.jobs == 0 {
        return Err(Failure::config("--jobs must be positive"));
    }
    base.trials = args.trials;
    base.presample = Presample::Never;
    let values = args.values.clone().unwrap_or_else(|| default_values(args.axis));
    if values.is_empty() {
        return Err(Failure::config("--values is empty"));
    }
    let mut methods = match &args.methods {
        Some(ms) => ms
            .iter()
            .map(|m| m.parse::<SampleMethod>().map_err(|e| Failure::config(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?,
        None => default_methods(args.axis),
    };
    if args.axis == Axis::Branching {
        let dropped: Vec<String> = methods.iter().filter(|m| !uses_branching(**m)).map(|m| m.to_string()).collect();
        if !dropped.is_empty() {
            eprintln!("warning: the branching factor does not apply to {}; skipped", dropped.join(", "));
        }
        methods.retain(|m| uses_branching(*m));
    }
    if methods.is_empty() {
        return Err(Failure::config("no methods left to run"));
    }
    let mut cells = Vec::new();
    for &v in &values {
        for &m in &methods {
            for trial in 0..args.trials {
                let mut c = base.clone();
                c.method = m;
                c.trials = 1;
                c.seed = base.seed.wrapping_add(trial as u64);
                match args.axis {
                    Axis::Branching => c.b = Some(v),
                    Axis::InputSize => c.n = v,
                    Axis::OutputSize => {
                        c.k = v;
                        c.t = v;
                    }
                    Axis::HamT => c.ham_t = v,
                }
                cells.push((v, c, trial));
            }
        }
    }
    Ok(Grid { base, axis: args.axis, cells })
}

fn run_cell(cfg: &RunConfig, anomaly: bool) -> Result<(BenchMetrics, f64), Failure> {
    let data = load_points(cfg)?;
    let pts = &data.points;
    let tol = cfg.tolerance();
    let params = cfg.params();
    let min = if cfg.timing { MIN_TIMED_SECONDS } else { 0.0 };
    let mut m = BenchMetrics::default();
    let (sample, secs) = match cfg.method.partition_method() {
        None => timed(min, || random_sample(pts, cfg.k, &mut cfg.rng(1)))?,
        Some(pm) => {
            let ((part, sample), secs) = timed(min, || {
                let mut rng = cfg.rng(1);
                let part = build_partition(pm, pts, cfg.t, &params, &mut rng, &tol)?;
                let sample = partition_sample(&part, pts, &mut rng)?;
                Ok::<_, epsample::Error>((part, sample))
            })?;
            part.verify().map_err(|e| Failure::invariant(e.to_string()))?;
            let probes = random_probes(pts, cfg.probes, &mut cfg.rng(4), &tol);
            m.cells = Some(part.len());
            m.max_crossing = Some(part.crossing_profile(&probes, &tol).max);
            m.imbalance = Some(part.max_cell_size() as f64 * part.t as f64 / pts.len() as f64);
            (sample, secs)
        }
    };
    m.error = Some(if cfg.exact {
        exact_error(pts, &sample)?
    } else {
        approx_error(pts, &sample, cfg.budget, &mut cfg.rng(2))?
    });
    if anomaly {
        let plant = PlantParams { fraction: cfg.fraction, ..PlantParams::default() };
        let labeled = plant_anomaly(pts, &plant, &mut cfg.rng(3), &tol)?;
        let (ms, bs) = sample_labeled(&labeled, cfg.k, cfg.method, &params, &mut cfg.rng(1), &tol)?;
        let r = scan_discrepancy(&labeled, &ms, &bs, cfg.net_size, &mut cfg.rng(2), &tol)?;
        m.discrepancy_error = Some(r.discrepancy_error);
    }
    Ok((m, secs))
}

/// Runs every grid cell; failures are recorded, not propagated.
pub fn run_grid(g: &Grid, jobs: usize, anomaly: bool) -> Result<Vec<BenchRecord>, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::config(format!("cannot start {jobs} workers: {e}")))?;
    let records = pool.install(|| {
        g.cells
            .par_iter()
            .with_max_len(1)
            .map(|(value, cfg, trial)| {
                let (metrics, seconds, status, exit_code) = match run_cell(cfg, anomaly) {
                    Ok((m, s)) => (m, Some(s), "ok".to_string(), None),
                    Err(e) => (BenchMetrics::default(), None, format!("error {}: {}", e.code, e.message), Some(e.code)),
                };
                BenchRecord {
                    schema: SCHEMA_VERSION,
                    axis: g.axis,
                    value: *value,
                    trial: *trial,
                    config: cfg.clone(),
                    seconds: seconds.filter(|_| cfg.timing),
                    peak_rss_kb: if cfg.timing { peak_rss_kb() } else { None },
                    metrics,
                    status,
                    exit_code,
                }
            })
            .collect()
    });
    Ok(records)
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record(r.csv_row()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn to_json(base: &RunConfig, axis: Axis, records: &[BenchRecord]) -> String {
    let doc = serde_json::json!({
        "schema": SCHEMA_VERSION,
        "axis": axis,
        "config": base,
        "columns": CSV_COLUMNS,
        "records": records,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("records serialize");
    s.push('\n');
    s
}

pub fn bench(args: BenchArgs) -> Result<(), Failure> {
    let g = grid(&args)?;
    let records = run_grid(&g, args.jobs, args.anomaly)?;
    if let Some(out) = &g.base.out {
        write_or_print(Some(out), &to_json(&g.base, g.axis, &records))?;
    }
    if args.csv.is_some() || g.base.out.is_none() {
        write_or_print(args.csv.as_deref(), &to_csv(&records))?;
    }
    let failed: Vec<&BenchRecord> = records.iter().filter(|r| r.exit_code.is_some()).collect();
    if let Some(first) = failed.first() {
        return Err(Failure {
            code: first.exit_code.unwrap_or(4),
            message: format!("{} of {} grid cells failed; first: {}", failed.len(), records.len(), first.status),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{Cli, Command};
    use clap::Parser;

    fn bench_args(argv: &[&str]) -> BenchArgs {
        let mut full = vec!["epsample", "bench", "--no-timing"];
        full.extend_from_slice(argv);
        match Cli::parse_from(full).command {
            Command::Bench(b) => b,
            _ => unreachable!(),
        }
    }

    #[test]
    fn one_point_grid_gives_one_record() {
        let a = bench_args(&["--axis", "output_size", "--values", "20", "--methods", "ham", "--trials", "1", "--n", "500"]);
        let g = grid(&a).unwrap();
        let recs = run_grid(&g, 1, false).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].status, "ok");
        assert_eq!(recs[0].metrics.cells, Some(20));
        assert!(recs[0].seconds.is_none());
    }

    #[test]
    fn branching_sweep_keeps_only_cutting_builders() {
        let a = bench_args(&["--axis", "branching", "--methods", "random,mat,ham,chan_simple", "--trials", "2"]);
        let g = grid(&a).unwrap();
        let methods: std::collections::BTreeSet<String> = g.cells.iter().map(|c| c.1.method.to_string()).collect();
        assert_eq!(methods.into_iter().collect::<Vec<_>>(), ["chan_simple", "mat"]);
        assert_eq!(g.cells.len(), 4 * 2 * 2);
    }

    #[test]
    fn branching_sweep_without_builders_is_rejected() {
        let a = bench_args(&["--axis", "branching", "--methods", "ham"]);
        assert_eq!(grid(&a).err().unwrap().code, 2);
    }

    #[test]
    fn grid_order_is_value_method_trial() {
        let a = bench_args(&["--axis", "output_size", "--values", "10,20", "--methods", "random,ham", "--trials", "2"]);
        let g = grid(&a).unwrap();
        let keys: Vec<(usize, String, usize)> = g.cells.iter().map(|(v, c, t)| (*v, c.method.to_string(), *t)).collect();
        assert_eq!(keys[0], (10, "random".into(), 0));
        assert_eq!(keys[1], (10, "random".into(), 1));
        assert_eq!(keys[2], (10, "ham".into(), 0));
        assert_eq!(keys[7], (20, "ham".into(), 1));
        assert_eq!(g.cells[1].1.seed, g.base.seed + 1);
    }

    #[test]
    fn failing_cells_are_recorded() {
        // k larger than n is a config error for that cell only.
        let a = bench_args(&["--axis", "output_size", "--values", "10,900", "--methods", "random", "--trials", "1", "--n", "300"]);
        let recs = run_grid(&grid(&a).unwrap(), 1, false).unwrap();
        assert_eq!(recs[0].status, "ok");
        assert!(recs[1].status.starts_with("error 2"), "{}", recs[1].status);
    }

    #[test]
    fn csv_has_stable_columns() {
        let a = bench_args(&["--axis", "ham_t", "--values", "5", "--methods", "ham", "--trials", "1", "--n", "400", "--k", "16"]);
        let recs = run_grid(&grid(&a).unwrap(), 1, false).unwrap();
        let csv = to_csv(&recs);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), CSV_COLUMNS.len());
        assert_eq!(row[1], "ham_t");
        assert_eq!(row[10], "5");
    }

    #[test]
    fn parallel_workers_keep_grid_order() {
        let a = bench_args(&["--axis", "output_size", "--values", "8,16", "--methods", "random,ham", "--trials", "2", "--n", "300"]);
        let g = grid(&a).unwrap();
        let one = run_grid(&g, 1, false).unwrap();
        let two = run_grid(&g, 2, false).unwrap();
        assert_eq!(one, two);
    }
}
