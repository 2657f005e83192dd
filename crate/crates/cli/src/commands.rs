//! The single-run subcommands.

use crate::args::RenderWhat;
use crate::config::{RunConfig, Source};
use crate::report::{strip_seconds, timed, Failure, Report};
use epsample::data::{generate, ingest_csv, random_lines, Column};
use epsample::partition::random_probes;
use epsample::{
    approx_error, build_partition, create_cutting_in, epsilon_sample, exact_error, plant_anomaly, sample_labeled,
    scan_discrepancy, ConvexRegion, Cutting, CuttingOptions, HalfPlane, Partition64, PartitionMethod, PlantParams,
    Point64, WeightedSample64,
};
use serde_json::{json, Value};

pub struct Loaded {
    pub points: Vec<Point64>,
    pub info: Value,
}

pub fn load_points(cfg: &RunConfig) -> Result<Loaded, Failure> {
    match &cfg.data {
        Source::Generator { generator } => {
            let points = generate(*generator, cfg.n, &mut cfg.rng(0));
            Ok(Loaded { info: json!({ "points": points.len() }), points })
        }
        Source::Csv { input, x_col, y_col } => {
            let ing = ingest_csv::<f64, _>(input, &Column::from(x_col.as_str()), &Column::from(y_col.as_str()), &[], &mut cfg.rng(0))?;
            if ing.bad_rows > 0 {
                eprintln!("warning: skipped {} malformed of {} rows", ing.bad_rows, ing.total_rows);
            }
            let info = json!({
                "points": ing.points.len(),
                "rows": ing.total_rows,
                "bad_rows": ing.bad_rows,
                "rotation": ing.rotation,
            });
            Ok(Loaded { points: ing.points, info })
        }
    }
}

fn partition_method(cfg: &RunConfig) -> Result<PartitionMethod, Failure> {
    cfg.method
        .partition_method()
        .ok_or_else(|| Failure::config(format!("{} needs a partition method, not '{}'", cfg.command, cfg.method)))
}

/// `[x0, x1, y0, y1]` around the points with a 2% margin.
fn point_view(pts: &[Point64]) -> [f64; 4] {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let pad = 0.02 * (x1 - x0).max(y1 - y0).max(1e-9);
    [x0 - pad, x1 + pad, y0 - pad, y1 + pad]
}

/// The middle 96% of pairwise line intersections, padded, or a fixed box
/// for large inputs.
fn cutting_view(cut: &Cutting<f64>) -> [f64; 4] {
    let lines = cut.tree.lines();
    if lines.len() > 400 || lines.len() < 2 {
        return [-4.0, 4.0, -4.0, 4.0];
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, l) in lines.iter().enumerate() {
        for m in &lines[i + 1..] {
            if l.a != m.a {
                let x = (m.b - l.b) / (l.a - m.a);
                xs.push(x);
                ys.push(l.a * x + l.b);
            }
        }
    }
    if xs.is_empty() {
        return [-4.0, 4.0, -4.0, 4.0];
    }
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let q = |v: &[f64], f: f64| v[((v.len() - 1) as f64 * f).round() as usize];
    let (x0, x1, y0, y1) = (q(&xs, 0.02), q(&xs, 0.98), q(&ys, 0.02), q(&ys, 0.98));
    let (px, py) = (0.1 * (x1 - x0).max(1e-6), 0.1 * (y1 - y0).max(1e-6));
    [x0 - px, x1 + px, y0 - py, y1 + py]
}

fn build_cutting(cfg: &RunConfig) -> Result<Cutting<f64>, Failure> {
    let lines = random_lines(cfg.n, &mut cfg.rng(0));
    let opts = CuttingOptions::default();
    Ok(create_cutting_in(ConvexRegion::whole_plane(), &lines, cfg.r, cfg.cell_kind(), opts, &mut cfg.rng(1), cfg.tolerance())?)
}

fn build(cfg: &RunConfig, pts: &[Point64]) -> Result<Partition64, Failure> {
    let method = partition_method(cfg)?;
    Ok(build_partition(method, pts, cfg.t, &cfg.params(), &mut cfg.rng(1), &cfg.tolerance())?)
}

fn write_svg(cfg: &RunConfig, svg: &str) -> Result<(), Failure> {
    match &cfg.svg {
        Some(p) => std::fs::write(p, svg).map_err(|e| Failure::data(format!("cannot write {}: {e}", p.display()))),
        None => Ok(()),
    }
}

pub fn cutting(cfg: RunConfig) -> Result<(), Failure> {
    let cut = build_cutting(&cfg)?;
    let threshold = cut.threshold();
    let leaves = cut.tree.leaves();
    let violations = leaves
        .iter()
        .filter(|&&leaf| cut.crossing_weight_brute_force(leaf) > threshold * (1.0 + 1e-9))
        .count();
    let m = cut.metrics();
    let mut metrics = json!({
        "lines": m.n_lines,
        "r": m.r,
        "kind": m.kind,
        "leaves": m.leaves,
        "leaves_per_r2": m.leaves_per_r2,
        "threshold": threshold,
        "max_crossing_weight": m.max_crossing_weight,
        "violations": violations,
    });
    if cfg.full {
        metrics["cells"] = json!(cut.tree.cells_dump());
    }
    write_svg(&cfg, &cut.tree.to_svg(cutting_view(&cut), cfg.n <= 1000, false))?;
    Report::new(cfg, metrics, cut.seconds).emit()?;
    if violations > 0 {
        return Err(Failure::invariant(format!("{violations} leaves exceed the crossing threshold {threshold}")));
    }
    Ok(())
}

pub fn partition(cfg: RunConfig) -> Result<(), Failure> {
    let data = load_points(&cfg)?;
    let pts = &data.points;
    let tol = cfg.tolerance();
    let mut part = build(&cfg, pts)?;
    part.verify().map_err(|e| Failure::invariant(e.to_string()))?;
    let probes = random_probes(pts, cfg.probes, &mut cfg.rng(2), &tol);
    let profile = part.record_crossing(&probes, &tol);
    let max_cell = part.max_cell_size();
    let mut metrics = json!({
        "data": data.info,
        "method": part.method,
        "t": part.t,
        "cells": part.len(),
        "max_cell": max_cell,
        "balance_limit": part.balance_limit(),
        "imbalance": max_cell as f64 * part.t as f64 / pts.len() as f64,
        "levels": part.stats.levels,
        "probes": probes.len(),
        "max_crossing": profile.max,
        "mean_crossing": profile.mean,
    });
    if cfg.full {
        let mut structure = part.to_json(&tol);
        if !cfg.timing {
            strip_seconds(&mut structure);
        }
        metrics["partition"] = structure;
    }
    write_svg(&cfg, &part.to_svg(pts, point_view(pts), pts.len() <= 20_000, &tol))?;
    let secs = part.stats.seconds;
    Report::new(cfg, metrics, secs).emit()
}

fn draw_sample(cfg: &RunConfig, pts: &[Point64]) -> Result<(WeightedSample64, f64), Failure> {
    let tol = cfg.tolerance();
    let params = cfg.params();
    let (s, secs) = timed(0.0, || epsilon_sample(pts, cfg.k, cfg.method, &params, cfg.presample, &mut cfg.rng(1), &tol))?;
    Ok((s, secs))
}

fn sample_summary(s: &WeightedSample64) -> Value {
    json!({ "method": s.method, "k": s.k, "size": s.len(), "total_weight": s.total_weight() })
}

pub fn sample(cfg: RunConfig) -> Result<(), Failure> {
    let data = load_points(&cfg)?;
    let (s, secs) = draw_sample(&cfg, &data.points)?;
    let points: Vec<Value> =
        s.indices.iter().zip(&s.points).zip(&s.weights).map(|((i, p), w)| json!([i, p.x, p.y, w])).collect();
    let mut metrics = sample_summary(&s);
    metrics["data"] = data.info;
    metrics["columns"] = json!(["index", "x", "y", "weight"]);
    metrics["sample"] = Value::Array(points);
    Report::new(cfg, metrics, secs).emit()
}

pub fn evaluate(cfg: RunConfig) -> Result<(), Failure> {
    let data = load_points(&cfg)?;
    let (s, secs) = draw_sample(&cfg, &data.points)?;
    let error = if cfg.exact {
        exact_error(&data.points, &s)?
    } else {
        approx_error(&data.points, &s, cfg.budget, &mut cfg.rng(2))?
    };
    let mut metrics = sample_summary(&s);
    metrics["data"] = data.info;
    metrics["evaluator"] = json!(if cfg.exact { "exact" } else { "approx" });
    metrics["error"] = json!(error);
    Report::new(cfg, metrics, secs).emit()
}

fn halfplane_json(h: &HalfPlane<f64>) -> Value {
    json!({ "a": h.line.a, "b": h.line.b, "above": h.above })
}

pub fn anomaly(cfg: RunConfig) -> Result<(), Failure> {
    let data = load_points(&cfg)?;
    let tol = cfg.tolerance();
    let params = PlantParams { fraction: cfg.fraction, ..PlantParams::default() };
    let labeled = plant_anomaly(&data.points, &params, &mut cfg.rng(3), &tol)?;
    let part_params = cfg.params();
    let ((m, b), secs) =
        timed(0.0, || sample_labeled(&labeled, cfg.k, cfg.method, &part_params, &mut cfg.rng(1), &tol))?;
    let r = scan_discrepancy(&labeled, &m, &b, cfg.net_size, &mut cfg.rng(2), &tol)?;
    let metrics = json!({
        "data": data.info,
        "plant": params,
        "measured": labeled.measured.iter().filter(|&&f| f).count(),
        "baseline": labeled.baseline.iter().filter(|&&f| f).count(),
        "sample_sizes": [m.len(), b.len()],
        "planted": halfplane_json(&labeled.planted),
        "best": halfplane_json(&r.best),
        "candidates": r.candidates,
        "phi": r.phi,
        "phi_sample": r.phi_sample,
        "phi_planted": r.phi_planted,
        "discrepancy_error": r.discrepancy_error,
    });
    Report::new(cfg, metrics, secs).emit()
}

pub fn render(cfg: RunConfig, what: RenderWhat) -> Result<(), Failure> {
    if cfg.svg.is_none() {
        return Err(Failure::config("render needs --svg"));
    }
    let (svg, cells, secs) = match what {
        RenderWhat::Cutting => {
            let cut = build_cutting(&cfg)?;
            (cut.tree.to_svg(cutting_view(&cut), cfg.n <= 1000, false), cut.leaf_count(), cut.seconds)
        }
        RenderWhat::Partition => {
            let data = load_points(&cfg)?;
            let part = build(&cfg, &data.points)?;
            let svg = part.to_svg(&data.points, point_view(&data.points), data.points.len() <= 20_000, &cfg.tolerance());
            (svg, part.len(), part.stats.seconds)
        }
    };
    write_svg(&cfg, &svg)?;
    let metrics = json!({
        "what": what,
        "cells": cells,
        "polygons": svg.matches("<polygon").count(),
        "bytes": svg.len(),
    });
    Report::new(cfg, metrics, secs).emit()
}
