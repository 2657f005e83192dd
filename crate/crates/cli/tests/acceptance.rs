//! Acceptance suite: one PASS/FAIL line per criterion, run in order so the
//! timing checks do not compete for the CPU. Exits non-zero if any fails.

use epsample::data::{generate, random_lines, Generator};
use epsample::partition::random_probes;
use epsample::sampling::random_sample;
use epsample::{
    approx_error, build_partition, create_cutting, epsilon_sample, exact_error, k_for_epsilon, plant_anomaly,
    sample_labeled, scan_discrepancy, CellKind, PartitionMethod, PartitionParams, PlantParams, Point64, Presample,
    SampleMethod, Tolerance64, WeightedSample64,
};
use epsample_cli::report::timed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 0 {
        (s[m - 1] + s[m]) / 2.0
    } else {
        s[m]
    }
}

fn uniform(n: usize, seed: u64) -> Vec<Point64> {
    generate(Generator::Uniform, n, &mut rng(seed))
}

fn clusters(n: usize, seed: u64) -> Vec<Point64> {
    generate(Generator::Clusters { count: 20, sigma: 0.02 }, n, &mut rng(seed))
}

fn sample(pts: &[Point64], k: usize, m: SampleMethod, seed: u64) -> WeightedSample64 {
    let tol = Tolerance64::default();
    epsilon_sample(pts, k, m, &PartitionParams::default(), Presample::Never, &mut rng(seed), &tol).unwrap()
}

fn c1_cutting_guarantee() -> Outcome {
    let tol = Tolerance64::default();
    let start = Instant::now();
    let (mut checked, mut violations) = (0, 0);
    for kind in [CellKind::default(), CellKind::Trapezoid] {
        for (i, r) in [2.0, 4.0, 8.0, 16.0].into_iter().enumerate() {
            let lines = random_lines(500, &mut rng(10 + i as u64));
            let cut = create_cutting(&lines, r, kind, i as u64, tol).unwrap();
            for leaf in cut.tree.leaves() {
                checked += 1;
                if cut.crossing_weight_brute_force(leaf) > cut.threshold() {
                    violations += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        violations == 0 && secs < 30.0,
        format!("{checked} leaves over 8 cuttings, {violations} violations, {secs:.1} s (limit 30 s)"),
    )
}

fn c2_cutting_constant() -> Outcome {
    let tol = Tolerance64::default();
    let mut parts = Vec::new();
    let mut pass = true;
    for (kind, bound) in [(CellKind::default(), 10.0), (CellKind::Trapezoid, 14.0)] {
        let v: Vec<f64> = (0..10u64)
            .map(|seed| {
                let lines = random_lines(1000, &mut rng(seed));
                create_cutting(&lines, 8.0, kind, seed, tol).unwrap().leaves_per_r2()
            })
            .collect();
        let m = median(&v);
        pass &= m <= bound;
        parts.push(format!("{} median leaves/r^2 {m:.3} (limit {bound})", kind.label()));
    }
    outcome(pass, parts.join("; "))
}

fn c3_small_cutting() -> Outcome {
    let tol = Tolerance64::default();
    let lines = random_lines(25, &mut rng(25));
    let cut = create_cutting(&lines, 5.0, CellKind::default(), 25, tol).unwrap();
    let leaves = cut.tree.leaves();
    let worst = leaves.iter().map(|&l| cut.crossing_weight_brute_force(l)).fold(0.0, f64::max);
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("cutting.svg");
    let status = Command::new(env!("CARGO_BIN_EXE_epsample"))
        .args(["render", "--what", "cutting", "--n", "25", "--r", "5", "--no-timing", "--svg"])
        .arg(&svg)
        .output()
        .unwrap();
    let text = std::fs::read_to_string(&svg).unwrap_or_default();
    let polygons = text.matches("<polygon").count();
    let rendered = status.status.success() && text.starts_with("<svg") && text.trim_end().ends_with("</svg>");
    outcome(
        worst <= 5.0 && rendered && polygons > 0,
        format!("{} cells, most crossed by {worst} lines (limit 5), svg with {polygons} polygons", leaves.len()),
    )
}

fn c4_partition_balance() -> Outcome {
    let tol = Tolerance64::default();
    let (n, t) = (10_000, 64);
    let pts = uniform(n, 4);
    let mut parts = Vec::new();
    let mut total_violations = 0;
    for m in PartitionMethod::ALL {
        let part = build_partition(m, &pts, t, &PartitionParams::default(), &mut rng(4), &tol).unwrap();
        let mut owner = vec![0usize; n];
        let mut violations = 0;
        for c in &part.cells {
            if c.points.len() * t > 2 * n {
                violations += 1;
            }
            for &i in &c.points {
                owner[i] += 1;
                if !c.region.contains(&pts[i], &tol) {
                    violations += 1;
                }
            }
        }
        violations += owner.iter().filter(|&&o| o != 1).count();
        violations += part.verify().is_err() as usize;
        total_violations += violations;
        parts.push(format!("{m} {} cells max {}", part.len(), part.max_cell_size()));
    }
    outcome(
        total_violations == 0,
        format!("{total_violations} violations (limit {} points per cell); {}", 2 * n / t, parts.join(", ")),
    )
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(xy: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = xy.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn c5_crossing_exponent() -> Outcome {
    let tol = Tolerance64::default();
    let bounds = [
        (PartitionMethod::Mat, 0.62),
        (PartitionMethod::Chan, 0.62),
        (PartitionMethod::Ham, 0.85),
        (PartitionMethod::DoubleHam, 0.80),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (m, bound) in bounds {
        let mut xy = Vec::new();
        for seed in 0..5u64 {
            let pts = uniform(10_000, 50 + seed);
            let probes = random_probes(&pts, 200, &mut rng(500 + seed), &tol);
            for t in [16usize, 64, 256] {
                let part = build_partition(m, &pts, t, &PartitionParams::default(), &mut rng(seed), &tol).unwrap();
                xy.push((t as f64, part.crossing_profile(&probes, &tol).max as f64));
            }
        }
        let z = loglog_slope(&xy);
        pass &= z <= bound;
        parts.push(format!("{m} {z:.3} (limit {bound})"));
    }
    outcome(pass, format!("fitted exponents: {}", parts.join(", ")))
}

/// Perturbed lines around every pair of charged points, both sides scored.
fn brute_force_error(pts: &[Point64], s: &WeightedSample64) -> f64 {
    let n = pts.len() as f64;
    let mut charged: Vec<(f64, f64, f64)> = pts.iter().map(|p| (p.x, p.y, 1.0 / n)).collect();
    charged.extend(s.points.iter().zip(&s.weights).map(|(p, &w)| (p.x, p.y, -w)));
    let total: f64 = charged.iter().map(|c| c.2).sum();
    let eps = 1e-10;
    let mut best = 0.0f64;
    for i in 0..charged.len() {
        for j in i + 1..charged.len() {
            let (px, py, _) = charged[i];
            let (qx, qy, _) = charged[j];
            let (dx, dy) = (qx - px, qy - py);
            let len = dx.hypot(dy);
            if len == 0.0 {
                continue;
            }
            let (ux, uy) = (-dy / len, dx / len);
            let base = dy.atan2(dx);
            let mut variants = vec![(ux, uy, ux * px + uy * py + eps), (ux, uy, ux * px + uy * py - eps)];
            for (cx, cy) in [(px, py), (qx, qy), ((px + qx) / 2.0, (py + qy) / 2.0)] {
                for turn in [eps, -eps] {
                    let a = base + turn;
                    let (nx, ny) = (-a.sin(), a.cos());
                    variants.push((nx, ny, nx * cx + ny * cy));
                }
            }
            for (nx, ny, c) in variants {
                let side: f64 = charged.iter().filter(|q| nx * q.0 + ny * q.1 > c).map(|q| q.2).sum();
                best = best.max(side.abs()).max((total - side).abs());
            }
        }
    }
    best
}

fn c6_oracle_agreement() -> Outcome {
    let mut gaps = Vec::new();
    for seed in 0..10u64 {
        let pts = uniform(500, 600 + seed);
        let s = random_sample(&pts, 50, &mut rng(seed)).unwrap();
        let exact = exact_error(&pts, &s).unwrap();
        let approx = approx_error(&pts, &s, 200, &mut rng(seed)).unwrap();
        gaps.push((exact - approx).abs());
    }
    let gap = median(&gaps);
    let mut worst = 0.0f64;
    for seed in 0..3u64 {
        let pts = uniform(200, 700 + seed);
        for m in [SampleMethod::Random, SampleMethod::Ham] {
            let s = sample(&pts, 20, m, seed);
            worst = worst.max((exact_error(&pts, &s).unwrap() - brute_force_error(&pts, &s)).abs());
        }
    }
    outcome(
        gap <= 0.005 && worst <= 1e-12,
        format!("median |exact - approx| {gap:.5} (limit 0.005); max |exact - brute force| {worst:.1e} (limit 1e-12)"),
    )
}

fn c7_error_advantage() -> Outcome {
    let (mut ham, mut random, mut builds) = (Vec::new(), Vec::new(), Vec::new());
    for seed in 0..10u64 {
        let pts = clusters(100_000, 70 + seed);
        let start = Instant::now();
        let h = sample(&pts, 1000, SampleMethod::Ham, seed);
        builds.push(start.elapsed().as_secs_f64());
        let r = sample(&pts, 1000, SampleMethod::Random, seed);
        ham.push(approx_error(&pts, &h, 200, &mut rng(900 + seed)).unwrap());
        random.push(approx_error(&pts, &r, 200, &mut rng(900 + seed)).unwrap());
    }
    let (mh, mr) = (median(&ham), median(&random));
    let slowest = builds.iter().cloned().fold(0.0, f64::max);
    outcome(
        mh <= 0.6 * mr && slowest <= 60.0,
        format!(
            "median error ham {mh:.4} vs random {mr:.4}, ratio {:.2} (limit 0.6); slowest ham build {slowest:.2} s (limit 60 s)",
            mh / mr
        ),
    )
}

fn c8_linear_scaling() -> Outcome {
    let tol = Tolerance64::default();
    let params = PartitionParams::default();
    let small = uniform(100_000, 8);
    let large = uniform(200_000, 8);
    let mut parts = Vec::new();
    let mut pass = true;
    for m in SampleMethod::ALL {
        let (mut ts, mut tl) = (Vec::new(), Vec::new());
        for trial in 0..3u64 {
            for (pts, out) in [(&small, &mut ts), (&large, &mut tl)] {
                let (_, secs) =
                    timed(0.05, || epsilon_sample(pts, 1000, m, &params, Presample::Never, &mut rng(trial), &tol)).unwrap();
                out.push(secs);
            }
        }
        let ratio = median(&tl) / median(&ts);
        pass &= ratio <= 2.6;
        parts.push(format!("{m} {ratio:.2}"));
    }
    outcome(pass, format!("time(2e5)/time(1e5): {} (limit 2.6)", parts.join(", ")))
}

fn c9_output_size() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for m in SampleMethod::ALL {
        let (mut e100, mut e1000) = (Vec::new(), Vec::new());
        for seed in 0..10u64 {
            let pts = uniform(10_000, 90 + seed);
            for (k, out) in [(100, &mut e100), (1000, &mut e1000)] {
                let s = sample(&pts, k, m, seed);
                out.push(approx_error(&pts, &s, 200, &mut rng(seed)).unwrap());
            }
        }
        let (a, b) = (median(&e100), median(&e1000));
        pass &= b < a;
        parts.push(format!("{m} {a:.4} -> {b:.4}"));
    }
    outcome(pass, format!("median error k=100 -> k=1000: {}", parts.join(", ")))
}

/// Discrepancy error and seconds (sampling plus scan) per seed.
fn anomaly_runs(method: SampleMethod, k: usize) -> (Vec<f64>, Vec<f64>) {
    let tol = Tolerance64::default();
    let (mut errs, mut secs) = (Vec::new(), Vec::new());
    for seed in 0..10u64 {
        let pts = clusters(100_000, 100 + seed);
        let l = plant_anomaly(&pts, &PlantParams::default(), &mut rng(seed), &tol).unwrap();
        let start = Instant::now();
        let (m, b) = sample_labeled(&l, k, method, &PartitionParams::default(), &mut rng(seed), &tol).unwrap();
        let r = scan_discrepancy(&l, &m, &b, 400, &mut rng(seed), &tol).unwrap();
        secs.push(start.elapsed().as_secs_f64());
        errs.push(r.discrepancy_error);
    }
    (errs, secs)
}

fn c10_anomaly() -> Outcome {
    let (he, hs) = anomaly_runs(SampleMethod::Ham, 2000);
    let (ham_err, ham_secs) = (median(&he), median(&hs));
    let mut ladder = Vec::new();
    let mut matched = None;
    for k in [2000, 4000, 8000, 16000, 32000] {
        let (re, rs) = anomaly_runs(SampleMethod::Random, k);
        let (e, s) = (median(&re), median(&rs));
        ladder.push(format!("k={k} {e:.4} in {s:.2} s"));
        if e <= ham_err {
            matched = Some((k, s));
            break;
        }
    }
    let faster = match matched {
        Some((_, s)) => ham_secs < s,
        // Random never got there within the ladder.
        None => true,
    };
    let reach = match matched {
        Some((k, s)) => format!("random reaches it at k={k} in {s:.2} s"),
        None => "random does not reach it up to k=32000".to_string(),
    };
    outcome(
        ham_err <= 0.01 && faster,
        format!(
            "ham k=2000 median discrepancy error {ham_err:.4} (limit 0.01) in {ham_secs:.2} s; {reach}; random ladder: {}",
            ladder.join(", ")
        ),
    )
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("r.svg");
    let bench_out = dir.path().join("bench.json");
    let small = ["--n", "3000", "--k", "40", "--no-timing"];
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("cutting", vec!["cutting", "--n", "200", "--r", "6", "--no-timing"].into_iter().map(String::from).collect()),
        ("partition", [&["partition", "--method", "mat", "--t", "32", "--full"][..], &small].concat().iter().map(|s| s.to_string()).collect()),
        ("sample", [&["sample", "--method", "double_ham"][..], &small].concat().iter().map(|s| s.to_string()).collect()),
        ("evaluate", [&["evaluate", "--method", "chan", "--exact"][..], &small].concat().iter().map(|s| s.to_string()).collect()),
        ("anomaly", [&["anomaly", "--method", "ham", "--net-size", "50"][..], &small].concat().iter().map(|s| s.to_string()).collect()),
        (
            "bench",
            ["bench", "--axis", "output_size", "--values", "20,40", "--methods", "random,ham,chan_simple", "--trials", "2", "--n", "2000", "--no-timing", "--out"]
                .iter()
                .map(|s| s.to_string())
                .chain([bench_out.display().to_string()])
                .collect(),
        ),
        (
            "render",
            ["render", "--what", "partition", "--method", "ham", "--n", "3000", "--t", "32", "--no-timing", "--svg"]
                .iter()
                .map(|s| s.to_string())
                .chain([svg.display().to_string()])
                .collect(),
        ),
    ];
    let mut failed = Vec::new();
    for (name, argv) in &runs {
        let once = || {
            let out = Command::new(env!("CARGO_BIN_EXE_epsample")).args(argv).output().unwrap();
            let file = match *name {
                "bench" => std::fs::read(&bench_out).unwrap_or_default(),
                "render" => std::fs::read(&svg).unwrap_or_default(),
                _ => Vec::new(),
            };
            (out.status.success(), out.stdout, file)
        };
        let (a, b) = (once(), once());
        let produced = match *name {
            "bench" | "render" => !a.2.is_empty(),
            _ => !a.1.is_empty(),
        };
        if !a.0 || !b.0 || !produced || a != b {
            failed.push(*name);
        }
    }
    outcome(
        failed.is_empty(),
        format!("{} subcommands run twice, differing or failing: {:?}", runs.len(), failed),
    )
}

fn c12_size_law() -> Outcome {
    // 0.1: 10^(4/3)·ln(10)^(2/3) = 21.544·1.7437 = 37.567
    // 0.01: 100^(4/3)·ln(100)^(2/3) = 464.16·2.7680 = 1284.78
    let (a, b) = (k_for_epsilon(0.1, 1.0).unwrap(), k_for_epsilon(0.01, 1.0).unwrap());
    outcome(a == 38 && b == 1285, format!("k(0.1) = {a} (expect 38), k(0.01) = {b} (expect 1285)"))
}

fn main() {
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "cutting guarantee", c1_cutting_guarantee),
        (2, "cutting constant", c2_cutting_constant),
        (3, "25-line cutting", c3_small_cutting),
        (4, "partition balance", c4_partition_balance),
        (5, "crossing exponent", c5_crossing_exponent),
        (6, "oracle agreement", c6_oracle_agreement),
        (7, "error advantage", c7_error_advantage),
        (8, "linear input scaling", c8_linear_scaling),
        (9, "output-size monotonicity", c9_output_size),
        (10, "anomaly detection", c10_anomaly),
        (11, "determinism", c11_determinism),
        (12, "size law", c12_size_law),
    ];
    let mut failures = Vec::new();
    for (id, name, run) in criteria {
        let skip = match filter.as_deref() {
            None => false,
            Some(f) if f.parse::<u32>().is_ok() => f != id.to_string(),
            Some(f) => !name.contains(f),
        };
        if skip {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {id:>2} {name}: {} [{:.1} s]", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failures.push(id);
        }
    }
    if !failures.is_empty() {
        println!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
