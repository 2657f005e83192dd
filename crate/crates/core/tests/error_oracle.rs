//! The sweep-based error evaluator against a direct all-pairs search.

use epsample::sampling::random_sample;
use epsample::{approx_error, epsilon_sample, exact_error, PartitionParams, Point64, Presample, SampleMethod, Tolerance64, WeightedSample64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lines in implicit form `u·x + v·y = c`, perturbed around every pair of
/// distinct points: shifted both ways, and turned both ways about each
/// endpoint and the midpoint. Each variant is scored on both sides.
fn brute_force(pts: &[Point64], s: &WeightedSample64) -> f64 {
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
            let base_angle = dy.atan2(dx);
            let mut variants = vec![(ux, uy, ux * px + uy * py + eps), (ux, uy, ux * px + uy * py - eps)];
            for (cx, cy) in [(px, py), (qx, qy), ((px + qx) / 2.0, (py + qy) / 2.0)] {
                for turn in [eps, -eps] {
                    let a = base_angle + turn;
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

fn uniform(n: usize, rng: &mut ChaCha8Rng) -> Vec<Point64> {
    (0..n).map(|_| Point64::new(rng.random(), rng.random())).collect()
}

#[test]
fn sweep_matches_all_pairs_search() {
    let tol = Tolerance64::default();
    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = uniform(200, &mut rng);
        let samples = [
            random_sample(&pts, 20, &mut rng).unwrap(),
            epsilon_sample(&pts, 20, SampleMethod::Ham, &PartitionParams::default(), Presample::Never, &mut rng, &tol)
                .unwrap(),
        ];
        for s in &samples {
            let sweep = exact_error(&pts, s).unwrap();
            let brute = brute_force(&pts, s);
            assert!((sweep - brute).abs() <= 1e-12, "seed {seed}: sweep {sweep} brute {brute}");
        }
    }
}

#[test]
fn sweep_matches_on_off_grid_samples() {
    // Sample points that are not input points, on a coarse grid with many
    // collinear triples among the sample.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pts = uniform(120, &mut rng);
    let grid: Vec<Point64> = (0..16).map(|i| Point64::new((i % 4) as f64 / 3.0, (i / 4) as f64 / 3.0)).collect();
    let s = WeightedSample64 {
        points: grid,
        weights: vec![1.0 / 16.0; 16],
        indices: (0..16).collect(),
        method: SampleMethod::Random,
        k: 16,
    };
    let sweep = exact_error(&pts, &s).unwrap();
    let brute = brute_force(&pts, &s);
    // The perturbed search can only see subsets the sweep also sees.
    assert!(brute <= sweep + 1e-12, "sweep {sweep} brute {brute}");
    assert!(sweep - brute <= 1e-12, "sweep {sweep} brute {brute}");
}

#[test]
fn approx_tracks_exact_at_budget_200() {
    let mut gaps = Vec::new();
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let pts = uniform(500, &mut rng);
        let s = random_sample(&pts, 50, &mut rng).unwrap();
        let exact = exact_error(&pts, &s).unwrap();
        let approx = approx_error(&pts, &s, 200, &mut rng).unwrap();
        assert!(approx <= exact + 1e-15);
        gaps.push(exact - approx);
    }
    gaps.sort_by(f64::total_cmp);
    let median = (gaps[4] + gaps[5]) / 2.0;
    assert!(median <= 0.005, "median gap {median}");
}
