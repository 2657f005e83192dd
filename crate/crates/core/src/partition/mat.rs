//! Greedy partition by repeated good-cell extraction with weight doubling.

use super::{check_t, quantile_cut, root_region, split_to_limit, Partition, PartitionCell, PartitionMethod, PartitionStats};
use crate::arrangement::CellKind;
use crate::cutting::{create_cutting_in, CuttingOptions};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::region::{Bound, Constraint, ConvexRegion};
use crate::scalar::{Scalar, Tolerance};
use crate::testset::{build_test_set, TestSetConstants, TestSetMethod};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatParams {
    pub b: usize,
    pub test_set: TestSetMethod,
    pub constants: TestSetConstants,
    pub kind: CellKind,
    /// Refine extracted cells with plain quantile splits instead of
    /// recursing with the full algorithm.
    pub fast_refine: bool,
}

impl Default for MatParams {
    fn default() -> Self {
        Self {
            b: 16,
            test_set: TestSetMethod::Lines,
            constants: TestSetConstants::default(),
            kind: CellKind::default(),
            fast_refine: false,
        }
    }
}

struct Ctx<'a, T, R: ?Sized> {
    pts: &'a [Point<T>],
    params: &'a MatParams,
    tol: &'a Tolerance<T>,
    rng: &'a mut R,
    /// Desired cell size `n/t`.
    target: f64,
    cap: usize,
    cells: Vec<PartitionCell<T>>,
    levels: usize,
}

pub fn partition_mat<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    t: usize,
    params: &MatParams,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<Partition<T>> {
    let n = pts.len();
    check_t(n, t)?;
    if params.b < 4 {
        return Err(Error::InvalidParameter(format!("branching b must be at least 4 (got {})", params.b)));
    }
    let start = Instant::now();
    let mut ctx = Ctx {
        pts,
        params,
        tol,
        rng,
        target: n as f64 / t as f64,
        cap: super::balance_limit(n, t),
        cells: Vec::new(),
        levels: 0,
    };
    node(&mut ctx, (0..n).collect(), root_region(pts), 0)?;
    Ok(Partition {
        cells: ctx.cells,
        t,
        n,
        method: PartitionMethod::Mat,
        stats: PartitionStats { seconds: start.elapsed().as_secs_f64(), levels: ctx.levels, max_crossing: None },
    })
}

fn node<T: Scalar, R: Rng + ?Sized>(
    ctx: &mut Ctx<'_, T, R>,
    ids: Vec<usize>,
    region: ConvexRegion<T>,
    depth: usize,
) -> Result<()> {
    ctx.levels = ctx.levels.max(depth + 1);
    let m = ids.len();
    if m == 0 {
        return Ok(());
    }
    let fanout = (m as f64 / ctx.target).round() as usize;
    if m <= ctx.cap && fanout <= 1 {
        ctx.cells.push(PartitionCell { region, points: ids });
        return Ok(());
    }
    let b = fanout.clamp(2, ctx.params.b);
    if b < 4 || (depth > 0 && ctx.params.fast_refine) {
        let mut parts = Vec::new();
        split_to_limit(ctx.pts, ids, region, m.div_ceil(b), 0, ctx.tol, &mut parts);
        for p in parts {
            node(ctx, p.points, p.region, depth + 1)?;
        }
        return Ok(());
    }

    let cell_size = m / b;
    let mut remaining = ids;
    let mut emitted: Vec<PartitionCell<T>> = Vec::new();
    let mut j = 0u32;
    while b as f64 / 2f64.powi(j as i32) >= 4.0 {
        let precision = b as f64 / 2f64.powi(j as i32);
        let round_floor = m as f64 / 2f64.powi(j as i32 + 1);
        if remaining.len() <= cell_size || (remaining.len() as f64) < round_floor {
            j += 1;
            continue;
        }
        let sub: Vec<Point<T>> = remaining.iter().map(|&i| ctx.pts[i]).collect();
        let mut tests = build_test_set(ctx.params.test_set, &sub, precision, &ctx.params.constants, ctx.rng, ctx.tol)?;
        let r = precision.sqrt();
        while remaining.len() > cell_size && remaining.len() as f64 >= round_floor {
            let sub: Vec<Point<T>> = remaining.iter().map(|&i| ctx.pts[i]).collect();
            let (cell_region, local) = if tests.is_empty() {
                (region.clone(), (0..sub.len()).collect::<Vec<_>>())
            } else {
                let cutting = create_cutting_in(
                    region.clone(),
                    &tests.lines,
                    r,
                    ctx.params.kind,
                    CuttingOptions::default(),
                    ctx.rng,
                    *ctx.tol,
                )?;
                let mut tree = cutting.tree;
                tree.insert_points(&sub);
                // Among cells holding more than a full cell, the one needing the
                // smallest shrink; if the cutting is too fine for any, the
                // smallest subtree that still holds a full cell.
                let by_count = |a: &usize, b: &usize| tree.count(*a).cmp(&tree.count(*b)).then(a.cmp(b));
                let chosen = tree
                    .leaves()
                    .into_iter()
                    .filter(|&v| tree.count(v) > cell_size)
                    .min_by(by_count)
                    .or_else(|| (0..tree.node_count()).filter(|&v| tree.count(v) >= cell_size).min_by(by_count))
                    .unwrap_or(tree.root());
                (tree.region(chosen).clone(), tree.subtree_points(chosen))
            };
            let local_global: Vec<usize> = local.iter().map(|&l| remaining[l]).collect();
            let (cell_region, taken) = if local_global.len() > cell_size {
                let slope = T::lit(T::STEEP_SLOPE);
                let (line, keep, _) = quantile_cut(ctx.pts, &local_global, slope, cell_size);
                (cell_region.with(Bound::new(Constraint::Above(line)), ctx.tol), keep)
            } else {
                (cell_region, local_global)
            };
            // The hull of the taken points is the tightest convex cell for them.
            let taken_pts: Vec<Point<T>> = taken.iter().map(|&i| ctx.pts[i]).collect();
            let cell_region = ConvexRegion::hull(&taken_pts, ctx.tol).intersect(&cell_region, ctx.tol);
            for h in tests.lines.iter_mut() {
                if cell_region.crosses_line(&h.line, ctx.tol) {
                    h.weight *= 2.0;
                }
            }
            remaining.retain(|i| taken.binary_search(i).is_err());
            emitted.push(PartitionCell { region: cell_region, points: taken });
        }
        j += 1;
    }

    for c in emitted {
        node(ctx, c.points, c.region, depth + 1)?;
    }
    if !remaining.is_empty() {
        node(ctx, remaining, region, depth + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize, seed: u64) -> Vec<Point<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Point::new(rng.random(), rng.random())).collect()
    }

    fn build(n: usize, t: usize, seed: u64, params: &MatParams) -> Partition<f64> {
        let pts = uniform(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        partition_mat(&pts, t, params, &mut rng, &Tolerance::default()).unwrap()
    }

    #[test]
    fn small_input_is_one_cell() {
        let part = build(10, 2, 0, &MatParams::default());
        part.verify().unwrap();
        assert!(part.len() <= 2);
        let part = build(3, 3, 0, &MatParams::default());
        part.verify().unwrap();
    }

    #[test]
    fn balanced_cover_1024() {
        let part = build(1024, 64, 1, &MatParams::default());
        part.verify().unwrap();
        assert!(part.max_cell_size() <= 32);
    }

    #[test]
    fn cells_contain_their_points() {
        let pts = uniform(2000, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tol = Tolerance::default();
        let part = partition_mat(&pts, 32, &MatParams::default(), &mut rng, &tol).unwrap();
        for c in &part.cells {
            assert!(c.points.iter().all(|&i| c.region.contains(&pts[i], &tol)));
        }
    }

    #[test]
    fn every_test_set_method_works() {
        for m in [TestSetMethod::Lines, TestSetMethod::Points, TestSetMethod::Dual] {
            let params = MatParams { test_set: m, ..Default::default() };
            build(3000, 50, 3, &params).verify().unwrap();
        }
        build(3000, 50, 3, &MatParams { fast_refine: true, ..Default::default() }).verify().unwrap();
    }

    #[test]
    fn deterministic() {
        let a = build(1500, 30, 4, &MatParams::default());
        let b = build(1500, 30, 4, &MatParams::default());
        let pa: Vec<_> = a.cells.iter().map(|c| c.points.clone()).collect();
        let pb: Vec<_> = b.cells.iter().map(|c| c.points.clone()).collect();
        assert_eq!(pa, pb);
    }

    #[test]
    fn rejects_bad_t() {
        let pts = uniform(10, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tol = Tolerance::default();
        assert!(matches!(partition_mat(&pts, 11, &MatParams::default(), &mut rng, &tol), Err(Error::InvalidT { .. })));
        assert!(matches!(partition_mat(&pts, 1, &MatParams::default(), &mut rng, &tol), Err(Error::InvalidT { .. })));
    }
}
