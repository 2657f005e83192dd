//! Level-by-level partition refinement with multiplicative test-line weights.

use super::{check_t, root_region, split_to_limit, Partition, PartitionCell, PartitionMethod, PartitionStats};
use crate::arrangement::CellKind;
use crate::cutting::{create_cutting_in, CuttingOptions, WeightedLine};
use crate::error::{Error, Result};
use crate::geometry::{dualize_segment, DoubleWedge, Line, Point};
use crate::region::{ConvexRegion, Edge};
use crate::scalar::{Scalar, Tolerance};
use crate::testset::{build_test_set, TestSet, TestSetConstants, TestSetMethod};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChanParams {
    pub b: usize,
    /// Use the whole test set and reweight over every new cell.
    pub simple: bool,
    /// Cell sampling rate for reweighting; derived per level when `None`.
    pub p: Option<f64>,
    /// Test-line sampling rate; derived per level when `None`.
    pub q: Option<f64>,
    pub kind: CellKind,
    pub test_set: TestSetMethod,
    pub constants: TestSetConstants,
}

impl Default for ChanParams {
    fn default() -> Self {
        Self {
            b: 22,
            simple: false,
            p: None,
            q: None,
            kind: CellKind::default(),
            test_set: TestSetMethod::Dual,
            constants: TestSetConstants::default(),
        }
    }
}

impl ChanParams {
    fn validate(&self) -> Result<()> {
        if self.b < 2 {
            return Err(Error::InvalidParameter(format!("branching b must be at least 2 (got {})", self.b)));
        }
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if let Some(v) = v {
                if !(v > 0.0 && v <= 1.0) {
                    return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1] (got {v})")));
                }
            }
        }
        Ok(())
    }
}

/// Running cutting-size statistic used to pick `r` for each cell.
const PRIOR_LEAVES_PER_R2: f64 = 7.3;

pub struct ChanBuilder<'a, T> {
    pts: &'a [Point<T>],
    t: usize,
    params: ChanParams,
    tol: Tolerance<T>,
    target: f64,
    cap: usize,
    tests: TestSet<T>,
    cells: Vec<PartitionCell<T>>,
    levels: usize,
    leaves_seen: f64,
    r2_seen: f64,
    /// Per test line, the number of cells it was charged for in the last level.
    pub last_crossings: Vec<u32>,
}

impl<'a, T: Scalar> ChanBuilder<'a, T> {
    pub fn new<R: Rng + ?Sized>(
        pts: &'a [Point<T>],
        t: usize,
        params: &ChanParams,
        rng: &mut R,
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        check_t(pts.len(), t)?;
        params.validate()?;
        let tests = build_test_set(params.test_set, pts, t as f64, &params.constants, rng, tol)?;
        let n_tests = tests.len();
        Ok(Self {
            pts,
            t,
            params: params.clone(),
            tol: *tol,
            target: pts.len() as f64 / t as f64,
            cap: super::balance_limit(pts.len(), t),
            tests,
            cells: vec![PartitionCell { region: root_region(pts), points: (0..pts.len()).collect() }],
            levels: 0,
            leaves_seen: 0.0,
            r2_seen: 0.0,
            last_crossings: vec![0; n_tests],
        })
    }

    pub fn cells(&self) -> &[PartitionCell<T>] {
        &self.cells
    }

    pub fn weights(&self) -> Vec<f64> {
        self.tests.lines.iter().map(|l| l.weight).collect()
    }

    pub fn test_lines(&self) -> &[WeightedLine<T>] {
        &self.tests.lines
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    fn is_active(&self, c: &PartitionCell<T>) -> bool {
        let m = c.points.len();
        m > self.cap || (m as f64 / self.target).round() >= 2.0
    }

    fn leaves_per_r2(&self) -> f64 {
        if self.r2_seen > 0.0 {
            self.leaves_seen / self.r2_seen
        } else {
            PRIOR_LEAVES_PER_R2
        }
    }

    /// Refines every oversized cell once. Returns `false` when nothing was left to do.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<bool> {
        let active: Vec<usize> = (0..self.cells.len()).filter(|&i| self.is_active(&self.cells[i])).collect();
        if active.is_empty() {
            return Ok(false);
        }
        self.tests.reset_weights();
        self.last_crossings.iter_mut().for_each(|c| *c = 0);
        let n_cells = self.cells.len() as f64;
        let n = self.pts.len() as f64;
        let b = self.params.b as f64;
        let (p, q) = if self.params.simple {
            (1.0, 1.0)
        } else {
            let expected_l = (b * n_cells).sqrt().max(4.0);
            let q = self.params.q.unwrap_or((expected_l / self.tests.len().max(1) as f64).min(1.0));
            let p = self.params.p.unwrap_or(((b / n_cells).sqrt() * n.ln()).min(1.0));
            (p, q)
        };

        let mut order = active.clone();
        order.shuffle(rng);
        let mut replaced: Vec<Option<Vec<PartitionCell<T>>>> = vec![None; self.cells.len()];
        for i in order {
            let children = self.refine(&self.cells[i].clone(), q, rng)?;
            for c in &children {
                if p >= 1.0 || rng.random::<f64>() < p {
                    self.charge(&c.region);
                }
            }
            replaced[i] = Some(children);
        }
        let old = std::mem::take(&mut self.cells);
        for (cell, rep) in old.into_iter().zip(replaced) {
            match rep {
                Some(children) => self.cells.extend(children),
                None => self.cells.push(cell),
            }
        }
        self.levels += 1;
        Ok(true)
    }

    fn refine<R: Rng + ?Sized>(&mut self, cell: &PartitionCell<T>, q: f64, rng: &mut R) -> Result<Vec<PartitionCell<T>>> {
        let m = cell.points.len();
        let fanout = ((m as f64 / self.target).round() as usize).clamp(2, self.params.b);
        let limit = m.div_ceil(fanout);
        let mut pieces: Vec<(ConvexRegion<T>, Vec<usize>)> = Vec::new();
        if fanout >= 8 {
            let sampled = self.sample_tests(q, rng);
            let r = ((fanout as f64 / (4.0 * self.leaves_per_r2())).sqrt().floor()).max(2.0);
            if sampled.is_empty() {
                pieces.push((cell.region.clone(), cell.points.clone()));
            } else {
                let cutting = create_cutting_in(
                    cell.region.clone(),
                    &sampled,
                    r,
                    self.params.kind,
                    CuttingOptions::default(),
                    rng,
                    self.tol,
                )?;
                self.leaves_seen += cutting.leaf_count() as f64;
                self.r2_seen += r * r;
                let mut tree = cutting.tree;
                let sub: Vec<Point<T>> = cell.points.iter().map(|&i| self.pts[i]).collect();
                tree.insert_points(&sub);
                for leaf in tree.leaves() {
                    let local = tree.leaf_points(leaf);
                    if local.is_empty() {
                        continue;
                    }
                    let mut ids: Vec<usize> = local.iter().map(|&l| cell.points[l]).collect();
                    ids.sort_unstable();
                    pieces.push((tree.region(leaf).clone(), ids));
                }
            }
        } else {
            pieces.push((cell.region.clone(), cell.points.clone()));
        }
        let mut out = Vec::new();
        for (region, ids) in pieces {
            split_to_limit(self.pts, ids, region, limit, 0, &self.tol, &mut out);
        }
        Ok(out)
    }

    /// Poisson sample of the test set, each line kept with probability
    /// proportional to its weight; expected size `q·|H|`.
    fn sample_tests<R: Rng + ?Sized>(&self, q: f64, rng: &mut R) -> Vec<WeightedLine<T>> {
        if q >= 1.0 {
            return self.tests.lines.clone();
        }
        let total: f64 = self.tests.lines.iter().map(|l| l.weight).sum();
        let scale = q * self.tests.len() as f64 / total;
        self.tests
            .lines
            .iter()
            .filter(|l| rng.random::<f64>() < (scale * l.weight).min(1.0))
            .map(|l| WeightedLine::unit(l.line))
            .collect()
    }

    /// Multiplies by `1 + 1/b` the weight of every test line meeting the
    /// boundary of `region`, found through wedge queries on the dual tree.
    fn charge(&mut self, region: &ConvexRegion<T>) {
        let hit = match &self.tests.dual_tree {
            Some(tree) => {
                let mut ids = Vec::new();
                for w in boundary_wedges(region, &self.tol) {
                    ids.extend(tree.points_in_wedge(&w));
                }
                ids.sort_unstable();
                ids.dedup();
                ids
            }
            None => (0..self.tests.len()).filter(|&i| region.crosses_line(&self.tests.lines[i].line, &self.tol)).collect(),
        };
        let factor = 1.0 + 1.0 / self.params.b as f64;
        for i in hit {
            self.tests.lines[i].weight *= factor;
            self.last_crossings[i] += 1;
        }
    }

    pub fn finish(self, seconds: f64) -> Partition<T> {
        Partition {
            cells: self.cells,
            t: self.t,
            n: self.pts.len(),
            method: if self.params.simple { PartitionMethod::ChanSimple } else { PartitionMethod::Chan },
            stats: PartitionStats { seconds, levels: self.levels, max_crossing: None },
        }
    }
}

/// Dual wedges of the edges of a bounded region. A vertical wall maps to the
/// strip between two parallel dual lines.
pub fn boundary_wedges<T: Scalar>(region: &ConvexRegion<T>, tol: &Tolerance<T>) -> Vec<DoubleWedge<T>> {
    region
        .edges(tol)
        .into_iter()
        .filter_map(|e| match e {
            Edge::Segment { segment, .. } => dualize_segment(&segment).ok(),
            Edge::Wall { x, y_lo, y_hi, .. } if y_lo.is_finite() && y_hi.is_finite() => Some(DoubleWedge {
                apex: Point::new(T::zero(), -y_lo),
                upper: Line::new(x, -y_lo),
                lower: Line::new(x, -y_hi),
            }),
            Edge::Wall { .. } => None,
        })
        .collect()
}

pub fn partition_chan<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    t: usize,
    params: &ChanParams,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<Partition<T>> {
    let start = Instant::now();
    let mut builder = ChanBuilder::new(pts, t, params, rng, tol)?;
    while builder.step(rng)? {
        if builder.levels > 64 {
            return Err(Error::Invariant("partition refinement did not converge".into()));
        }
    }
    Ok(builder.finish(start.elapsed().as_secs_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::line_meets_segment;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn uniform(n: usize, seed: u64) -> Vec<Point<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Point::new(rng.random(), rng.random())).collect()
    }

    fn simple() -> ChanParams {
        ChanParams { simple: true, ..Default::default() }
    }

    #[test]
    fn finished_input_is_unchanged() {
        let pts = uniform(20, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut builder = ChanBuilder::new(&pts, 2, &simple(), &mut rng, &tol()).unwrap();
        builder.cells = vec![
            PartitionCell { region: root_region(&pts), points: (0..10).collect() },
            PartitionCell { region: root_region(&pts), points: (10..20).collect() },
        ];
        assert!(!builder.step(&mut rng).unwrap());
        assert_eq!(builder.cells().len(), 2);
        assert_eq!(builder.cells()[1].points, (10..20).collect::<Vec<_>>());
    }

    #[test]
    fn balanced_cover_simple_and_sampled() {
        let pts = uniform(1024, 1);
        for params in [simple(), ChanParams::default()] {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let part = partition_chan(&pts, 64, &params, &mut rng, &tol()).unwrap();
            part.verify().unwrap();
            for c in &part.cells {
                assert!(c.points.iter().all(|&i| c.region.contains(&pts[i], &tol())));
            }
        }
    }

    #[test]
    fn weights_follow_crossing_counts() {
        let pts = uniform(4000, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut builder = ChanBuilder::new(&pts, 256, &simple(), &mut rng, &tol()).unwrap();
        assert!(builder.weights().iter().all(|&w| w == 1.0));
        assert!(builder.step(&mut rng).unwrap());
        let w = builder.weights();
        let c = builder.last_crossings.clone();
        assert!(w.iter().all(|&x| x >= 1.0));
        assert!(c.iter().any(|&x| x > 0));
        for i in 0..w.len() {
            for j in 0..w.len() {
                if c[i] > c[j] {
                    assert!(w[i] >= w[j]);
                }
            }
            assert!((w[i] - (1.0 + 1.0 / 22.0f64).powi(c[i] as i32)).abs() < 1e-9);
        }
    }

    #[test]
    fn wedge_charges_match_boundary_tests() {
        let pts = uniform(3000, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut builder = ChanBuilder::new(&pts, 128, &simple(), &mut rng, &tol()).unwrap();
        builder.step(&mut rng).unwrap();
        let tree = builder.tests.dual_tree.as_ref().unwrap();
        for cell in builder.cells().iter().take(30) {
            let mut via_wedges = Vec::new();
            for w in boundary_wedges(&cell.region, &tol()) {
                via_wedges.extend(tree.points_in_wedge(&w));
            }
            via_wedges.sort_unstable();
            via_wedges.dedup();
            let direct: Vec<usize> = (0..builder.tests.len())
                .filter(|&i| {
                    let h = &builder.tests.lines[i].line;
                    cell.region.edges(&tol()).iter().any(|e| match *e {
                        Edge::Segment { segment, .. } => line_meets_segment(h, &segment, &tol()),
                        Edge::Wall { x, y_lo, y_hi, .. } => {
                            let y = h.eval(x);
                            y >= y_lo - 1e-9 && y <= y_hi + 1e-9
                        }
                    })
                })
                .collect();
            assert_eq!(via_wedges, direct);
            for i in 0..builder.tests.len() {
                if cell.region.crosses_line(&builder.tests.lines[i].line, &tol()) {
                    assert!(via_wedges.binary_search(&i).is_ok());
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let pts = uniform(2000, 4);
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let part = partition_chan(&pts, 40, &ChanParams::default(), &mut rng, &tol()).unwrap();
            part.cells.iter().map(|c| c.points.clone()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn rejects_bad_rates() {
        let pts = uniform(100, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bad = ChanParams { p: Some(0.0), ..Default::default() };
        assert!(partition_chan(&pts, 4, &bad, &mut rng, &tol()).is_err());
        let bad = ChanParams { q: Some(1.5), ..Default::default() };
        assert!(partition_chan(&pts, 4, &bad, &mut rng, &tol()).is_err());
    }
}
