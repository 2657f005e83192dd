//! Partitions from approximate ham-sandwich cuts.
//!
//! A cut is the best of the `C(t,2)` lines spanned by `t` points sampled from
//! the union of the two sets. Cell budgets are split evenly down the tree so
//! a partition built for `t` cells ends with about `t` leaves.

use crate::error::{Error, Result};
use crate::geometry::{line_through, Line, Point};
use crate::partition::{
    alternating_slope, check_t, quantile_cut, root_region, split_region, Partition, PartitionCell, PartitionMethod,
    PartitionStats,
};
use crate::region::ConvexRegion;
use crate::scalar::{Scalar, Tolerance};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const DEFAULT_HAM_T: usize = 11;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamParams {
    /// Number of sampled points whose spanned lines are the candidates.
    pub t: usize,
}

impl Default for HamParams {
    fn default() -> Self {
        Self { t: DEFAULT_HAM_T }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamCut<T> {
    pub line: Line<T>,
    /// `2·max(|above_A/|A| − α|, |above_B/|B| − β|)` with `α = β = 1/2` for a
    /// plain cut.
    pub imbalance: f64,
    /// Index of the winning candidate, `None` when no candidate was usable
    /// and a quantile line was substituted.
    pub candidate: Option<usize>,
}

/// One recorded cut: sizes of a set and its two sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutTrace {
    pub depth: usize,
    pub size: usize,
    pub above: usize,
    pub below: usize,
    /// Fraction of `size` the cut aimed to put above.
    pub target: f64,
    pub imbalance: f64,
}

fn count_above<T: Scalar>(pts: &[Point<T>], ids: &[usize], l: &Line<T>, tol: &Tolerance<T>) -> usize {
    ids.iter().filter(|&&i| pts[i].is_above(l, tol)).count()
}

fn score(above: usize, size: usize, target: f64) -> f64 {
    if size == 0 {
        0.0
    } else {
        2.0 * (above as f64 / size as f64 - target).abs()
    }
}

/// Best candidate cut for `a` and `b` aiming at fractions `alpha`, `beta`
/// above. Ties go to the lower candidate index.
fn targeted_cut<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    a: &[usize],
    b: &[usize],
    alpha: f64,
    beta: f64,
    t: usize,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> HamCut<T> {
    let total = a.len() + b.len();
    let chosen = sample(rng, total, t.min(total)).into_vec();
    let at = |k: usize| if k < a.len() { pts[a[k]] } else { pts[b[k - a.len()]] };
    // Contiguous copies: every candidate scans both sets.
    let pa: Vec<Point<T>> = a.iter().map(|&i| pts[i]).collect();
    let same = std::ptr::eq(a, b);
    let pb: Vec<Point<T>> = if same { Vec::new() } else { b.iter().map(|&i| pts[i]).collect() };
    let above = |set: &[Point<T>], l: &Line<T>| set.iter().filter(|p| p.is_above(l, tol)).count();
    let mut best: Option<HamCut<T>> = None;
    let mut cand = 0;
    for i in 0..chosen.len() {
        for j in i + 1..chosen.len() {
            if let Ok(l) = line_through(&at(chosen[i]), &at(chosen[j]), tol) {
                let up_a = above(&pa, &l);
                let up_b = if same { up_a } else { above(&pb, &l) };
                let imb = score(up_a, a.len(), alpha).max(score(up_b, b.len(), beta));
                if best.is_none_or(|h| imb < h.imbalance) {
                    best = Some(HamCut { line: l, imbalance: imb, candidate: Some(cand) });
                }
            }
            cand += 1;
        }
    }
    best.unwrap_or_else(|| {
        let src = if a.len() >= 2 { a } else { b };
        let line = if src.len() >= 2 {
            let up = ((src.len() as f64 * alpha).round() as usize).clamp(1, src.len() - 1);
            quantile_cut(pts, src, T::zero(), up).0
        } else {
            Line::new(T::zero(), pts[src[0]].y)
        };
        let imb = score(count_above(pts, a, &line, tol), a.len(), alpha)
            .max(score(count_above(pts, b, &line, tol), b.len(), beta));
        HamCut { line, imbalance: imb, candidate: None }
    })
}

/// Approximate ham-sandwich cut of `a` and `b` from `t` sampled points.
pub fn approx_ham_sandwich<T: Scalar, R: Rng + ?Sized>(
    a: &[Point<T>],
    b: &[Point<T>],
    t: usize,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<HamCut<T>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: a.len().min(b.len()) });
    }
    if t < 2 {
        return Err(Error::InvalidParameter(format!("ham-sandwich sample size t must be at least 2 (got {t})")));
    }
    let pts: Vec<Point<T>> = a.iter().chain(b).copied().collect();
    let ia: Vec<usize> = (0..a.len()).collect();
    let ib: Vec<usize> = (a.len()..pts.len()).collect();
    Ok(targeted_cut(&pts, &ia, &ib, 0.5, 0.5, t, rng, tol))
}

struct Builder<'a, T, R: ?Sized> {
    pts: &'a [Point<T>],
    t: usize,
    cap: usize,
    tol: &'a Tolerance<T>,
    rng: &'a mut R,
    cells: Vec<PartitionCell<T>>,
    trace: Vec<CutTrace>,
    levels: usize,
}

impl<'a, T: Scalar, R: Rng + ?Sized> Builder<'a, T, R> {
    fn leaf(&mut self, region: ConvexRegion<T>, ids: Vec<usize>, depth: usize) {
        self.levels = self.levels.max(depth + 1);
        if !ids.is_empty() {
            self.cells.push(PartitionCell { region, points: ids });
        }
    }

    /// Budget the set must be split into: at least 2 once it exceeds the cap.
    fn effective(&self, ids: &[usize], budget: usize) -> usize {
        if ids.len() <= 1 {
            1
        } else if ids.len() > self.cap {
            budget.max(2)
        } else {
            budget
        }
    }

    /// Quantile cut putting a `num/den` share of `ids` above.
    fn share_cut(&self, ids: &[usize], num: usize, den: usize, slope: T) -> (Line<T>, Vec<usize>, Vec<usize>) {
        let up = ((ids.len() * num + den / 2) / den).clamp(1, ids.len() - 1);
        quantile_cut(self.pts, ids, slope, up)
    }

    /// Applies a cut to `ids`, falling back to a horizontal quantile line
    /// when the cut leaves a side empty.
    fn apply(
        &mut self,
        ids: &[usize],
        region: &ConvexRegion<T>,
        line: Line<T>,
        budget: usize,
        imbalance: f64,
        depth: usize,
    ) -> [(ConvexRegion<T>, Vec<usize>, usize); 2] {
        let (mut up, mut down): (Vec<usize>, Vec<usize>) =
            ids.iter().partition(|&&i| self.pts[i].is_above(&line, self.tol));
        let mut line = line;
        let mut imbalance = imbalance;
        let target = (budget / 2) as f64 / budget as f64;
        if up.is_empty() || down.is_empty() {
            let (l, u, d) = self.share_cut(ids, budget / 2, budget, T::zero());
            (line, up, down) = (l, u, d);
            imbalance = score(up.len(), ids.len(), target);
        }
        self.trace.push(CutTrace { depth, size: ids.len(), above: up.len(), below: down.len(), target, imbalance });
        let b_up = ((budget * up.len() + ids.len() / 2) / ids.len()).clamp(1, budget - 1);
        let (ra, rb) = split_region(region, line, self.tol);
        [(ra, up, b_up), (rb, down, budget - b_up)]
    }

    /// Vertical share cut (a steep line) into left and right parts.
    fn vertical(&mut self, ids: &[usize], region: &ConvexRegion<T>, budget: usize, depth: usize) -> [(ConvexRegion<T>, Vec<usize>, usize); 2] {
        let bl = budget / 2;
        let (line, left, right) = self.share_cut(ids, bl, budget, alternating_slope(0));
        let target = bl as f64 / budget as f64;
        let imbalance = score(left.len(), ids.len(), target);
        self.trace.push(CutTrace { depth, size: ids.len(), above: left.len(), below: right.len(), target, imbalance });
        let (ra, rb) = split_region(region, line, self.tol);
        [(ra, left, bl), (rb, right, budget - bl)]
    }

    fn willard(&mut self, ids: Vec<usize>, region: ConvexRegion<T>, budget: usize, depth: usize) {
        let budget = self.effective(&ids, budget);
        if budget <= 1 {
            return self.leaf(region, ids, depth);
        }
        let [(rl, left, bl), (rr, right, br)] = self.vertical(&ids, &region, budget, depth);
        if budget < 4 {
            self.willard(left, rl, bl, depth + 1);
            self.willard(right, rr, br, depth + 1);
            return;
        }
        let cut = targeted_cut(
            self.pts,
            &left,
            &right,
            (bl / 2) as f64 / bl as f64,
            (br / 2) as f64 / br as f64,
            self.t,
            self.rng,
            self.tol,
        );
        for (sub, sub_region, sub_budget) in [(left, rl, bl), (right, rr, br)] {
            let halves = self.split_by(&sub, &sub_region, cut, sub_budget, depth + 1);
            for (r, part, b) in halves {
                self.willard(part, r, b, depth + 2);
            }
        }
    }

    /// Cuts one set with a shared line, or hands it back whole when its
    /// budget does not call for a split.
    fn split_by(
        &mut self,
        ids: &[usize],
        region: &ConvexRegion<T>,
        cut: HamCut<T>,
        budget: usize,
        depth: usize,
    ) -> Vec<(ConvexRegion<T>, Vec<usize>, usize)> {
        let budget = self.effective(ids, budget);
        if budget <= 1 {
            return vec![(region.clone(), ids.to_vec(), 1)];
        }
        self.apply(ids, region, cut.line, budget, cut.imbalance, depth).into()
    }

    fn double_root(&mut self, ids: Vec<usize>, region: ConvexRegion<T>, budget: usize) {
        let budget = self.effective(&ids, budget);
        if budget <= 1 {
            return self.leaf(region, ids, 0);
        }
        let [(rl, left, bl), (rr, right, br)] = self.vertical(&ids, &region, budget, 0);
        self.pair((left, rl, bl), (right, rr, br), 1);
    }

    /// Jointly refines two sibling sets with shared cuts.
    fn pair(&mut self, p: (Vec<usize>, ConvexRegion<T>, usize), q: (Vec<usize>, ConvexRegion<T>, usize), depth: usize) {
        let bp = self.effective(&p.0, p.2);
        let bq = self.effective(&q.0, q.2);
        match (bp > 1, bq > 1) {
            (false, false) => {
                self.leaf(p.1, p.0, depth);
                self.leaf(q.1, q.0, depth);
            }
            (true, false) | (false, true) => {
                let ((s, sr, sb), (o, or)) = if bp > 1 { ((p.0, p.1, bp), (q.0, q.1)) } else { ((q.0, q.1, bq), (p.0, p.1)) };
                self.leaf(or, o, depth);
                let alpha = (sb / 2) as f64 / sb as f64;
                let cut = targeted_cut(self.pts, &s, &s, alpha, alpha, self.t, self.rng, self.tol);
                let [a, b] = self.apply(&s, &sr, cut.line, sb, cut.imbalance, depth);
                self.pair((a.1, a.0, a.2), (b.1, b.0, b.2), depth + 1);
            }
            (true, true) => {
                let cut = targeted_cut(
                    self.pts,
                    &p.0,
                    &q.0,
                    (bp / 2) as f64 / bp as f64,
                    (bq / 2) as f64 / bq as f64,
                    self.t,
                    self.rng,
                    self.tol,
                );
                let [pa, pb] = self.apply(&p.0, &p.1, cut.line, bp, cut.imbalance, depth);
                let [qa, qb] = self.apply(&q.0, &q.1, cut.line, bq, cut.imbalance, depth);
                self.pair((pa.1, pa.0, pa.2), (pb.1, pb.0, pb.2), depth + 1);
                self.pair((qa.1, qa.0, qa.2), (qb.1, qb.0, qb.2), depth + 1);
            }
        }
    }
}

/// Result of a tree build together with its cut log.
pub struct HamTree<T> {
    pub partition: Partition<T>,
    pub trace: Vec<CutTrace>,
}

#[allow(clippy::too_many_arguments)]
fn run<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    budget: usize,
    cap: usize,
    t_ham: usize,
    double: bool,
    t_nominal: usize,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<HamTree<T>> {
    if t_ham < 2 {
        return Err(Error::InvalidParameter(format!("ham-sandwich sample size t must be at least 2 (got {t_ham})")));
    }
    let start = Instant::now();
    let mut b = Builder { pts, t: t_ham, cap: cap.max(1), tol, rng, cells: Vec::new(), trace: Vec::new(), levels: 0 };
    let ids: Vec<usize> = (0..pts.len()).collect();
    let root = root_region(pts);
    if double {
        b.double_root(ids, root, budget);
    } else {
        b.willard(ids, root, budget, 0);
    }
    let partition = Partition {
        cells: b.cells,
        t: t_nominal,
        n: pts.len(),
        method: if double { PartitionMethod::DoubleHam } else { PartitionMethod::Ham },
        stats: PartitionStats { seconds: start.elapsed().as_secs_f64(), levels: b.levels, max_crossing: None },
    };
    Ok(HamTree { partition, trace: b.trace })
}

/// Willard-style tree: a vertical median split, then one cut shared by both
/// halves, recursively, until every leaf holds at most `leaf_size` points.
pub fn ham_tree<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    leaf_size: usize,
    t: usize,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<HamTree<T>> {
    let leaf_size = leaf_size.max(1);
    let budget = pts.len().div_ceil(leaf_size).max(1);
    run(pts, budget, leaf_size, t, false, budget.max(1), rng, tol)
}

/// Tree where sibling sets are always refined by a shared cut.
pub fn double_ham_tree<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    leaf_size: usize,
    t: usize,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<HamTree<T>> {
    let leaf_size = leaf_size.max(1);
    let budget = pts.len().div_ceil(leaf_size).max(1);
    run(pts, budget, leaf_size, t, true, budget.max(1), rng, tol)
}

/// Ham tree with about `t` cells, each of at most `2n/t` points.
pub fn ham_partition<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    t: usize,
    params: &HamParams,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<Partition<T>> {
    check_t(pts.len(), t)?;
    let cap = crate::partition::balance_limit(pts.len(), t);
    Ok(run(pts, t, cap, params.t, false, t, rng, tol)?.partition)
}

pub fn double_ham_partition<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    t: usize,
    params: &HamParams,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<Partition<T>> {
    check_t(pts.len(), t)?;
    let cap = crate::partition::balance_limit(pts.len(), t);
    Ok(run(pts, t, cap, params.t, true, t, rng, tol)?.partition)
}
