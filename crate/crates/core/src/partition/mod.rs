//! Balanced point partitions with low crossing number.
//!
//! Every builder returns a [`Partition`]: convex cells paired with disjoint
//! point subsets covering the input, each subset holding at most `2n/t`
//! points.

pub mod chan;
pub mod mat;

pub use chan::{partition_chan, ChanBuilder, ChanParams};
pub use mat::{partition_mat, MatParams};

use crate::error::{Error, Result};
use crate::geometry::{line_through, Line, Point};
use crate::hamtree;
use crate::region::{Bound, Constraint, ConvexRegion};
use crate::scalar::{Scalar, Tolerance};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMethod {
    Mat,
    Chan,
    ChanSimple,
    Ham,
    DoubleHam,
}

impl PartitionMethod {
    pub const ALL: [PartitionMethod; 5] = [Self::Mat, Self::Chan, Self::ChanSimple, Self::Ham, Self::DoubleHam];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mat => "mat",
            Self::Chan => "chan",
            Self::ChanSimple => "chan_simple",
            Self::Ham => "ham",
            Self::DoubleHam => "double_ham",
        }
    }
}

impl std::fmt::Display for PartitionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PartitionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "mat" => Ok(Self::Mat),
            "chan" => Ok(Self::Chan),
            "chan_simple" => Ok(Self::ChanSimple),
            "ham" => Ok(Self::Ham),
            "double_ham" => Ok(Self::DoubleHam),
            _ => Err(Error::InvalidParameter(format!("unknown partition method '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PartitionCell<T> {
    pub region: ConvexRegion<T>,
    /// Indices into the input point list, ascending.
    pub points: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub seconds: f64,
    /// Depth of the construction (recursion levels or tree height).
    pub levels: usize,
    /// Largest number of cells crossed by one probe line, once measured.
    pub max_crossing: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Partition<T> {
    pub cells: Vec<PartitionCell<T>>,
    pub t: usize,
    pub n: usize,
    pub method: PartitionMethod,
    pub stats: PartitionStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingProfile {
    pub max: usize,
    pub mean: f64,
    /// `histogram[c]` is the number of probes crossing exactly `c` cells.
    pub histogram: Vec<usize>,
}

impl<T: Scalar> Partition<T> {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max_cell_size(&self) -> usize {
        self.cells.iter().map(|c| c.points.len()).max().unwrap_or(0)
    }

    /// `⌊2n/t⌋`
    pub fn balance_limit(&self) -> usize {
        balance_limit(self.n, self.t)
    }

    /// Checks disjoint cover of `0..n`, nonempty cells and the balance bound.
    pub fn verify(&self) -> Result<()> {
        let mut seen = vec![false; self.n];
        for (i, c) in self.cells.iter().enumerate() {
            if c.points.is_empty() {
                return Err(Error::EmptyCell);
            }
            if c.points.len() > self.balance_limit() {
                return Err(Error::Invariant(format!(
                    "cell {i} holds {} points, limit {}",
                    c.points.len(),
                    self.balance_limit()
                )));
            }
            for &p in &c.points {
                if p >= self.n || std::mem::replace(&mut seen[p], true) {
                    return Err(Error::Invariant(format!("point {p} is out of range or repeated")));
                }
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::Invariant(format!("point {p} is in no cell")));
        }
        Ok(())
    }

    /// Number of cells each probe crosses (passes through the interior of).
    pub fn crossing_counts(&self, probes: &[Line<T>], tol: &Tolerance<T>) -> Vec<usize> {
        probes
            .iter()
            .map(|l| self.cells.iter().filter(|c| c.region.crosses_line(l, tol)).count())
            .collect()
    }

    pub fn crossing_profile(&self, probes: &[Line<T>], tol: &Tolerance<T>) -> CrossingProfile {
        let counts = self.crossing_counts(probes, tol);
        let max = counts.iter().copied().max().unwrap_or(0);
        let mut histogram = vec![0; max + 1];
        for &c in &counts {
            histogram[c] += 1;
        }
        let mean = if counts.is_empty() { 0.0 } else { counts.iter().sum::<usize>() as f64 / counts.len() as f64 };
        CrossingProfile { max, mean, histogram }
    }

    /// Stores the probe maximum in `stats.max_crossing`.
    pub fn record_crossing(&mut self, probes: &[Line<T>], tol: &Tolerance<T>) -> CrossingProfile {
        let profile = self.crossing_profile(probes, tol);
        self.stats.max_crossing = Some(profile.max);
        profile
    }

    pub fn to_json(&self, tol: &Tolerance<T>) -> serde_json::Value {
        let cells: Vec<_> = self
            .cells
            .iter()
            .map(|c| {
                let vertices: Vec<[f64; 2]> =
                    c.region.vertices(tol).iter().map(|v| [v.x.as_f64(), v.y.as_f64()]).collect();
                json!({ "vertices": vertices, "points": c.points })
            })
            .collect();
        json!({
            "method": self.method,
            "t": self.t,
            "n": self.n,
            "cells": cells,
            "stats": self.stats,
        })
    }

    pub fn to_svg(&self, pts: &[Point<T>], view: [f64; 4], draw_points: bool, tol: &Tolerance<T>) -> String {
        let mut canvas = crate::render::SvgCanvas::new(view);
        for c in &self.cells {
            let v: Vec<[f64; 2]> = c.region.vertices(tol).iter().map(|v| [v.x.as_f64(), v.y.as_f64()]).collect();
            canvas.polygon(&v);
        }
        if draw_points {
            for p in pts {
                canvas.point(p.x.as_f64(), p.y.as_f64());
            }
        }
        canvas.finish()
    }
}

pub fn balance_limit(n: usize, t: usize) -> usize {
    2 * n / t.max(1)
}

pub(crate) fn check_t(n: usize, t: usize) -> Result<()> {
    if t < 2 || t > n {
        return Err(Error::InvalidT { t, n });
    }
    Ok(())
}

/// Padded bounding box used as the root cell of every builder.
pub fn root_region<T: Scalar>(pts: &[Point<T>]) -> ConvexRegion<T> {
    ConvexRegion::bounding_box(pts, 0.01)
}

/// Lines through `count` random pairs of distinct input points.
pub fn random_probes<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    count: usize,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Vec<Line<T>> {
    let mut out = Vec::with_capacity(count);
    if pts.len() < 2 {
        return out;
    }
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count + 100 {
        attempts += 1;
        let pair = sample(rng, pts.len(), 2);
        if let Ok(l) = line_through(&pts[pair.index(0)], &pts[pair.index(1)], tol) {
            out.push(l);
        }
    }
    out
}

/// Splits `ids` by a line of slope `slope` so that exactly `above` of them
/// (largest `y − slope·x`, ties by lower index) land on the upper side.
///
/// The line sits halfway between the two separating keys. Returns the line
/// and the two id lists, each ascending.
pub(crate) fn quantile_cut<T: Scalar>(
    pts: &[Point<T>],
    ids: &[usize],
    slope: T,
    above: usize,
) -> (Line<T>, Vec<usize>, Vec<usize>) {
    debug_assert!(above > 0 && above < ids.len());
    let mut keyed: Vec<(T, usize)> = ids.iter().map(|&i| (pts[i].y - slope * pts[i].x, i)).collect();
    // Descending key, ties by index: a strict order, so selection gives the
    // same split as a full sort.
    let order = |a: &(T, usize), b: &(T, usize)| {
        b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1))
    };
    keyed.select_nth_unstable_by(above, order);
    let last_up = keyed[..above].iter().max_by(|a, b| order(a, b)).expect("above > 0").0;
    let b = (last_up + keyed[above].0) * T::half();
    let mut up: Vec<usize> = keyed[..above].iter().map(|k| k.1).collect();
    let mut down: Vec<usize> = keyed[above..].iter().map(|k| k.1).collect();
    up.sort_unstable();
    down.sort_unstable();
    (Line::new(slope, b), up, down)
}

/// Slope used for alternating cuts: steep (near-vertical) on even depths,
/// horizontal on odd ones.
pub(crate) fn alternating_slope<T: Scalar>(depth: usize) -> T {
    if depth.is_multiple_of(2) {
        T::lit(T::STEEP_SLOPE)
    } else {
        T::zero()
    }
}

pub(crate) fn split_region<T: Scalar>(
    region: &ConvexRegion<T>,
    line: Line<T>,
    tol: &Tolerance<T>,
) -> (ConvexRegion<T>, ConvexRegion<T>) {
    (
        region.with(Bound::new(Constraint::Above(line)), tol),
        region.with(Bound::new(Constraint::Below(line)), tol),
    )
}

/// Recursively halves `ids` with alternating quantile cuts until every part
/// holds at most `limit` points. Parts are appended to `out`.
pub(crate) fn split_to_limit<T: Scalar>(
    pts: &[Point<T>],
    ids: Vec<usize>,
    region: ConvexRegion<T>,
    limit: usize,
    depth: usize,
    tol: &Tolerance<T>,
    out: &mut Vec<PartitionCell<T>>,
) {
    let limit = limit.max(1);
    if ids.len() <= limit {
        if !ids.is_empty() {
            out.push(PartitionCell { region, points: ids });
        }
        return;
    }
    let groups = ids.len().div_ceil(limit);
    let up_groups = groups / 2;
    let above = (ids.len() * up_groups + groups / 2) / groups;
    let above = above.clamp(1, ids.len() - 1);
    let (line, up, down) = quantile_cut(pts, &ids, alternating_slope(depth), above);
    let (ra, rb) = split_region(&region, line, tol);
    split_to_limit(pts, up, ra, limit, depth + 1, tol, out);
    split_to_limit(pts, down, rb, limit, depth + 1, tol, out);
}

/// Parameters for every partition method; each builder reads its own part.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartitionParams {
    pub mat: MatParams,
    pub chan: ChanParams,
    pub ham: hamtree::HamParams,
}

pub fn build_partition<T: Scalar, R: Rng + ?Sized>(
    method: PartitionMethod,
    pts: &[Point<T>],
    t: usize,
    params: &PartitionParams,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<Partition<T>> {
    match method {
        PartitionMethod::Mat => partition_mat(pts, t, &params.mat, rng, tol),
        PartitionMethod::Chan => partition_chan(pts, t, &ChanParams { simple: false, ..params.chan.clone() }, rng, tol),
        PartitionMethod::ChanSimple => {
            partition_chan(pts, t, &ChanParams { simple: true, ..params.chan.clone() }, rng, tol)
        }
        PartitionMethod::Ham => hamtree::ham_partition(pts, t, &params.ham, rng, tol),
        PartitionMethod::DoubleHam => hamtree::double_ham_partition(pts, t, &params.ham, rng, tol),
    }
}
