//! Weighted halfplane test sets used to steer partition construction.

use crate::arrangement::{ArrangementTree, CellKind};
use crate::cutting::{create_cutting_in, CuttingOptions, WeightedLine};
use crate::error::{Error, Result};
use crate::geometry::{dualize_line, dualize_point, line_through, Line, Point};
use crate::region::ConvexRegion;
use crate::scalar::{Scalar, Tolerance};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestSetMethod {
    Lines,
    Points,
    Dual,
}

impl std::str::FromStr for TestSetMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lines" => Ok(Self::Lines),
            "points" => Ok(Self::Points),
            "dual" => Ok(Self::Dual),
            _ => Err(Error::InvalidParameter(format!("unknown test set method '{s}'"))),
        }
    }
}

impl std::fmt::Display for TestSetMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Lines => "lines",
            Self::Points => "points",
            Self::Dual => "dual",
        })
    }
}

/// Multipliers on the nominal sizes (natural logs throughout).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestSetConstants {
    pub c_lines: f64,
    pub c_points: f64,
    pub c_dual: f64,
}

impl Default for TestSetConstants {
    fn default() -> Self {
        Self { c_lines: 1.0, c_points: 1.0, c_dual: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub struct TestSet<T> {
    pub lines: Vec<WeightedLine<T>>,
    pub method: TestSetMethod,
    pub r: f64,
    /// Input indices of the two points each line passes through.
    pub sources: Vec<(usize, usize)>,
    /// Dual cutting with the dual point of test line `i` stored as point `i`.
    pub dual_tree: Option<ArrangementTree<T>>,
}

impl<T: Scalar> TestSet<T> {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn reset_weights(&mut self) {
        for l in &mut self.lines {
            l.weight = 1.0;
        }
    }
}

/// `⌈c · r · ln² n⌉`
pub fn lines_size(n: usize, r: f64, c: f64) -> usize {
    let ln = (n as f64).ln();
    (c * r * ln * ln).ceil().max(1.0) as usize
}

/// `⌈c · √r · ln n⌉`, at least 2 and at most `n`.
pub fn points_sample_size(n: usize, r: f64, c: f64) -> usize {
    ((c * r.sqrt() * (n as f64).ln()).ceil() as usize).clamp(2, n.max(2))
}

/// `⌈c · √r · ln r⌉`, at least 2 and at most `n`.
pub fn dual_sample_size(n: usize, r: f64, c: f64) -> usize {
    ((c * r.sqrt() * r.max(1.0).ln()).ceil() as usize).clamp(2, n.max(2))
}

fn need_two<T>(pts: &[Point<T>]) -> Result<()> {
    if pts.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: pts.len() });
    }
    Ok(())
}

/// Lines through uniformly random pairs of distinct points.
pub fn test_set_lines<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    r: f64,
    c: f64,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<TestSet<T>> {
    need_two(pts)?;
    let size = lines_size(pts.len(), r, c);
    let mut lines = Vec::with_capacity(size);
    let mut sources = Vec::with_capacity(size);
    let mut failures = 0usize;
    while lines.len() < size {
        let pair = sample(rng, pts.len(), 2);
        let (i, j) = (pair.index(0), pair.index(1));
        match line_through(&pts[i], &pts[j], tol) {
            Ok(l) => {
                lines.push(WeightedLine::unit(l));
                sources.push((i.min(j), i.max(j)));
            }
            Err(_) => {
                failures += 1;
                if failures > 100 + 10 * size {
                    return Err(Error::DegenerateLine);
                }
            }
        }
    }
    Ok(TestSet { lines, method: TestSetMethod::Lines, r, sources, dual_tree: None })
}

/// All lines spanned by a random sample of `⌈c·√r·ln n⌉` points.
pub fn test_set_points<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    r: f64,
    c: f64,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<TestSet<T>> {
    need_two(pts)?;
    let s = points_sample_size(pts.len(), r, c);
    let mut ts = test_set_points_sized(pts, s, rng, tol)?;
    ts.r = r;
    Ok(ts)
}

/// All lines spanned by `s` sampled points; near-vertical pairs are skipped.
pub fn test_set_points_sized<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    s: usize,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<TestSet<T>> {
    need_two(pts)?;
    let mut chosen = sample(rng, pts.len(), s.clamp(2, pts.len())).into_vec();
    chosen.sort_unstable();
    let mut lines = Vec::new();
    let mut sources = Vec::new();
    for (a, &i) in chosen.iter().enumerate() {
        for &j in &chosen[a + 1..] {
            if let Ok(l) = line_through(&pts[i], &pts[j], tol) {
                lines.push(WeightedLine::unit(l));
                sources.push((i, j));
            }
        }
    }
    Ok(TestSet { lines, method: TestSetMethod::Points, r: s as f64, sources, dual_tree: None })
}

/// Duals of the vertices of a cutting of the sampled points' dual lines.
///
/// Only vertices where two input dual lines meet are used (chord vertices of
/// subdivided polygons are skipped); each such vertex is the dual of the line
/// through the two sampled points. When the cutting has no such vertex, the
/// whole arrangement of the sample is used instead.
pub fn test_set_dual<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    r: f64,
    c: f64,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<TestSet<T>> {
    need_two(pts)?;
    let s = dual_sample_size(pts.len(), r, c);
    let mut chosen = sample(rng, pts.len(), s).into_vec();
    chosen.sort_unstable();
    let duals: Vec<WeightedLine<T>> = chosen.iter().map(|&i| WeightedLine::unit(dualize_point(&pts[i]))).collect();
    let r_dual = r.sqrt().ceil().max(2.0);
    let cutting = create_cutting_in(
        ConvexRegion::whole_plane(),
        &duals,
        r_dual,
        CellKind::default(),
        CuttingOptions::default(),
        rng,
        *tol,
    )?;
    let mut tree = cutting.tree;

    let mut pairs = BTreeSet::new();
    for leaf in tree.leaves() {
        for (_, a, b) in tree.region(leaf).labeled_vertices(tol) {
            if let (Some(a), Some(b)) = (a, b) {
                if a != b {
                    pairs.insert((a.min(b) as usize, a.max(b) as usize));
                }
            }
        }
    }
    if pairs.is_empty() {
        for a in 0..chosen.len() {
            for b in a + 1..chosen.len() {
                pairs.insert((a, b));
            }
        }
    }

    let mut lines = Vec::with_capacity(pairs.len());
    let mut sources = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let (i, j) = (chosen[a], chosen[b]);
        if let Ok(l) = line_through(&pts[i], &pts[j], tol) {
            lines.push(WeightedLine::unit(l));
            sources.push((i, j));
        }
    }
    let dual_points: Vec<Point<T>> = lines.iter().map(|l| dualize_line(&l.line)).collect();
    tree.insert_points(&dual_points);
    Ok(TestSet { lines, method: TestSetMethod::Dual, r, sources, dual_tree: Some(tree) })
}

pub fn build_test_set<T: Scalar, R: Rng + ?Sized>(
    method: TestSetMethod,
    pts: &[Point<T>],
    r: f64,
    constants: &TestSetConstants,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<TestSet<T>> {
    match method {
        TestSetMethod::Lines => test_set_lines(pts, r, constants.c_lines, rng, tol),
        TestSetMethod::Points => test_set_points(pts, r, constants.c_points, rng, tol),
        TestSetMethod::Dual => test_set_dual(pts, r, constants.c_dual, rng, tol),
    }
}

/// True when `l` passes through both points within tolerance.
pub fn passes_through<T: Scalar>(l: &Line<T>, p: &Point<T>, q: &Point<T>, tol: &Tolerance<T>) -> bool {
    let loose = Tolerance::new(tol.rel_tol * T::lit(1e3), tol.abs_tol * T::lit(1e3)).unwrap_or(*tol);
    loose.eq(l.eval(p.x), p.y) && loose.eq(l.eval(q.x), q.y)
}
