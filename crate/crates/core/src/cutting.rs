//! Weighted (1/r)-cuttings built by repeatedly splitting heavy leaves.

use crate::arrangement::{ArrangementTree, CellKind, Piece};
use crate::error::{Error, Result};
use crate::geometry::{classify, Line, Mode, Segment, Side};
use crate::region::ConvexRegion;
use crate::scalar::{Scalar, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::time::Instant;

/// Halfplane boundary with a positive multiplicative weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedLine<T> {
    pub line: Line<T>,
    pub weight: f64,
}

impl<T: Scalar> WeightedLine<T> {
    pub fn new(line: Line<T>, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::NonPositiveWeight(weight));
        }
        Ok(Self { line, weight })
    }

    pub fn unit(line: Line<T>) -> Self {
        Self { line, weight: 1.0 }
    }
}

/// Random order where item `i` comes first with probability proportional to
/// `weights[i]`: each item draws `u^(1/w)` and items are sorted by it,
/// largest first (compared in log space).
pub fn weighted_permutation<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    if let Some(&w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::NonPositiveWeight(w));
    }
    let mut keyed: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let u: f64 = rng.random();
            (u.max(f64::MIN_POSITIVE).ln() / w, i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(keyed.into_iter().map(|(_, i)| i).collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CuttingOptions {
    /// Split by the crossing line that best balances the other lines between
    /// the two sides instead of the earliest one in the permutation. Slower.
    pub balanced_split: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuttingMetrics {
    pub n_lines: usize,
    pub r: f64,
    pub kind: String,
    pub leaves: usize,
    pub leaves_per_r2: f64,
    pub max_crossing_weight: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct Cutting<T> {
    pub tree: ArrangementTree<T>,
    pub weights: Vec<f64>,
    pub r: f64,
    pub total_weight: f64,
    pub seconds: f64,
}

impl<T: Scalar> Cutting<T> {
    pub fn kind(&self) -> CellKind {
        self.tree.kind()
    }

    pub fn leaf_count(&self) -> usize {
        self.tree.leaf_count()
    }

    pub fn threshold(&self) -> f64 {
        self.total_weight / self.r
    }

    /// Weight of the lines listed as crossing `leaf`.
    pub fn crossing_weight(&self, leaf: usize) -> f64 {
        piece_weight(self.tree.leaf_pieces(leaf), &self.weights)
    }

    /// Weight of the lines that pass through the interior of `leaf`, tested
    /// line by line against the leaf region.
    pub fn crossing_weight_brute_force(&self, leaf: usize) -> f64 {
        let region = self.tree.region(leaf);
        let tol = self.tree.tolerance();
        self.tree
            .lines()
            .iter()
            .zip(&self.weights)
            .filter(|(l, _)| region.crosses_line(l, tol))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn max_crossing_weight(&self) -> f64 {
        self.tree
            .leaves()
            .into_iter()
            .map(|n| self.crossing_weight(n))
            .fold(0.0, f64::max)
    }

    pub fn leaves_per_r2(&self) -> f64 {
        self.leaf_count() as f64 / (self.r * self.r)
    }

    pub fn metrics(&self) -> CuttingMetrics {
        CuttingMetrics {
            n_lines: self.weights.len(),
            r: self.r,
            kind: self.kind().label(),
            leaves: self.leaf_count(),
            leaves_per_r2: self.leaves_per_r2(),
            max_crossing_weight: self.max_crossing_weight(),
            seconds: self.seconds,
        }
    }
}

fn piece_weight<T>(pieces: &[Piece<T>], weights: &[f64]) -> f64 {
    pieces.iter().map(|p| weights[p.line as usize]).sum()
}

/// Cutting of the whole plane.
pub fn create_cutting<T: Scalar>(
    lines: &[WeightedLine<T>],
    r: f64,
    kind: CellKind,
    seed: u64,
    tol: Tolerance<T>,
) -> Result<Cutting<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    create_cutting_in(
        ConvexRegion::whole_plane(),
        lines,
        r,
        kind,
        CuttingOptions::default(),
        &mut rng,
        tol,
    )
}

/// Cutting restricted to `region`. The threshold is `total / r` where the
/// total counts every given line, including those missing the region.
pub fn create_cutting_in<T: Scalar, R: Rng + ?Sized>(
    region: ConvexRegion<T>,
    lines: &[WeightedLine<T>],
    r: f64,
    kind: CellKind,
    opts: CuttingOptions,
    rng: &mut R,
    tol: Tolerance<T>,
) -> Result<Cutting<T>> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::InvalidR(r));
    }
    let start = Instant::now();
    let weights: Vec<f64> = lines.iter().map(|l| l.weight).collect();
    let order = weighted_permutation(&weights, rng)?;
    let mut rank = vec![0usize; order.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos;
    }
    let total_weight: f64 = weights.iter().sum();
    let threshold = total_weight / r;
    let slack = threshold * 1e-12;

    let mut tree = ArrangementTree::with_lines(kind, region, lines.iter().map(|l| l.line).collect(), tol);
    let mut queue = VecDeque::from([tree.root()]);
    while let Some(leaf) = queue.pop_front() {
        loop {
            let pieces = tree.leaf_pieces(leaf);
            if pieces.is_empty() || piece_weight(pieces, &weights) <= threshold + slack {
                break;
            }
            let pick = if opts.balanced_split {
                balanced_choice(&tree, leaf, &weights, &rank)
            } else {
                pieces.iter().map(|p| p.line).min_by_key(|&j| rank[j as usize])
            };
            let Some(j) = pick else { break };
            match tree.split_leaf(leaf, j) {
                Ok(new_leaves) => {
                    queue.extend(new_leaves);
                    break;
                }
                // Grazing piece: the line only touches this leaf's boundary.
                Err(Error::NoCrossing) => tree.forget_piece(leaf, j),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Cutting {
        tree,
        weights,
        r,
        total_weight,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Crossing line that maximizes the smaller of the weights lying entirely on
/// either side of it; ties go to the earlier permutation position.
fn balanced_choice<T: Scalar>(tree: &ArrangementTree<T>, leaf: usize, weights: &[f64], rank: &[usize]) -> Option<u32> {
    let tol = tree.tolerance();
    let pieces = tree.leaf_pieces(leaf);
    let lines = tree.lines();
    let mut best: Option<(f64, usize, u32)> = None;
    for cand in pieces {
        let m = lines[cand.line as usize];
        let (mut up, mut down) = (0.0, 0.0);
        for p in pieces {
            if p.line == cand.line {
                continue;
            }
            let seg = Segment::new(lines[p.line as usize], p.x_lo, p.x_hi);
            match classify(&seg, &m, Mode::Closed, tol) {
                Side::Above => up += weights[p.line as usize],
                Side::Below => down += weights[p.line as usize],
                Side::Crosses => {}
            }
        }
        let score = f64::min(up, down);
        let key = (score, rank[cand.line as usize], cand.line);
        best = match best {
            Some(b) if b.0 > score || (b.0 == score && b.1 < key.1) => Some(b),
            _ => Some(key),
        };
    }
    best.map(|b| b.2)
}
