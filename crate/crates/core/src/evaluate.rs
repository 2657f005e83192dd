//! Halfplane discrepancy between a point set and a weighted sample.
//!
//! The error is `max_h |w_S(h) − |X ∩ h|/n|` over all halfplanes `h`. Each
//! input point carries `+1/n` and each sample point `−w`; coincident points
//! are merged, and the error is the largest `|sum|` over halfplane subsets.
//! Every such subset is realised by a line through two of the merged points
//! with the points on that line split into a prefix and a suffix along it,
//! so sweeping a line around each pivot covers them all.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sampling::WeightedSample;
use crate::scalar::Scalar;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::HashMap;

/// Largest input accepted by [`exact_error`].
pub const EXACT_LIMIT: usize = 5000;

#[derive(Clone, Copy, Debug)]
struct Charge {
    x: f64,
    y: f64,
    v: f64,
}

fn merge<T: Scalar>(pts: &[Point<T>], sample: &WeightedSample<T>) -> Vec<Charge> {
    let n = pts.len() as f64;
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut out: Vec<Charge> = Vec::new();
    let mut add = |p: &Point<T>, v: f64| {
        let (x, y) = (p.x.as_f64() + 0.0, p.y.as_f64() + 0.0);
        let slot = *index.entry((x.to_bits(), y.to_bits())).or_insert_with(|| {
            out.push(Charge { x, y, v: 0.0 });
            out.len() - 1
        });
        out[slot].v += v;
    };
    for p in pts {
        add(p, 1.0 / n);
    }
    for (p, &w) in sample.points.iter().zip(&sample.weights) {
        add(p, -w);
    }
    out
}

/// Direction from the pivot folded into the upper half plane, plus whether
/// it was flipped.
#[derive(Clone, Copy)]
struct Dir {
    dx: f64,
    dy: f64,
    flipped: bool,
    v: f64,
}

fn fold(dx: f64, dy: f64, v: f64) -> Dir {
    if dy < 0.0 || (dy == 0.0 && dx < 0.0) {
        Dir { dx: -dx, dy: -dy, flipped: true, v }
    } else {
        Dir { dx, dy, flipped: false, v }
    }
}

fn angle_cmp(a: &Dir, b: &Dir) -> Ordering {
    // Both lie in [0, π): a precedes b when b is counter-clockwise of a.
    let cross = a.dx * b.dy - a.dy * b.dx;
    0.0.partial_cmp(&cross).unwrap_or(Ordering::Equal)
}

/// (max, min) of the signed sums over halfplanes whose boundary passes
/// through `charges[pivot]`.
fn sweep_pivot(charges: &[Charge], pivot: usize) -> (f64, f64) {
    let p = charges[pivot];
    let mut dirs: Vec<Dir> = charges
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pivot)
        .map(|(_, c)| fold(c.x - p.x, c.y - p.y, c.v))
        .collect();
    if dirs.is_empty() {
        return (p.v.max(0.0), p.v.min(0.0));
    }
    dirs.sort_by(angle_cmp);
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut s = 0;
    for i in 1..=dirs.len() {
        if i == dirs.len() || angle_cmp(&dirs[s], &dirs[i]) != Ordering::Equal {
            groups.push((s, i));
            s = i;
        }
    }
    let total: f64 = charges.iter().map(|c| c.v).sum();
    // Strictly left of the line through the pivot along the first group:
    // unflipped points of later groups.
    let mut left: f64 = dirs[groups[0].1..].iter().filter(|d| !d.flipped).map(|d| d.v).sum();
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    let mut online: Vec<(f64, f64)> = Vec::new();
    for (g, &(a, b)) in groups.iter().enumerate() {
        if g > 0 {
            let (pa, pb) = groups[g - 1];
            left += dirs[pa..pb].iter().filter(|d| d.flipped).map(|d| d.v).sum::<f64>();
            left -= dirs[a..b].iter().filter(|d| !d.flipped).map(|d| d.v).sum::<f64>();
        }
        online.clear();
        online.push((0.0, p.v));
        for d in &dirs[a..b] {
            let t = d.dx.abs() + d.dy.abs();
            online.push((if d.flipped { -t } else { t }, d.v));
        }
        online.sort_by(|u, v| u.0.total_cmp(&v.0));
        let on: f64 = online.iter().map(|o| o.1).sum();
        let right = total - left - on;
        let mut prefix = 0.0;
        for i in 0..=online.len() {
            for base in [left, right] {
                for s in [base + prefix, base + on - prefix] {
                    hi = hi.max(s);
                    lo = lo.min(s);
                }
            }
            if i < online.len() {
                prefix += online[i].1;
            }
        }
    }
    (hi, lo)
}

fn error_over_pivots(charges: &[Charge], pivots: &[usize]) -> f64 {
    let (hi, lo) = pivots
        .par_iter()
        .map(|&i| sweep_pivot(charges, i))
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.min(b.1)));
    hi.max(-lo)
}

/// Exact halfplane error of `sample` with respect to `pts`.
pub fn exact_error<T: Scalar>(pts: &[Point<T>], sample: &WeightedSample<T>) -> Result<f64> {
    if pts.len() > EXACT_LIMIT {
        return Err(Error::TooLarge { got: pts.len(), limit: EXACT_LIMIT });
    }
    if pts.is_empty() {
        return Ok(0.0);
    }
    let charges = merge(pts, sample);
    let pivots: Vec<usize> = (0..charges.len()).collect();
    Ok(error_over_pivots(&charges, &pivots))
}

/// Error restricted to halfplanes whose boundary passes through one of
/// `budget` random pivots. Pivots of a smaller budget are a prefix of those
/// of a larger one for the same seed, so the value never decreases with the
/// budget and never exceeds [`exact_error`].
pub fn approx_error<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    sample: &WeightedSample<T>,
    budget: usize,
    rng: &mut R,
) -> Result<f64> {
    if budget == 0 {
        return Err(Error::InvalidParameter("error budget must be at least 1".into()));
    }
    if pts.is_empty() {
        return Ok(0.0);
    }
    let charges = merge(pts, sample);
    let mut order: Vec<usize> = (0..charges.len()).collect();
    order.shuffle(rng);
    order.truncate(budget);
    Ok(error_over_pivots(&charges, &order))
}
