//! Planted spatial anomalies and the halfplane scan statistic
//! `Φ(h) = |m(h) − b(h)|`, where `m` and `b` are the measured and baseline
//! fractions inside `h`.

use crate::error::{Error, Result};
use crate::geometry::{line_through, Line, Point};
use crate::partition::PartitionParams;
use crate::sampling::{epsilon_sample, Presample, SampleMethod, WeightedSample};
use crate::scalar::{Scalar, Tolerance};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The closed upper side of `line`, or the open lower side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane<T> {
    pub line: Line<T>,
    pub above: bool,
}

impl<T: Scalar> HalfPlane<T> {
    pub fn contains(&self, p: &Point<T>, tol: &Tolerance<T>) -> bool {
        p.is_above(&self.line, tol) == self.above
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoints<T> {
    pub points: Vec<Point<T>>,
    pub measured: Vec<bool>,
    pub baseline: Vec<bool>,
    pub planted: HalfPlane<T>,
}

/// Labeling probabilities inside and outside the planted region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantParams {
    pub fraction: f64,
    pub p_in: f64,
    pub q_in: f64,
    pub p_out: f64,
    pub q_out: f64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self { fraction: 0.02, p_in: 0.7, q_in: 0.3, p_out: 0.5, q_out: 0.5 }
    }
}

/// Picks a halfplane holding `fraction` of the points (random slope in
/// `[-1.5, 1.5]` and random side) and draws the two flags of every point
/// independently.
pub fn plant_anomaly<T: Scalar, R: Rng + ?Sized>(
    pts: &[Point<T>],
    params: &PlantParams,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<LabeledPoints<T>> {
    let PlantParams { fraction, p_in, q_in, p_out, q_out } = *params;
    for (name, v) in [("fraction", fraction), ("p_in", p_in), ("q_in", q_in), ("p_out", p_out), ("q_out", q_out)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1] (got {v})")));
        }
    }
    if pts.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let a = T::lit(rng.random_range(-1.5..=1.5));
    let above = rng.random_bool(0.5);
    let mut keys: Vec<T> = pts.iter().map(|p| p.y - a * p.x).collect();
    // Inside points first.
    keys.sort_by(|u, v| if above { v.partial_cmp(u) } else { u.partial_cmp(v) }.unwrap());
    let n = pts.len();
    let m = ((fraction * n as f64).round() as usize).min(n);
    let spread = keys[0] - keys[n - 1];
    let pad = spread.abs() + T::one();
    let b = if m == 0 {
        keys[0] + if above { pad } else { -pad }
    } else if m == n {
        keys[n - 1] - if above { pad } else { -pad }
    } else {
        (keys[m - 1] + keys[m]) * T::half()
    };
    let planted = HalfPlane { line: Line::new(a, b), above };
    let mut measured = Vec::with_capacity(n);
    let mut baseline = Vec::with_capacity(n);
    for p in pts {
        let (pm, pb) = if planted.contains(p, tol) { (p_in, q_in) } else { (p_out, q_out) };
        measured.push(rng.random_bool(pm));
        baseline.push(rng.random_bool(pb));
    }
    Ok(LabeledPoints { points: pts.to_vec(), measured, baseline, planted })
}

/// `|m(h) − b(h)|` computed from all labeled points.
pub fn phi<T: Scalar>(l: &LabeledPoints<T>, h: &HalfPlane<T>, tol: &Tolerance<T>) -> f64 {
    let (mut m_in, mut m_all, mut b_in, mut b_all) = (0usize, 0usize, 0usize, 0usize);
    for (i, p) in l.points.iter().enumerate() {
        let inside = h.contains(p, tol);
        if l.measured[i] {
            m_all += 1;
            m_in += inside as usize;
        }
        if l.baseline[i] {
            b_all += 1;
            b_in += inside as usize;
        }
    }
    (ratio(m_in as f64, m_all as f64) - ratio(b_in as f64, b_all as f64)).abs()
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult<T> {
    pub best: HalfPlane<T>,
    /// `Φ` of the best halfplane, on all labeled points.
    pub phi: f64,
    /// `Φ` of the best halfplane as estimated from the sample.
    pub phi_sample: f64,
    /// `Φ` of the planted halfplane, on all labeled points.
    pub phi_planted: f64,
    /// `|phi − phi_planted|`
    pub discrepancy_error: f64,
    pub candidates: usize,
}

const RAY_SLACK: f64 = 1e-9;

/// Samples of the measured and of the baseline points, `k/2` each, with
/// indices into `l.points`.
pub fn sample_labeled<T: Scalar, R: Rng + ?Sized>(
    l: &LabeledPoints<T>,
    k: usize,
    method: SampleMethod,
    params: &PartitionParams,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<(WeightedSample<T>, WeightedSample<T>)> {
    let one = |flags: &[bool], rng: &mut R| -> Result<WeightedSample<T>> {
        let ids: Vec<usize> = (0..l.points.len()).filter(|&i| flags[i]).collect();
        let sub: Vec<Point<T>> = ids.iter().map(|&i| l.points[i]).collect();
        let kk = (k / 2).clamp(2, sub.len().max(2));
        let mut s = epsilon_sample(&sub, kk, method, params, Presample::Never, rng, tol)?;
        for i in s.indices.iter_mut() {
            *i = ids[*i];
        }
        Ok(s)
    };
    let m = one(&l.measured, rng)?;
    let b = one(&l.baseline, rng)?;
    Ok((m, b))
}

/// Searches halfplanes bounded by lines through pairs of `net_size` random
/// points, estimating `m` and `b` from their weighted samples, and reports
/// how far the winner's true statistic is from the planted one.
pub fn scan_discrepancy<T: Scalar, R: Rng + ?Sized>(
    l: &LabeledPoints<T>,
    measured: &WeightedSample<T>,
    baseline: &WeightedSample<T>,
    net_size: usize,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<ScanResult<T>> {
    if net_size < 2 {
        return Err(Error::InvalidParameter(format!("net size must be at least 2 (got {net_size})")));
    }
    if l.points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: l.points.len() });
    }
    let net_size = net_size.min(l.points.len());
    let mut net = sample(rng, l.points.len(), net_size).into_vec();
    net.sort_unstable();
    // Candidate lines grouped by their first net point.
    let mut lines: Vec<Line<T>> = Vec::with_capacity(net_size * (net_size - 1) / 2);
    let mut groups: Vec<(usize, Vec<(usize, Line<T>)>)> = Vec::with_capacity(net_size);
    for (i, &u) in net.iter().enumerate() {
        let mut partners = Vec::new();
        for &v in &net[i + 1..] {
            if let Ok(line) = line_through(&l.points[u], &l.points[v], tol) {
                lines.push(line);
                partners.push((v, line));
            }
        }
        groups.push((u, partners));
    }
    if lines.is_empty() {
        return Err(Error::DegenerateLine);
    }

    // Both samples as one list of (point, measured weight, baseline weight).
    let mut wm: Vec<(Point<T>, f64, f64)> = Vec::with_capacity(measured.len() + baseline.len());
    wm.extend(measured.points.iter().zip(&measured.weights).map(|(p, &w)| (*p, w, 0.0)));
    wm.extend(baseline.points.iter().zip(&baseline.weights).map(|(p, &w)| (*p, 0.0, w)));
    let m_tot = measured.total_weight();
    let b_tot = baseline.total_weight();
    let pts = &l.points;

    // For each pivot, the weight above the line through it and a partner
    // comes from an angular sweep: around pivot `u`, a point at angle `φ` is
    // above the line with direction angle `θ ∈ (-π/2, π/2)` iff
    // `φ ∈ [θ, θ + π]`. Points within a tiny angle of either ray are
    // tested against the line directly.
    let scored: Vec<Vec<(f64, bool)>> = groups
        .par_iter()
        .map(|(u, partners)| {
            if partners.is_empty() {
                return Vec::new();
            }
            let (ux, uy) = (pts[*u].x.as_f64(), pts[*u].y.as_f64());
            let (mut m0, mut b0) = (0.0, 0.0);
            let mut around: Vec<(f64, f64, f64, usize)> = Vec::with_capacity(wm.len());
            for (k, &(p, m, b)) in wm.iter().enumerate() {
                let (x, y) = (p.x.as_f64(), p.y.as_f64());
                if x == ux && y == uy {
                    m0 += m;
                    b0 += b;
                } else {
                    around.push(((y - uy).atan2(x - ux), m, b, k));
                }
            }
            around.sort_by(|a, b| a.0.total_cmp(&b.0));
            let len = around.len();
            let angle = |i: usize| if i < len { around[i].0 } else { around[i - len].0 + std::f64::consts::TAU };
            let mut pm = vec![0.0; 2 * len + 1];
            let mut pb = vec![0.0; 2 * len + 1];
            for i in 0..2 * len {
                let (_, m, b, _) = around[i % len];
                pm[i + 1] = pm[i] + m;
                pb[i + 1] = pb[i] + b;
            }
            let lower = |x: f64| {
                let (mut lo, mut hi) = (0, 2 * len);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if angle(mid) < x {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                lo
            };
            let upper = |x: f64| {
                let (mut lo, mut hi) = (0, 2 * len);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if angle(mid) <= x {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                lo
            };
            partners
                .iter()
                .map(|&(v, ref line)| {
                    let (mut dx, mut dy) = (pts[v].x.as_f64() - ux, pts[v].y.as_f64() - uy);
                    if dx < 0.0 {
                        (dx, dy) = (-dx, -dy);
                    }
                    let theta = dy.atan2(dx);
                    let back = theta + std::f64::consts::PI;
                    let (a, b) = (upper(theta + RAY_SLACK), lower(back - RAY_SLACK));
                    let (mut m, mut bb) = (m0, b0);
                    if a < b {
                        m += pm[b] - pm[a];
                        bb += pb[b] - pb[a];
                    }
                    for (lo, hi) in [(lower(theta - RAY_SLACK), a), (b, upper(back + RAY_SLACK))] {
                        for i in lo..hi {
                            let (_, pm_i, pb_i, k) = around[i % len];
                            if wm[k].0.is_above(line, tol) {
                                m += pm_i;
                                bb += pb_i;
                            }
                        }
                    }
                    let up = (ratio(m, m_tot) - ratio(bb, b_tot)).abs();
                    let down = (ratio(m_tot - m, m_tot) - ratio(b_tot - bb, b_tot)).abs();
                    if up >= down {
                        (up, true)
                    } else {
                        (down, false)
                    }
                })
                .collect()
        })
        .collect();
    let mut best_idx = 0;
    let mut best_val = (f64::NEG_INFINITY, true);
    for (i, v) in scored.into_iter().flatten().enumerate() {
        if v.0 > best_val.0 {
            best_idx = i;
            best_val = v;
        }
    }
    let (best_val, above) = best_val;
    let best = HalfPlane { line: lines[best_idx], above };
    let phi_best = phi(l, &best, tol);
    let phi_planted = phi(l, &l.planted, tol);
    Ok(ScanResult {
        best,
        phi: phi_best,
        phi_sample: best_val,
        phi_planted,
        discrepancy_error: (phi_best - phi_planted).abs(),
        candidates: lines.len(),
    })
}
