//! Convex, possibly unbounded planar regions stored as a short list of
//! non-redundant halfplane bounds.
//!
//! Non-vertical boundaries are lines; vertical boundaries are plain x-bounds
//! (walls), so no vertical line ever needs a slope/intercept form.

use crate::geometry::{Line, Point, Segment};
use crate::scalar::{Scalar, Tolerance};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Constraint<T> {
    /// `y >= line(x)`
    Above(Line<T>),
    /// `y <= line(x)`
    Below(Line<T>),
    /// `x >= c`
    RightOf(T),
    /// `x <= c`
    LeftOf(T),
}

impl<T: Scalar> Constraint<T> {
    /// Closed membership.
    #[inline]
    pub fn admits(&self, p: &Point<T>, tol: &Tolerance<T>) -> bool {
        self.signed(p, tol) >= 0
    }

    /// `+1` strictly inside, `0` on the boundary, `-1` outside.
    #[inline]
    pub fn signed(&self, p: &Point<T>, tol: &Tolerance<T>) -> i8 {
        match self {
            Constraint::Above(l) => tol.cmp(p.y, l.eval(p.x)),
            Constraint::Below(l) => tol.cmp(l.eval(p.x), p.y),
            Constraint::RightOf(c) => tol.cmp(p.x, *c),
            Constraint::LeftOf(c) => tol.cmp(*c, p.x),
        }
    }

    /// Membership under the global tie rule (points on a line go above,
    /// points on a wall go right), so complementary bounds never share a point.
    #[inline]
    pub fn owns(&self, p: &Point<T>, tol: &Tolerance<T>) -> bool {
        match self {
            Constraint::Above(_) | Constraint::RightOf(_) => self.signed(p, tol) >= 0,
            Constraint::Below(_) | Constraint::LeftOf(_) => self.signed(p, tol) > 0,
        }
    }

    pub fn complement(&self) -> Self {
        match *self {
            Constraint::Above(l) => Constraint::Below(l),
            Constraint::Below(l) => Constraint::Above(l),
            Constraint::RightOf(c) => Constraint::LeftOf(c),
            Constraint::LeftOf(c) => Constraint::RightOf(c),
        }
    }

    fn same_as(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        match (self, other) {
            (Constraint::Above(a), Constraint::Above(b)) | (Constraint::Below(a), Constraint::Below(b)) => {
                a.approx_eq(b, tol)
            }
            (Constraint::RightOf(a), Constraint::RightOf(b)) | (Constraint::LeftOf(a), Constraint::LeftOf(b)) => {
                tol.eq(*a, *b)
            }
            _ => false,
        }
    }

    fn normal_angle(&self) -> f64 {
        match self {
            Constraint::Above(l) => (-1.0f64).atan2(l.a.as_f64()),
            Constraint::Below(l) => 1.0f64.atan2(-l.a.as_f64()),
            Constraint::LeftOf(_) => 0.0,
            Constraint::RightOf(_) => std::f64::consts::PI,
        }
    }

    /// Restriction this constraint places on the x-range of points of `m`.
    /// `None` when the whole line is excluded.
    fn restrict_line(&self, m: &Line<T>, tol: &Tolerance<T>) -> Option<(T, T)> {
        let (neg, pos) = (T::neg_infinity(), T::infinity());
        let (n, above) = match self {
            Constraint::RightOf(c) => return Some((*c, pos)),
            Constraint::LeftOf(c) => return Some((neg, *c)),
            Constraint::Above(n) => (n, true),
            Constraint::Below(n) => (n, false),
        };
        if tol.eq(m.a, n.a) {
            let s = tol.cmp(m.b, n.b);
            let ok = if above { s >= 0 } else { s <= 0 };
            return ok.then_some((neg, pos));
        }
        let x = (n.b - m.b) / (m.a - n.a);
        // m - n is increasing in x when m.a > n.a.
        let increasing = m.a > n.a;
        if increasing == above {
            Some((x, pos))
        } else {
            Some((neg, x))
        }
    }

    /// Restriction on y along the vertical line `x = c`.
    fn restrict_wall(&self, c: T, tol: &Tolerance<T>) -> Option<(T, T)> {
        let (neg, pos) = (T::neg_infinity(), T::infinity());
        match self {
            Constraint::Above(n) => Some((n.eval(c), pos)),
            Constraint::Below(n) => Some((neg, n.eval(c))),
            Constraint::RightOf(d) => (c >= *d || tol.eq(c, *d)).then_some((neg, pos)),
            Constraint::LeftOf(d) => (c <= *d || tol.eq(c, *d)).then_some((neg, pos)),
        }
    }
}

/// A boundary constraint together with an optional label (e.g. the index of
/// the input line it came from).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound<T> {
    pub constraint: Constraint<T>,
    pub label: Option<u32>,
}

impl<T> Bound<T> {
    pub fn new(constraint: Constraint<T>) -> Self {
        Self { constraint, label: None }
    }

    pub fn labeled(constraint: Constraint<T>, label: u32) -> Self {
        Self {
            constraint,
            label: Some(label),
        }
    }
}

/// One side of a region's boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Edge<T> {
    /// Piece of a non-vertical boundary line.
    Segment { segment: Segment<T>, bound: usize },
    /// Piece of the vertical wall `x = x`.
    Wall { x: T, y_lo: T, y_hi: T, bound: usize },
}

impl<T: Scalar> Edge<T> {
    pub fn bound(&self) -> usize {
        match *self {
            Edge::Segment { bound, .. } | Edge::Wall { bound, .. } => bound,
        }
    }

    pub fn endpoints(&self) -> (Option<Point<T>>, Option<Point<T>>) {
        match *self {
            Edge::Segment { segment, .. } => (segment.start(), segment.end()),
            Edge::Wall { x, y_lo, y_hi, .. } => (
                y_lo.is_finite().then(|| Point::new(x, y_lo)),
                y_hi.is_finite().then(|| Point::new(x, y_hi)),
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvexRegion<T> {
    bounds: Vec<Bound<T>>,
}

impl<T: Scalar> ConvexRegion<T> {
    pub fn whole_plane() -> Self {
        Self { bounds: Vec::new() }
    }

    /// Axis-aligned box `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: T, x1: T, y0: T, y1: T) -> Self {
        Self {
            bounds: vec![
                Bound::new(Constraint::Above(Line::new(T::zero(), y0))),
                Bound::new(Constraint::LeftOf(x1)),
                Bound::new(Constraint::Below(Line::new(T::zero(), y1))),
                Bound::new(Constraint::RightOf(x0)),
            ],
        }
    }

    /// Convex hull of `pts` as a region. Edges steeper than
    /// `STEEP_SLOPE` are replaced by an enclosing vertical wall. Fewer than
    /// three affinely independent points give a slightly padded bounding box.
    pub fn hull(pts: &[Point<T>], tol: &Tolerance<T>) -> Self {
        let mut v: Vec<Point<T>> = pts.to_vec();
        v.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
        v.dedup_by(|a, b| a.x == b.x && a.y == b.y);
        let cross = |o: &Point<T>, a: &Point<T>, b: &Point<T>| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
        let mut h: Vec<Point<T>> = Vec::with_capacity(2 * v.len());
        for pass in 0..2 {
            let start = h.len();
            let iter: Box<dyn Iterator<Item = &Point<T>>> = if pass == 0 { Box::new(v.iter()) } else { Box::new(v.iter().rev()) };
            for p in iter {
                while h.len() >= start + 2 && cross(&h[h.len() - 2], &h[h.len() - 1], p) <= T::zero() {
                    h.pop();
                }
                h.push(*p);
            }
            h.pop();
        }
        if h.len() < 3 {
            return Self::bounding_box(pts, 1e-9);
        }
        let steep = T::lit(T::STEEP_SLOPE);
        let mut bounds = Vec::with_capacity(h.len());
        for i in 0..h.len() {
            let (p, q) = (h[i], h[(i + 1) % h.len()]);
            let (dx, dy) = (q.x - p.x, q.y - p.y);
            // Counterclockwise order: the interior lies to the left of p -> q.
            let c = if dy.abs() > steep * dx.abs() {
                if dy > T::zero() {
                    Constraint::LeftOf(p.x.max(q.x))
                } else {
                    Constraint::RightOf(p.x.min(q.x))
                }
            } else {
                let a = dy / dx;
                let l = Line::new(a, p.y - a * p.x);
                if dx > T::zero() {
                    Constraint::Above(l)
                } else {
                    Constraint::Below(l)
                }
            };
            bounds.push(Bound::new(c));
        }
        Self::from_bounds(bounds, tol)
    }

    /// Bounding box of `pts` grown by `margin` times its larger side (at least 1e-9 absolute).
    pub fn bounding_box(pts: &[Point<T>], margin: f64) -> Self {
        if pts.is_empty() {
            return Self::whole_plane();
        }
        let (mut x0, mut x1, mut y0, mut y1) = (pts[0].x, pts[0].x, pts[0].y, pts[0].y);
        for p in pts {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        let pad = ((x1 - x0).max(y1 - y0) * T::lit(margin)).max(T::lit(1e-6));
        Self::rect(x0 - pad, x1 + pad, y0 - pad, y1 + pad)
    }

    /// Builds a region from raw bounds, dropping duplicates and redundant ones.
    pub fn from_bounds(bounds: impl IntoIterator<Item = Bound<T>>, tol: &Tolerance<T>) -> Self {
        let mut r = Self::whole_plane();
        for b in bounds {
            r.push_raw(b, tol);
        }
        r.prune(tol);
        r
    }

    pub fn bounds(&self) -> &[Bound<T>] {
        &self.bounds
    }

    pub fn side_count(&self) -> usize {
        self.bounds.len()
    }

    fn push_raw(&mut self, b: Bound<T>, tol: &Tolerance<T>) -> bool {
        if self.bounds.iter().any(|e| e.constraint.same_as(&b.constraint, tol)) {
            return false;
        }
        self.bounds.push(b);
        true
    }

    /// Intersection with one more halfplane.
    pub fn with(&self, b: Bound<T>, tol: &Tolerance<T>) -> Self {
        let mut r = self.clone();
        if r.push_raw(b, tol) {
            r.prune(tol);
        }
        r
    }

    pub fn intersect(&self, other: &Self, tol: &Tolerance<T>) -> Self {
        let mut r = self.clone();
        let mut changed = false;
        for b in &other.bounds {
            changed |= r.push_raw(*b, tol);
        }
        if changed {
            r.prune(tol);
        }
        r
    }

    fn prune(&mut self, tol: &Tolerance<T>) {
        let keep: Vec<bool> = (0..self.bounds.len()).map(|i| self.edge_of(i, tol).is_some()).collect();
        // An infeasible region has no edges at all; keep its bounds so it stays empty.
        if keep.iter().any(|&k| k) {
            let mut it = keep.into_iter();
            self.bounds.retain(|_| it.next().unwrap_or(false));
        }
    }

    /// Interval of x over which the points of `m` satisfy every bound except `skip`.
    fn line_interval_skip(&self, m: &Line<T>, skip: Option<usize>, tol: &Tolerance<T>) -> Option<(T, T)> {
        let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
        for (j, b) in self.bounds.iter().enumerate() {
            if Some(j) == skip {
                continue;
            }
            let (l, h) = b.constraint.restrict_line(m, tol)?;
            lo = lo.max(l);
            hi = hi.min(h);
        }
        Some((lo, hi))
    }

    fn edge_of(&self, i: usize, tol: &Tolerance<T>) -> Option<Edge<T>> {
        match self.bounds[i].constraint {
            Constraint::Above(m) | Constraint::Below(m) => {
                let (lo, hi) = self.line_interval_skip(&m, Some(i), tol)?;
                if !(lo < hi) {
                    return None;
                }
                let segment = Segment::new(m, lo, hi);
                (!segment.is_degenerate(tol)).then_some(Edge::Segment { segment, bound: i })
            }
            Constraint::RightOf(c) | Constraint::LeftOf(c) => {
                let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
                for (j, b) in self.bounds.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let (l, h) = b.constraint.restrict_wall(c, tol)?;
                    lo = lo.max(l);
                    hi = hi.min(h);
                }
                (lo < hi && !tol.eq(lo, hi)).then_some(Edge::Wall { x: c, y_lo: lo, y_hi: hi, bound: i })
            }
        }
    }

    /// Boundary edges in counter-clockwise order.
    pub fn edges(&self, tol: &Tolerance<T>) -> Vec<Edge<T>> {
        let mut order: Vec<(f64, Edge<T>)> = (0..self.bounds.len())
            .filter_map(|i| self.edge_of(i, tol).map(|e| (self.bounds[i].constraint.normal_angle(), e)))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        order.into_iter().map(|(_, e)| e).collect()
    }

    /// Finite vertices in counter-clockwise order.
    pub fn vertices(&self, tol: &Tolerance<T>) -> Vec<Point<T>> {
        self.edges(tol)
            .iter()
            .filter_map(|e| self.ccw_start(e))
            .collect()
    }

    fn ccw_start(&self, e: &Edge<T>) -> Option<Point<T>> {
        let (lo, hi) = e.endpoints();
        match self.bounds[e.bound()].constraint {
            Constraint::Above(_) | Constraint::LeftOf(_) => lo,
            Constraint::Below(_) | Constraint::RightOf(_) => hi,
        }
    }

    /// Vertices paired with the labels of the two bounds that meet there
    /// (incoming edge first).
    pub fn labeled_vertices(&self, tol: &Tolerance<T>) -> Vec<(Point<T>, Option<u32>, Option<u32>)> {
        let edges = self.edges(tol);
        let k = edges.len();
        let mut out = Vec::with_capacity(k);
        for (i, e) in edges.iter().enumerate() {
            if let Some(v) = self.ccw_start(e) {
                let prev = &edges[(i + k - 1) % k];
                out.push((v, self.bounds[prev.bound()].label, self.bounds[e.bound()].label));
            }
        }
        out
    }

    pub fn is_bounded(&self, tol: &Tolerance<T>) -> bool {
        let edges = self.edges(tol);
        edges.len() >= 3
            && edges.iter().all(|e| {
                let (a, b) = e.endpoints();
                a.is_some() && b.is_some()
            })
    }

    pub fn is_empty(&self, tol: &Tolerance<T>) -> bool {
        !self.bounds.is_empty() && (0..self.bounds.len()).all(|i| self.edge_of(i, tol).is_none())
    }

    /// Closed membership.
    pub fn contains(&self, p: &Point<T>, tol: &Tolerance<T>) -> bool {
        self.bounds.iter().all(|b| b.constraint.admits(p, tol))
    }

    /// Membership under the tie rule.
    pub fn owns(&self, p: &Point<T>, tol: &Tolerance<T>) -> bool {
        self.bounds.iter().all(|b| b.constraint.owns(p, tol))
    }

    /// Closed x-interval of `l` inside the region, if any.
    pub fn line_interval(&self, l: &Line<T>, tol: &Tolerance<T>) -> Option<(T, T)> {
        let (lo, hi) = self.line_interval_skip(l, None, tol)?;
        (lo <= hi || tol.eq(lo, hi)).then_some((lo, hi))
    }

    /// The part of `l` passing through the interior, as an x-interval.
    /// `None` when `l` misses the region, only touches it, or runs along its boundary.
    pub fn clip_line(&self, l: &Line<T>, tol: &Tolerance<T>) -> Option<(T, T)> {
        let (lo, hi) = self.line_interval_skip(l, None, tol)?;
        if !(lo < hi) || Segment::new(*l, lo, hi).is_degenerate(tol) {
            return None;
        }
        let x = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo + hi) * T::half(),
            (false, true) => hi - T::one().max(hi.abs()),
            (true, false) => lo + T::one().max(lo.abs()),
            (false, false) => T::zero(),
        };
        let probe = Point::new(x, l.eval(x));
        self.bounds
            .iter()
            .all(|b| b.constraint.signed(&probe, tol) > 0)
            .then_some((lo, hi))
    }

    /// True when `l` passes through the interior.
    pub fn crosses_line(&self, l: &Line<T>, tol: &Tolerance<T>) -> bool {
        self.clip_line(l, tol).is_some()
    }

    /// Mean of the finite vertices (an interior point for bounded regions).
    pub fn vertex_centroid(&self, tol: &Tolerance<T>) -> Option<Point<T>> {
        let vs = self.vertices(tol);
        if vs.is_empty() {
            return None;
        }
        let n = T::from_usize(vs.len())?;
        let (sx, sy) = vs.iter().fold((T::zero(), T::zero()), |(a, b), v| (a + v.x, b + v.y));
        Some(Point::new(sx / n, sy / n))
    }
}
