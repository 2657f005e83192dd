//! Planar primitives: points, non-vertical lines, x-interval segments and
//! double wedges, plus point/line duality.
//!
//! Lines are stored in slope/intercept form `y = a·x + b`, so vertical lines
//! cannot be represented at all. Every comparison goes through a
//! [`Tolerance`]; the tie rule everywhere is *closed-above*: a point on a
//! line counts as above it.
//!
//! Duality maps the point `(a, b)` to the line `y = a·x − b` and the line
//! `y = c·x + d` to the point `(c, −d)`. With this convention the signed
//! vertical offset of `p` from `l` equals the signed vertical offset of
//! `l*` from `p*`, so "p above l" holds exactly when "l* above p*".

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        debug_assert!(x.is_finite() && y.is_finite(), "non-finite point");
        Self { x, y }
    }

    /// `None` unless both coordinates are finite.
    pub fn try_new(x: T, y: T) -> Option<Self> {
        (x.is_finite() && y.is_finite()).then_some(Self { x, y })
    }

    pub fn approx_eq(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        tol.eq(self.x, other.x) && tol.eq(self.y, other.y)
    }

    /// Closed-above rule: on the line counts as above.
    #[inline]
    pub fn is_above(&self, l: &Line<T>, tol: &Tolerance<T>) -> bool {
        tol.cmp(self.y, l.eval(self.x)) >= 0
    }

    /// `+1` above, `-1` below, `0` on the line (within tolerance).
    #[inline]
    pub fn side_of(&self, l: &Line<T>, tol: &Tolerance<T>) -> i8 {
        tol.cmp(self.y, l.eval(self.x))
    }

    pub fn rotated(&self, cos: T, sin: T) -> Self {
        Self::new(self.x * cos - self.y * sin, self.x * sin + self.y * cos)
    }
}

/// Non-vertical line `y = a·x + b`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Line<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> Line<T> {
    #[inline]
    pub fn new(a: T, b: T) -> Self {
        debug_assert!(a.is_finite() && b.is_finite(), "non-finite line");
        Self { a, b }
    }

    #[inline]
    pub fn eval(&self, x: T) -> T {
        self.a * x + self.b
    }

    /// x-coordinate where the two lines meet, `None` when (nearly) parallel.
    pub fn intersect_x(&self, other: &Self, tol: &Tolerance<T>) -> Option<T> {
        if tol.eq(self.a, other.a) {
            return None;
        }
        let x = (other.b - self.b) / (self.a - other.a);
        x.is_finite().then_some(x)
    }

    pub fn approx_eq(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        tol.eq(self.a, other.a) && tol.eq(self.b, other.b)
    }

    /// Whole line as an unbounded segment.
    pub fn to_segment(self) -> Segment<T> {
        Segment::new(self, T::neg_infinity(), T::infinity())
    }

    /// Vertical mirror `y -> -y`.
    pub fn mirrored(&self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

/// Non-vertical line through two points.
pub fn line_through<T: Scalar>(p: &Point<T>, q: &Point<T>, tol: &Tolerance<T>) -> Result<Line<T>> {
    if tol.eq(p.x, q.x) {
        return Err(Error::DegenerateLine);
    }
    let a = (q.y - p.y) / (q.x - p.x);
    let b = p.y - a * p.x;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::DegenerateLine);
    }
    Ok(Line::new(a, b))
}

/// A line restricted to the x-interval `[x_lo, x_hi]`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub line: Line<T>,
    pub x_lo: T,
    pub x_hi: T,
}

impl<T: Scalar> Segment<T> {
    pub fn new(line: Line<T>, x_lo: T, x_hi: T) -> Self {
        debug_assert!(x_lo <= x_hi, "segment interval reversed");
        Self { line, x_lo, x_hi }
    }

    pub fn start(&self) -> Option<Point<T>> {
        self.x_lo
            .is_finite()
            .then(|| Point::new(self.x_lo, self.line.eval(self.x_lo)))
    }

    pub fn end(&self) -> Option<Point<T>> {
        self.x_hi
            .is_finite()
            .then(|| Point::new(self.x_hi, self.line.eval(self.x_hi)))
    }

    pub fn is_bounded(&self) -> bool {
        self.x_lo.is_finite() && self.x_hi.is_finite()
    }

    /// Both endpoints finite and approximately equal.
    pub fn is_degenerate(&self, tol: &Tolerance<T>) -> bool {
        match (self.start(), self.end()) {
            (Some(p), Some(q)) => p.approx_eq(&q, tol),
            _ => false,
        }
    }

    pub fn mirrored(&self) -> Self {
        Self::new(self.line.mirrored(), self.x_lo, self.x_hi)
    }
}

/// Sign of `s.line - l` at `x`, including the limits at ±∞.
pub(crate) fn offset_sign_at<T: Scalar>(s: &Line<T>, l: &Line<T>, x: T, tol: &Tolerance<T>) -> i8 {
    if x.is_finite() {
        return tol.cmp(s.eval(x), l.eval(x));
    }
    if tol.eq(s.a, l.a) {
        return tol.cmp(s.b, l.b);
    }
    let slope_sign: i8 = if s.a > l.a { 1 } else { -1 };
    if x > T::zero() {
        slope_sign
    } else {
        -slope_sign
    }
}

/// Offset signs of the two segment ends relative to `l`.
#[inline]
pub(crate) fn segment_signs<T: Scalar>(s: &Segment<T>, l: &Line<T>, tol: &Tolerance<T>) -> (i8, i8) {
    (
        offset_sign_at(&s.line, l, s.x_lo, tol),
        offset_sign_at(&s.line, l, s.x_hi, tol),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Endpoint contact with the line is tolerated.
    Closed,
    /// Any contact counts as crossing.
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Above,
    Below,
    Crosses,
}

impl Side {
    pub fn mirrored(self) -> Self {
        match self {
            Side::Above => Side::Below,
            Side::Below => Side::Above,
            Side::Crosses => Side::Crosses,
        }
    }
}

/// Position of segment `s` relative to line `l`.
///
/// A segment lying on `l` is `Above` in closed mode (closed-above tie rule)
/// and `Crosses` in open mode.
pub fn classify<T: Scalar>(s: &Segment<T>, l: &Line<T>, mode: Mode, tol: &Tolerance<T>) -> Side {
    let (lo, hi) = segment_signs(s, l, tol);
    match mode {
        Mode::Closed if lo >= 0 && hi >= 0 => Side::Above,
        Mode::Closed if lo <= 0 && hi <= 0 => Side::Below,
        Mode::Open if lo > 0 && hi > 0 => Side::Above,
        Mode::Open if lo < 0 && hi < 0 => Side::Below,
        _ => Side::Crosses,
    }
}

/// Intersection of the supporting lines if it lies within both closed x-intervals.
pub fn segment_intersection<T: Scalar>(s: &Segment<T>, t: &Segment<T>, tol: &Tolerance<T>) -> Option<Point<T>> {
    let x = s.line.intersect_x(&t.line, tol)?;
    let inside = |seg: &Segment<T>| {
        (x >= seg.x_lo || tol.eq(x, seg.x_lo)) && (x <= seg.x_hi || tol.eq(x, seg.x_hi))
    };
    if !(inside(s) && inside(t)) {
        return None;
    }
    // Averaging keeps the result symmetric in the two arguments.
    let y = (s.line.eval(x) + t.line.eval(x)) * T::half();
    Point::try_new(x, y)
}

/// Dual of a point: `(a, b) -> y = a·x − b`.
#[inline]
pub fn dualize_point<T: Scalar>(p: &Point<T>) -> Line<T> {
    Line::new(p.x, -p.y)
}

/// Dual of a line: `y = c·x + d -> (c, −d)`.
#[inline]
pub fn dualize_line<T: Scalar>(l: &Line<T>) -> Point<T> {
    Point::new(l.a, -l.b)
}

/// Pair of lines through a common apex; the region between them (the part
/// not containing the vertical direction) is the wedge.
///
/// `upper` has the larger slope, so it lies above `lower` to the right of the apex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleWedge<T> {
    pub apex: Point<T>,
    pub upper: Line<T>,
    pub lower: Line<T>,
}

impl<T: Scalar> DoubleWedge<T> {
    /// Closed membership: on or between the two lines.
    pub fn contains(&self, v: &Point<T>, tol: &Tolerance<T>) -> bool {
        let s1 = v.side_of(&self.upper, tol);
        let s2 = v.side_of(&self.lower, tol);
        s1 * s2 <= 0
    }
}

/// Dual of a bounded segment: the double wedge bounded by the duals of its
/// endpoints, apexed at the dual of its supporting line. A line `g` meets the
/// segment exactly when `dualize_line(g)` lies in the wedge.
pub fn dualize_segment<T: Scalar>(s: &Segment<T>) -> Result<DoubleWedge<T>> {
    let (p, q) = match (s.start(), s.end()) {
        (Some(p), Some(q)) => (p, q),
        _ => return Err(Error::DegenerateLine),
    };
    let (lp, lq) = (dualize_point(&p), dualize_point(&q));
    let (upper, lower) = if lp.a >= lq.a { (lp, lq) } else { (lq, lp) };
    Ok(DoubleWedge {
        apex: dualize_line(&s.line),
        upper,
        lower,
    })
}

/// Closed test whether line `g` meets segment `s`, computed directly in the primal.
pub fn line_meets_segment<T: Scalar>(g: &Line<T>, s: &Segment<T>, tol: &Tolerance<T>) -> bool {
    let (lo, hi) = segment_signs(s, g, tol);
    lo * hi <= 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    fn seg(a: f64, b: f64, lo: f64, hi: f64) -> Segment<f64> {
        Segment::new(Line::new(a, b), lo, hi)
    }

    #[test]
    fn line_through_examples() {
        let l = line_through(&p(0., 0.), &p(1., 1.), &tol()).unwrap();
        assert_eq!(l, Line::new(1., 0.));
        let l = line_through(&p(0., 2.), &p(2., 2.), &tol()).unwrap();
        assert_eq!(l, Line::new(0., 2.));
        assert!(matches!(
            line_through(&p(0., 0.), &p(0., 1.), &tol()),
            Err(Error::DegenerateLine)
        ));
        assert!(matches!(
            line_through(&p(3., 3.), &p(3., 3.), &tol()),
            Err(Error::DegenerateLine)
        ));
    }

    #[test]
    fn classify_examples() {
        let t = tol();
        let x_axis = Line::new(0., 0.);
        let s = seg(0., 1., 0., 1.);
        assert_eq!(classify(&s, &x_axis, Mode::Closed, &t), Side::Above);
        assert_eq!(classify(&s, &x_axis, Mode::Open, &t), Side::Above);

        let diag = seg(1., 0., 0., 1.);
        assert_eq!(classify(&diag, &x_axis, Mode::Closed, &t), Side::Above);
        assert_eq!(classify(&diag, &x_axis, Mode::Open, &t), Side::Crosses);

        let long_diag = seg(1., 0., -1., 1.);
        assert_eq!(classify(&long_diag, &x_axis, Mode::Closed, &t), Side::Crosses);
        assert_eq!(classify(&long_diag, &x_axis, Mode::Open, &t), Side::Crosses);
    }

    #[test]
    fn classify_unbounded_segments() {
        let t = tol();
        let x_axis = Line::new(0., 0.);
        // y = x + 5 on [-3, inf): above everywhere.
        assert_eq!(classify(&seg(1., 5., -3., f64::INFINITY), &x_axis, Mode::Open, &t), Side::Above);
        // Same line on (-inf, 0] dips below.
        assert_eq!(classify(&seg(1., 5., f64::NEG_INFINITY, 0.), &x_axis, Mode::Closed, &t), Side::Crosses);
        // Parallel full lines.
        let l = Line::new(2., 1.).to_segment();
        assert_eq!(classify(&l, &Line::new(2., 0.), Mode::Open, &t), Side::Above);
        assert_eq!(classify(&l, &Line::new(2., 3.), Mode::Open, &t), Side::Below);
        assert_eq!(classify(&l, &Line::new(2., 1.), Mode::Closed, &t), Side::Above);
        assert_eq!(classify(&l, &Line::new(2., 1.), Mode::Open, &t), Side::Crosses);
    }

    #[test]
    fn segment_intersection_examples() {
        let t = tol();
        let a = seg(1., 0., -1., 1.);
        let b = seg(-1., 0., -1., 1.);
        let x = segment_intersection(&a, &b, &t).unwrap();
        assert!(x.approx_eq(&p(0., 0.), &t));
        assert!(segment_intersection(&seg(1., 0., 2., 3.), &b, &t).is_none());
        let par1 = Line::new(1., 1.).to_segment();
        let par2 = Line::new(1., 2.).to_segment();
        assert!(segment_intersection(&par1, &par2, &t).is_none());
    }

    #[test]
    fn duality_examples() {
        assert_eq!(dualize_point(&p(1., 0.)), Line::new(1., 0.));
        assert_eq!(dualize_line(&dualize_point(&p(1., 0.))), p(1., 0.));
        assert_eq!(dualize_point(&p(0., 0.)), Line::new(0., 0.));
    }

    #[test]
    fn dualize_unbounded_segment_fails() {
        let s = Line::new(1., 0.).to_segment();
        assert!(matches!(dualize_segment(&s), Err(Error::DegenerateLine)));
    }

    // Brute-force check over random instances: p above l exactly when the
    // dual point of l lies above the dual line of p.
    #[test]
    fn duality_preserves_above_below_on_random_pairs() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let pt = p(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let l = Line::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let primal = pt.side_of(&l, &t);
            let dual = dualize_line(&l).side_of(&dualize_point(&pt), &t);
            assert_eq!(primal, dual);
            assert_ne!(primal, 0);
        }
    }

    // Exhaustive wedge-incidence check at n = 100 lines x 100 segments.
    #[test]
    fn wedge_incidence_matches_primal_crossing() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lines: Vec<Line<f64>> = (0..100)
            .map(|_| Line::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
            .collect();
        let segs: Vec<Segment<f64>> = (0..100)
            .map(|_| {
                let lo = rng.random_range(-3.0..3.0);
                let hi = lo + rng.random_range(0.01..3.0);
                seg(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), lo, hi)
            })
            .collect();
        let mut crossings = 0;
        for s in &segs {
            let w = dualize_segment(s).unwrap();
            for g in &lines {
                let primal = line_meets_segment(g, s, &t);
                assert_eq!(primal, w.contains(&dualize_line(g), &t));
                crossings += primal as usize;
            }
        }
        assert!(crossings > 100 && crossings < 9900);
    }

    fn coord() -> impl Strategy<Value = f64> {
        -100.0f64..100.0
    }

    proptest! {
        #[test]
        fn duality_is_an_involution(x in coord(), y in coord()) {
            let pt = p(x, y);
            prop_assert!(dualize_line(&dualize_point(&pt)).approx_eq(&pt, &tol()));
        }

        #[test]
        fn classify_mirrors(a in coord(), b in coord(), lo in coord(), len in 0.01f64..50.0,
                            la in coord(), lb in coord(), open in any::<bool>()) {
            let s = seg(a, b, lo, lo + len);
            let l = Line::new(la, lb);
            let mode = if open { Mode::Open } else { Mode::Closed };
            let t = tol();
            let (s0, s1) = segment_signs(&s, &l, &t);
            prop_assume!(s0 != 0 && s1 != 0);
            prop_assert_eq!(classify(&s, &l, mode, &t).mirrored(),
                            classify(&s.mirrored(), &l.mirrored(), mode, &t));
        }

        #[test]
        fn intersection_is_symmetric(a1 in coord(), b1 in coord(), a2 in coord(), b2 in coord(),
                                     lo1 in coord(), lo2 in coord(), len1 in 0.0f64..80.0, len2 in 0.0f64..80.0) {
            let s = seg(a1, b1, lo1, lo1 + len1);
            let t2 = seg(a2, b2, lo2, lo2 + len2);
            let t = tol();
            prop_assert_eq!(segment_intersection(&s, &t2, &t), segment_intersection(&t2, &s, &t));
        }

        #[test]
        fn line_through_hits_both_points(x1 in coord(), y1 in coord(), dx in 0.5f64..20.0, y2 in coord()) {
            let t = tol();
            let (a, b) = (p(x1, y1), p(x1 + dx, y2));
            let l = line_through(&a, &b, &t).unwrap();
            let loose = Tolerance::new(1e-9, 1e-9).unwrap();
            prop_assert!(loose.eq(l.eval(a.x), a.y));
            prop_assert!(loose.eq(l.eval(b.x), b.y));
        }
    }
}
