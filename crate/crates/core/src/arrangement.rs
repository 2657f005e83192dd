//! Binary space decomposition by lines (and, for trapezoids, x-walls).
//!
//! Every node owns a convex region; internal nodes carry the splitter that
//! divides it, leaves carry resident point ids and the clipped pieces of input
//! lines that cross them. Points on a splitting line go to the above child,
//! points on a wall go to the right child.

use crate::error::{Error, Result};
use crate::geometry::{classify, line_through, segment_signs, DoubleWedge, Line, Mode, Point, Segment, Side};
use crate::region::{Bound, Constraint, ConvexRegion};
use crate::render::SvgCanvas;
use crate::scalar::{Scalar, Tolerance};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    Polygon { max_sides: usize },
    Trapezoid,
}

impl Default for CellKind {
    fn default() -> Self {
        CellKind::Polygon { max_sides: 8 }
    }
}

impl CellKind {
    pub fn polygon(max_sides: usize) -> Result<Self> {
        if max_sides < 3 {
            return Err(Error::InvalidParameter(format!("max_sides must be >= 3 (got {max_sides})")));
        }
        Ok(CellKind::Polygon { max_sides })
    }

    pub fn label(&self) -> String {
        match self {
            CellKind::Polygon { max_sides } => format!("poly{max_sides}"),
            CellKind::Trapezoid => "trapezoid".into(),
        }
    }
}

impl std::str::FromStr for CellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trapezoid" | "trap" => Ok(CellKind::Trapezoid),
            _ => match s.strip_prefix("poly").map(str::parse::<usize>) {
                Some(Ok(k)) => CellKind::polygon(k),
                _ => Err(Error::InvalidParameter(format!("unknown cell kind '{s}'"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Splitter<T> {
    /// Non-vertical line; `source` is the input line id when it came from the line set.
    Line { line: Line<T>, source: Option<u32> },
    /// Vertical wall `x = c`.
    X(T),
}

impl<T: Scalar> Splitter<T> {
    fn bounds(&self) -> (Bound<T>, Bound<T>) {
        match *self {
            Splitter::Line { line, source } => (
                Bound { constraint: Constraint::Above(line), label: source },
                Bound { constraint: Constraint::Below(line), label: source },
            ),
            Splitter::X(c) => (Bound::new(Constraint::RightOf(c)), Bound::new(Constraint::LeftOf(c))),
        }
    }

    #[inline]
    fn goes_above(&self, p: &Point<T>, tol: &Tolerance<T>) -> bool {
        match self {
            Splitter::Line { line, .. } => p.is_above(line, tol),
            Splitter::X(c) => tol.cmp(p.x, *c) >= 0,
        }
    }
}

/// The part of input line `line` inside a leaf, as an x-interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece<T> {
    pub line: u32,
    pub x_lo: T,
    pub x_hi: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
}

impl<T: Scalar> BBox<T> {
    fn of(p: &Point<T>) -> Self {
        Self { x0: p.x, x1: p.x, y0: p.y, y1: p.y }
    }

    fn grow(&mut self, p: &Point<T>) {
        self.x0 = self.x0.min(p.x);
        self.x1 = self.x1.max(p.x);
        self.y0 = self.y0.min(p.y);
        self.y1 = self.y1.max(p.y);
    }

    fn union(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (Some(mut a), Some(b)) => {
                a.grow(&Point::new(b.x0, b.y0));
                a.grow(&Point::new(b.x1, b.y1));
                Some(a)
            }
            (a, None) => a,
            (None, b) => b,
        }
    }

    fn corners(&self) -> [Point<T>; 4] {
        [
            Point::new(self.x0, self.y0),
            Point::new(self.x1, self.y0),
            Point::new(self.x1, self.y1),
            Point::new(self.x0, self.y1),
        ]
    }
}

#[derive(Clone, Debug)]
enum Content<T> {
    Internal { splitter: Splitter<T>, above: usize, below: usize },
    Leaf { points: Vec<usize>, pieces: Vec<Piece<T>> },
}

#[derive(Clone, Debug)]
struct Node<T> {
    region: ConvexRegion<T>,
    count: usize,
    bbox: Option<BBox<T>>,
    content: Content<T>,
}

/// Serializable summary of one leaf.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellDump {
    pub id: usize,
    pub vertices: Vec<[f64; 2]>,
    pub bounded: bool,
    pub sides: usize,
    pub points: usize,
    pub crossing: usize,
}

#[derive(Clone, Debug)]
pub struct ArrangementTree<T> {
    kind: CellKind,
    tol: Tolerance<T>,
    lines: Vec<Line<T>>,
    points: Vec<Point<T>>,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> ArrangementTree<T> {
    /// Single leaf covering the whole plane, no lines.
    pub fn new(kind: CellKind, tol: Tolerance<T>) -> Self {
        Self::with_lines(kind, ConvexRegion::whole_plane(), Vec::new(), tol)
    }

    /// Single leaf covering `region`, crossed by whichever of `lines` pass through it.
    pub fn with_lines(kind: CellKind, region: ConvexRegion<T>, lines: Vec<Line<T>>, tol: Tolerance<T>) -> Self {
        let pieces = lines
            .iter()
            .enumerate()
            .filter_map(|(i, l)| {
                region
                    .clip_line(l, &tol)
                    .map(|(x_lo, x_hi)| Piece { line: i as u32, x_lo, x_hi })
            })
            .collect();
        let root = Node {
            region,
            count: 0,
            bbox: None,
            content: Content::Leaf { points: Vec::new(), pieces },
        };
        Self {
            kind,
            tol,
            lines,
            points: Vec::new(),
            nodes: vec![root],
        }
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn tolerance(&self) -> &Tolerance<T> {
        &self.tol
    }

    pub fn lines(&self) -> &[Line<T>] {
        &self.lines
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn region(&self, node: usize) -> &ConvexRegion<T> {
        &self.nodes[node].region
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        matches!(self.nodes[node].content, Content::Leaf { .. })
    }

    /// Children `(above, below)` of an internal node.
    pub fn children(&self, node: usize) -> Option<(usize, usize)> {
        match self.nodes[node].content {
            Content::Internal { above, below, .. } => Some((above, below)),
            Content::Leaf { .. } => None,
        }
    }

    pub fn splitter(&self, node: usize) -> Option<Splitter<T>> {
        match self.nodes[node].content {
            Content::Internal { splitter, .. } => Some(splitter),
            Content::Leaf { .. } => None,
        }
    }

    /// Number of resident points in the subtree of `node`.
    pub fn count(&self, node: usize) -> usize {
        self.nodes[node].count
    }

    pub fn total_points(&self) -> usize {
        self.nodes[0].count
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.is_leaf(i)).collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.content, Content::Leaf { .. })).count()
    }

    pub fn leaf_points(&self, leaf: usize) -> &[usize] {
        match &self.nodes[leaf].content {
            Content::Leaf { points, .. } => points,
            Content::Internal { .. } => &[],
        }
    }

    pub fn leaf_pieces(&self, leaf: usize) -> &[Piece<T>] {
        match &self.nodes[leaf].content {
            Content::Leaf { pieces, .. } => pieces,
            Content::Internal { .. } => &[],
        }
    }

    /// Drops the piece of line `line` from a leaf's crossing list.
    pub fn forget_piece(&mut self, leaf: usize, line: u32) {
        if let Content::Leaf { pieces, .. } = &mut self.nodes[leaf].content {
            pieces.retain(|p| p.line != line);
        }
    }

    /// Splits `leaf` by input line `line`. Returns the new leaves.
    pub fn split_leaf(&mut self, leaf: usize, line: u32) -> Result<Vec<usize>> {
        let l = self.lines[line as usize];
        self.split_impl(leaf, l, Some(line))
    }

    /// Splits `leaf` by an arbitrary line not in the line set.
    pub fn split_leaf_by(&mut self, leaf: usize, l: Line<T>) -> Result<Vec<usize>> {
        self.split_impl(leaf, l, None)
    }

    fn split_impl(&mut self, leaf: usize, l: Line<T>, source: Option<u32>) -> Result<Vec<usize>> {
        if !self.is_leaf(leaf) {
            return Err(Error::InvalidParameter(format!("node {leaf} is not a leaf")));
        }
        let (lo, hi) = self.nodes[leaf].region.clip_line(&l, &self.tol).ok_or(Error::NoCrossing)?;
        let splitter = Splitter::Line { line: l, source };
        match self.kind {
            CellKind::Polygon { max_sides } => {
                let (a, b) = self.split_node(leaf, splitter);
                let mut out = Vec::new();
                let mut work = vec![a, b];
                while let Some(n) = work.pop() {
                    if self.nodes[n].region.side_count() > max_sides {
                        if let Some(chord) = self.balanced_chord(n) {
                            let (a, b) = self.split_node(n, Splitter::Line { line: chord, source: None });
                            work.push(a);
                            work.push(b);
                            continue;
                        }
                    }
                    out.push(n);
                }
                out.sort_unstable();
                Ok(out)
            }
            CellKind::Trapezoid => {
                let (xmin, xmax) = x_range(&self.nodes[leaf].region);
                let mut target = leaf;
                let mut out = Vec::new();
                if lo.is_finite() && self.tol.cmp(lo, xmin) > 0 {
                    let (right, left) = self.split_node(target, Splitter::X(lo));
                    out.push(left);
                    target = right;
                }
                if hi.is_finite() && self.tol.cmp(hi, xmax) < 0 {
                    let (right, left) = self.split_node(target, Splitter::X(hi));
                    out.push(right);
                    target = left;
                }
                let (a, b) = self.split_node(target, splitter);
                out.push(a);
                out.push(b);
                out.sort_unstable();
                Ok(out)
            }
        }
    }

    /// Chord between two vertices about half-way round the boundary.
    fn balanced_chord(&self, node: usize) -> Option<Line<T>> {
        let region = &self.nodes[node].region;
        let vs = region.vertices(&self.tol);
        let k = vs.len();
        if k < 2 {
            return None;
        }
        let steep = T::lit(T::STEEP_SLOPE);
        for i in 0..k {
            let j = (i + k / 2) % k;
            if i == j {
                continue;
            }
            if let Ok(chord) = line_through(&vs[i], &vs[j], &self.tol) {
                if chord.a.abs() <= steep && region.crosses_line(&chord, &self.tol) {
                    return Some(chord);
                }
            }
        }
        None
    }

    /// Turns a leaf into an internal node. Returns `(above, below)`.
    fn split_node(&mut self, leaf: usize, splitter: Splitter<T>) -> (usize, usize) {
        let tol = self.tol;
        let (up_bound, down_bound) = splitter.bounds();
        let region = self.nodes[leaf].region.clone();
        let (points, pieces) = match std::mem::replace(
            &mut self.nodes[leaf].content,
            Content::Leaf { points: Vec::new(), pieces: Vec::new() },
        ) {
            Content::Leaf { points, pieces } => (points, pieces),
            Content::Internal { .. } => unreachable!("split_node on internal node"),
        };

        let (mut up_pts, mut down_pts) = (Vec::new(), Vec::new());
        for id in points {
            if splitter.goes_above(&self.points[id], &tol) {
                up_pts.push(id);
            } else {
                down_pts.push(id);
            }
        }
        let (mut up_pcs, mut down_pcs) = (Vec::new(), Vec::new());
        for pc in pieces {
            self.route_piece(pc, &splitter, &mut up_pcs, &mut down_pcs);
        }

        let up = self.make_leaf(region.with(up_bound, &tol), up_pts, up_pcs);
        let down = self.make_leaf(region.with(down_bound, &tol), down_pts, down_pcs);
        self.nodes[leaf].content = Content::Internal { splitter, above: up, below: down };
        (up, down)
    }

    fn route_piece(&self, pc: Piece<T>, splitter: &Splitter<T>, up: &mut Vec<Piece<T>>, down: &mut Vec<Piece<T>>) {
        let tol = &self.tol;
        let l = self.lines[pc.line as usize];
        let keep = |p: Piece<T>, out: &mut Vec<Piece<T>>| {
            if !Segment::new(l, p.x_lo, p.x_hi).is_degenerate(tol) && p.x_lo < p.x_hi {
                out.push(p);
            }
        };
        match *splitter {
            Splitter::Line { line: m, source } => {
                if source == Some(pc.line) || l.approx_eq(&m, tol) {
                    return;
                }
                let seg = Segment::new(l, pc.x_lo, pc.x_hi);
                match classify(&seg, &m, Mode::Closed, tol) {
                    Side::Above => keep(pc, up),
                    Side::Below => keep(pc, down),
                    Side::Crosses => {
                        let Some(x) = l.intersect_x(&m, tol) else {
                            keep(pc, up);
                            return;
                        };
                        let x = x.max(pc.x_lo).min(pc.x_hi);
                        let left = Piece { x_hi: x, ..pc };
                        let right = Piece { x_lo: x, ..pc };
                        // l - m changes sign at x; its slope decides which half is above.
                        if l.a > m.a {
                            keep(left, down);
                            keep(right, up);
                        } else {
                            keep(left, up);
                            keep(right, down);
                        }
                    }
                }
            }
            Splitter::X(c) => {
                if tol.cmp(pc.x_hi, c) <= 0 {
                    keep(pc, down);
                } else if tol.cmp(pc.x_lo, c) >= 0 {
                    keep(pc, up);
                } else {
                    keep(Piece { x_hi: c, ..pc }, down);
                    keep(Piece { x_lo: c, ..pc }, up);
                }
            }
        }
    }

    fn make_leaf(&mut self, region: ConvexRegion<T>, points: Vec<usize>, pieces: Vec<Piece<T>>) -> usize {
        let bbox = points.iter().fold(None, |acc: Option<BBox<T>>, &id| {
            let p = &self.points[id];
            Some(match acc {
                Some(mut b) => {
                    b.grow(p);
                    b
                }
                None => BBox::of(p),
            })
        });
        self.nodes.push(Node {
            region,
            count: points.len(),
            bbox,
            content: Content::Leaf { points, pieces },
        });
        self.nodes.len() - 1
    }

    /// Leaf containing `p` under the tie rule.
    pub fn locate(&self, p: &Point<T>) -> usize {
        let mut n = 0;
        while let Content::Internal { splitter, above, below } = &self.nodes[n].content {
            n = if splitter.goes_above(p, &self.tol) { *above } else { *below };
        }
        n
    }

    fn locate_path(&self, p: &Point<T>, path: &mut Vec<usize>) -> usize {
        path.clear();
        let mut n = 0;
        loop {
            path.push(n);
            match &self.nodes[n].content {
                Content::Internal { splitter, above, below } => {
                    n = if splitter.goes_above(p, &self.tol) { *above } else { *below };
                }
                Content::Leaf { .. } => return n,
            }
        }
    }

    /// Appends each point to its leaf. Returns the new point ids.
    pub fn insert_points(&mut self, pts: &[Point<T>]) -> Vec<usize> {
        let mut path = Vec::new();
        let mut ids = Vec::with_capacity(pts.len());
        for p in pts {
            let id = self.points.len();
            self.points.push(*p);
            let leaf = self.locate_path(p, &mut path);
            for &n in &path {
                let node = &mut self.nodes[n];
                node.count += 1;
                node.bbox = BBox::union(node.bbox, Some(BBox::of(p)));
            }
            if let Content::Leaf { points, .. } = &mut self.nodes[leaf].content {
                points.push(id);
            }
            ids.push(id);
        }
        ids
    }

    /// Removes a previously inserted point. Bounding boxes are left as they
    /// are (they stay valid supersets).
    pub fn remove_point(&mut self, id: usize) -> bool {
        let Some(p) = self.points.get(id).copied() else {
            return false;
        };
        let mut path = Vec::new();
        let leaf = self.locate_path(&p, &mut path);
        let removed = match &mut self.nodes[leaf].content {
            Content::Leaf { points, .. } => match points.iter().position(|&q| q == id) {
                Some(pos) => {
                    points.swap_remove(pos);
                    true
                }
                None => false,
            },
            Content::Internal { .. } => false,
        };
        if removed {
            for &n in &path {
                self.nodes[n].count -= 1;
            }
        }
        removed
    }

    /// Leaves whose interior `l` passes through.
    pub fn zone(&self, l: &Line<T>) -> Vec<usize> {
        let tol = &self.tol;
        let mut out = Vec::new();
        let mut stack = vec![(0usize, l.to_segment())];
        while let Some((n, s)) = stack.pop() {
            match &self.nodes[n].content {
                Content::Leaf { .. } => {
                    if self.nodes[n].region.crosses_line(l, tol) {
                        out.push(n);
                    }
                }
                Content::Internal { splitter, above, below } => match *splitter {
                    Splitter::Line { line: m, .. } => {
                        let route = |part: Segment<T>, stack: &mut Vec<(usize, Segment<T>)>| {
                            match (segment_signs(&part, &m, tol), classify(&part, &m, Mode::Closed, tol)) {
                                ((0, 0), _) | (_, Side::Crosses) => {
                                    stack.push((*above, part));
                                    stack.push((*below, part));
                                }
                                (_, Side::Above) => stack.push((*above, part)),
                                (_, Side::Below) => stack.push((*below, part)),
                            }
                        };
                        match (classify(&s, &m, Mode::Open, tol), l.intersect_x(&m, tol)) {
                            (Side::Crosses, Some(x)) if x > s.x_lo && x < s.x_hi => {
                                route(Segment::new(*l, s.x_lo, x), &mut stack);
                                route(Segment::new(*l, x, s.x_hi), &mut stack);
                            }
                            _ => route(s, &mut stack),
                        }
                    }
                    Splitter::X(c) => {
                        if tol.cmp(s.x_hi, c) < 0 {
                            stack.push((*below, s));
                        } else if tol.cmp(s.x_lo, c) > 0 {
                            stack.push((*above, s));
                        } else {
                            stack.push((*below, Segment::new(*l, s.x_lo, c.max(s.x_lo))));
                            stack.push((*above, Segment::new(*l, c.min(s.x_hi), s.x_hi)));
                        }
                    }
                },
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Number of resident points inside the closed double wedge.
    pub fn count_in_wedge(&self, w: &DoubleWedge<T>) -> usize {
        let (mut whole, mut single) = (0, 0);
        self.wedge_walk(w, &mut |_, c| whole += c, &mut |_| single += 1);
        whole + single
    }

    /// Ids of resident points inside the closed double wedge, sorted.
    pub fn points_in_wedge(&self, w: &DoubleWedge<T>) -> Vec<usize> {
        let mut out = Vec::new();
        let mut subtree = Vec::new();
        self.wedge_walk(w, &mut |n, _| subtree.push(n), &mut |id| out.push(id));
        for n in subtree {
            self.collect_subtree(n, &mut out);
        }
        out.sort_unstable();
        out
    }

    /// Ids of all resident points below `node`, sorted.
    pub fn subtree_points(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_subtree(node, &mut out);
        out.sort_unstable();
        out
    }

    fn collect_subtree(&self, n: usize, out: &mut Vec<usize>) {
        let mut stack = vec![n];
        while let Some(n) = stack.pop() {
            match &self.nodes[n].content {
                Content::Leaf { points, .. } => out.extend_from_slice(points),
                Content::Internal { above, below, .. } => {
                    stack.push(*above);
                    stack.push(*below);
                }
            }
        }
    }

    /// Calls `whole(node, count)` for subtrees entirely inside the wedge and
    /// `single(id)` for individually tested points.
    fn wedge_walk(&self, w: &DoubleWedge<T>, whole: &mut impl FnMut(usize, usize), single: &mut impl FnMut(usize)) {
        let tol = &self.tol;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            let Some(bbox) = node.bbox else { continue };
            if node.count == 0 {
                continue;
            }
            match box_vs_wedge(&bbox, w, tol) {
                BoxWedge::Outside => continue,
                BoxWedge::Inside => {
                    whole(n, node.count);
                    continue;
                }
                BoxWedge::Mixed => {}
            }
            match &node.content {
                Content::Leaf { points, .. } => {
                    for &id in points {
                        if w.contains(&self.points[id], tol) {
                            single(id);
                        }
                    }
                }
                Content::Internal { above, below, .. } => {
                    stack.push(*above);
                    stack.push(*below);
                }
            }
        }
    }

    pub fn cells_dump(&self) -> Vec<CellDump> {
        self.leaves()
            .into_iter()
            .map(|n| {
                let region = &self.nodes[n].region;
                CellDump {
                    id: n,
                    vertices: region
                        .vertices(&self.tol)
                        .iter()
                        .map(|v| [v.x.as_f64(), v.y.as_f64()])
                        .collect(),
                    bounded: region.is_bounded(&self.tol),
                    sides: region.side_count(),
                    points: self.nodes[n].count,
                    crossing: self.leaf_pieces(n).len(),
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind.label(),
            "lines": self.lines.len(),
            "points": self.total_points(),
            "cells": self.cells_dump(),
        })
    }

    /// SVG of the leaf decomposition clipped to `view`, with optional line and point layers.
    pub fn to_svg(&self, view: [f64; 4], draw_lines: bool, draw_points: bool) -> String {
        let mut canvas = SvgCanvas::new(view);
        let clip = ConvexRegion::rect(T::lit(view[0]), T::lit(view[1]), T::lit(view[2]), T::lit(view[3]));
        for n in self.leaves() {
            let cell = self.nodes[n].region.intersect(&clip, &self.tol);
            let vs: Vec<[f64; 2]> = cell
                .vertices(&self.tol)
                .iter()
                .map(|v| [v.x.as_f64(), v.y.as_f64()])
                .collect();
            canvas.polygon(&vs);
        }
        if draw_lines {
            for l in &self.lines {
                canvas.line(l.a.as_f64(), l.b.as_f64());
            }
        }
        if draw_points {
            for p in &self.points {
                canvas.point(p.x.as_f64(), p.y.as_f64());
            }
        }
        canvas.finish()
    }
}

/// x-extent of a region from its walls.
fn x_range<T: Scalar>(region: &ConvexRegion<T>) -> (T, T) {
    let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
    for b in region.bounds() {
        match b.constraint {
            Constraint::RightOf(c) => lo = lo.max(c),
            Constraint::LeftOf(c) => hi = hi.min(c),
            _ => {}
        }
    }
    (lo, hi)
}

enum BoxWedge {
    Outside,
    Inside,
    Mixed,
}

fn box_vs_wedge<T: Scalar>(b: &BBox<T>, w: &DoubleWedge<T>, tol: &Tolerance<T>) -> BoxWedge {
    // Margins exceed the tolerance band at every point of the box, so the
    // shortcuts agree with the per-point test.
    let side = |l: &Line<T>| {
        let mut scale = T::zero();
        let mut vals = [T::zero(); 4];
        for (k, c) in b.corners().iter().enumerate() {
            let e = l.eval(c.x);
            scale = scale.max(c.y.abs()).max(e.abs());
            vals[k] = c.y - e;
        }
        let margin = T::two() * (tol.rel_tol * scale + tol.abs_tol);
        if vals.iter().all(|&v| v > margin) {
            1i8
        } else if vals.iter().all(|&v| v < -margin) {
            -1
        } else {
            0
        }
    };
    let (s1, s2) = (side(&w.upper), side(&w.lower));
    if s1 == 0 || s2 == 0 {
        BoxWedge::Mixed
    } else if s1 == s2 {
        BoxWedge::Outside
    } else {
        BoxWedge::Inside
    }
}
