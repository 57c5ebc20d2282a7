//! Planar primitives, predicates and the arrangement (half-edge) builder.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::math;

/// Absolute snapping tolerance for every geometric predicate.
pub const EPS_GEO: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// Free vectors share the point representation.
pub type Vec2 = Point2;

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        Point2::new(r * math::cos(theta), r * math::sin(theta))
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    #[inline]
    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Counter-clockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        Point2::new(self.x / n, self.y / n)
    }

    pub fn rotated(self, theta: f64) -> Point2 {
        let (s, c) = (math::sin(theta), math::cos(theta));
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        math::atan2(self.y, self.x)
    }

    #[inline]
    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    #[inline]
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("segment has zero length")]
    DegenerateSegment,
    #[error("point lies on the loop")]
    OnBoundary,
    #[error("loop is not closed")]
    OpenLoop,
    #[error("polyline needs at least two distinct consecutive vertices")]
    BadPolyline,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("network edges {0} and {1} cross")]
    CrossingEdges(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }

    pub fn len(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.lerp(self.b, 0.5)
    }

    /// Distance from `p` to the closed segment.
    pub fn dist_to(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let l2 = d.dot(d);
        if l2 == 0.0 {
            return p.dist(self.a);
        }
        let t = ((p - self.a).dot(d) / l2).clamp(0.0, 1.0);
        p.dist(self.a + d * t)
    }

    fn reversed(&self) -> Segment {
        Segment::new(self.b, self.a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SegmentIntersection {
    None,
    /// Crossing or touching at a point that is not an endpoint of both.
    Point(Point2),
    SharedEndpoint(Point2),
    /// Collinear overlap of positive length.
    Overlap(Point2, Point2),
}

fn lex_cmp(p: Point2, q: Point2) -> Ordering {
    p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
}

fn canonical(s: Segment) -> Segment {
    if lex_cmp(s.a, s.b) == Ordering::Greater {
        s.reversed()
    } else {
        s
    }
}

/// Intersection of two closed segments under the `EPS_GEO` snapping rule.
pub fn segment_intersect(s: Segment, t: Segment) -> Result<SegmentIntersection, GeomError> {
    if !(s.a.is_finite() && s.b.is_finite() && t.a.is_finite() && t.b.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    if s.len() <= EPS_GEO || t.len() <= EPS_GEO {
        return Err(GeomError::DegenerateSegment);
    }
    // Evaluate on a canonical ordering so the result is symmetric bit for bit.
    let (s, t) = {
        let (s, t) = (canonical(s), canonical(t));
        match lex_cmp(s.a, t.a).then(lex_cmp(s.b, t.b)) {
            Ordering::Greater => (t, s),
            _ => (s, t),
        }
    };
    let r = s.b - s.a;
    let q = t.b - t.a;
    let t_on_s = [s.dist_to(t.a) <= EPS_GEO, s.dist_to(t.b) <= EPS_GEO];
    let s_on_t = [t.dist_to(s.a) <= EPS_GEO, t.dist_to(s.b) <= EPS_GEO];

    let line_dist = |p: Point2| (p - s.a).cross(r).abs_val() / r.norm();
    let collinear = line_dist(t.a) <= EPS_GEO && line_dist(t.b) <= EPS_GEO;
    if collinear {
        let u = r.normalized();
        let (ta, tb) = ((t.a - s.a).dot(u), (t.b - s.a).dot(u));
        let (lo, hi) = (ta.min(tb).max(0.0), ta.max(tb).min(r.norm()));
        if hi - lo > EPS_GEO {
            return Ok(SegmentIntersection::Overlap(s.a + u * lo, s.a + u * hi));
        }
        if hi - lo >= -EPS_GEO {
            let p = s.a + u * (0.5 * (lo + hi));
            return Ok(endpoint_or_point(s, t, p));
        }
        return Ok(SegmentIntersection::None);
    }

    for (i, &on) in t_on_s.iter().enumerate() {
        if on {
            let p = if i == 0 { t.a } else { t.b };
            return Ok(endpoint_or_point(s, t, p));
        }
    }
    for (i, &on) in s_on_t.iter().enumerate() {
        if on {
            let p = if i == 0 { s.a } else { s.b };
            return Ok(endpoint_or_point(s, t, p));
        }
    }
    let den = r.cross(q);
    if den == 0.0 {
        return Ok(SegmentIntersection::None);
    }
    let w = t.a - s.a;
    let u1 = w.cross(q) / den;
    let u2 = w.cross(r) / den;
    if (0.0..=1.0).contains(&u1) && (0.0..=1.0).contains(&u2) {
        Ok(SegmentIntersection::Point(s.a + r * u1))
    } else {
        Ok(SegmentIntersection::None)
    }
}

fn endpoint_or_point(s: Segment, t: Segment, p: Point2) -> SegmentIntersection {
    let near = |a: Point2| a.dist(p) <= EPS_GEO;
    let s_end = if near(s.a) {
        Some(s.a)
    } else if near(s.b) {
        Some(s.b)
    } else {
        None
    };
    let t_end = near(t.a) || near(t.b);
    match s_end {
        Some(e) if t_end => SegmentIntersection::SharedEndpoint(e),
        _ => SegmentIntersection::Point(p),
    }
}

trait AbsVal {
    fn abs_val(self) -> f64;
}

impl AbsVal for f64 {
    #[inline]
    fn abs_val(self) -> f64 {
        math::abs(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub vertices: Vec<Point2>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeomError> {
        if vertices.len() < 2 {
            return Err(GeomError::BadPolyline);
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        if vertices.windows(2).any(|w| w[0].dist(w[1]) <= EPS_GEO) {
            return Err(GeomError::BadPolyline);
        }
        Ok(Polyline { vertices })
    }

    /// Closed loop through `pts`, repeating the first vertex at the end.
    pub fn closed(pts: &[Point2]) -> Result<Self, GeomError> {
        let mut v = pts.to_vec();
        if let Some(&f) = pts.first() {
            v.push(f);
        }
        Polyline::new(v)
    }

    pub fn first(&self) -> Point2 {
        self.vertices[0]
    }

    pub fn last(&self) -> Point2 {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn is_closed(&self) -> bool {
        self.first().dist(self.last()) <= EPS_GEO
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.vertices.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|s| s.len()).sum()
    }

    pub fn reversed(&self) -> Polyline {
        let mut v = self.vertices.clone();
        v.reverse();
        Polyline { vertices: v }
    }

    pub fn dist_to(&self, p: Point2) -> f64 {
        self.segments().map(|s| s.dist_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// No two non-adjacent pieces meet; adjacent pieces meet only at their joint.
    pub fn is_simple(&self) -> bool {
        let segs: Vec<Segment> = self.segments().collect();
        let n = segs.len();
        let closed = self.is_closed();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (closed && i == 0 && j == n - 1);
                match segment_intersect(segs[i], segs[j]) {
                    Ok(SegmentIntersection::None) => {}
                    Ok(SegmentIntersection::SharedEndpoint(_)) if adjacent => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

/// Winding number of a closed polyline around `p`.
pub fn winding_number(lp: &Polyline, p: Point2) -> Result<i32, GeomError> {
    if !lp.is_closed() {
        return Err(GeomError::OpenLoop);
    }
    if lp.dist_to(p) <= EPS_GEO {
        return Err(GeomError::OnBoundary);
    }
    Ok(winding_raw(&lp.vertices, p))
}

/// Crossing-count winding number of the closed vertex ring `ring` (last vertex
/// joined to the first unless they coincide).
pub fn winding_raw(ring: &[Point2], p: Point2) -> i32 {
    let n = ring.len();
    let mut w = 0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && (b - a).cross(p - a) > 0.0 {
                w += 1;
            }
        } else if b.y <= p.y && (b - a).cross(p - a) < 0.0 {
            w -= 1;
        }
    }
    w
}

pub fn signed_area(ring: &[Point2]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        s += ring[i].cross(ring[(i + 1) % n]);
    }
    0.5 * s
}

pub fn polygon_centroid(ring: &[Point2]) -> Point2 {
    let n = ring.len();
    let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (p, q) = (ring[i], ring[(i + 1) % n]);
        let c = p.cross(q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
        a2 += c;
    }
    if math::abs(a2) < 1e-300 {
        let s = ring.iter().fold(Point2::ZERO, |acc, &p| acc + p);
        return s * (1.0 / n as f64);
    }
    Point2::new(cx / (3.0 * a2), cy / (3.0 * a2))
}

/// Convex hull in counter-clockwise order, collinear boundary points dropped.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| lex_cmp(*a, *b));
    pts.dedup_by(|a, b| a.dist(*b) <= EPS_GEO);
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: &mut dyn Iterator<Item = &Point2> = if pass == 0 { &mut pts.iter() } else { &mut pts.iter().rev() };
        for &p in iter {
            while hull.len() >= start + 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if (b - a).cross(p - a) <= EPS_GEO * (b - a).norm() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Strictly inside a convex CCW polygon by more than `EPS_GEO`.
pub fn inside_convex(poly: &[Point2], p: Point2) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        (b - a).cross(p - a) / (b - a).norm() > EPS_GEO
    })
}

/// Part of `s` inside the convex CCW polygon `poly`, if any of positive length.
pub fn clip_to_convex(s: Segment, poly: &[Point2]) -> Option<Segment> {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = s.b - s.a;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let e = b - a;
        // inside: e x (p - a) >= 0
        let num = e.cross(s.a - a);
        let den = e.cross(d);
        if den == 0.0 {
            if num < 0.0 {
                return None;
            }
        } else {
            let t = -num / den;
            if den > 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    if (t1 - t0) * d.norm() <= EPS_GEO {
        return None;
    }
    Some(Segment::new(s.a + d * t0, s.a + d * t1))
}

/// Part of polygon `poly` inside the convex CCW polygon `clip` (Sutherland–Hodgman).
pub fn clip_polygon_convex(poly: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = poly.to_vec();
    let n = clip.len();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % n]);
        let e = b - a;
        let side = |p: Point2| e.cross(p - a);
        let input = core::mem::take(&mut out);
        for k in 0..input.len() {
            let (p, q) = (input[k], input[(k + 1) % input.len()]);
            let (sp, sq) = (side(p), side(q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                out.push(p + (q - p) * (sp / (sp - sq)));
            }
        }
    }
    out.dedup_by(|a, b| a.dist(*b) <= EPS_GEO);
    if out.len() > 1 && out[0].dist(out[out.len() - 1]) <= EPS_GEO {
        out.pop();
    }
    if out.len() < 3 || math::abs(signed_area(&out)) <= EPS_GEO {
        out.clear();
    }
    out
}

/// Role of an arrangement edge; an edge may carry several.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeTag {
    /// Network edge, carrying the network's edge index.
    Network(usize),
    /// Piece of the cut Σ_i.
    Sigma(usize),
    /// Piece of the cut Σ′_i.
    SigmaPrime(usize),
    Omega,
    Window,
    /// Boundary between cells of a field complex.
    Cell,
    /// Any other helper segment.
    Aux,
}

#[derive(Clone, Debug)]
pub struct ArrEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
    pub tags: Vec<EdgeTag>,
    /// Face on the left of a → b.
    pub left: usize,
    pub right: usize,
}

impl ArrEdge {
    pub fn has_tag(&self, f: impl Fn(&EdgeTag) -> bool) -> bool {
        self.tags.iter().any(f)
    }
}

#[derive(Clone, Debug)]
pub struct Face {
    /// Outer boundary ring (empty for the unbounded face).
    pub outer: Vec<usize>,
    /// Rings of the components nested directly inside this face.
    pub holes: Vec<Vec<usize>>,
    /// Area of the face itself (outer area minus holes); infinite when unbounded.
    pub area: f64,
    /// A point strictly inside the face.
    pub witness: Point2,
    bbox: [f64; 4],
}

#[derive(Clone, Debug)]
pub struct Arrangement {
    pub vertices: Vec<Point2>,
    pub edges: Vec<ArrEdge>,
    pub faces: Vec<Face>,
    pub unbounded: usize,
    pub components: usize,
}

struct VertexPool {
    pts: Vec<Point2>,
    cell: f64,
    grid: alloc::collections::BTreeMap<(i64, i64), Vec<usize>>,
}

impl VertexPool {
    fn new() -> Self {
        VertexPool { pts: Vec::new(), cell: 1e-6, grid: Default::default() }
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        (math::floor(p.x / self.cell) as i64, math::floor(p.y / self.cell) as i64)
    }

    fn find(&self, p: Point2) -> Option<usize> {
        let (kx, ky) = self.key(p);
        let mut best: Option<(usize, f64)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(kx + dx, ky + dy)) {
                    for &i in ids {
                        let d = self.pts[i].dist(p);
                        if d <= EPS_GEO && best.is_none_or(|(_, bd)| d < bd) {
                            best = Some((i, d));
                        }
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    fn insert(&mut self, p: Point2) -> usize {
        if let Some(i) = self.find(p) {
            return i;
        }
        let i = self.pts.len();
        self.pts.push(p);
        let k = self.key(p);
        self.grid.entry(k).or_default().push(i);
        i
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

impl Arrangement {
    /// Planar subdivision induced by tagged segments: segments are split at all
    /// mutual intersections, endpoints are snapped within `EPS_GEO`, and
    /// coincident pieces are merged with their tags united.
    pub fn from_segments(input: &[(Segment, EdgeTag)]) -> Result<Arrangement, GeomError> {
        for (s, _) in input {
            if !(s.a.is_finite() && s.b.is_finite()) {
                return Err(GeomError::NonFinite);
            }
            if s.len() <= EPS_GEO {
                return Err(GeomError::DegenerateSegment);
            }
        }
        let n = input.len();
        let mut cuts: Vec<Vec<Point2>> = input.iter().map(|(s, _)| vec![s.a, s.b]).collect();
        let boxes: Vec<[f64; 4]> = input
            .iter()
            .map(|(s, _)| {
                [
                    s.a.x.min(s.b.x) - EPS_GEO,
                    s.a.y.min(s.b.y) - EPS_GEO,
                    s.a.x.max(s.b.x) + EPS_GEO,
                    s.a.y.max(s.b.y) + EPS_GEO,
                ]
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| boxes[i][0].total_cmp(&boxes[j][0]));
        for (oi, &i) in order.iter().enumerate() {
            for &j in &order[oi + 1..] {
                if boxes[j][0] > boxes[i][2] {
                    break;
                }
                if boxes[j][1] > boxes[i][3] || boxes[i][1] > boxes[j][3] {
                    continue;
                }
                match segment_intersect(input[i].0, input[j].0)? {
                    SegmentIntersection::None | SegmentIntersection::SharedEndpoint(_) => {}
                    SegmentIntersection::Point(p) => {
                        cuts[i].push(p);
                        cuts[j].push(p);
                    }
                    SegmentIntersection::Overlap(p, q) => {
                        cuts[i].extend([p, q]);
                        cuts[j].extend([p, q]);
                    }
                }
            }
        }

        let mut pool = VertexPool::new();
        // Register original endpoints first so that snapping favours them.
        for (s, _) in input {
            pool.insert(s.a);
            pool.insert(s.b);
        }
        let mut edge_map: alloc::collections::BTreeMap<(usize, usize), Vec<EdgeTag>> = Default::default();
        for (k, (s, tag)) in input.iter().enumerate() {
            let d = s.b - s.a;
            let l2 = d.dot(d);
            let mut pts: Vec<(f64, usize)> = cuts[k].iter().map(|&p| ((p - s.a).dot(d) / l2, pool.insert(p))).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts.dedup_by(|a, b| a.1 == b.1);
            for w in pts.windows(2) {
                let (u, v) = (w[0].1, w[1].1);
                if u == v {
                    continue;
                }
                let key = (u.min(v), u.max(v));
                let tags = edge_map.entry(key).or_default();
                if !tags.contains(tag) {
                    tags.push(*tag);
                }
            }
        }
        let vertices = pool.pts;
        let mut edges: Vec<ArrEdge> = edge_map
            .into_iter()
            .map(|((a, b), mut tags)| {
                tags.sort();
                ArrEdge { a, b, length: vertices[a].dist(vertices[b]), tags, left: usize::MAX, right: usize::MAX }
            })
            .collect();
        edges.retain(|e| e.length > 0.0);
        Self::assemble(vertices, edges)
    }

    fn assemble(vertices: Vec<Point2>, mut edges: Vec<ArrEdge>) -> Result<Arrangement, GeomError> {
        let nv = vertices.len();
        let ne = edges.len();
        // Half-edge h = 2e is a → b, 2e+1 is b → a.
        let origin = |h: usize, edges: &[ArrEdge]| if h.is_multiple_of(2) { edges[h / 2].a } else { edges[h / 2].b };
        let dest = |h: usize, edges: &[ArrEdge]| if h.is_multiple_of(2) { edges[h / 2].b } else { edges[h / 2].a };
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for h in 0..2 * ne {
            out[origin(h, &edges)].push(h);
        }
        let ang = |h: usize| (vertices[dest(h, &edges)] - vertices[origin(h, &edges)]).angle();
        let mut pos = vec![0usize; 2 * ne];
        for list in out.iter_mut() {
            list.sort_by(|&a, &b| ang(a).total_cmp(&ang(b)));
            for (i, &h) in list.iter().enumerate() {
                pos[h] = i;
            }
        }
        let mut next = vec![0usize; 2 * ne];
        for h in 0..2 * ne {
            let tw = h ^ 1;
            let v = origin(tw, &edges);
            let list = &out[v];
            let i = pos[tw];
            next[h] = list[(i + list.len() - 1) % list.len()];
        }

        let mut cycle_of = vec![usize::MAX; 2 * ne];
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for h0 in 0..2 * ne {
            if cycle_of[h0] != usize::MAX {
                continue;
            }
            let id = cycles.len();
            let mut cyc = Vec::new();
            let mut h = h0;
            loop {
                cycle_of[h] = id;
                cyc.push(h);
                h = next[h];
                if h == h0 {
                    break;
                }
            }
            cycles.push(cyc);
        }
        let ring = |c: &Vec<usize>| -> Vec<usize> { c.iter().map(|&h| origin(h, &edges)).collect() };
        let rings: Vec<Vec<usize>> = cycles.iter().map(ring).collect();
        let area_of = |r: &Vec<usize>| -> f64 {
            let pts: Vec<Point2> = r.iter().map(|&i| vertices[i]).collect();
            signed_area(&pts)
        };
        let areas: Vec<f64> = rings.iter().map(area_of).collect();

        let mut uf = UnionFind((0..nv).collect());
        for e in &edges {
            uf.union(e.a, e.b);
        }
        let mut comp_of_cycle: Vec<usize> = cycles.iter().map(|c| uf.find(origin(c[0], &edges))).collect();
        let mut roots: Vec<usize> = comp_of_cycle.clone();
        roots.sort_unstable();
        roots.dedup();
        for c in comp_of_cycle.iter_mut() {
            *c = roots.binary_search(c).unwrap();
        }
        let ncomp = roots.len();
        let mut outer_cycle = vec![usize::MAX; ncomp];
        for (ci, &comp) in comp_of_cycle.iter().enumerate() {
            let cur = outer_cycle[comp];
            if cur == usize::MAX || areas[ci] < areas[cur] {
                outer_cycle[comp] = ci;
            }
        }

        // Bounded faces: every non-outer cycle.
        let mut face_of_cycle = vec![usize::MAX; cycles.len()];
        let mut faces: Vec<Face> = Vec::new();
        let mut face_comp: Vec<usize> = Vec::new();
        for ci in 0..cycles.len() {
            if outer_cycle[comp_of_cycle[ci]] == ci {
                continue;
            }
            face_of_cycle[ci] = faces.len();
            face_comp.push(comp_of_cycle[ci]);
            let pts: Vec<Point2> = rings[ci].iter().map(|&i| vertices[i]).collect();
            faces.push(Face {
                outer: rings[ci].clone(),
                holes: Vec::new(),
                area: areas[ci],
                witness: Point2::ZERO,
                bbox: bbox_of(&pts),
            });
        }
        let unbounded = faces.len();
        faces.push(Face {
            outer: Vec::new(),
            holes: Vec::new(),
            area: f64::INFINITY,
            witness: Point2::ZERO,
            bbox: [f64::NEG_INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY],
        });
        // Nest each component inside the smallest bounded face ring containing it.
        for comp in 0..ncomp {
            let oc = outer_cycle[comp];
            let probe = vertices[rings[oc][0]];
            let mut best: Option<usize> = None;
            for (fi, f) in faces.iter().enumerate() {
                if fi == unbounded {
                    continue;
                }
                if face_comp[fi] == comp || !in_bbox(&f.bbox, probe) {
                    continue;
                }
                let ring_pts: Vec<Point2> = f.outer.iter().map(|&i| vertices[i]).collect();
                if winding_raw(&ring_pts, probe) == 0 {
                    continue;
                }
                if best.is_none_or(|b| f.area < faces[b].area) {
                    best = Some(fi);
                }
            }
            let host = best.unwrap_or(unbounded);
            face_of_cycle[oc] = host;
            faces[host].holes.push(rings[oc].clone());
        }
        for fi in 0..faces.len() {
            if fi == unbounded {
                continue;
            }
            let hole_area: f64 = faces[fi].holes.iter().map(&area_of).sum();
            faces[fi].area += hole_area;
        }
        for (ei, e) in edges.iter_mut().enumerate() {
            e.left = face_of_cycle[cycle_of[2 * ei]];
            e.right = face_of_cycle[cycle_of[2 * ei + 1]];
        }
        let mut arr = Arrangement { vertices, edges, faces, unbounded, components: ncomp };
        arr.place_witnesses(&cycles, &face_of_cycle);
        Ok(arr)
    }

    fn place_witnesses(&mut self, cycles: &[Vec<usize>], face_of_cycle: &[usize]) {
        let scale = self.vertices.iter().fold(1.0f64, |m, p| m.max(math::abs(p.x)).max(math::abs(p.y)));
        for fi in 0..self.faces.len() {
            let hs: Vec<usize> = cycles
                .iter()
                .enumerate()
                .filter(|(ci, _)| face_of_cycle[*ci] == fi)
                .flat_map(|(_, c)| c.iter().copied())
                .collect();
            let mut cands: Vec<usize> = hs.clone();
            cands.sort_by(|&a, &b| self.edges[b / 2].length.total_cmp(&self.edges[a / 2].length));
            let mut found = None;
            'outer: for &h in cands.iter().take(8) {
                let e = &self.edges[h / 2];
                let (p, q) = if h % 2 == 0 {
                    (self.vertices[e.a], self.vertices[e.b])
                } else {
                    (self.vertices[e.b], self.vertices[e.a])
                };
                let n = (q - p).perp().normalized();
                for t in [0.5, 0.37, 0.63] {
                    let mut d = (e.length * 0.25).min(scale * 1e-3);
                    while d > 50.0 * EPS_GEO {
                        let w = p.lerp(q, t) + n * d;
                        if self.point_in_face(fi, w) && self.min_edge_dist(w) > 4.0 * EPS_GEO {
                            found = Some(w);
                            break 'outer;
                        }
                        d *= 0.3;
                    }
                }
            }
            if let Some(w) = found {
                self.faces[fi].witness = w;
            } else if fi == self.unbounded {
                self.faces[fi].witness = Point2::new(scale * 10.0 + 1.0, scale * 10.0 + 1.0);
            }
        }
    }

    pub fn min_edge_dist(&self, p: Point2) -> f64 {
        self.edges.iter().map(|e| self.segment(e).dist_to(p)).fold(f64::INFINITY, f64::min)
    }

    pub fn segment(&self, e: &ArrEdge) -> Segment {
        Segment::new(self.vertices[e.a], self.vertices[e.b])
    }

    fn point_in_face(&self, fi: usize, p: Point2) -> bool {
        let f = &self.faces[fi];
        if fi != self.unbounded {
            if !in_bbox(&f.bbox, p) {
                return false;
            }
            let pts: Vec<Point2> = f.outer.iter().map(|&i| self.vertices[i]).collect();
            if winding_raw(&pts, p) == 0 {
                return false;
            }
        } else {
            // Outside every top-level component.
            for h in &f.holes {
                let pts: Vec<Point2> = h.iter().map(|&i| self.vertices[i]).collect();
                if winding_raw(&pts, p) != 0 {
                    return false;
                }
            }
            return true;
        }
        for h in &f.holes {
            let pts: Vec<Point2> = h.iter().map(|&i| self.vertices[i]).collect();
            if winding_raw(&pts, p) != 0 {
                return false;
            }
        }
        true
    }

    /// Face containing `p`; fails when `p` is within `EPS_GEO` of an edge.
    pub fn locate(&self, p: Point2) -> Result<usize, GeomError> {
        if self.min_edge_dist(p) <= EPS_GEO {
            return Err(GeomError::OnBoundary);
        }
        Ok(self.locate_unchecked(p))
    }

    /// Face containing `p`, assuming `p` is off every edge.
    pub fn locate_unchecked(&self, p: Point2) -> usize {
        let mut best: Option<usize> = None;
        for fi in 0..self.faces.len() {
            if fi == self.unbounded {
                continue;
            }
            if self.point_in_face(fi, p) && best.is_none_or(|b| self.faces[fi].area < self.faces[b].area) {
                best = Some(fi);
            }
        }
        best.unwrap_or(self.unbounded)
    }

    pub fn bounded_faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(move |&f| f != self.unbounded)
    }

    pub fn face_ring(&self, fi: usize) -> Vec<Point2> {
        self.faces[fi].outer.iter().map(|&i| self.vertices[i]).collect()
    }

    /// `V − E + F − C`, which is 1 for every planar subdivision.
    pub fn euler_defect(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64 - self.components as i64
    }

    /// Unit normal of edge `e` pointing into its left face.
    pub fn left_normal(&self, e: &ArrEdge) -> Vec2 {
        (self.vertices[e.b] - self.vertices[e.a]).perp().normalized()
    }

    pub fn neighbours(&self, fi: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.left == fi {
                    Some(e.right)
                } else if e.right == fi {
                    Some(e.left)
                } else {
                    None
                }
            })
            .filter(|&g| g != fi)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn bbox_of(pts: &[Point2]) -> [f64; 4] {
    pts.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, p| {
        [b[0].min(p.x), b[1].min(p.y), b[2].max(p.x), b[3].max(p.y)]
    })
}

fn in_bbox(b: &[f64; 4], p: Point2) -> bool {
    p.x >= b[0] && p.x <= b[2] && p.y >= b[1] && p.y <= b[3]
}

/// Arrangement of a convex domain cut by non-crossing network segments.
pub fn build_arrangement(domain: &[Point2], network: &[Segment]) -> Result<Arrangement, GeomError> {
    for i in 0..network.len() {
        for j in i + 1..network.len() {
            match segment_intersect(network[i], network[j])? {
                SegmentIntersection::None | SegmentIntersection::SharedEndpoint(_) => {}
                _ => return Err(GeomError::CrossingEdges(i, j)),
            }
        }
    }
    let mut segs: Vec<(Segment, EdgeTag)> = Vec::new();
    let n = domain.len();
    for i in 0..n {
        segs.push((Segment::new(domain[i], domain[(i + 1) % n]), EdgeTag::Omega));
    }
    for (i, s) in network.iter().enumerate() {
        segs.push((*s, EdgeTag::Network(i)));
    }
    Arrangement::from_segments(&segs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn seg(a: (f64, f64), b: (f64, f64)) -> Segment {
        Segment::new(p(a.0, a.1), p(b.0, b.1))
    }

    #[test]
    fn axis_crossing() {
        let r = segment_intersect(seg((0., 0.), (2., 0.)), seg((1., -1.), (1., 1.))).unwrap();
        assert_eq!(r, SegmentIntersection::Point(p(1., 0.)));
    }

    #[test]
    fn disjoint_collinear() {
        let r = segment_intersect(seg((0., 0.), (1., 0.)), seg((2., 0.), (3., 0.))).unwrap();
        assert_eq!(r, SegmentIntersection::None);
    }

    #[test]
    fn shared_endpoint() {
        let r = segment_intersect(seg((0., 0.), (1., 1.)), seg((1., 1.), (2., 0.))).unwrap();
        assert_eq!(r, SegmentIntersection::SharedEndpoint(p(1., 1.)));
    }

    #[test]
    fn overlap_and_degenerate() {
        let r = segment_intersect(seg((0., 0.), (2., 0.)), seg((1., 0.), (3., 0.))).unwrap();
        assert_eq!(r, SegmentIntersection::Overlap(p(1., 0.), p(2., 0.)));
        assert_eq!(
            segment_intersect(seg((0., 0.), (0., 0.)), seg((1., 0.), (3., 0.))),
            Err(GeomError::DegenerateSegment)
        );
    }

    #[test]
    fn winding_square() {
        let sq = Polyline::closed(&[p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]).unwrap();
        assert_eq!(winding_number(&sq, p(0.5, 0.5)), Ok(1));
        assert_eq!(winding_number(&sq, p(5., 5.)), Ok(0));
        assert_eq!(winding_number(&sq.reversed(), p(0.5, 0.5)), Ok(-1));
        assert_eq!(winding_number(&sq, p(1., 0.5)), Err(GeomError::OnBoundary));
    }

    fn hexagon() -> Vec<Point2> {
        let s = 3f64.sqrt() / 2.0;
        vec![p(-0.5, s), p(-1., 0.), p(-0.5, -s), p(0.5, -s), p(1., 0.), p(0.5, s)]
    }

    #[test]
    fn hexagon_minus_edge() {
        let h = hexagon();
        let net: Vec<Segment> = (0..5).map(|i| Segment::new(h[i], h[i + 1])).collect();
        let arr = build_arrangement(&h, &net).unwrap();
        assert_eq!(arr.faces.len(), 2);
        assert_eq!(arr.euler_defect(), 1);
        let area: f64 = arr.bounded_faces().map(|f| arr.faces[f].area).sum();
        assert!((area - signed_area(&h)).abs() < 1e-12);
    }

    #[test]
    fn tripod_and_empty() {
        let s = 3f64.sqrt() / 2.0;
        let tri = vec![p(-s, -0.5), p(s, -0.5), p(0., 1.)];
        let net: Vec<Segment> = tri.iter().map(|&q| Segment::new(Point2::ZERO, q)).collect();
        let arr = build_arrangement(&tri, &net).unwrap();
        assert_eq!(arr.bounded_faces().count(), 3);
        for e in &arr.edges {
            assert_ne!(e.left, e.right);
        }
        let empty = build_arrangement(&tri, &[]).unwrap();
        assert_eq!(empty.bounded_faces().count(), 1);
    }

    #[test]
    fn crossing_network_rejected() {
        let sq = vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        let net = vec![seg((0., 0.), (1., 1.)), seg((1., 0.), (0., 1.))];
        assert_eq!(build_arrangement(&sq, &net).unwrap_err(), GeomError::CrossingEdges(0, 1));
    }

    #[test]
    fn nested_components_and_dangling_tree() {
        let mut segs = Vec::new();
        let big = [p(0., 0.), p(10., 0.), p(10., 10.), p(0., 10.)];
        let small = [p(3., 3.), p(5., 3.), p(5., 5.), p(3., 5.)];
        for r in [&big, &small] {
            for i in 0..4 {
                segs.push((Segment::new(r[i], r[(i + 1) % 4]), EdgeTag::Aux));
            }
        }
        segs.push((seg((7., 7.), (8., 8.)), EdgeTag::Aux));
        segs.push((seg((0., 0.), (2., 1.)), EdgeTag::Aux));
        let arr = Arrangement::from_segments(&segs).unwrap();
        assert_eq!(arr.components, 3);
        assert_eq!(arr.bounded_faces().count(), 2);
        assert_eq!(arr.euler_defect(), 1);
        let ring = arr.locate(p(1., 9.)).unwrap();
        assert!((arr.faces[ring].area - 96.0).abs() < 1e-9);
        let inner = arr.locate(p(4., 4.)).unwrap();
        assert!((arr.faces[inner].area - 4.0).abs() < 1e-9);
        assert_eq!(arr.locate(p(20., 0.)).unwrap(), arr.unbounded);
        for f in arr.bounded_faces() {
            assert_eq!(arr.locate(arr.faces[f].witness).unwrap(), f);
        }
    }

    #[test]
    fn clip_segment() {
        let sq = [p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        let c = clip_to_convex(seg((-1., 0.5), (2., 0.5)), &sq).unwrap();
        assert!(c.a.dist(p(0., 0.5)) < 1e-12 && c.b.dist(p(1., 0.5)) < 1e-12);
        assert!(clip_to_convex(seg((-1., 2.), (2., 2.)), &sq).is_none());
    }

    fn pt() -> impl Strategy<Value = Point2> {
        (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(x, y)| p(x, y))
    }

    proptest! {
        #[test]
        fn intersection_is_symmetric(a in pt(), b in pt(), c in pt(), d in pt()) {
            prop_assume!(a.dist(b) > 1e-6 && c.dist(d) > 1e-6);
            let s = Segment::new(a, b);
            let t = Segment::new(c, d);
            prop_assert_eq!(segment_intersect(s, t), segment_intersect(t, s));
            prop_assert_eq!(segment_intersect(s, t), segment_intersect(s.reversed(), t));
        }

        #[test]
        fn winding_additive(q in pt(), r in 0.5f64..3.0) {
            // Two squares sharing a corner traversed as one figure-eight loop.
            let c1 = [p(-2., -2.), p(0., -2.), p(0., 0.), p(-2., 0.)];
            let c2 = [p(0., 0.), p(2., 0.), p(2., 2.), p(0., 2.)];
            let l1 = Polyline::closed(&c1).unwrap();
            let l2 = Polyline::closed(&c2).unwrap();
            let mut cat = c1.to_vec();
            cat.rotate_left(2);
            let mut v = vec![p(0., 0.)];
            v.extend_from_slice(&[p(-2., 0.), p(-2., -2.), p(0., -2.), p(0., 0.)]);
            v.extend_from_slice(&[p(2., 0.), p(2., 2.), p(0., 2.), p(0., 0.)]);
            let fig8 = Polyline::new(v).unwrap();
            let q = q * (r / 3.0);
            prop_assume!(fig8.dist_to(q) > 1e-6);
            let sum = winding_number(&l1, q).unwrap() + winding_number(&l2, q).unwrap();
            prop_assert_eq!(winding_number(&fig8, q).unwrap(), sum);
        }

        #[test]
        fn random_arrangement_invariants(segs in proptest::collection::vec((pt(), pt()), 1..12)) {
            let box_ = [p(-20., -20.), p(20., -20.), p(20., 20.), p(-20., 20.)];
            let mut input: Vec<(Segment, EdgeTag)> = (0..4)
                .map(|i| (Segment::new(box_[i], box_[(i + 1) % 4]), EdgeTag::Omega))
                .collect();
            for (a, b) in segs {
                if a.dist(b) > 1e-3 {
                    input.push((Segment::new(a, b), EdgeTag::Aux));
                }
            }
            let arr = Arrangement::from_segments(&input).unwrap();
            prop_assert_eq!(arr.euler_defect(), 1);
            let area: f64 = arr.bounded_faces().map(|f| arr.faces[f].area).sum();
            prop_assert!((area - 1600.0).abs() < 1e-9 * 1600.0);
            for e in &arr.edges {
                prop_assert!(e.length > 0.0);
            }
            for f in arr.bounded_faces() {
                prop_assert!(arr.faces[f].area > 0.0);
                prop_assert_eq!(arr.locate(arr.faces[f].witness).unwrap(), f);
            }
        }
    }
}
