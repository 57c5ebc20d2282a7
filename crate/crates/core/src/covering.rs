//! Cut systems, the m-sheeted covering as an identification table, and loop
//! monodromy.
//!
//! Sheets are indexed in the chart that is continuous across every Σ′ cut.
//! Crossing Σ_i from the lens I_i to the outer region O raises the sheet index
//! by i (mod m); crossing Σ′ changes nothing.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::geom::{
    convex_hull, polygon_centroid, segment_intersect, signed_area, winding_raw, EdgeTag, GeomError, Point2, Polyline,
    Segment, SegmentIntersection, Vec2, EPS_GEO,
};
use crate::math;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CoveringError {
    #[error("a configuration needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("points {0} and {1} coincide")]
    Coincident(usize, usize),
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("points are not in strictly convex position in their cyclic order; relabel along a network traversal and supply cuts explicitly")]
    NotConvex,
    #[error("invalid cut system: {0}")]
    InvalidCuts(ValidationReport),
    #[error("loop is not transversal to the cuts: {0}")]
    NonTransversal(&'static str),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Terminal set S = {p_1, …, p_m} in cyclic order.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConfig {
    pub points: Vec<Point2>,
}

impl PointConfig {
    pub fn new(points: Vec<Point2>) -> Result<Self, CoveringError> {
        if points.len() < 2 {
            return Err(CoveringError::TooFewPoints(points.len()));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(CoveringError::NonFinite(i + 1));
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i].dist(points[j]) <= EPS_GEO {
                    return Err(CoveringError::Coincident(i + 1, j + 1));
                }
            }
        }
        Ok(PointConfig { points })
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// Point with 1-based label.
    pub fn p(&self, label: usize) -> Point2 {
        self.points[label - 1]
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.points {
            for b in &self.points {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    pub fn centroid(&self) -> Point2 {
        let s = self.points.iter().fold(Point2::ZERO, |acc, &p| acc + p);
        s * (1.0 / self.m() as f64)
    }

    /// +1 for counter-clockwise strictly convex position, −1 for clockwise,
    /// `None` otherwise. Two points always count as convex.
    pub fn convex_orientation(&self) -> Option<f64> {
        let m = self.m();
        if m == 2 {
            return Some(1.0);
        }
        let mut sign = 0.0;
        for i in 0..m {
            let (a, b, c) = (self.points[i], self.points[(i + 1) % m], self.points[(i + 2) % m]);
            let cr = (b - a).cross(c - b) / ((b - a).norm() * (c - b).norm());
            if math::abs(cr) <= 1e-9 {
                return None;
            }
            let s = if cr > 0.0 { 1.0 } else { -1.0 };
            if sign == 0.0 {
                sign = s;
            } else if s != sign {
                return None;
            }
        }
        let area = signed_area(&self.points);
        let hull = convex_hull(&self.points);
        if hull.len() != m || math::abs(math::abs(area) - signed_area(&hull)) > 1e-9 * math::abs(area) {
            return None;
        }
        Some(sign)
    }

    pub fn transformed(&self, f: impl Fn(Point2) -> Point2) -> PointConfig {
        PointConfig { points: self.points.iter().map(|&p| f(p)).collect() }
    }

    /// Regular m-gon with unit sides, labels counter-clockwise starting at angle `start`.
    pub fn regular(m: usize, start: f64) -> PointConfig {
        let r = 1.0 / (2.0 * math::sin(core::f64::consts::PI / m as f64));
        let pts = (0..m).map(|k| Point2::polar(r, start + 2.0 * core::f64::consts::PI * k as f64 / m as f64)).collect();
        PointConfig { points: pts }
    }
}

/// Local frame of the polygon edge p_k → p_{k+1} used by the canonical cuts
/// and by stripe extensions: `at(x, y) = origin + x t + y n` with `n` the
/// outward normal.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFrame {
    pub k: usize,
    pub origin: Point2,
    pub t: Vec2,
    pub n: Vec2,
    pub w: f64,
    /// Height where the diffuser wedges start.
    pub a: f64,
    /// Height of the widened band.
    pub y0: f64,
    /// Height of the top of Σ_k.
    pub y1: f64,
    /// Lateral widening on each side of the band.
    pub spread: f64,
    /// Refraction angle of the diffuser.
    pub theta: f64,
    pub cut: bool,
}

impl EdgeFrame {
    pub fn at(&self, x: f64, y: f64) -> Point2 {
        self.origin + self.t * x + self.n * y
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutSystem {
    pub sigma: Vec<Polyline>,
    pub sigma_prime: Vec<Polyline>,
    /// Convex polygon Ω (counter-clockwise) containing every cut.
    pub omega: Vec<Point2>,
    /// Edge frames, present for canonical cuts only.
    pub frames: Vec<EdgeFrame>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutFailure {
    NotSimple {
        i: usize,
        primed: bool,
    },
    Endpoints {
        i: usize,
        primed: bool,
    },
    /// Consecutive cuts meet away from their shared terminal.
    Adjacent {
        i: usize,
        primed: bool,
    },
    /// Cuts i and l with |i−l| > 1 meet.
    Separated {
        i: usize,
        l: usize,
        primed: bool,
    },
    /// Σ_i and Σ′_l meet outside S.
    Disjoint {
        i: usize,
        l: usize,
    },
    /// At p_i the two Σ-arcs are not adjacent in the cyclic order.
    ArcOrder {
        i: usize,
    },
    OutsideOmega,
    WrongCount,
    OverlappingLenses {
        i: usize,
        l: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationReport {
    pub failures: Vec<CutFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Whether condition `name` ∈ {"a","b","c","i","ii"} holds.
    pub fn condition(&self, name: &str) -> bool {
        !self.failures.iter().any(|f| {
            let c = match f {
                CutFailure::NotSimple { .. } | CutFailure::Endpoints { .. } | CutFailure::WrongCount => "a",
                CutFailure::Adjacent { .. } => "b",
                CutFailure::Separated { .. } => "c",
                CutFailure::Disjoint { .. } => "i",
                CutFailure::ArcOrder { .. } => "ii",
                CutFailure::OutsideOmega | CutFailure::OverlappingLenses { .. } => "region",
            };
            c == name
        })
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "all conditions pass");
        }
        for (n, x) in self.failures.iter().enumerate() {
            if n > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{x:?}")?;
        }
        Ok(())
    }
}

/// Every point where the two polylines meet (overlaps contribute both ends).
fn polyline_contacts(a: &Polyline, b: &Polyline) -> Result<Vec<(Point2, bool)>, GeomError> {
    let mut out = Vec::new();
    for s in a.segments() {
        for t in b.segments() {
            match segment_intersect(s, t)? {
                SegmentIntersection::None => {}
                SegmentIntersection::Point(p) | SegmentIntersection::SharedEndpoint(p) => out.push((p, false)),
                SegmentIntersection::Overlap(p, q) => {
                    out.push((p, true));
                    out.push((q, true));
                }
            }
        }
    }
    Ok(out)
}

fn only_at(contacts: &[(Point2, bool)], allowed: &[Point2]) -> bool {
    contacts.iter().all(|(p, overlap)| !overlap && allowed.iter().any(|q| q.dist(*p) <= 10.0 * EPS_GEO))
}

pub fn validate_cuts(config: &PointConfig, cuts: &CutSystem) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let m = config.m();
    if cuts.sigma.len() != m - 1 || cuts.sigma_prime.len() != m - 1 {
        rep.failures.push(CutFailure::WrongCount);
        return rep;
    }
    let fam = [(&cuts.sigma, false), (&cuts.sigma_prime, true)];
    for (curves, primed) in fam {
        for (k, c) in curves.iter().enumerate() {
            let i = k + 1;
            if !c.is_simple() {
                rep.failures.push(CutFailure::NotSimple { i, primed });
            }
            if c.first().dist(config.p(i)) > EPS_GEO || c.last().dist(config.p(i + 1)) > EPS_GEO {
                rep.failures.push(CutFailure::Endpoints { i, primed });
            }
        }
        for k in 0..curves.len() {
            for l in k + 1..curves.len() {
                let contacts = match polyline_contacts(&curves[k], &curves[l]) {
                    Ok(c) => c,
                    Err(_) => {
                        rep.failures.push(CutFailure::Separated { i: k + 1, l: l + 1, primed });
                        continue;
                    }
                };
                if l == k + 1 {
                    if !only_at(&contacts, &[config.p(k + 2)]) {
                        rep.failures.push(CutFailure::Adjacent { i: k + 1, primed });
                    }
                } else if !contacts.is_empty() {
                    rep.failures.push(CutFailure::Separated { i: k + 1, l: l + 1, primed });
                }
            }
        }
    }
    for (k, s) in cuts.sigma.iter().enumerate() {
        for (l, sp) in cuts.sigma_prime.iter().enumerate() {
            let ok = match polyline_contacts(s, sp) {
                Ok(c) => only_at(&c, &config.points),
                Err(_) => false,
            };
            if !ok {
                rep.failures.push(CutFailure::Disjoint { i: k + 1, l: l + 1 });
            }
        }
    }
    // Cyclic order at interior terminals.
    for i in 2..m {
        let p = config.p(i);
        let dir_in = |c: &Polyline| c.vertices[c.vertices.len() - 2] - p;
        let dir_out = |c: &Polyline| c.vertices[1] - p;
        let arcs = [
            (dir_in(&cuts.sigma[i - 2]).angle(), true),
            (dir_out(&cuts.sigma[i - 1]).angle(), true),
            (dir_in(&cuts.sigma_prime[i - 2]).angle(), false),
            (dir_out(&cuts.sigma_prime[i - 1]).angle(), false),
        ];
        let mut sorted = arcs;
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let alternating = (0..4).all(|k| sorted[k].1 != sorted[(k + 1) % 4].1);
        if alternating {
            rep.failures.push(CutFailure::ArcOrder { i });
        }
    }
    let inside = |q: Point2| {
        let n = cuts.omega.len();
        n >= 3
            && (0..n).all(|k| {
                let (a, b) = (cuts.omega[k], cuts.omega[(k + 1) % n]);
                (b - a).cross(q - a) > 0.0
            })
    };
    let all_in = cuts.sigma.iter().chain(cuts.sigma_prime.iter()).flat_map(|c| c.vertices.iter()).all(|&q| inside(q));
    if !all_in {
        rep.failures.push(CutFailure::OutsideOmega);
    }
    if rep.failures.is_empty() {
        let lenses: Vec<Vec<Point2>> = (0..m - 1).map(|k| lens_ring(cuts, k)).collect();
        for k in 0..lenses.len() {
            for l in k + 1..lenses.len() {
                let probe = |ring: &Vec<Point2>, other: &Vec<Point2>| {
                    ring.iter().any(|&q| {
                        winding_raw(other, q) != 0
                            && !config.points.iter().any(|s| s.dist(q) <= EPS_GEO)
                            && ring_dist(other, q) > EPS_GEO
                    })
                };
                if probe(&lenses[k], &lenses[l]) || probe(&lenses[l], &lenses[k]) {
                    rep.failures.push(CutFailure::OverlappingLenses { i: k + 1, l: l + 1 });
                }
            }
        }
    }
    rep
}

fn ring_dist(ring: &[Point2], q: Point2) -> f64 {
    let n = ring.len();
    (0..n).map(|k| Segment::new(ring[k], ring[(k + 1) % n]).dist_to(q)).fold(f64::INFINITY, f64::min)
}

/// Closed ring Σ_i followed by Σ′_i backwards (0-based `k = i − 1`).
fn lens_ring(cuts: &CutSystem, k: usize) -> Vec<Point2> {
    let mut ring = cuts.sigma[k].vertices.clone();
    ring.pop();
    let sp = &cuts.sigma_prime[k].vertices;
    for q in sp.iter().rev().take(sp.len() - 1) {
        ring.push(*q);
    }
    ring
}

/// Refraction angle used by the canonical diffuser bands.
pub const DIFFUSER_ANGLE: f64 = 55.0 * core::f64::consts::PI / 180.0;

/// Σ′_i is the polygon side p_i p_{i+1}; Σ_i leaves p_i along the outward
/// normal, widens into a box above the side and returns to p_{i+1}.
pub fn canonical_cuts(config: &PointConfig) -> Result<CutSystem, CoveringError> {
    let orient = config.convex_orientation().ok_or(CoveringError::NotConvex)?;
    let m = config.m();
    let theta = DIFFUSER_ANGLE;
    let tan_t = math::tan(theta);
    let d = (0..m).map(|k| config.points[k].dist(config.points[(k + 1) % m])).fold(0.0, f64::max);
    let spread_max = 0.5 * d * tan_t * tan_t;
    // Smallest exterior turning angle between consecutive outward normals.
    let mut cot_half: f64 = 0.0;
    if m > 2 {
        for k in 0..m {
            let t0 = (config.points[k] - config.points[(k + m - 1) % m]).normalized();
            let t1 = (config.points[(k + 1) % m] - config.points[k]).normalized();
            let beta = math::acos(t0.dot(t1));
            cot_half = cot_half.max(math::cos(beta / 2.0) / math::sin(beta / 2.0));
        }
    }
    let a = 1.2 * spread_max * cot_half + 0.15 * d;
    let mut frames = Vec::with_capacity(m);
    for k in 0..m {
        let p = config.points[k];
        let q = config.points[(k + 1) % m];
        let w = p.dist(q);
        let t = (q - p).normalized();
        let n = Point2::new(t.y, -t.x) * orient;
        let y0 = a + 0.5 * w * tan_t;
        frames.push(EdgeFrame {
            k: k + 1,
            origin: p,
            t,
            n,
            w,
            a,
            y0,
            y1: y0 + 0.3 * d,
            spread: 0.5 * w * tan_t * tan_t,
            theta,
            cut: k + 1 < m,
        });
    }
    let mut sigma = Vec::with_capacity(m - 1);
    let mut sigma_prime = Vec::with_capacity(m - 1);
    for f in frames.iter().take(m - 1) {
        let (w, e) = (f.w, f.spread);
        sigma.push(Polyline::new(vec![
            f.at(0.0, 0.0),
            f.at(0.0, f.a),
            f.at(-e, f.y0),
            f.at(-e, f.y1),
            f.at(w + e, f.y1),
            f.at(w + e, f.y0),
            f.at(w, f.a),
            f.at(w, 0.0),
        ])?);
        sigma_prime.push(Polyline::new(vec![f.at(0.0, 0.0), f.at(w, 0.0)])?);
    }
    let mut all: Vec<Point2> = config.points.clone();
    for c in &sigma {
        all.extend_from_slice(&c.vertices);
    }
    let omega = scaled_hull(&all, 1.25, 0.2 * config.diameter());
    Ok(CutSystem { sigma, sigma_prime, omega, frames })
}

/// Convex hull of `pts` scaled about its centroid by `factor`, then pushed out
/// so every side moves by at least `min_offset`.
pub fn scaled_hull(pts: &[Point2], factor: f64, min_offset: f64) -> Vec<Point2> {
    let hull = convex_hull(pts);
    let c = polygon_centroid(&hull);
    let inradius = (0..hull.len())
        .map(|k| {
            let (a, b) = (hull[k], hull[(k + 1) % hull.len()]);
            (b - a).normalized().cross(c - a)
        })
        .fold(f64::INFINITY, f64::min);
    let f = factor.max(1.0 + min_offset / inradius.max(1e-12));
    hull.iter().map(|&q| c + (q - c) * f).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Region {
    Outer,
    /// Lens I_i, 1-based.
    Lens(usize),
}

#[derive(Clone, Debug)]
pub struct CoveringSpace {
    pub config: PointConfig,
    pub cuts: CutSystem,
    /// Boundary ring of each lens I_i.
    pub lenses: Vec<Vec<Point2>>,
}

impl CoveringSpace {
    pub fn m(&self) -> usize {
        self.config.m()
    }

    pub fn region_of(&self, p: Point2) -> Region {
        for (k, ring) in self.lenses.iter().enumerate() {
            if winding_raw(ring, p) != 0 {
                return Region::Lens(k + 1);
            }
        }
        Region::Outer
    }

    /// Sheet shift attached to a region by the identification table.
    pub fn shift(&self, r: Region) -> usize {
        match r {
            Region::Outer => 0,
            Region::Lens(i) => i,
        }
    }

    /// Sheet index on the outer side of Σ_i matching sheet `j` on the lens side.
    pub fn across_sigma(&self, i: usize, j: usize) -> usize {
        math::wrap_label(j as i64 + i as i64, self.m())
    }

    /// Tagged segments of all cuts and of ∂Ω.
    pub fn cut_segments(&self) -> Vec<(Segment, EdgeTag)> {
        let mut out = Vec::new();
        for (k, c) in self.cuts.sigma.iter().enumerate() {
            out.extend(c.segments().map(|s| (s, EdgeTag::Sigma(k + 1))));
        }
        for (k, c) in self.cuts.sigma_prime.iter().enumerate() {
            out.extend(c.segments().map(|s| (s, EdgeTag::SigmaPrime(k + 1))));
        }
        let om = &self.cuts.omega;
        for k in 0..om.len() {
            out.push((Segment::new(om[k], om[(k + 1) % om.len()]), EdgeTag::Omega));
        }
        out
    }

    /// Window W ⊇ Ω on which fields live.
    pub fn window(&self) -> Vec<Point2> {
        scaled_hull(&self.cuts.omega, 1.3, 0.0)
    }
}

pub fn build_covering(config: &PointConfig, cuts: &CutSystem) -> Result<CoveringSpace, CoveringError> {
    let rep = validate_cuts(config, cuts);
    if !rep.passed() {
        return Err(CoveringError::InvalidCuts(rep));
    }
    let lenses = (0..config.m() - 1).map(|k| lens_ring(cuts, k)).collect();
    Ok(CoveringSpace { config: config.clone(), cuts: cuts.clone(), lenses })
}

/// Convenience: canonical cuts followed by `build_covering`.
pub fn canonical_covering(config: &PointConfig) -> Result<CoveringSpace, CoveringError> {
    let cuts = canonical_cuts(config)?;
    build_covering(config, &cuts)
}

/// Bijection of the sheet labels `1..=m`; `map[j-1]` is the image of sheet j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheetPermutation {
    pub map: Vec<usize>,
}

impl SheetPermutation {
    pub fn identity(m: usize) -> Self {
        SheetPermutation { map: (1..=m).collect() }
    }

    pub fn shift(m: usize, s: i64) -> Self {
        SheetPermutation { map: (1..=m).map(|j| math::wrap_label(j as i64 + s, m)).collect() }
    }

    pub fn apply(&self, j: usize) -> usize {
        self.map[j - 1]
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &SheetPermutation) -> SheetPermutation {
        SheetPermutation { map: self.map.iter().map(|&j| other.apply(j)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(k, &j)| j == k + 1)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let m = self.map.len();
        let mut seen = vec![false; m];
        let mut out = Vec::new();
        for s in 1..=m {
            if seen[s - 1] {
                continue;
            }
            let mut c = Vec::new();
            let mut j = s;
            while !seen[j - 1] {
                seen[j - 1] = true;
                c.push(j);
                j = self.apply(j);
            }
            out.push(c);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.cycles().len() == 1
    }

    pub fn is_valid(&self) -> bool {
        let mut v = self.map.clone();
        v.sort_unstable();
        v.iter().enumerate().all(|(k, &j)| j == k + 1)
    }
}

impl fmt::Display for SheetPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for c in self.cycles().iter().filter(|c| c.len() > 1) {
            s.push('(');
            for (k, j) in c.iter().enumerate() {
                if k > 0 {
                    s.push(' ');
                }
                s.push_str(&alloc::format!("{j}"));
            }
            s.push(')');
        }
        if s.is_empty() {
            s.push_str("id");
        }
        f.write_str(&s)
    }
}

/// Sheet permutation obtained by lifting a closed loop: sheet j at the start
/// point is carried to sheet `perm.apply(j)` at the end.
pub fn monodromy(cov: &CoveringSpace, lp: &Polyline) -> Result<SheetPermutation, CoveringError> {
    if !lp.is_closed() {
        return Err(GeomError::OpenLoop.into());
    }
    let m = cov.m();
    for s in &cov.config.points {
        if lp.dist_to(*s) <= EPS_GEO {
            return Err(CoveringError::NonTransversal("loop passes through a terminal"));
        }
    }
    for c in cov.cuts.sigma.iter() {
        for v in &c.vertices {
            if lp.dist_to(*v) <= EPS_GEO {
                return Err(CoveringError::NonTransversal("loop passes through a cut vertex"));
            }
        }
    }
    let mut shift: i64 = 0;
    for seg in lp.segments() {
        let d = seg.b - seg.a;
        let mut events: Vec<(f64, i64)> = Vec::new();
        for (k, c) in cov.cuts.sigma.iter().enumerate() {
            let i = (k + 1) as i64;
            for s in c.segments() {
                match segment_intersect(seg, s)? {
                    SegmentIntersection::None => {}
                    SegmentIntersection::Point(x) => {
                        if s.dist_to(seg.a) <= EPS_GEO || s.dist_to(seg.b) <= EPS_GEO {
                            return Err(CoveringError::NonTransversal("loop vertex on a cut"));
                        }
                        let probe = s.midpoint() + (s.b - s.a).perp().normalized() * (1e-6 * s.len());
                        let left_is_lens = winding_raw(&cov.lenses[k], probe) != 0;
                        let to_left = (s.b - s.a).cross(d) > 0.0;
                        let entering = to_left == left_is_lens;
                        let t = (x - seg.a).dot(d) / d.dot(d);
                        events.push((t, if entering { -i } else { i }));
                    }
                    _ => return Err(CoveringError::NonTransversal("loop touches a cut tangentially")),
                }
            }
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, s) in events {
            shift += s;
        }
    }
    Ok(SheetPermutation::shift(m, shift))
}

/// Closed loop based far outside the hull that winds once around each
/// terminal in `subset` and around no other terminal.
pub fn subset_loop(cov: &CoveringSpace, subset: &[usize]) -> Polyline {
    let c = cov.config.centroid();
    if subset.is_empty() {
        let far = c + Point2::new(100.0 * cov.config.diameter(), 0.0);
        let ring: Vec<Point2> = (0..16).map(|k| far + Point2::polar(1.0, 2.0 * PI * k as f64 / 16.0)).collect();
        return Polyline::closed(&ring).unwrap();
    }
    let big = 50.0 * cov.config.diameter();
    let r = 0.02 * cov.config.diameter();
    let mut ids: Vec<usize> = subset.to_vec();
    ids.sort_by(|&a, &b| (cov.config.p(a) - c).angle().total_cmp(&(cov.config.p(b) - c).angle()));
    let mut v = vec![c + Point2::new(big, 0.0).rotated(-3.2)];
    let ang = -3.2;
    let arc_to = |v: &mut Vec<Point2>, from: f64, to: f64| {
        let steps = 32;
        for s in 1..=steps {
            v.push(c + Point2::polar(big, from + (to - from) * s as f64 / steps as f64));
        }
    };
    for &j in &ids {
        let p = cov.config.p(j);
        let u = (p - c).normalized();
        let far = c + u * big;
        arc_to(&mut v, ang, u.angle());
        v.push(p + u * r);
        for k in 0..24 {
            v.push(p + (u * r).rotated(0.1 + 2.0 * PI * k as f64 / 24.0));
        }
        v.push(p + u * r);
        v.push(far);
        arc_to(&mut v, u.angle(), ang);
    }
    v.dedup_by(|a, b| a.dist(*b) < 1e-12);
    Polyline::new(v).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::winding_number;
    use proptest::prelude::*;

    fn hexagon() -> PointConfig {
        let s = 3f64.sqrt() / 2.0;
        PointConfig::new(vec![
            Point2::new(-0.5, s),
            Point2::new(-1.0, 0.0),
            Point2::new(-0.5, -s),
            Point2::new(0.5, -s),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, s),
        ])
        .unwrap()
    }

    fn segment() -> PointConfig {
        PointConfig::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).unwrap()
    }

    fn circle(c: Point2, r: f64, n: usize) -> Vec<Point2> {
        (0..n).map(|k| c + Point2::polar(r, 0.123 + 2.0 * core::f64::consts::PI * k as f64 / n as f64)).collect()
    }

    #[test]
    fn hexagon_canonical_cuts_validate() {
        let cfg = hexagon();
        let cuts = canonical_cuts(&cfg).unwrap();
        assert_eq!(cuts.sigma.len(), 5);
        let rep = validate_cuts(&cfg, &cuts);
        assert!(rep.passed(), "{rep}");
        let cov = build_covering(&cfg, &cuts).unwrap();
        assert_eq!(cov.lenses.len(), 5);
        let shifts: Vec<usize> = (1..=5).map(|i| cov.shift(Region::Lens(i))).collect();
        assert_eq!(shifts, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn segment_and_triangle_coverings() {
        let cov = canonical_covering(&segment()).unwrap();
        assert_eq!(cov.lenses.len(), 1);
        let tri = PointConfig::regular(3, 0.3);
        let cov3 = canonical_covering(&tri).unwrap();
        assert_eq!(cov3.lenses.len(), 2);
    }

    #[test]
    fn collinear_rejected() {
        let cfg = PointConfig::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)]).unwrap();
        assert_eq!(canonical_cuts(&cfg).unwrap_err(), CoveringError::NotConvex);
    }

    #[test]
    fn constructed_violations() {
        let cfg = hexagon();
        let mut cuts = canonical_cuts(&cfg).unwrap();
        // Route Σ_3 through an interior point of Σ_1.
        let through = cuts.sigma[0].vertices[3];
        let mut v = cuts.sigma[2].vertices.clone();
        v.insert(1, through);
        cuts.sigma[2] = Polyline::new(v).unwrap();
        let rep = validate_cuts(&cfg, &cuts);
        assert!(!rep.condition("c"));

        let mut same = canonical_cuts(&cfg).unwrap();
        same.sigma = same.sigma_prime.clone();
        let rep = validate_cuts(&cfg, &same);
        assert!(!rep.condition("i"));
        assert!(build_covering(&cfg, &same).is_err());
    }

    #[test]
    fn arc_order_violation() {
        let cfg = hexagon();
        let mut cuts = canonical_cuts(&cfg).unwrap();
        // Make Σ_2 leave p_2 on the inner side of the polygon.
        let p2 = cfg.p(2);
        let inner = p2 + (Point2::ZERO - p2) * 0.3;
        let mut v = cuts.sigma[1].vertices.clone();
        v.insert(1, inner);
        v[2] = inner + (v[2] - inner) * 1.0;
        cuts.sigma[1] = Polyline::new(v).unwrap();
        let rep = validate_cuts(&cfg, &cuts);
        assert!(!rep.passed());
    }

    #[test]
    fn double_cover_transposition() {
        let cov = canonical_covering(&segment()).unwrap();
        let small = Polyline::closed(&circle(Point2::new(0.0, 0.0), 0.05, 32)).unwrap();
        let perm = monodromy(&cov, &small).unwrap();
        assert_eq!(perm.map, vec![2, 1]);
        let far = Polyline::closed(&circle(Point2::new(100.0, 0.0), 1.0, 16)).unwrap();
        assert!(monodromy(&cov, &far).unwrap().is_identity());
    }

    #[test]
    fn pentagon_pair_loop_is_five_cycle() {
        let cov = canonical_covering(&PointConfig::regular(5, 0.7)).unwrap();
        let perm = monodromy(&cov, &subset_loop(&cov, &[1, 2])).unwrap();
        assert!(perm.is_transitive());
        assert!(monodromy(&cov, &subset_loop(&cov, &[1, 2, 3, 4, 5])).unwrap().is_identity());
    }

    #[test]
    fn subset_shift_is_subset_size() {
        // The net shift of a loop around a subset T is ±|T| mod m.
        let cov = canonical_covering(&PointConfig::regular(6, 0.2)).unwrap();
        for mask in 1u32..63 {
            let subset: Vec<usize> = (1..=6).filter(|j| mask & (1 << (j - 1)) != 0).collect();
            let lp = subset_loop(&cov, &subset);
            for j in 1..=6 {
                let w = winding_number(&lp, cov.config.p(j)).unwrap();
                assert_eq!(w, i32::from(subset.contains(&j)));
            }
            let perm = monodromy(&cov, &lp).unwrap();
            let k = subset.len() as i64;
            assert!(
                perm == SheetPermutation::shift(6, k) || perm == SheetPermutation::shift(6, -k),
                "{subset:?} {perm}"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn loop_composition(a in 0usize..31, b in 0usize..31) {
            let cov = canonical_covering(&PointConfig::regular(5, 0.7)).unwrap();
            let sub = |mask: usize| -> Vec<usize> { (1..=5).filter(|j| (mask + 1) & (1 << (j - 1)) != 0).collect() };
            let la = subset_loop(&cov, &sub(a));
            let lb = subset_loop(&cov, &sub(b));
            let mut v = la.vertices.clone();
            v.extend_from_slice(&lb.vertices[1..]);
            let cat = Polyline::new(v).unwrap();
            let pa = monodromy(&cov, &la).unwrap();
            let pb = monodromy(&cov, &lb).unwrap();
            prop_assert_eq!(monodromy(&cov, &cat).unwrap(), pa.then(&pb));
        }

        #[test]
        fn homotopy_invariance(dx in -0.01f64..0.01, dy in -0.01f64..0.01, mask in 1usize..31) {
            let cov = canonical_covering(&PointConfig::regular(5, 0.7)).unwrap();
            let subset: Vec<usize> = (1..=5).filter(|j| mask & (1 << (j - 1)) != 0).collect();
            let lp = subset_loop(&cov, &subset);
            let moved: Vec<Point2> = lp.vertices.iter().map(|&q| q + Point2::new(dx, dy)).collect();
            let moved = Polyline::new(moved).unwrap();
            prop_assert_eq!(monodromy(&cov, &lp).unwrap(), monodromy(&cov, &moved).unwrap());
        }

        #[test]
        fn prime_m_subset_loops_transitive(mask in 1usize..127) {
            let cov = canonical_covering(&PointConfig::regular(7, 0.1)).unwrap();
            let subset: Vec<usize> = (1..=7).filter(|j| mask & (1 << (j - 1)) != 0).collect();
            prop_assert!(monodromy(&cov, &subset_loop(&cov, &subset)).unwrap().is_transitive());
        }
    }
}
