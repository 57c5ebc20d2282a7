//! Piecewise-constant vector fields on the covering and the calibration checks.
//!
//! A [`SheetField`] stores one vector per (face, sheet) of a cell complex that
//! contains every cut edge; outside the window the field is zero. Sheet indices
//! use the same chart as [`SheetedSet`] labels.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::covering::{CoveringSpace, EdgeFrame};
use crate::families::PairSet;
use crate::geom::{
    clip_polygon_convex, segment_intersect, signed_area, winding_raw, Arrangement, EdgeTag, GeomError, Point2, Segment,
    SegmentIntersection, Vec2, EPS_GEO,
};
use crate::math;
use crate::sheets::{sigma_sides, SheetedSet, SigmaSide};

pub const DIV_TOL: f64 = 1e-9;
pub const SIZE_TOL: f64 = 1e-9;
/// Relative to the perimeter.
pub const EQUALITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CalibError {
    #[error("field complex is not refined against the cut edge {0:?}")]
    Unrefined(Segment),
    #[error("field has {field} sheets but the set has {set}")]
    SheetCount { field: usize, set: usize },
    #[error("cell {cell} has {got} values for {m} sheets")]
    CellValues { cell: usize, got: usize, m: usize },
    #[error("probe at {0:?} sits on a field edge")]
    Ambiguous(Point2),
    #[error("extension failed: {0}")]
    Extension(ExtensionFailure),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExtensionFailure {
    /// Normal flux through a hull side is not constant along it.
    VaryingFlux { edge: usize, sheet: usize },
    /// Two extension pieces overlap near this point.
    Overlap(Point2),
    /// The extended field still has a normal jump of this size.
    Residual(f64),
}

impl fmt::Display for ExtensionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionFailure::VaryingFlux { edge, sheet } => {
                write!(f, "flux of sheet {sheet} varies along hull side {edge}")
            }
            ExtensionFailure::Overlap(p) => write!(f, "stripe pieces overlap near ({}, {})", p.x, p.y),
            ExtensionFailure::Residual(r) => write!(f, "residual normal jump {r:e}"),
        }
    }
}

/// Convex polygon carrying one vector per sheet.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub ring: Vec<Point2>,
    pub values: Vec<Vec2>,
}

#[derive(Clone, Debug)]
pub struct SheetField {
    pub m: usize,
    pub complex: Arrangement,
    /// `values[face][sheet - 1]`.
    pub values: Vec<Vec<Vec2>>,
    pub window: Vec<Point2>,
    /// Cut membership per complex edge.
    pub sigma: Vec<Option<SigmaSide>>,
}

fn ring_segments(ring: &[Point2]) -> impl Iterator<Item = Segment> + '_ {
    (0..ring.len()).map(move |k| Segment::new(ring[k], ring[(k + 1) % ring.len()]))
}

impl SheetField {
    /// Field whose value at a face is that of the last cell containing it, zero
    /// where no cell applies. Cells are clipped to the window.
    pub fn from_cells(cov: &CoveringSpace, cells: &[Cell]) -> Result<SheetField, CalibError> {
        SheetField::assemble(cov, cells, true)
    }

    /// Like `from_cells` for simple, possibly non-convex rings already inside
    /// the window, such as the faces of another field's complex listed from
    /// largest to smallest.
    pub fn from_faces(cov: &CoveringSpace, cells: &[Cell]) -> Result<SheetField, CalibError> {
        SheetField::assemble(cov, cells, false)
    }

    /// Cells of every bounded face of the complex, largest ring first.
    pub fn face_cells(&self) -> Vec<Cell> {
        let mut faces: Vec<(f64, Cell)> = self
            .complex
            .bounded_faces()
            .map(|f| {
                let ring = self.complex.face_ring(f);
                (math::abs(signed_area(&ring)), Cell { ring, values: self.values[f].clone() })
            })
            .collect();
        faces.sort_by(|a, b| b.0.total_cmp(&a.0));
        faces.into_iter().map(|(_, c)| c).collect()
    }

    fn assemble(cov: &CoveringSpace, cells: &[Cell], clip: bool) -> Result<SheetField, CalibError> {
        let m = cov.m();
        let window = cov.window();
        let mut segs = cov.cut_segments();
        segs.extend(ring_segments(&window).map(|s| (s, EdgeTag::Window)));
        let mut clipped = Vec::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            if c.values.len() != m {
                return Err(CalibError::CellValues { cell: i, got: c.values.len(), m });
            }
            let ring = if clip { clip_polygon_convex(&c.ring, &window) } else { c.ring.clone() };
            segs.extend(ring_segments(&ring).filter(|s| s.len() > EPS_GEO).map(|s| (s, EdgeTag::Cell)));
            clipped.push(ring);
        }
        let complex = Arrangement::from_segments(&segs)?;
        let sigma = sigma_sides(&complex, cov);
        let values = (0..complex.faces.len())
            .map(|f| {
                if f == complex.unbounded {
                    return vec![Point2::ZERO; m];
                }
                let w = complex.faces[f].witness;
                (0..cells.len())
                    .rev()
                    .find(|&i| clipped[i].len() >= 3 && winding_raw(&clipped[i], w) != 0)
                    .map_or_else(|| vec![Point2::ZERO; m], |i| cells[i].values.clone())
            })
            .collect();
        Ok(SheetField { m, complex, values, window, sigma })
    }

    pub fn zero(cov: &CoveringSpace) -> Result<SheetField, CalibError> {
        SheetField::from_cells(cov, &[])
    }

    /// Value of sheet `j` (1-based) at `p`; zero outside the window.
    pub fn value(&self, j: usize, p: Point2) -> Vec2 {
        self.values[self.complex.locate_unchecked(p)][j - 1]
    }

    /// Value at a point strictly inside a face.
    pub fn value_checked(&self, j: usize, p: Point2) -> Result<Vec2, CalibError> {
        let f = self.complex.locate(p).map_err(|_| CalibError::Ambiguous(p))?;
        Ok(self.values[f][j - 1])
    }

    /// Add `c` to every value on every sheet inside the window.
    pub fn translate(&self, c: Vec2) -> SheetField {
        let mut out = self.clone();
        for (f, vals) in out.values.iter_mut().enumerate() {
            if f != out.complex.unbounded {
                vals.iter_mut().for_each(|v| *v += c);
            }
        }
        out
    }
}

/// Largest normal jump `|(Φ_left − Φ_right)·ν|` over sheets and interior edges,
/// pairing sheets across Σ_i by the shift `j ↦ j + i` from lens to outer side.
/// Edges on the window boundary are exempt.
pub fn check_divergence_free(f: &SheetField, cov: &CoveringSpace) -> Result<f64, CalibError> {
    let cx = &f.complex;
    for (s, tag) in cov.cut_segments() {
        if !matches!(tag, EdgeTag::Sigma(_)) {
            continue;
        }
        let q = s.midpoint();
        let on_cut = cx.edges.iter().any(|e| e.has_tag(|t| *t == tag) && cx.segment(e).dist_to(q) <= EPS_GEO);
        if !on_cut {
            return Err(CalibError::Unrefined(s));
        }
    }
    let m = f.m;
    let mut worst: f64 = 0.0;
    for (e, edge) in cx.edges.iter().enumerate() {
        if edge.left == edge.right || edge.has_tag(|t| *t == EdgeTag::Window) {
            continue;
        }
        let nu = cx.left_normal(edge);
        let (vl, vr) = (&f.values[edge.left], &f.values[edge.right]);
        for j in 1..=m {
            let (a, b) = match f.sigma[e] {
                None => (vl[j - 1], vr[j - 1]),
                Some(SigmaSide { i, lens_left: true }) => (vl[j - 1], vr[math::wrap_label((j + i) as i64, m) - 1]),
                Some(SigmaSide { i, lens_left: false }) => (vl[math::wrap_label((j + i) as i64, m) - 1], vr[j - 1]),
            };
            worst = worst.max(math::abs((a - b).dot(nu)));
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairMargin {
    pub pair: (usize, usize),
    /// Largest `|Φ^i − Φ^j|` over all faces.
    pub max: f64,
    pub exempt: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarginTable {
    pub entries: Vec<PairMargin>,
    /// Allowed excess over 2 on non-exempt pairs.
    pub tol: f64,
}

impl MarginTable {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.exempt || e.max <= 2.0 + self.tol)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&PairMargin> {
        let key = (i.min(j), i.max(j));
        self.entries.iter().find(|e| e.pair == key)
    }

    /// Non-exempt pairs above the bound.
    pub fn violations(&self) -> Vec<&PairMargin> {
        self.entries.iter().filter(|e| !e.exempt && e.max > 2.0 + self.tol).collect()
    }
}

/// Pairwise sheet differences over every face of the window.
pub fn check_size(f: &SheetField, exempt: &PairSet) -> MarginTable {
    check_size_with(f, exempt, SIZE_TOL)
}

pub fn check_size_with(f: &SheetField, exempt: &PairSet, tol: f64) -> MarginTable {
    let m = f.m;
    let mut entries = Vec::new();
    for i in 1..=m {
        for j in i + 1..=m {
            let max = f.values.iter().map(|v| v[i - 1].dist(v[j - 1])).fold(0.0, f64::max);
            entries.push(PairMargin { pair: (i, j), max, exempt: exempt.contains(&(i, j)) });
        }
    }
    MarginTable { entries, tol }
}

/// Pieces of boundary edge `s` between crossings with field edges.
fn split_by_complex(s: Segment, cx: &Arrangement) -> Result<Vec<Segment>, CalibError> {
    let d = s.b - s.a;
    let mut ts = vec![0.0, 1.0];
    for e in &cx.edges {
        let param = |p: Point2| (p - s.a).dot(d) / d.dot(d);
        match segment_intersect(s, cx.segment(e))? {
            SegmentIntersection::None => {}
            SegmentIntersection::Point(p) | SegmentIntersection::SharedEndpoint(p) => ts.push(param(p)),
            SegmentIntersection::Overlap(p, q) => {
                ts.push(param(p));
                ts.push(param(q));
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    Ok(ts
        .windows(2)
        .filter(|w| (w[1] - w[0]) * s.len() > EPS_GEO)
        .map(|w| Segment::new(s.a + d * w[0], s.a + d * w[1]))
        .collect())
}

/// Value of sheet `j` just off the midpoint `q` of a piece, on the side of `dir`.
fn side_value(f: &SheetField, j: usize, q: Point2, dir: Vec2, len: f64) -> Result<Vec2, CalibError> {
    let mut delta = (1e-7 * len.min(1.0)).max(2.0 * EPS_GEO);
    while delta < 0.25 * len {
        if let Ok(v) = f.value_checked(j, q + dir * delta) {
            return Ok(v);
        }
        delta *= 4.0;
    }
    f.value_checked(j, q + dir * (0.25 * len))
}

/// `∑ (Φ^i − Φ^j)·ν |e|` over the interface of `set`, with `i` the label on the
/// side `ν` points into and each sheet's value read on its own side.
pub fn calibration_integral(f: &SheetField, set: &SheetedSet) -> Result<f64, CalibError> {
    Ok(interface_pieces(f, set)?.iter().map(|p| p.flux * p.length).sum())
}

/// One straight piece of the interface with constant field traces.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfacePiece {
    pub segment: Segment,
    pub pair: (usize, usize),
    pub length: f64,
    /// `(Φ^i − Φ^j)·ν` on this piece.
    pub flux: f64,
}

pub fn interface_pieces(f: &SheetField, set: &SheetedSet) -> Result<Vec<InterfacePiece>, CalibError> {
    if f.m != set.m {
        return Err(CalibError::SheetCount { field: f.m, set: set.m });
    }
    let arr = &set.arrangement;
    let mut out = Vec::new();
    for e in set.boundary_edges() {
        let edge = &arr.edges[e];
        let (ll, lr) = (set.labels[edge.left], set.labels[edge.right]);
        for piece in split_by_complex(arr.segment(edge), &f.complex)? {
            let nu = (piece.b - piece.a).perp().normalized();
            let q = piece.midpoint();
            let left = side_value(f, ll, q, nu, piece.len())?;
            let right = side_value(f, lr, q, -nu, piece.len())?;
            out.push(InterfacePiece {
                segment: piece,
                pair: (ll.min(lr), ll.max(lr)),
                length: piece.len(),
                flux: left.dot(nu) - right.dot(nu),
            });
        }
    }
    Ok(out)
}

/// Largest `|(Φ^i − Φ^j)·ν − 2|` over the interface pieces.
pub fn saturation_gap(f: &SheetField, set: &SheetedSet) -> Result<f64, CalibError> {
    Ok(interface_pieces(f, set)?.iter().map(|p| math::abs(p.flux - 2.0)).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationReport {
    pub divergence: f64,
    pub margins: MarginTable,
    pub integral: f64,
    pub perimeter: f64,
    pub equality_residual: f64,
    pub constraints_ok: bool,
    /// Pairs whose interfaces the competitors must avoid.
    pub exempt: PairSet,
    pub verdict: bool,
}

impl CalibrationReport {
    /// What a passing report certifies.
    pub fn conclusion(&self) -> &'static str {
        match (self.verdict, self.exempt.is_empty()) {
            (false, _) => "no conclusion: some calibration condition fails",
            (true, true) => "the set minimizes perimeter among all constrained sets",
            (true, false) => "the set minimizes perimeter among constrained sets with no interface on the exempt pairs",
        }
    }
}

pub fn verify(
    f: &SheetField,
    set: &SheetedSet,
    cov: &CoveringSpace,
    exempt: &PairSet,
) -> Result<CalibrationReport, CalibError> {
    verify_with(f, set, cov, exempt, &Tolerances::default())
}

/// Acceptance thresholds for `verify_with`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub divergence: f64,
    pub size: f64,
    /// Relative to `max(P(E), 1)`.
    pub equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { divergence: DIV_TOL, size: SIZE_TOL, equality: EQUALITY_TOL }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances { divergence: tol, size: tol, equality: tol }
    }
}

pub fn verify_with(
    f: &SheetField,
    set: &SheetedSet,
    cov: &CoveringSpace,
    exempt: &PairSet,
    tol: &Tolerances,
) -> Result<CalibrationReport, CalibError> {
    let divergence = check_divergence_free(f, cov)?;
    let margins = check_size_with(f, exempt, tol.size);
    let integral = calibration_integral(f, set)?;
    let perimeter = set.perimeter();
    let equality_residual = math::abs(integral - perimeter);
    let constraints_ok = set.check_constraints().passed();
    let verdict = constraints_ok
        && divergence <= tol.divergence
        && margins.passed()
        && equality_residual <= tol.equality * perimeter.max(1.0);
    Ok(CalibrationReport {
        divergence,
        margins,
        integral,
        perimeter,
        equality_residual,
        constraints_ok,
        exempt: exempt.clone(),
        verdict,
    })
}

pub fn translate(f: &SheetField, c: Vec2) -> SheetField {
    f.translate(c)
}

/// Field inside the convex hull of the terminals: `base` per sheet, overridden
/// by `cells` where they apply.
#[derive(Clone, Debug, PartialEq)]
pub struct HullField {
    pub base: Vec<Vec2>,
    pub cells: Vec<Cell>,
}

impl HullField {
    pub fn constant(values: Vec<Vec2>) -> HullField {
        HullField { base: values, cells: Vec::new() }
    }

    pub fn value(&self, j: usize, p: Point2) -> Vec2 {
        self.cells.iter().rev().find(|c| winding_raw(&c.ring, p) != 0).map_or(self.base[j - 1], |c| c.values[j - 1])
    }
}

/// Normal fluxes above which a straight stripe would break the size bound
/// after the sheet shift.
fn straight_ok(s: &[f64], k: usize, m: usize) -> bool {
    let shifted = |j: usize| s[math::wrap_label(j as i64 - k as i64, m) - 1];
    (1..=m).all(|a| (a + 1..=m).all(|b| math::abs(shifted(a) - shifted(b)) <= 2.0 + SIZE_TOL))
}

/// Extend a divergence-free field on the hull to the whole window.
///
/// Each hull side carries its normal flux outward in a stripe. On a side with a
/// cut the stripe crosses the top of Σ_k, where sheet `j` continues as sheet
/// `j + k`. When that shift would pair fluxes differing by more than 2 the
/// stripe first passes a diffuser: two triangles refract it at
/// [`crate::covering::DIFFUSER_ANGLE`] into a band `1/cos θ` times wider, which
/// scales every value by `cos² θ`.
pub fn stripe_extension(inner: &HullField, cov: &CoveringSpace) -> Result<SheetField, CalibError> {
    let m = cov.m();
    if inner.base.len() != m {
        return Err(CalibError::CellValues { cell: 0, got: inner.base.len(), m });
    }
    let far = 4.0 * cov.window().iter().map(|p| p.dist(cov.config.centroid())).fold(0.0, f64::max);
    let mut pieces: Vec<Cell> = Vec::new();
    if m > 2 {
        let mut hull = cov.config.points.clone();
        if signed_area(&hull) < 0.0 {
            hull.reverse();
        }
        pieces.push(Cell { ring: hull, values: inner.base.clone() });
    }
    for frame in &cov.cuts.frames {
        let s = side_fluxes(inner, frame, m)?;
        pieces.extend(stripe_pieces(frame, &s, m, far));
    }
    let orient = |mut ring: Vec<Point2>| {
        if signed_area(&ring) < 0.0 {
            ring.reverse();
        }
        ring
    };
    let pieces: Vec<Cell> = pieces.into_iter().map(|c| Cell { ring: orient(c.ring), values: c.values }).collect();
    let mut cells = pieces.clone();
    cells.extend(inner.cells.iter().cloned());
    let field = SheetField::from_cells(cov, &cells)?;
    // Pieces may touch but not overlap.
    for f in field.complex.bounded_faces() {
        let w = field.complex.faces[f].witness;
        let hits = pieces.iter().filter(|c| winding_raw(&c.ring, w) != 0).count();
        if hits > 1 {
            return Err(CalibError::Extension(ExtensionFailure::Overlap(w)));
        }
    }
    let residual = check_divergence_free(&field, cov)?;
    if residual > DIV_TOL {
        return Err(CalibError::Extension(ExtensionFailure::Residual(residual)));
    }
    Ok(field)
}

/// Normal flux `Φ^j·n` through hull side `frame`, required constant along it.
fn side_fluxes(inner: &HullField, frame: &EdgeFrame, m: usize) -> Result<Vec<f64>, CalibError> {
    let mut s = vec![0.0; m];
    for (j, sj) in s.iter_mut().enumerate() {
        let mut first = None;
        for q in 1..8 {
            let p = frame.at(frame.w * q as f64 / 8.0, -1e-7 * frame.w);
            let v = inner.value(j + 1, p).dot(frame.n);
            match first {
                None => first = Some(v),
                Some(f) if math::abs(f - v) > 1e-12 => {
                    return Err(CalibError::Extension(ExtensionFailure::VaryingFlux { edge: frame.k, sheet: j + 1 }));
                }
                Some(_) => {}
            }
        }
        *sj = first.unwrap_or(0.0);
    }
    Ok(s)
}

fn stripe_pieces(fr: &EdgeFrame, s: &[f64], m: usize, far: f64) -> Vec<Cell> {
    let (w, a, y0, y1, e, th) = (fr.w, fr.a, fr.y0, fr.y1, fr.spread, fr.theta);
    let at = |x: f64, y: f64| fr.at(x, y);
    let along = |scale: f64, dir: Vec2| -> Vec<Vec2> { s.iter().map(|&sj| dir * (sj * scale)).collect() };
    let shifted = |scale: f64| -> Vec<Vec2> {
        (1..=m).map(|j| fr.n * (s[math::wrap_label(j as i64 - fr.k as i64, m) - 1] * scale)).collect()
    };
    if !fr.cut {
        return vec![Cell { ring: vec![at(0.0, 0.0), at(w, 0.0), at(w, far), at(0.0, far)], values: along(1.0, fr.n) }];
    }
    if straight_ok(s, fr.k, m) {
        return vec![
            Cell { ring: vec![at(0.0, 0.0), at(w, 0.0), at(w, y1), at(0.0, y1)], values: along(1.0, fr.n) },
            Cell { ring: vec![at(0.0, y1), at(w, y1), at(w, far), at(0.0, far)], values: shifted(1.0) },
        ];
    }
    let (c, sn) = (math::cos(th), math::sin(th));
    vec![
        Cell { ring: vec![at(0.0, 0.0), at(w, 0.0), at(w, a), at(w / 2.0, y0), at(0.0, a)], values: along(1.0, fr.n) },
        Cell { ring: vec![at(0.0, a), at(w / 2.0, y0), at(-e, y0)], values: along(c, fr.t * -sn + fr.n * c) },
        Cell { ring: vec![at(w, a), at(w + e, y0), at(w / 2.0, y0)], values: along(c, fr.t * sn + fr.n * c) },
        Cell { ring: vec![at(-e, y0), at(w + e, y0), at(w + e, y1), at(-e, y1)], values: along(c * c, fr.n) },
        Cell { ring: vec![at(-e, y1), at(w + e, y1), at(w + e, far), at(-e, far)], values: shifted(c * c) },
    ]
}

/// Exempt pairs as a set of normalized `(i, j)` with `i < j`.
pub fn pair_set(pairs: &[(usize, usize)]) -> PairSet {
    pairs.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect::<BTreeSet<_>>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{canonical_covering, PointConfig};
    use crate::sheets::network_to_sheeted_set;
    use crate::steiner::Network;

    const S3: f64 = math::SQRT3;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn triangle() -> (CoveringSpace, Network, HullField) {
        let cfg = PointConfig::new(vec![p(-S3 / 2.0, -0.5), p(S3 / 2.0, -0.5), p(0.0, 1.0)]).unwrap();
        let net =
            Network { terminals: cfg.points.clone(), steiner: vec![Point2::ZERO], edges: vec![(0, 3), (1, 3), (2, 3)] };
        let field = HullField::constant(vec![p(-1.0, 1.0 / S3), p(1.0, 1.0 / S3), p(0.0, -2.0 / S3)]);
        (canonical_covering(&cfg).unwrap(), net, field)
    }

    fn obtuse(alpha: f64) -> (CoveringSpace, Network, HullField) {
        let (c, s) = (math::cos(alpha), math::sin(alpha));
        let cfg = PointConfig::new(vec![p(-c, s), p(0.0, 0.0), p(c, s)]).unwrap();
        let net = Network { terminals: cfg.points.clone(), steiner: vec![], edges: vec![(0, 1), (1, 2)] };
        let field = HullField::constant(vec![p(0.0, 0.0), p(2.0 * s, -2.0 * c), p(-2.0 * s, -2.0 * c)]);
        (canonical_covering(&cfg).unwrap(), net, field)
    }

    fn hexagon_one() -> (CoveringSpace, Network, HullField) {
        let h = S3 / 2.0;
        let cfg =
            PointConfig::new(vec![p(-0.5, h), p(-1.0, 0.0), p(-0.5, -h), p(0.5, -h), p(1.0, 0.0), p(0.5, h)]).unwrap();
        let net =
            Network { terminals: cfg.points.clone(), steiner: vec![], edges: (0..5).map(|k| (k, k + 1)).collect() };
        let field =
            HullField::constant(vec![p(0.0, 0.0), p(S3, 1.0), p(S3, -1.0), p(0.0, -2.0), p(-S3, -1.0), p(-S3, 1.0)]);
        (canonical_covering(&cfg).unwrap(), net, field)
    }

    fn run(cov: &CoveringSpace, net: &Network, hull: &HullField, exempt: &PairSet) -> CalibrationReport {
        let field = stripe_extension(hull, cov).unwrap();
        let set = network_to_sheeted_set(net, cov).unwrap();
        verify(&field, &set, cov, exempt).unwrap()
    }

    #[test]
    fn triangle_calibrates_tripod() {
        let (cov, net, hull) = triangle();
        let rep = run(&cov, &net, &hull, &PairSet::new());
        assert!(rep.verdict, "{rep:?}");
        assert!((rep.integral - 6.0).abs() < 1e-12);
        for e in &rep.margins.entries {
            assert!((e.max - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn obtuse_triangle_calibrates_two_segments() {
        for alpha in [core::f64::consts::PI / 12.0, core::f64::consts::PI / 8.0, core::f64::consts::PI / 6.0 - 0.01] {
            let (cov, net, hull) = obtuse(alpha);
            let rep = run(&cov, &net, &hull, &PairSet::new());
            assert!(rep.verdict, "{alpha} {rep:?}");
            let m23 = rep.margins.get(2, 3).unwrap().max;
            let q = p(0.0, 0.3 * math::sin(alpha));
            let field = stripe_extension(&hull, &cov).unwrap();
            let hull_gap = field.value(2, q).dist(field.value(3, q));
            assert!((hull_gap - 4.0 * math::sin(alpha)).abs() < 1e-12);
            assert!(m23 >= hull_gap - 1e-12 && m23 <= 2.0 + SIZE_TOL, "{m23} {hull_gap}");
        }
    }

    #[test]
    fn hexagon_polygon_minus_edge_is_calibrated() {
        let (cov, net, hull) = hexagon_one();
        let exempt = pair_set(&[(2, 4), (2, 5), (2, 6), (3, 5), (3, 6), (4, 6)]);
        let rep = run(&cov, &net, &hull, &exempt);
        assert!(rep.verdict, "{rep:?}");
        assert!((rep.integral - 10.0).abs() < 1e-9);
    }

    #[test]
    fn segment_stripe_matches_hand_construction() {
        let cfg = PointConfig::new(vec![p(1.0, 0.0), p(-1.0, 0.0)]).unwrap();
        let cov = canonical_covering(&cfg).unwrap();
        assert!(cov.cuts.frames[0].n.dist(p(0.0, 1.0)) < 1e-12);
        let hull = HullField::constant(vec![p(0.0, -1.0), p(0.0, 1.0)]);
        let field = stripe_extension(&hull, &cov).unwrap();
        let top = cov.cuts.frames[0].y1;
        // A₁ lies beyond the top of Σ, A₂ is the rest of the stripe.
        let a1 = p(0.0, top + 0.1);
        for q in [p(0.0, 0.5 * top), p(0.3, -1.0)] {
            assert_eq!(field.value(1, q), p(0.0, -1.0));
            assert_eq!(field.value(2, q), p(0.0, 1.0));
        }
        assert_eq!(field.value(1, a1), p(0.0, 1.0));
        assert_eq!(field.value(2, a1), p(0.0, -1.0));
        assert_eq!(field.value(1, p(1.5, 0.2)), Point2::ZERO);
        let net = Network { terminals: cfg.points.clone(), steiner: vec![], edges: vec![(0, 1)] };
        let rep = verify(&field, &network_to_sheeted_set(&net, &cov).unwrap(), &cov, &PairSet::new()).unwrap();
        assert!(rep.verdict, "{rep:?}");
        assert!(rep.divergence < 1e-12);
    }

    #[test]
    fn zero_and_constant_fields_are_divergence_free() {
        let (cov, net, _) = triangle();
        let zero = SheetField::zero(&cov).unwrap();
        assert_eq!(check_divergence_free(&zero, &cov).unwrap(), 0.0);
        let set = network_to_sheeted_set(&net, &cov).unwrap();
        assert_eq!(calibration_integral(&zero, &set).unwrap(), 0.0);
        let shifted = zero.translate(p(5.0, -3.0));
        assert!(check_divergence_free(&shifted, &cov).unwrap() < 1e-12);
    }

    #[test]
    fn tangential_only_jumps_are_free_and_normal_jumps_are_not() {
        let (cov, _, _) = triangle();
        let big = 100.0;
        let right =
            Cell { ring: vec![p(0.0, -big), p(big, -big), p(big, big), p(0.0, big)], values: vec![p(1.0, 0.0); 3] };
        let field = SheetField::from_cells(&cov, core::slice::from_ref(&right)).unwrap();
        assert!((check_divergence_free(&field, &cov).unwrap() - 1.0).abs() < 1e-12);
        let along = Cell { values: vec![p(0.0, 1.0); 3], ..right };
        let field = SheetField::from_cells(&cov, &[along]).unwrap();
        // Only the window boundary sees a normal jump, and it is exempt.
        assert_eq!(check_divergence_free(&field, &cov).unwrap(), 0.0);
    }

    #[test]
    fn pentagon_margins() {
        let field = HullField::constant(vec![p(0.0, 0.0), p(2.0, 0.0), p(1.0, -S3), p(-1.0, -S3), p(-2.0, 0.0)]);
        let cfg = PointConfig::regular(5, 0.0);
        let cov = canonical_covering(&cfg).unwrap();
        let f = stripe_extension(&field, &cov).unwrap();
        let global = check_size(&f, &PairSet::new());
        assert!(!global.passed());
        assert!((global.get(2, 5).unwrap().max - 4.0).abs() < 1e-12);
        let j5 = pair_set(&[(2, 4), (2, 5), (3, 5)]);
        let fam = check_size(&f, &j5);
        assert!(fam.passed());
        let exempt: Vec<f64> = fam.entries.iter().filter(|e| e.exempt).map(|e| e.max).collect();
        let want = [12f64.sqrt(), 4.0, 12f64.sqrt()];
        for (a, b) in exempt.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let moved = check_size(&f.translate(p(0.4, 7.0)), &j5);
        for (a, b) in moved.entries.iter().zip(&fam.entries) {
            assert!((a.max - b.max).abs() < 1e-12);
        }
    }

    #[test]
    fn translation_keeps_verdict() {
        let (cov, net, hull) = triangle();
        let field = stripe_extension(&hull, &cov).unwrap();
        let set = network_to_sheeted_set(&net, &cov).unwrap();
        let rep = verify(&translate(&field, p(5.0, -3.0)), &set, &cov, &PairSet::new()).unwrap();
        assert!(rep.verdict, "{rep:?}");
    }
}
