//! Constrained sheeted sets: one sheet label per face of a base arrangement.
//!
//! Labels live in the chart that is continuous across every Σ′ cut. Crossing
//! Σ_i from its lens to the outer region adds `i` to the label (mod m). Sets are
//! supported off the cuts Σ: their boundary is the set of off-cut edges where
//! the labels differ, and a labeling that breaks the gluing rule along some Σ_i
//! is reported by [`SheetedSet::check_constraints`].

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::covering::CoveringSpace;
use crate::geom::{
    segment_intersect, winding_raw, Arrangement, EdgeTag, GeomError, Point2, Segment, SegmentIntersection, EPS_GEO,
};
use crate::math;
use crate::steiner::Network;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SheetError {
    #[error("network is not connected")]
    NotConnected,
    #[error("network contains a loop")]
    HasLoop,
    #[error("network vertex {0} is neither a terminal nor a degree-3 Steiner point")]
    BadVertex(usize),
    #[error("network edge {0} meets a cut Σ")]
    OnCut(usize),
    #[error("terminal order {0:?} around the network does not match the covering")]
    TerminalOrder(Vec<usize>),
    #[error("labels disagree around face {0}")]
    Inconsistent(usize),
    #[error("network edge {0} does not separate different sheets")]
    NotBoundary(usize),
    #[error("label vector has {got} entries for {faces} faces")]
    LabelCount { got: usize, faces: usize },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// How an arrangement edge sits on a cut Σ_i.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigmaSide {
    pub i: usize,
    /// The lens I_i lies on the left of the edge.
    pub lens_left: bool,
}

#[derive(Clone, Debug)]
pub struct SheetedSet {
    pub m: usize,
    pub arrangement: Arrangement,
    /// Sheet label in `1..=m` per face.
    pub labels: Vec<usize>,
    pub terminals: Vec<Point2>,
    /// Cut membership per arrangement edge.
    pub sigma: Vec<Option<SigmaSide>>,
    /// Ω, outside of which every face must carry label 1.
    pub omega: Vec<Point2>,
}

/// Pair of sheets meeting along an interface.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceSet {
    pub pair: (usize, usize),
    /// Arrangement edge ids.
    pub edges: Vec<usize>,
    pub length: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintReport {
    pub label_count_ok: bool,
    pub labels_in_range: bool,
    pub unbounded_is_one: bool,
    /// Faces outside Ω with a label other than 1.
    pub outside_omega: Vec<usize>,
    /// Cut edges whose two sides break the gluing rule.
    pub gluing_breaks: Vec<usize>,
    /// Terminals (0-based) that are not an endpoint of any interface edge.
    pub uncovered_terminals: Vec<usize>,
    /// All terminals lie in one component of the interface graph.
    pub terminals_connected: bool,
}

impl ConstraintReport {
    pub fn passed(&self) -> bool {
        self.label_count_ok
            && self.labels_in_range
            && self.unbounded_is_one
            && self.outside_omega.is_empty()
            && self.gluing_breaks.is_empty()
            && self.uncovered_terminals.is_empty()
            && self.terminals_connected
    }
}

pub(crate) fn sigma_sides(arr: &Arrangement, cov: &CoveringSpace) -> Vec<Option<SigmaSide>> {
    arr.edges
        .iter()
        .map(|e| {
            let i = e.tags.iter().find_map(|t| match t {
                EdgeTag::Sigma(i) => Some(*i),
                _ => None,
            })?;
            let seg = arr.segment(e);
            let probe = seg.midpoint() + arr.left_normal(e) * (1e-6 * seg.len());
            let lens_left = winding_raw(&cov.lenses[i - 1], probe) != 0;
            Some(SigmaSide { i, lens_left })
        })
        .collect()
}

impl SheetedSet {
    /// Arrangement of the cuts, ∂Ω, the window and `extra` segments, with every face on sheet 1.
    pub fn blank(cov: &CoveringSpace, extra: &[(Segment, EdgeTag)]) -> Result<SheetedSet, SheetError> {
        let mut segs = cov.cut_segments();
        let win = cov.window();
        for k in 0..win.len() {
            segs.push((Segment::new(win[k], win[(k + 1) % win.len()]), EdgeTag::Window));
        }
        segs.extend_from_slice(extra);
        let arrangement = Arrangement::from_segments(&segs)?;
        let sigma = sigma_sides(&arrangement, cov);
        let labels = vec![1; arrangement.faces.len()];
        Ok(SheetedSet {
            m: cov.m(),
            arrangement,
            labels,
            terminals: cov.config.points.clone(),
            sigma,
            omega: cov.cuts.omega.clone(),
        })
    }

    /// Replace the labeling.
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<SheetedSet, SheetError> {
        if labels.len() != self.arrangement.faces.len() {
            return Err(SheetError::LabelCount { got: labels.len(), faces: self.arrangement.faces.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn label_at(&self, p: Point2) -> Result<usize, SheetError> {
        Ok(self.labels[self.arrangement.locate(p)?])
    }

    /// Label expected on the right of edge `e` when the left face carries `left`.
    fn continue_label(&self, e: usize, left: usize) -> usize {
        match self.sigma[e] {
            None => left,
            Some(SigmaSide { i, lens_left: true }) => math::wrap_label(left as i64 + i as i64, self.m),
            Some(SigmaSide { i, lens_left: false }) => math::wrap_label(left as i64 - i as i64, self.m),
        }
    }

    /// Whether edge `e` belongs to the reduced boundary.
    pub fn is_boundary(&self, e: usize) -> bool {
        let edge = &self.arrangement.edges[e];
        self.sigma[e].is_none() && edge.left != edge.right && self.labels[edge.left] != self.labels[edge.right]
    }

    /// Whether the labels on the two sides of cut edge `e` break the gluing rule.
    pub fn breaks_gluing(&self, e: usize) -> bool {
        let edge = &self.arrangement.edges[e];
        self.sigma[e].is_some() && self.continue_label(e, self.labels[edge.left]) != self.labels[edge.right]
    }

    pub fn boundary_edges(&self) -> Vec<usize> {
        (0..self.arrangement.edges.len()).filter(|&e| self.is_boundary(e)).collect()
    }

    /// Unordered sheet pair across boundary edge `e`.
    pub fn edge_pair(&self, e: usize) -> (usize, usize) {
        let edge = &self.arrangement.edges[e];
        let (l, r) = (self.labels[edge.left], self.labels[edge.right]);
        (l.min(r), l.max(r))
    }

    /// Total length of the projected reduced boundary.
    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges().iter().map(|&e| self.arrangement.edges[e].length).sum()
    }

    /// Perimeter on the covering: each projected boundary point has two preimages.
    pub fn perimeter(&self) -> f64 {
        2.0 * self.boundary_length()
    }

    /// Perimeter of the set inside the preimage of the simple polygon `region`.
    pub fn localized_perimeter(&self, region: &[Point2]) -> f64 {
        2.0 * self
            .boundary_edges()
            .iter()
            .map(|&e| length_inside(self.arrangement.segment(&self.arrangement.edges[e]), region))
            .sum::<f64>()
    }

    /// One entry per sheet pair with boundary between them, ordered by pair.
    pub fn interfaces(&self) -> Vec<InterfaceSet> {
        let mut by_pair: BTreeMap<(usize, usize), InterfaceSet> = BTreeMap::new();
        for e in self.boundary_edges() {
            let pair = self.edge_pair(e);
            let entry = by_pair.entry(pair).or_insert(InterfaceSet { pair, edges: Vec::new(), length: 0.0 });
            entry.edges.push(e);
            entry.length += self.arrangement.edges[e].length;
        }
        by_pair.into_values().filter(|s| s.length > 0.0).collect()
    }

    fn terminal_vertex(&self, t: usize) -> Option<usize> {
        let p = self.terminals[t];
        self.arrangement.vertices.iter().position(|v| v.dist(p) <= 1e3 * EPS_GEO)
    }

    pub fn check_constraints(&self) -> ConstraintReport {
        let arr = &self.arrangement;
        let mut rep = ConstraintReport {
            label_count_ok: self.labels.len() == arr.faces.len(),
            labels_in_range: self.labels.iter().all(|&l| (1..=self.m).contains(&l)),
            ..Default::default()
        };
        if !rep.label_count_ok {
            return rep;
        }
        rep.unbounded_is_one = self.labels[arr.unbounded] == 1;
        rep.outside_omega = arr
            .bounded_faces()
            .filter(|&f| self.labels[f] != 1 && winding_raw(&self.omega, arr.faces[f].witness) == 0)
            .collect();
        rep.gluing_breaks = (0..arr.edges.len()).filter(|&e| self.breaks_gluing(e)).collect();
        let boundary = self.boundary_edges();
        // Union-find over arrangement vertices joined by boundary edges.
        let mut parent: Vec<usize> = (0..arr.vertices.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let mut touched = vec![false; arr.vertices.len()];
        for &e in &boundary {
            let (a, b) = (arr.edges[e].a, arr.edges[e].b);
            touched[a] = true;
            touched[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let mut roots = Vec::new();
        for t in 0..self.terminals.len() {
            match self.terminal_vertex(t) {
                Some(v) if touched[v] => roots.push(find(&mut parent, v)),
                _ => rep.uncovered_terminals.push(t),
            }
        }
        roots.sort_unstable();
        roots.dedup();
        rep.terminals_connected = rep.uncovered_terminals.is_empty() && roots.len() <= 1;
        rep
    }
}

/// Length of the part of `s` inside the simple polygon `ring`.
pub fn length_inside(s: Segment, ring: &[Point2]) -> f64 {
    let n = ring.len();
    let d = s.b - s.a;
    let mut ts = vec![0.0, 1.0];
    for k in 0..n {
        let edge = Segment::new(ring[k], ring[(k + 1) % n]);
        match segment_intersect(s, edge) {
            Ok(SegmentIntersection::Point(p)) | Ok(SegmentIntersection::SharedEndpoint(p)) => {
                ts.push((p - s.a).dot(d) / d.dot(d));
            }
            Ok(SegmentIntersection::Overlap(p, q)) => {
                ts.push((p - s.a).dot(d) / d.dot(d));
                ts.push((q - s.a).dot(d) / d.dot(d));
            }
            _ => {}
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.windows(2)
        .filter(|w| w[1] > w[0])
        .filter(|w| winding_raw(ring, s.a + d * (0.5 * (w[0] + w[1]))) != 0)
        .map(|w| (w[1] - w[0]) * s.len())
        .sum()
}

/// Terminals in the order met by a clockwise walk around the embedded tree.
/// A terminal passed several times is placed at its widest angular sector,
/// the one facing away from the rest of the network.
pub fn leaf_order(net: &Network) -> Vec<usize> {
    let n = net.vertex_count();
    let m = net.terminals.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &net.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let ang = |v: usize, w: usize| (net.vertex(w) - net.vertex(v)).angle();
    for (v, list) in adj.iter_mut().enumerate() {
        list.sort_by(|&a, &b| ang(v, a).total_cmp(&ang(v, b)));
    }
    let tau = 2.0 * core::f64::consts::PI;
    // (walk step, sector angle) of the widest sector seen per terminal.
    let mut best: Vec<Option<(usize, f64)>> = vec![None; m];
    let start = (0..m).find(|&t| !adj[t].is_empty());
    if let Some(t0) = start {
        let (mut prev, mut cur) = (t0, adj[t0][0]);
        for step in 0..2 * net.edges.len() {
            // Next edge clockwise from the one we arrived along.
            let list = &adj[cur];
            let back = list.iter().position(|&w| w == prev).unwrap_or(0);
            let next = list[(back + list.len() - 1) % list.len()];
            if cur < m {
                let mut sector = ang(cur, prev) - ang(cur, next);
                if sector <= 0.0 {
                    sector += tau;
                }
                if best[cur].is_none_or(|(_, s)| sector > s + 1e-12) {
                    best[cur] = Some((step, sector));
                }
            }
            prev = cur;
            cur = next;
        }
    }
    let mut order: Vec<(usize, usize)> = (0..m).filter_map(|t| best[t].map(|(s, _)| (s, t))).collect();
    order.sort_unstable();
    order.into_iter().map(|(_, t)| t).collect()
}

fn is_cyclic_order(order: &[usize], m: usize) -> bool {
    if order.len() != m {
        return false;
    }
    let fwd = (0..m).all(|k| order[(k + 1) % m] == (order[k] + 1) % m);
    let bwd = (0..m).all(|k| order[(k + 1) % m] == (order[k] + m - 1) % m);
    fwd || bwd
}

/// Sheeted set whose projected boundary is exactly the network: the region
/// enclosed by Σ_j and the network path from p_j to p_{j+1} carries label
/// m+1−j, and everything else label 1.
pub fn network_to_sheeted_set(net: &Network, cov: &CoveringSpace) -> Result<SheetedSet, SheetError> {
    let m = net.terminals.len();
    if !net.is_connected() {
        return Err(SheetError::NotConnected);
    }
    if !net.is_tree() {
        return Err(SheetError::HasLoop);
    }
    for v in m..net.vertex_count() {
        if net.degree(v) != 3 {
            return Err(SheetError::BadVertex(v));
        }
    }
    for t in 0..m {
        if net.degree(t) == 0 {
            return Err(SheetError::NotConnected);
        }
    }
    let segs = net.segments();
    for (i, s) in segs.iter().enumerate() {
        for j in i + 1..segs.len() {
            match segment_intersect(*s, segs[j])? {
                SegmentIntersection::None | SegmentIntersection::SharedEndpoint(_) => {}
                _ => return Err(GeomError::CrossingEdges(i, j).into()),
            }
        }
        for c in &cov.cuts.sigma {
            for cs in c.segments() {
                match segment_intersect(*s, cs)? {
                    SegmentIntersection::None => {}
                    SegmentIntersection::SharedEndpoint(p)
                        if cov.config.points.iter().any(|q| q.dist(p) <= EPS_GEO) => {}
                    _ => return Err(SheetError::OnCut(i)),
                }
            }
        }
    }
    let order = leaf_order(net);
    if !is_cyclic_order(&order, m) {
        return Err(SheetError::TerminalOrder(order));
    }
    let extra: Vec<(Segment, EdgeTag)> = segs.iter().enumerate().map(|(i, s)| (*s, EdgeTag::Network(i))).collect();
    let mut set = SheetedSet::blank(cov, &extra)?;
    let labels = flood_labels(&set)?;
    set.labels = labels;
    for (e, edge) in set.arrangement.edges.iter().enumerate() {
        let on_net = edge.has_tag(|t| matches!(t, EdgeTag::Network(_)));
        if on_net != set.is_boundary(e) || set.breaks_gluing(e) {
            let which = edge.tags.iter().find_map(|t| match t {
                EdgeTag::Network(i) => Some(*i),
                _ => None,
            });
            return Err(SheetError::NotBoundary(which.unwrap_or(usize::MAX)));
        }
    }
    Ok(set)
}

/// Propagate label 1 from the unbounded face across every non-network edge.
fn flood_labels(set: &SheetedSet) -> Result<Vec<usize>, SheetError> {
    let arr = &set.arrangement;
    let mut by_face: Vec<Vec<usize>> = vec![Vec::new(); arr.faces.len()];
    for (e, edge) in arr.edges.iter().enumerate() {
        if edge.left != edge.right && !edge.has_tag(|t| matches!(t, EdgeTag::Network(_))) {
            by_face[edge.left].push(e);
            by_face[edge.right].push(e);
        }
    }
    let mut labels: Vec<Option<usize>> = vec![None; arr.faces.len()];
    labels[arr.unbounded] = Some(1);
    let mut queue = VecDeque::from([arr.unbounded]);
    while let Some(f) = queue.pop_front() {
        let l = labels[f].unwrap_or(1);
        for &e in &by_face[f] {
            let edge = &arr.edges[e];
            let (g, want) = if edge.left == f {
                (edge.right, set.continue_label(e, l))
            } else {
                // Invert the left-to-right rule.
                let back = (1..=set.m).find(|&x| set.continue_label(e, x) == l).unwrap_or(l);
                (edge.left, back)
            };
            match labels[g] {
                None => {
                    labels[g] = Some(want);
                    queue.push_back(g);
                }
                Some(have) if have != want => return Err(SheetError::Inconsistent(g)),
                Some(_) => {}
            }
        }
    }
    labels.iter().map(|l| l.ok_or(SheetError::HasLoop)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{canonical_covering, PointConfig};
    use crate::steiner::steiner_tree;
    use proptest::prelude::*;

    fn triangle() -> PointConfig {
        let s = math::SQRT3 / 2.0;
        PointConfig::new(vec![Point2::new(-s, -0.5), Point2::new(s, -0.5), Point2::new(0.0, 1.0)]).unwrap()
    }

    fn tripod() -> Network {
        Network { terminals: triangle().points, steiner: vec![Point2::ZERO], edges: vec![(0, 3), (1, 3), (2, 3)] }
    }

    fn hexagon() -> PointConfig {
        let s = math::SQRT3 / 2.0;
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

    fn polygon_minus_edge(cfg: &PointConfig, missing: usize) -> Network {
        let m = cfg.m();
        let edges = (0..m).filter(|&k| k != missing).map(|k| (k, (k + 1) % m)).collect();
        Network { terminals: cfg.points.clone(), steiner: vec![], edges }
    }

    #[test]
    fn tripod_interfaces() {
        let cov = canonical_covering(&triangle()).unwrap();
        let set = network_to_sheeted_set(&tripod(), &cov).unwrap();
        assert!((set.perimeter() - 6.0).abs() < 1e-12);
        let pairs: Vec<_> = set.interfaces().iter().map(|i| i.pair).collect();
        assert_eq!(pairs, vec![(1, 2), (1, 3), (2, 3)]);
        for i in set.interfaces() {
            assert!((i.length - 1.0).abs() < 1e-12);
        }
        assert!(set.check_constraints().passed());
        // Region between Σ_j and the path p_j → p_{j+1} carries m+1−j.
        let cfg = triangle();
        for j in 1..=2 {
            let mid = (cfg.p(j) + cfg.p(j % 3 + 1)) * 0.5 * 0.9;
            assert_eq!(set.label_at(mid).unwrap(), 4 - j);
        }
        assert_eq!(set.label_at((cfg.p(3) + cfg.p(1)) * 0.45).unwrap(), 1);
    }

    #[test]
    fn segment_network() {
        let cfg = PointConfig::new(vec![Point2::new(0.0, 0.0), Point2::new(0.0, 2.0)]).unwrap();
        let cov = canonical_covering(&cfg).unwrap();
        let net = Network { terminals: cfg.points.clone(), steiner: vec![], edges: vec![(0, 1)] };
        let set = network_to_sheeted_set(&net, &cov).unwrap();
        let ifs = set.interfaces();
        assert_eq!(ifs.len(), 1);
        assert_eq!(ifs[0].pair, (1, 2));
        assert!((ifs[0].length - 2.0).abs() < 1e-12);
        let mut labels: Vec<usize> = set.labels.clone();
        labels.sort_unstable();
        labels.dedup();
        assert_eq!(labels, vec![1, 2]);
    }

    #[test]
    fn hexagon_polygon_minus_edge() {
        let cfg = hexagon();
        let cov = canonical_covering(&cfg).unwrap();
        for missing in 0..6 {
            let net = polygon_minus_edge(&cfg, missing);
            let set = network_to_sheeted_set(&net, &cov).unwrap();
            assert!((set.perimeter() - 10.0).abs() < 1e-9);
            let mut used = set.labels.clone();
            used.sort_unstable();
            used.dedup();
            assert_eq!(used, vec![1, 2, 3, 4, 5, 6]);
            // The interfaces are exactly the five retained sides.
            let mut covered = 0.0;
            for e in set.boundary_edges() {
                let seg = set.arrangement.segment(&set.arrangement.edges[e]);
                let side = (0..6).find(|&k| {
                    let s = Segment::new(cfg.points[k], cfg.points[(k + 1) % 6]);
                    s.dist_to(seg.a) < 1e-9 && s.dist_to(seg.b) < 1e-9
                });
                assert!(side.is_some_and(|k| k != missing));
                covered += seg.len();
            }
            assert!((covered - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn blank_set_has_no_boundary() {
        let cov = canonical_covering(&triangle()).unwrap();
        let set = SheetedSet::blank(&cov, &[]).unwrap();
        assert_eq!(set.perimeter(), 0.0);
        assert!(set.interfaces().is_empty());
        let rep = set.check_constraints();
        assert_eq!(rep.uncovered_terminals, vec![0, 1, 2]);
        assert!(!rep.gluing_breaks.is_empty());
    }

    #[test]
    fn split_interface_graph_is_flagged() {
        // Boundary along the sides p₁p₂ and p₃p₄ only: two pieces.
        let cfg = PointConfig::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        let cov = canonical_covering(&cfg).unwrap();
        let blank = SheetedSet::blank(&cov, &[]).unwrap();
        let mut labels = blank.labels.clone();
        let l1 = blank.arrangement.locate(Point2::new(0.5, -0.05)).unwrap();
        let l3 = blank.arrangement.locate(Point2::new(0.5, 1.05)).unwrap();
        // Lens I_i meets sheet 1 across Σ_i when it carries 1 − i; I₂ stays on
        // sheet 1 and breaks the gluing along Σ₂.
        labels[l1] = math::wrap_label(0, 4);
        labels[l3] = math::wrap_label(-2, 4);
        let set = blank.with_labels(labels).unwrap();
        assert!((set.boundary_length() - 2.0).abs() < 1e-12);
        let rep = set.check_constraints();
        assert!(rep.uncovered_terminals.is_empty());
        assert!(!rep.terminals_connected);
        assert!(!rep.gluing_breaks.is_empty());
        assert!(!rep.passed());
    }

    #[test]
    fn loop_is_rejected() {
        let cfg = triangle();
        let cov = canonical_covering(&cfg).unwrap();
        let net = Network { terminals: cfg.points.clone(), steiner: vec![], edges: vec![(0, 1), (1, 2), (2, 0)] };
        assert_eq!(network_to_sheeted_set(&net, &cov).unwrap_err(), SheetError::HasLoop);
        let net = Network { terminals: cfg.points.clone(), steiner: vec![], edges: vec![(0, 1)] };
        assert_eq!(network_to_sheeted_set(&net, &cov).unwrap_err(), SheetError::NotConnected);
    }

    #[test]
    fn localized_perimeter_of_window_halves() {
        let cov = canonical_covering(&triangle()).unwrap();
        let set = network_to_sheeted_set(&tripod(), &cov).unwrap();
        let big = 100.0;
        let upper = [Point2::new(-big, 0.0), Point2::new(big, 0.0), Point2::new(big, big), Point2::new(-big, big)];
        assert!((set.localized_perimeter(&upper) - 2.0).abs() < 1e-12);
        let whole = [Point2::new(-big, -big), Point2::new(big, -big), Point2::new(big, big), Point2::new(-big, big)];
        assert!((set.localized_perimeter(&whole) - set.perimeter()).abs() < 1e-12);
    }

    #[test]
    fn steiner_minimizers_lift() {
        for cfg in [triangle(), PointConfig::regular(4, 0.3), PointConfig::regular(5, 0.7), hexagon()] {
            let cov = canonical_covering(&cfg).unwrap();
            let sol = steiner_tree(&cfg).unwrap();
            for net in &sol.minimizers {
                let set = network_to_sheeted_set(net, &cov).unwrap();
                assert!((set.perimeter() - 2.0 * net.length()).abs() < 1e-9);
                let total: f64 = set.interfaces().iter().map(|i| i.length).sum();
                assert!((2.0 * total - set.perimeter()).abs() < 1e-9);
                assert!(set.check_constraints().passed());
            }
        }
    }

    /// Convex configurations: sorted angles on a jittered circle.
    fn convex_config() -> impl Strategy<Value = PointConfig> {
        (2usize..=6)
            .prop_flat_map(|m| (proptest::collection::vec(0.0f64..1.0, m), proptest::collection::vec(0.8f64..1.2, m)))
            .prop_filter_map("convex position", |(gaps, radii)| {
                let total: f64 = gaps.iter().map(|g| g + 0.3).sum();
                let mut acc = 0.0;
                let pts: Vec<Point2> = gaps
                    .iter()
                    .zip(&radii)
                    .map(|(g, r)| {
                        acc += (g + 0.3) / total * 2.0 * core::f64::consts::PI;
                        Point2::polar(*r, acc)
                    })
                    .collect();
                let cfg = PointConfig::new(pts).ok()?;
                cfg.convex_orientation()?;
                Some(cfg)
            })
    }

    /// A planar class-T network: the first full topology whose optimum embeds
    /// without crossings, with its Steiner points nudged.
    fn planar_network(cfg: &PointConfig, pick: usize, nudge: &[(f64, f64)]) -> Option<Network> {
        let tops = crate::steiner::full_topologies(cfg.m());
        for k in 0..tops.len() {
            let top = &tops[(pick + k) % tops.len()];
            let Ok(opt) = crate::steiner::optimize_topology(top, cfg) else { continue };
            let mut net = opt.network;
            for (s, d) in net.steiner.iter_mut().zip(nudge) {
                *s += Point2::new(d.0, d.1) * 0.02;
            }
            let segs = net.segments();
            let planar = (0..segs.len()).all(|i| {
                (i + 1..segs.len()).all(|j| {
                    matches!(
                        segment_intersect(segs[i], segs[j]),
                        Ok(SegmentIntersection::None) | Ok(SegmentIntersection::SharedEndpoint(_))
                    )
                })
            });
            if planar && (cfg.m()..net.vertex_count()).all(|v| net.degree(v) == 3) {
                return Some(net);
            }
        }
        None
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn perimeter_is_twice_network_length(
            cfg in convex_config(),
            pick in 0usize..1000,
            nudge in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
            cut in (-1.0f64..1.0, -1.0f64..1.0, 0.0f64..6.3),
        ) {
            let cov = canonical_covering(&cfg).unwrap();
            let net = planar_network(&cfg, pick, &nudge);
            prop_assume!(net.is_some());
            let net = net.unwrap();
            let set = network_to_sheeted_set(&net, &cov).unwrap();
            prop_assert!((set.perimeter() - 2.0 * net.length()).abs() < 1e-9);
            let total: f64 = set.interfaces().iter().map(|i| i.length).sum();
            prop_assert!((2.0 * total - set.perimeter()).abs() < 1e-9);
            prop_assert!(set.check_constraints().passed());
            // Localized perimeter against direct clipping of the network.
            let (cx, cy, th) = cut;
            let u = Point2::polar(1.0, th);
            let c = Point2::new(cx, cy) * 0.5;
            let half = [c + u.perp() * 50.0, c - u.perp() * 50.0, c - u.perp() * 50.0 + u * 50.0, c + u.perp() * 50.0 + u * 50.0];
            let direct: f64 = net.segments().iter().map(|s| length_inside(*s, &half)).sum();
            prop_assert!((set.localized_perimeter(&half) - 2.0 * direct).abs() < 1e-9);
        }
    }
}
