//! Networks, Steiner topologies and the exact small-instance Steiner solver.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::covering::PointConfig;
use crate::geom::{Point2, Segment, EPS_GEO};
use crate::math;

pub const MAX_TERMINALS: usize = 8;
/// Newton iteration cap per smoothing stage.
pub const MAX_STAGE_ITERS: usize = 200;
/// Steiner points closer than this (relative to the diameter) to a neighbour are contracted.
pub const COLLAPSE_TOL: f64 = 1e-7;
/// Lengths within this of the optimum count as co-minimizers.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SteinerError {
    #[error("terminal count {0} outside the supported range 2..=8")]
    Size(usize),
    #[error("no convergence after {sweeps} iterations (last move {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },
    #[error("topology is not a tree with degree-3 Steiner vertices")]
    BadTopology,
    #[error("topology has {topology} terminals but the configuration has {config}")]
    Mismatch { topology: usize, config: usize },
}

/// Abstract tree on terminals `0..m` (label = index + 1) and Steiner
/// vertices `m..m+k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SteinerTopology {
    pub m: usize,
    pub k: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SteinerTopology {
    pub fn vertex_count(&self) -> usize {
        self.m + self.k
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn is_valid(&self) -> bool {
        let n = self.vertex_count();
        if self.edges.len() + 1 != n {
            return false;
        }
        let adj = self.adjacency();
        if (self.m..n).any(|s| adj[s].len() != 3) || (0..self.m).any(|t| adj[t].is_empty() && n > 1) {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn is_full(&self) -> bool {
        self.k + 2 == self.m
    }

    /// For each edge (a, b), the terminals reachable from `b` without using
    /// the edge, as a bit mask over terminal indices.
    pub fn edge_splits(&self) -> Vec<u64> {
        let adj = self.adjacency();
        self.edges
            .iter()
            .map(|&(a, b)| {
                let mut mask = 0u64;
                let mut stack = vec![(b, a)];
                while let Some((v, from)) = stack.pop() {
                    if v < self.m {
                        mask |= 1 << v;
                    }
                    for &w in &adj[v] {
                        if w != from {
                            stack.push((w, v));
                        }
                    }
                }
                mask
            })
            .collect()
    }

    /// Split system normalised to the side without terminal 0; it determines
    /// the tree up to renaming of Steiner vertices.
    pub fn canonical_key(&self) -> Vec<u64> {
        let full = (1u64 << self.m) - 1;
        let mut key: Vec<u64> =
            self.edge_splits().into_iter().map(|s| if s & 1 != 0 { full & !s } else { s }).collect();
        // Splits of edges between two terminals also record the pair.
        key.sort_unstable();
        key
    }

    pub fn terminal_degree(&self, t: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == t || b == t).count()
    }
}

/// Full topologies (k = m − 2, every terminal a leaf) by edge insertion.
pub fn full_topologies(m: usize) -> Vec<SteinerTopology> {
    if m == 2 {
        return vec![SteinerTopology { m: 2, k: 0, edges: vec![(0, 1)] }];
    }
    // Work with vertex ids: terminals 0..m are fixed up front, Steiner ids
    // allocated from m upwards.
    let mut cur: Vec<Vec<(usize, usize)>> = vec![vec![(0, 1)]];
    for t in 2..m {
        let s = m + (t - 2);
        let mut nxt = Vec::with_capacity(cur.len() * (2 * t - 3));
        for edges in &cur {
            for e in 0..edges.len() {
                let (a, b) = edges[e];
                let mut ne = edges.clone();
                ne[e] = (a, s);
                ne.push((s, b));
                ne.push((s, t));
                nxt.push(ne);
            }
        }
        cur = nxt;
    }
    cur.into_iter().map(|edges| SteinerTopology { m, k: m - 2, edges }).collect()
}

/// Merge Steiner vertices along chosen parent edges into terminals.
fn contract(top: &SteinerTopology, parent: &[Option<usize>]) -> SteinerTopology {
    let m = top.m;
    let n = top.vertex_count();
    let mut root: Vec<usize> = (0..n).collect();
    for s in m..n {
        let mut v = s;
        while v >= m {
            match parent[v - m] {
                Some(p) => v = p,
                None => break,
            }
        }
        root[s] = v;
    }
    let mut renum = vec![usize::MAX; n];
    let mut next = m;
    for v in 0..n {
        if root[v] == v {
            if v < m {
                renum[v] = v;
            } else {
                renum[v] = next;
                next += 1;
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = top
        .edges
        .iter()
        .map(|&(a, b)| (renum[root[a]], renum[root[b]]))
        .filter(|&(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    SteinerTopology { m, k: next - m, edges }
}

/// All contractions of a full topology where Steiner vertices merge into
/// terminals along paths of Steiner vertices.
fn contractions(top: &SteinerTopology, out: &mut BTreeMap<Vec<u64>, SteinerTopology>) {
    let m = top.m;
    let adj = top.adjacency();
    let k = top.k;
    let mut parent: Vec<Option<usize>> = vec![None; k];
    // Each Steiner vertex picks no parent or one of its three neighbours.
    let mut choice = vec![0usize; k];
    loop {
        for s in 0..k {
            parent[s] = if choice[s] == 0 { None } else { Some(adj[m + s][choice[s] - 1]) };
        }
        if pointers_reach_terminals(m, &parent) {
            let c = contract(top, &parent);
            out.entry(c.canonical_key()).or_insert(c);
        }
        let mut i = 0;
        loop {
            if i == k {
                return;
            }
            choice[i] += 1;
            if choice[i] <= 3 {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn pointers_reach_terminals(m: usize, parent: &[Option<usize>]) -> bool {
    let k = parent.len();
    for s in 0..k {
        if parent[s].is_none() {
            continue;
        }
        let mut v = m + s;
        let mut steps = 0;
        while v >= m {
            match parent[v - m] {
                Some(p) => v = p,
                None => return false,
            }
            steps += 1;
            if steps > k {
                return false;
            }
        }
    }
    true
}

/// Every tree topology on `m` labelled terminals whose extra vertices have
/// degree exactly 3, including degenerate ones where terminals have degree ≥ 2.
pub fn enumerate_topologies(
    m: usize,
    filter: Option<&dyn Fn(&SteinerTopology) -> bool>,
) -> Result<Vec<SteinerTopology>, SteinerError> {
    if !(2..=MAX_TERMINALS).contains(&m) {
        return Err(SteinerError::Size(m));
    }
    let mut all: BTreeMap<Vec<u64>, SteinerTopology> = BTreeMap::new();
    for f in full_topologies(m) {
        contractions(&f, &mut all);
    }
    Ok(all.into_values().filter(|t| filter.is_none_or(|f| f(t))).collect())
}

/// Embedded straight-line network over terminals and Steiner points.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub terminals: Vec<Point2>,
    pub steiner: Vec<Point2>,
    /// Vertex ids: terminals first, then Steiner points.
    pub edges: Vec<(usize, usize)>,
}

impl Network {
    pub fn vertex(&self, i: usize) -> Point2 {
        if i < self.terminals.len() {
            self.terminals[i]
        } else {
            self.steiner[i - self.terminals.len()]
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.terminals.len() + self.steiner.len()
    }

    pub fn segment(&self, e: usize) -> Segment {
        let (a, b) = self.edges[e];
        Segment::new(self.vertex(a), self.vertex(b))
    }

    pub fn segments(&self) -> Vec<Segment> {
        (0..self.edges.len()).map(|e| self.segment(e)).collect()
    }

    pub fn length(&self) -> f64 {
        self.segments().iter().map(|s| s.len()).sum()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count() && self.is_connected()
    }

    /// Member of the competitor class: a tree whose pieces meet only at
    /// shared endpoints.
    pub fn is_class_t(&self) -> bool {
        if !self.is_tree() {
            return false;
        }
        let segs = self.segments();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                use crate::geom::{segment_intersect, SegmentIntersection as X};
                let share = {
                    let (a, b) = self.edges[i];
                    let (c, d) = self.edges[j];
                    a == c || a == d || b == c || b == d
                };
                match segment_intersect(segs[i], segs[j]) {
                    Ok(X::None) => {}
                    Ok(X::SharedEndpoint(_)) if share => {}
                    _ => return false,
                }
            }
        }
        true
    }

    pub fn topology(&self) -> SteinerTopology {
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        SteinerTopology { m: self.terminals.len(), k: self.steiner.len(), edges }
    }

    /// Geometry key: edges as rounded endpoint pairs, sorted.
    pub fn geometry_key(&self) -> Vec<[i64; 4]> {
        let q = |x: f64| math::round(x * 1e7) as i64;
        let mut key: Vec<[i64; 4]> = self
            .segments()
            .iter()
            .map(|s| {
                let (a, b) = if (q(s.a.x), q(s.a.y)) <= (q(s.b.x), q(s.b.y)) { (s.a, s.b) } else { (s.b, s.a) };
                [q(a.x), q(a.y), q(b.x), q(b.y)]
            })
            .collect();
        key.sort_unstable();
        key
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleViolation {
    pub vertex: usize,
    pub angle: f64,
    pub required: f64,
}

/// Steiner points must meet at 120°; edges at a terminal at least 120° apart.
pub fn regularity_violations(net: &Network, tol: f64) -> Vec<AngleViolation> {
    let third = 2.0 * core::f64::consts::PI / 3.0;
    let mut out = Vec::new();
    for v in 0..net.vertex_count() {
        let p = net.vertex(v);
        let mut dirs: Vec<f64> = net
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some((net.vertex(b) - p).angle())
                } else if b == v {
                    Some((net.vertex(a) - p).angle())
                } else {
                    None
                }
            })
            .collect();
        dirs.sort_by(|a, b| a.total_cmp(b));
        let n = dirs.len();
        if n < 2 {
            continue;
        }
        for i in 0..n {
            let gap = if i + 1 < n { dirs[i + 1] - dirs[i] } else { dirs[0] + 2.0 * core::f64::consts::PI - dirs[i] };
            let steiner = v >= net.terminals.len();
            let bad = if steiner && n == 3 { math::abs(gap - third) > tol } else { gap < third - tol };
            if bad {
                out.push(AngleViolation { vertex: v, angle: gap, required: third });
            }
        }
    }
    out
}

/// Point minimising the sum of distances to three points.
pub fn fermat_point(a: Point2, b: Point2, c: Point2) -> Point2 {
    let tiny = 1e-15 * (1.0 + a.norm() + b.norm() + c.norm());
    if a.dist(b) <= tiny || a.dist(c) <= tiny {
        return a;
    }
    if b.dist(c) <= tiny {
        return b;
    }
    let angle = |p: Point2, q: Point2, r: Point2| {
        let (u, v) = (q - p, r - p);
        math::atan2(math::abs(u.cross(v)), u.dot(v))
    };
    let third = 2.0 * core::f64::consts::PI / 3.0;
    let (aa, ab, ac) = (angle(a, b, c), angle(b, c, a), angle(c, a, b));
    if aa >= third {
        return a;
    }
    if ab >= third {
        return b;
    }
    if ac >= third {
        return c;
    }
    // Barycentric weights |BC| / sin(A + 60°) and cyclic.
    let s = core::f64::consts::PI / 3.0;
    let wa = b.dist(c) / math::sin(aa + s);
    let wb = c.dist(a) / math::sin(ab + s);
    let wc = a.dist(b) / math::sin(ac + s);
    (a * wa + b * wb + c * wc) * (1.0 / (wa + wb + wc))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizedNetwork {
    /// Network after contracting collapsed Steiner points.
    pub network: Network,
    pub length: f64,
    /// Some Steiner point collapsed onto a neighbour.
    pub degenerate: bool,
    /// Newton iterations used.
    pub sweeps: usize,
    /// Steiner point positions before contraction, in topology order.
    pub raw_positions: Vec<Point2>,
}

/// Place the Steiner points of `top` to minimise total length.
///
/// Minimises the smoothed length `sum sqrt(|e|^2 + eps^2)` by damped Newton
/// steps over all Steiner points jointly, following the minimiser as `eps`
/// shrinks; points that merge at the optimum end up within `eps` of each other
/// and are contracted.
pub fn optimize_topology(top: &SteinerTopology, config: &PointConfig) -> Result<OptimizedNetwork, SteinerError> {
    if top.m != config.m() {
        return Err(SteinerError::Mismatch { topology: top.m, config: config.m() });
    }
    if !top.is_valid() {
        return Err(SteinerError::BadTopology);
    }
    let m = top.m;
    let k = top.vertex_count() - m;
    let scale = config.diameter().max(1e-12);
    let mut pos: Vec<Point2> = config.points.clone();
    let centre = config.centroid();
    for s in 0..k {
        pos.push(centre + Point2::polar(1e-2 * scale, 2.399 * s as f64));
    }
    let mut sweeps = 0;
    let mut eps = 1e-1 * scale;
    let final_eps = 1e-12 * scale;
    let mut residual = f64::INFINITY;
    loop {
        let stage_tol = if eps <= final_eps { 1e-14 * scale } else { 1e-3 * eps };
        for _ in 0..MAX_STAGE_ITERS {
            let step = newton_step(&pos, &top.edges, m, k, eps);
            sweeps += 1;
            residual = step.iter().map(|d| d.norm()).fold(0.0, f64::max);
            if !residual.is_finite() {
                return Err(SteinerError::Convergence { sweeps, residual });
            }
            // Backtrack until the smoothed length does not increase.
            let f0 = smoothed_length(&pos, &top.edges, eps);
            let mut t = 1.0;
            let mut trial = pos.clone();
            loop {
                for s in 0..k {
                    trial[m + s] = pos[m + s] + step[s] * t;
                }
                if smoothed_length(&trial, &top.edges, eps) <= f0 || t < 1e-12 {
                    break;
                }
                t *= 0.5;
            }
            pos = trial;
            residual *= t;
            if residual < stage_tol {
                break;
            }
        }
        if eps <= final_eps {
            break;
        }
        eps = (eps * 0.1).max(final_eps);
    }
    if residual.is_nan() || residual >= 1e-9 * scale {
        return Err(SteinerError::Convergence { sweeps, residual });
    }
    let raw_positions = pos[m..].to_vec();
    let (network, degenerate) = contract_collapsed(config, &pos, &top.edges, m, COLLAPSE_TOL * scale);
    let length = network.length();
    Ok(OptimizedNetwork { network, length, degenerate, sweeps, raw_positions })
}

fn smoothed_length(pos: &[Point2], edges: &[(usize, usize)], eps: f64) -> f64 {
    edges.iter().map(|&(a, b)| math::hypot(pos[a].dist(pos[b]), eps)).sum()
}

/// Newton direction for the smoothed length in the Steiner coordinates.
fn newton_step(pos: &[Point2], edges: &[(usize, usize)], m: usize, k: usize, eps: f64) -> Vec<Point2> {
    let n = 2 * k;
    let mut hess = vec![0.0; n * n];
    let mut grad = vec![0.0; n];
    for &(a, b) in edges {
        let z = pos[a] - pos[b];
        let r = math::hypot(z.norm(), eps);
        let g = [z.x / r, z.y / r];
        let zz = [z.x, z.y];
        let mut h = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = if i == j { 1.0 / r } else { 0.0 } - zz[i] * zz[j] / (r * r * r);
            }
        }
        // d/dx_a = +g, d/dx_b = -g; Hessian blocks +h on diagonals, -h off.
        for (u, su) in [(a, 1.0), (b, -1.0)] {
            if u < m {
                continue;
            }
            let iu = 2 * (u - m);
            grad[iu] += su * g[0];
            grad[iu + 1] += su * g[1];
            for (v, sv) in [(a, 1.0), (b, -1.0)] {
                if v < m {
                    continue;
                }
                let iv = 2 * (v - m);
                for i in 0..2 {
                    for j in 0..2 {
                        hess[(iu + i) * n + iv + j] += su * sv * h[i][j];
                    }
                }
            }
        }
    }
    grad.iter_mut().for_each(|g| *g = -*g);
    let x = solve_dense(&mut hess, &mut grad, n);
    (0..k).map(|s| Point2::new(x[2 * s], x[2 * s + 1])).collect()
}

/// Gaussian elimination with partial pivoting on an `n x n` row-major system.
pub(crate) fn solve_dense(mat: &mut [f64], rhs: &mut [f64], n: usize) -> Vec<f64> {
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| math::abs(mat[i * n + c]).total_cmp(&math::abs(mat[j * n + c]))).unwrap_or(c);
        if p != c {
            for j in 0..n {
                mat.swap(c * n + j, p * n + j);
            }
            rhs.swap(c, p);
        }
        let piv = mat[c * n + c];
        for i in c + 1..n {
            let f = mat[i * n + c] / piv;
            if f != 0.0 {
                for j in c..n {
                    mat[i * n + j] -= f * mat[c * n + j];
                }
                rhs[i] -= f * rhs[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let mut acc = rhs[c];
        for j in c + 1..n {
            acc -= mat[c * n + j] * x[j];
        }
        x[c] = acc / mat[c * n + c];
    }
    x
}

fn contract_collapsed(
    config: &PointConfig,
    pos: &[Point2],
    edges: &[(usize, usize)],
    m: usize,
    tol: f64,
) -> (Network, bool) {
    let n = pos.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn find(g: &mut [usize], mut i: usize) -> usize {
        while g[i] != i {
            g[i] = g[g[i]];
            i = g[i];
        }
        i
    }
    let mut degenerate = false;
    for &(a, b) in edges {
        if (a >= m || b >= m) && pos[a].dist(pos[b]) <= tol {
            degenerate = true;
            let (ra, rb) = (find(&mut group, a), find(&mut group, b));
            if ra == rb {
                continue;
            }
            // Terminals stay representatives.
            if ra < m {
                group[rb] = ra;
            } else {
                group[ra] = rb;
            }
        }
    }
    let mut renum = vec![usize::MAX; n];
    let mut steiner = Vec::new();
    for v in 0..n {
        if find(&mut group, v) == v {
            if v < m {
                renum[v] = v;
            } else {
                renum[v] = m + steiner.len();
                steiner.push(pos[v]);
            }
        }
    }
    let mut out_edges: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in edges {
        let (ra, rb) = (renum[find(&mut group, a)], renum[find(&mut group, b)]);
        if ra != rb {
            out_edges.push((ra.min(rb), ra.max(rb)));
        }
    }
    out_edges.sort_unstable();
    out_edges.dedup();
    (Network { terminals: config.points.clone(), steiner, edges: out_edges }, degenerate)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteinerSolution {
    pub length: f64,
    /// Distinct optimal networks, ordered by geometry key.
    pub minimizers: Vec<Network>,
    pub topologies_evaluated: usize,
}

/// Optimise each full topology; contracted optima cover every degenerate one.
pub fn steiner_tree(config: &PointConfig) -> Result<SteinerSolution, SteinerError> {
    let m = config.m();
    if !(2..=MAX_TERMINALS).contains(&m) {
        return Err(SteinerError::Size(m));
    }
    let tops = full_topologies(m);
    let results: Result<Vec<OptimizedNetwork>, SteinerError> =
        tops.iter().map(|t| optimize_topology(t, config)).collect();
    Ok(collect_minimizers(results?))
}

/// Reduce optimised topologies to the optimum and its distinct co-minimizers.
pub fn collect_minimizers(results: Vec<OptimizedNetwork>) -> SteinerSolution {
    let evaluated = results.len();
    let best = results.iter().map(|r| r.length).fold(f64::INFINITY, f64::min);
    let mut seen: BTreeMap<Vec<[i64; 4]>, Network> = BTreeMap::new();
    for r in results {
        if r.length <= best + TIE_TOL {
            seen.entry(r.network.geometry_key()).or_insert(r.network);
        }
    }
    SteinerSolution { length: best, minimizers: seen.into_values().collect(), topologies_evaluated: evaluated }
}

/// Euclidean minimum spanning tree length (Prim).
pub fn mst_length(points: &[Point2]) -> f64 {
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                u = v;
            }
        }
        in_tree[u] = true;
        total += best[u];
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(points[u].dist(points[v]));
            }
        }
    }
    total
}

/// Unused-vertex guard for networks built by hand.
pub fn same_point(a: Point2, b: Point2) -> bool {
    a.dist(b) <= EPS_GEO
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQ3: f64 = 1.732_050_807_568_877_2;

    #[test]
    fn topology_counts() {
        let counts: Vec<usize> = (2..=6).map(|m| enumerate_topologies(m, None).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 4, 31, 365, 5811]);
        assert_eq!(enumerate_topologies(9, None).unwrap_err(), SteinerError::Size(9));
        let four = enumerate_topologies(4, None).unwrap();
        assert_eq!(four.iter().filter(|t| t.k == 2).count(), 3);
        assert!(four.iter().all(|t| t.is_valid()));
    }

    #[test]
    fn full_topology_counts() {
        // (2m − 5)!!
        let counts: Vec<usize> = (3..=7).map(|m| full_topologies(m).len()).collect();
        assert_eq!(counts, vec![1, 3, 15, 105, 945]);
    }

    #[test]
    fn tripod_equilateral() {
        let cfg =
            PointConfig::new(vec![Point2::new(-SQ3 / 2.0, -0.5), Point2::new(SQ3 / 2.0, -0.5), Point2::new(0.0, 1.0)])
                .unwrap();
        let r = optimize_topology(&full_topologies(3)[0], &cfg).unwrap();
        assert!((r.length - 3.0).abs() < 1e-12);
        assert!(r.network.steiner[0].norm() < 1e-12);
        assert!(regularity_violations(&r.network, 1e-6).is_empty());
    }

    #[test]
    fn tripod_matches_grid_refinement() {
        // Independent check: coarse-to-fine grid search of the Fermat point.
        let pts = [Point2::new(0.1, 0.2), Point2::new(2.3, -0.4), Point2::new(1.1, 1.9)];
        let f = |x: Point2| pts.iter().map(|p| p.dist(x)).sum::<f64>();
        let (mut c, mut h) = (Point2::new(1.0, 0.5), 1.0);
        for _ in 0..60 {
            let mut best = c;
            for i in -4..=4 {
                for j in -4..=4 {
                    let q = c + Point2::new(i as f64, j as f64) * (h / 4.0);
                    if f(q) < f(best) {
                        best = q;
                    }
                }
            }
            c = best;
            h *= 0.6;
        }
        let cfg = PointConfig::new(pts.to_vec()).unwrap();
        let r = optimize_topology(&full_topologies(3)[0], &cfg).unwrap();
        assert!((r.length - f(c)).abs() < 1e-9);
    }

    #[test]
    fn single_edge() {
        let cfg = PointConfig::new(vec![Point2::new(0.0, 0.0), Point2::new(0.0, 2.0)]).unwrap();
        let s = steiner_tree(&cfg).unwrap();
        assert_eq!(s.length, 2.0);
        assert_eq!(s.minimizers.len(), 1);
    }

    #[test]
    fn obtuse_collapses() {
        let a = 0.3f64;
        let cfg = PointConfig::new(vec![
            Point2::new(-a.cos(), a.sin()),
            Point2::new(0.0, 0.0),
            Point2::new(a.cos(), a.sin()),
        ])
        .unwrap();
        let r = optimize_topology(&full_topologies(3)[0], &cfg).unwrap();
        assert!(r.degenerate);
        assert!(r.network.steiner.is_empty());
        assert!((r.length - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_square_two_minimizers() {
        let cfg = PointConfig::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        let s = steiner_tree(&cfg).unwrap();
        assert!((s.length - (1.0 + SQ3)).abs() < 1e-9);
        assert_eq!(s.minimizers.len(), 2);
        for n in &s.minimizers {
            assert!(regularity_violations(n, 1e-6).is_empty());
        }
    }

    #[test]
    fn hexagon_six_minimizers() {
        let s = steiner_tree(&PointConfig::regular(6, 2.0 * core::f64::consts::PI / 3.0)).unwrap();
        assert!((s.length - 5.0).abs() < 1e-9);
        assert_eq!(s.minimizers.len(), 6);
        for n in &s.minimizers {
            assert!(n.steiner.is_empty());
            assert_eq!(n.edges.len(), 5);
        }
    }

    #[test]
    fn pentagon_five_minimizers() {
        let s = steiner_tree(&PointConfig::regular(5, 0.4)).unwrap();
        assert_eq!(s.minimizers.len(), 5);
        assert!(s.length < mst_length(&PointConfig::regular(5, 0.4).points));
        for n in &s.minimizers {
            assert_eq!(n.steiner.len(), 3);
            assert!(regularity_violations(n, 1e-6).is_empty());
        }
    }

    #[test]
    fn fermat_cases() {
        let p = fermat_point(Point2::new(0., 0.), Point2::new(0., 0.), Point2::new(1., 0.));
        assert_eq!(p, Point2::new(0., 0.));
        let p = fermat_point(Point2::new(-1., 0.), Point2::new(1., 0.), Point2::new(0., 0.1));
        assert_eq!(p, Point2::new(0., 0.1));
    }

    fn config_strategy() -> impl Strategy<Value = PointConfig> {
        (3usize..=5).prop_flat_map(|m| proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), m)).prop_filter_map(
            "distinct points",
            |v| {
                let pts: Vec<Point2> = v.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        if pts[i].dist(pts[j]) < 0.05 {
                            return None;
                        }
                    }
                }
                PointConfig::new(pts).ok()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn rigid_motion_invariance(cfg in config_strategy(), th in 0.0f64..6.3, dx in -3.0f64..3.0, dy in -3.0f64..3.0) {
            let moved = cfg.transformed(|p| p.rotated(th) + Point2::new(dx, dy));
            let a = steiner_tree(&cfg).unwrap().length;
            let b = steiner_tree(&moved).unwrap().length;
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn below_spanning_tree_and_regular(cfg in config_strategy()) {
            let s = steiner_tree(&cfg).unwrap();
            prop_assert!(s.length <= mst_length(&cfg.points) + 1e-12);
            for n in &s.minimizers {
                prop_assert!(n.is_tree());
                prop_assert!(regularity_violations(n, 1e-6).is_empty(), "{:?}", regularity_violations(n, 1e-6));
            }
        }
    }
}
