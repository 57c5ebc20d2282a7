//! Random configurations, fields and competitor sets for sampled checks.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::calib::HullField;
use crate::covering::{canonical_covering, CoveringSpace, PointConfig};
use crate::families::{barycentric_embedding, is_cyclic_compatible};
use crate::geom::{clip_polygon_convex, signed_area, EdgeTag, Point2, Segment};
use crate::math;
use crate::sheets::{network_to_sheeted_set, SheetedSet};
use crate::steiner::{enumerate_topologies, Network, SteinerTopology};

/// `m` points in strictly convex position, counter-clockwise, with a covering.
pub fn random_convex_config<R: Rng + ?Sized>(rng: &mut R, m: usize) -> (PointConfig, CoveringSpace) {
    loop {
        let mut angles: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        angles.sort_by(f64::total_cmp);
        let gap = |k: usize| {
            let next = if k + 1 < m { angles[k + 1] } else { angles[0] + 2.0 * PI };
            next - angles[k]
        };
        if (0..m).any(|k| gap(k) < 0.5 || (m > 2 && gap(k) > PI - 0.2)) {
            continue;
        }
        let pts: Vec<Point2> = angles
            .iter()
            .map(|&a| {
                let r = rng.gen_range(0.9..1.1);
                Point2::new(r * math::cos(a), r * math::sin(a))
            })
            .collect();
        let Ok(cfg) = PointConfig::new(pts) else { continue };
        if m > 2 && cfg.convex_orientation().is_none() {
            continue;
        }
        if let Ok(cov) = canonical_covering(&cfg) {
            return (cfg, cov);
        }
    }
}

/// Planar topologies of `m` terminals in convex position.
pub fn planar_topologies(m: usize) -> Vec<SteinerTopology> {
    enumerate_topologies(m, None).map(|all| all.into_iter().filter(is_cyclic_compatible).collect()).unwrap_or_default()
}

/// A class-T network over `cov`: a random planar topology with its Steiner
/// points moved off their barycentric positions.
pub fn random_network<R: Rng + ?Sized>(
    rng: &mut R,
    cov: &CoveringSpace,
    topologies: &[SteinerTopology],
) -> Option<(Network, SheetedSet)> {
    let top = &topologies[rng.gen_range(0..topologies.len())];
    let base = barycentric_embedding(top, &cov.config);
    let mut scale = 0.4;
    for _ in 0..6 {
        let mut net = base.clone();
        for s in 0..net.steiner.len() {
            let v = top.m + s;
            let reach = net
                .edges
                .iter()
                .filter_map(|&(a, b)| {
                    if a == v {
                        Some(b)
                    } else if b == v {
                        Some(a)
                    } else {
                        None
                    }
                })
                .map(|w| base.vertex(w).dist(base.vertex(v)))
                .fold(f64::INFINITY, f64::min);
            let a = rng.gen_range(0.0..2.0 * PI);
            net.steiner[s] += Point2::new(math::cos(a), math::sin(a)) * (scale * reach * rng.gen_range(0.0..1.0));
        }
        if let Ok(set) = network_to_sheeted_set(&net, cov) {
            return Some((net, set));
        }
        scale *= 0.5;
    }
    network_to_sheeted_set(&base, cov).ok().map(|set| (base, set))
}

/// Constant hull field with components uniform in `[-scale, scale]`.
pub fn random_hull_field<R: Rng + ?Sized>(rng: &mut R, m: usize, scale: f64) -> HullField {
    HullField::constant(
        (0..m).map(|_| Point2::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))).collect(),
    )
}

/// Random convex polygon inside the hull of the terminals.
fn random_patch<R: Rng + ?Sized>(rng: &mut R, cov: &CoveringSpace) -> Vec<Point2> {
    let pts = &cov.config.points;
    let diam = cov.config.diameter();
    let mut hull = crate::geom::convex_hull(pts);
    if signed_area(&hull) < 0.0 {
        hull.reverse();
    }
    let weights: Vec<f64> = pts.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let centre = pts.iter().zip(&weights).fold(Point2::ZERO, |acc, (&p, &w)| acc + p * (w / total));
    let n = rng.gen_range(3..7);
    let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    angles.sort_by(f64::total_cmp);
    let poly: Vec<Point2> = angles
        .iter()
        .map(|&a| centre + Point2::new(math::cos(a), math::sin(a)) * (diam * rng.gen_range(0.05..0.35)))
        .collect();
    let poly = crate::geom::convex_hull(&poly);
    if hull.len() < 3 {
        // Two terminals: keep the patch off the segment's cut.
        return poly;
    }
    clip_polygon_convex(&poly, &hull)
}

/// Competitor built from `base` by giving the faces inside a random convex
/// patch random sheet labels. Returns `None` if the result is not constrained.
pub fn relabel_competitor<R: Rng + ?Sized>(rng: &mut R, base: &SheetedSet, cov: &CoveringSpace) -> Option<SheetedSet> {
    let patch = random_patch(rng, cov);
    if patch.len() < 3 {
        return None;
    }
    let mut extra: Vec<(Segment, EdgeTag)> = base
        .arrangement
        .edges
        .iter()
        .filter(|e| e.has_tag(|t| matches!(t, EdgeTag::Network(_))))
        .enumerate()
        .map(|(i, e)| (base.arrangement.segment(e), EdgeTag::Network(i)))
        .collect();
    for k in 0..patch.len() {
        extra.push((Segment::new(patch[k], patch[(k + 1) % patch.len()]), EdgeTag::Aux));
    }
    let set = SheetedSet::blank(cov, &extra).ok()?;
    let m = base.m;
    let mut labels = vec![1; set.arrangement.faces.len()];
    for (f, face) in set.arrangement.faces.iter().enumerate() {
        if f == set.arrangement.unbounded {
            continue;
        }
        labels[f] = if crate::geom::winding_raw(&patch, face.witness) != 0 {
            rng.gen_range(1..=m)
        } else {
            base.label_at(face.witness).ok()?
        };
    }
    let set = set.with_labels(labels).ok()?;
    set.check_constraints().passed().then_some(set)
}

/// Either a random network or a relabelled `base`, about evenly.
pub fn random_competitor<R: Rng + ?Sized>(
    rng: &mut R,
    base: &SheetedSet,
    cov: &CoveringSpace,
    topologies: &[SteinerTopology],
) -> Option<SheetedSet> {
    if cov.m() > 2 && rng.gen_bool(0.5) {
        random_network(rng, cov, topologies).map(|(_, s)| s)
    } else {
        relabel_competitor(rng, base, cov)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generators_produce_valid_objects() {
        let mut rng = StdRng::seed_from_u64(7);
        for m in 2..=6 {
            let (cfg, cov) = random_convex_config(&mut rng, m);
            assert_eq!(cfg.m(), m);
            let tops = planar_topologies(m);
            let (net, set) = random_network(&mut rng, &cov, &tops).unwrap();
            assert!((set.perimeter() - 2.0 * net.length()).abs() < 1e-9);
            let mut made = 0;
            for _ in 0..20 {
                if let Some(c) = relabel_competitor(&mut rng, &set, &cov) {
                    assert!(c.check_constraints().passed());
                    made += 1;
                }
            }
            assert!(made > 0, "m = {m}");
        }
    }
}
