//! Built-in configurations with their minimal networks and calibrations.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::calib::{stripe_extension, CalibError, Cell, HullField, SheetField};
use crate::covering::{canonical_covering, CoveringError, CoveringSpace, PointConfig};
use crate::families::{
    hexagon_families_derived, hexagon_families_printed, minimality_driver, norm_pair, pentagon_families_printed,
    Candidate, ClassTCatalogue, FamilyError, FamilyIndexSet, PairSet, WinnerReport,
};
use crate::geom::{Point2, Vec2};
use crate::math::{self, SQRT3};
use crate::sheets::{network_to_sheeted_set, SheetError, SheetedSet};
use crate::steiner::{optimize_topology, steiner_tree, Network, SteinerError, SteinerTopology};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error(transparent)]
    Steiner(#[from] SteinerError),
    #[error(transparent)]
    Sheets(#[from] SheetError),
    #[error(transparent)]
    Calib(#[from] CalibError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// A configuration, a network, the hull part of its calibration and the pairs
/// exempt from the size bound.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub config: PointConfig,
    pub network: Network,
    /// Further networks calibrated by the same field.
    pub alternates: Vec<Network>,
    pub hull: HullField,
    pub family: PairSet,
    /// Set when the fixture documents a mismatch rather than a certificate.
    pub note: Option<&'static str>,
}

impl Fixture {
    pub fn covering(&self) -> Result<CoveringSpace, FixtureError> {
        Ok(canonical_covering(&self.config)?)
    }

    pub fn field(&self, cov: &CoveringSpace) -> Result<SheetField, FixtureError> {
        Ok(stripe_extension(&self.hull, cov)?)
    }

    pub fn set(&self, cov: &CoveringSpace) -> Result<SheetedSet, FixtureError> {
        Ok(network_to_sheeted_set(&self.network, cov)?)
    }

    pub fn sets(&self, cov: &CoveringSpace) -> Result<Vec<SheetedSet>, FixtureError> {
        core::iter::once(&self.network).chain(&self.alternates).map(|n| Ok(network_to_sheeted_set(n, cov)?)).collect()
    }
}

pub const OBTUSE_ANGLES: [(&str, f64); 3] = [("pi/12", PI / 12.0), ("pi/8", PI / 8.0), ("pi/6-0.01", PI / 6.0 - 0.01)];

/// Every fixture name, in a stable order.
pub fn fixture_names() -> Vec<String> {
    let mut names = vec!["segment".to_string(), "triangle-equilateral".to_string()];
    names.extend(OBTUSE_ANGLES.iter().map(|(s, _)| format!("triangle-obtuse({s})")));
    names.push("square".to_string());
    names.extend((1..=5).map(|i| format!("pentagon({i})")));
    names.extend((1..=14).map(|i| format!("hexagon-{i}")));
    names.push("hexagon-10-printed".to_string());
    names
}

pub fn builtin(name: &str) -> Result<Fixture, FixtureError> {
    let unknown = || FixtureError::Unknown(name.to_string());
    let fixture = match name {
        "segment" => segment(),
        "triangle-equilateral" => triangle(),
        "square" => square()?,
        "hexagon-10-printed" => hexagon_ten_printed()?,
        _ => {
            if let Some(arg) = name.strip_prefix("triangle-obtuse(").and_then(|s| s.strip_suffix(')')) {
                obtuse(parse_angle(arg).ok_or_else(unknown)?)
            } else if let Some(arg) = name.strip_prefix("pentagon(").and_then(|s| s.strip_suffix(')')) {
                let i: usize = arg.parse().map_err(|_| unknown())?;
                pentagon(i).ok_or_else(unknown)??
            } else if let Some(arg) = name.strip_prefix("hexagon-") {
                let i: usize = arg.parse().map_err(|_| unknown())?;
                hexagon(i).ok_or_else(unknown)??
            } else {
                return Err(unknown());
            }
        }
    };
    Ok(Fixture { name: name.to_string(), ..fixture })
}

/// `pi/N`, `pi/N-D`, `pi/N+D` or a plain number of radians.
fn parse_angle(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("pi/") {
        let cut = rest.find(['+', '-']).unwrap_or(rest.len());
        let n: f64 = rest[..cut].parse().ok()?;
        let off: f64 = if cut < rest.len() { rest[cut..].parse().ok()? } else { 0.0 };
        return Some(PI / n + off);
    }
    s.parse().ok()
}

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn fixture(config: PointConfig, network: Network, base: Vec<Vec2>, family: PairSet) -> Fixture {
    Fixture {
        name: String::new(),
        config,
        network,
        alternates: Vec::new(),
        hull: HullField::constant(base),
        family,
        note: None,
    }
}

fn segment() -> Fixture {
    let config = PointConfig::new(vec![p(1.0, 0.0), p(-1.0, 0.0)]).expect("segment terminals");
    let network = Network { terminals: config.points.clone(), steiner: vec![], edges: vec![(0, 1)] };
    fixture(config, network, vec![p(0.0, -1.0), p(0.0, 1.0)], PairSet::new())
}

fn triangle() -> Fixture {
    let config =
        PointConfig::new(vec![p(-SQRT3 / 2.0, -0.5), p(SQRT3 / 2.0, -0.5), p(0.0, 1.0)]).expect("triangle terminals");
    let network =
        Network { terminals: config.points.clone(), steiner: vec![Point2::ZERO], edges: vec![(0, 3), (1, 3), (2, 3)] };
    let base = vec![p(-1.0, 1.0 / SQRT3), p(1.0, 1.0 / SQRT3), p(0.0, -2.0 / SQRT3)];
    fixture(config, network, base, PairSet::new())
}

/// Isosceles triangle with apex angle `π − 2α` at `p2`.
fn obtuse(alpha: f64) -> Fixture {
    let (c, s) = (math::cos(alpha), math::sin(alpha));
    let config = PointConfig::new(vec![p(-c, s), p(0.0, 0.0), p(c, s)]).expect("obtuse terminals");
    let network = Network { terminals: config.points.clone(), steiner: vec![], edges: vec![(0, 1), (1, 2)] };
    let base = vec![p(0.0, 0.0), p(2.0 * s, -2.0 * c), p(-2.0 * s, -2.0 * c)];
    fixture(config, network, base, PairSet::new())
}

/// Unit square with both Steiner trees. The hull splits along its diagonals
/// into four triangles, each constant per sheet.
fn square() -> Result<Fixture, FixtureError> {
    let config = PointConfig::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)])?;
    let h = 0.5 / SQRT3;
    let terminals = config.points.clone();
    let across = Network {
        terminals: terminals.clone(),
        steiner: vec![p(0.5, h), p(0.5, 1.0 - h)],
        edges: vec![(0, 4), (1, 4), (4, 5), (2, 5), (3, 5)],
    };
    let along = Network {
        terminals,
        steiner: vec![p(1.0 - h, 0.5), p(h, 0.5)],
        edges: vec![(1, 4), (2, 4), (4, 5), (0, 5), (3, 5)],
    };
    let r = SQRT3;
    let c = p(0.5, 0.5);
    let tri = |a: Point2, b: Point2, values: [(f64, f64); 4]| Cell {
        ring: vec![a, b, c],
        values: values.iter().map(|&(x, y)| p(x, y)).collect(),
    };
    let cells = vec![
        tri(p(0.0, 0.0), p(1.0, 0.0), [(0.0, 0.0), (1.0, 2.0 - r), (2.0, 0.0), (1.0, -r)]),
        tri(
            p(1.0, 0.0),
            p(1.0, 1.0),
            [
                (-(3.0 - r) / 4.0, (3.0 - r) / 4.0),
                (-(3.0 * r - 5.0) / 4.0, (7.0 - r) / 4.0),
                ((5.0 + r) / 4.0, (3.0 - r) / 4.0),
                (-(3.0 * r - 5.0) / 4.0, -(1.0 + r) / 4.0),
            ],
        ),
        tri(
            p(1.0, 1.0),
            p(0.0, 1.0),
            [(-1.0, -(r - 1.0) / 2.0), (0.0, (r + 1.0) / 2.0), (1.0, -(r - 1.0) / 2.0), (0.0, -(3.0 - r) / 2.0)],
        ),
        tri(
            p(0.0, 1.0),
            p(0.0, 0.0),
            [
                (-(1.0 + r) / 4.0, -(1.0 + r) / 4.0),
                ((3.0 * r - 1.0) / 4.0, (3.0 - r) / 4.0),
                ((7.0 - r) / 4.0, -(1.0 + r) / 4.0),
                ((3.0 * r - 1.0) / 4.0, -(5.0 + r) / 4.0),
            ],
        ),
    ];
    Ok(Fixture {
        name: String::new(),
        config,
        network: across,
        alternates: vec![along],
        hull: HullField { base: vec![Point2::ZERO; 4], cells },
        family: PairSet::new(),
        note: None,
    })
}

/// Regular polygon with `p_k` at angle `start + 2π(k−1)/m`, centred at 0.
pub fn regular_polygon(m: usize, radius: f64, start: f64) -> PointConfig {
    let step = 2.0 * PI / m as f64;
    let pts = (0..m).map(|k| {
        let a = start + step * k as f64;
        p(radius * math::cos(a), radius * math::sin(a))
    });
    PointConfig::new(pts.collect()).expect("regular polygon")
}

/// Unit-side pentagon with `p3` at the bottom.
pub fn pentagon_config() -> PointConfig {
    regular_polygon(5, 0.5 / math::sin(PI / 5.0), 126f64.to_radians())
}

/// Unit-side hexagon with `p2 = (−1, 0)` and `p5 = (1, 0)`.
pub fn hexagon_config() -> PointConfig {
    let h = SQRT3 / 2.0;
    PointConfig::new(vec![p(-0.5, h), p(-1.0, 0.0), p(-0.5, -h), p(0.5, -h), p(1.0, 0.0), p(0.5, h)]).expect("hexagon")
}

/// Symmetry of a regular polygon: optional reflection in the axis through
/// `p1`, then rotation taking `p_k` to `p_{k+rot}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Symmetry {
    pub rot: i64,
    pub reflect: bool,
}

impl Symmetry {
    pub fn all(m: usize) -> Vec<Symmetry> {
        [false, true].iter().flat_map(|&reflect| (0..m as i64).map(move |rot| Symmetry { rot, reflect })).collect()
    }

    /// Label of the image of terminal `k`.
    pub fn terminal(&self, k: usize, m: usize) -> usize {
        let k = k as i64;
        math::wrap_label(if self.reflect { 2 - k + self.rot } else { k + self.rot }, m)
    }

    /// Sheet of the image of a face labelled `l`; a face along hull side
    /// `e_k` carries label `m + 1 − k`.
    pub fn sheet(&self, l: usize, m: usize) -> usize {
        let (l, mi) = (l as i64, m as i64);
        math::wrap_label(if self.reflect { 2 * mi + 1 - self.rot - l } else { l - self.rot }, m)
    }

    pub fn map_point(&self, v: Vec2, m: usize, start: f64) -> Vec2 {
        let v = if self.reflect {
            let (c, s) = (math::cos(2.0 * start), math::sin(2.0 * start));
            p(c * v.x + s * v.y, s * v.x - c * v.y)
        } else {
            v
        };
        v.rotated(2.0 * PI * self.rot as f64 / m as f64)
    }

    pub fn map_pairs(&self, pairs: &PairSet, m: usize) -> PairSet {
        pairs.iter().map(|&(a, b)| norm_pair(self.sheet(a, m), self.sheet(b, m))).collect()
    }

    /// Image of a constant hull field, normalised to vanish on sheet 1.
    pub fn map_field(&self, base: &[Vec2], start: f64) -> Vec<Vec2> {
        let m = base.len();
        let mut out = vec![Point2::ZERO; m];
        for (l, v) in base.iter().enumerate() {
            out[self.sheet(l + 1, m) - 1] = self.map_point(*v, m, start);
        }
        let shift = out[0];
        out.iter().map(|&v| v - shift).collect()
    }

    pub fn map_topology(&self, top: &SteinerTopology) -> SteinerTopology {
        let m = top.m;
        let f = |v: usize| if v < m { self.terminal(v + 1, m) - 1 } else { v };
        SteinerTopology { m, k: top.k, edges: top.edges.iter().map(|&(a, b)| (f(a), f(b))).collect() }
    }
}

struct RegularBase {
    config: PointConfig,
    start: f64,
    topology: SteinerTopology,
    field: Vec<Vec2>,
    family: PairSet,
}

fn pairs(list: &[(usize, usize)]) -> PairSet {
    list.iter().map(|&(a, b)| norm_pair(a, b)).collect()
}

/// Calibration of `base` moved by the first symmetry that lands on `target`.
fn regular_variant(base: &RegularBase, target: &PairSet) -> Option<Result<Fixture, FixtureError>> {
    let m = base.config.m();
    let sym = Symmetry::all(m).into_iter().find(|s| &s.map_pairs(&base.family, m) == target)?;
    let top = sym.map_topology(&base.topology);
    Some(
        optimize_topology(&top, &base.config).map_err(FixtureError::from).map(|opt| {
            fixture(base.config.clone(), opt.network, sym.map_field(&base.field, base.start), target.clone())
        }),
    )
}

fn pentagon_base() -> RegularBase {
    RegularBase {
        config: pentagon_config(),
        start: 126f64.to_radians(),
        topology: SteinerTopology { m: 5, k: 3, edges: vec![(0, 5), (1, 5), (2, 6), (3, 7), (4, 7), (5, 6), (6, 7)] },
        field: vec![p(0.0, 0.0), p(2.0, 0.0), p(1.0, -SQRT3), p(-1.0, -SQRT3), p(-2.0, 0.0)],
        family: pairs(&[(2, 4), (2, 5), (3, 5)]),
    }
}

fn pentagon(i: usize) -> Option<Result<Fixture, FixtureError>> {
    let target = pentagon_families_printed().get(i.checked_sub(1)?)?.pairs.clone();
    regular_variant(&pentagon_base(), &target)
}

pub fn hexagon_phi1() -> Vec<Vec2> {
    vec![p(0.0, 0.0), p(SQRT3, 1.0), p(SQRT3, -1.0), p(0.0, -2.0), p(-SQRT3, -1.0), p(-SQRT3, 1.0)]
}

pub fn hexagon_phi10() -> Vec<Vec2> {
    let s7 = math::sqrt(7.0);
    [(0.0, 0.0), (3.0 * SQRT3, 1.0), (2.0 * SQRT3, -4.0), (-SQRT3, -5.0), (-4.0 * SQRT3, -6.0), (-3.0 * SQRT3, -1.0)]
        .iter()
        .map(|&(x, y)| p(x / s7, y / s7))
        .collect()
}

/// The field calibrating the rotated network, before rotating back.
pub fn hexagon_phi10_rotated() -> Vec<Vec2> {
    vec![p(0.0, 0.0), p(2.0, 0.0), p(1.0, -SQRT3), p(-1.0, -SQRT3), p(-3.0, -SQRT3), p(-2.0, 0.0)]
}

/// Angle of the rotation used to build the ten-family field.
pub fn hexagon_rotation_angle() -> f64 {
    -math::atan(1.0 / (3.0 * SQRT3))
}

pub fn hexagon_phi13() -> Vec<Vec2> {
    vec![p(0.0, 0.0), p(2.0, 0.0), p(1.0, -SQRT3), p(0.0, -2.0 * SQRT3), p(-1.0, -SQRT3), p(-2.0, 0.0)]
}

fn hexagon_bases() -> [RegularBase; 3] {
    let printed = hexagon_families_printed();
    let base = |k: usize, topology: SteinerTopology, field: Vec<Vec2>| RegularBase {
        config: hexagon_config(),
        start: 120f64.to_radians(),
        topology,
        field,
        family: printed[k - 1].pairs.clone(),
    };
    [
        base(1, SteinerTopology { m: 6, k: 0, edges: vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)] }, hexagon_phi1()),
        // The ten-family field only exceeds 2 on the pairs of family 7.
        base(
            7,
            SteinerTopology {
                m: 6,
                k: 4,
                edges: vec![(0, 7), (1, 6), (2, 6), (3, 8), (4, 9), (5, 9), (6, 7), (7, 8), (8, 9)],
            },
            hexagon_phi10(),
        ),
        base(
            13,
            SteinerTopology {
                m: 6,
                k: 4,
                edges: vec![(0, 6), (1, 6), (2, 7), (3, 7), (4, 9), (5, 9), (6, 8), (7, 8), (8, 9)],
            },
            hexagon_phi13(),
        ),
    ]
}

fn hexagon(i: usize) -> Option<Result<Fixture, FixtureError>> {
    let target = hexagon_families_derived().get(i.checked_sub(1)?)?.pairs.clone();
    let [one, ten, thirteen] = hexagon_bases();
    let base = match i {
        1..=6 => one,
        7..=12 => ten,
        _ => thirteen,
    };
    regular_variant(&base, &target)
}

/// The printed ten-family field paired with the printed pair list of family 10.
fn hexagon_ten_printed() -> Result<Fixture, FixtureError> {
    let [_, ten, _] = hexagon_bases();
    let network = optimize_topology(&ten.topology, &ten.config)?.network;
    let mut f = fixture(ten.config, network, ten.field, hexagon_families_printed()[9].pairs.clone());
    f.note = Some("reconciliation case: the printed field exceeds the size bound on pairs outside the printed list");
    Ok(f)
}

/// End-to-end certificate for a regular configuration.
#[derive(Clone, Debug)]
pub struct DriverRun {
    pub config: PointConfig,
    pub families: Vec<FamilyIndexSet>,
    pub candidates: Vec<Candidate>,
    pub report: WinnerReport,
    /// Length of a Steiner minimal tree, from the exact solver.
    pub steiner_length: f64,
}

/// Families, candidates and fields for `pentagon` or `hexagon`.
pub fn driver(name: &str) -> Result<DriverRun, FixtureError> {
    let (config, families, fixture_name): (PointConfig, Vec<FamilyIndexSet>, fn(usize) -> String) = match name {
        "pentagon" => (pentagon_config(), pentagon_families_printed(), |i| format!("pentagon({i})")),
        "hexagon" => (hexagon_config(), hexagon_families_derived(), |i| format!("hexagon-{i}")),
        _ => return Err(FixtureError::Unknown(name.to_string())),
    };
    let cov = canonical_covering(&config)?;
    let catalogue = ClassTCatalogue::build(&cov)?;
    let candidates = families.iter().map(|f| catalogue.candidate(&f.pairs, &cov)).collect::<Result<Vec<_>, _>>()?;
    let fields = (1..=families.len())
        .map(|i| builtin(&fixture_name(i))?.field(&cov).map(Some))
        .collect::<Result<Vec<_>, _>>()?;
    let sets: Vec<Option<SheetedSet>> = candidates.iter().map(|c| Some(c.set.clone())).collect();
    let report = minimality_driver(&catalogue, &cov, &families, &sets, &fields)?;
    let steiner_length = steiner_tree(&config)?.length;
    Ok(DriverRun { config, families, candidates, report, steiner_length })
}
