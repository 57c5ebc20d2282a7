//! JSON scene files: a configuration with optional cuts, networks, labelled
//! sets, calibration fields and exempt pair sets.

use std::fmt;
use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use steiner_cover_core::calib::{Cell, SheetField};
use steiner_cover_core::covering::{build_covering, canonical_covering, CoveringSpace, CutSystem, PointConfig};
use steiner_cover_core::families::PairSet;
use steiner_cover_core::fixtures::{builtin, Fixture};
use steiner_cover_core::geom::{EdgeTag, Polyline, Segment};
use steiner_cover_core::sheets::{network_to_sheeted_set, SheetedSet};
use steiner_cover_core::steiner::Network;
use steiner_cover_core::{Point2, EPS_GEO};

pub const VERSION: &str = "steiner-cover/1";

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// Syntax or schema violation; the message carries line and column.
    #[error("schema error: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("invalid scene at {at}: {message}")]
    Invalid { at: String, message: String },
}

fn invalid(at: impl Into<String>, message: impl fmt::Display) -> SceneError {
    SceneError::Invalid { at: at.into(), message: message.to_string() }
}

/// Version tag; only `steiner-cover/1` is accepted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Version;

impl Serialize for Version {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(VERSION)
    }
}

impl<'de> Deserialize<'de> for Version {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let tag = String::deserialize(d)?;
        if tag == VERSION {
            Ok(Version)
        } else {
            Err(D::Error::custom(format!("unsupported version {tag:?}, expected {VERSION:?}")))
        }
    }
}

/// Unordered pair of distinct 1-based labels, stored as `[i, j]` with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pair(pub usize, pub usize);

impl Serialize for Pair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0, self.1].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [i, j] = <[usize; 2]>::deserialize(d)?;
        if i == 0 || j == 0 {
            return Err(D::Error::custom(format!("pair [{i}, {j}]: labels start at 1")));
        }
        if i == j {
            return Err(D::Error::custom(format!("pair [{i}, {j}]: labels must differ")));
        }
        Ok(Pair(i.min(j), i.max(j)))
    }
}

pub type Pt = [f64; 2];

fn pt(p: Point2) -> Pt {
    [p.x, p.y]
}

fn point(p: Pt) -> Point2 {
    Point2::new(p[0], p[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutsSpec {
    pub sigma: Vec<Vec<Pt>>,
    pub sigma_prime: Vec<Vec<Pt>>,
    /// Convex polygon containing every cut, counter-clockwise.
    pub omega: Vec<Pt>,
}

/// Network on the scene's terminals; vertex `k < m` is terminal `k + 1`,
/// the rest are the listed Steiner points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    #[serde(default)]
    pub steiner: Vec<Pt>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelKey {
    /// Point strictly inside the face.
    pub at: Pt,
    pub label: usize,
}

/// Sheet labelling of the arrangement of the cuts, the window, a network's
/// edges and extra segments. Faces without a key carry label 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<[Pt; 2]>,
    pub labels: Vec<LabelKey>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub ring: Vec<Pt>,
    /// One vector per sheet.
    pub values: Vec<Pt>,
}

/// Piecewise-constant field; where cells overlap the later one applies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub cells: Vec<CellSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    pub pairs: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: Version,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub config: Vec<Pt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cuts: Option<CutsSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub networks: Vec<NetworkSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<SetSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<FamilySpec>,
}

/// A scene with every block turned into core objects.
#[derive(Clone, Debug)]
pub struct Scene {
    pub name: Option<String>,
    pub note: Option<String>,
    pub covering: CoveringSpace,
    pub networks: Vec<Network>,
    pub sets: Vec<SheetedSet>,
    pub fields: Vec<SheetField>,
    pub families: Vec<(String, PairSet)>,
}

impl SceneFile {
    pub fn new(config: &PointConfig) -> SceneFile {
        SceneFile {
            version: Version,
            name: None,
            note: None,
            config: config.points.iter().copied().map(pt).collect(),
            cuts: None,
            networks: Vec::new(),
            sets: Vec::new(),
            fields: Vec::new(),
            families: Vec::new(),
        }
    }

    /// Parse and check a document; semantic errors name the offending block.
    pub fn from_json(text: &str) -> Result<SceneFile, SceneError> {
        let scene: SceneFile = serde_json::from_str(text)?;
        scene.resolve(EPS_GEO)?;
        Ok(scene)
    }

    /// Pretty JSON with a trailing newline. Floats use the shortest text that
    /// reads back to the same value.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene values are finite");
        s.push('\n');
        s
    }

    pub fn point_config(&self) -> Result<PointConfig, SceneError> {
        PointConfig::new(self.config.iter().copied().map(point).collect()).map_err(|e| invalid("config", e))
    }

    pub fn covering(&self) -> Result<CoveringSpace, SceneError> {
        let config = self.point_config()?;
        match &self.cuts {
            None => canonical_covering(&config).map_err(|e| invalid("config", e)),
            Some(c) => {
                let poly = |at: String, v: &[Pt]| {
                    Polyline::new(v.iter().copied().map(point).collect()).map_err(|e| invalid(at, e))
                };
                let sigma = c
                    .sigma
                    .iter()
                    .enumerate()
                    .map(|(k, v)| poly(format!("cuts.sigma[{k}]"), v))
                    .collect::<Result<_, _>>()?;
                let sigma_prime = c
                    .sigma_prime
                    .iter()
                    .enumerate()
                    .map(|(k, v)| poly(format!("cuts.sigma_prime[{k}]"), v))
                    .collect::<Result<_, _>>()?;
                let cuts = CutSystem {
                    sigma,
                    sigma_prime,
                    omega: c.omega.iter().copied().map(point).collect(),
                    frames: Vec::new(),
                };
                build_covering(&config, &cuts).map_err(|e| invalid("cuts", e))
            }
        }
    }

    /// Build every block. `tol` bounds how close a label key may come to an edge.
    pub fn resolve(&self, tol: f64) -> Result<Scene, SceneError> {
        let covering = self.covering()?;
        let m = covering.m();
        let terminals = covering.config.points.clone();
        let mut networks = Vec::with_capacity(self.networks.len());
        for (k, n) in self.networks.iter().enumerate() {
            let at = format!("networks[{k}]");
            let count = m + n.steiner.len();
            for (e, &[a, b]) in n.edges.iter().enumerate() {
                if a >= count || b >= count || a == b {
                    return Err(invalid(
                        format!("{at}.edges[{e}]"),
                        format!("[{a}, {b}] needs two distinct vertices below {count}"),
                    ));
                }
            }
            let net = Network {
                terminals: terminals.clone(),
                steiner: n.steiner.iter().copied().map(point).collect(),
                edges: n.edges.iter().map(|&[a, b]| (a, b)).collect(),
            };
            if net.segments().iter().any(|s| s.len() <= EPS_GEO) {
                return Err(invalid(at, "zero-length edge"));
            }
            networks.push(net);
        }
        let mut sets = Vec::with_capacity(self.sets.len());
        for (k, s) in self.sets.iter().enumerate() {
            sets.push(resolve_set(&covering, &networks, s, tol, &format!("sets[{k}]"))?);
        }
        let mut fields = Vec::with_capacity(self.fields.len());
        for (k, f) in self.fields.iter().enumerate() {
            let at = format!("fields[{k}]");
            let mut cells = Vec::with_capacity(f.cells.len());
            for (c, cell) in f.cells.iter().enumerate() {
                let at = format!("{at}.cells[{c}]");
                if cell.values.len() != m {
                    return Err(invalid(at, format!("{} values for {m} sheets", cell.values.len())));
                }
                let ring: Vec<Point2> = cell.ring.iter().copied().map(point).collect();
                let simple = ring.len() >= 3 && Polyline::closed(&ring).is_ok_and(|p| p.is_simple());
                if !simple {
                    return Err(invalid(at, "ring is not a simple polygon"));
                }
                cells.push(Cell { ring, values: cell.values.iter().copied().map(point).collect() });
            }
            fields.push(SheetField::from_faces(&covering, &cells).map_err(|e| invalid(at, e))?);
        }
        let families =
            self.families.iter().map(|f| (f.name.clone(), f.pairs.iter().map(|p| (p.0, p.1)).collect())).collect();
        for (k, f) in self.families.iter().enumerate() {
            if let Some(p) = f.pairs.iter().find(|p| p.1 > m) {
                return Err(invalid(format!("families[{k}]"), format!("pair [{}, {}] exceeds {m} sheets", p.0, p.1)));
            }
        }
        Ok(Scene { name: self.name.clone(), note: self.note.clone(), covering, networks, sets, fields, families })
    }

    pub fn push_network(&mut self, net: &Network) -> usize {
        self.networks.push(NetworkSpec {
            steiner: net.steiner.iter().copied().map(pt).collect(),
            edges: net.edges.iter().map(|&(a, b)| [a, b]).collect(),
        });
        self.networks.len() - 1
    }

    /// Record `set`, whose arrangement was built from the network at index
    /// `network` (if any) followed by `segments`.
    pub fn push_set(&mut self, set: &SheetedSet, network: Option<usize>, segments: &[Segment]) {
        let arr = &set.arrangement;
        let labels = arr
            .bounded_faces()
            .filter(|&f| set.labels[f] != 1)
            .map(|f| LabelKey { at: pt(arr.faces[f].witness), label: set.labels[f] })
            .collect();
        self.sets.push(SetSpec { network, segments: segments.iter().map(|s| [pt(s.a), pt(s.b)]).collect(), labels });
    }

    pub fn push_field(&mut self, field: &SheetField) {
        let cells = field
            .face_cells()
            .into_iter()
            .map(|c| CellSpec {
                ring: c.ring.into_iter().map(pt).collect(),
                values: c.values.into_iter().map(pt).collect(),
            })
            .collect();
        self.fields.push(FieldSpec { cells });
    }

    pub fn push_family(&mut self, name: &str, pairs: &PairSet) {
        self.families
            .push(FamilySpec { name: name.to_string(), pairs: pairs.iter().map(|&(a, b)| Pair(a, b)).collect() });
    }
}

fn resolve_set(
    cov: &CoveringSpace,
    networks: &[Network],
    s: &SetSpec,
    tol: f64,
    at: &str,
) -> Result<SheetedSet, SceneError> {
    let m = cov.m();
    let mut extra: Vec<(Segment, EdgeTag)> = Vec::new();
    if let Some(n) = s.network {
        let net = networks.get(n).ok_or_else(|| invalid(format!("{at}.network"), format!("no network {n}")))?;
        extra.extend(net.segments().into_iter().enumerate().map(|(i, seg)| (seg, EdgeTag::Network(i))));
    }
    for (k, [a, b]) in s.segments.iter().enumerate() {
        let seg = Segment::new(point(*a), point(*b));
        if seg.len() <= EPS_GEO {
            return Err(invalid(format!("{at}.segments[{k}]"), "zero-length segment"));
        }
        extra.push((seg, EdgeTag::Aux));
    }
    let blank = SheetedSet::blank(cov, &extra).map_err(|e| invalid(at, e))?;
    let arr = &blank.arrangement;
    let mut labels = vec![1; arr.faces.len()];
    let mut keyed = vec![false; arr.faces.len()];
    for (k, key) in s.labels.iter().enumerate() {
        let here = format!("{at}.labels[{k}]");
        if !(1..=m).contains(&key.label) {
            return Err(invalid(here, format!("label {} outside 1..={m}", key.label)));
        }
        let p = point(key.at);
        if arr.min_edge_dist(p) <= tol {
            return Err(invalid(here, "key lies on an edge"));
        }
        let f = arr.locate_unchecked(p);
        if f == arr.unbounded {
            return Err(invalid(here, "key lies in the unbounded face"));
        }
        if std::mem::replace(&mut keyed[f], true) {
            return Err(invalid(here, "second key for the same face"));
        }
        labels[f] = key.label;
    }
    blank.with_labels(labels).map_err(|e| invalid(at, e))
}

pub fn load(path: &Path) -> Result<SceneFile, SceneError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| SceneError::Io { path: path.display().to_string(), source })?;
    SceneFile::from_json(&text)
}

pub fn save(scene: &SceneFile, path: &Path) -> Result<(), SceneError> {
    std::fs::write(path, scene.to_json()).map_err(|source| SceneError::Io { path: path.display().to_string(), source })
}

/// Scene holding a network and, when it lifts to a constrained set, that set.
pub fn push_network_with_set(scene: &mut SceneFile, net: &Network, cov: &CoveringSpace) -> Option<SheetedSet> {
    let idx = scene.push_network(net);
    let set = network_to_sheeted_set(net, cov).ok()?;
    scene.push_set(&set, Some(idx), &[]);
    Some(set)
}

/// Canonical scene of a built-in fixture: its networks and sets, the
/// extended field and the exempt pairs under the name `J`.
pub fn fixture_scene(name: &str) -> Result<SceneFile, Box<dyn std::error::Error + Send + Sync>> {
    let fx: Fixture = builtin(name)?;
    let cov = fx.covering()?;
    let mut scene = SceneFile::new(&fx.config);
    scene.name = Some(fx.name.clone());
    scene.note = fx.note.map(str::to_string);
    for net in std::iter::once(&fx.network).chain(&fx.alternates) {
        if push_network_with_set(&mut scene, net, &cov).is_none() {
            return Err(format!("{name}: network does not lift to a constrained set").into());
        }
    }
    scene.push_field(&fx.field(&cov)?);
    if !fx.family.is_empty() {
        scene.push_family("J", &fx.family);
    }
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use steiner_cover_core::calib::verify;
    use steiner_cover_core::fixtures::fixture_names;

    #[test]
    fn version_is_checked() {
        let err = SceneFile::from_json(r#"{"version": "steiner-cover/2", "config": [[0,0],[1,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn config_only() {
        let s = SceneFile::from_json("{\"version\": \"steiner-cover/1\",\n \"config\": [[0,0],[3,0]]}").unwrap();
        assert!(s.networks.is_empty() && s.sets.is_empty() && s.fields.is_empty() && s.families.is_empty());
        assert_eq!(s.resolve(EPS_GEO).unwrap().covering.m(), 2);
    }

    #[test]
    fn equal_pair_is_a_schema_error() {
        let text = "{\n  \"version\": \"steiner-cover/1\",\n  \"config\": [[0,0],[1,0],[0,1]],\n  \"families\": [{\"name\": \"J\", \"pairs\": [[2, 2]]}]\n}";
        let err = SceneFile::from_json(text).unwrap_err();
        assert!(matches!(err, SceneError::Schema(_)));
        let msg = err.to_string();
        assert!(msg.contains("labels must differ") && msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn unknown_keys_and_bad_indices() {
        let err = SceneFile::from_json(r#"{"version": "steiner-cover/1", "config": [[0,0],[1,0]], "colour": 1}"#)
            .unwrap_err();
        assert!(matches!(err, SceneError::Schema(_)));
        let text = r#"{"version": "steiner-cover/1", "config": [[0,0],[1,0]], "networks": [{"edges": [[0, 5]]}]}"#;
        let err = SceneFile::from_json(text).unwrap_err();
        assert!(err.to_string().contains("networks[0].edges[0]"), "{err}");
    }

    #[test]
    fn hexagon_fixture_point() {
        let s = fixture_scene("hexagon-1").unwrap();
        let cfg = s.point_config().unwrap();
        assert!(cfg.p(5).dist(Point2::new(1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn fixtures_round_trip_and_verify() {
        for name in fixture_names() {
            let scene = fixture_scene(&name).unwrap();
            let text = scene.to_json();
            let back = SceneFile::from_json(&text).unwrap();
            assert_eq!(back, scene, "{name}");
            assert_eq!(back.to_json(), text, "{name}");

            let fx = builtin(&name).unwrap();
            let cov = fx.covering().unwrap();
            let direct = verify(&fx.field(&cov).unwrap(), &fx.set(&cov).unwrap(), &cov, &fx.family).unwrap();
            let r = back.resolve(EPS_GEO).unwrap();
            let exempt = r.families.first().map(|f| f.1.clone()).unwrap_or_default();
            let loaded = verify(&r.fields[0], &r.sets[0], &r.covering, &exempt).unwrap();
            assert_eq!(loaded.verdict, direct.verdict, "{name}");
            assert!((loaded.perimeter - direct.perimeter).abs() < 1e-12, "{name}");
            assert!((loaded.integral - direct.integral).abs() < 1e-9, "{name}");
            for (a, b) in loaded.margins.entries.iter().zip(&direct.margins.entries) {
                assert!((a.max - b.max).abs() < 1e-12, "{name} {:?}", a.pair);
            }
        }
    }
}
