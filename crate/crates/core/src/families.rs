//! Pair-set families of competitors, the cover of class T by families, and
//! the family-wise minimality driver.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::calib::{verify, CalibError, CalibrationReport, SheetField};
use crate::covering::{CoveringSpace, PointConfig};
use crate::geom::Point2;
use crate::sheets::{network_to_sheeted_set, SheetError, SheetedSet};
use crate::steiner::{
    enumerate_topologies, optimize_topology, solve_dense, Network, OptimizedNetwork, SteinerError, SteinerTopology,
    TIE_TOL,
};

/// Normalized sheet pairs `(i, j)` with `i < j`.
pub type PairSet = BTreeSet<(usize, usize)>;

/// Interfaces shorter than this count as empty.
pub const EMPTY_INTERFACE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FamilyError {
    #[error("terminals are not in convex position")]
    NotConvex,
    #[error("no class-T topology avoids the pairs of family {0:?}")]
    EmptyFamily(PairSet),
    #[error("family {family} has no verified candidate: {reason}")]
    IncompleteCertificate { family: usize, reason: &'static str },
    #[error("{0} class-T topologies lie in no family")]
    Uncovered(usize),
    #[error("{families} families but {candidates} candidates and {fields} fields")]
    Arity { families: usize, candidates: usize, fields: usize },
    #[error(transparent)]
    Steiner(#[from] SteinerError),
    #[error(transparent)]
    Sheets(#[from] SheetError),
    #[error(transparent)]
    Calib(#[from] CalibError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Printed,
    DerivedFromSplit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyIndexSet {
    pub pairs: PairSet,
    pub provenance: Provenance,
}

impl FamilyIndexSet {
    pub fn printed(pairs: &[(usize, usize)]) -> FamilyIndexSet {
        FamilyIndexSet { pairs: pairs.iter().map(|&(a, b)| norm_pair(a, b)).collect(), provenance: Provenance::Printed }
    }
}

pub fn norm_pair(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Label `k` lies strictly inside the cyclic arc from `a` up to `b`.
fn strictly_between(a: usize, b: usize, k: usize, m: usize) -> bool {
    let d = (k + m - a) % m;
    d > 0 && d < (b + m - a) % m
}

/// The chords `p` and `q` of the cyclic order cross: one endpoint of `q` lies
/// strictly on each side of `p`.
pub fn interleaved(p: (usize, usize), q: (usize, usize), m: usize) -> bool {
    let (i, j) = p;
    let (k1, k2) = q;
    if i == k1 || i == k2 || j == k1 || j == k2 {
        return false;
    }
    strictly_between(i, j, k1, m) != strictly_between(i, j, k2, m)
}

/// All pairs interleaved with some declared nonvanishing pair.
pub fn interleave_closure(nonvanishing: &PairSet, m: usize) -> FamilyIndexSet {
    let mut pairs = PairSet::new();
    for a in 1..=m {
        for b in a + 1..=m {
            if nonvanishing.iter().any(|&d| interleaved(d, (a, b), m)) {
                pairs.insert((a, b));
            }
        }
    }
    FamilyIndexSet { pairs, provenance: Provenance::DerivedFromSplit }
}

fn closure_of(declared: &[(usize, usize)], m: usize) -> FamilyIndexSet {
    interleave_closure(&declared.iter().map(|&(a, b)| norm_pair(a, b)).collect(), m)
}

fn wrap(k: i64, m: usize) -> usize {
    crate::math::wrap_label(k, m)
}

pub fn pentagon_families_printed() -> Vec<FamilyIndexSet> {
    [
        [(1, 3), (1, 4), (2, 4)],
        [(1, 3), (1, 4), (3, 5)],
        [(1, 3), (2, 5), (3, 5)],
        [(1, 4), (2, 4), (2, 5)],
        [(2, 4), (2, 5), (3, 5)],
    ]
    .iter()
    .map(|p| FamilyIndexSet::printed(p))
    .collect()
}

/// One family per terminal `v`: both diagonals at `v` carry an interface.
pub fn pentagon_families_derived() -> Vec<FamilyIndexSet> {
    (1..=5i64).map(|v| closure_of(&[(v as usize, wrap(v + 2, 5)), (v as usize, wrap(v + 3, 5))], 5)).collect()
}

pub fn hexagon_families_printed() -> Vec<FamilyIndexSet> {
    [
        [(2, 4), (2, 5), (2, 6), (3, 5), (3, 6), (4, 6)],
        [(1, 3), (1, 4), (1, 5), (3, 5), (3, 6), (4, 6)],
        [(1, 4), (1, 5), (2, 4), (2, 5), (2, 6), (4, 6)],
        [(1, 3), (1, 5), (2, 5), (2, 6), (3, 5), (3, 6)],
        [(1, 3), (1, 4), (2, 4), (2, 6), (3, 6), (4, 6)],
        [(1, 3), (1, 4), (1, 5), (2, 4), (2, 5), (3, 5)],
        [(1, 5), (2, 4), (2, 5), (2, 6), (3, 5), (3, 6)],
        [(1, 3), (1, 4), (2, 6), (3, 5), (3, 6), (4, 6)],
        [(1, 3), (1, 4), (1, 5), (2, 4), (2, 5), (4, 6)],
        [(1, 3), (2, 5), (2, 6), (3, 5), (3, 6), (4, 6)],
        [(1, 3), (1, 4), (1, 5), (2, 4), (3, 6), (4, 6)],
        [(1, 4), (1, 5), (2, 4), (2, 5), (2, 6), (3, 5)],
        [(1, 4), (2, 4), (2, 5), (2, 6), (3, 6), (4, 6)],
        [(1, 3), (1, 4), (1, 5), (2, 5), (3, 5), (3, 6)],
    ]
    .iter()
    .map(|p| FamilyIndexSet::printed(p))
    .collect()
}

/// Chords declared nonvanishing for each hexagon family.
///
/// Each opposite pair `(i, j)` is split four ways by which neighbouring chords
/// also carry an interface: `(i, j∓1)`, `(i±1, j)`, then one chord moving `j`
/// and one moving `i`. With `literal` the last two refinements pair `(i, j−1)`
/// with `(i+1, j)` and `(i−1, j)` with `(i, j+1)`; those chords interleave, so
/// the consistent reading pairs `(i, j−1)` with `(i−1, j)` and `(i+1, j)` with
/// `(i, j+1)`. The last two families declare a triangle of short diagonals.
pub fn hexagon_declarations(literal: bool) -> Vec<Vec<(usize, usize)>> {
    let w = |k: i64| wrap(k, 6);
    let mut out = Vec::new();
    for kind in 0..4 {
        for (i, j) in [(1i64, 4i64), (2, 5), (3, 6)] {
            let (a, b) = match (kind, literal) {
                (0, _) => ((i, j - 1), (i, j + 1)),
                (1, _) => ((i + 1, j), (i - 1, j)),
                (2, true) => ((i, j - 1), (i + 1, j)),
                (3, true) => ((i - 1, j), (i, j + 1)),
                (2, false) => ((i, j - 1), (i - 1, j)),
                _ => ((i + 1, j), (i, j + 1)),
            };
            out.push([(i, j), a, b].iter().map(|&(x, y)| norm_pair(w(x), w(y))).collect());
        }
    }
    out.push(vec![(1, 3), (3, 5), (1, 5)]);
    out.push(vec![(2, 4), (4, 6), (2, 6)]);
    out
}

/// No two declared chords interleave, so the family can be nonempty.
pub fn declaration_consistent(declared: &[(usize, usize)], m: usize) -> bool {
    split_violations(&declared.iter().copied().collect(), m).is_empty()
}

pub fn hexagon_families_derived() -> Vec<FamilyIndexSet> {
    hexagon_declarations(false).iter().map(|d| closure_of(d, 6)).collect()
}

/// Derivation that follows the refinement definitions word for word.
pub fn hexagon_families_literal() -> Vec<FamilyIndexSet> {
    hexagon_declarations(true).iter().map(|d| closure_of(d, 6)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyDiffEntry {
    /// 1-based printed family index.
    pub index: usize,
    pub printed: PairSet,
    pub derived: Option<PairSet>,
    /// 1-based index of a derived family with exactly the printed pairs.
    pub same_as_derived: Option<usize>,
}

impl FamilyDiffEntry {
    pub fn only_printed(&self) -> PairSet {
        self.derived.as_ref().map_or_else(|| self.printed.clone(), |d| self.printed.difference(d).copied().collect())
    }

    pub fn only_derived(&self) -> PairSet {
        self.derived.as_ref().map_or_else(PairSet::new, |d| d.difference(&self.printed).copied().collect())
    }

    pub fn index_match(&self) -> bool {
        self.derived.as_ref() == Some(&self.printed)
    }
}

/// Index-wise comparison of printed and derived lists, with set-level matches.
pub fn diff_families(printed: &[FamilyIndexSet], derived: &[FamilyIndexSet]) -> Vec<FamilyDiffEntry> {
    printed
        .iter()
        .enumerate()
        .map(|(k, p)| FamilyDiffEntry {
            index: k + 1,
            printed: p.pairs.clone(),
            derived: derived.get(k).map(|d| d.pairs.clone()),
            same_as_derived: derived.iter().position(|d| d.pairs == p.pairs).map(|d| d + 1),
        })
        .collect()
}

/// Both lists contain the same pair sets, in any order.
pub fn same_families(a: &[FamilyIndexSet], b: &[FamilyIndexSet]) -> bool {
    let sa: BTreeSet<&PairSet> = a.iter().map(|f| &f.pairs).collect();
    let sb: BTreeSet<&PairSet> = b.iter().map(|f| &f.pairs).collect();
    a.len() == b.len() && sa == sb
}

/// Sheet pairs with a nonempty interface.
pub fn nonvanishing_pairs(set: &SheetedSet) -> PairSet {
    set.interfaces().into_iter().filter(|s| s.length >= EMPTY_INTERFACE).map(|s| s.pair).collect()
}

pub fn membership(set: &SheetedSet, family: &PairSet) -> bool {
    nonvanishing_pairs(set).is_disjoint(family)
}

/// Pairs `(p, q)` of nonvanishing interfaces that interleave.
pub fn split_violations(nonvanishing: &PairSet, m: usize) -> Vec<((usize, usize), (usize, usize))> {
    let mut out = Vec::new();
    for &p in nonvanishing {
        for &q in nonvanishing {
            if p < q && interleaved(p, q, m) {
                out.push((p, q));
            }
        }
    }
    out
}

/// Every edge split of `top` is an interval of the cyclic terminal order,
/// which is what a planar embedding with terminals in convex position needs.
pub fn is_cyclic_compatible(top: &SteinerTopology) -> bool {
    let m = top.m;
    top.edge_splits().into_iter().all(|s| (0..m).filter(|&i| (s >> i) & 1 != (s >> ((i + 1) % m)) & 1).count() == 2)
}

/// Steiner points at the average of their neighbours, terminals fixed.
pub fn barycentric_embedding(top: &SteinerTopology, config: &PointConfig) -> Network {
    let (m, k) = (top.m, top.k);
    let adj = top.adjacency();
    let mut steiner = Vec::with_capacity(k);
    if k > 0 {
        let mut mat = vec![0.0; k * k];
        let mut bx = vec![0.0; k];
        let mut by = vec![0.0; k];
        for s in 0..k {
            mat[s * k + s] = adj[m + s].len() as f64;
            for &w in &adj[m + s] {
                if w < m {
                    bx[s] += config.points[w].x;
                    by[s] += config.points[w].y;
                } else {
                    mat[s * k + (w - m)] -= 1.0;
                }
            }
        }
        let xs = solve_dense(&mut mat.clone(), &mut bx, k);
        let ys = solve_dense(&mut mat, &mut by, k);
        steiner = xs.into_iter().zip(ys).map(|(x, y)| Point2::new(x, y)).collect();
    }
    Network { terminals: config.points.clone(), steiner, edges: top.edges.clone() }
}

/// A planar class-T topology with its interface pattern and optimal geometry.
#[derive(Clone, Debug)]
pub struct ClassTEntry {
    pub topology: SteinerTopology,
    /// Embedding used to read off the interface pattern.
    pub embedding: Network,
    pub nonvanishing: PairSet,
    pub optimized: OptimizedNetwork,
}

/// All class-T topologies of a convex configuration.
#[derive(Clone, Debug)]
pub struct ClassTCatalogue {
    pub config: PointConfig,
    pub entries: Vec<ClassTEntry>,
    /// Topologies whose splits are not cyclic intervals.
    pub non_planar: usize,
}

impl ClassTCatalogue {
    pub fn build(cov: &CoveringSpace) -> Result<ClassTCatalogue, FamilyError> {
        let config = &cov.config;
        if config.convex_orientation().is_none() {
            return Err(FamilyError::NotConvex);
        }
        let all = enumerate_topologies(config.m(), None)?;
        let total = all.len();
        let mut entries = Vec::new();
        for topology in all.into_iter().filter(is_cyclic_compatible) {
            let embedding = barycentric_embedding(&topology, config);
            let set = network_to_sheeted_set(&embedding, cov)?;
            let optimized = optimize_topology(&topology, config)?;
            entries.push(ClassTEntry { topology, embedding, nonvanishing: nonvanishing_pairs(&set), optimized });
        }
        let non_planar = total - entries.len();
        Ok(ClassTCatalogue { config: config.clone(), entries, non_planar })
    }

    pub fn split_check(&self) -> SplitReport {
        let m = self.config.m();
        let violations = self
            .entries
            .iter()
            .enumerate()
            .flat_map(|(e, entry)| split_violations(&entry.nonvanishing, m).into_iter().map(move |(p, q)| (e, p, q)))
            .collect();
        SplitReport { checked: self.entries.len(), violations }
    }

    pub fn cover(&self, families: &[FamilyIndexSet]) -> CoverReport {
        let memberships: Vec<Vec<usize>> = self
            .entries
            .iter()
            .map(|e| (0..families.len()).filter(|&f| e.nonvanishing.is_disjoint(&families[f].pairs)).collect())
            .collect();
        let uncovered = (0..memberships.len()).filter(|&e| memberships[e].is_empty()).collect();
        CoverReport { checked: self.entries.len(), memberships, uncovered }
    }

    /// Shortest optimized network among topologies in the family.
    pub fn candidate(&self, family: &PairSet, cov: &CoveringSpace) -> Result<Candidate, FamilyError> {
        let mut best: Option<&ClassTEntry> = None;
        for e in self.entries.iter().filter(|e| e.nonvanishing.is_disjoint(family)) {
            if best.is_none_or(|b| e.optimized.length < b.optimized.length - TIE_TOL) {
                best = Some(e);
            }
        }
        let entry = best.ok_or_else(|| FamilyError::EmptyFamily(family.clone()))?;
        let ties = self
            .entries
            .iter()
            .filter(|e| e.nonvanishing.is_disjoint(family) && e.optimized.length <= entry.optimized.length + TIE_TOL)
            .count();
        let set = network_to_sheeted_set(&entry.optimized.network, cov)?;
        Ok(Candidate {
            topology: entry.topology.clone(),
            network: entry.optimized.network.clone(),
            length: entry.optimized.length,
            ties,
            set,
        })
    }
}

/// Catalogue entry and two interleaving nonvanishing pairs.
pub type SplitViolation = (usize, (usize, usize), (usize, usize));

#[derive(Clone, Debug, PartialEq)]
pub struct SplitReport {
    pub checked: usize,
    pub violations: Vec<SplitViolation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverReport {
    pub checked: usize,
    /// Families (0-based) containing each catalogue entry.
    pub memberships: Vec<Vec<usize>>,
    /// Catalogue entries in no family.
    pub uncovered: Vec<usize>,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.uncovered.is_empty()
    }
}

pub fn cover_check(cov: &CoveringSpace, families: &[FamilyIndexSet]) -> Result<CoverReport, FamilyError> {
    Ok(ClassTCatalogue::build(cov)?.cover(families))
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub topology: SteinerTopology,
    pub network: Network,
    pub length: f64,
    /// Topologies of the family reaching the same length.
    pub ties: usize,
    pub set: SheetedSet,
}

pub fn family_candidate(cov: &CoveringSpace, family: &PairSet) -> Result<Candidate, FamilyError> {
    ClassTCatalogue::build(cov)?.candidate(family, cov)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyCertificate {
    /// 1-based family index.
    pub family: usize,
    pub perimeter: f64,
    pub report: CalibrationReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WinnerReport {
    pub cover: CoverReport,
    pub certificates: Vec<FamilyCertificate>,
    pub min_perimeter: f64,
    /// 1-based indices of families reaching the minimum.
    pub winners: Vec<usize>,
    /// Perimeter excess of every other family.
    pub gaps: Vec<(usize, f64)>,
}

/// Certify the global minimum from one calibrated candidate per family.
pub fn minimality_driver(
    catalogue: &ClassTCatalogue,
    cov: &CoveringSpace,
    families: &[FamilyIndexSet],
    candidates: &[Option<SheetedSet>],
    fields: &[Option<SheetField>],
) -> Result<WinnerReport, FamilyError> {
    if candidates.len() != families.len() || fields.len() != families.len() {
        return Err(FamilyError::Arity {
            families: families.len(),
            candidates: candidates.len(),
            fields: fields.len(),
        });
    }
    let cover = catalogue.cover(families);
    if !cover.passed() {
        return Err(FamilyError::Uncovered(cover.uncovered.len()));
    }
    let mut certificates = Vec::with_capacity(families.len());
    for (k, fam) in families.iter().enumerate() {
        let family = k + 1;
        let set =
            candidates[k].as_ref().ok_or(FamilyError::IncompleteCertificate { family, reason: "missing candidate" })?;
        let field = fields[k].as_ref().ok_or(FamilyError::IncompleteCertificate { family, reason: "missing field" })?;
        if !membership(set, &fam.pairs) {
            return Err(FamilyError::IncompleteCertificate { family, reason: "candidate lies outside the family" });
        }
        let report = verify(field, set, cov, &fam.pairs)?;
        if !report.verdict {
            return Err(FamilyError::IncompleteCertificate { family, reason: "calibration check failed" });
        }
        certificates.push(FamilyCertificate { family, perimeter: set.perimeter(), report });
    }
    let min_perimeter = certificates.iter().map(|c| c.perimeter).fold(f64::INFINITY, f64::min);
    let winners = certificates.iter().filter(|c| c.perimeter <= min_perimeter + TIE_TOL).map(|c| c.family).collect();
    let gaps = certificates
        .iter()
        .filter(|c| c.perimeter > min_perimeter + TIE_TOL)
        .map(|c| (c.family, c.perimeter - min_perimeter))
        .collect();
    Ok(WinnerReport { cover, certificates, min_perimeter, winners, gaps })
}
