//! Versioned JSON reports and their plain-text renderings.

use std::fmt::Write as _;

use serde::Serialize;

use steiner_cover_core::calib::CalibrationReport;
use steiner_cover_core::families::{FamilyDiffEntry, PairSet};

pub const REPORT_SCHEMA: &str = "steiner-cover-report/1";

pub fn pairs(set: &PairSet) -> Vec<[usize; 2]> {
    set.iter().map(|&(a, b)| [a, b]).collect()
}

pub fn pairs_text(set: &PairSet) -> String {
    let items: Vec<String> = set.iter().map(|(a, b)| format!("({a},{b})")).collect();
    format!("{{{}}}", items.join(", "))
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginJson {
    pub pair: [usize; 2],
    pub max: f64,
    pub exempt: bool,
    pub violated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationJson {
    pub verdict: bool,
    pub conclusion: String,
    /// First failing condition, worst size violation first among margins.
    pub failure: Option<String>,
    pub constraints_ok: bool,
    pub divergence: f64,
    pub margins: Vec<MarginJson>,
    pub exempt: Vec<[usize; 2]>,
    pub integral: f64,
    pub perimeter: f64,
    pub equality_residual: f64,
}

/// Tolerance used for the calibration verdict, to phrase failures.
#[derive(Clone, Copy, Debug)]
pub struct CalTol(pub f64);

/// The condition that decides a failed verdict, in checking order:
/// constraints, divergence, the largest size violation, then equality.
pub fn dominating_failure(r: &CalibrationReport, tol: CalTol) -> Option<String> {
    if r.verdict {
        return None;
    }
    if !r.constraints_ok {
        return Some("constraints: the set is not a constrained set".into());
    }
    if r.divergence > tol.0 {
        return Some(format!("divergence: normal-trace jump {:.3e} exceeds {:.1e}", r.divergence, tol.0));
    }
    let worst = r.margins.violations().into_iter().max_by(|a, b| a.max.total_cmp(&b.max).then(b.pair.cmp(&a.pair)));
    if let Some(v) = worst {
        let (i, j) = v.pair;
        return Some(format!("size bound: |Φ^{i} - Φ^{j}| = {:.9} exceeds 2 on pair ({i},{j})", v.max));
    }
    Some(format!("equality: |∫Φ·Dχ - P| = {:.3e} exceeds {:.1e}·P", r.equality_residual, tol.0))
}

pub fn calibration_json(r: &CalibrationReport, tol: CalTol) -> CalibrationJson {
    let violated: Vec<(usize, usize)> = r.margins.violations().iter().map(|v| v.pair).collect();
    CalibrationJson {
        verdict: r.verdict,
        conclusion: r.conclusion().to_string(),
        failure: dominating_failure(r, tol),
        constraints_ok: r.constraints_ok,
        divergence: r.divergence,
        margins: r
            .margins
            .entries
            .iter()
            .map(|e| MarginJson {
                pair: [e.pair.0, e.pair.1],
                max: e.max,
                exempt: e.exempt,
                violated: violated.contains(&e.pair),
            })
            .collect(),
        exempt: pairs(&r.exempt),
        integral: r.integral,
        perimeter: r.perimeter,
        equality_residual: r.equality_residual,
    }
}

pub fn calibration_text(r: &CalibrationReport, tol: CalTol) -> String {
    let mut s = String::new();
    let ok = |b: bool| if b { "ok" } else { "FAIL" };
    let _ = writeln!(s, "  exempt pairs      {}", pairs_text(&r.exempt));
    let _ = writeln!(s, "  constraints       {}", ok(r.constraints_ok));
    let _ = writeln!(s, "  divergence        {:.3e}  {}", r.divergence, ok(r.divergence <= tol.0));
    let _ = writeln!(s, "  size margins");
    let violated: Vec<(usize, usize)> = r.margins.violations().iter().map(|v| v.pair).collect();
    for e in &r.margins.entries {
        let tag = if e.exempt {
            "exempt"
        } else if violated.contains(&e.pair) {
            "VIOLATED"
        } else {
            ""
        };
        let _ = writeln!(s, "    ({},{})  {:.12}  {tag}", e.pair.0, e.pair.1, e.max);
    }
    let _ = writeln!(s, "  integral          {:.12}", r.integral);
    let _ = writeln!(s, "  perimeter         {:.12}", r.perimeter);
    let _ = writeln!(s, "  equality residual {:.3e}", r.equality_residual);
    match dominating_failure(r, tol) {
        None => {
            let _ = writeln!(s, "verdict: pass ({})", r.conclusion());
        }
        Some(f) => {
            let _ = writeln!(s, "verdict: fail ({f})");
        }
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffJson {
    pub index: usize,
    pub printed: Vec<[usize; 2]>,
    pub derived: Option<Vec<[usize; 2]>>,
    pub index_match: bool,
    pub same_as_derived: Option<usize>,
    pub only_printed: Vec<[usize; 2]>,
    pub only_derived: Vec<[usize; 2]>,
}

pub fn diff_json(d: &FamilyDiffEntry) -> DiffJson {
    DiffJson {
        index: d.index,
        printed: pairs(&d.printed),
        derived: d.derived.as_ref().map(pairs),
        index_match: d.index_match(),
        same_as_derived: d.same_as_derived,
        only_printed: pairs(&d.only_printed()),
        only_derived: pairs(&d.only_derived()),
    }
}

pub fn diff_text(title: &str, diff: &[FamilyDiffEntry]) -> String {
    let mut s = String::new();
    let differing: Vec<usize> = diff.iter().filter(|d| !d.index_match()).map(|d| d.index).collect();
    let _ = writeln!(s, "{title}");
    if differing.is_empty() {
        let _ = writeln!(s, "  all {} families agree index by index", diff.len());
    }
    for d in diff {
        if d.index_match() {
            continue;
        }
        let same = match d.same_as_derived {
            Some(k) => format!("same set as derived {k}"),
            None => "no derived family has this set".into(),
        };
        let _ = writeln!(
            s,
            "  family {:>2}: printed {}  derived {}  printed only {}  derived only {}  ({same})",
            d.index,
            pairs_text(&d.printed),
            d.derived.as_ref().map_or("-".into(), pairs_text),
            pairs_text(&d.only_printed()),
            pairs_text(&d.only_derived()),
        );
    }
    s
}
