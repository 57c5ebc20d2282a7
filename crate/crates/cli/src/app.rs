//! Command-line surface: argument parsing, the subcommands and exit codes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use steiner_cover_core::calib::{verify_with, Tolerances};
use steiner_cover_core::covering::canonical_covering;
use steiner_cover_core::families::{
    declaration_consistent, diff_families, hexagon_declarations, hexagon_families_derived, hexagon_families_literal,
    hexagon_families_printed, minimality_driver, pentagon_families_derived, pentagon_families_printed, ClassTCatalogue,
    FamilyError, FamilyIndexSet, PairSet,
};
use steiner_cover_core::fixtures::{builtin, fixture_names, hexagon_config, pentagon_config};
use steiner_cover_core::sheets::SheetedSet;
use steiner_cover_core::steiner::{
    collect_minimizers, full_topologies, optimize_topology, SteinerError, MAX_TERMINALS,
};
use steiner_cover_core::EPS_GEO;

use crate::report::{
    calibration_json, calibration_text, diff_json, diff_text, pairs, pairs_text, CalTol, REPORT_SCHEMA,
};
use crate::scene::{self, fixture_scene, push_network_with_set, Scene, SceneFile};
use crate::svg::{render_strip, render_svg, StripItem, SvgOptions};

pub const THREADS_ENV: &str = "STEINER_COVER_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Input = 1,
    Cap = 2,
    VerifyFail = 3,
    Incomplete = 4,
}

/// A failure that ends the command with a message on stderr.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    fn input(message: impl std::fmt::Display) -> Self {
        Failure { exit: Exit::Input, message: message.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "steiner-cover", version, about = "Steiner trees through sheeted coverings: solve, certify and draw")]
pub struct Cli {
    /// Print the versioned JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Distance below which a label key counts as lying on an edge.
    #[arg(long, global = true, default_value_t = EPS_GEO)]
    pub tol_geo: f64,
    /// Tolerance on divergence, size margins and the equality check.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_cal: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Steiner minimal trees of the scene's configuration.
    Solve {
        /// Scene file, or `builtin:<fixture>`.
        scene: String,
        /// Write a scene with every minimizer and its sheeted set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Draw the minimizers side by side.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check that a field calibrates a set.
    Verify {
        scene: String,
        /// Exempt pairs: a family name or 1-based index in the scene, or a list such as `2-4,3-5`.
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value_t = 0)]
        set: usize,
        #[arg(long, default_value_t = 0)]
        field: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Compare printed and derived family lists and reconcile the printed ten-family field.
    Families,
    /// End-to-end minimality certificate for `pentagon` or `hexagon`.
    Driver {
        name: String,
        /// Summary figure; defaults to `driver-<name>.svg`.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Draw a scene.
    Render {
        scene: String,
        #[arg(long, alias = "svg")]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        set: usize,
        #[arg(long, default_value_t = 0)]
        field: usize,
        #[arg(long)]
        no_arrows: bool,
    },
    /// List the built-in fixtures, or write them as scene files.
    Fixtures {
        names: Vec<String>,
        /// Directory for `<fixture>.json` files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parse `args`, run the command and return the exit code. Output goes to
/// `out`, diagnostics to `err`.
pub fn main_with_args<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Input as i32 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    configure_threads();
    let mut text = String::new();
    let code = match run(&cli, &mut text) {
        Ok(exit) => exit as i32,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.exit as i32
        }
    };
    let _ = out.write_all(text.as_bytes());
    code
}

fn configure_threads() {
    let n = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    // A pool configured earlier in the same process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

pub fn run(cli: &Cli, out: &mut String) -> Result<Exit, Failure> {
    if !(cli.tol_geo > 0.0 && cli.tol_cal > 0.0) {
        return Err(Failure::input("tolerances must be positive"));
    }
    match &cli.command {
        Command::Solve { scene, out: scene_out, svg } => solve(cli, scene, scene_out.as_deref(), svg.as_deref(), out),
        Command::Verify { scene, family, set, field, svg } => {
            verify_cmd(cli, scene, family.as_deref(), *set, *field, svg.as_deref(), out)
        }
        Command::Families => families_cmd(cli, out),
        Command::Driver { name, svg } => driver_cmd(cli, name, svg.as_deref(), out),
        Command::Render { scene, out: path, set, field, no_arrows } => {
            let s = load_scene(scene, cli.tol_geo)?.1;
            let svg =
                render_svg(&s, &SvgOptions { set: *set, field: *field, arrows: !no_arrows, ..SvgOptions::default() });
            match path {
                Some(p) => {
                    write_file(p, &svg)?;
                    emit(
                        cli,
                        out,
                        &json!({"schema": REPORT_SCHEMA, "command": "render", "svg": p}),
                        format!("wrote {}\n", p.display()),
                    );
                }
                None => out.push_str(&svg),
            }
            Ok(Exit::Pass)
        }
        Command::Fixtures { names, out: dir } => fixtures_cmd(cli, names, dir.as_deref(), out),
    }
}

fn emit<T: Serialize>(cli: &Cli, out: &mut String, value: &T, text: String) {
    if cli.json {
        out.push_str(&serde_json::to_string_pretty(value).expect("report is serializable"));
        out.push('\n');
    } else {
        out.push_str(&text);
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Load a scene file or a `builtin:<fixture>` scene.
pub fn load_scene(arg: &str, tol_geo: f64) -> Result<(SceneFile, Scene), Failure> {
    let file = match arg.strip_prefix("builtin:") {
        Some(name) => fixture_scene(name).map_err(Failure::input)?,
        None => scene::load(Path::new(arg)).map_err(|e| Failure::input(format!("{arg}: {e}")))?,
    };
    let resolved = file.resolve(tol_geo).map_err(|e| Failure::input(format!("{arg}: {e}")))?;
    Ok((file, resolved))
}

fn solve(
    cli: &Cli,
    arg: &str,
    scene_out: Option<&Path>,
    svg: Option<&Path>,
    out: &mut String,
) -> Result<Exit, Failure> {
    let (file, s) = load_scene(arg, cli.tol_geo)?;
    let cfg = &s.covering.config;
    let m = cfg.m();
    if m > MAX_TERMINALS {
        return Err(Failure {
            exit: Exit::Cap,
            message: format!("{m} terminals exceed the exact-solver cap of {MAX_TERMINALS}"),
        });
    }
    let tops = full_topologies(m);
    let results = tops
        .par_iter()
        .map(|t| optimize_topology(t, cfg))
        .collect::<Result<Vec<_>, SteinerError>>()
        .map_err(|e| Failure { exit: Exit::Cap, message: format!("solver: {e}") })?;
    let sol = collect_minimizers(results);

    let mut text = String::new();
    let _ = writeln!(text, "solve: {m} terminals, {} full topologies", sol.topologies_evaluated);
    let _ = writeln!(text, "length {:.9}, {} minimizers", sol.length, sol.minimizers.len());
    let _ = writeln!(text, "P = 2 x length = {:.9}", 2.0 * sol.length);
    let mut nets = Vec::new();
    for (k, n) in sol.minimizers.iter().enumerate() {
        let edges: Vec<String> =
            n.edges.iter().map(|&(a, b)| format!("{}-{}", vertex_name(a, m), vertex_name(b, m))).collect();
        let steiner: Vec<String> = n.steiner.iter().map(|p| format!("({:.9}, {:.9})", p.x, p.y)).collect();
        let _ = writeln!(text, "minimizer {}: length {:.9}", k + 1, n.length());
        let _ = writeln!(text, "  edges   {}", edges.join(" "));
        if !steiner.is_empty() {
            let _ = writeln!(text, "  steiner {}", steiner.join(" "));
        }
        nets.push(json!({
            "length": n.length(),
            "steiner": n.steiner.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
            "edges": n.edges.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        }));
    }
    if let Some(path) = scene_out {
        let mut sc = SceneFile::new(cfg);
        sc.name = file.name.clone();
        sc.cuts = file.cuts.clone();
        for n in &sol.minimizers {
            push_network_with_set(&mut sc, n, &s.covering);
        }
        scene::save(&sc, path).map_err(Failure::input)?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    if let Some(path) = svg {
        let items: Vec<StripItem> = sol
            .minimizers
            .iter()
            .enumerate()
            .map(|(k, n)| StripItem {
                title: format!("minimizer {}", k + 1),
                subtitle: format!("length {:.6}", n.length()),
                network: Some(n.clone()),
                highlight: true,
            })
            .collect();
        write_file(path, &render_strip(&s.covering, &items, 6))?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    let report = json!({
        "schema": REPORT_SCHEMA,
        "command": "solve",
        "terminals": m,
        "topologies": sol.topologies_evaluated,
        "length": sol.length,
        "perimeter": 2.0 * sol.length,
        "minimizers": nets,
    });
    emit(cli, out, &report, text);
    Ok(Exit::Pass)
}

fn vertex_name(v: usize, m: usize) -> String {
    if v < m {
        format!("p{}", v + 1)
    } else {
        format!("s{}", v - m + 1)
    }
}

/// Exempt pairs named by `--family`.
fn select_family(s: &Scene, arg: &str) -> Result<PairSet, Failure> {
    if let Some((_, p)) = s.families.iter().find(|(n, _)| n == arg) {
        return Ok(p.clone());
    }
    if let Ok(k) = arg.parse::<usize>() {
        return s
            .families
            .get(k.wrapping_sub(1))
            .map(|f| f.1.clone())
            .ok_or_else(|| Failure::input(format!("scene has no family {k}")));
    }
    let m = s.covering.m();
    let mut set = PairSet::new();
    for item in arg.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parsed = item
            .split_once('-')
            .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)));
        match parsed {
            Some((a, b)) if a != b && (1..=m).contains(&a) && (1..=m).contains(&b) => {
                set.insert((a.min(b), a.max(b)));
            }
            _ => {
                return Err(Failure::input(format!(
                    "--family {arg:?}: expected a family name, an index or pairs like 2-4,3-5"
                )))
            }
        }
    }
    Ok(set)
}

fn verify_cmd(
    cli: &Cli,
    arg: &str,
    family: Option<&str>,
    set_idx: usize,
    field_idx: usize,
    svg: Option<&Path>,
    out: &mut String,
) -> Result<Exit, Failure> {
    let (_, s) = load_scene(arg, cli.tol_geo)?;
    let set = s
        .sets
        .get(set_idx)
        .ok_or_else(|| Failure::input(format!("{arg}: no set {set_idx}; verify needs a sets block")))?;
    let field = s
        .fields
        .get(field_idx)
        .ok_or_else(|| Failure::input(format!("{arg}: no field {field_idx}; verify needs a fields block")))?;
    let exempt = match family {
        Some(f) => select_family(&s, f)?,
        None => PairSet::new(),
    };
    let tol = CalTol(cli.tol_cal);
    let rep = verify_with(field, set, &s.covering, &exempt, &Tolerances::uniform(cli.tol_cal))
        .map_err(|e| Failure { exit: Exit::Incomplete, message: format!("verify: {e}") })?;
    let mut text = String::new();
    let _ = writeln!(text, "verify: {} (set {set_idx}, field {field_idx})", s.name.as_deref().unwrap_or(arg));
    text.push_str(&calibration_text(&rep, tol));
    let reconciliation = s.note.is_some() && !rep.verdict;
    if let Some(note) = &s.note {
        let _ = writeln!(text, "note: {note}");
        if reconciliation {
            let _ = writeln!(text, "outcome: reconciliation case (documented mismatch, not a certificate)");
        }
    }
    if let Some(path) = svg {
        let opts = SvgOptions { set: set_idx, field: field_idx, ..SvgOptions::default() };
        write_file(path, &render_svg(&s, &opts))?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    let report = json!({
        "schema": REPORT_SCHEMA,
        "command": "verify",
        "scene": s.name.as_deref().unwrap_or(arg),
        "tolerance": cli.tol_cal,
        "report": calibration_json(&rep, tol),
        "note": s.note,
        "reconciliation": reconciliation,
    });
    emit(cli, out, &report, text);
    Ok(if rep.verdict { Exit::Pass } else { Exit::VerifyFail })
}

fn families_cmd(cli: &Cli, out: &mut String) -> Result<Exit, Failure> {
    let pent = diff_families(&pentagon_families_printed(), &pentagon_families_derived());
    let hex = diff_families(&hexagon_families_printed(), &hexagon_families_derived());
    let lit = diff_families(&hexagon_families_printed(), &hexagon_families_literal());
    let inconsistent: Vec<usize> = hexagon_declarations(true)
        .iter()
        .enumerate()
        .filter(|(_, d)| !declaration_consistent(d, 6))
        .map(|(k, _)| k + 1)
        .collect();

    let covers = [
        ("pentagon", pentagon_config(), pentagon_families_printed()),
        ("hexagon-derived", hexagon_config(), hexagon_families_derived()),
        ("hexagon-literal", hexagon_config(), hexagon_families_literal()),
    ];
    let cover_results: Vec<(usize, usize)> = covers
        .par_iter()
        .map(|(_, cfg, fams)| {
            let cov = canonical_covering(cfg).map_err(|e| e.to_string())?;
            let cat = ClassTCatalogue::build(&cov).map_err(|e| e.to_string())?;
            let c = cat.cover(fams);
            Ok((c.checked, c.uncovered.len()))
        })
        .collect::<Result<_, String>>()
        .map_err(|e| Failure { exit: Exit::Incomplete, message: format!("cover check: {e}") })?;

    let fx = builtin("hexagon-10-printed").map_err(|e| Failure::input(e.to_string()))?;
    let cov = fx.covering().map_err(|e| Failure::input(e.to_string()))?;
    let field = fx.field(&cov).map_err(|e| Failure::input(e.to_string()))?;
    let set = fx.set(&cov).map_err(|e| Failure::input(e.to_string()))?;
    let tol = Tolerances::uniform(cli.tol_cal);
    let fail =
        |e: steiner_cover_core::calib::CalibError| Failure { exit: Exit::Incomplete, message: format!("verify: {e}") };
    let printed_ten = verify_with(&field, &set, &cov, &fx.family, &tol).map_err(fail)?;
    let seven = &hexagon_families_printed()[6].pairs;
    let printed_seven = verify_with(&field, &set, &cov, seven, &tol).map_err(fail)?;

    let mut text = String::new();
    text.push_str(&diff_text("pentagon: printed vs derived", &pent));
    let reordered = pent.iter().filter(|d| !d.index_match() && d.same_as_derived.is_some()).count();
    if reordered > 0 {
        let _ = writeln!(text, "  {reordered} families differ only in order");
    }
    text.push_str(&diff_text("hexagon: printed vs derived (consistent refinements)", &hex));
    text.push_str(&diff_text("hexagon: printed vs derived (literal refinements)", &lit));
    let _ = writeln!(text, "  literal declarations with interleaving chords: families {inconsistent:?}");
    let _ = writeln!(text, "cover check");
    for ((name, _, _), (checked, uncovered)) in covers.iter().zip(&cover_results) {
        let _ = writeln!(text, "  {name:<16} {checked} planar topologies, {uncovered} uncovered");
    }
    let _ = writeln!(text, "reconciliation case: printed ten-family field");
    let _ = writeln!(text, "  against printed family 10 {}", pairs_text(&fx.family));
    for v in printed_ten.margins.violations() {
        let _ = writeln!(text, "    violation ({},{}) = {:.12}", v.pair.0, v.pair.1, v.max);
    }
    let _ = writeln!(text, "    verdict {}", if printed_ten.verdict { "pass" } else { "fail" });
    let _ = writeln!(text, "  against printed family 7 {}", pairs_text(seven));
    let _ = writeln!(text, "    verdict {}", if printed_seven.verdict { "pass" } else { "fail" });
    if let Some(note) = fx.note {
        let _ = writeln!(text, "  note: {note}");
    }

    let report = json!({
        "schema": REPORT_SCHEMA,
        "command": "families",
        "pentagon": pent.iter().map(diff_json).collect::<Vec<_>>(),
        "hexagon_consistent": hex.iter().map(diff_json).collect::<Vec<_>>(),
        "hexagon_literal": lit.iter().map(diff_json).collect::<Vec<_>>(),
        "literal_inconsistent_declarations": inconsistent,
        "cover": covers.iter().zip(&cover_results).map(|((n, _, _), (c, u))| json!({"lists": n, "checked": c, "uncovered": u})).collect::<Vec<_>>(),
        "reconciliation": {
            "label": "reconciliation case",
            "family": pairs(&fx.family),
            "report": calibration_json(&printed_ten, CalTol(cli.tol_cal)),
            "passes_with_family_7": printed_seven.verdict,
            "note": fx.note,
        },
    });
    emit(cli, out, &report, text);
    Ok(Exit::Pass)
}

fn driver_cmd(cli: &Cli, name: &str, svg: Option<&Path>, out: &mut String) -> Result<Exit, Failure> {
    type FixtureName = fn(usize) -> String;
    let (config, families, fixture_name): (_, Vec<FamilyIndexSet>, FixtureName) = match name {
        "pentagon" => (pentagon_config(), pentagon_families_printed(), |i| format!("pentagon({i})")),
        "hexagon" => (hexagon_config(), hexagon_families_derived(), |i| format!("hexagon-{i}")),
        _ => {
            return Err(Failure::input(format!("unknown driver configuration {name:?}; expected pentagon or hexagon")))
        }
    };
    let stage =
        |stage: &str, e: &dyn std::fmt::Display| Failure { exit: Exit::Incomplete, message: format!("{stage}: {e}") };
    let cov = canonical_covering(&config).map_err(|e| stage("covering", &e))?;
    let catalogue = ClassTCatalogue::build(&cov).map_err(|e| stage("catalogue", &e))?;
    let per_family: Vec<_> = families
        .par_iter()
        .enumerate()
        .map(|(k, f)| {
            let cand = catalogue.candidate(&f.pairs, &cov).map_err(|e| stage(&format!("candidate {}", k + 1), &e))?;
            let field = builtin(&fixture_name(k + 1))
                .and_then(|fx| fx.field(&cov))
                .map_err(|e| stage(&format!("field {}", k + 1), &e))?;
            Ok((cand, field))
        })
        .collect::<Result<_, Failure>>()?;
    let sets: Vec<Option<SheetedSet>> = per_family.iter().map(|(c, _)| Some(c.set.clone())).collect();
    let fields: Vec<_> = per_family.iter().map(|(_, f)| Some(f.clone())).collect();
    let report = minimality_driver(&catalogue, &cov, &families, &sets, &fields).map_err(|e| match e {
        FamilyError::Uncovered(_) => stage("cover check", &e),
        FamilyError::IncompleteCertificate { .. } => stage("certificate", &e),
        _ => stage("verification", &e),
    })?;

    let mut text = String::new();
    let _ = writeln!(text, "driver: {name}, {} families", families.len());
    let _ = writeln!(
        text,
        "cover check: {} planar topologies, {} uncovered",
        report.cover.checked,
        report.cover.uncovered.len()
    );
    for c in &report.certificates {
        let status = if report.winners.contains(&c.family) {
            "winner".to_string()
        } else {
            let gap = report.gaps.iter().find(|g| g.0 == c.family).map_or(0.0, |g| g.1);
            format!("gap +{gap:.9}")
        };
        let _ = writeln!(
            text,
            "  family {:>2}  {}  P = {:.9}  calibration {}  {status}",
            c.family,
            pairs_text(&families[c.family - 1].pairs),
            c.perimeter,
            if c.report.verdict { "pass" } else { "fail" }
        );
    }
    let conclusion = if report.winners.len() == families.len() {
        format!(
            "all {} family minimizers tie at P = {:.9}; each is a global minimizer",
            families.len(),
            report.min_perimeter
        )
    } else {
        format!(
            "global minimizers: families {:?} at P = {:.9}; every other family is strictly longer",
            report.winners, report.min_perimeter
        )
    };
    let _ = writeln!(text, "conclusion: {conclusion}");

    let path = svg.map_or_else(|| PathBuf::from(format!("driver-{name}.svg")), Path::to_path_buf);
    let items: Vec<StripItem> = report
        .certificates
        .iter()
        .zip(&per_family)
        .map(|(c, (cand, _))| StripItem {
            title: format!("family {} {}", c.family, pairs_text(&families[c.family - 1].pairs)),
            subtitle: format!("P = {:.6}", c.perimeter),
            network: Some(cand.network.clone()),
            highlight: report.winners.contains(&c.family),
        })
        .collect();
    write_file(&path, &render_strip(&cov, &items, 7))?;
    let _ = writeln!(text, "wrote {}", path.display());

    let json_report = json!({
        "schema": REPORT_SCHEMA,
        "command": "driver",
        "configuration": name,
        "cover": {"checked": report.cover.checked, "uncovered": report.cover.uncovered.len()},
        "families": report.certificates.iter().map(|c| json!({
            "family": c.family,
            "pairs": pairs(&families[c.family - 1].pairs),
            "perimeter": c.perimeter,
            "report": calibration_json(&c.report, CalTol(cli.tol_cal)),
        })).collect::<Vec<_>>(),
        "min_perimeter": report.min_perimeter,
        "winners": report.winners,
        "gaps": report.gaps.iter().map(|g| json!({"family": g.0, "gap": g.1})).collect::<Vec<_>>(),
        "conclusion": conclusion,
        "svg": path,
    });
    emit(cli, out, &json_report, text);
    Ok(Exit::Pass)
}

/// File name for a fixture: parentheses and slashes become dashes.
pub fn fixture_file_name(name: &str) -> String {
    let mut s: String = name.chars().map(|c| if matches!(c, '(' | ')' | '/' | ' ') { '-' } else { c }).collect();
    while s.contains("--") {
        s = s.replace("--", "-");
    }
    format!("{}.json", s.trim_end_matches('-'))
}

fn fixtures_cmd(cli: &Cli, names: &[String], dir: Option<&Path>, out: &mut String) -> Result<Exit, Failure> {
    let names: Vec<String> = if names.is_empty() { fixture_names() } else { names.to_vec() };
    let Some(dir) = dir else {
        let mut text = String::new();
        for n in &names {
            let fx = builtin(n).map_err(|e| Failure::input(e.to_string()))?;
            let _ = writeln!(text, "{n:<28} m = {}  exempt {}", fx.config.m(), pairs_text(&fx.family));
        }
        emit(cli, out, &json!({"schema": REPORT_SCHEMA, "command": "fixtures", "names": names}), text);
        return Ok(Exit::Pass);
    };
    std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    let scenes: Vec<(String, String)> = names
        .par_iter()
        .map(|n| {
            fixture_scene(n)
                .map(|s| (fixture_file_name(n), s.to_json()))
                .map_err(|e| Failure::input(format!("{n}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let mut text = String::new();
    for (file, body) in &scenes {
        let path = dir.join(file);
        write_file(&path, body)?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    let files: Vec<&String> = scenes.iter().map(|(f, _)| f).collect();
    emit(cli, out, &json!({"schema": REPORT_SCHEMA, "command": "fixtures", "written": files}), text);
    Ok(Exit::Pass)
}
