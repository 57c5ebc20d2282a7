use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use steiner_cover::app::fixture_file_name;
use steiner_cover::scene::{fixture_scene, SceneFile};
use steiner_cover::svg::{render_svg, SvgOptions};
use steiner_cover_core::fixtures::fixture_names;
use steiner_cover_core::EPS_GEO;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_steiner-cover"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    repo().join("fixtures").join(fixture_file_name(name)).display().to_string()
}

fn write_scene(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn checked_in_fixtures_match_the_builtins() {
    for name in fixture_names() {
        let text = std::fs::read_to_string(fixture(&name)).unwrap();
        assert_eq!(
            text,
            fixture_scene(&name).unwrap().to_json(),
            "{name}: regenerate with `steiner-cover fixtures --out fixtures`"
        );
    }
}

#[test]
fn solve_reports_minimizers() {
    let o = run(&["solve", &fixture("hexagon-1")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("length 5.000000000, 6 minimizers"), "{}", stdout(&o));

    let dir = tempfile::tempdir().unwrap();
    let two = write_scene(dir.path(), "two.json", r#"{"version": "steiner-cover/1", "config": [[0, 0], [3, 0]]}"#);
    let o = run(&["solve", &two, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "steiner-cover-report/1");
    assert_eq!(v["length"], 3.0);

    let nine: Vec<String> =
        (0..9).map(|k| format!("[{}, {}]", (k as f64 * 0.7).cos(), (k as f64 * 0.7).sin())).collect();
    let nine = write_scene(
        dir.path(),
        "nine.json",
        &format!(r#"{{"version": "steiner-cover/1", "config": [{}]}}"#, nine.join(",")),
    );
    let o = run(&["solve", &nine]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn solve_writes_a_loadable_scene() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sq.json");
    let o = run(&["solve", &fixture("square"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let scene = steiner_cover::scene::load(&out).unwrap();
    assert_eq!(scene.networks.len(), 2);
    assert_eq!(scene.sets.len(), 2);
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify", &fixture("triangle-equilateral")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = run(&["verify", &fixture("pentagon(5)")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("|Φ^2 - Φ^5| = 4.000000000"), "{}", stdout(&o));

    let o = run(&["verify", &fixture("pentagon(5)"), "--family", "J"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", &fixture("pentagon(5)"), "--family", "2-4,2-5,3-5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["verdict"], true);

    let dir = tempfile::tempdir().unwrap();
    let bare =
        write_scene(dir.path(), "bare.json", r#"{"version": "steiner-cover/1", "config": [[0, 0], [1, 0], [0, 1]]}"#);
    let o = run(&["verify", &bare]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sets block"), "{}", stderr(&o));
}

#[test]
fn tolerance_flag_changes_the_verdict() {
    // The printed ten-family field exceeds the bound by √12 − 2; a huge
    // tolerance accepts it, the default does not.
    let f = fixture("hexagon-10-printed");
    assert_eq!(run(&["verify", &f, "--family", "J"]).status.code(), Some(3));
    assert_eq!(run(&["verify", &f, "--family", "J", "--tol-cal", "2"]).status.code(), Some(0));
    assert_eq!(run(&["verify", &f, "--tol-cal", "-1"]).status.code(), Some(1));
}

#[test]
fn schema_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_scene(
        dir.path(),
        "bad.json",
        "{\n  \"version\": \"steiner-cover/1\",\n  \"config\": [[0, 0], [1, 0], [0, 1]],\n  \"families\": [{\"name\": \"J\", \"pairs\": [[1, 1]]}]\n}\n",
    );
    let o = run(&["render", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
    let o = run(&["render", &dir.path().join("missing.json").display().to_string()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["driver", "heptagon"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn driver_output_is_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for threads in ["1", "4"] {
        let svg = dir.path().join(format!("d{threads}.svg"));
        let o = bin()
            .env("STEINER_COVER_THREADS", threads)
            .args(["driver", "pentagon", "--json", "--svg", svg.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let mut v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["winners"].as_array().unwrap().len(), 5);
        v["svg"] = serde_json::Value::Null;
        outs.push((v, std::fs::read_to_string(&svg).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn families_report_labels_the_reconciliation() {
    let o = run(&["families", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reconciliation"]["label"], "reconciliation case");
    let lit: Vec<u64> = v["hexagon_literal"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|d| d["index_match"] == false)
        .map(|d| d["index"].as_u64().unwrap())
        .collect();
    assert_eq!(lit, vec![7, 8, 9, 10, 11, 12]);
}

#[test]
fn render_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    assert_eq!(run(&["render", &fixture("pentagon(1)"), "--out", a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(run(&["render", &fixture("pentagon(1)"), "--out", b.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

/// Compare against `tests/golden/<name>`; set `UPDATE_GOLDEN=1` to rewrite.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert!(expected == actual, "{name} differs from the golden file");
}

#[test]
fn golden_figures() {
    let pent = SceneFile::from_json(&std::fs::read_to_string(fixture("pentagon(1)")).unwrap()).unwrap();
    golden("pentagon-1.svg", &render_svg(&pent.resolve(EPS_GEO).unwrap(), &SvgOptions::default()));
    let dots = SceneFile::from_json(
        r#"{"version": "steiner-cover/1", "name": "square", "config": [[0,0],[1,0],[1,1],[0,1]]}"#,
    )
    .unwrap();
    golden("square-config.svg", &render_svg(&dots.resolve(EPS_GEO).unwrap(), &SvgOptions::default()));

    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("hex.svg");
    let o = run(&["driver", "hexagon", "--svg", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    golden("driver-hexagon.svg", &std::fs::read_to_string(svg).unwrap());
}
