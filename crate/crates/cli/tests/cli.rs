use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use trailrank_core::geo::io::route_to_line;
use trailrank_core::geo::{Point2D, RoutePolyline};

fn trailrank(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trailrank"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "info")
        .env_remove("TRAILRANK_WORKDIR")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config(dir: &Path, extra: &str) {
    std::fs::write(dir.join("trailrank.toml"), format!("[synth]\nseed = 4\nn_routes = 100\n{extra}")).unwrap();
}

#[test]
fn all_produces_one_curve_per_query_attribute_pair() {
    let dir = tempfile::tempdir().unwrap();
    config(dir.path(), "");
    let out = trailrank(dir.path(), &["all"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let work = dir.path().join("work");
    let mut rdr = csv::Reader::from_path(work.join("curves.csv")).unwrap();
    let mut pairs = BTreeSet::new();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        pairs.insert((rec[0].to_string(), rec[1].to_string()));
        rows += 1;
    }
    assert_eq!(pairs.len(), 46);
    assert_eq!(rows, 46 * 100);
    assert_eq!(std::fs::read_dir(work.join("plots")).unwrap().count(), 10);
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(work.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["curves"].as_array().unwrap().len(), 46);
    assert_eq!(report["provider"]["model_name"], "reference-trigram-256");
    assert!(!work.join(".trailrank.lock").exists());
}

#[test]
fn rerun_skips_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    config(dir.path(), "");
    assert_eq!(trailrank(dir.path(), &["all"]).status.code(), Some(0));
    let curves = dir.path().join("work/curves.csv");
    let before = std::fs::metadata(&curves).unwrap().modified().unwrap();

    let again = trailrank(dir.path(), &["all"]);
    assert_eq!(again.status.code(), Some(0));
    let log = stderr(&again);
    for stage in ["synth", "attributes", "describe", "embed", "rank", "evaluate"] {
        assert!(log.contains(&format!("{stage}: skipped")), "{stage} not skipped:\n{log}");
    }
    assert_eq!(std::fs::metadata(&curves).unwrap().modified().unwrap(), before);

    let forced = trailrank(dir.path(), &["evaluate", "--force"]);
    assert_eq!(forced.status.code(), Some(0));
    assert!(!stderr(&forced).contains("evaluate: skipped"));
}

#[test]
fn short_route_is_filtered_and_logged() {
    let dir = tempfile::tempdir().unwrap();
    config(dir.path(), "");
    assert_eq!(trailrank(dir.path(), &["synth"]).status.code(), Some(0));

    let routes = dir.path().join("work/corpus/routes.geojsonl");
    let short = RoutePolyline::new(
        "short-900",
        vec![Point2D::new(1000.0, 90.0), Point2D::new(1500.0, 90.0), Point2D::new(1900.0, 90.0)],
    )
    .unwrap();
    let mut text = std::fs::read_to_string(&routes).unwrap();
    text.push_str(&route_to_line(&short));
    text.push('\n');
    std::fs::write(&routes, text).unwrap();

    let out = trailrank(dir.path(), &["attributes"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("route short-900 rejected: TooShort"), "{}", stderr(&out));
    let attrs = std::fs::read_to_string(dir.path().join("work/attributes.csv")).unwrap();
    assert!(!attrs.contains("short-900"));
    assert_eq!(attrs.lines().count(), 101);
    let rejected = std::fs::read_to_string(dir.path().join("work/rejected.csv")).unwrap();
    assert!(rejected.contains("short-900,TooShort"));
}

#[test]
fn workdir_env_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let elsewhere = tempfile::tempdir().unwrap();
    config(dir.path(), "");
    let out = Command::new(env!("CARGO_BIN_EXE_trailrank"))
        .args(["synth"])
        .current_dir(dir.path())
        .env("TRAILRANK_WORKDIR", elsewhere.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(elsewhere.path().join("corpus/routes.geojsonl").exists());
    assert!(!dir.path().join("work").exists());
}

#[test]
fn thin_flag_limits_rows() {
    let dir = tempfile::tempdir().unwrap();
    config(dir.path(), "[evaluate]\nmax_rows = 8\n");
    assert_eq!(trailrank(dir.path(), &["all", "--thin"]).status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(dir.path().join("work/curves.csv")).unwrap();
    let mut ranks: std::collections::BTreeMap<(String, String), Vec<usize>> = Default::default();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        ranks.entry((rec[0].to_string(), rec[1].to_string())).or_default().push(rec[2].parse().unwrap());
    }
    assert_eq!(ranks.len(), 46);
    for ks in ranks.values() {
        assert!(ks.len() <= 8, "{ks:?}");
        assert_eq!((ks[0], *ks.last().unwrap()), (1, 100));
    }
}

#[test]
fn jobs_and_seed_flags() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    config(a.path(), "");
    config(b.path(), "");
    assert_eq!(trailrank(a.path(), &["all", "--jobs", "1"]).status.code(), Some(0));
    assert_eq!(trailrank(b.path(), &["all", "--jobs", "3"]).status.code(), Some(0));
    let read = |d: &Path| std::fs::read(d.join("work/curves.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));

    let c = tempfile::tempdir().unwrap();
    config(c.path(), "");
    assert_eq!(trailrank(c.path(), &["synth", "--seed", "5"]).status.code(), Some(0));
    let routes = |d: &Path| std::fs::read(d.join("work/corpus/routes.geojsonl")).unwrap();
    assert_ne!(routes(a.path()), routes(c.path()));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(trailrank(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(trailrank(dir.path(), &["all", "--config", "missing.toml"]).status.code(), Some(1));
    std::fs::write(dir.path().join("bad.toml"), "[paths]\nroutez = \"x\"\n").unwrap();
    assert_eq!(trailrank(dir.path(), &["all", "--config", "bad.toml"]).status.code(), Some(1));
    assert_eq!(trailrank(dir.path(), &["synth"]).status.code(), Some(1));
    assert_eq!(trailrank(dir.path(), &["--help"]).status.code(), Some(0));

    // data: no routes to read
    let out = trailrank(dir.path(), &["attributes"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("attributes:"), "{}", stderr(&out));

    // data: malformed record names the line
    config(dir.path(), "");
    assert_eq!(trailrank(dir.path(), &["synth"]).status.code(), Some(0));
    let routes = dir.path().join("work/corpus/routes.geojsonl");
    let mut text = std::fs::read_to_string(&routes).unwrap();
    text.push_str("{\"id\": \"broken\"}\n");
    std::fs::write(&routes, text).unwrap();
    let out = trailrank(dir.path(), &["attributes"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 101"), "{}", stderr(&out));

    // provider: unreachable remote service
    let remote = tempfile::tempdir().unwrap();
    config(
        remote.path(),
        "[provider]\nkind = \"remote\"\nendpoint = \"http://127.0.0.1:1/embed\"\nmodel_name = \"m\"\nretries = 0\ntimeout_secs = 2\n",
    );
    let out = trailrank(remote.path(), &["all"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("embed:"));
}
