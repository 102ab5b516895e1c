use std::path::Path;
use std::process::{Command, Output};

fn ffcircle(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffcircle"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

fn manifest(out: &Path, name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(out.join(name).join("manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn count_matches_delta_reconstruction() {
    let dir = tempfile::tempdir().unwrap();
    let o = ffcircle(
        dir.path(),
        &[
            "count", "--q", "3", "--nu", "-1", "--g", "1", "--f", "t", "--lambda", "0,0,0,0",
        ],
    );
    assert!(o.status.success(), "{o:?}");
    let s = stdout(&o);
    assert_eq!(field(&s, "count"), "16");
    assert_eq!(field(&s, "delta_closed"), "16");
    assert_eq!(field(&s, "delta_direct"), "16");
    assert_eq!(field(&s, "match"), "true");
    let m = manifest(dir.path(), "count");
    assert_eq!(m["results"]["count"], 16);
    assert_eq!(m["revision"], ffcircle::REVISION);
    assert_eq!(m["config"]["command"]["Count"]["inst"]["f"], "t");
}

#[test]
fn instance_file_gives_the_same_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    std::fs::write(
        &path,
        r#"{"q":3,"nu":"-1","f":"t","g":"1","lambda":["0","0","0","0"]}"#,
    )
    .unwrap();
    let o = ffcircle(
        dir.path(),
        &[
            "count",
            "--instance",
            path.to_str().unwrap(),
            "--method",
            "direct",
        ],
    );
    assert!(o.status.success(), "{o:?}");
    assert_eq!(field(&stdout(&o), "delta_direct"), "16");
}

#[test]
fn graph_build_then_distance_from_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = ffcircle(
        dir.path(),
        &["graph", "build", "--q", "3", "--g", "t^2+t+2"],
    );
    assert!(o.status.success(), "{o:?}");
    assert_eq!(field(&stdout(&o), "vertices"), "720");
    let edges = std::fs::read_to_string(dir.path().join("graph/edges.txt")).unwrap();
    assert_eq!(edges.lines().count(), 720 * 4 / 2);
    let header: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("graph/header.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(header["generators"].as_array().unwrap().len(), 4);

    let o = ffcircle(
        dir.path(),
        &["graph", "distance", "--from", "I", "--to", "W"],
    );
    assert!(o.status.success(), "{o:?}");
    let d: u32 = field(&stdout(&o), "distance").parse().unwrap();
    assert_eq!(d % 2, 0);
    assert!(d >= 8);
    assert_eq!(
        manifest(dir.path(), "graph-distance")["results"]["distance"],
        d
    );
}

#[test]
fn expsum_small_grid_has_no_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let o = ffcircle(dir.path(), &["expsum", "--grid", "small"]);
    assert!(o.status.success(), "{o:?}");
    let s = stdout(&o);
    assert_eq!(field(&s, "mismatches"), "0");
    assert!(field(&s, "pairs").parse::<usize>().unwrap() > 0);
    let mut rd = csv::Reader::from_path(dir.path().join("expsum/expsum.csv")).unwrap();
    assert!(rd.records().count() > 0);
}

#[test]
fn kloosterman_finite_respects_weil() {
    let dir = tempfile::tempdir().unwrap();
    let o = ffcircle(
        dir.path(),
        &[
            "kloosterman",
            "finite",
            "--r",
            "t^2+1",
            "--m",
            "1",
            "--n",
            "t",
        ],
    );
    assert!(o.status.success(), "{o:?}");
    assert_eq!(field(&stdout(&o), "within_bound"), "true");
}

#[test]
fn tls_sweep_writes_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let o = ffcircle(
        dir.path(),
        &["--seed", "3", "tls", "sweep", "--g", "t", "--t-max", "4"],
    );
    assert!(o.status.success(), "{o:?}");
    for f in ["exact.csv", "cumulative.csv", "manifest.json"] {
        assert!(dir.path().join("tls-sweep").join(f).exists(), "{f}");
    }
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = ffcircle(dir.path(), &["count", "--f"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ffcircle(
        dir.path(),
        &["count", "--g", "t+1", "--f", "t", "--lambda", "0,0,0,0"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    // no graph built yet under this --out
    let o = ffcircle(dir.path(), &["graph", "diameter"]);
    assert_eq!(o.status.code(), Some(2));
}
