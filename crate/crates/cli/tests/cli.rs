use std::path::Path;
use std::process::{Command, Output};

fn wlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("WLAB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn willmore_of_clifford_torus() {
    let dir = tempfile::tempdir().unwrap();
    let o = wlab(dir.path(), &["willmore", "--preset", "clifford", "--eps", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("W = 78.956835"), "{}", stdout(&o));
}

#[test]
fn morse_counts_for_three_torus() {
    let dir = tempfile::tempdir().unwrap();
    let o = wlab(dir.path(), &["morse-counts", "--preset", "t3", "--sc-counts", "1,3,3,1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("tilde beta   [1, 4, 7, 7, 4, 1, 0]"), "{s}");
    assert!(s.lines().any(|l| l == "bound 8"), "{s}");
}

#[test]
fn so3_critical_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = wlab(dir.path(), &["so3-critical", "--alphas", "1,2,3", "--seeds", "200"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("24 critical points; indices 4/8/8/4"));
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["willmore", "--preset", "dodecahedron"][..],
        &["verify-xi", "--grid", "3x3"][..],
        &["morse-counts", "--sc-counts", "1,2"][..],
        &["willmore", "--preset", "torus-image", "--r", "1.0"][..],
        &["no-such-command"][..],
    ] {
        let o = wlab(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn artifacts_are_deterministic_and_labelled() {
    let a = tempfile::tempdir().unwrap();
    let args = ["verify-xi", "--eta", "0.2,0.1,0.05", "--seed", "7"];
    let snapshot = || {
        assert!(wlab(a.path(), &args).status.success());
        let mut files: Vec<_> = std::fs::read_dir(a.path())
            .unwrap()
            .map(|e| {
                let n = e.unwrap().file_name();
                let bytes = std::fs::read(a.path().join(&n)).unwrap();
                (n, bytes)
            })
            .collect();
        files.sort();
        files
    };
    let first = snapshot();
    assert_eq!(first, snapshot(), "artifacts differ between runs");
    let names: Vec<_> = first.into_iter().map(|(n, _)| n).collect();
    let csv = names.iter().find(|n| n.to_string_lossy().ends_with(".csv")).unwrap();
    let text = std::fs::read_to_string(a.path().join(csv)).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# eta [1]"), "{header}");
    let meta = lines.next().unwrap().strip_prefix("#meta ").expect("meta line");
    let meta: serde_json::Value = serde_json::from_str(meta).unwrap();
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["config"]["subcommand"], "verify-xi");
    assert_eq!(lines.count(), 3);
    let (table, _) = wlab::io::Table::read_csv(&text).unwrap();
    assert_eq!(table.rows.len(), 3);
}
