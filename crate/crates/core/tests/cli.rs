use std::path::Path;
use std::process::{Command, Output};

fn stratnet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratnet")).current_dir(dir).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const RING: &str = "source,target\n0,1\n1,2\n2,3\n3,4\n4,5\n5,0\n0,2\n2,4\n4,0\n1,3\n3,5\n5,1\n1,0\n3,2\n";

#[test]
fn test_writes_result_and_null_draws() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edges.csv", RING);
    let out = stratnet(dir.path(), &["test", "--edges", "edges.csv", "--statistic", "ti", "--reference", "degree", "--draws", "40", "--seed", "9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("result.json")).unwrap();
    assert!(text.contains("\"q\": 5.0000000000000000e-1"), "{text}");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["statistic"], "transitivity_index");
    assert_eq!(v["reference"], "degree_only");
    assert_eq!(v["draws"], 40);
    assert_eq!(v["seed"], 9);
    let p = v["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);
    let null = std::fs::read_to_string(dir.path().join("null_draws.csv")).unwrap();
    let mut lines = null.lines();
    assert_eq!(lines.next(), Some("statistic"));
    assert_eq!(lines.count(), 40);
    assert!(dir.path().join("manifest.json").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("p-value ="));
}

#[test]
fn malformed_csv_exits_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edges.csv", "source,target\n0,1\n1,x\n");
    let out = stratnet(dir.path(), &["fit", "--edges", "edges.csv"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("edges.csv:3:"), "{err}");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stratnet(dir.path(), &["fit", "--bogus"]).status.code(), Some(2));
    assert_eq!(stratnet(dir.path(), &["nonsense"]).status.code(), Some(2));
    assert_eq!(stratnet(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn separation_exits_with_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edges.csv", "source,target\n0,1\n0,2\n0,3\n1,2\n");
    let out = stratnet(dir.path(), &["fit", "--edges", "edges.csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("node 0"));
}

#[test]
fn calibrate_prints_design_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let out = stratnet(dir.path(), &["calibrate"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for v in ["0.90", "0.50", "0.10", "0.012"] {
        assert!(text.contains(v), "{text}");
    }
}

#[test]
fn sample_into_directory_and_one_based_ids() {
    let dir = tempfile::tempdir().unwrap();
    let one_based: String = RING
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            format!("{},{}\n", a.parse::<u32>().unwrap() + 1, b.parse::<u32>().unwrap() + 1)
        })
        .collect();
    write(dir.path(), "edges.csv", &format!("source,target\n{one_based}"));
    let out = stratnet(
        dir.path(),
        &["--index-base", "one", "sample", "--edges", "edges.csv", "--reference", "degree", "--draws", "3", "--tau", "50", "--seed", "1", "--out", "draws"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let files: Vec<_> = std::fs::read_dir(dir.path().join("draws")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files.iter().filter(|f| f.to_string_lossy().starts_with("draw_")).count(), 3);
    let first = std::fs::read_dir(dir.path().join("draws"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.file_name().unwrap().to_string_lossy().starts_with("draw_"))
        .unwrap();
    let text = std::fs::read_to_string(first).unwrap();
    assert_eq!(text.lines().count(), 15);
    assert!(text.lines().skip(1).all(|l| !l.split(',').any(|x| x == "0")));
}

#[test]
fn enumerate_counts_reference_set() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edges.csv", "source,target\n0,1\n1,2\n2,0\n");
    let out = stratnet(dir.path(), &["enumerate", "--edges", "edges.csv"]);
    assert!(out.status.success());
    // The two directed triangles.
    assert!(String::from_utf8_lossy(&out.stdout).contains('2'));
    let text = std::fs::read_to_string(dir.path().join("reference_set.csv")).unwrap();
    assert!(text.starts_with("network,"));
    assert_eq!(text.lines().count(), 1 + 6);
}

#[test]
fn alpha_requires_enumerated_reference() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edges.csv", RING);
    let out = stratnet(dir.path(), &["test", "--edges", "edges.csv", "--statistic", "ti", "--alpha", "0.05", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
}
