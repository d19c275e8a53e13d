use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn snapnet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snapnet")).args(args).current_dir(dir).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = snapnet(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn edge_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn chain_of_five_has_four_edges_and_one_driver() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "--model", "chain", "--n", "5", "--out", "g.txt"]);
    let text = fs::read_to_string(dir.path().join("g.txt")).unwrap();
    assert_eq!(edge_lines(&text), ["1 2", "2 3", "3 4", "4 5"]);

    let report = ok(dir.path(), &["controllability", "--kind", "structural", "g.txt"]);
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["N_D"], 1);
    assert_eq!(v["N"], 5);
    assert_eq!(v["kind"], "structural");
    assert_eq!(v["n_D"], 0.2);
}

#[test]
fn stochastic_paths_need_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &["attack", "--model", "chain", "--n", "10", "--strategy", "ra-n"],
        &["generate", "--model", "snapback-multiplex", "--n", "20", "--q", "0.1"],
        &["reproduce", "fig9", "--out-dir", "x"],
    ];
    for args in cases {
        let out = snapnet(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["reproduce", "fig4", "--out-dir", "x", "--seed", "1"][..],
        &["controllability", "--kind", "sideways", "g.txt"],
        &["attack", "--model", "chain", "--n", "5", "--seed", "1"],
        &["frobnicate"],
    ] {
        assert_eq!(snapnet(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_errors_print_a_parsable_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = snapnet(dir.path(), &["controllability", "--kind", "structural", "missing.txt"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: kind=io message="), "{err}");

    fs::write(dir.path().join("bad.txt"), "# nodes 3\n1 2\n2 9\n").unwrap();
    let out = snapnet(dir.path(), &["motifs", "bad.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: kind=parse"));

    let out = snapnet(dir.path(), &["generate", "--model", "chain", "--n", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: kind=invalid-argument"));
}

#[test]
fn edge_list_header_regenerates_the_graph() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["generate", "--model", "snapback-multiplex", "--n", "40", "--target-k", "3.8", "--seed", "9", "--out", "a.txt"],
    );
    let text = fs::read_to_string(dir.path().join("a.txt")).unwrap();
    let config: String = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter(|l| !l.starts_with("nodes "))
        .map(|l| format!("{l}\n"))
        .collect();
    assert!(config.contains("q = "), "calibrated q is recorded:\n{config}");
    fs::write(dir.path().join("a.cfg"), config).unwrap();
    ok(dir.path(), &["generate", "--config", "a.cfg", "--out", "b.txt"]);
    assert_eq!(text, fs::read_to_string(dir.path().join("b.txt")).unwrap());
}

#[test]
fn attack_sidecar_regenerates_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "attack", "--model", "scale-free", "--n", "50", "--target-k", "3.8", "--seed", "4", "--strategy", "ta-e",
            "--runs", "3", "--grid", "0,0.1,0.2,0.4", "--out", "c.csv",
        ],
    );
    let csv = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "fraction,mean_nd,std_nd,runs");
    assert_eq!(rows.len(), 5);
    assert!(!csv.contains('\r'));
    for row in &rows[1..] {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 4);
        assert!((0.0..=1.0).contains(&cells[1]));
        assert_eq!(cells[3], 3.0);
    }

    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    fs::write(dir.path().join("c.cfg"), meta["config"].as_str().unwrap()).unwrap();
    fs::remove_file(dir.path().join("c.csv")).unwrap();
    // The recorded `output` key is the default destination.
    ok(dir.path(), &["attack", "--config", "c.cfg"]);
    assert_eq!(csv, fs::read_to_string(dir.path().join("c.csv")).unwrap());
}

#[test]
fn flags_override_config_entries() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("e.cfg"), "# chain\nmodel = chain\nn = 8\n").unwrap();
    let text = ok(dir.path(), &["generate", "--config", "e.cfg", "--n", "3"]);
    assert_eq!(edge_lines(&text), ["1 2", "2 3"]);
}

#[test]
fn measure_writes_report_and_histograms() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "--model", "chain", "--n", "7", "--out", "g.txt"]);
    let report = ok(dir.path(), &["measure", "g.txt", "--top", "2", "--histograms", "h"]);
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["edges"], 6);
    assert_eq!(v["betweenness"]["top_nodes"][0]["node"], 4);
    assert_eq!(v["betweenness"]["top_nodes"][0]["score"], 9.0);
    let apl = v["topology"]["average_path_length"].as_f64().unwrap();
    assert!((apl - 8.0 / 3.0).abs() < 1e-12);
    assert_eq!(fs::read_to_string(dir.path().join("h_out.csv")).unwrap(), "degree,count\n0,1\n1,6\n");
    assert_eq!(fs::read_to_string(dir.path().join("h_in.csv")).unwrap(), "degree,count\n0,1\n1,6\n");
}

#[test]
fn motifs_csv_ranks_classes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.txt"), "# nodes 5\n1 2\n2 3\n3 4\n4 5\n").unwrap();
    let csv = ok(dir.path(), &["motifs", "p.txt"]);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "class_id,count,named_label");
    assert_eq!(rows.len(), 2);
    assert!(rows[1].ends_with(",2,chain-A"), "{csv}");
}

#[test]
fn reproduce_fig9_writes_twelve_curves_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["reproduce", "fig9", "--out-dir", "out", "--seed", "1", "--runs", "1"]);
    let mut csvs: Vec<String> = fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    csvs.sort();
    assert_eq!(csvs.len(), 12, "{csvs:?}");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["figure"], "fig9");
    assert_eq!(manifest["artifacts"].as_array().unwrap().len(), 12);
}

#[test]
fn state_controllability_reports_mode_and_drivers() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.txt"), "# nodes 6\n1 2\n2 3\n3 1\n4 5\n5 6\n6 4\n").unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&ok(dir.path(), &["controllability", "--kind", "state", "--state-mode", "exact", "--nodes", "t.txt"]))
            .unwrap();
    assert_eq!(v["N_D"], 2);
    assert_eq!(v["state_mode"], "exact");
    assert_eq!(v["driver_nodes"].as_array().unwrap().len(), 2);
    let v: serde_json::Value =
        serde_json::from_str(&ok(dir.path(), &["controllability", "--kind", "state", "t.txt"])).unwrap();
    assert_eq!(v["N_D"], 1);
}
