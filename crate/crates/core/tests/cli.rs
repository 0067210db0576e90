use std::process::{Command, Output};

use p3hull::graphgen::{read_edge_list, VertexMap};

fn p3hull(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p3hull")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gauss() {
    for (args, expected) in [(["4", "2", "2"], "35"), (["5", "0", "3"], "1"), (["2", "3", "2"], "0")] {
        let o = p3hull(&[&["gauss"], &args[..]].concat());
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), expected);
    }
    assert_eq!(p3hull(&["gauss", "4", "x", "2"]).status.code(), Some(2));
    assert_eq!(p3hull(&["gauss", "4", "2", "2", "--nope"]).status.code(), Some(2));
}

#[test]
fn graph_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("k");
    let o = p3hull(&[
        "graph",
        "--family",
        "qkneser",
        "--q",
        "2",
        "--n",
        "4",
        "--k",
        "2",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("vertices: 35") && out.contains("edges: 280"), "{out}");

    let edges =
        read_edge_list(std::io::BufReader::new(std::fs::File::open(dir.path().join("k.edges")).unwrap())).unwrap();
    assert_eq!(edges.edges.len(), 280);
    let map: VertexMap =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("k.vertices.json")).unwrap()).unwrap();
    assert_eq!(map.vertices.len(), 35);
    assert_eq!(map.vertices[0], "1 0 0 0;0 1 0 0");
}

#[test]
fn graph_grassmann_and_cap() {
    let o = p3hull(&["graph", "--family", "grassmann", "--q", "2", "--n", "4", "--k", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["vertex_count"], 35);
    assert_eq!(report["degree"], 18);
    assert_eq!(p3hull(&["graph", "--family", "qkneser", "--q", "2", "--n", "12", "--k", "6"]).status.code(), Some(3));
    assert_eq!(p3hull(&["graph", "--family", "qkneser", "--q", "6", "--n", "4", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn hull_commands() {
    let o = p3hull(&["hull", "--family", "qkneser", "--q", "2", "--n", "5", "--k", "2", "--seed", "paper"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("hull = 155/155") && stdout(&o).contains("is_hull_set = true"));

    let o = p3hull(&["hull", "--family", "grassmann", "--q", "2", "--n", "6", "--k", "3", "--seed", "paper"]);
    assert!(stdout(&o).contains("hull = 1395/1395"));

    let o = p3hull(&[
        "hull", "--family", "qkneser", "--q", "2", "--n", "4", "--k", "2", "--seed", "0,1", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let t: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(t["seed"].as_array().unwrap().len(), 2);
    assert_eq!(t["hull_size"], 35);

    let rows = p3hull(&[
        "hull",
        "--family",
        "qkneser",
        "--q",
        "2",
        "--n",
        "4",
        "--k",
        "2",
        "--seed",
        "1 1 0 0;0 1 1 0|0 0 0 1;0 0 1 0",
    ]);
    assert_eq!(rows.status.code(), Some(0), "any basis of a vertex is accepted");
    let lines =
        p3hull(&["hull", "--family", "qkneser", "--q", "2", "--n", "4", "--k", "2", "--seed", "1 0 0 0|0 1 0 0"]);
    assert_eq!(lines.status.code(), Some(4));
    let malformed = p3hull(&["hull", "--family", "qkneser", "--q", "2", "--n", "4", "--k", "2", "--seed", "1 2;x"]);
    assert_eq!(malformed.status.code(), Some(2));
}

#[test]
fn verify_targets() {
    let cases: [&[&str]; 5] = [
        &["--target", "lemma23", "--q", "2", "--n", "5", "--k", "2", "--m", "3"],
        &["--target", "lemma22", "--q", "3", "--k", "4", "--n", "9"],
        &["--target", "lemma24", "--q", "2", "--k", "2"],
        &["--target", "case2count", "--q", "2", "--k", "2"],
        &["--target", "thm12", "--q", "2", "--n", "4", "--k", "2"],
    ];
    for args in cases {
        let o = p3hull(&[&["verify"], args].concat());
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("PASS"));
    }
    let o = p3hull(&["verify", "--target", "lemma22", "--q", "3", "--k", "4", "--n", "9"]);
    assert!(stdout(&o).contains("d_10 = "));
    let o = p3hull(&[
        "verify",
        "--target",
        "lemma24",
        "--q",
        "2",
        "--k",
        "3",
        "--samples",
        "50",
        "--seed",
        "7",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("target,params,passed"));
    assert_eq!(p3hull(&["verify", "--target", "lemma23", "--q", "2", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let args = [
        "verify",
        "--target",
        "case2count",
        "--q",
        "2",
        "--k",
        "3",
        "--samples",
        "200",
        "--seed",
        "11",
        "--format",
        "json",
    ];
    assert_eq!(stdout(&p3hull(&args)), stdout(&p3hull(&args)));
}

#[test]
fn search_strategies() {
    let o = p3hull(&["search", "--family", "qkneser", "--q", "2", "--n", "4", "--k", "2", "--strategy", "full"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("witness:"));

    let o = p3hull(&["search", "--family", "grassmann", "--q", "2", "--n", "4", "--k", "2", "--strategy", "paper"]);
    let out = stdout(&o);
    assert!(out.contains("v1 = 1 0 0 0;0 1 0 0") && out.contains("v2 = 0 0 1 0;0 0 0 1"), "{out}");

    let o = p3hull(&["search", "--family", "qkneser", "--q", "2", "--n", "6", "--k", "3", "--strategy", "fix-first"]);
    assert_eq!(o.status.code(), Some(0));

    let o = p3hull(&[
        "search",
        "--family",
        "qkneser",
        "--q",
        "2",
        "--n",
        "4",
        "--k",
        "2",
        "--strategy",
        "full",
        "--max-pairs",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(3));
}
