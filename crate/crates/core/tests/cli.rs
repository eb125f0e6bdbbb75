use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ixpgraph::cli::graph_file;
use ixpgraph::model::fixtures::toy_graph;
use ixpgraph::model::Location;
use ixpgraph::IxpId;
use serde_json::Value;
use tempfile::TempDir;

fn ixpgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ixpgraph"))
        .args(args)
        .env_remove("IXPGRAPH_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Toy {
    _dir: TempDir,
    path: PathBuf,
}

impl Toy {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g0.json");
        let mut g = toy_graph();
        g.set_location(
            &IxpId::new("X3"),
            Location {
                country: "GR".into(),
                city: "Athens".into(),
                lat: None,
                lon: None,
            },
        )
        .unwrap();
        graph_file::write_graph(&path, &g).unwrap();
        Toy { _dir: dir, path }
    }

    fn path(&self) -> &str {
        self.path.to_str().unwrap()
    }
}

#[test]
fn build_reports_discards() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let res = ixpgraph(&[
        "build",
        "--pdb",
        &fixture("pdb.csv"),
        "--pch",
        &fixture("pch.csv"),
        "--out",
        out.to_str().unwrap(),
        "--json",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let report: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(report["ixps"], 2);
    assert_eq!(report["ases"], 6);
    assert_eq!(report["edges"], 7);
    assert!(out.exists());
}

#[test]
fn build_with_only_inactive_ixps_fails() {
    let dir = tempfile::tempdir().unwrap();
    let pdb = dir.path().join("pdb.csv");
    std::fs::write(
        &pdb,
        "source,ixp_key,ixp_name,ixp_prefixes,asn,member_ip,status,as_type,as_prefix_count\n\
         pdb,1,Closed IX,10.0.0.0/24,64500,,inactive,,\n",
    )
    .unwrap();
    let pch = dir.path().join("pch.csv");
    std::fs::write(
        &pch,
        "source,ixp_key,ixp_name,ixp_prefixes,asn,member_ip,status,as_type,as_prefix_count\n",
    )
    .unwrap();
    let out = dir.path().join("g.json");
    let res = ixpgraph(&[
        "build",
        "--pdb",
        pdb.to_str().unwrap(),
        "--pch",
        pch.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1));
    assert!(stderr(&res).contains("empty"), "{}", stderr(&res));
    assert!(!out.exists());
}

#[test]
fn degree_cdf_for_ixps() {
    let toy = Toy::new();
    let res = ixpgraph(&[
        "metrics",
        "degree-cdf",
        "--graph",
        toy.path(),
        "--class",
        "ixp",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let text = stdout(&res);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["degree,count,cdf", "1,1,0.333333", "3,2,1.0"]);
}

#[test]
fn table2_rows() {
    let toy = Toy::new();
    let res = ixpgraph(&["metrics", "table2", "--graph", toy.path()]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert_eq!(
        stdout(&res),
        "ixps_crossed,count,percent\n1,5,83.3\n2,1,16.7\n"
    );
}

#[test]
fn table3_json_for_as_projection() {
    let toy = Toy::new();
    let res = ixpgraph(&[
        "metrics",
        "table3",
        "--graph",
        toy.path(),
        "--class",
        "as",
        "--json",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let doc: Value = serde_json::from_str(&stdout(&res)).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    let counts: Vec<(u64, u64)> = rows
        .iter()
        .map(|r| {
            (
                r["multiplicity"].as_u64().unwrap(),
                r["count"].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(counts, [(0, 1), (1, 4), (2, 1)]);
}

#[test]
fn policy_filter_on_as_projection() {
    let toy = Toy::new();
    let dir = tempfile::tempdir().unwrap();
    let policy = dir.path().join("policy.csv");
    std::fs::write(&policy, "as1,as2,relation\n2,3,p2p\n").unwrap();
    let res = ixpgraph(&[
        "metrics",
        "table3",
        "--graph",
        toy.path(),
        "--class",
        "as",
        "--policy",
        policy.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert_eq!(
        stdout(&res),
        "multiplicity,count,percent\n0,5,83.3\n2,1,16.7\n"
    );
}

#[test]
fn unknown_metric_prints_usage() {
    let toy = Toy::new();
    let res = ixpgraph(&["metrics", "pagerank", "--graph", toy.path()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(stderr(&res).contains("usage:"));
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let res = ixpgraph(&["metrics", "table2"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn type_share_requires_as_types() {
    let toy = Toy::new();
    let res = ixpgraph(&["metrics", "type-share", "--graph", toy.path()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(stderr(&res).contains("AS type"), "{}", stderr(&res));
}

#[test]
fn type_share_with_types() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let res = ixpgraph(&[
        "build",
        "--pdb",
        &fixture("pdb.csv"),
        "--pch",
        &fixture("pch.csv"),
        "--as-types",
        &fixture("as_types.csv"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let res = ixpgraph(&[
        "metrics",
        "type-share",
        "--graph",
        out.to_str().unwrap(),
        "--thresholds",
        "0,1",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let text = stdout(&res);
    assert_eq!(
        text.lines().next(),
        Some("group,ases,content_pct,enterprise_pct,isp_pct")
    );
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn place_cover() {
    let toy = Toy::new();
    let res = ixpgraph(&[
        "place",
        "cover",
        "--graph",
        toy.path(),
        "--targets",
        "1,2,3,AS4",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let sol: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(sol["chosen"], serde_json::json!(["X1", "X2"]));
    assert_eq!(sol["total_cost"], 2.0);
}

#[test]
fn place_budget() {
    let toy = Toy::new();
    let res = ixpgraph(&[
        "place",
        "budget",
        "--graph",
        toy.path(),
        "--targets",
        "all",
        "--budget",
        "1",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let sol: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(sol["chosen"], serde_json::json!(["X1"]));
    assert_eq!(sol["total_weight"], 3.0);
}

#[test]
fn place_with_unknown_target_fails() {
    let toy = Toy::new();
    let res = ixpgraph(&["place", "cover", "--graph", toy.path(), "--targets", "1,99"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(stderr(&res).contains("99"), "{}", stderr(&res));
}

#[test]
fn place_tunnels() {
    let toy = Toy::new();
    let res = ixpgraph(&["place", "tunnels", "--graph", toy.path(), "--as", "1"]);
    assert!(res.status.success(), "{}", stderr(&res));
    let doc: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(
        doc["tunnels"],
        serde_json::json!([{"asn": 2, "gain": 1}, {"asn": 3, "gain": 1}])
    );
}

#[test]
fn place_site() {
    let toy = Toy::new();
    let res = ixpgraph(&[
        "place",
        "site",
        "--graph",
        toy.path(),
        "--country",
        "gr",
        "--city",
        "athens",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let doc: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert!((doc["score"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn export_edgelist() {
    let toy = Toy::new();
    let res = ixpgraph(&["export", "--graph", toy.path(), "--format", "edgelist"]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert_eq!(
        stdout(&res),
        "X1\t1\nX1\t2\nX1\t3\nX2\t2\nX2\t3\nX2\t4\nX3\t1\n"
    );
}

#[test]
fn export_with_bad_format_fails() {
    let toy = Toy::new();
    let res = ixpgraph(&["export", "--graph", toy.path(), "--format", ""]);
    assert_eq!(res.status.code(), Some(1));
    assert!(stderr(&res).contains("usage:"));
}

#[test]
fn thread_count_does_not_change_results() {
    let toy = Toy::new();
    let one = ixpgraph(&["--threads", "1", "metrics", "table2", "--graph", toy.path()]);
    let env = Command::new(env!("CARGO_BIN_EXE_ixpgraph"))
        .args(["metrics", "table2", "--graph", toy.path()])
        .env("IXPGRAPH_THREADS", "3")
        .output()
        .unwrap();
    assert!(one.status.success() && env.status.success());
    assert_eq!(one.stdout, env.stdout);
}

#[test]
fn in_process_run_matches_binary() {
    let toy = Toy::new();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = ixpgraph::cli::run(
        ["ixpgraph", "metrics", "remote-gain", "--graph", toy.path()],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    let bin = ixpgraph(&["metrics", "remote-gain", "--graph", toy.path()]);
    assert_eq!(out, bin.stdout);
    assert!(String::from_utf8(out)
        .unwrap()
        .starts_with("gain,count,cdf\n"));
}
