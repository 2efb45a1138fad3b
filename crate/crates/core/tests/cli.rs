use std::path::Path;
use std::process::{Command, Output};

use opinion_shield::cli::{SolveOutput, SweepReport};
use opinion_shield::io::{load_system, InputFormat, LoadedNetwork};
use opinion_shield::network::{build_friedkin_johnsen, generate_graph, GraphModel, StubbornnessProfile};
use opinion_shield::solver::phi;
use opinion_shield::spectral::ResponseModel;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opinion-shield"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ba_model(n: usize, seed: u64) -> ResponseModel {
    let g = generate_graph(GraphModel::PreferentialAttachment, n, seed).unwrap();
    let sys = build_friedkin_johnsen(&g, &StubbornnessProfile::uniform(n, 0.5).unwrap()).unwrap();
    ResponseModel::from_system(&sys).unwrap()
}

#[test]
fn regular_centrality_csv() {
    let text = stdout(&run(&["centrality", "--generate", "regular:4", "--n", "20"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,pi,degree,total_mass,c0"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 20);
    let total: f64 = rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() <= 1e-12);
    for r in &rows {
        assert!((r[1].parse::<f64>().unwrap() - 0.05).abs() <= 1e-12);
        assert_eq!(r[2], "4");
        assert!((r[4].parse::<f64>().unwrap() - 20.0).abs() <= 1e-9);
    }
    assert!(!text.contains('\r'));
}

#[test]
fn solve_json_round_trips() {
    let text = stdout(&run(&[
        "solve",
        "--generate",
        "ba",
        "--n",
        "15",
        "--seed",
        "7",
        "--budget",
        "21",
        "--format",
        "json",
    ]));
    let report: SolveOutput = serde_json::from_str(&text).unwrap();
    let model = ba_model(15, 7);
    let again = phi(&report.nu, &model).unwrap().value;
    assert!((again - report.value).abs() <= 1e-9);
    assert!(report.nu.iter().all(|v| *v >= 1.0 - 1e-9));
    assert!((report.nu.iter().sum::<f64>() - 21.0).abs() <= 1e-9 * 21.0);
    assert!(report.kkt_residual <= 1e-6);
    assert!(report.regime_index >= 0);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "sweep",
        "--generate",
        "er:0.3",
        "--n",
        "14",
        "--seed",
        "5",
        "--sweep",
        "14:28:15",
        "--heuristics",
    ];
    let first = stdout(&run(&args));
    let second = stdout(&run(&args));
    assert_eq!(first, second);
}

#[test]
fn sweep_rows_are_feasible_and_ordered() {
    let text = stdout(&run(&[
        "sweep",
        "--generate",
        "ba",
        "--n",
        "12",
        "--seed",
        "3",
        "--sweep",
        "12:30:19",
        "--heuristics",
        "--format",
        "json",
    ]));
    let report: SweepReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.rows.len(), 19);
    for row in &report.rows {
        assert!(row.nu.iter().all(|v| *v >= 1.0 - 1e-9));
        assert!((row.nu.iter().sum::<f64>() - row.budget).abs() <= 1e-9 * row.budget);
        assert!(row.degree_ratio.unwrap() >= 1.0 - 1e-9);
        assert!(row.key_node_ratio.unwrap() >= 1.0 - 1e-9);
    }
    assert!(report.rows.windows(2).all(|w| w[1].value < w[0].value));
    assert!((report.breakpoints.last().unwrap() - 12.0).abs() <= 1e-9);
}

#[test]
fn regular_sweep_is_uniform() {
    let text = stdout(&run(&[
        "sweep",
        "--generate",
        "regular:4",
        "--n",
        "10",
        "--sweep",
        "10:20:6",
        "--heuristics",
    ]));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[..3], ["budget", "value", "regime"]);
    assert_eq!(header.last(), Some(&"ratio_key"));
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let c = cells[0];
        assert!(cells[3..13].iter().all(|v| (v - c / 10.0).abs() <= 1e-9));
        assert!((cells[13] - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn schedule_of_regular_graph_is_single_row() {
    let text = stdout(&run(&["schedule", "--generate", "regular:2", "--n", "8"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells[0], "0");
    assert!((cells[1].parse::<f64>().unwrap() - 8.0).abs() <= 1e-9);
    assert_eq!(cells[2..], ["8", "1 2 3 4 5 6 7 8"]);
}

#[test]
fn writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let status = run(&[
        "centrality",
        "--generate",
        "ba",
        "--n",
        "6",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let parsed: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(parsed["sources"].as_array().unwrap().len(), 6);
}

#[test]
fn compare_topologies_flags() {
    let text = stdout(&run(&[
        "compare-topologies",
        "--n",
        "20",
        "--seed",
        "1",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["topologies"][0]["threshold"].as_f64().unwrap() - 20.0).abs() <= 1e-9);
    assert!(v["ba_threshold_exceeds_er"].is_boolean());
    let top = v["rows"].as_array().unwrap().last().unwrap();
    assert_eq!(top["budget"].as_f64(), Some(40.0));
    for (k, t) in v["topologies"].as_array().unwrap().iter().enumerate() {
        if t["threshold"].as_f64().unwrap() <= 40.0 {
            let expected = t["total_mass"].as_f64().unwrap() / 40.0;
            assert!((top["values"][k].as_f64().unwrap() - expected).abs() <= 1e-9);
        }
    }
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unstable = write(
        dir.path(),
        "unstable.json",
        r#"{"A": [[0.6, 0.6], [0.6, 0.6]], "B": [[1, 0], [0, 1]]}"#,
    );
    let split = write(
        dir.path(),
        "split.json",
        r#"{"A": [[0.5, 0], [0, 0.5]], "B": [[0.5, 0], [0, 0.5]]}"#,
    );
    let garbage = write(dir.path(), "bad.txt", "1 2 x\n");

    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["centrality", "--input", &garbage]), 2);
    assert_eq!(code(&["centrality", "--input", "/nonexistent/file"]), 2);
    assert_eq!(code(&["solve", "--generate", "ba", "--n", "5"]), 2);
    assert_eq!(code(&["sweep", "--generate", "ba", "--n", "5", "--sweep", "9:6:3"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["centrality", "--input", &unstable]), 3);
    assert_eq!(code(&["solve", "--generate", "ba", "--n", "5", "--budget", "4"]), 5);

    let out = run(&["solve", "--input", &split, "--budget", "3"]);
    assert_eq!(out.status.code(), Some(4));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("{1}") && msg.contains("{2}"), "{msg}");
}

#[test]
fn edge_list_input_matches_generated() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "path.txt", "# path on 4 nodes\n1 2\n2 3 1.0\n3 4\n");
    let text = stdout(&run(&["solve", "--input", &path, "--budget", "4", "--format", "json"]));
    let report: SolveOutput = serde_json::from_str(&text).unwrap();
    assert_eq!(report.nu, vec![1.0; 4]);
    assert!(report.active_set.is_empty());

    let LoadedNetwork::Graph { graph, .. } = load_system(Path::new(&path), InputFormat::EdgeList).unwrap() else {
        panic!("edge list yields a graph");
    };
    assert_eq!(graph.degrees(), &[1.0, 2.0, 2.0, 1.0]);
}
