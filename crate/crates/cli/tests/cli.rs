use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const NODES: &str = "a1\tA\na2\tA\na3\tA\np1\tP\np2\tP\np3\tP\np4\tP\nv1\tV\n";
const EDGES: &str = "a1\tp1\twrites\tu\na1\tp2\twrites\tu\na2\tp2\twrites\tu\na2\tp3\twrites\tu\n\
a3\tp4\twrites\tu\np1\tv1\tpublished_in\tu\np2\tv1\tpublished_in\tu\n";
const AP: &str = r#"{"name": "AP", "nodes": [{"id": "a", "type": "A"}, {"id": "p", "type": "P"}],
 "edges": [{"src": "a", "dst": "p", "etype": "writes", "dir": "u"}]}"#;
const APV: &str = r#"{"name": "APV", "nodes": [{"id": "a", "type": "A"}, {"id": "p", "type": "P"}, {"id": "v", "type": "V"}],
 "edges": [{"src": "a", "dst": "p", "etype": "writes", "dir": "u"},
           {"src": "p", "dst": "v", "etype": "published_in", "dir": "u"}]}"#;

fn hinclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hinclust")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

/// Writes the toy graph, both motifs, a seed file and a config with `extra` fields.
fn toy(dir: &Path, extra: &str) -> std::path::PathBuf {
    fs::write(dir.join("nodes.tsv"), NODES).unwrap();
    fs::write(dir.join("edges.tsv"), EDGES).unwrap();
    fs::write(dir.join("ap.json"), AP).unwrap();
    fs::write(dir.join("apv.json"), APV).unwrap();
    fs::write(dir.join("seeds.tsv"), "a1\t0\na3\t1\n").unwrap();
    let cfg = dir.join("run.json");
    fs::write(
        &cfg,
        format!(
            r#"{{"nodes": "nodes.tsv", "edges": "edges.tsv", "motifs": ["ap.json", "apv.json"],
                "seeds": "seeds.tsv", "clusters": 2 {extra}}}"#
        ),
    )
    .unwrap();
    cfg
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn transcribe_writes_tensors_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = toy(dir.path(), "");
    let out = hinclust(&["transcribe", "--config", path(&cfg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let ap = fs::read_to_string(dir.path().join("out/tensors/AP.tsv")).unwrap();
    assert_eq!(ap.lines().count() - 1, 5, "one entry per writes edge");

    let manifest: Value = serde_json::from_slice(&fs::read(dir.path().join("out/manifest.json")).unwrap()).unwrap();
    for entry in manifest["motifs"].as_array().unwrap() {
        let text = fs::read_to_string(dir.path().join("out").join(entry["file"].as_str().unwrap())).unwrap();
        assert!(text.starts_with("#dims"));
        assert_eq!(entry["nnz"].as_u64().unwrap() as usize, text.lines().count() - 1);
    }
    assert_eq!(manifest["motifs"][1]["dims"], serde_json::json!([3, 4, 1]));
    assert_eq!(stdout_json(&out)["motifs"][1]["nnz"], 3);
}

#[test]
fn rerun_is_byte_identical_and_hits_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = toy(dir.path(), "");
    assert!(hinclust(&["transcribe", "--config", path(&cfg)]).status.success());
    let first = read_dir_sorted(&dir.path().join("out/tensors"));
    let manifest = fs::read(dir.path().join("out/manifest.json")).unwrap();
    assert!(hinclust(&["transcribe", "--config", path(&cfg)]).status.success());
    assert_eq!(read_dir_sorted(&dir.path().join("out/tensors")), first);
    assert_eq!(fs::read(dir.path().join("out/manifest.json")).unwrap(), manifest);
    let timings: Value = serde_json::from_slice(&fs::read(dir.path().join("out/timings.json")).unwrap()).unwrap();
    assert!(timings["motifs"].as_array().unwrap().iter().all(|t| t["cached"] == true));
}

#[test]
fn changed_graph_misses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = toy(dir.path(), "");
    assert!(hinclust(&["transcribe", "--config", path(&cfg)]).status.success());
    fs::write(dir.path().join("edges.tsv"), format!("{EDGES}a3\tp3\twrites\tu\n")).unwrap();
    assert!(hinclust(&["transcribe", "--config", path(&cfg)]).status.success());
    let ap = fs::read_to_string(dir.path().join("out/tensors/AP.tsv")).unwrap();
    assert_eq!(ap.lines().count() - 1, 6);
    assert_eq!(fs::read_dir(dir.path().join("out/cache")).unwrap().count(), 4);
}

#[test]
fn huge_tolerance_converges_after_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = toy(dir.path(), r#", "outer_tol": 1e9"#);
    let out = hinclust(&["fit", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["outer_iterations"], 1);
    assert_eq!(summary["converged"], true);
    let log = fs::read_to_string(dir.path().join("out/iterations.csv")).unwrap();
    let lines: Vec<&str> = log.lines().collect();
    assert_eq!(lines[0], "iter,obj,reconstruction,sparsity,consensus,seed_mask,mu_AP,mu_APV");
    assert_eq!(lines.len(), 3);
}

#[test]
fn iteration_cap_exits_with_distinct_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = toy(dir.path(), r#", "outer_tol": 1e-300, "max_outer_iters": 2"#);
    let out = hinclust(&["fit", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let last: Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert_eq!(last["level"], "warn");
}

#[test]
fn fit_outputs_cover_clusterable_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = toy(dir.path(), "");
    let out = hinclust(&["fit", "--config", path(&cfg)]);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(2));
    let labels = fs::read_to_string(dir.path().join("out/labels.tsv")).unwrap();
    assert_eq!(labels.lines().count(), 8);
    let consensus = fs::read_to_string(dir.path().join("out/consensus.tsv")).unwrap();
    for line in consensus.lines() {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 4);
        assert!(cols[2..].iter().all(|v| v.parse::<f64>().unwrap() >= 0.0));
    }
    let mu: Vec<f64> = fs::read_to_string(dir.path().join("out/mu.tsv"))
        .unwrap()
        .lines()
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

#[test]
fn fit_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = toy(dir.path(), r#", "max_outer_iters": 5"#);
    hinclust(&["--threads", "1", "fit", "--config", path(&cfg)]);
    let one = read_dir_sorted(&dir.path().join("out"));
    hinclust(&["--threads", "3", "fit", "--config", path(&cfg)]);
    let three = read_dir_sorted(&dir.path().join("out"));
    let strip = |v: Vec<(String, Vec<u8>)>| v.into_iter().filter(|(n, _)| n != "timings.json").collect::<Vec<_>>();
    assert_eq!(strip(one), strip(three));
}

#[test]
fn planted_config_recovers_partition() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.json");
    fs::write(
        &params,
        r#"{"clusters": 2, "nodes_per_type": 20, "types": ["A", "T"], "seed_fraction": 0.1,
            "templates": [{"motif": {"name": "AT", "nodes": [{"id": "a", "type": "A"}, {"id": "t", "type": "T"}],
                           "edges": [{"src": "a", "dst": "t", "etype": "tags", "dir": "u"}]},
                           "instances_per_block": 80, "noise": 0.0}]}"#,
    )
    .unwrap();
    let data = dir.path().join("data");
    let out = hinclust(&["gen-planted", "--params", path(&params), "--out", path(&data)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // Seed boost makes the seed-to-cluster binding reliable on this small instance.
    let run = data.join("run.json");
    let mut cfg: Value = serde_json::from_slice(&fs::read(&run).unwrap()).unwrap();
    cfg["seed_boost"] = 10.0.into();
    fs::write(&run, cfg.to_string()).unwrap();
    let fit = hinclust(&["fit", "--config", path(&run)]);
    assert!(fit.status.code() == Some(0), "{}", String::from_utf8_lossy(&fit.stderr));

    let log = fs::read_to_string(data.join("out/iterations.csv")).unwrap();
    let obj: Vec<f64> = log.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(obj.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)), "{obj:?}");

    let eval = hinclust(&[
        "evaluate",
        "--pred",
        path(&data.join("out/labels.tsv")),
        "--truth",
        path(&data.join("truth.tsv")),
        "--seeds",
        path(&data.join("seeds.tsv")),
    ]);
    assert!(eval.status.success(), "{}", String::from_utf8_lossy(&eval.stderr));
    assert!(stdout_json(&eval)["nmi"].as_f64().unwrap() >= 0.9);
}

#[test]
fn evaluate_hand_case_and_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred.tsv");
    let truth = dir.path().join("truth.tsv");
    fs::write(&pred, "n1\t0\nn2\t0\nn3\t1\nn4\t1\n").unwrap();
    fs::write(&truth, "n1\t0\nn2\t1\nn3\t1\nn4\t1\n").unwrap();
    let out = hinclust(&["evaluate", "--pred", path(&pred), "--truth", path(&truth)]);
    let m = stdout_json(&out);
    assert_eq!(m["accuracy"], 0.75);
    assert_eq!(m["micro_f1"], 0.75);
    assert!((m["macro_f1"].as_f64().unwrap() - 0.7333).abs() < 1e-4);

    let swapped = stdout_json(&hinclust(&["evaluate", "--pred", path(&truth), "--truth", path(&pred)]));
    assert_eq!(swapped["nmi"], m["nmi"]);

    let identical = stdout_json(&hinclust(&["evaluate", "--pred", path(&truth), "--truth", path(&truth)]));
    for k in ["accuracy", "micro_f1", "macro_f1", "nmi"] {
        assert_eq!(identical[k], 1.0, "{k}");
    }
}

#[test]
fn evaluate_excludes_seeds_unless_asked() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred.tsv");
    let truth = dir.path().join("truth.tsv");
    let seeds = dir.path().join("seeds.tsv");
    fs::write(&pred, "n1\t1\nn2\t0\n").unwrap();
    fs::write(&truth, "n1\t0\nn2\t0\n").unwrap();
    fs::write(&seeds, "n1\t0\n").unwrap();
    let args = ["evaluate", "--pred", path(&pred), "--truth", path(&truth), "--seeds", path(&seeds)];
    assert_eq!(stdout_json(&hinclust(&args))["accuracy"], 1.0);
    let mut with = args.to_vec();
    with.push("--include-seeds");
    assert_eq!(stdout_json(&hinclust(&with))["accuracy"], 0.5);
}

#[test]
fn errors_exit_nonzero_with_json_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred.tsv");
    let truth = dir.path().join("truth.tsv");
    fs::write(&pred, "n1\t0\n").unwrap();
    fs::write(&truth, "n1\t0\nn9\t1\n").unwrap();
    let out = hinclust(&["evaluate", "--pred", path(&pred), "--truth", path(&truth)]);
    assert_eq!(out.status.code(), Some(1));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["level"], "error");
    assert!(diag["message"].as_str().unwrap().contains("n9"));

    let out = hinclust(&["fit", "--config", path(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(serde_json::from_slice::<Value>(&out.stderr).is_ok());

    let cfg = toy(dir.path(), "");
    fs::write(dir.path().join("edges.tsv"), "a1\tnope\twrites\tu\n").unwrap();
    let out = hinclust(&["transcribe", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(diag["message"].as_str().unwrap().contains("edges.tsv:1"), "{diag}");
}
