//! End-to-end checks of the installed binary: flag parsing, exit codes,
//! output formats, and byte-reproducibility of pipeline reports.

use std::path::{Path, PathBuf};
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphlid"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../data/{name}.edges"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("graphlid-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_of(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn stats_emits_table_row() {
    let text = stdout_of(binary().args(["stats", "--graph"]).arg(data("zachary")));
    assert!(text.lines().any(|l| l == "zachary,34,78,1,1.00,4.59,2.00"), "{text}");
}

#[test]
fn stats_missing_file_exits_one() {
    let out = binary().args(["stats", "--graph", "/no/such/file.edges"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn stats_malformed_file_exits_one_with_line_number() {
    let dir = temp_dir("malformed");
    let path = dir.join("bad.edges");
    std::fs::write(&path, "a b\noops\n").unwrap();
    let out = binary().args(["stats", "--graph"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn nclid_reports_all_nodes() {
    let text = stdout_of(binary().args(["nclid", "--graph"]).arg(data("florentine")));
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 15);
    assert!(text.contains("# mean_nc_lid:"));
    assert!(text.contains("# nc_size_distribution:"));
}

#[test]
fn centrality_reports_five_metrics() {
    let text = stdout_of(binary().args(["centrality", "--graph"]).arg(data("florentine")));
    let row = text.lines().find(|l| l.starts_with("Medici,")).expect("Medici row");
    assert_eq!(row.split(',').count(), 6);
}

#[test]
fn embed_writes_word2vec_header_and_is_seed_deterministic() {
    let dir = temp_dir("embed");
    let out1 = dir.join("e1.emb");
    let out2 = dir.join("e2.emb");
    for out in [&out1, &out2] {
        stdout_of(
            binary()
                .args(["embed", "--graph"])
                .arg(data("zachary"))
                .args(["--variant", "n2v", "--dim", "16", "--p", "0.25", "--q", "4", "--seed", "7", "--out"])
                .arg(out),
        );
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "same seed must give identical files");
    assert!(a.starts_with(b"34 16\n"));
}

#[test]
fn lid_variant_embedding_also_works() {
    let dir = temp_dir("embed-lid");
    let out = dir.join("lid.emb");
    stdout_of(
        binary()
            .args(["embed", "--graph"])
            .arg(data("florentine"))
            .args(["--variant", "lid-rw", "--dim", "8", "--seed", "3", "--out"])
            .arg(&out),
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("15 8\n"));
}

fn embed_for(graph: &str, dir: &Path) -> PathBuf {
    let out = dir.join(format!("{graph}.emb"));
    stdout_of(
        binary()
            .args(["embed", "--graph"])
            .arg(data(graph))
            .args(["--variant", "n2v", "--dim", "32", "--p", "0.25", "--q", "4", "--seed", "1", "--out"])
            .arg(&out),
    );
    out
}

#[test]
fn evaluate_emits_pernode_and_summary() {
    let dir = temp_dir("evaluate");
    let emb = embed_for("florentine", &dir);
    let text = stdout_of(
        binary()
            .args(["evaluate", "--graph"])
            .arg(data("florentine"))
            .arg("--embedding")
            .arg(&emb)
            .arg("--out")
            .arg(&dir),
    );
    assert!(text.contains("macro_f1="));
    let pernode = std::fs::read_to_string(dir.join("florentine_pernode.csv")).unwrap();
    assert_eq!(pernode.lines().filter(|l| !l.starts_with('#')).count(), 15);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("florentine_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["links"], 20);
    assert!(summary["macro_f1"].as_f64().unwrap() > 0.0);
}

#[test]
fn correlate_marks_degenerate_rows_na() {
    let dir = temp_dir("correlate");
    // a 4-cycle: every node equivalent, NC-LID column is constant
    let path = dir.join("cycle.edges");
    std::fs::write(&path, "a b\nb c\nc d\nd a\n").unwrap();
    let emb = dir.join("cycle.emb");
    stdout_of(
        binary()
            .args(["embed", "--graph"])
            .arg(&path)
            .args(["--variant", "n2v", "--dim", "4", "--seed", "2", "--out"])
            .arg(&emb),
    );
    let out = binary()
        .args(["correlate", "--graph"])
        .arg(&path)
        .arg("--embedding")
        .arg(&emb)
        .output()
        .unwrap();
    assert!(out.status.success(), "degenerate input must not fail the command");
    let text = String::from_utf8(out.stdout).unwrap();
    let nclid_row = text.lines().find(|l| l.starts_with("NC-LID,")).unwrap();
    assert!(nclid_row.contains("NA"), "{nclid_row}");
}

#[test]
fn mwu_emits_table_four_columns() {
    let dir = temp_dir("mwu");
    let emb = embed_for("zachary", &dir);
    let text = stdout_of(
        binary()
            .args(["mwu", "--graph"])
            .arg(data("zachary"))
            .arg("--embedding")
            .arg(&emb),
    );
    let row = text.lines().find(|l| !l.starts_with('#')).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells.len(), 7);
    assert!(cells[4] == "yes" || cells[4] == "no");
}

#[test]
fn pipeline_small_config_is_byte_reproducible() {
    let dir = temp_dir("pipeline");
    let config = dir.join("pipe.conf");
    std::fs::write(
        &config,
        format!(
            "graph = {}\ndims = 8\nps = 0.25,1\nqs = 1,4\nseeds = 1,2,3\n",
            data("florentine").display()
        ),
    )
    .unwrap();
    let out1 = dir.join("run1");
    let out2 = dir.join("run2");
    for out in [&out1, &out2] {
        stdout_of(
            binary()
                .args(["pipeline", "--config"])
                .arg(&config)
                .arg("--out")
                .arg(out),
        );
    }
    for file in ["sweep.csv", "best_n2v.csv", "comparison.csv", "mwu.csv", "summary.json"] {
        let a = std::fs::read(out1.join(file)).unwrap();
        let b = std::fs::read(out2.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    // reproducibility headers echo the effective config
    let sweep = std::fs::read_to_string(out1.join("sweep.csv")).unwrap();
    assert!(sweep.contains("# seeds: 1,2,3"));
    assert!(sweep.contains("# dims: 8"));
}

#[test]
fn pipeline_flag_overrides_beat_config_file() {
    let dir = temp_dir("pipeline-override");
    let config = dir.join("pipe.conf");
    std::fs::write(
        &config,
        format!("graph = {}\ndims = 8\nps = 1\nqs = 1\nseeds = 1\n", data("florentine").display()),
    )
    .unwrap();
    let out = dir.join("out");
    stdout_of(
        binary()
            .args(["pipeline", "--config"])
            .arg(&config)
            .args(["--seeds", "4,5", "--out"])
            .arg(&out),
    );
    let sweep = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(sweep.contains("# seeds: 4,5"), "flag must override file");
}

#[test]
fn pipeline_rejects_bad_config_with_exit_one() {
    let dir = temp_dir("pipeline-bad");
    let config = dir.join("pipe.conf");
    std::fs::write(&config, "dims = ten\n").unwrap();
    let out = binary().args(["pipeline", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn evaluate_mismatched_embedding_exits_one() {
    let dir = temp_dir("mismatch");
    let emb = embed_for("florentine", &dir);
    let out = binary()
        .args(["evaluate", "--graph"])
        .arg(data("zachary"))
        .arg("--embedding")
        .arg(&emb)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mwu_degenerate_split_exits_two() {
    let dir = temp_dir("mwu-degenerate");
    // 4-cycle: NC-LID is constant, the above-mean group is empty
    let path = dir.join("cycle.edges");
    std::fs::write(&path, "a b\nb c\nc d\nd a\n").unwrap();
    let emb = dir.join("cycle.emb");
    stdout_of(
        binary()
            .args(["embed", "--graph"])
            .arg(&path)
            .args(["--variant", "n2v", "--dim", "4", "--seed", "2", "--out"])
            .arg(&emb),
    );
    let out = binary()
        .args(["mwu", "--graph"])
        .arg(&path)
        .arg("--embedding")
        .arg(&emb)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "numerical failure must exit 2");
}
