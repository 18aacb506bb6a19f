//! Replays every checked-in fuzz corpus seed through its parser, so the
//! corpus stays wired to the code even without a nightly fuzzing run.
//! Valid seeds must keep parsing; all seeds must parse without panicking.

use std::path::{Path, PathBuf};

fn corpus_dir(target: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target)
}

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = corpus_dir(target);
    let mut out = Vec::new();
    for entry in std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("corpus dir {} missing: {e}", dir.display()))
    {
        let path = entry.unwrap().path();
        if path.is_file() {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("seed {name} unreadable: {e}"));
            out.push((name, text));
        }
    }
    assert!(!out.is_empty(), "corpus {target} has no seeds");
    out.sort();
    out
}

#[test]
fn graph_corpus_round_trips() {
    for (name, text) in seeds("graph_csv") {
        let g = z2sync::io::parse_graph_csv(&text)
            .unwrap_or_else(|e| panic!("seed {name} must parse: {e}"));
        let again = z2sync::io::parse_graph_csv(&z2sync::io::write_graph_csv(&g)).unwrap();
        assert_eq!(g, again, "round trip failed for {name}");
    }
}

#[test]
fn truth_corpus_round_trips() {
    for (name, text) in seeds("truth_csv") {
        let t = z2sync::io::parse_truth_csv(&text)
            .unwrap_or_else(|e| panic!("seed {name} must parse: {e}"));
        let again = z2sync::io::parse_truth_csv(&z2sync::io::write_truth_csv(&t)).unwrap();
        assert_eq!(t, again);
    }
}

#[test]
fn partition_corpus_round_trips() {
    for (name, text) in seeds("partition_csv") {
        let p = z2sync::io::parse_partition_csv(&text)
            .unwrap_or_else(|e| panic!("seed {name} must parse: {e}"));
        let again = z2sync::io::parse_partition_csv(&z2sync::io::write_partition_csv(&p)).unwrap();
        assert_eq!(p, again);
    }
}

#[test]
fn anchors_corpus_round_trips() {
    for (name, text) in seeds("anchors_csv") {
        let a = z2sync::io::parse_anchors_csv(&text)
            .unwrap_or_else(|e| panic!("seed {name} must parse: {e}"));
        let again = z2sync::io::parse_anchors_csv(&z2sync::io::write_anchors_csv(&a)).unwrap();
        assert_eq!(a, again);
    }
}

#[test]
fn layer_corpus_parses() {
    for (name, text) in seeds("layer_csv") {
        z2sync::io::parse_layer_csv(&text)
            .unwrap_or_else(|e| panic!("seed {name} must parse: {e}"));
    }
}

#[test]
fn identity_corpus_parses() {
    for (name, text) in seeds("identity_csv") {
        z2sync::io::parse_identity_csv(&text)
            .unwrap_or_else(|e| panic!("seed {name} must parse: {e}"));
    }
}

#[test]
fn multiplex_manifest_corpus_parses() {
    for (name, text) in seeds("multiplex_manifest") {
        z2sync::io::parse_multiplex_manifest(&text)
            .unwrap_or_else(|e| panic!("seed {name} must parse: {e}"));
    }
}

#[test]
fn run_manifest_corpus_parses() {
    for (name, text) in seeds("run_manifest") {
        let m: z2sync_cli::RunManifest = serde_json::from_str(&text)
            .unwrap_or_else(|e| panic!("seed {name} must parse: {e}"));
        assert_eq!(m.tool, "z2sync");
    }
}
