//! End-to-end checks of the command-line surface: exit codes, report
//! contents, and file outputs.

use std::path::PathBuf;
use std::process::Command;

fn data_file(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn cli() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fibergof"));
    cmd.env_remove("FIBERGOF_SEED");
    cmd
}

#[test]
fn usage_errors_exit_64() {
    let no_args = cli().output().unwrap();
    assert_eq!(no_args.status.code(), Some(64));

    let unknown_flag = cli().args(["test", "--frobnicate"]).output().unwrap();
    assert_eq!(unknown_flag.status.code(), Some(64));

    let missing_blocks = cli()
        .args([
            "test",
            "--model",
            "sbm-full",
            "--input",
            &data_file("digraph18.txt"),
        ])
        .output()
        .unwrap();
    assert_eq!(missing_blocks.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&missing_blocks.stderr).contains("--blocks"));

    let directed_beta = cli()
        .args([
            "test",
            "--model",
            "beta",
            "--directed",
            "--input",
            &data_file("digraph18.txt"),
        ])
        .output()
        .unwrap();
    assert_eq!(directed_beta.status.code(), Some(64));

    let bad_env_seed = cli()
        .env("FIBERGOF_SEED", "not-a-number")
        .args([
            "test",
            "--model",
            "p1-zero",
            "--input",
            &data_file("digraph18.txt"),
        ])
        .output()
        .unwrap();
    assert_eq!(bad_env_seed.status.code(), Some(64));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(cli().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(
        cli().arg("--version").output().unwrap().status.code(),
        Some(0)
    );
    assert_eq!(
        cli().args(["test", "--help"]).output().unwrap().status.code(),
        Some(0)
    );
}

#[test]
fn input_problems_exit_66() {
    let missing = cli()
        .args(["test", "--model", "beta", "--input", "/no/such/file.txt"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(66));

    let dir = tmp_dir("bad-inputs");
    let garbled = dir.join("garbled.txt");
    std::fs::write(&garbled, "alice bob seven\n").unwrap();
    let parse = cli()
        .args(["test", "--model", "beta", "--input", garbled.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(parse.status.code(), Some(66));

    // A parallel edge in simple mode is a content error, not a usage error.
    let multi = dir.join("multi.txt");
    std::fs::write(&multi, "a b 2\nb c\n").unwrap();
    let content = cli()
        .args(["test", "--model", "beta", "--input", multi.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(content.status.code(), Some(66));

    let ragged = dir.join("ragged.csv");
    std::fs::write(&ragged, "1,2,3\n4,5\n").unwrap();
    let table = cli()
        .args([
            "fiber",
            "--model",
            "independence",
            "--input",
            ragged.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(table.status.code(), Some(66));
}

#[test]
fn test_report_fields_and_env_seed() {
    let out = cli()
        .env("FIBERGOF_SEED", "12345")
        .args([
            "test",
            "--model",
            "beta",
            "--input",
            &data_file("digraph18.txt"),
            "--multigraph",
            "--stat",
            "g2",
            "--steps",
            "5000",
            "--burn-in",
            "500",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["model"], "beta(n=18)");
    assert_eq!(report["mode"], "multigraph");
    assert_eq!(report["statistic"], "g2");
    assert_eq!(report["seed"], 12345, "environment seed must be honored");
    assert_eq!(report["steps"], 5000);
    let p = report["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(report["node_labels"][0], "ana");
    assert_eq!(
        report["data_fingerprint"].as_str().unwrap().len(),
        64,
        "fingerprint is hex-encoded SHA-256"
    );
}

#[test]
fn out_and_csv_files_are_written_atomically_with_summary_line() {
    let dir = tmp_dir("outputs");
    let json_path = dir.join("report.json");
    let csv_path = dir.join("report.csv");
    let out = cli()
        .args([
            "test",
            "--model",
            "p1-constant",
            "--input",
            &data_file("digraph18.txt"),
            "--steps",
            "5000",
            "--burn-in",
            "500",
            "--seed",
            "9",
            "--out",
            json_path.to_str().unwrap(),
            "--csv",
            csv_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("p = "), "summary line on stdout: {stdout}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["seed"], 9);

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("model,mode,statistic"));
    assert_eq!(lines.next().unwrap().split(',').count(), header.split(',').count());

    // No leftover temporary files from the atomic write.
    let leftovers: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp."))
        .collect();
    assert!(leftovers.is_empty(), "stale temp files: {leftovers:?}");
}

#[test]
fn fiber_dump_lists_members() {
    let out = cli()
        .args([
            "fiber",
            "--model",
            "independence",
            "--input",
            &data_file("table3x3.csv"),
            "--dump",
            "--check-moves",
            "curated",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let size = report["fiber_size"].as_u64().unwrap();
    assert_eq!(report["members"].as_array().unwrap().len(), size as usize);
    assert_eq!(report["truncated"], false);
    assert_eq!(
        report["connectivity"]["components"], 1,
        "the full swap family must connect every independence fiber"
    );

    // The raw lattice basis is smaller and, without negative detours, may
    // split the same fiber; the report should surface that honestly.
    let kernel = cli()
        .args([
            "fiber",
            "--model",
            "independence",
            "--input",
            &data_file("table3x3.csv"),
            "--check-moves",
            "kernel",
        ])
        .output()
        .unwrap();
    assert_eq!(kernel.status.code(), Some(0));
    let kernel_report: serde_json::Value = serde_json::from_slice(&kernel.stdout).unwrap();
    assert_eq!(kernel_report["connectivity"]["move_count"], 4);
    assert!(kernel_report["connectivity"]["components"].as_u64().unwrap() >= 1);
}

#[test]
fn moves_roundtrip_through_file_and_prune() {
    let dir = tmp_dir("moves");
    let moves_path = dir.join("beta5.json");
    let generate = cli()
        .args([
            "moves",
            "--model",
            "beta",
            "--nodes",
            "5",
            "--out",
            moves_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(generate.status.code(), Some(0));
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&moves_path).unwrap()).unwrap();
    assert_eq!(file["cols"], 20, "5 nodes, 10 dyads, 2 states each");
    assert!(!file["moves"].as_array().unwrap().is_empty());

    // The generated file round-trips as a connectivity move source.
    let graph = dir.join("path5.txt");
    std::fs::write(&graph, "a b\nb c\nc d\nd e\n").unwrap();
    let check = cli()
        .args([
            "fiber",
            "--model",
            "beta",
            "--input",
            graph.to_str().unwrap(),
            "--check-moves",
            moves_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(check.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&check.stdout).unwrap();
    assert!(report["connectivity"]["components"].as_u64().unwrap() >= 1);

    let pruned = cli()
        .args([
            "moves",
            "--model",
            "beta",
            "--nodes",
            "5",
            "--prune",
            graph.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(pruned.status.code(), Some(0));
    let pruned_file: serde_json::Value = serde_json::from_slice(&pruned.stdout).unwrap();
    assert!(
        pruned_file["moves"].as_array().unwrap().len()
            <= file["moves"].as_array().unwrap().len()
    );
}

#[test]
fn simulate_writes_replicate_edge_lists() {
    let dir = tmp_dir("simulate");
    let out = cli()
        .args([
            "simulate",
            "--model",
            "p1-constant",
            "--input",
            &data_file("digraph18.txt"),
            "--count",
            "3",
            "--seed",
            "21",
            "--out-dir",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    for i in 1..=3 {
        let path = dir.join(format!("replicate_{i:04}.txt"));
        let text = std::fs::read_to_string(&path).unwrap();
        // Replicates must parse back as directed edge lists over the same actors.
        let reread = cli()
            .args([
                "fit",
                "--model",
                "p1-constant",
                "--input",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(reread.status.code(), Some(0), "replicate {i} reparses: {text}");
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed: 21"));
}

#[test]
fn strict_flag_gates_on_fit_convergence() {
    // A star digraph pins every margin to its boundary, so the fit cannot
    // converge in the interior and --strict must turn that into exit 2.
    let dir = tmp_dir("strict");
    let star = dir.join("star.txt");
    std::fs::write(&star, "hub a\nhub b\nhub c\nhub d\nhub e\nhub f\n").unwrap();
    let strict = cli()
        .args([
            "test",
            "--model",
            "p1-constant",
            "--input",
            star.to_str().unwrap(),
            "--steps",
            "3000",
            "--burn-in",
            "300",
            "--seed",
            "3",
            "--strict",
        ])
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&strict.stderr));

    let lenient = cli()
        .args([
            "test",
            "--model",
            "p1-constant",
            "--input",
            star.to_str().unwrap(),
            "--steps",
            "3000",
            "--burn-in",
            "300",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(lenient.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&lenient.stdout).unwrap();
    assert!(!report["warnings"].as_array().unwrap().is_empty());
}
