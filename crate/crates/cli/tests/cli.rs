//! Integration tests of the command-line surface: flags, outputs, exit
//! codes, and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mfdfa")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("failed to launch mfdfa")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(path: PathBuf) -> Vec<u8> {
    std::fs::read(&path).unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}

fn two_day_ticks() -> String {
    let mut lines = Vec::new();
    for (day, base) in [("2009-01-02", 8900.0), ("2009-01-05", 8950.0)] {
        for k in 0..40 {
            let h = 9 + k / 4;
            let m = (k % 4) * 15;
            lines.push(format!("{day}T{h:02}:{m:02}:00,{}", base + k as f64));
        }
    }
    lines.join("\n") + "\n"
}

#[test]
fn ingest_two_day_file_produces_two_blocks() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ticks.csv"), two_day_ticks()).unwrap();
    let out = run_in(dir.path(), &["ingest", "--ticks", "ticks.csv", "--out", "rets.txt"]);
    assert_ok(&out);
    assert!(stdout(&out).contains("2 days"));

    let text = std::fs::read_to_string(dir.path().join("rets.txt")).unwrap();
    assert_eq!(text.matches("# DATE").count(), 2);
    assert!(text.starts_with("# INTERVAL 15"));
    assert!(dir.path().join("rets.txt.manifest.json").exists());
}

#[test]
fn strict_ingest_names_the_offending_line() {
    let dir = tempfile::tempdir().unwrap();
    let mut ticks = two_day_ticks();
    ticks.insert_str(0, "this is not a tick\n");
    std::fs::write(dir.path().join("ticks.csv"), ticks).unwrap();

    let out = run_in(
        dir.path(),
        &["ingest", "--ticks", "ticks.csv", "--out", "r.txt", "--strict"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 1"), "stderr: {}", stderr(&out));

    // Lenient mode skips the record, warns, and succeeds.
    let out = run_in(dir.path(), &["ingest", "--ticks", "ticks.csv", "--out", "r.txt"]);
    assert_ok(&out);
    assert!(stderr(&out).contains("line 1"));
}

#[test]
fn generate_is_byte_deterministic_in_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.txt", "b.txt"] {
        let out = run_in(
            dir.path(),
            &["generate", "--model", "fgn", "--n", "4096", "--hurst", "0.7", "--seed", "11", "--out", name],
        );
        assert_ok(&out);
    }
    let out = run_in(
        dir.path(),
        &["generate", "--model", "fgn", "--n", "4096", "--hurst", "0.7", "--seed", "12", "--out", "c.txt"],
    );
    assert_ok(&out);
    assert_eq!(read(dir.path().join("a.txt")), read(dir.path().join("b.txt")));
    assert_ne!(read(dir.path().join("a.txt")), read(dir.path().join("c.txt")));
}

#[test]
fn generate_validates_model_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["generate", "--model", "fgn", "--n", "64", "--seed", "1", "--out", "x.txt"]);
    assert_eq!(out.status.code(), Some(1)); // missing --hurst
    let out = run_in(dir.path(), &["generate", "--model", "iid", "--seed", "1", "--out", "x.txt"]);
    assert_eq!(out.status.code(), Some(1)); // missing --n
    let out = run_in(
        dir.path(),
        &["generate", "--model", "cascade", "--levels", "40", "--seed", "1", "--out", "x.txt"],
    );
    assert_eq!(out.status.code(), Some(1)); // over the depth cap
}

#[test]
fn analyze_writes_all_tables_and_the_q_grid_flag_works() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &[
            "generate", "--model", "cascade", "--levels", "14", "--randomize-placement",
            "--seed", "9", "--out", "casc.txt",
        ],
    ));
    let out = run_in(
        dir.path(),
        &["analyze", "--returns", "casc.txt", "--out-prefix", "casc", "--q-grid", "-5:5:0.25"],
    );
    assert_ok(&out);
    for suffix in ["casc.hq.csv", "casc.fq.csv", "casc.spectrum.csv", "casc.envelope.csv", "casc.summary.json", "casc.manifest.json"] {
        assert!(dir.path().join(suffix).exists(), "{suffix} missing");
    }
    let hq = std::fs::read_to_string(dir.path().join("casc.hq.csv")).unwrap();
    let data_rows = hq.lines().filter(|l| !l.starts_with('#') && !l.starts_with('q')).count();
    assert_eq!(data_rows, 41);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("casc.summary.json")).unwrap()).unwrap();
    assert!(summary["width"].as_f64().unwrap() > 0.3);
    assert_eq!(summary["config"]["q_points"].as_u64(), Some(41));
}

#[test]
fn analyze_on_monofractal_noise_reports_a_narrow_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["generate", "--model", "fgn", "--n", "65536", "--hurst", "0.5", "--seed", "1", "--out", "fgn.txt"],
    ));
    assert_ok(&run_in(dir.path(), &["analyze", "--returns", "fgn.txt", "--out-prefix", "fgn"]));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fgn.summary.json")).unwrap()).unwrap();
    assert!(
        summary["width"].as_f64().unwrap() < 0.15,
        "width {}",
        summary["width"]
    );
}

#[test]
fn surrogate_report_separates_cascade_from_noise() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &[
            "generate", "--model", "cascade", "--levels", "14", "--randomize-placement",
            "--seed", "9", "--out", "casc.txt",
        ],
    ));
    let out = run_in(
        dir.path(),
        &[
            "surrogate", "--returns", "casc.txt", "--kind", "full", "-M", "100", "--seed", "3",
            "--out", "casc.json", "--ensemble-csv", "casc.d.csv",
        ],
    );
    assert_ok(&out);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("casc.json")).unwrap()).unwrap();
    assert!(report["p_value"].as_f64().unwrap() <= 1.0 / 101.0 + 1e-12);
    assert_eq!(report["p_label"].as_str(), Some("< 1/101"));
    assert_eq!(report["rng_algorithm"].as_str(), Some("chacha12"));
    let csv = std::fs::read_to_string(dir.path().join("casc.d.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#') && !l.starts_with("member")).count(), 100);

    assert_ok(&run_in(
        dir.path(),
        &["generate", "--model", "iid", "--n", "4096", "--seed", "77", "--out", "iid.txt"],
    ));
    let out = run_in(
        dir.path(),
        &["surrogate", "--returns", "iid.txt", "--kind", "full", "-M", "100", "--seed", "8", "--out", "iid.json"],
    );
    assert_ok(&out);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("iid.json")).unwrap()).unwrap();
    assert!(report["p_value"].as_f64().unwrap() > 0.05);
}

#[test]
fn surrogate_daily_needs_two_days() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["generate", "--model", "iid", "--n", "4096", "--seed", "1", "--out", "one.txt"],
    ));
    let out = run_in(
        dir.path(),
        &["surrogate", "--returns", "one.txt", "--kind", "daily", "-M", "100", "--seed", "1", "--out", "r.json"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains(">= 2 days"));
}

#[test]
fn acf_always_emits_the_lag_zero_row() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["generate", "--model", "iid", "--n", "8192", "--seed", "5", "--out", "iid.txt", "--day-length", "256"],
    ));
    assert_ok(&run_in(
        dir.path(),
        &["acf", "--returns", "iid.txt", "--transform", "raw", "--max-lag", "100", "--out", "acf.csv"],
    ));
    let text = std::fs::read_to_string(dir.path().join("acf.csv")).unwrap();
    let first_data = text.lines().find(|l| !l.starts_with('#') && !l.starts_with("lag")).unwrap();
    let band = 1.96 / (8192.0_f64).sqrt();
    assert_eq!(first_data, format!("0,1,{band}"));
}

#[test]
fn profile_command_reports_slots() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["generate", "--model", "iid", "--n", "1024", "--seed", "5", "--out", "iid.txt", "--day-length", "128"],
    ));
    let out = run_in(dir.path(), &["profile", "--returns", "iid.txt", "--out", "prof.csv"]);
    assert_ok(&out);
    let text = std::fs::read_to_string(dir.path().join("prof.csv")).unwrap();
    assert_eq!(
        text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("slot")).count(),
        128
    );
}

#[test]
fn degenerate_input_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut constant = String::from("# INTERVAL 1\n# DATE 2009-01-02\n");
    for _ in 0..256 {
        constant.push_str("0.5\n");
    }
    std::fs::write(dir.path().join("const.txt"), constant).unwrap();
    let out = run_in(dir.path(), &["analyze", "--returns", "const.txt", "--out-prefix", "c"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("degenerate"));
}

#[test]
fn config_file_values_are_used_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tool.toml"),
        "[mfdfa]\nq_grid = \"-3:3:0.5\"\npoly_order = 2\n",
    )
    .unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["generate", "--model", "iid", "--n", "8192", "--seed", "2", "--out", "iid.txt"],
    ));
    // Config file alone: 13 q points.
    assert_ok(&run_in(
        dir.path(),
        &["analyze", "--returns", "iid.txt", "--out-prefix", "a", "--config", "tool.toml"],
    ));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["q_points"].as_u64(), Some(13));
    assert_eq!(summary["config"]["poly_order"].as_u64(), Some(2));
    // Flag overrides the file.
    assert_ok(&run_in(
        dir.path(),
        &[
            "analyze", "--returns", "iid.txt", "--out-prefix", "b", "--config", "tool.toml",
            "--q-grid", "-2:2:0.25",
        ],
    ));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("b.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["q_points"].as_u64(), Some(17));
    assert_eq!(summary["config"]["poly_order"].as_u64(), Some(2));
}

#[test]
fn missing_input_file_exits_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["analyze", "--returns", "nope.txt", "--out-prefix", "x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ingest_counts_a_two_year_shaped_dataset() {
    // 510 market days sampled on a grid of 2032 points/day: one tick at the
    // open is enough, the carry-forward fills the session. 2031 returns per
    // day over 510 days is 1,035,810 returns.
    let dir = tempfile::tempdir().unwrap();
    let mut lines = Vec::with_capacity(510);
    let mut date = chrono::NaiveDate::from_ymd_opt(2009, 1, 2).unwrap();
    for _ in 0..510 {
        lines.push(format!("{}T09:00:00,8900.0", date.format("%Y-%m-%d")));
        date = date + chrono::Days::new(1);
    }
    std::fs::write(dir.path().join("ticks.csv"), lines.join("\n") + "\n").unwrap();
    // A session window with 2031 intervals of 15 s: 09:00:00 to 17:27:45.
    let out = run_in(
        dir.path(),
        &[
            "ingest", "--ticks", "ticks.csv", "--out", "rets.txt",
            "--open", "09:00:00", "--close", "17:27:45", "--cutoff", "0",
        ],
    );
    assert_ok(&out);
    assert!(
        stdout(&out).contains("1035810 returns"),
        "stdout: {}",
        stdout(&out)
    );
}

#[test]
fn worker_count_does_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["generate", "--model", "iid", "--n", "4096", "--seed", "3", "--out", "iid.txt"],
    ));
    for (jobs, sub) in [("1", "one"), ("2", "two")] {
        std::fs::create_dir(dir.path().join(sub)).unwrap();
        assert_ok(&run_in(
            dir.path(),
            &[
                "surrogate", "--jobs", jobs, "--returns", "iid.txt", "--kind", "full",
                "-M", "100", "--seed", "6", "--out", &format!("{sub}/report.json"),
            ],
        ));
    }
    assert_eq!(
        read(dir.path().join("one/report.json")),
        read(dir.path().join("two/report.json"))
    );
}

#[test]
fn acf_supports_normalization_and_day_boundary_flags() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["generate", "--model", "iid", "--n", "2048", "--seed", "5", "--out", "iid.txt", "--day-length", "128"],
    ));
    for (extra, name) in [
        (vec![], "plain.csv"),
        (vec!["--normalization", "unbiased"], "unbiased.csv"),
        (vec!["--within-days"], "within.csv"),
    ] {
        let mut args = vec!["acf", "--returns", "iid.txt", "--max-lag", "64", "--out", name];
        args.extend(extra);
        assert_ok(&run_in(dir.path(), &args));
    }
    let plain = read(dir.path().join("plain.csv"));
    assert_ne!(plain, read(dir.path().join("unbiased.csv")));
    assert_ne!(plain, read(dir.path().join("within.csv")));
}
