//! End-to-end tests of the `dqpt` binary: artifact schemas, exit codes,
//! manifest checksums, and run-to-run reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dqpt::cli::{load_config, sha256_hex, CriticalRecord, RunManifest};

const TFI_SMALL: &str = "\
model = tfi
h_pre = 0.5
h_post = 1.5
n_cells = 40
t_min = 0.0
t_max = 5.0
n_time = 11
outputs = entropy, echo, otoc, rate
";

const SSH_SMALL: &str = "\
model = ssh
t1 = 1.0
t2_pre = 0.5
t2_post = 2.0
n_cells = 40
t_min = 0.0
t_max = 5.0
n_time = 11
outputs = entropy, echo, otoc, rate
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dqpt"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).expect("write config");
    path
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn sweep(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("sweep")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("run dqpt sweep")
}

/// Parse a manifest and blank the timestamp, the one field allowed to differ
/// between reruns.
fn manifest_sans_timestamp(path: &Path) -> serde_json::Value {
    let text = fs::read_to_string(path).expect("read manifest");
    let mut value: serde_json::Value = serde_json::from_str(&text).expect("parse manifest");
    let obj = value.as_object_mut().expect("manifest is an object");
    assert!(obj.contains_key("timestamp"), "manifest has a timestamp");
    obj["timestamp"] = serde_json::Value::Null;
    value
}

#[test]
fn sweep_writes_the_three_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tfi.conf", TFI_SMALL);
    let out = dir.path().join("out");
    let result = sweep(&config, &out, &[]);
    assert_eq!(result.status.code(), Some(0), "{}", stderr_of(&result));

    let samples = fs::read_to_string(out.join("samples.csv")).unwrap();
    let mut lines = samples.lines();
    assert_eq!(lines.next(), Some("k,t,entropy,echo,otoc"));
    // 40 cells -> 20 TFI momenta, 11 times each, momentum-major.
    assert_eq!(samples.lines().count(), 1 + 20 * 11);
    assert!(samples.ends_with('\n'));
    assert!(!samples.contains('\r'));

    let rate = fs::read_to_string(out.join("rate.csv")).unwrap();
    assert_eq!(rate.lines().next(), Some("t,lambda"));
    assert_eq!(rate.lines().count(), 1 + 11);

    let manifest: RunManifest =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.tool_version, env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest.skipped_modes, 0);
    assert!(manifest.timestamp.contains('T'), "RFC 3339 timestamp");

    // The echoed config round-trips to exactly what load_config produced.
    let parsed = load_config(&config).unwrap();
    assert_eq!(manifest.config_echo, parsed.sweep);

    // Checksums cover exactly the data files and match their bytes.
    assert_eq!(manifest.checksums.len(), 2);
    for name in ["samples.csv", "rate.csv"] {
        let bytes = fs::read(out.join(name)).unwrap();
        assert_eq!(manifest.checksums[name], sha256_hex(&bytes), "{name}");
    }
}

#[test]
fn sweep_emits_only_requested_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "echo_only.conf",
        &TFI_SMALL.replace("outputs = entropy, echo, otoc, rate", "outputs = echo"),
    );
    let out = dir.path().join("out");
    let result = sweep(&config, &out, &[]);
    assert_eq!(result.status.code(), Some(0), "{}", stderr_of(&result));

    let samples = fs::read_to_string(out.join("samples.csv")).unwrap();
    assert_eq!(samples.lines().next(), Some("k,t,echo"));
    assert!(!out.join("rate.csv").exists());

    let manifest: RunManifest =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(
        manifest.checksums.keys().collect::<Vec<_>>(),
        vec!["samples.csv"]
    );
}

#[test]
fn reruns_are_byte_identical_except_the_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "ssh.conf", SSH_SMALL);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    assert_eq!(sweep(&config, &out_a, &[]).status.code(), Some(0));
    assert_eq!(sweep(&config, &out_b, &[]).status.code(), Some(0));

    for name in ["samples.csv", "rate.csv"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
    assert_eq!(
        manifest_sans_timestamp(&out_a.join("manifest.json")),
        manifest_sans_timestamp(&out_b.join("manifest.json"))
    );
}

#[test]
fn thread_count_does_not_change_the_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tfi.conf", TFI_SMALL);
    let out_1 = dir.path().join("t1");
    let out_7 = dir.path().join("t7");
    assert_eq!(
        sweep(&config, &out_1, &["--threads", "1"]).status.code(),
        Some(0)
    );
    assert_eq!(
        sweep(&config, &out_7, &["--threads", "7"]).status.code(),
        Some(0)
    );
    for name in ["samples.csv", "rate.csv"] {
        assert_eq!(
            fs::read(out_1.join(name)).unwrap(),
            fs::read(out_7.join(name)).unwrap(),
            "{name} depends on the thread count"
        );
    }
}

#[test]
fn config_errors_exit_1_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cases: &[(&str, &str)] = &[
        (
            &TFI_SMALL
                .replace("t_min = 0.0", "t_min = 7.0")
                .replace("t_max = 5.0", "t_max = 2.0"),
            "t_min",
        ),
        (&format!("{TFI_SMALL}cusp_budget = 3\n"), "cusp_budget"),
        (&TFI_SMALL.replace("h_post = 1.5\n", ""), "h_post"),
        (&format!("{TFI_SMALL}t2_pre = 0.5\n"), "does not apply"),
        (&TFI_SMALL.replace("h_pre = 0.5", "h_pre = five"), "h_pre"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let config = write_config(dir.path(), &format!("bad_{i}.conf"), text);
        let result = sweep(&config, &out, &[]);
        assert_eq!(result.status.code(), Some(1), "case {i}");
        let err = stderr_of(&result);
        assert!(err.contains(needle), "case {i}: `{needle}` not in `{err}`");
    }
}

#[test]
fn io_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();

    // Unreadable config.
    let result = sweep(&dir.path().join("absent.conf"), &dir.path().join("o"), &[]);
    assert_eq!(result.status.code(), Some(2), "{}", stderr_of(&result));

    // Output directory path occupied by a regular file.
    let config = write_config(dir.path(), "tfi.conf", TFI_SMALL);
    let blocked = dir.path().join("blocked");
    fs::write(&blocked, "not a directory").unwrap();
    let result = sweep(&config, &blocked, &[]);
    assert_eq!(result.status.code(), Some(2), "{}", stderr_of(&result));
}

#[test]
fn degenerate_ssh_couplings_are_a_config_error() {
    // t1 = t2 = 0 would close the gap at every momentum; the parameter
    // validation rejects it up front. (An all-gapless grid is therefore
    // unreachable from a config, and the exit-3 branch stays defensive;
    // its code mapping is covered by unit tests.)
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "flat.conf",
        &SSH_SMALL
            .replace("t1 = 1.0", "t1 = 0.0")
            .replace("t2_pre = 0.5", "t2_pre = 0.0")
            .replace("t2_post = 2.0", "t2_post = 0.0"),
    );
    let result = sweep(&config, &dir.path().join("out"), &[]);
    assert_eq!(result.status.code(), Some(1), "{}", stderr_of(&result));
    assert!(stderr_of(&result).contains("t1 and t2"));
}

#[test]
fn critical_reports_the_tfi_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "tfi.conf",
        &TFI_SMALL.replace("n_cells = 40", "n_cells = 400"),
    );
    let out = dir.path().join("out");
    let result = bin()
        .args(["critical", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(0), "{}", stderr_of(&result));
    assert!(stdout_of(&result).contains("triad confirmed"));

    let records: Vec<CriticalRecord> =
        serde_json::from_str(&fs::read_to_string(out.join("critical.json")).unwrap()).unwrap();
    assert_eq!(records.len(), 1);
    let rec = &records[0];
    assert!((rec.point.k_star - 2.636232143305636).abs() < 1e-9);
    // Default n_max_critical_times = 3 -> indices 0..=3.
    assert_eq!(rec.point.critical_times.len(), 4);
    assert!((rec.point.critical_times[0] - 1.98691765315922).abs() < 1e-9);
    assert!(rec.point.triad.fisher_zero_ok);
    assert!(rec.point.triad.entropy_max_ok);
    assert!(rec.point.triad.otoc_zero_ok);
    assert!(rec.residuals.fisher_echo_min < 1e-18);
    assert!(rec.residuals.entropy_deviation < 1e-10);
    assert!(rec.residuals.otoc_max < 1e-10);
}

#[test]
fn critical_reports_the_ssh_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "ssh.conf",
        &SSH_SMALL
            .replace("n_cells = 40", "n_cells = 400")
            .replace("outputs = entropy, echo, otoc, rate\n", "outputs = echo\nn_max_critical_times = 5\n"),
    );
    let out = dir.path().join("out");
    let result = bin()
        .args(["critical", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(0), "{}", stderr_of(&result));

    let records: Vec<CriticalRecord> =
        serde_json::from_str(&fs::read_to_string(out.join("critical.json")).unwrap()).unwrap();
    assert_eq!(records.len(), 1);
    let rec = &records[0];
    assert!((rec.point.k_star - 2.498091544796509).abs() < 1e-9);
    assert_eq!(rec.point.critical_times.len(), 6);
    assert!((rec.point.critical_times[0] - 1.1708024551734544).abs() < 1e-9);
    assert!(rec.point.triad.fisher_zero_ok && rec.point.triad.otoc_zero_ok);
}

#[test]
fn critical_without_a_transition_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "mild.conf",
        &TFI_SMALL.replace("h_post = 1.5", "h_post = 0.8"),
    );
    let out = dir.path().join("out");
    let result = bin()
        .args(["critical", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(4), "{}", stderr_of(&result));
    assert!(stdout_of(&result).contains("no DQPT for this quench"));
    assert!(!out.join("critical.json").exists());
}

#[test]
fn verify_passes_on_both_models() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [("tfi.conf", TFI_SMALL), ("ssh.conf", SSH_SMALL)] {
        let config = write_config(dir.path(), name, text);
        let result = bin()
            .args(["verify", "--config"])
            .arg(&config)
            .args(["--threads", "4"])
            .output()
            .unwrap();
        assert_eq!(result.status.code(), Some(0), "{}", stderr_of(&result));
        let log = stdout_of(&result);
        assert!(log.contains("verification passed"), "{log}");
        assert!(log.contains("entropy"), "{log}");
        assert!(log.contains("echo"), "{log}");
        assert!(log.contains("otoc"), "{log}");
    }
}

#[test]
fn verify_with_a_corrupted_closed_form_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tfi.conf", TFI_SMALL);
    let result = bin()
        .args(["verify", "--config"])
        .arg(&config)
        .env("DQPT_VERIFY_MUTATION", "1")
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(5), "{}", stderr_of(&result));
    let log = stdout_of(&result);
    assert!(log.contains("FAILED"), "{log}");
    assert!(log.contains("otoc"), "worst diagnostic named: {log}");
    assert!(log.contains("k ="), "worst location named: {log}");
}

#[test]
fn verify_skips_gapless_modes_and_still_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "gapless.conf",
        &SSH_SMALL.replace("t2_pre = 0.5", "t2_pre = 1.0"),
    );
    let result = bin()
        .args(["verify", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(0), "{}", stderr_of(&result));
    let log = stdout_of(&result);
    assert!(log.contains("skipped 1 gapless mode"), "{log}");
    assert!(log.contains("verification passed"), "{log}");
}

#[test]
fn usage_errors_and_version() {
    let version = bin().arg("--version").output().unwrap();
    assert_eq!(version.status.code(), Some(0));
    assert!(stdout_of(&version).contains(env!("CARGO_PKG_VERSION")));

    let missing = bin().arg("sweep").output().unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let zero_threads = bin()
        .args(["verify", "--config", "x.conf", "--threads", "0"])
        .output()
        .unwrap();
    assert_eq!(zero_threads.status.code(), Some(1));
    assert!(stderr_of(&zero_threads).contains("threads"));
}
