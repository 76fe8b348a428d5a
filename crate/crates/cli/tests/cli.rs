use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mqs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mqs")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

const SMALL_SURFACE: &str = r#"{"schema": 1, "experiment": "loss-surface", "g": 0.5, "cutoff": 16, "grid": [0.0, 0.5]}"#;

fn run_surface(dir: &Path, out: &str, extra: &[&str]) -> Output {
    let cfg = write_config(dir, SMALL_SURFACE);
    let out = dir.join(out);
    let mut args = vec!["loss-surface", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    mqs(&args)
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
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"schema": 2, "experiment": "loss-surface", "g": 1.0}"#,
        r#"{"schema": 1, "experiment": "loss-surface"}"#,
        r#"{"schema": 1, "experiment": "loss-surface", "g": 1.0, "nbar": 3.0}"#,
        r#"{"schema": 1, "experiment": "loss-surface", "g": 1.0, "grid": [1.5]}"#,
        r#"{"schema": 1, "experiment": "loss-surface", "g": 1.0, "colour": "red"}"#,
        "not json",
    ];
    for body in cases {
        let cfg = write_config(dir.path(), body);
        let out = mqs(&["loss-surface", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{body}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let cfg = write_config(dir.path(), SMALL_SURFACE);
    let out = mqs(&["pc-curve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = mqs(&["loss-surface", "--config", cfg.to_str().unwrap(), "--jobs", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mqs(&["loss-surface", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncation_beyond_tolerance_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_surface(dir.path(), "out", &["--g", "1.5", "--cutoff", "6"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn csv_headers_and_number_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_surface(dir.path(), "out", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/loss-surface.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let header: Vec<&str> = csv.lines().take_while(|l| l.starts_with('#')).collect();
    for key in ["config_hash", "cutoff", "max_trace_deficit"] {
        assert!(header.iter().any(|l| l.contains(key)), "missing {key} in {header:?}");
    }
    assert!(header.iter().any(|l| l.contains("cutoff") && l.contains("16")));
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "R1,R2,D,D_kraus");
    assert_eq!(rows.len(), 1 + 4);
    for field in rows[1].split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{field}");
    }
    let d: f64 = rows[1].split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(d, 1.0);
}

#[test]
fn runs_are_byte_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_surface(dir.path(), "one", &["--jobs", "1"]).status.success());
    assert!(run_surface(dir.path(), "four", &["--jobs", "4"]).status.success());
    assert_eq!(read_dir_sorted(&dir.path().join("one")), read_dir_sorted(&dir.path().join("four")));
}

#[test]
fn cached_replay_matches_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache = cache.to_str().unwrap();
    assert!(run_surface(dir.path(), "plain", &[]).status.success());
    assert!(run_surface(dir.path(), "cold", &["--cache-dir", cache, "--jobs", "3"]).status.success());
    assert!(fs::read_dir(cache).unwrap().count() > 0);
    assert!(run_surface(dir.path(), "warm", &["--cache-dir", cache]).status.success());
    let plain = read_dir_sorted(&dir.path().join("plain"));
    assert_eq!(plain, read_dir_sorted(&dir.path().join("cold")));
    assert_eq!(plain, read_dir_sorted(&dir.path().join("warm")));
}

#[test]
fn corrupt_cache_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    assert!(run_surface(dir.path(), "cold", &["--cache-dir", cache.to_str().unwrap()]).status.success());
    for entry in fs::read_dir(&cache).unwrap() {
        fs::write(entry.unwrap().path(), b"garbage").unwrap();
    }
    assert!(run_surface(dir.path(), "again", &["--cache-dir", cache.to_str().unwrap()]).status.success());
    assert_eq!(read_dir_sorted(&dir.path().join("cold")), read_dir_sorted(&dir.path().join("again")));
}

#[test]
fn overrides_change_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_surface(dir.path(), "a", &[]).status.success());
    assert!(run_surface(dir.path(), "b", &["--g", "0.6"]).status.success());
    let hash = |d: &str| {
        let csv = fs::read_to_string(dir.path().join(d).join("loss-surface.csv")).unwrap();
        csv.lines().find(|l| l.contains("config_hash")).unwrap().to_string()
    };
    assert_ne!(hash("a"), hash("b"));
}

#[test]
fn ofilter_flag_switches_probability() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema": 1, "experiment": "ofilter-curves", "g": 0.6, "kappa": [0, 2], "grid": [0.0, 0.4]}"#,
    );
    let cfg = cfg.to_str().unwrap();
    let p_column = |flag: &str| -> Vec<f64> {
        let out_dir = dir.path().join(flag);
        let out = mqs(&["ofilter-curves", "--config", cfg, "--out", out_dir.to_str().unwrap(), "--pfilt-on", flag]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let csv = fs::read_to_string(out_dir.join("ofilter-curves.csv")).unwrap();
        csv.lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect()
    };
    let lossless = p_column("lossless");
    let lossy = p_column("lossy");
    assert_eq!(lossless.len(), 4);
    assert!(lossless.iter().zip(&lossy).any(|(a, b)| a != b));
    let out = mqs(&["ofilter-curves", "--config", cfg, "--pfilt-on", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
}
