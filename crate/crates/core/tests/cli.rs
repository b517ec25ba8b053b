use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

const SMALL: &str = "[geometry]\nnx = 24\nny = 48\npore_diameter = 1.2e-8\n\n[output]\nn_snapshots = 4\n";

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_porecollapse")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// One small run shared by the read-only tests.
fn small_series() -> &'static Path {
    static SERIES: OnceLock<(tempfile::TempDir, PathBuf)> = OnceLock::new();
    &SERIES
        .get_or_init(|| {
            let dir = tempfile::tempdir().unwrap();
            let cfg = write_config(dir.path(), "small.toml", SMALL);
            let series = dir.path().join("v1800.shrb");
            let out = bin(&["run", s(&cfg), "--out", s(&series), "--progress-every", "0"]);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
            (dir, series)
        })
        .1
}

fn info(series: &Path) -> String {
    let out = bin(&["info", s(series)]);
    assert_eq!(code(&out), 0);
    stdout(&out)
}

#[test]
fn run_writes_series_and_manifest() {
    let series = small_series();
    let text = info(series);
    assert!(text.contains("magic = SHRB"));
    assert!(text.contains("nx = 24"));
    assert!(text.contains("ny = 48"));
    assert!(text.contains("n_frames = 5"));
    assert!(text.contains("v0_ms = 1800"));
    let manifest = std::fs::read_to_string(series.with_extension("manifest")).unwrap();
    assert!(manifest.contains("n_frames = 5"));
    assert!(manifest.contains("split = "));
}

#[test]
fn negative_velocity_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let out = bin(&["run", s(&cfg), "--v0", "-5", "--out", s(&dir.path().join("x.shrb"))]);
    assert_eq!(code(&out), 2);
    assert!(!dir.path().join("x.shrb").exists());
}

#[test]
fn missing_config_and_bad_keys_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&bin(&["run", s(&dir.path().join("absent.toml"))])), 2);
    let cfg = write_config(dir.path(), "typo.toml", "[geometry]\nnxx = 4\n");
    assert_eq!(code(&bin(&["run", s(&cfg)])), 2);
    assert_eq!(code(&bin(&["frobnicate"])), 2);
    assert_eq!(code(&bin(&["--help"])), 0);
}

#[test]
fn numerical_abort_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "violent.toml",
        "[geometry]\nnx = 16\nny = 32\npore_diameter = 1.0e-8\nimpact_velocity = 30000.0\n\n[solver]\ncfl = 0.99\n\n[output]\nn_snapshots = 3\n",
    );
    let out = bin(&["run", s(&cfg), "--out", s(&dir.path().join("v.shrb")), "--progress-every", "0"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("negative density"));
}

#[test]
fn analyze_reports() {
    let series = small_series();
    let dir = tempfile::tempdir().unwrap();
    let out_dir = s(dir.path());

    let out = bin(&["analyze", s(series), "--metric", "pdf", "--frame", "last", "--bins", "20", "--out", out_dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("pdf_T_v1800_f4.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "bin_lo,bin_hi,density");
    assert_eq!(rows.len(), 21);
    let width: f64 = {
        let f: Vec<f64> = rows[1].split(',').map(|x| x.parse().unwrap()).collect();
        f[1] - f[0]
    };
    let mass: f64 = rows[1..].iter().map(|r| r.split(',').nth(2).unwrap().parse::<f64>().unwrap() * width).sum();
    assert!((mass - 1.0).abs() < 1e-9, "pdf integrates to {mass}");

    let out = bin(&["analyze", s(series), "--metric", "collapse", "--out", out_dir]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("collapse_frame = "));
    let text = std::fs::read_to_string(dir.path().join("collapse_v1800.csv")).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("frame,t_ps,pore_cells,Tmax_K,collapsed"));

    let out = bin(&["analyze", s(series), "--metric", "band", "--x-nm", "10", "--y-nm", "5", "40", "--out", out_dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("band_v1800.csv").exists());

    for metric in ["spectrum", "haar"] {
        let out = bin(&["analyze", s(series), "--metric", metric, "--out", out_dir]);
        assert_eq!(code(&out), 0, "{metric}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn compare_against_itself() {
    let series = small_series();
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["compare", s(series), s(series), "--metric", "rmse", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 6);
    for row in &rows[1..] {
        assert_eq!(row.split(',').nth(2).unwrap().parse::<f64>().unwrap(), 0.0, "{row}");
    }
    let out = bin(&["compare", s(series), s(series), "--metric", "lp", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).lines().skip(1).all(|r| r.ends_with(",10,0e0")));
}

#[test]
fn unreadable_series_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.shrb");
    std::fs::write(&junk, b"not a series").unwrap();
    assert_eq!(code(&bin(&["info", s(&junk)])), 2);
    assert_eq!(code(&bin(&["analyze", s(&junk), "--metric", "haar"])), 2);
}

fn manifest_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.trim_start().strip_prefix('=').map(|v| v.trim().to_string()))
        .unwrap_or_else(|| panic!("no {key} in manifest"))
}

#[test]
fn presets_sweep_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "tiny.toml",
        "[geometry]\nnx = 4\nny = 8\npore_diameter = 0.0\n\n[output]\nn_snapshots = 1\nsnapshot_dt = 1.0e-13\n",
    );
    let mut counts = Vec::new();
    for preset in ["paper-test", "paper-trainval"] {
        let sweep = dir.path().join(preset);
        let out = bin(&["sweep", s(&cfg), "--velocities", preset, "--jobs", "4", "--out", s(&sweep)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let manifest = std::fs::read_to_string(sweep.join("manifest.txt")).unwrap();
        assert_eq!(manifest_value(&manifest, "n_failed"), "0");
        counts.push(manifest_value(&manifest, "n_runs").parse::<usize>().unwrap());
    }
    assert_eq!(counts, [26, 88]);

    let trainval = dir.path().join("paper-trainval");
    let export = dir.path().join("export");
    let out = bin(&["export-dataset", s(&trainval.join("manifest.txt")), "--out", s(&export)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = std::fs::read_to_string(export.join("manifest.txt")).unwrap();
    assert_eq!(manifest_value(&manifest, "n_runs"), "88");
    assert_eq!(manifest_value(&manifest, "normalized"), "true");
    let first = manifest_value(&manifest, "run.0.series");
    assert!(info(&export.join(first)).contains("n_frames = 2"));

    let same = bin(&["export-dataset", s(&trainval.join("manifest.txt")), "--out", s(&trainval)]);
    assert_eq!(code(&same), 2);
}

#[test]
fn shipped_config_matches_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/base.toml");
    let cfg = porecollapse::solver::RunConfig::load(&path).unwrap();
    assert_eq!(cfg, porecollapse::solver::RunConfig::default());
}
