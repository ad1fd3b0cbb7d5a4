use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn maruin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maruin"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn tables_reproduce_listed_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment": {"tables": {"alpha": ["3/4"], "beta": [2], "omega": ["1/2", "1", "2"]}}}"#,
    );
    let out = maruin(dir.path(), &["--config", &cfg, "tables"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(dir.path().join("tables.csv")).unwrap();
    let cell = |table: &str, memory: &str, omega: &str| -> String {
        text.lines()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|c| c[0] == table && c[1] == memory && c[4] == omega)
            .map(|c| c[5].to_string())
            .unwrap()
    };
    assert_eq!(cell("1", "short", "1"), "1");
    assert_eq!(cell("1", "long", "1"), "2");
    assert_eq!(cell("1", "long", "1/2"), "inf");
    assert_eq!(cell("2", "short", "1"), "1");
    assert_eq!(cell("2", "long", "1"), "1/2");
    assert_eq!(cell("2", "long", "1/2"), "0");
    assert_eq!(cell("2", "long", "2"), "5/4");
    assert_eq!(cell("2", "short", "2"), "3/2");
    assert_eq!(text.lines().count(), 1 + 3 * 4);
}

#[test]
fn config_errors_exit_1_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        (
            r#"{"experiment": {"ruin": {"n_paths": -3}}}"#,
            "experiment.ruin.n_paths",
        ),
        (
            r#"{"innovations": {"law": "gaussian", "cov": [[1]], "scale": 2}}"#,
            "innovations.scale",
        ),
        (r#"{"regime": {"tag": "S3"}}"#, "regime"),
        ("not json", "JSON"),
    ] {
        let cfg = write_config(dir.path(), text);
        let out = maruin(dir.path(), &["--config", &cfg, "rate"]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(key), "{text}: {err}");
    }
    let out = maruin(dir.path(), &["verify", "--suite", "secondary"]);
    assert_eq!(out.status.code(), Some(1));
}

const SMALL: &str = r#"{
    "experiment": {
        "ruin": {"u": [1, 2, 3, 4, 5], "n_paths": 4000, "method": "plain"},
        "segments": {"n_paths": 4, "m_min": 100, "m_max": 10000, "per_decade": 2}
    }
}"#;

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let n = p.file_name().unwrap().to_string_lossy();
            !n.contains(".meta.") && n != "config.json"
        })
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn reruns_are_byte_identical() {
    let mut runs = Vec::new();
    for threads in ["1", "2", "1"] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), SMALL);
        for cmd in ["ruin", "segments", "rate", "tables"] {
            let out = maruin(
                dir.path(),
                &["--config", &cfg, "--threads", threads, "--svg", cmd],
            );
            assert!(
                out.status.success(),
                "{cmd}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            assert!(dir.path().join(format!("{cmd}.meta.json")).exists());
        }
        runs.push(artifacts(dir.path()));
    }
    let names: Vec<&str> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
    for want in [
        "ruin.csv",
        "ruin.json",
        "ruin.svg",
        "segments.csv",
        "segments.svg",
        "rate.json",
        "tables.csv",
    ] {
        assert!(names.contains(&want), "{names:?}");
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn rows_carry_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = maruin(
        dir.path(),
        &["--config", &cfg, "--seed", "7", "--format", "csv", "ruin"],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("ruin.csv")).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    for col in [
        "u",
        "rho_hat",
        "se",
        "method",
        "horizon",
        "tail_bound",
        "n_paths",
        "seed",
        "regime",
    ] {
        assert!(header.contains(&col), "{header:?}");
    }
    let seed = header.iter().position(|c| *c == "seed").unwrap();
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(seed) == Some("7")));
    assert!(!dir.path().join("ruin.json").exists());
}

#[test]
fn verify_single_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = maruin(dir.path(), &["verify", "--only", "6,7"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("PASS")).count(),
        2,
        "{text}"
    );
}
