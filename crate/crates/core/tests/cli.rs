use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sato_tate::run::read_report;
use sha2::{Digest, Sha256};

fn sato_tate(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sato-tate"))
        .args(args)
        .current_dir(dir)
        .env_remove("SATO_TATE_CACHE_DIR")
        .env("SATO_TATE_BASE_URL", "http://127.0.0.1:9")
        .output()
        .unwrap()
}

fn report_path(dir: &Path, out: &Output) -> PathBuf {
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(stdout.lines().count(), 1, "stdout: {stdout}");
    dir.join(stdout.trim())
}

#[test]
fn eigen_writes_cache_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = sato_tate(
        dir.path(),
        &[
            "eigen",
            "--curve",
            "0,-1,1,-10,-20",
            "--X",
            "1000",
            "--out",
            "r",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = report_path(dir.path(), &out);
    let report = read_report(&path).unwrap();
    assert_eq!(report.command.name(), "eigen");
    assert_eq!(report.result["records"], 167);
    assert_eq!(report.result["excluded_primes"], serde_json::json!([11]));
    assert_eq!(report.result["ramanujan_failures"], serde_json::json!([]));
    assert!(report.violation.is_none());
    let cache = fs::read_dir(dir.path().join("sato-tate-cache"))
        .unwrap()
        .count();
    assert_eq!(cache, 1);
}

#[test]
fn eta_backend_agrees_with_curve() {
    let dir = tempfile::tempdir().unwrap();
    let curve = sato_tate(
        dir.path(),
        &["eigen", "--curve", "0,-1,1,-10,-20", "--X", "500"],
    );
    let eta = sato_tate(dir.path(), &["eigen", "--eta", "1:2,11:2", "--X", "500"]);
    assert_eq!(curve.status.code(), Some(0));
    assert_eq!(
        eta.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&eta.stderr)
    );
    let (c, e) = (
        read_report(&report_path(dir.path(), &curve)).unwrap(),
        read_report(&report_path(dir.path(), &eta)).unwrap(),
    );
    assert_eq!(c.result["records"], e.result["records"]);
    let cache_dir = dir.path().join("sato-tate-cache");
    let rows = |name: &str| -> Vec<String> {
        let text = fs::read_to_string(cache_dir.join(name)).unwrap();
        // p and a_p columns only; the backend column differs
        text.lines()
            .skip(2)
            .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
            .map(|l| l.split(',').take(3).collect::<Vec<_>>().join(","))
            .collect()
    };
    let names: Vec<String> = fs::read_dir(&cache_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    let curve_file = names.iter().find(|n| n.starts_with("curve")).unwrap();
    let eta_file = names.iter().find(|n| n.starts_with("eta")).unwrap();
    assert_eq!(rows(curve_file), rows(eta_file));
    assert_eq!(rows(curve_file).len(), 94);
}

#[test]
fn tset_degree_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = sato_tate(dir.path(), &["tset", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_report(&report_path(dir.path(), &out)).unwrap();
    let csv = fs::read_to_string(dir.path().join(&report.artifacts[0])).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("c0,c1,max_modulus,certification\n"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.conf"),
        "# weight lattice example\nt = 2,1,0\nb = 2,1,0\nout = from-file\n",
    )
    .unwrap();
    let out = sato_tate(
        dir.path(),
        &["weightlat", "--config", "run.conf", "--out", "from-flag"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = report_path(dir.path(), &out);
    assert!(path.starts_with(dir.path().join("from-flag")));
    let report = read_report(&path).unwrap();
    assert_eq!(report.result["monomials"], 9);
    assert_eq!(report.result["weyl_dimension"], 8);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["eigen", "--X", "100"],
        vec!["tset", "--degree", "7"],
        vec!["eigen", "--curve", "0,0,0,0,0", "--X", "100"],
        vec![
            "lfunc",
            "--curve",
            "0,-1,1,-10,-20",
            "--X",
            "100",
            "--b",
            "2",
            "--sigma",
            "1.0",
        ],
    ] {
        let out = sato_tate(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn network_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = sato_tate(dir.path(), &["eigen", "--label", "7.3.b.a", "--X", "100"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn seed_remote_cache(cache: &Path, endpoint: &str, label: &str, body: &str) {
    let dir = cache.join("remote");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{endpoint}__{label}.json"));
    fs::write(&path, body).unwrap();
    fs::write(
        path.with_extension("json.sha256"),
        hex::encode(Sha256::digest(body.as_bytes())),
    )
    .unwrap();
}

#[test]
fn cached_remote_form_and_violation_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    for endpoint in ["mf_newforms", "mf_hecke_nf"] {
        let body = fs::read_to_string(fixtures.join(format!("{endpoint}__7.3.b.a.json"))).unwrap();
        seed_remote_cache(&cache, endpoint, "7.3.b.a", &body);
    }
    let cache_arg = cache.to_str().unwrap();
    let out = sato_tate(
        dir.path(),
        &[
            "cgcheck",
            "--label",
            "7.3.b.a",
            "--X",
            "200",
            "--cache-dir",
            cache_arg,
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // a_2 = 5 breaks |a_2| <= 2 sqrt(2)
    seed_remote_cache(
        &cache,
        "mf_newforms",
        "11.2.a.a",
        r#"{"data": [{"label": "11.2.a.a", "level": 11, "weight": 2, "char_order": 1, "field_poly": [0, 1]}]}"#,
    );
    seed_remote_cache(
        &cache,
        "mf_hecke_nf",
        "11.2.a.a",
        r#"{"data": [{"label": "11.2.a.a", "maxp": 5, "ap": [[5], [-1], [1]]}]}"#,
    );
    let out = sato_tate(
        dir.path(),
        &[
            "eigen",
            "--label",
            "11.2.a.a",
            "--X",
            "5",
            "--cache-dir",
            cache_arg,
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let report = read_report(&report_path(dir.path(), &out)).unwrap();
    assert!(report.violation.is_some());
}
