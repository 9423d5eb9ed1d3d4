use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use sato_tate::forms::remote::{ingest_remote_newform, RemoteClient};
use sato_tate::forms::CharacterKind;
use sato_tate::ordinarity::ordinary_density;
use sato_tate::satake::{classes_from_records, DEFAULT_TOL};
use sato_tate::Error;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

/// Minimal HTTP server answering `/api/{endpoint}/?label=L&_format=json`
/// from a map `(endpoint, label) -> body`; unknown labels get empty data.
struct MockServer {
    url: String,
    hits: Arc<AtomicUsize>,
}

fn serve(bodies: HashMap<(String, String), String>) -> MockServer {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            counter.fetch_add(1, Ordering::SeqCst);
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request = String::new();
            reader.read_line(&mut request).unwrap();
            loop {
                let mut header = String::new();
                if reader.read_line(&mut header).unwrap() == 0 || header == "\r\n" {
                    break;
                }
            }
            let target = request.split_whitespace().nth(1).unwrap_or("");
            let endpoint = target.split('/').nth(2).unwrap_or("").to_string();
            let label = target
                .split(['?', '&'])
                .find_map(|kv| kv.strip_prefix("label="))
                .unwrap_or("")
                .to_string();
            let body = bodies
                .get(&(endpoint, label))
                .cloned()
                .unwrap_or_else(|| r#"{"data": []}"#.to_string());
            let _ = write!(
                stream,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    MockServer { url, hits }
}

fn fixture(endpoint: &str, label: &str) -> ((String, String), String) {
    let path = Path::new(FIXTURES).join(format!("{endpoint}__{label}.json"));
    (
        (endpoint.into(), label.into()),
        std::fs::read_to_string(path).unwrap(),
    )
}

fn weight_three_server() -> MockServer {
    serve(HashMap::from([
        fixture("mf_newforms", "7.3.b.a"),
        fixture("mf_hecke_nf", "7.3.b.a"),
    ]))
}

#[test]
fn weight_three_descriptor() {
    let server = weight_three_server();
    let dir = tempfile::tempdir().unwrap();
    let (desc, records) = ingest_remote_newform("7.3.b.a", &server.url, dir.path()).unwrap();
    assert_eq!((desc.level, desc.weight), (7, 3));
    assert_eq!(desc.nebentypus.order % 2, 0);
    assert!(matches!(
        desc.nebentypus.kind,
        CharacterKind::Kronecker { disc: -7 }
    ));
    assert_eq!(desc.is_cm, Some(true));
    assert_eq!(records.len(), 168);
    assert_eq!(records[0].p, 2);
    assert_eq!(records[0].exact_integer(), Some(-3));
    // inert primes of Q(sqrt(-7)) have a_p = 0
    for r in records.iter().filter(|r| r.p != 7) {
        if sato_tate::numtheory::kronecker_symbol(-7, r.p as i64).unwrap() == -1 {
            assert_eq!(r.exact_integer(), Some(0), "p = {}", r.p);
        }
    }
    let classes = classes_from_records(&desc, &records, DEFAULT_TOL).unwrap();
    assert_eq!(classes.len(), 167);
    assert!(classes.iter().all(|c| c.weight == 3));
}

#[test]
fn warm_cache_needs_no_network() {
    let server = weight_three_server();
    let dir = tempfile::tempdir().unwrap();
    let first = ingest_remote_newform("7.3.b.a", &server.url, dir.path()).unwrap();
    assert_eq!(server.hits.load(Ordering::SeqCst), 2);
    let second = ingest_remote_newform("7.3.b.a", &server.url, dir.path()).unwrap();
    assert_eq!(server.hits.load(Ordering::SeqCst), 2);
    let offline = ingest_remote_newform("7.3.b.a", "http://127.0.0.1:9", dir.path()).unwrap();
    assert_eq!(first, second);
    assert_eq!(first, offline);
    assert!(dir
        .path()
        .join("remote/mf_newforms__7.3.b.a.json.sha256")
        .exists());
}

#[test]
fn unknown_and_unreachable() {
    let server = weight_three_server();
    let dir = tempfile::tempdir().unwrap();
    let err = ingest_remote_newform("not-a-label", &server.url, dir.path()).unwrap_err();
    assert!(matches!(err, Error::UnknownLabel(_)));
    // well-formed label the database does not know
    let err = ingest_remote_newform("5.2.a.a", &server.url, dir.path()).unwrap_err();
    assert!(matches!(err, Error::UnknownLabel(_)), "{err}");
    let err = ingest_remote_newform(
        "7.3.b.a",
        "http://127.0.0.1:9",
        tempfile::tempdir().unwrap().path(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Network(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn corrupted_cache_is_detected() {
    let server = weight_three_server();
    let dir = tempfile::tempdir().unwrap();
    ingest_remote_newform("7.3.b.a", &server.url, dir.path()).unwrap();
    let path = dir.path().join("remote/mf_hecke_nf__7.3.b.a.json");
    let body = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, body.replacen("[-3]", "[-4]", 1)).unwrap();
    let err = ingest_remote_newform("7.3.b.a", &server.url, dir.path()).unwrap_err();
    assert!(matches!(err, Error::Checksum(_)), "{err}");
}

#[test]
fn malformed_responses() {
    let server = serve(HashMap::from([
        (
            ("mf_newforms".into(), "9.2.a.a".into()),
            "<html>".to_string(),
        ),
        fixture("mf_newforms", "7.3.b.a"),
        (
            ("mf_hecke_nf".into(), "7.3.b.a".into()),
            r#"{"data": [{"label": "7.3.b.a", "maxp": 3, "ap": [[1], [2], [3]]}]}"#.to_string(),
        ),
    ]));
    let dir = tempfile::tempdir().unwrap();
    let err = ingest_remote_newform("9.2.a.a", &server.url, dir.path()).unwrap_err();
    assert!(matches!(err, Error::Malformed(_)), "{err}");
    let err = ingest_remote_newform("7.3.b.a", &server.url, dir.path()).unwrap_err();
    assert!(matches!(err, Error::Malformed(_)), "{err}");
}

#[test]
fn quadratic_coefficient_field() {
    // synthetic row over Q(b), b^2 + b - 1 = 0, embedded at b = 0.618...
    let newform = r#"{"data": [{"label": "23.2.a.a", "level": 23, "weight": 2, "char_order": 1,
        "field_poly": [-1, 1, 1], "field_root": [0.6180339887498949, 0.0], "is_cm": false}]}"#;
    let hecke =
        r#"{"data": [{"label": "23.2.a.a", "maxp": 5, "ap": [[0, 1], ["1", "1"], [-1, -2]]}]}"#;
    let server = serve(HashMap::from([
        (
            ("mf_newforms".into(), "23.2.a.a".into()),
            newform.to_string(),
        ),
        (("mf_hecke_nf".into(), "23.2.a.a".into()), hecke.to_string()),
    ]));
    let dir = tempfile::tempdir().unwrap();
    let client = RemoteClient::new(format!("{}/", server.url), dir.path());
    let (desc, records) = client.newform("23.2.a.a").unwrap();
    assert!(!desc.is_rational());
    let b = (5f64.sqrt() - 1.0) / 2.0;
    let expected = [b, 1.0 + b, -1.0 - 2.0 * b];
    for (r, e) in records.iter().zip(expected) {
        assert!((r.embedded.re - e).abs() < 1e-12 && r.embedded.im == 0.0);
    }
    // norms: N(b) = -1, N(1+b) = -1, N(-1-2b) = -5
    let density = ordinary_density(&desc, &records, 5).unwrap();
    assert_eq!(density.non_ordinary, vec![5]);
    assert_eq!(density.ordinary, 2);
}
