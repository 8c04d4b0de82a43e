use std::path::Path;

use hyperbergman::ingest::{
    embedded_fixture, fetch_level, read_dir_records, validate_records, write_cache, FetchOptions, NewformRecord,
    Source, Violation,
};
use hyperbergman::Error;

fn with_cache(dir: &Path) -> FetchOptions {
    FetchOptions { cache_dir: Some(dir.to_path_buf()), ..FetchOptions::default() }
}

#[test]
fn cache_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let recs = embedded_fixture(29).unwrap().unwrap();
    write_cache(dir.path(), &recs).unwrap();
    let back = read_dir_records(dir.path(), 29).unwrap().unwrap();
    assert_eq!(back, recs);
    for r in &recs {
        let path = dir.path().join("level29").join(format!("{}.json", r.embedding_label));
        assert_eq!(std::fs::read_to_string(path).unwrap(), r.to_json());
    }
    // writing again leaves identical bytes and no temporaries
    write_cache(dir.path(), &back).unwrap();
    let names: Vec<String> = std::fs::read_dir(dir.path().join("level29"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names.len(), 2);
    assert!(names.iter().all(|n| n.ends_with(".json") && !n.starts_with('.')));
}

#[test]
fn cold_and_warm_fetches_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cold = fetch_level(31, &with_cache(dir.path())).unwrap();
    assert!(dir.path().join("level31").is_dir());
    let warm = fetch_level(31, &with_cache(dir.path())).unwrap();
    assert_eq!(cold, warm);
    assert!(cold.iter().all(|r| r.source == Source::Fixture));
}

#[test]
fn concurrent_fetches_never_see_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    std::thread::scope(|s| {
        for _ in 0..8 {
            s.spawn(|| {
                for level in [23, 29, 31, 37] {
                    let recs = fetch_level(level, &with_cache(dir.path())).unwrap();
                    assert_eq!(recs.len(), 2);
                }
            });
        }
    });
    for level in [23, 29, 31, 37] {
        assert_eq!(read_dir_records(dir.path(), level).unwrap().unwrap().len(), 2);
    }
}

#[test]
fn fixture_dir_overrides_embedded_data() {
    let fixtures = tempfile::tempdir().unwrap();
    let mut recs = embedded_fixture(23).unwrap().unwrap();
    for r in &mut recs {
        r.an.truncate(600);
    }
    write_cache(fixtures.path(), &recs).unwrap();
    let opts = FetchOptions { cache_dir: None, fixture_dir: Some(fixtures.path().into()), ..FetchOptions::default() };
    let got = fetch_level(23, &opts).unwrap();
    assert!(got.iter().all(|r| r.terms() == 600));
}

#[test]
fn missing_and_invalid_levels() {
    let opts = FetchOptions { cache_dir: None, ..FetchOptions::default() };
    assert!(matches!(fetch_level(41, &opts), Err(Error::NetworkUnavailableAndNoFixture(41))));
    assert!(matches!(fetch_level(11, &opts), Err(Error::GenusTooSmall { level: 11, genus: 1 })));
    assert!(matches!(fetch_level(25, &opts), Err(Error::LevelNotPrime(25))));
}

#[test]
fn audit_flags_corrupted_records() {
    let mut recs = embedded_fixture(37).unwrap().unwrap();
    assert!(validate_records(&recs, 500).is_clean());
    recs[0].an[1] = ["100".into(), "0".into()];
    recs[1].an[0] = ["2".into(), "0".into()];
    let audit = validate_records(&recs, 500);
    assert!(audit.violations.iter().any(|v| matches!(v, Violation::DeligneBound { n: 2, .. })));
    assert!(audit.violations.iter().any(|v| matches!(v, Violation::Normalization { .. })));
    let audit = validate_records(&recs[..1], 10_000);
    assert!(audit.violations.iter().any(|v| matches!(v, Violation::CountMismatch { .. })));
    assert!(audit.violations.iter().any(|v| matches!(v, Violation::TooFewTerms { .. })));
}

#[test]
fn malformed_records_are_schema_errors() {
    assert!(matches!(NewformRecord::from_json("{\"level\": 23}"), Err(Error::SchemaMismatch(_))));
    let mut r = embedded_fixture(23).unwrap().unwrap().remove(0);
    r.an[3] = ["x".into(), "0".into()];
    assert!(matches!(r.coefficients(), Err(Error::SchemaMismatch(_))));
}

#[cfg(feature = "network")]
mod network {
    use std::io::{BufRead, BufReader, Write};
    use std::net::TcpListener;

    use super::*;

    /// Serves canned API responses for a made-up genus-3 level 41.
    fn serve(listener: TcpListener, requests: usize) {
        let newforms = r#"{"data": [{"label": "41.2.a.a", "dim": 3, "fricke_eigenval": 1, "hecke_orbit_code": 77}]}"#;
        let embeddings = {
            let coeffs = |k: usize| -> Vec<[f64; 2]> {
                (1..=520)
                    .map(|n: usize| {
                        let a = if n == 1 { 1.0 } else { ((n * (k + 1)) % 3) as f64 - 1.0 };
                        [a / (n as f64).sqrt(), 0.0]
                    })
                    .collect()
            };
            let data: Vec<_> = (1..=3)
                .rev()
                .map(|k| serde_json::json!({"embedding_index": k, "an_normalized": coeffs(k)}))
                .collect();
            serde_json::json!({ "data": data }).to_string()
        };
        for stream in listener.incoming().take(requests) {
            let mut stream = stream.unwrap();
            let mut line = String::new();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            reader.read_line(&mut line).unwrap();
            loop {
                let mut h = String::new();
                reader.read_line(&mut h).unwrap();
                if h.trim().is_empty() {
                    break;
                }
            }
            let body = if line.contains("/api/mf_newforms/") {
                newforms.to_string()
            } else if line.contains("hecke_orbit_code=77") {
                embeddings.clone()
            } else {
                "{}".to_string()
            };
            write!(
                stream,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    }

    #[test]
    fn client_parses_and_caches_api_responses() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let endpoint = format!("http://{}", listener.local_addr().unwrap());
        let server = std::thread::spawn(move || serve(listener, 2));
        let cache = tempfile::tempdir().unwrap();
        let opts = FetchOptions {
            fixtures_only: false,
            cache_dir: Some(cache.path().into()),
            endpoint,
            ..FetchOptions::default()
        };
        let recs = fetch_level(41, &opts).unwrap();
        server.join().unwrap();

        assert_eq!(recs.len(), 3);
        let labels: Vec<&str> = recs.iter().map(|r| r.embedding_label.as_str()).collect();
        assert_eq!(labels, ["41.2.a.a.1", "41.2.a.a.2", "41.2.a.a.3"]);
        for r in &recs {
            assert_eq!(r.source, Source::Network);
            assert_eq!(r.atkin_lehner_eigenvalue, Some(1));
            assert_eq!(r.an[0][0], "1");
            // sqrt(n) scaling restores exact integers
            assert!(r.an.iter().all(|[re, _]| ["-1", "0", "1"].contains(&re.as_str())));
        }
        assert!(validate_records(&recs, 500).is_clean());

        // the cache now answers without a server
        let offline = FetchOptions { fixtures_only: true, ..opts };
        assert_eq!(fetch_level(41, &offline).unwrap(), recs);
    }

    #[test]
    fn unreachable_endpoint_is_a_network_error() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let endpoint = format!("http://{}", listener.local_addr().unwrap());
        drop(listener);
        let opts = FetchOptions { fixtures_only: false, cache_dir: None, endpoint, ..FetchOptions::default() };
        assert!(matches!(fetch_level(41, &opts), Err(Error::Network(_))));
    }
}
