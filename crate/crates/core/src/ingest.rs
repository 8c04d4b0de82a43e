//! Newform coefficient records: vendored fixtures, an on-disk cache and an
//! optional HTTP client for the public modular-forms database.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{divisor_count, genus_x0_prime, is_prime};
use crate::error::{Error, Result};

pub const DEFAULT_MIN_TERMS: usize = 500;
pub const DEFAULT_ENDPOINT: &str = "https://www.lmfdb.org";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Network,
    #[default]
    Fixture,
}

/// One complex embedding of a weight-2 newform of prime level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewformRecord {
    pub level: u64,
    pub weight: u32,
    /// Galois orbit label, e.g. `23.2.a.a`.
    pub label: String,
    pub embedding_index: u32,
    pub embedding_label: String,
    /// Eigenvalue of the Fricke involution: `f | W_N = eps f`.
    pub atkin_lehner_eigenvalue: Option<i8>,
    /// `[re, im]` decimal strings for `a_1, a_2, ...`.
    pub an: Vec<[String; 2]>,
    #[serde(default)]
    pub source: Source,
    /// Unix seconds, for network records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieved_at: Option<u64>,
}

impl NewformRecord {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::SchemaMismatch(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records serialize");
        s.push('\n');
        s
    }

    pub fn terms(&self) -> usize {
        self.an.len()
    }

    pub fn coefficients(&self) -> Result<Vec<Complex64>> {
        self.an
            .iter()
            .enumerate()
            .map(|(i, [re, im])| {
                let parse = |s: &str| {
                    s.trim().parse::<f64>().map_err(|_| {
                        Error::SchemaMismatch(format!("{}: a_{} has bad component '{s}'", self.embedding_label, i + 1))
                    })
                };
                Ok(Complex64::new(parse(re)?, parse(im)?))
            })
            .collect()
    }
}

macro_rules! fixture {
    ($level:literal, $name:literal) => {
        ($level, include_str!(concat!("../fixtures/level", stringify!($level), "/", $name, ".json")))
    };
}

/// Vendored fixtures for levels 23, 29, 31 and 37.
static EMBEDDED: &[(u64, &str)] = &[
    fixture!(23, "23.2.a.a.1"),
    fixture!(23, "23.2.a.a.2"),
    fixture!(29, "29.2.a.a.1"),
    fixture!(29, "29.2.a.a.2"),
    fixture!(31, "31.2.a.a.1"),
    fixture!(31, "31.2.a.a.2"),
    fixture!(37, "37.2.a.a.1"),
    fixture!(37, "37.2.a.b.1"),
];

pub fn embedded_levels() -> Vec<u64> {
    let mut v: Vec<u64> = EMBEDDED.iter().map(|e| e.0).collect();
    v.dedup();
    v
}

pub fn embedded_fixture(level: u64) -> Result<Option<Vec<NewformRecord>>> {
    let recs: Vec<NewformRecord> =
        EMBEDDED.iter().filter(|e| e.0 == level).map(|e| NewformRecord::from_json(e.1)).collect::<Result<_>>()?;
    Ok((!recs.is_empty()).then_some(recs))
}

/// Where `fetch_level` looks for data.
#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub min_terms: usize,
    /// Never touch the network.
    pub fixtures_only: bool,
    pub cache_dir: Option<PathBuf>,
    /// Directory laid out like the cache; overrides the embedded fixtures.
    pub fixture_dir: Option<PathBuf>,
    pub endpoint: String,
}

impl Default for FetchOptions {
    fn default() -> Self {
        Self {
            min_terms: DEFAULT_MIN_TERMS,
            fixtures_only: true,
            cache_dir: std::env::var_os("HYPERBERGMAN_CACHE").map(PathBuf::from),
            fixture_dir: None,
            endpoint: DEFAULT_ENDPOINT.into(),
        }
    }
}

fn level_dir(root: &Path, level: u64) -> PathBuf {
    root.join(format!("level{level}"))
}

/// Records in `root/levelN/*.json`, sorted by embedding label.
pub fn read_dir_records(root: &Path, level: u64) -> Result<Option<Vec<NewformRecord>>> {
    let dir = level_dir(root, level);
    if !dir.is_dir() {
        return Ok(None);
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| Error::io(&dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut recs = Vec::with_capacity(paths.len());
    for p in paths {
        let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        recs.push(NewformRecord::from_json(&text)?);
    }
    Ok((!recs.is_empty()).then_some(recs))
}

/// Write each record to `root/levelN/<embedding label>.json` via a temporary
/// file and a rename, so readers never see a partial file.
pub fn write_cache(root: &Path, records: &[NewformRecord]) -> Result<()> {
    static WRITES: AtomicU64 = AtomicU64::new(0);
    for r in records {
        let dir = level_dir(root, r.level);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join(format!("{}.json", r.embedding_label));
        let unique = WRITES.fetch_add(1, Ordering::Relaxed);
        let tmp = dir.join(format!(".{}.{}.{unique}.tmp", r.embedding_label, std::process::id()));
        fs::write(&tmp, r.to_json()).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn usable(recs: &[NewformRecord], genus: u64, min_terms: usize) -> bool {
    recs.len() as u64 == genus && recs.iter().all(|r| r.terms() >= min_terms)
}

/// All embeddings of the weight-2 newforms of prime level `level`.
///
/// Looks in the cache, then the fixtures, then (if allowed and compiled in)
/// the network. The record count must equal the genus of X0(level).
pub fn fetch_level(level: u64, opts: &FetchOptions) -> Result<Vec<NewformRecord>> {
    if !is_prime(level) {
        return Err(Error::LevelNotPrime(level));
    }
    let genus = genus_x0_prime(level);
    if genus < 2 {
        return Err(Error::GenusTooSmall { level, genus });
    }
    if let Some(cache) = &opts.cache_dir {
        if let Some(recs) = read_dir_records(cache, level)? {
            if usable(&recs, genus, opts.min_terms) {
                return Ok(recs);
            }
        }
    }
    let fixture = match &opts.fixture_dir {
        Some(dir) => read_dir_records(dir, level)?,
        None => embedded_fixture(level)?,
    };
    let recs = match fixture {
        Some(recs) if usable(&recs, genus, opts.min_terms) => recs,
        _ if !opts.fixtures_only => network::fetch(level, opts)?,
        _ => return Err(Error::NetworkUnavailableAndNoFixture(level)),
    };
    if !usable(&recs, genus, opts.min_terms) {
        return Err(Error::SchemaMismatch(format!(
            "level {level}: got {} embeddings (need {genus}) with at least {} terms",
            recs.len(),
            opts.min_terms
        )));
    }
    if let Some(cache) = &opts.cache_dir {
        write_cache(cache, &recs)?;
    }
    Ok(recs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    DeligneBound { embedding: String, n: usize, abs: f64, bound: f64 },
    Normalization { embedding: String, a1: [f64; 2] },
    TooFewTerms { embedding: String, terms: usize, min: usize },
    Unparseable { embedding: String, message: String },
    LevelNotPrime { level: u64 },
    CountMismatch { level: u64, expected: u64, found: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `a_1 = 1`, `|a_n| <= d(n) sqrt(n)`, the term count, and that each
/// level has as many embeddings as the genus formula predicts.
pub fn validate_records(records: &[NewformRecord], min_terms: usize) -> AuditReport {
    let mut violations = Vec::new();
    let mut levels: Vec<u64> = records.iter().map(|r| r.level).collect();
    levels.sort();
    levels.dedup();
    for level in levels {
        if !is_prime(level) {
            violations.push(Violation::LevelNotPrime { level });
            continue;
        }
        let expected = genus_x0_prime(level);
        let found = records.iter().filter(|r| r.level == level).count();
        if found as u64 != expected {
            violations.push(Violation::CountMismatch { level, expected, found });
        }
    }
    for r in records {
        let embedding = r.embedding_label.clone();
        if r.terms() < min_terms {
            violations.push(Violation::TooFewTerms { embedding: embedding.clone(), terms: r.terms(), min: min_terms });
        }
        let coeffs = match r.coefficients() {
            Ok(c) => c,
            Err(e) => {
                violations.push(Violation::Unparseable { embedding, message: e.to_string() });
                continue;
            }
        };
        if let Some(a1) = coeffs.first() {
            if (a1 - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
                violations.push(Violation::Normalization { embedding: embedding.clone(), a1: [a1.re, a1.im] });
            }
        }
        for (i, a) in coeffs.iter().enumerate() {
            let n = i as u64 + 1;
            let bound = divisor_count(n) as f64 * (n as f64).sqrt();
            if a.norm() > bound + 1e-6 {
                violations.push(Violation::DeligneBound { embedding: embedding.clone(), n: n as usize, abs: a.norm(), bound });
            }
        }
    }
    AuditReport { violations }
}

#[cfg(feature = "network")]
pub mod network {
    //! Client for the database's JSON API. Newforms come from
    //! `/api/mf_newforms/` (label, dimension, Fricke sign, orbit code) and their
    //! embeddings from `/api/mf_hecke_cc/` (`an_normalized = a_n / sqrt(n)`).

    use serde_json::Value;

    use super::{FetchOptions, NewformRecord, Source};
    use crate::error::{Error, Result};

    fn get(url: &str) -> Result<Value> {
        let mut resp = ureq::get(url).call().map_err(|e| Error::Network(e.to_string()))?;
        let body = resp.body_mut().read_to_string().map_err(|e| Error::Network(e.to_string()))?;
        serde_json::from_str(&body).map_err(|e| Error::SchemaMismatch(format!("{url}: {e}")))
    }

    fn data(v: &Value, url: &str) -> Result<Vec<Value>> {
        v.get("data")
            .and_then(Value::as_array)
            .cloned()
            .ok_or_else(|| Error::SchemaMismatch(format!("{url}: no data array")))
    }

    fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
        v.get(key).ok_or_else(|| Error::SchemaMismatch(format!("missing field '{key}'")))
    }

    fn number_text(v: &Value) -> Result<String> {
        match v {
            Value::Number(n) => Ok(n.to_string()),
            Value::String(s) => Ok(s.clone()),
            _ => Err(Error::SchemaMismatch(format!("expected a number, got {v}"))),
        }
    }

    /// Scale a decimal string by `sqrt(n)`, keeping integers exact.
    fn unnormalize(text: &str, n: usize) -> Result<String> {
        let x: f64 = text.parse().map_err(|_| Error::SchemaMismatch(format!("bad coefficient '{text}'")))?;
        let v = x * (n as f64).sqrt();
        let r = v.round();
        Ok(if (v - r).abs() < 1e-9 * v.abs().max(1.0) && r.abs() < 1e15 { format!("{r:.0}") } else { format!("{v:e}") })
    }

    pub fn fetch(level: u64, opts: &FetchOptions) -> Result<Vec<NewformRecord>> {
        let base = opts.endpoint.trim_end_matches('/');
        let url = format!(
            "{base}/api/mf_newforms/?level={level}&weight=2&char_order=1\
             &_fields=label,dim,fricke_eigenval,hecke_orbit_code&_format=json"
        );
        let mut forms = data(&get(&url)?, &url)?;
        forms.sort_by_key(|f| f.get("label").and_then(Value::as_str).unwrap_or_default().to_string());
        let retrieved_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .ok();
        let mut out = Vec::new();
        for form in forms {
            let label = field(&form, "label")?.as_str().unwrap_or_default().to_string();
            let eps = field(&form, "fricke_eigenval")?.as_i64().map(|e| e as i8);
            let code = number_text(field(&form, "hecke_orbit_code")?)?;
            let url = format!(
                "{base}/api/mf_hecke_cc/?hecke_orbit_code={code}\
                 &_fields=embedding_index,an_normalized&_format=json"
            );
            let mut embeddings = data(&get(&url)?, &url)?;
            embeddings.sort_by_key(|e| e.get("embedding_index").and_then(Value::as_u64).unwrap_or(0));
            for e in embeddings {
                let index = field(&e, "embedding_index")?.as_u64().unwrap_or(0) as u32;
                let raw = field(&e, "an_normalized")?
                    .as_array()
                    .ok_or_else(|| Error::SchemaMismatch("an_normalized is not an array".into()))?;
                let an = raw
                    .iter()
                    .enumerate()
                    .map(|(i, pair)| match pair.as_array().map(Vec::as_slice) {
                        Some([re, im]) => {
                            Ok([unnormalize(&number_text(re)?, i + 1)?, unnormalize(&number_text(im)?, i + 1)?])
                        }
                        _ => Err(Error::SchemaMismatch("coefficient is not a [re, im] pair".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(NewformRecord {
                    level,
                    weight: 2,
                    embedding_label: format!("{label}.{index}"),
                    label: label.clone(),
                    embedding_index: index,
                    atkin_lehner_eigenvalue: eps,
                    an,
                    source: Source::Network,
                    retrieved_at,
                });
            }
        }
        Ok(out)
    }
}

#[cfg(not(feature = "network"))]
mod network {
    use super::{FetchOptions, NewformRecord};
    use crate::error::{Error, Result};

    pub fn fetch(level: u64, _opts: &FetchOptions) -> Result<Vec<NewformRecord>> {
        Err(Error::NetworkUnavailableAndNoFixture(level))
    }
}
