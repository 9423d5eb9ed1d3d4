//! Client for a modular-forms database serving JSON over HTTP.
//!
//! Two endpoints are used, both keyed by the newform label:
//!
//! * `{base}/api/mf_newforms/?label=L&_format=json` returns
//!   `{"data": [{"label", "level", "weight", "char_order", "field_poly", ...}]}`
//! * `{base}/api/mf_hecke_nf/?label=L&_format=json` returns
//!   `{"data": [{"label", "maxp", "ap": [[coords...], ...]}]}` where the `i`-th
//!   entry of `ap` holds the power-basis coordinates of `a_p` for the `i`-th prime.
//!
//! Every response body is stored under `cache_dir/remote/` with a SHA-256
//! sidecar before it is parsed; later calls never touch the network.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::{
    Backend, CharacterKind, CoefficientField, EigenvalueRecord, Nebentypus, NewformDescriptor,
};
use crate::error::{Error, Result};
use crate::numtheory::sieve_primes;

pub const BASE_URL_ENV: &str = "SATO_TATE_BASE_URL";
pub const DEFAULT_BASE_URL: &str = "https://www.lmfdb.org";

#[derive(Debug, Clone)]
pub struct RemoteClient {
    base_url: String,
    cache_dir: PathBuf,
    timeout: Duration,
}

#[derive(Debug, Deserialize)]
struct Envelope<T> {
    data: Vec<T>,
}

#[derive(Debug, Deserialize)]
struct NewformRow {
    label: String,
    level: u64,
    weight: u32,
    char_order: u64,
    #[serde(default)]
    char_conductor: Option<u64>,
    #[serde(default)]
    char_kronecker: Option<i64>,
    #[serde(default)]
    char_values: Option<Vec<(u64, u64)>>,
    field_poly: Vec<i64>,
    #[serde(default)]
    field_root: Option<(f64, f64)>,
    #[serde(default)]
    is_cm: Option<bool>,
    #[serde(default)]
    steinberg_primes: Option<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Coord {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
struct HeckeRow {
    label: String,
    maxp: u64,
    ap: Vec<Vec<Coord>>,
}

/// Syntax of a newform label: `level.weight.char.orbit`.
pub fn is_newform_label(label: &str) -> bool {
    let parts: Vec<&str> = label.split('.').collect();
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let letters = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase());
    matches!(parts[..], [n, k, c, o] if digits(n) && digits(k) && letters(c) && letters(o))
}

impl RemoteClient {
    pub fn new(base_url: impl Into<String>, cache_dir: impl Into<PathBuf>) -> Self {
        RemoteClient {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            cache_dir: cache_dir.into(),
            timeout: Duration::from_secs(30),
        }
    }

    /// Base URL from [`BASE_URL_ENV`], falling back to [`DEFAULT_BASE_URL`].
    pub fn from_env(cache_dir: impl Into<PathBuf>) -> Self {
        let base = std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        Self::new(base, cache_dir)
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    fn cache_path(&self, endpoint: &str, label: &str) -> PathBuf {
        self.cache_dir
            .join("remote")
            .join(format!("{endpoint}__{label}.json"))
    }

    fn read_cached(path: &Path) -> Result<Option<String>> {
        let sidecar = path.with_extension("json.sha256");
        if !path.exists() {
            return Ok(None);
        }
        let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let expected = fs::read_to_string(&sidecar).map_err(|_| Error::Checksum(path.into()))?;
        if hex::encode(Sha256::digest(body.as_bytes())) != expected.trim() {
            return Err(Error::Checksum(path.into()));
        }
        Ok(Some(body))
    }

    fn write_cached(path: &Path, body: &str) -> Result<()> {
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        fs::write(path, body).map_err(|e| Error::io(path, e))?;
        let sidecar = path.with_extension("json.sha256");
        fs::write(&sidecar, hex::encode(Sha256::digest(body.as_bytes())))
            .map_err(|e| Error::io(&sidecar, e))
    }

    /// Response body for one endpoint, from the cache when present.
    pub fn fetch(&self, endpoint: &str, label: &str) -> Result<String> {
        let path = self.cache_path(endpoint, label);
        if let Some(body) = Self::read_cached(&path)? {
            return Ok(body);
        }
        let url = format!(
            "{}/api/{endpoint}/?label={label}&_format=json",
            self.base_url
        );
        let body = ureq::get(&url)
            .timeout(self.timeout)
            .call()
            .map_err(|e| Error::Network(e.to_string()))?
            .into_string()
            .map_err(|e| Error::Network(format!("{url}: {e}")))?;
        Self::write_cached(&path, &body)?;
        Ok(body)
    }

    fn fetch_row<T: for<'de> Deserialize<'de>>(&self, endpoint: &str, label: &str) -> Result<T> {
        let body = self.fetch(endpoint, label)?;
        let env: Envelope<T> = serde_json::from_str(&body)
            .map_err(|e| Error::Malformed(format!("{endpoint}: {e}")))?;
        env.data
            .into_iter()
            .next()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn newform(&self, label: &str) -> Result<(NewformDescriptor, Vec<EigenvalueRecord>)> {
        if !is_newform_label(label) {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        let row: NewformRow = self.fetch_row("mf_newforms", label)?;
        let hecke: HeckeRow = self.fetch_row("mf_hecke_nf", label)?;
        if row.label != label || hecke.label != label {
            return Err(Error::Malformed(format!(
                "response labels {:?}/{:?} do not match {label:?}",
                row.label, hecke.label
            )));
        }
        let desc = descriptor_from_row(row)?;
        let records = records_from_row(&desc, &hecke)?;
        Ok((desc, records))
    }
}

fn descriptor_from_row(row: NewformRow) -> Result<NewformDescriptor> {
    let nebentypus = if row.char_order == 1 {
        Nebentypus::trivial()
    } else if let Some(values) = row.char_values {
        let modulus = row.char_conductor.unwrap_or(row.level);
        Nebentypus::table(
            modulus,
            row.char_order,
            values.into_iter().collect::<BTreeMap<_, _>>(),
        )?
    } else if let (2, Some(disc)) = (row.char_order, row.char_kronecker) {
        Nebentypus::kronecker(disc)?
    } else {
        return Err(Error::Malformed(format!(
            "character of order {} needs char_kronecker or char_values",
            row.char_order
        )));
    };
    if let CharacterKind::Kronecker { disc } = nebentypus.kind {
        if row.char_conductor.is_some_and(|c| c != disc.unsigned_abs()) {
            return Err(Error::Malformed(
                "char_conductor disagrees with char_kronecker".into(),
            ));
        }
    }
    let coefficient_field = if row.field_poly.len() == 2 && row.field_poly[1] == 1 {
        CoefficientField::rationals()
    } else {
        let (re, im) = row.field_root.ok_or_else(|| {
            Error::Malformed("field_root required for non-rational fields".into())
        })?;
        CoefficientField::new(row.field_poly, Complex64::new(re, im))?
    };
    let desc = NewformDescriptor {
        label: row.label,
        level: row.level,
        weight: row.weight,
        nebentypus,
        coefficient_field,
        is_cm: row.is_cm,
        steinberg_primes: row
            .steinberg_primes
            .unwrap_or_default()
            .into_iter()
            .collect::<BTreeSet<_>>(),
        source: Backend::Remote,
    };
    desc.validate()
        .map_err(|e| Error::Malformed(e.to_string()))?;
    Ok(desc)
}

fn parse_coord(c: &Coord) -> Result<Rational64> {
    match c {
        Coord::Int(n) => Ok(Rational64::from_integer(*n)),
        Coord::Text(s) => {
            let bad = || Error::Malformed(format!("bad coordinate {s:?}"));
            match s.split_once('/') {
                Some((n, d)) => {
                    let d: i64 = d.trim().parse().map_err(|_| bad())?;
                    if d == 0 {
                        return Err(bad());
                    }
                    Ok(Rational64::new(n.trim().parse().map_err(|_| bad())?, d))
                }
                None => Ok(Rational64::from_integer(
                    s.trim().parse().map_err(|_| bad())?,
                )),
            }
        }
    }
}

fn records_from_row(desc: &NewformDescriptor, row: &HeckeRow) -> Result<Vec<EigenvalueRecord>> {
    let primes = sieve_primes(2, row.maxp.max(2))?.primes;
    if row.ap.len() > primes.len() {
        return Err(Error::Malformed(format!(
            "{} eigenvalues listed but only {} primes up to maxp = {}",
            row.ap.len(),
            primes.len(),
            row.maxp
        )));
    }
    row.ap
        .iter()
        .zip(&primes)
        .map(|(coords, &p)| {
            let exact = coords.iter().map(parse_coord).collect::<Result<Vec<_>>>()?;
            let (embedded, err) = desc.coefficient_field.embed(&exact)?;
            Ok(EigenvalueRecord {
                p,
                exact: Some(exact),
                embedded,
                err,
                backend: Backend::Remote,
            })
        })
        .collect()
}

/// Descriptor and eigenvalues for `label`, served from `cache_dir` when
/// possible and from `base_url` otherwise.
pub fn ingest_remote_newform(
    label: &str,
    base_url: &str,
    cache_dir: &Path,
) -> Result<(NewformDescriptor, Vec<EigenvalueRecord>)> {
    RemoteClient::new(base_url, cache_dir).newform(label)
}
