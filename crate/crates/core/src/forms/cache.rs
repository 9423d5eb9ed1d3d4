//! Versioned, checksummed CSV cache of eigenvalue records.
//!
//! ```text
//! version,label
//! 1,11.2.a.a
//! p,ap_re,ap_im,err,exact,backend
//! 2,-2.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,-2/1,count
//! sha256:<hex digest of every preceding byte>
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use num_rational::Rational64;
use sha2::{Digest, Sha256};

use super::{Backend, EigenvalueRecord};
use crate::error::{Error, Result};

pub const CACHE_VERSION: u32 = 1;
const ROW_HEADER: &str = "p,ap_re,ap_im,err,exact,backend";

#[derive(Debug, Clone, PartialEq)]
pub struct EigenCache {
    pub label: String,
    pub records: Vec<EigenvalueRecord>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_exact(exact: &Option<Vec<Rational64>>) -> String {
    match exact {
        None => String::new(),
        Some(v) => v
            .iter()
            .map(|r| format!("{}/{}", r.numer(), r.denom()))
            .collect::<Vec<_>>()
            .join(";"),
    }
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::Malformed(format!("bad rational {s:?}"));
    let (n, d) = s.split_once('/').ok_or_else(bad)?;
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational64::new(n, d))
}

pub fn encode(cache: &EigenCache) -> Result<String> {
    if cache.label.contains([',', '\n', '\r']) {
        return Err(Error::InvalidArgument(format!(
            "label {:?} cannot be stored in the cache",
            cache.label
        )));
    }
    let mut body = format!(
        "version,label\n{CACHE_VERSION},{}\n{ROW_HEADER}\n",
        cache.label
    );
    for r in &cache.records {
        writeln!(
            body,
            "{},{},{},{},{},{}",
            r.p,
            fmt_f64(r.embedded.re),
            fmt_f64(r.embedded.im),
            fmt_f64(r.err),
            fmt_exact(&r.exact),
            r.backend
        )
        .unwrap();
    }
    let digest = hex::encode(Sha256::digest(body.as_bytes()));
    body.push_str("sha256:");
    body.push_str(&digest);
    body.push('\n');
    Ok(body)
}

pub fn decode(text: &str, origin: &Path) -> Result<EigenCache> {
    let trimmed = text.strip_suffix('\n').unwrap_or(text);
    let split = trimmed
        .rfind("sha256:")
        .filter(|&i| i == 0 || trimmed.as_bytes()[i - 1] == b'\n')
        .ok_or_else(|| Error::Checksum(origin.to_path_buf()))?;
    let (body, tail) = trimmed.split_at(split);
    let expected = &tail["sha256:".len()..];
    if hex::encode(Sha256::digest(body.as_bytes())) != expected {
        return Err(Error::Checksum(origin.to_path_buf()));
    }

    let mut lines = body.lines();
    let malformed = |what: &str| Error::Malformed(format!("{}: {what}", origin.display()));
    if lines.next() != Some("version,label") {
        return Err(malformed("missing version header"));
    }
    let (version, label) = lines
        .next()
        .and_then(|l| l.split_once(','))
        .ok_or_else(|| malformed("missing version line"))?;
    if version != CACHE_VERSION.to_string() {
        return Err(Error::Version(version.to_string()));
    }
    if lines.next() != Some(ROW_HEADER) {
        return Err(malformed("missing row header"));
    }
    let mut records = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let [p, re, im, err, exact, backend] = fields[..] else {
            return Err(malformed("wrong field count"));
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| malformed("bad float"));
        let exact = if exact.is_empty() {
            None
        } else {
            Some(
                exact
                    .split(';')
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        records.push(EigenvalueRecord {
            p: p.parse().map_err(|_| malformed("bad prime"))?,
            exact,
            embedded: Complex64::new(num(re)?, num(im)?),
            err: num(err)?,
            backend: backend.parse::<Backend>()?,
        });
    }
    Ok(EigenCache {
        label: label.to_string(),
        records,
    })
}

pub fn cache_write(cache: &EigenCache, path: &Path) -> Result<()> {
    let text = encode(cache)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn cache_read(path: &Path) -> Result<EigenCache> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::curve::{ap_count, EllipticCurve};
    use crate::numtheory::sieve_primes;
    use proptest::prelude::*;

    fn e11_records() -> EigenCache {
        let e = EllipticCurve::new(0, -1, 1, -10, -20).unwrap();
        let records = sieve_primes(2, 100)
            .unwrap()
            .iter()
            .filter_map(|&p| {
                ap_count(&e, p)
                    .ok()
                    .map(|a| EigenvalueRecord::from_integer(p, a, Backend::Count))
            })
            .collect();
        EigenCache {
            label: "11.2.a.a".into(),
            records,
        }
    }

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e11.csv");
        let cache = e11_records();
        cache_write(&cache, &path).unwrap();
        assert_eq!(cache_read(&path).unwrap(), cache);

        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(cache_read(&path), Err(Error::Checksum(_))));

        fs::write(&path, text.replacen("-2/1", "-3/1", 1)).unwrap();
        assert!(matches!(cache_read(&path), Err(Error::Checksum(_))));
    }

    #[test]
    fn empty_cache() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        let cache = EigenCache {
            label: "none".into(),
            records: vec![],
        };
        cache_write(&cache, &path).unwrap();
        assert_eq!(cache_read(&path).unwrap(), cache);
    }

    #[test]
    fn version_mismatch() {
        let body = format!("version,label\n99,x\n{ROW_HEADER}\n");
        let text = format!(
            "{body}sha256:{}\n",
            hex::encode(Sha256::digest(body.as_bytes()))
        );
        assert!(matches!(
            decode(&text, Path::new("v")),
            Err(Error::Version(v)) if v == "99"
        ));
    }

    #[test]
    fn rejects_unstorable_label() {
        let cache = EigenCache {
            label: "a,b".into(),
            records: vec![],
        };
        assert!(encode(&cache).is_err());
    }

    proptest! {
        #[test]
        fn arbitrary_records_round_trip(
            rows in proptest::collection::vec(
                (2u64..1_000_000, any::<f64>(), any::<f64>(), 0.0f64..1.0,
                 proptest::option::of(proptest::collection::vec((-1000i64..1000, 1i64..50), 1..4))),
                0..20)
        ) {
            let records: Vec<EigenvalueRecord> = rows
                .into_iter()
                .filter(|(_, re, im, _, _)| re.is_finite() && im.is_finite())
                .map(|(p, re, im, err, exact)| EigenvalueRecord {
                    p,
                    exact: exact.map(|v| v.into_iter().map(|(n, d)| Rational64::new(n, d)).collect()),
                    embedded: Complex64::new(re, im),
                    err,
                    backend: Backend::Remote,
                })
                .collect();
            let cache = EigenCache { label: "prop".into(), records };
            let text = encode(&cache).unwrap();
            let back = decode(&text, Path::new("prop")).unwrap();
            prop_assert_eq!(&back, &cache);
            for (a, b) in back.records.iter().zip(&cache.records) {
                prop_assert_eq!(a.embedded.re.to_bits(), b.embedded.re.to_bits());
                prop_assert_eq!(a.embedded.im.to_bits(), b.embedded.im.to_bits());
            }
        }
    }
}
