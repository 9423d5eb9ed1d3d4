//! Eigenvalue acquisition for newforms: elliptic-curve point counting,
//! eta-product q-expansions, and ingestion from a remote modular-forms
//! database, with a checksummed on-disk cache.

pub mod cache;
pub mod curve;
pub mod eta;
pub mod field;
pub mod remote;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{kronecker_symbol, RootOfUnity};

pub use crate::satake::ramanujan_check_exact;
pub use cache::{cache_read, cache_write, EigenCache};
pub use curve::{ap_charsum, ap_count, EllipticCurve};
pub use eta::eta_product_series;
pub use field::CoefficientField;
pub use remote::{ingest_remote_newform, RemoteClient};

/// Where an eigenvalue came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Count,
    Charsum,
    Eta,
    Remote,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Count => "count",
            Backend::Charsum => "charsum",
            Backend::Eta => "eta",
            Backend::Remote => "remote",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Backend::Count),
            "charsum" => Ok(Backend::Charsum),
            "eta" => Ok(Backend::Eta),
            "remote" => Ok(Backend::Remote),
            other => Err(Error::Malformed(format!("unknown backend {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CharacterKind {
    Trivial,
    /// `p ↦ (D|p)` for a fundamental discriminant `D`.
    Kronecker {
        disc: i64,
    },
    /// Explicit exponents `e` with `χ(p) = ζ_m^e`.
    Table {
        values: BTreeMap<u64, u64>,
    },
}

/// The nebentypus character of a newform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nebentypus {
    pub modulus: u64,
    pub order: u64,
    pub kind: CharacterKind,
}

impl Nebentypus {
    pub fn trivial() -> Self {
        Nebentypus {
            modulus: 1,
            order: 1,
            kind: CharacterKind::Trivial,
        }
    }

    pub fn kronecker(disc: i64) -> Result<Self> {
        if disc == 0 || disc == 1 {
            return Err(Error::InvalidArgument(format!(
                "{disc} is not a nontrivial discriminant"
            )));
        }
        Ok(Nebentypus {
            modulus: disc.unsigned_abs(),
            order: 2,
            kind: CharacterKind::Kronecker { disc },
        })
    }

    pub fn table(modulus: u64, order: u64, values: BTreeMap<u64, u64>) -> Result<Self> {
        if order == 0 || values.values().any(|&e| e >= order) {
            return Err(Error::InvalidArgument(
                "character table exponents must lie in 0..order".into(),
            ));
        }
        Ok(Nebentypus {
            modulus,
            order,
            kind: CharacterKind::Table { values },
        })
    }

    /// `χ(p)` as an exact root of unity; `None` when `p` divides the modulus
    /// or the table does not cover `p`.
    pub fn value(&self, p: u64) -> Option<RootOfUnity> {
        if self.modulus > 1 && p.is_multiple_of(self.modulus) {
            return None;
        }
        match &self.kind {
            CharacterKind::Trivial => Some(RootOfUnity::one(1)),
            CharacterKind::Kronecker { disc } => match kronecker_symbol(*disc, p as i64).ok()? {
                1 => Some(RootOfUnity::one(2)),
                -1 => RootOfUnity::new(1, 2).ok(),
                _ => None,
            },
            CharacterKind::Table { values } => values
                .get(&p)
                .and_then(|&e| RootOfUnity::new(e as i64, self.order).ok()),
        }
    }

    /// `χ(p)` as an integer when the character is real.
    pub fn rational_value(&self, p: u64) -> Option<i64> {
        let z = self.value(p)?;
        match (z.order(), z.exponent()) {
            (_, 0) => Some(1),
            (m, e) if 2 * e == m => Some(-1),
            _ => None,
        }
    }
}

/// Identity and metadata of a newform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewformDescriptor {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub nebentypus: Nebentypus,
    pub coefficient_field: CoefficientField,
    pub is_cm: Option<bool>,
    pub steinberg_primes: BTreeSet<u64>,
    pub source: Backend,
}

impl NewformDescriptor {
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.weight) {
            return Err(Error::InvalidArgument(format!(
                "weight {} not in {{2, 3}}",
                self.weight
            )));
        }
        if self.level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        if self.weight == 3 && !self.nebentypus.order.is_multiple_of(2) {
            return Err(Error::InvalidArgument(
                "weight 3 requires an odd character of even order".into(),
            ));
        }
        if let Some(q) = self
            .steinberg_primes
            .iter()
            .find(|&&q| !self.level.is_multiple_of(q))
        {
            return Err(Error::InvalidArgument(format!(
                "Steinberg prime {q} does not divide the level"
            )));
        }
        Ok(())
    }

    pub fn is_good(&self, p: u64) -> bool {
        !self.level.is_multiple_of(p)
    }

    pub fn is_rational(&self) -> bool {
        self.coefficient_field.degree() == 1
    }
}

/// One prime's Hecke eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub p: u64,
    /// Coordinates of `a_p` in the power basis of the coefficient field.
    pub exact: Option<Vec<Rational64>>,
    pub embedded: Complex64,
    pub err: f64,
    pub backend: Backend,
}

impl EigenvalueRecord {
    pub fn from_integer(p: u64, ap: i64, backend: Backend) -> Self {
        EigenvalueRecord {
            p,
            exact: Some(vec![Rational64::from_integer(ap)]),
            embedded: Complex64::new(ap as f64, 0.0),
            err: 0.0,
            backend,
        }
    }

    /// `a_p` as an integer when the exact value is a single integral
    /// coordinate.
    pub fn exact_integer(&self) -> Option<i64> {
        match self.exact.as_deref() {
            Some([r]) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_character_values() {
        let chi = Nebentypus::kronecker(-7).unwrap();
        assert_eq!(chi.rational_value(2), Some(1));
        assert_eq!(chi.rational_value(3), Some(-1));
        assert_eq!(chi.rational_value(11), Some(1));
        assert_eq!(chi.value(7), None);
        assert_eq!(chi.value(3).unwrap().exponent(), 1);
        assert_eq!(Nebentypus::trivial().rational_value(7), Some(1));
    }

    #[test]
    fn descriptor_invariants() {
        let mut d = NewformDescriptor {
            label: "7.3.b.a".into(),
            level: 7,
            weight: 3,
            nebentypus: Nebentypus::trivial(),
            coefficient_field: CoefficientField::rationals(),
            is_cm: Some(true),
            steinberg_primes: BTreeSet::new(),
            source: Backend::Remote,
        };
        assert!(d.validate().is_err());
        d.nebentypus = Nebentypus::kronecker(-7).unwrap();
        d.validate().unwrap();
        d.steinberg_primes.insert(3);
        assert!(d.validate().is_err());
    }
}
