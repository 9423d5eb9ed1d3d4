//! Frobenius traces of elliptic curves over Q by direct point counting and
//! by quadratic character sums.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Backend, EigenvalueRecord};
use crate::error::{Error, Result};
use crate::numtheory::{jacobi, mul_mod};

/// A curve in long Weierstrass form
/// `y^2 + a1·xy + a3·y = x^3 + a2·x^2 + a4·x + a6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    discriminant: i128,
}

impl EllipticCurve {
    pub fn new(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Result<Self> {
        let [a1_, a2_, a3_, a4_, a6_] = [a1, a2, a3, a4, a6].map(|a| a as i128);
        let b2 = a1_ * a1_ + 4 * a2_;
        let b4 = 2 * a4_ + a1_ * a3_;
        let b6 = a3_ * a3_ + 4 * a6_;
        let b8 = a1_ * a1_ * a6_ + 4 * a2_ * a6_ - a1_ * a3_ * a4_ + a2_ * a3_ * a3_ - a4_ * a4_;
        let discriminant = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
        if discriminant == 0 {
            return Err(Error::InvalidArgument(
                "singular Weierstrass equation".into(),
            ));
        }
        Ok(EllipticCurve {
            a1,
            a2,
            a3,
            a4,
            a6,
            discriminant,
        })
    }

    /// `y^2 = x^3 + A·x + B`.
    pub fn short(a: i64, b: i64) -> Result<Self> {
        Self::new(0, 0, 0, a, b)
    }

    pub fn from_coefficients(coeffs: [i64; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = coeffs;
        Self::new(a1, a2, a3, a4, a6)
    }

    pub fn coefficients(&self) -> [i64; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6]
    }

    pub fn discriminant(&self) -> i128 {
        self.discriminant
    }

    pub fn has_good_reduction(&self, p: u64) -> bool {
        self.discriminant % p as i128 != 0
    }

    /// `(c4, c6)` invariants.
    pub fn c_invariants(&self) -> (i128, i128) {
        let [a1, a2, a3, a4, a6] = self.coefficients().map(|a| a as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        (b2 * b2 - 24 * b4, -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6)
    }

    /// Coefficients `(A, B)` of the short model `y^2 = x^3 - 27c4·x - 54c6`,
    /// isomorphic over `F_p` for every `p > 3`.
    pub fn short_model(&self) -> (i128, i128) {
        let (c4, c6) = self.c_invariants();
        (-27 * c4, -54 * c6)
    }
}

fn residue(v: i128, p: u64) -> u64 {
    v.rem_euclid(p as i128) as u64
}

/// Affine points of the long model over `F_p` by enumerating all `(x, y)`.
fn count_affine_long(e: &EllipticCurve, p: u64) -> u64 {
    let c = e.coefficients().map(|a| residue(a as i128, p));
    let [a1, a2, a3, a4, a6] = c;
    let mut count = 0;
    for x in 0..p {
        let x2 = mul_mod(x, x, p);
        let rhs = (mul_mod(x2, x, p) + mul_mod(a2, x2, p) + mul_mod(a4, x, p) + a6) % p;
        let lin = (mul_mod(a1, x, p) + a3) % p;
        for y in 0..p {
            let lhs = (mul_mod(y, y, p) + mul_mod(lin, y, p)) % p;
            if lhs == rhs {
                count += 1;
            }
        }
    }
    count
}

/// Affine points of `y^2 = x^3 + Ax + B` over `F_p`, using a table of how
/// many `y` square to each residue.
fn count_affine_short(a: u64, b: u64, p: u64) -> u64 {
    let mut roots = vec![0u8; p as usize];
    for y in 0..p {
        roots[mul_mod(y, y, p) as usize] += 1;
    }
    (0..p)
        .map(|x| {
            let rhs = (mul_mod(mul_mod(x, x, p), x, p) + mul_mod(a, x, p) + b) % p;
            roots[rhs as usize] as u64
        })
        .sum()
}

/// `a_p = p + 1 - #E(F_p)` by counting points, including the point at
/// infinity.
pub fn ap_count(curve: &EllipticCurve, p: u64) -> Result<i64> {
    if !curve.has_good_reduction(p) {
        return Err(Error::BadReduction { p });
    }
    let affine = if p <= 3 {
        count_affine_long(curve, p)
    } else {
        let (a, b) = curve.short_model();
        count_affine_short(residue(a, p), residue(b, p), p)
    };
    Ok(p as i64 - affine as i64)
}

/// `a_p = -Σ_x ((x^3 + Ax + B) | p)` for the short curve `y^2 = x^3 + Ax + B`.
pub fn ap_charsum(a: i64, b: i64, p: u64) -> Result<i64> {
    if p <= 3 {
        return Err(Error::InvalidArgument(format!(
            "character-sum backend needs p > 3, got {p}"
        )));
    }
    let a = residue(a as i128, p);
    let b = residue(b as i128, p);
    let a3 = mul_mod(mul_mod(a, a, p), a, p);
    let disc = (mul_mod(4, a3, p) + mul_mod(27, mul_mod(b, b, p), p)) % p;
    if disc == 0 {
        return Err(Error::SingularCurve { p });
    }
    let sum: i64 = (0..p)
        .map(|x| {
            let v = (mul_mod(mul_mod(x, x, p), x, p) + mul_mod(a, x, p) + b) % p;
            jacobi(v, p) as i64
        })
        .sum();
    Ok(-sum)
}

/// [`ap_charsum`] applied to the short model of a long-form curve; falls
/// back to counting for `p <= 3`.
pub fn ap_charsum_curve(curve: &EllipticCurve, p: u64) -> Result<i64> {
    if !curve.has_good_reduction(p) {
        return Err(Error::BadReduction { p });
    }
    if p <= 3 {
        return ap_count(curve, p);
    }
    let (a, b) = curve.short_model();
    ap_charsum(residue(a, p) as i64, residue(b, p) as i64, p)
}

/// Eigenvalue records for every good prime in `primes`, in input order.
///
/// Work is spread over `pool`; the result does not depend on its size.
pub fn curve_eigenvalues(
    curve: &EllipticCurve,
    primes: &[u64],
    backend: Backend,
    pool: &rayon::ThreadPool,
) -> Result<Vec<EigenvalueRecord>> {
    let kernel: fn(&EllipticCurve, u64) -> Result<i64> = match backend {
        Backend::Count => ap_count,
        Backend::Charsum => ap_charsum_curve,
        other => {
            return Err(Error::InvalidArgument(format!(
                "{other} is not a point-counting backend"
            )))
        }
    };
    let good: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| curve.has_good_reduction(p))
        .collect();
    pool.install(|| {
        good.par_iter()
            .map(|&p| kernel(curve, p).map(|ap| EigenvalueRecord::from_integer(p, ap, backend)))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::sieve_primes;

    fn e11a1() -> EllipticCurve {
        EllipticCurve::new(0, -1, 1, -10, -20).unwrap()
    }

    #[test]
    fn discriminants() {
        assert_eq!(e11a1().discriminant(), -161_051); // -11^5
        assert_eq!(EllipticCurve::short(-1, 0).unwrap().discriminant(), 64);
        assert!(EllipticCurve::short(0, 0).is_err());
    }

    #[test]
    fn small_prime_examples() {
        assert_eq!(ap_count(&e11a1(), 2).unwrap(), -2);
        assert_eq!(ap_count(&e11a1(), 3).unwrap(), -1);
        assert_eq!(
            ap_count(&EllipticCurve::short(-1, 0).unwrap(), 3).unwrap(),
            0
        );
        assert!(matches!(
            ap_count(&e11a1(), 11),
            Err(Error::BadReduction { p: 11 })
        ));
    }

    #[test]
    fn charsum_examples() {
        let e = EllipticCurve::short(-1, 0).unwrap();
        assert_eq!(ap_charsum(-1, 0, 5).unwrap(), ap_count(&e, 5).unwrap());
        assert_eq!(ap_charsum(0, 1, 5).unwrap(), 0);
        assert!(matches!(
            ap_charsum(0, 0, 5),
            Err(Error::SingularCurve { p: 5 })
        ));
        assert!(ap_charsum(1, 1, 3).is_err());
    }

    #[test]
    fn short_model_counting_matches_long_enumeration() {
        let curves = [
            e11a1(),
            EllipticCurve::new(1, 0, 1, 4, -6).unwrap(),
            EllipticCurve::new(0, 0, 1, -1, 0).unwrap(),
        ];
        for e in &curves {
            for p in sieve_primes(5, 150).unwrap().iter().copied() {
                if !e.has_good_reduction(p) {
                    continue;
                }
                let direct = p as i64 - count_affine_long(e, p) as i64;
                assert_eq!(ap_count(e, p).unwrap(), direct, "p={p}");
            }
        }
    }

    #[test]
    fn hasse_bound() {
        let e = e11a1();
        for p in sieve_primes(2, 3000).unwrap().iter().copied() {
            if let Ok(ap) = ap_count(&e, p) {
                assert!(super::super::ramanujan_check_exact(ap, 2, p));
            }
        }
    }

    #[test]
    fn batch_order_and_bad_primes() {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(2)
            .build()
            .unwrap();
        let primes = sieve_primes(2, 100).unwrap().primes;
        let recs = curve_eigenvalues(&e11a1(), &primes, Backend::Charsum, &pool).unwrap();
        assert_eq!(recs.len(), primes.len() - 1);
        assert!(recs.iter().all(|r| r.p != 11));
        assert!(recs.windows(2).all(|w| w[0].p < w[1].p));
        assert!(curve_eigenvalues(&e11a1(), &primes, Backend::Eta, &pool).is_err());
    }
}
