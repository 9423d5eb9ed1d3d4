//! Exact elementary number theory: primality, segmented sieving, the
//! Kronecker symbol and roots of unity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest upper bound accepted by [`sieve_primes`].
pub const SIEVE_MAX: u64 = 1 << 50;

/// All primes in a closed interval, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeRange {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
}

impl PrimeRange {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u64> {
        self.primes.iter()
    }
}

impl<'a> IntoIterator for &'a PrimeRange {
    type Item = &'a u64;
    type IntoIter = std::slice::Iter<'a, u64>;
    fn into_iter(self) -> Self::IntoIter {
        self.primes.iter()
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn small_primes_upto(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Primes in `[lo, hi]` by a segmented sieve of Eratosthenes.
pub fn sieve_primes(lo: u64, hi: u64) -> Result<PrimeRange> {
    if hi > SIEVE_MAX {
        return Err(Error::RangeTooLarge(hi));
    }
    if lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    let start = lo.max(2);
    let mut primes = Vec::new();
    if start <= hi {
        let base = small_primes_upto(hi.isqrt());
        const SEGMENT: u64 = 1 << 18;
        let mut seg_lo = start;
        while seg_lo <= hi {
            let seg_hi = hi.min(seg_lo + SEGMENT - 1);
            let mut composite = vec![false; (seg_hi - seg_lo + 1) as usize];
            for &q in &base {
                if q * q > seg_hi {
                    break;
                }
                let first = (q * q).max(seg_lo.div_ceil(q) * q);
                let mut j = first;
                while j <= seg_hi {
                    composite[(j - seg_lo) as usize] = true;
                    j += q;
                }
            }
            primes.extend(
                composite
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| !c)
                    .map(|(i, _)| seg_lo + i as u64),
            );
            seg_lo = seg_hi + 1;
        }
    }
    Ok(PrimeRange { lo, hi, primes })
}

/// Distinct prime divisors of `n` by trial division.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Exponent of the prime `p` in `n != 0`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Jacobi symbol `(a|n)` for odd `n` and `0 <= a < n`.
pub(crate) fn jacobi(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1 && a < n);
    let mut sign = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// The Kronecker symbol `(a|n)`, extending the Jacobi symbol to even and
/// negative `n`.
pub fn kronecker_symbol(a: i64, n: i64) -> Result<i32> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let a = a as i128;
    let mut n = n as i128;
    let mut sign = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -1;
        }
    }
    let tz = n.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return Ok(0);
        }
        // (a|2) = +1 for a = ±1 mod 8, -1 for a = ±3 mod 8
        if tz % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
        n >>= tz;
    }
    Ok(sign * jacobi(a.rem_euclid(n) as u64, n as u64))
}

/// A root of unity `exp(2πi·e/m)` stored exactly as `(e, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootOfUnity {
    exponent: u64,
    order: u64,
}

impl RootOfUnity {
    pub fn new(exponent: i64, order: u64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("root of unity of order 0".into()));
        }
        Ok(RootOfUnity {
            exponent: exponent.rem_euclid(order as i64) as u64,
            order,
        })
    }

    pub fn one(order: u64) -> Self {
        RootOfUnity {
            exponent: 0,
            order: order.max(1),
        }
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn pow(&self, k: i64) -> Self {
        let m = self.order as i128;
        let e = (self.exponent as i128 * k as i128).rem_euclid(m);
        RootOfUnity {
            exponent: e as u64,
            order: self.order,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::MixedOrder(self.order, other.order));
        }
        Ok(RootOfUnity {
            exponent: (self.exponent + other.exponent) % self.order,
            order: self.order,
        })
    }

    pub fn value(&self) -> Complex64 {
        root_of_unity_complex(*self)
    }

    /// `exp(2πi·num/den)` with `num/den = e/m · k/2`, i.e. the principal
    /// square root raised to the `k`-th power.
    pub fn half_power(&self, k: i64) -> Complex64 {
        unit_turn(self.exponent as i128 * k as i128, 2 * self.order as i128)
    }
}

/// `exp(2πi·num/den)`, reducing the fraction first so that quarter turns
/// come out exact.
pub(crate) fn unit_turn(num: i128, den: i128) -> Complex64 {
    let r = num.rem_euclid(den);
    // exact values on the axes
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * r == den {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * r == den {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * r == 3 * den {
        return Complex64::new(0.0, -1.0);
    }
    let (num, neg) = if 2 * r > den {
        (den - r, true)
    } else {
        (r, false)
    };
    let angle = std::f64::consts::TAU * num as f64 / den as f64;
    let (s, c) = angle.sin_cos();
    Complex64::new(c, if neg { -s } else { s })
}

pub fn root_of_unity_complex(z: RootOfUnity) -> Complex64 {
    unit_turn(z.exponent as i128, z.order as i128)
}
