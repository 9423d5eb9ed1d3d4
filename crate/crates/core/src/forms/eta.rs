//! Exact q-expansions of eta products `Π η(d·z)^r`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{Backend, EigenvalueRecord};
use crate::error::{Error, Result};

/// Largest supported number of coefficients.
pub const ETA_MAX_TERMS: usize = 1_000_000;

/// `(exponent, sign)` pairs of `Π_{j>=1} (1 - q^j)` up to degree `bound`,
/// from the pentagonal number theorem.
fn pentagonal_terms(bound: usize) -> Vec<(usize, i8)> {
    let mut terms = vec![(0, 1)];
    for k in 1.. {
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let g1 = k * (3 * k - 1) / 2;
        if g1 > bound {
            break;
        }
        terms.push((g1, sign));
        let g2 = k * (3 * k + 1) / 2;
        if g2 <= bound {
            terms.push((g2, sign));
        }
    }
    terms.sort_unstable();
    terms
}

/// Multiplies `series` (truncated at its length) by a sparse series whose
/// coefficients are all ±1.
fn mul_sparse(series: &[BigInt], sparse: &[(usize, i8)]) -> Vec<BigInt> {
    let len = series.len();
    let mut out = vec![BigInt::zero(); len];
    for (i, c) in series.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for &(e, s) in sparse {
            let j = i + e;
            if j >= len {
                break;
            }
            if s > 0 {
                out[j] += c;
            } else {
                out[j] -= c;
            }
        }
    }
    out
}

/// Coefficients `c_1, …, c_{n_max}` of
/// `q^{Σ d·r/24} · Π_i Π_{j>=1} (1 - q^{d_i·j})^{r_i}`.
pub fn eta_product_series(factors: &[(u64, u64)], n_max: usize) -> Result<Vec<BigInt>> {
    if factors.is_empty() || factors.iter().any(|&(d, r)| d == 0 || r == 0) {
        return Err(Error::InvalidArgument(
            "eta factors need d >= 1 and r >= 1".into(),
        ));
    }
    if n_max > ETA_MAX_TERMS {
        return Err(Error::InvalidArgument(format!(
            "n_max {n_max} exceeds {ETA_MAX_TERMS}"
        )));
    }
    let weighted: u64 = factors.iter().map(|&(d, r)| d * r).sum();
    if !weighted.is_multiple_of(24) {
        return Err(Error::NonIntegralOffset {
            numerator: weighted,
        });
    }
    let offset = (weighted / 24) as usize;
    if n_max < offset {
        return Ok(vec![BigInt::zero(); n_max]);
    }
    let len = n_max - offset + 1;
    let mut series = vec![BigInt::zero(); len];
    series[0] = BigInt::from(1);
    for &(d, r) in factors {
        let d = d as usize;
        let sparse: Vec<(usize, i8)> = pentagonal_terms((len - 1) / d)
            .into_iter()
            .map(|(e, s)| (e * d, s))
            .collect();
        for _ in 0..r {
            series = mul_sparse(&series, &sparse);
        }
    }
    let mut out = vec![BigInt::zero(); offset - 1];
    out.extend(series);
    debug_assert_eq!(out.len(), n_max);
    Ok(out)
}

/// Eigenvalue records `a_p = c_p` for primes not dividing `level`.
pub fn eta_eigenvalues(
    factors: &[(u64, u64)],
    level: u64,
    primes: &[u64],
) -> Result<Vec<EigenvalueRecord>> {
    let n_max = primes.iter().copied().max().unwrap_or(0) as usize;
    let coeffs = eta_product_series(factors, n_max)?;
    primes
        .iter()
        .copied()
        .filter(|&p| !level.is_multiple_of(p))
        .map(|p| {
            let ap = coeffs[p as usize - 1]
                .to_i64()
                .ok_or_else(|| Error::InvalidArgument(format!("c_{p} does not fit in i64")))?;
            Ok(EigenvalueRecord::from_integer(p, ap, Backend::Eta))
        })
        .collect()
}
