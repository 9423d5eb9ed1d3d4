//! Monomials in the minors `Y_{i,j}` of a generic `n × n` matrix (top `i`
//! rows, columns `j`), their left and right weights, and the valuation of
//! `diag(l^{b_1}, ..., l^{b_n})` acting on them.
//!
//! Everything here is exact integer or rational arithmetic.

use std::fmt::{self, Write as _};

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size bounds for [`enumerate_monomials`].
pub const MAX_N: usize = 5;
pub const MAX_T1: u32 = 5;

fn check_nonincreasing(v: &[u32], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} must be nonempty")));
    }
    if v.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(format!(
            "{what} {v:?} is not nonincreasing"
        )));
    }
    Ok(())
}

/// A dominant weight `t_1 >= ... >= t_n >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightVec(Vec<u32>);

impl WeightVec {
    pub fn new(t: Vec<u32>) -> Result<Self> {
        check_nonincreasing(&t, "weight")?;
        Ok(WeightVec(t))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Number of order-`i` minors in a monomial of this left weight.
    pub fn multiplicity(&self, i: usize) -> u32 {
        let next = self.0.get(i).copied().unwrap_or(0);
        self.0[i - 1] - next
    }
}

/// `b_1 >= ... >= b_n >= 0`, standing for `diag(l^{b_1}, ..., l^{b_n})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TPlusElement(Vec<u32>);

impl TPlusElement {
    pub fn new(b: Vec<u32>) -> Result<Self> {
        check_nonincreasing(&b, "T+ element")?;
        Ok(TPlusElement(b))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] > w[1])
    }
}

/// The minor on the first `order` rows and the given (1-based, increasing)
/// columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Minor {
    pub order: usize,
    pub columns: Vec<usize>,
}

impl fmt::Display for Minor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self.columns.iter().map(|c| c.to_string()).collect();
        write!(f, "Y{}({})", self.order, cols.join(";"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinorMonomial {
    n: usize,
    minors: Vec<Minor>,
    left_weight: Vec<u32>,
    right_weight: Vec<u32>,
}

impl MinorMonomial {
    pub fn new(n: usize, mut minors: Vec<Minor>) -> Result<Self> {
        for m in &minors {
            let ok = m.order >= 1
                && m.order <= n
                && m.columns.len() == m.order
                && m.columns.windows(2).all(|w| w[0] < w[1])
                && m.columns.iter().all(|&c| (1..=n).contains(&c));
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "{m} is not a minor of an {n}x{n} matrix"
                )));
            }
        }
        minors.sort();
        let (left_weight, right_weight) = weights(n, &minors);
        Ok(MinorMonomial {
            n,
            minors,
            left_weight,
            right_weight,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn minors(&self) -> &[Minor] {
        &self.minors
    }

    /// Sum over minors of `(1, ..., 1, 0, ..., 0)` with `order` ones.
    pub fn left_weight(&self) -> &[u32] {
        &self.left_weight
    }

    /// Sum over minors of their column indicator vectors.
    pub fn right_weight(&self) -> &[u32] {
        &self.right_weight
    }

    /// Canonical text form, e.g. `Y1(2)*Y2(1;3)`; `1` for the empty monomial.
    pub fn encode(&self) -> String {
        if self.minors.is_empty() {
            return "1".into();
        }
        self.minors
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join("*")
    }
}

fn weights(n: usize, minors: &[Minor]) -> (Vec<u32>, Vec<u32>) {
    let mut left = vec![0u32; n];
    let mut right = vec![0u32; n];
    for m in minors {
        for w in &mut left[..m.order] {
            *w += 1;
        }
        for &c in &m.columns {
            right[c - 1] += 1;
        }
    }
    (left, right)
}

/// All `i`-subsets of `1..=n`, lexicographic.
fn subsets(n: usize, i: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for c in start..=n + 1 - left {
            cur.push(c);
            go(c + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, i, &mut Vec::new(), &mut out);
    out
}

/// Multisets of size `k` drawn from `0..len`, as nondecreasing index lists.
fn multisets(len: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, len: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for x in start..len {
            cur.push(x);
            go(x, len, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, len, k, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `Π_i C(C(n,i) + c_i - 1, c_i)` with `c_i = t_i - t_{i+1}`.
pub fn monomial_count(t: &WeightVec) -> u128 {
    let n = t.n();
    (1..=n)
        .map(|i| {
            let choices = binomial(n as u128, i as u128);
            let c = t.multiplicity(i) as u128;
            binomial(choices + c - 1, c)
        })
        .product()
}

/// Every monomial of left weight `t`, sorted by canonical encoding.
pub fn enumerate_monomials(t: &WeightVec, n: usize) -> Result<Vec<MinorMonomial>> {
    if t.n() != n {
        return Err(Error::InvalidArgument(format!(
            "weight {:?} has length {} not {n}",
            t.0,
            t.n()
        )));
    }
    if n > MAX_N || t.0[0] > MAX_T1 {
        return Err(Error::InvalidArgument(format!(
            "enumeration limited to n <= {MAX_N} and t_1 <= {MAX_T1}"
        )));
    }
    // choices per order, then the cartesian product of those choices
    let per_order: Vec<Vec<Vec<Minor>>> = (1..=n)
        .map(|i| {
            let subs = subsets(n, i);
            multisets(subs.len(), t.multiplicity(i) as usize)
                .into_iter()
                .map(|ms| {
                    ms.into_iter()
                        .map(|x| Minor {
                            order: i,
                            columns: subs[x].clone(),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let rest = |first: &Vec<Minor>| -> Vec<Vec<Minor>> {
        per_order[1..]
            .iter()
            .fold(vec![first.clone()], |acc, choices| {
                acc.iter()
                    .flat_map(|prefix| {
                        choices.iter().map(move |c| {
                            let mut v = prefix.clone();
                            v.extend(c.iter().cloned());
                            v
                        })
                    })
                    .collect()
            })
    };
    let all: Vec<Vec<Minor>> = per_order[0].par_iter().flat_map_iter(rest).collect();
    let mut monos = all
        .into_iter()
        .map(|minors| MinorMonomial::new(n, minors))
        .collect::<Result<Vec<_>>>()?;
    monos.sort_by_cached_key(|m| m.encode());
    monos.dedup();
    Ok(monos)
}

/// `Π_{i<j} (t_i - t_j + j - i) / (j - i)`.
pub fn weyl_dimension(t: &WeightVec) -> u128 {
    let t = &t.0;
    let n = t.len();
    let mut num = Rational64::from_integer(1);
    for i in 0..n {
        for j in i + 1..n {
            num *= Rational64::new(t[i] as i64 - t[j] as i64 + (j - i) as i64, (j - i) as i64);
        }
    }
    debug_assert!(num.is_integer());
    num.to_integer() as u128
}

fn extremal_monomial(t: &WeightVec, lowest: bool) -> MinorMonomial {
    let n = t.n();
    let mut minors = Vec::new();
    for i in 1..=n {
        let columns: Vec<usize> = if lowest {
            (n - i + 1..=n).collect()
        } else {
            (1..=i).collect()
        };
        for _ in 0..t.multiplicity(i) {
            minors.push(Minor {
                order: i,
                columns: columns.clone(),
            });
        }
    }
    MinorMonomial::new(n, minors).expect("extremal minors are well formed")
}

/// The monomial of right weight `(t_n, ..., t_1)`: every order-`i` minor
/// uses the last `i` columns.
pub fn lowest_weight_monomial(t: &WeightVec) -> MinorMonomial {
    extremal_monomial(t, true)
}

/// The monomial of right weight `t`: every order-`i` minor uses the first
/// `i` columns.
pub fn highest_weight_monomial(t: &WeightVec) -> MinorMonomial {
    extremal_monomial(t, false)
}

/// `(raw, twisted)`: `raw = Σ b_i v_i` for the right weight `v`, and
/// `twisted = raw - Σ b_i t_{n+1-i}`.
pub fn tplus_valuation(
    mono: &MinorMonomial,
    b: &TPlusElement,
    t: &WeightVec,
) -> Result<(i64, i64)> {
    if mono.left_weight() != t.as_slice() {
        return Err(Error::WeightMismatch(format!(
            "monomial has left weight {:?}, expected {:?}",
            mono.left_weight(),
            t.as_slice()
        )));
    }
    let n = mono.n();
    if b.as_slice().len() != n {
        return Err(Error::WeightMismatch(format!(
            "T+ element has length {} not {n}",
            b.0.len()
        )));
    }
    let bs = b.as_slice();
    let raw: i64 = bs
        .iter()
        .zip(mono.right_weight())
        .map(|(&bi, &vi)| bi as i64 * vi as i64)
        .sum();
    let floor: i64 = (0..n).map(|i| bs[i] as i64 * t.0[n - 1 - i] as i64).sum();
    Ok((raw, raw - floor))
}

/// `Σ_{i=1}^n (n-i)·d·(i-1+(1-n)/2) + Σ_{i=1}^n d·(n-i)(n+1-2i)/2`.
/// The weight `k` does not enter the sum.
pub fn ul_valuation_identity(n: u32, k: u32, d: u32) -> Rational64 {
    let _ = k;
    let (n, d) = (n as i64, d as i64);
    let half = Rational64::new(1, 2);
    (1..=n)
        .map(|i| {
            let first = Rational64::from_integer((n - i) * d)
                * (Rational64::from_integer(i - 1) + half * (1 - n));
            let second = Rational64::from_integer(d * (n - i) * (n + 1 - 2 * i)) * half;
            first + second
        })
        .sum()
}

/// Monomial dump: `minors,left_weight,right_weight,raw_val,twisted_val`,
/// weight vectors written with `;` separators.
pub fn monomials_csv(monos: &[MinorMonomial], b: &TPlusElement, t: &WeightVec) -> Result<String> {
    let join = |v: &[u32]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(";")
    };
    let mut out = String::from("minors,left_weight,right_weight,raw_val,twisted_val\n");
    for m in monos {
        let (raw, twisted) = tplus_valuation(m, b, t)?;
        writeln!(
            out,
            "{},{},{},{raw},{twisted}",
            m.encode(),
            join(m.left_weight()),
            join(m.right_weight())
        )
        .unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(t: &[u32]) -> WeightVec {
        WeightVec::new(t.to_vec()).unwrap()
    }

    fn b(v: &[u32]) -> TPlusElement {
        TPlusElement::new(v.to_vec()).unwrap()
    }

    /// Every nonincreasing vector of length `n` with entries `<= max`.
    fn dominant(n: usize, max: u32) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u32>| {
                    let top = v.last().copied().unwrap_or(max);
                    (0..=top).map(move |x| {
                        let mut v = v.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn enumeration_examples() {
        let e = enumerate_monomials(&w(&[1, 0]), 2).unwrap();
        let enc: Vec<String> = e.iter().map(|m| m.encode()).collect();
        assert_eq!(enc, ["Y1(1)", "Y1(2)"]);
        let e = enumerate_monomials(&w(&[1, 1]), 2).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].encode(), "Y2(1;2)");
        let e = enumerate_monomials(&w(&[2, 1, 0]), 3).unwrap();
        assert_eq!(e.len(), 9);
        assert!(enumerate_monomials(&w(&[6, 0]), 2).is_err());
        assert!(enumerate_monomials(&w(&[1, 0, 0, 0, 0, 0]), 6).is_err());
        assert!(WeightVec::new(vec![0, 1]).is_err());
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(weyl_dimension(&w(&[2, 0])), 3);
        assert_eq!(weyl_dimension(&w(&[1, 1])), 1);
        assert_eq!(weyl_dimension(&w(&[2, 1, 0])), 8);
        assert_eq!(weyl_dimension(&w(&[1, 0, 0, 0])), 4);
    }

    #[test]
    fn lowest_weight_examples() {
        let m = lowest_weight_monomial(&w(&[1, 0]));
        assert_eq!(m.encode(), "Y1(2)");
        assert_eq!(m.right_weight(), [0, 1]);
        assert_eq!(lowest_weight_monomial(&w(&[2, 0])).encode(), "Y1(2)*Y1(2)");
        let m = lowest_weight_monomial(&w(&[1, 1, 0]));
        assert_eq!(m.encode(), "Y2(2;3)");
        assert_eq!(m.right_weight(), [0, 1, 1]);
    }

    #[test]
    fn valuation_examples() {
        let t = w(&[1, 0]);
        let low = lowest_weight_monomial(&t);
        assert_eq!(tplus_valuation(&low, &b(&[1, 0]), &t).unwrap(), (0, 0));
        let high = highest_weight_monomial(&t);
        assert_eq!(high.encode(), "Y1(1)");
        assert_eq!(tplus_valuation(&high, &b(&[1, 0]), &t).unwrap(), (1, 1));
        assert!(tplus_valuation(&high, &b(&[1, 0]), &w(&[2, 0])).is_err());

        let t = w(&[2, 1, 0]);
        let low = lowest_weight_monomial(&t);
        for m in enumerate_monomials(&t, 3).unwrap() {
            let (_, tw) = tplus_valuation(&m, &b(&[2, 1, 0]), &t).unwrap();
            assert!(tw >= 0);
            assert_eq!(tw == 0, m == low, "{}", m.encode());
        }
    }

    #[test]
    fn weights_and_counts_exhaustive() {
        for n in 1..=4 {
            for tv in dominant(n, 3) {
                let t = w(&tv);
                let monos = enumerate_monomials(&t, n).unwrap();
                assert_eq!(monos.len() as u128, monomial_count(&t));
                assert!(monos.len() as u128 >= weyl_dimension(&t));
                let rev: Vec<u32> = tv.iter().rev().copied().collect();
                let mut highest = 0;
                let mut lowest = 0;
                for m in &monos {
                    let (left, right) = weights(n, m.minors());
                    assert_eq!(left, tv);
                    assert_eq!(right, m.right_weight());
                    highest += (m.right_weight() == tv.as_slice()) as usize;
                    lowest += (m.right_weight() == rev.as_slice()) as usize;
                }
                assert_eq!(highest, 1, "{tv:?}");
                assert_eq!(lowest, 1, "{tv:?}");
                assert!(monos.contains(&lowest_weight_monomial(&t)));
                assert!(monos.contains(&highest_weight_monomial(&t)));
            }
        }
    }

    #[test]
    fn containment_and_strictness_exhaustive() {
        for n in 1..=4 {
            let bs = dominant(n, 3);
            for tv in dominant(n, 3) {
                let t = w(&tv);
                let low = lowest_weight_monomial(&t);
                let monos = enumerate_monomials(&t, n).unwrap();
                for bv in &bs {
                    let b = b(bv);
                    let strict = b.is_strictly_decreasing();
                    for m in &monos {
                        let (_, tw) = tplus_valuation(m, &b, &t).unwrap();
                        assert!(tw >= 0);
                        if strict && *m != low {
                            assert!(tw >= 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn valuation_identity_vanishes() {
        assert_eq!(ul_valuation_identity(2, 3, 1), Rational64::from_integer(0));
        assert_eq!(ul_valuation_identity(4, 3, 2), Rational64::from_integer(0));
        assert_eq!(ul_valuation_identity(7, 5, 3), Rational64::from_integer(0));
        for n in 1..=10 {
            for k in 2..=5 {
                for d in 1..=3 {
                    assert_eq!(ul_valuation_identity(n, k, d), Rational64::from_integer(0));
                }
            }
        }
    }

    #[test]
    fn csv_dump() {
        let t = w(&[1, 0]);
        let monos = enumerate_monomials(&t, 2).unwrap();
        let csv = monomials_csv(&monos, &b(&[1, 0]), &t).unwrap();
        assert_eq!(
            csv,
            "minors,left_weight,right_weight,raw_val,twisted_val\n\
             Y1(1),1;0,1;0,1,1\n\
             Y1(2),1;0,0;1,0,0\n"
        );
    }
}
