//! Ordinary primes: the `λ ∤ a_l` test, empirical density of ordinary
//! primes, the finite set `T` of algebraic integers whose conjugates all
//! have modulus at most 2, and the unit root of the Hecke polynomial.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{EigenvalueRecord, NewformDescriptor};

/// `l ∤ a_l` for rational eigenvalues.
pub fn is_ordinary_rational(a_l: i64, l: u64) -> bool {
    a_l.rem_euclid(l as i64) != 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordinarity {
    Ordinary,
    NonOrdinary,
    Undetermined,
}

/// Ordinarity of `a_l` given by power-basis coordinates in the field
/// `Q[x]/(poly)`. Over a quadratic field `l` divides the norm of `a_l`
/// exactly when some prime above `l` divides `a_l`; higher degrees are
/// left undetermined.
pub fn ordinarity_in_field(coords: &[Rational64], poly: &[i64], l: u64) -> Ordinarity {
    let norm = match (coords, poly) {
        ([x], [_, 1]) => *x,
        ([x, y], [c0, c1, 1]) => {
            x * x - x * y * Rational64::from_integer(*c1) + y * y * Rational64::from_integer(*c0)
        }
        _ => return Ordinarity::Undetermined,
    };
    let l = l as i64;
    if norm.denom() % l == 0 {
        return Ordinarity::Undetermined;
    }
    if norm.numer() % l == 0 {
        Ordinarity::NonOrdinary
    } else {
        Ordinarity::Ordinary
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub prime_bound: u64,
    pub ordinary: usize,
    pub non_ordinary: Vec<u64>,
    /// Primes skipped because the field test could not decide them.
    pub undetermined: usize,
    /// `ordinary / (ordinary + non_ordinary)`.
    pub fraction: f64,
}

/// Ordinary fraction over the good primes `l <= bound` among `records`.
/// Rational forms use the integer test; quadratic fields use the norm.
pub fn ordinary_density(
    desc: &NewformDescriptor,
    records: &[EigenvalueRecord],
    bound: u64,
) -> Result<DensityReport> {
    let mut ordinary = 0;
    let mut non_ordinary = Vec::new();
    let mut undetermined = 0;
    for r in records.iter().filter(|r| r.p <= bound && desc.is_good(r.p)) {
        let verdict = if desc.is_rational() {
            let a = r.exact_integer().ok_or(Error::MissingExact(r.p))?;
            if is_ordinary_rational(a, r.p) {
                Ordinarity::Ordinary
            } else {
                Ordinarity::NonOrdinary
            }
        } else {
            let coords = r.exact.as_deref().ok_or(Error::MissingExact(r.p))?;
            ordinarity_in_field(coords, &desc.coefficient_field.poly, r.p)
        };
        match verdict {
            Ordinarity::Ordinary => ordinary += 1,
            Ordinarity::NonOrdinary => non_ordinary.push(r.p),
            Ordinarity::Undetermined => undetermined += 1,
        }
    }
    let total = ordinary + non_ordinary.len();
    if total == 0 {
        return Err(Error::Empty("eigenvalue records"));
    }
    Ok(DensityReport {
        prime_bound: bound,
        ordinary,
        non_ordinary,
        undetermined,
        fraction: ordinary as f64 / total as f64,
    })
}

// ---------------------------------------------------------------------------
// The set T

/// Largest degree accepted by [`wiles_t_set`].
pub const T_SET_MAX_DEGREE: usize = 6;
const BAND: f64 = 1e-9;
const LEAF_POWER_SUMS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Every root is inside the disk, strictly or by an exact check.
    Certified,
    /// Some root has modulus exactly 2, proven by an exact gcd or integer test.
    ExactBoundary,
    /// A root lies within `1e-9` of the circle and could not be resolved;
    /// kept, but needs review.
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TSetElement {
    /// Monic integer polynomial, constant term first.
    pub coeffs: Vec<i64>,
    pub max_conjugate_modulus: f64,
    pub certification: Certification,
}

impl TSetElement {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

fn binomial(n: u64, k: u64) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn eval(poly: &[i64], z: Complex64) -> Complex64 {
    poly.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c as f64)
}

/// Complex roots of a squarefree integer polynomial by Aberth iteration.
pub(crate) fn polynomial_roots(poly: &[i64]) -> Vec<Complex64> {
    let d = poly.len() - 1;
    let lead = *poly.last().unwrap() as f64;
    if d == 1 {
        return vec![Complex64::new(-poly[0] as f64 / lead, 0.0)];
    }
    let deriv: Vec<i64> = (1..=d).map(|i| poly[i] * i as i64).collect();
    let cauchy = 1.0
        + poly[..d]
            .iter()
            .map(|&c| (c as f64 / lead).abs())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|i| {
            Complex64::from_polar(
                0.5 * cauchy,
                0.4 + std::f64::consts::TAU * i as f64 / d as f64,
            )
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let f = eval(poly, z[i]);
            if f.norm() == 0.0 {
                continue;
            }
            let ratio = f / eval(&deriv, z[i]);
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn trim(mut p: Vec<i128>) -> Vec<i128> {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    p
}

fn primitive(p: Vec<i128>) -> Vec<i128> {
    let g = p.iter().fold(0i128, |g, &c| g.gcd(&c));
    let sign = if *p.last().unwrap() < 0 { -1 } else { 1 };
    if g == 0 {
        return p;
    }
    p.into_iter().map(|c| sign * c / g).collect()
}

/// Pseudo-remainder of `a` by `b`.
fn prem(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut r = a.to_vec();
    let lb = *b.last().unwrap();
    let db = b.len() - 1;
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let lr = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        r = r.iter().map(|c| c * lb).collect();
        for (i, &c) in b.iter().enumerate() {
            r[i + shift] -= lr * c;
        }
        r.pop();
        r = trim(r);
        if r.iter().all(|&c| c == 0) {
            return vec![0];
        }
    }
    r
}

/// Primitive gcd over `Z[x]`, normalized to a positive leading coefficient.
fn poly_gcd(a: &[i128], b: &[i128]) -> Vec<i128> {
    let (mut a, mut b) = (primitive(trim(a.to_vec())), primitive(trim(b.to_vec())));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !(b.len() == 1 && b[0] == 0) {
        let r = prem(&a, &b);
        a = b;
        b = if r.iter().all(|&c| c == 0) {
            vec![0]
        } else {
            primitive(r)
        };
    }
    a
}

fn exact_div(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = *b.last().unwrap();
    let mut q = vec![0i128; a.len() - db];
    for shift in (0..q.len()).rev() {
        let c = r[shift + db] / lb;
        q[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[i + shift] -= c * bc;
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

fn squarefree_part(poly: &[i64]) -> Vec<i64> {
    let p: Vec<i128> = poly.iter().map(|&c| c as i128).collect();
    let dp: Vec<i128> = (1..p.len()).map(|i| p[i] * i as i128).collect();
    let g = poly_gcd(&p, &dp);
    if g.len() == 1 {
        return poly.to_vec();
    }
    let q = primitive(exact_div(&p, &g));
    q.into_iter().map(|c| c as i64).collect()
}

/// Exact check for monic degree ≤ 2: `Some(boundary)` when all roots have
/// modulus ≤ 2, `boundary` telling whether one sits on the circle.
fn exact_small_degree(poly: &[i64]) -> Option<bool> {
    match *poly {
        [c, 1] => (c.abs() <= 2).then_some(c.abs() == 2),
        [c, b, 1] => {
            if b * b < 4 * c {
                // conjugate pair, |root|^2 = c
                (c <= 4).then_some(c == 4)
            } else {
                let at_2 = 4 + 2 * b + c;
                let at_m2 = 4 - 2 * b + c;
                (at_2 >= 0 && at_m2 >= 0 && b.abs() <= 4).then_some(at_2 == 0 || at_m2 == 0)
            }
        }
        _ => None,
    }
}

fn certify(poly: &[i64]) -> Option<TSetElement> {
    let d = poly.len() - 1;
    let sf = squarefree_part(poly);
    let roots = polynomial_roots(&sf);
    let max_mod = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let certification = if d <= 2 {
        match exact_small_degree(poly)? {
            true => Certification::ExactBoundary,
            false => Certification::Certified,
        }
    } else {
        if max_mod > 2.0 + BAND {
            return None;
        }
        if max_mod < 2.0 - BAND {
            Certification::Certified
        } else {
            // roots of modulus exactly 2 satisfy α·ᾱ = 4, so they are common
            // roots of Q(x) and x^deg·Q(4/x)
            let q: Vec<i128> = sf.iter().map(|&c| c as i128).collect();
            let deg = q.len() - 1;
            let reflected: Vec<i128> = (0..=deg)
                .map(|i| q[deg - i] * 4i128.pow((deg - i) as u32))
                .collect();
            let g = poly_gcd(&q, &reflected);
            let g64: Vec<i64> = g.iter().map(|&c| c as i64).collect();
            let on_circle = g.len() > 1
                && roots
                    .iter()
                    .filter(|z| (z.norm() - 2.0).abs() <= BAND)
                    .all(|&z| {
                        let scale: f64 = g64
                            .iter()
                            .map(|c| c.abs() as f64 * 2f64.powi(g64.len() as i32))
                            .sum();
                        eval(&g64, z).norm() <= 1e-9 * scale
                    });
            if on_circle {
                Certification::ExactBoundary
            } else {
                Certification::Ambiguous
            }
        }
    };
    Some(TSetElement {
        coeffs: poly.to_vec(),
        max_conjugate_modulus: max_mod,
        certification,
    })
}

/// Extends a partial list of elementary symmetric functions, pruning with
/// the power-sum bounds `|p_j| <= d·2^j` that any such root set obeys.
fn extend(d: usize, e: &mut Vec<i64>, p: &mut Vec<i128>, out: &mut Vec<Vec<i64>>) {
    let j = e.len();
    if j == d {
        // power sums beyond the degree must respect the bound as well; high
        // orders are dominated by the largest root, so they reject most
        // candidates before any root finding
        let mut pp = p.clone();
        for jj in d + 1..=LEAF_POWER_SUMS {
            let mut s = 0i128;
            for i in 1..=d {
                let sign = if i % 2 == 1 { 1 } else { -1 };
                s += sign * e[i - 1] as i128 * pp[jj - i];
            }
            if s.abs() > d as i128 * (1i128 << jj) {
                return;
            }
            pp.push(s);
        }
        out.push(e.clone());
        return;
    }
    let jn = j + 1;
    // p_jn = S + (-1)^(jn-1)·jn·e_jn
    let mut s = 0i128;
    for i in 1..jn {
        let sign = if i % 2 == 1 { 1 } else { -1 };
        s += sign * e[i - 1] as i128 * p[jn - i];
    }
    let sign: i128 = if jn % 2 == 1 { 1 } else { -1 };
    let bound = d as i128 * (1i128 << jn);
    let jn_i = jn as i128;
    // |s + sign·jn·x| <= bound  <=>  (-bound - s) <= sign·jn·x <= (bound - s)
    let (lo, hi) = (
        Integer::div_ceil(&(-bound - s), &jn_i),
        Integer::div_floor(&(bound - s), &jn_i),
    );
    let (lo, hi) = if sign == 1 { (lo, hi) } else { (-hi, -lo) };
    let cap = binomial(d as u64, jn as u64) as i128 * (1i128 << jn);
    for x in lo.max(-cap)..=hi.min(cap) {
        e.push(x as i64);
        p.push(s + sign * jn_i * x);
        extend(d, e, p, out);
        e.pop();
        p.pop();
    }
}

/// Coefficients, constant first, of `x^d - e1 x^{d-1} + e2 x^{d-2} - ...`.
fn from_elementary(e: &[i64]) -> Vec<i64> {
    let d = e.len();
    let mut coeffs = vec![0i64; d + 1];
    coeffs[d] = 1;
    for (i, &ei) in e.iter().enumerate() {
        let k = i + 1;
        coeffs[d - k] = if k % 2 == 1 { -ei } else { ei };
    }
    coeffs
}

fn negate_variable(t: &TSetElement) -> TSetElement {
    let d = t.degree();
    TSetElement {
        coeffs: t
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if (d - i) % 2 == 1 { -c } else { c })
            .collect(),
        ..t.clone()
    }
}

/// All monic integer polynomials of degree `d` whose complex roots all have
/// modulus at most 2, sorted by coefficient vector (constant first).
pub fn wiles_t_set(d: usize) -> Result<Vec<TSetElement>> {
    wiles_t_set_in(d, None)
}

pub fn wiles_t_set_in(d: usize, pool: Option<&rayon::ThreadPool>) -> Result<Vec<TSetElement>> {
    if !(1..=T_SET_MAX_DEGREE).contains(&d) {
        return Err(Error::InvalidArgument(format!(
            "T-set degree {d} outside 1..={T_SET_MAX_DEGREE}"
        )));
    }
    let top = 2 * d as i64;
    let slice = |e1: i64| -> Vec<TSetElement> {
        let mut cands = Vec::new();
        let mut e = vec![e1];
        let mut p = vec![d as i128, e1 as i128];
        extend(d, &mut e, &mut p, &mut cands);
        let mut found: Vec<TSetElement> = cands
            .iter()
            .filter_map(|e| certify(&from_elementary(e)))
            .collect();
        // y -> -y maps the e1 slice onto the -e1 slice
        if e1 > 0 {
            let mirrored: Vec<TSetElement> = found.iter().map(negate_variable).collect();
            found.extend(mirrored);
        }
        found
    };
    let slices: Vec<Vec<TSetElement>> = match pool {
        Some(pool) => pool.install(|| (0..=top).into_par_iter().map(slice).collect()),
        None => (0..=top).map(slice).collect(),
    };
    let mut all = slices.concat();
    all.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
    Ok(all)
}

/// T-set export: header `c0,...,cd,max_modulus,certification`.
pub fn t_set_csv(set: &[TSetElement]) -> String {
    let d = set.first().map_or(0, |t| t.degree());
    let mut out = (0..=d)
        .map(|i| format!("c{i}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push_str(",max_modulus,certification\n");
    for t in set {
        let coeffs: Vec<String> = t.coeffs.iter().map(|c| c.to_string()).collect();
        let cert = match t.certification {
            Certification::Certified => "certified",
            Certification::ExactBoundary => "exact_boundary",
            Certification::Ambiguous => "ambiguous",
        };
        writeln!(
            out,
            "{},{:.17e},{cert}",
            coeffs.join(","),
            t.max_conjugate_modulus
        )
        .unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// Unit root

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRoot {
    /// The root congruent to `a_l` mod `l`.
    pub unit: u64,
    /// The other root, divisible by `l`.
    pub cofactor: u64,
    pub modulus: u64,
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let g = a.extended_gcd(&m);
    (g.gcd == 1).then(|| g.x.rem_euclid(m))
}

/// The root `u ≡ a_l (mod l)` of `X^2 - a_l·X + χ(l)·l^{k-1}` modulo
/// `l^precision`, by Hensel lifting.
pub fn unit_root(a_l: i64, chi_l: i64, k: u32, l: u64, precision: u32) -> Result<UnitRoot> {
    if chi_l.abs() != 1 {
        return Err(Error::IrrationalCharacter(l));
    }
    if !is_ordinary_rational(a_l, l) {
        return Err(Error::NotOrdinary(l));
    }
    if k < 2 || precision == 0 {
        return Err(Error::InvalidArgument(
            "unit_root needs k >= 2 and precision >= 1".into(),
        ));
    }
    let modulus = (l as u128)
        .checked_pow(precision)
        .filter(|&m| m < 1 << 62)
        .ok_or_else(|| Error::InvalidArgument(format!("{l}^{precision} is too large")))?
        as i128;
    let a = a_l as i128;
    let c = (chi_l as i128 * (l as i128).pow(k - 1)).rem_euclid(modulus);
    let f = |u: i128| (u * u - a * u + c).rem_euclid(modulus);
    let mut u = a.rem_euclid(l as i128);
    let mut reached = 1u32;
    while reached < precision {
        reached = (2 * reached).min(precision);
        let m = (l as i128).pow(reached);
        // f'(u) = 2u - a ≡ a (mod l), a unit
        let inv = mod_inverse((2 * u - a).rem_euclid(m), m).expect("derivative is a unit");
        let fu = (u * u - a * u + c).rem_euclid(m);
        u = (u - fu * inv % m).rem_euclid(m);
    }
    debug_assert_eq!(f(u), 0);
    Ok(UnitRoot {
        unit: u as u64,
        cofactor: (a - u).rem_euclid(modulus) as u64,
        modulus: modulus as u64,
    })
}
