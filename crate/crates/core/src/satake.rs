//! Sato-Tate conjugacy classes `x_{f,p}` in `U(2)_m` from Hecke eigenvalues.
//!
//! A class is stored as `(θ, e)`: its determinant is `ζ = ζ_m^e` and it
//! contains `diag(ζ^{1/2} e^{iθ}, ζ^{1/2} e^{-iθ})` with `θ ∈ [0, π]`. The
//! square root is fixed globally as `ζ^{1/2} = exp(πi·e/m)` (the principal
//! convention); [`SqrtConvention::Negated`] exists only to test what the
//! other choice would do.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{cache::fmt_f64, EigenvalueRecord, NewformDescriptor};
use crate::numtheory::RootOfUnity;

/// Default tolerance for the Ramanujan and reality checks.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqrtConvention {
    #[default]
    Principal,
    Negated,
}

impl SqrtConvention {
    pub fn describe(&self) -> &'static str {
        match self {
            SqrtConvention::Principal => "zeta^(1/2) = exp(pi*i*e/m), e in 0..m",
            SqrtConvention::Negated => "zeta^(1/2) = -exp(pi*i*e/m), e in 0..m",
        }
    }

    /// `ζ^{1/2}` for the determinant `ζ`.
    pub fn sqrt(&self, det: RootOfUnity) -> Complex64 {
        let r = det.half_power(1);
        match self {
            SqrtConvention::Principal => r,
            SqrtConvention::Negated => -r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatakeClass {
    pub p: u64,
    pub theta: f64,
    pub det: RootOfUnity,
    pub weight: u32,
    /// Normalized imaginary part left over after rotating by `ζ^{-1/2}`.
    pub residual: f64,
}

impl SatakeClass {
    /// `p^{(k-1)/2}`.
    pub fn scale(&self) -> f64 {
        weight_scale(self.p, self.weight)
    }

    /// Arithmetically normalized Satake parameters `(α̃, β̃)`, of modulus
    /// `p^{(k-1)/2}`.
    pub fn parameters(&self) -> (Complex64, Complex64) {
        let base = SqrtConvention::Principal.sqrt(self.det) * self.scale();
        let rot = Complex64::from_polar(1.0, self.theta);
        (base * rot, base * rot.conj())
    }

    /// The trace `a_p` this class encodes.
    pub fn reconstruct_ap(&self) -> Complex64 {
        SqrtConvention::Principal.sqrt(self.det) * (2.0 * self.scale() * self.theta.cos())
    }
}

pub(crate) fn weight_scale(p: u64, k: u32) -> f64 {
    match k {
        1 => 1.0,
        2 => (p as f64).sqrt(),
        3 => p as f64,
        _ => (p as f64).powf((k as f64 - 1.0) / 2.0),
    }
}

fn arg_0_2pi(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Roots of `X^2 - a_p·X + p^{k-1}·χ(p)`, larger modulus first and ties
/// broken by argument in `[0, 2π)`.
pub fn hecke_roots(ap: Complex64, chi: RootOfUnity, k: u32, p: u64) -> (Complex64, Complex64) {
    let constant = chi.value() * (p as f64).powi(k as i32 - 1);
    let disc = (ap * ap - constant * 4.0).sqrt();
    // pick the sign that avoids cancellation, then use Vieta for the other
    let big = if (ap + disc).norm() >= (ap - disc).norm() {
        (ap + disc) * 0.5
    } else {
        (ap - disc) * 0.5
    };
    let small = if big.norm() > 0.0 {
        constant / big
    } else {
        big
    };
    let (m1, m2) = (big.norm(), small.norm());
    let tie = (m1 - m2).abs() <= 1e-12 * m1.max(m2);
    let swap = if tie {
        arg_0_2pi(small) < arg_0_2pi(big)
    } else {
        m2 > m1
    };
    if swap {
        (small, big)
    } else {
        (big, small)
    }
}

/// The class `x_{f,p}` with the principal square-root convention.
pub fn satake_class(
    ap: Complex64,
    chi: RootOfUnity,
    k: u32,
    p: u64,
    tol: f64,
) -> Result<SatakeClass> {
    satake_class_with(ap, chi, k, p, tol, SqrtConvention::Principal)
}

pub fn satake_class_with(
    ap: Complex64,
    chi: RootOfUnity,
    k: u32,
    p: u64,
    tol: f64,
    convention: SqrtConvention,
) -> Result<SatakeClass> {
    let scale = 2.0 * weight_scale(p, k);
    let w = ap / convention.sqrt(chi) / scale;
    if w.re.abs() > 1.0 + tol {
        return Err(Error::RamanujanViolation {
            p,
            normalized: w.re,
        });
    }
    let residual = w.im.abs();
    if residual > tol {
        return Err(Error::NonRealDefect { p, residual });
    }
    Ok(SatakeClass {
        p,
        theta: w.re.clamp(-1.0, 1.0).acos(),
        det: chi,
        weight: k,
        residual,
    })
}

/// Exact Ramanujan inequality `a_p^2 <= 4·p^{k-1}`.
pub fn ramanujan_check_exact(ap: i64, k: u32, p: u64) -> bool {
    let lhs = (ap as i128) * (ap as i128);
    let rhs = 4 * (p as i128).pow(k - 1);
    lhs <= rhs
}

/// Classes for every record at a good prime of `desc`, in record order.
/// The tolerance is widened by each record's embedding error.
pub fn classes_from_records(
    desc: &NewformDescriptor,
    records: &[EigenvalueRecord],
    tol: f64,
) -> Result<Vec<SatakeClass>> {
    records
        .iter()
        .filter(|r| desc.is_good(r.p))
        .map(|r| {
            if let Some(ap) = r.exact_integer().filter(|_| desc.is_rational()) {
                if !ramanujan_check_exact(ap, desc.weight, r.p) {
                    return Err(Error::RamanujanViolation {
                        p: r.p,
                        normalized: ap as f64 / (2.0 * weight_scale(r.p, desc.weight)),
                    });
                }
            }
            let chi = desc
                .nebentypus
                .value(r.p)
                .ok_or_else(|| Error::InvalidArgument(format!("no character value at {}", r.p)))?;
            let chi = RootOfUnity::new(chi.exponent() as i64, desc.nebentypus.order)?;
            let scaled_tol = tol + r.err / (2.0 * weight_scale(r.p, desc.weight));
            satake_class(r.embedded, chi, desc.weight, r.p, scaled_tol)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteinbergVerdict {
    SteinbergTwistLikely,
    Unknown,
    No,
}

/// Whether the local component at `q | N` looks like an unramified twist of
/// Steinberg, judged from the level and character alone. Source-asserted
/// flags on the descriptor are left untouched.
pub fn steinberg_heuristic(desc: &NewformDescriptor, q: u64) -> Result<SteinbergVerdict> {
    if q == 0 || !desc.level.is_multiple_of(q) {
        return Err(Error::NotALevelDivisor {
            q,
            level: desc.level,
        });
    }
    if (desc.level / q).is_multiple_of(q) {
        return Ok(SteinbergVerdict::Unknown);
    }
    if desc.nebentypus.modulus.is_multiple_of(q) {
        Ok(SteinbergVerdict::No)
    } else {
        Ok(SteinbergVerdict::SteinbergTwistLikely)
    }
}

/// Class export: `p,theta,det_exp,m` rows after a header line.
pub fn classes_csv(classes: &[SatakeClass]) -> String {
    let mut out = String::from("p,theta,det_exp,m\n");
    for c in classes {
        writeln!(
            out,
            "{},{},{},{}",
            c.p,
            fmt_f64(c.theta),
            c.det.exponent(),
            c.det.order()
        )
        .unwrap();
    }
    out
}
