//! The compact group `U(2)_m`: irreducible characters `det^a ⊗ Sym^b`, the
//! Haar measure (uniform over determinant fibers, `(2/π) sin²θ dθ` in the
//! angle) and deterministic Haar sampling.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{unit_turn, RootOfUnity};

/// Samples per independently seeded chunk in [`sample_haar`].
pub const SAMPLE_CHUNK: usize = 4096;

/// Target accuracy of the angular quadrature.
pub const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaarU2m {
    pub m: u64,
}

/// Index of the irreducible representation `det^a ⊗ Sym^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IrrepIndex {
    pub a: u64,
    pub b: u64,
}

impl IrrepIndex {
    pub fn new(a: u64, b: u64, m: u64) -> Result<Self> {
        if a >= m {
            return Err(Error::InvalidArgument(format!(
                "a = {a} must be below m = {m}"
            )));
        }
        Ok(IrrepIndex { a, b })
    }

    pub fn dimension(&self) -> u64 {
        self.b + 1
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if (0.0..=PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "angle {theta} outside [0, π]"
        )))
    }
}

/// `U_b(x)`, the Chebyshev polynomial of the second kind, by its
/// three-term recurrence. `U_b(cos θ) = sin((b+1)θ)/sin θ`, and the
/// recurrence gives the removable values `(b+1)(±1)^b` at `θ ∈ {0, π}`
/// without special cases.
pub fn chebyshev_u(b: u64, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..b {
        (prev, cur) = (cur, 2.0 * x * cur - prev);
    }
    cur
}

fn chebyshev_u_angle(b: u64, theta: f64) -> f64 {
    if theta == 0.0 {
        (b + 1) as f64
    } else if theta == PI {
        if b.is_multiple_of(2) {
            (b + 1) as f64
        } else {
            -((b + 1) as f64)
        }
    } else {
        chebyshev_u(b, theta.cos())
    }
}

/// Trace of `det^a ⊗ Sym^b` on `diag(ζ^{1/2}e^{iθ}, ζ^{1/2}e^{-iθ})`:
/// `ζ^a · ζ^{b/2} · U_b(cos θ)` with the principal square root.
pub fn character_value(idx: IrrepIndex, theta: f64, det: RootOfUnity) -> Result<Complex64> {
    check_angle(theta)?;
    let twist = det.half_power(2 * idx.a as i64 + idx.b as i64);
    Ok(twist * chebyshev_u_angle(idx.b, theta))
}

/// Sato-Tate density `(2/π) sin²θ`.
pub fn sin2_pdf(theta: f64) -> f64 {
    2.0 / PI * theta.sin().powi(2)
}

/// Cumulative Sato-Tate distribution `(θ - sin θ cos θ)/π`.
pub fn sin2_cdf(theta: f64) -> Result<f64> {
    check_angle(theta)?;
    Ok(sin2_cdf_unchecked(theta))
}

fn sin2_cdf_unchecked(theta: f64) -> f64 {
    if theta == PI {
        return 1.0;
    }
    let (s, c) = theta.sin_cos();
    ((theta - s * c) / PI).clamp(0.0, 1.0)
}

/// Inverse of [`sin2_cdf`] by bisection to `1e-12` in the angle.
pub fn sin2_quantile(u: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, PI);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if sin2_cdf_unchecked(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute accuracy `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    // split once up front so symmetric integrands cannot fool the first test
    let m = 0.5 * (a + b);
    let fm = f(m);
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, 40)
        + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, 40)
}

/// `Σ_{e=0}^{m-1} exp(πi·n·e/m)`, summed in closed form.
fn fiber_sum(n: i64, m: u64) -> Complex64 {
    let two_m = 2 * m as i64;
    if n.rem_euclid(two_m) == 0 {
        return Complex64::new(m as f64, 0.0);
    }
    if n % 2 == 0 {
        return Complex64::new(0.0, 0.0);
    }
    // geometric series with ratio ω, ω^m = -1
    let omega = unit_turn(n as i128, two_m as i128);
    Complex64::new(2.0, 0.0) / (Complex64::new(1.0, 0.0) - omega)
}

/// `∫_0^π U_b(cos θ) U_c(cos θ) (2/π) sin²θ dθ` by adaptive quadrature.
pub fn angular_inner_product(b: u64, c: u64) -> f64 {
    adaptive_simpson(
        &|t: f64| chebyshev_u_angle(b, t) * chebyshev_u_angle(c, t) * sin2_pdf(t),
        0.0,
        PI,
        QUAD_TOL,
    )
}

/// Haar integral of the character of `det^a ⊗ Sym^b` over `U(2)_m`.
pub fn haar_expectation(idx: IrrepIndex, m: u64) -> Complex64 {
    let fibers = fiber_sum(2 * idx.a as i64 + idx.b as i64, m) / m as f64;
    fibers * angular_inner_product(idx.b, 0)
}

/// `⟨χ, χ'⟩ = ∫ χ·conj(χ') dμ` over `U(2)_m`.
pub fn haar_inner_product(x: IrrepIndex, y: IrrepIndex, m: u64) -> Complex64 {
    let n = 2 * (x.a as i64 - y.a as i64) + (x.b as i64 - y.b as i64);
    fiber_sum(n, m) / m as f64 * angular_inner_product(x.b, y.b)
}

fn sample_chunk(m: u64, seed: u64, chunk: usize, len: usize) -> Vec<(f64, RootOfUnity)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ chunk as u64);
    (0..len)
        .map(|_| {
            let u: f64 = rng.gen();
            let e = rng.gen_range(0..m);
            (sin2_quantile(u), RootOfUnity::new(e as i64, m).unwrap())
        })
        .collect()
}

/// `count` Haar-random classes of `U(2)_m`.
///
/// Draws are made in chunks of [`SAMPLE_CHUNK`]; chunk `i` uses its own
/// generator seeded with `seed ^ i`, so the output depends only on
/// `(m, seed, count)` and not on how many threads produce it.
pub fn sample_haar(m: u64, seed: u64, count: usize) -> Result<Vec<(f64, RootOfUnity)>> {
    sample_haar_in(m, seed, count, None)
}

pub fn sample_haar_in(
    m: u64,
    seed: u64,
    count: usize,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<(f64, RootOfUnity)>> {
    if count == 0 || m == 0 {
        return Err(Error::InvalidArgument(
            "sample_haar needs count >= 1 and m >= 1".into(),
        ));
    }
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let make = |i: usize| sample_chunk(m, seed, i, SAMPLE_CHUNK.min(count - i * SAMPLE_CHUNK));
    let parts: Vec<Vec<(f64, RootOfUnity)>> = match pool {
        Some(pool) => pool.install(|| (0..chunks).into_par_iter().map(make).collect()),
        None => (0..chunks).map(make).collect(),
    };
    Ok(parts.concat())
}
