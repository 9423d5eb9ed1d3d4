//! Partial Euler products of twisted symmetric-power L-functions
//! `L(χ^a ⊗ Sym^b f, s)` over good primes, in the arithmetic normalization:
//! the Satake parameters `α̃, β̃` have modulus `p^{(k-1)/2}` and the product
//! converges absolutely for `Re s > 1 + b(k-1)/2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::sieve_primes;
use crate::satake::SatakeClass;

pub const NORMALIZATION: &str =
    "arithmetic: |alpha|=|beta|=p^((k-1)/2), convergent for Re s > 1+b(k-1)/2; ramified primes omitted";

const SINGULAR_EPS: f64 = 1e-14;
/// Relative tolerance of [`clebsch_gordan_check`].
pub const CG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerFactorSpec {
    /// Twist exponent: the factor uses `χ(p)^a`.
    pub a: u64,
    /// Symmetric power; the L-function has degree `b + 1`.
    pub b: u64,
    pub k: u32,
}

impl EulerFactorSpec {
    pub fn new(a: u64, b: u64, k: u32) -> Self {
        EulerFactorSpec { a, b, k }
    }

    /// `1 + b(k-1)/2`, the edge of absolute convergence.
    pub fn abscissa(&self) -> f64 {
        1.0 + self.b as f64 * (self.k as f64 - 1.0) / 2.0
    }

    /// Unit-modulus parts `χ^a·ζ^{b/2}·e^{i(b-2j)θ}` of the parameters
    /// `χ^a·α̃^{b-j}β̃^j`, which all carry the size `p^{b(k-1)/2}`.
    fn unit_parameters(&self, class: &SatakeClass) -> Vec<Complex64> {
        let twist = class.det.pow(self.a as i64).value() * class.det.half_power(self.b as i64);
        (0..=self.b)
            .map(|j| {
                twist * Complex64::from_polar(1.0, (self.b as f64 - 2.0 * j as f64) * class.theta)
            })
            .collect()
    }
}

fn factor_from_units(units: &[Complex64], p: u64, shift: f64, s: Complex64) -> Result<Complex64> {
    let scale = ((Complex64::new(shift, 0.0) - s) * (p as f64).ln()).exp();
    let mut inv = Complex64::new(1.0, 0.0);
    for &u in units {
        let d = Complex64::new(1.0, 0.0) - u * scale;
        if d.norm() < SINGULAR_EPS {
            return Err(Error::SingularFactor(p));
        }
        inv *= d;
    }
    Ok(inv.inv())
}

/// The local factor `Π_j (1 - χ(p)^a α̃^{b-j} β̃^j p^{-s})^{-1}`.
pub fn euler_factor(class: &SatakeClass, spec: EulerFactorSpec, s: Complex64) -> Result<Complex64> {
    if spec.k != class.weight {
        return Err(Error::WeightMismatch(format!(
            "Euler factor weight {} but class at {} has weight {}",
            spec.k, class.p, class.weight
        )));
    }
    let edge = spec.abscissa() - 0.25;
    if s.re <= edge {
        return Err(Error::OutsideRegion { re: s.re, im: s.im });
    }
    let shift = spec.b as f64 * (spec.k as f64 - 1.0) / 2.0;
    factor_from_units(&spec.unit_parameters(class), class.p, shift, s)
}

/// Classes at the good primes of a form of the given level, ascending.
#[derive(Debug, Clone, Copy)]
pub struct ClassTable<'a> {
    pub classes: &'a [SatakeClass],
    pub level: u64,
}

impl<'a> ClassTable<'a> {
    pub fn new(classes: &'a [SatakeClass], level: u64) -> Self {
        ClassTable { classes, level }
    }

    /// Classes at every good prime `<= p_max`, or an error naming the
    /// first missing prime.
    fn covering(&self, p_max: u64) -> Result<&'a [SatakeClass]> {
        if p_max < 2 {
            return Ok(&[]);
        }
        let end = self.classes.partition_point(|c| c.p <= p_max);
        let have = &self.classes[..end];
        let mut it = have.iter().map(|c| c.p);
        for &p in sieve_primes(2, p_max)?.iter() {
            if self.level.is_multiple_of(p) {
                continue;
            }
            match it.next() {
                Some(q) if q == p => {}
                _ => return Err(Error::MissingClass(p)),
            }
        }
        if it.next().is_some() {
            return Err(Error::InvalidArgument(
                "class table has classes at bad or non-prime indices, or is unsorted".into(),
            ));
        }
        Ok(have)
    }
}

struct Prepared {
    p: u64,
    units: Vec<Complex64>,
}

fn prepare(
    classes: &[SatakeClass],
    spec: EulerFactorSpec,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<Prepared>> {
    if let Some(c) = classes.iter().find(|c| c.weight != spec.k) {
        return Err(Error::WeightMismatch(format!(
            "Euler factor weight {} but class at {} has weight {}",
            spec.k, c.p, c.weight
        )));
    }
    let one = |c: &SatakeClass| Prepared {
        p: c.p,
        units: spec.unit_parameters(c),
    };
    Ok(match pool {
        Some(pool) => pool.install(|| classes.par_iter().map(one).collect()),
        None => classes.iter().map(one).collect(),
    })
}

fn product(prepared: &[Prepared], spec: EulerFactorSpec, s: Complex64) -> Result<Complex64> {
    let shift = spec.b as f64 * (spec.k as f64 - 1.0) / 2.0;
    let mut acc = Complex64::new(1.0, 0.0);
    for pr in prepared {
        acc *= factor_from_units(&pr.units, pr.p, shift, s)?;
    }
    Ok(acc)
}

/// `Π_{p <= p_max, p good} euler_factor(x_p, spec, s)`, multiplied in
/// ascending `p`.
pub fn partial_l_product(
    table: ClassTable<'_>,
    spec: EulerFactorSpec,
    s: Complex64,
    p_max: u64,
) -> Result<Complex64> {
    partial_l_product_in(table, spec, s, p_max, None)
}

pub fn partial_l_product_in(
    table: ClassTable<'_>,
    spec: EulerFactorSpec,
    s: Complex64,
    p_max: u64,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Complex64> {
    if s.re <= spec.abscissa() {
        return Err(Error::OutsideRegion { re: s.re, im: s.im });
    }
    let classes = table.covering(p_max)?;
    product(&prepare(classes, spec, pool)?, spec, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
    pub count: usize,
}

impl TGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(end >= start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "empty t grid [{start}, {end}] step {step}"
            )));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        Ok(TGrid {
            start,
            end,
            step,
            count,
        })
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub a: u64,
    pub b: u64,
    pub sigma: f64,
    pub t_grid: TGrid,
    pub p_max: u64,
    pub min_modulus: f64,
    pub argmin_t: f64,
    pub normalization: String,
}

/// Smallest `|L_{p_max}(σ + it)|` over the grid, first minimizer on ties.
pub fn nonvanishing_scan(
    table: ClassTable<'_>,
    spec: EulerFactorSpec,
    sigma: f64,
    grid: TGrid,
    p_max: u64,
    pool: Option<&rayon::ThreadPool>,
) -> Result<ScanReport> {
    if sigma < spec.abscissa() + 0.25 {
        return Err(Error::OutsideRegion { re: sigma, im: 0.0 });
    }
    let classes = table.covering(p_max)?;
    let prepared = prepare(classes, spec, pool)?;
    let eval =
        |i: usize| product(&prepared, spec, Complex64::new(sigma, grid.point(i))).map(|z| z.norm());
    let moduli: Vec<f64> = match pool {
        Some(pool) => pool.install(|| {
            (0..grid.count)
                .into_par_iter()
                .map(eval)
                .collect::<Result<_>>()
        })?,
        None => (0..grid.count).map(eval).collect::<Result<_>>()?,
    };
    let (imin, &min) = moduli
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (i, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((i, v)),
        })
        .expect("grid has at least one point");
    Ok(ScanReport {
        a: spec.a,
        b: spec.b,
        sigma,
        t_grid: grid,
        p_max,
        min_modulus: min,
        argmin_t: grid.point(imin),
        normalization: NORMALIZATION.to_string(),
    })
}

/// Checks `L_p(χ^a Sym^{b+1}, s)·L_p(χ^{a+1} Sym^{b-1}, s-k+1)` against the
/// factor of `χ^a ⊗ Sym^b ⊗ std`, whose parameters `α̃^{b-i}β̃^i·{α̃, β̃}`
/// are formed here by direct multiplication.
pub fn clebsch_gordan_check(class: &SatakeClass, a: u64, b: u64, s: Complex64) -> Result<bool> {
    Ok(clebsch_gordan_error(class, a, b, s)? < CG_TOL)
}

/// Relative difference between the two sides of [`clebsch_gordan_check`].
pub fn clebsch_gordan_error(class: &SatakeClass, a: u64, b: u64, s: Complex64) -> Result<f64> {
    if b == 0 {
        return Err(Error::InvalidArgument(
            "Clebsch-Gordan check needs b >= 1".into(),
        ));
    }
    let k = class.weight;
    let m = class.det.order();
    let upper = euler_factor(class, EulerFactorSpec::new(a, b + 1, k), s)?;
    let lower = euler_factor(
        class,
        EulerFactorSpec::new((a + 1) % m, b - 1, k),
        s - Complex64::new(k as f64 - 1.0, 0.0),
    )?;
    let lhs = upper * lower;

    let (alpha, beta) = class.parameters();
    let chi_a = class.det.pow(a as i64).value();
    let ps = (-s * (class.p as f64).ln()).exp();
    let mut inv = Complex64::new(1.0, 0.0);
    for i in 0..=b {
        let mono = alpha.powu((b - i) as u32) * beta.powu(i as u32);
        for x in [mono * alpha, mono * beta] {
            let d = Complex64::new(1.0, 0.0) - chi_a * x * ps;
            if d.norm() < SINGULAR_EPS {
                return Err(Error::SingularFactor(class.p));
            }
            inv *= d;
        }
    }
    let rhs = inv.inv();
    Ok((lhs - rhs).norm() / rhs.norm())
}
